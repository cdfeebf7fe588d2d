//! Sparse user-item rating storage, dataset ingestion, holdout splitting,
//! and matrix binarization.

mod load;

pub use load::{load_bookcrossing, load_jester};

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DataError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: parse error: {message}")]
    Parse { line: u64, message: String },
    #[error("line {line}: invalid value: {message}")]
    Validation { line: u64, message: String },
    #[error("duplicate rating for user {user:?} item {item:?}")]
    DuplicateEntry { user: String, item: String },
    #[error("rating {value} outside scale [{min}, {max}]")]
    OutOfScale { value: f64, min: f64, max: f64 },
    #[error("invalid rating scale: min {min} must be below max {max}")]
    InvalidScale { min: f64, max: f64 },
    #[error("unknown user {0:?}")]
    UnknownUser(String),
    #[error("unknown item {0:?}")]
    UnknownItem(String),
    #[error("matrix has no ratings")]
    EmptyMatrix,
    #[error("user {user:?} has {ratings} rating(s); holdout needs at least 2")]
    IneligibleUser { user: String, ratings: usize },
}

/// Inclusive rating bounds plus the derived midpoint.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct RatingScale {
    min: f64,
    max: f64,
}

impl RatingScale {
    pub fn new(min: f64, max: f64) -> Result<Self, DataError> {
        if !(min.is_finite() && max.is_finite() && min < max) {
            return Err(DataError::InvalidScale { min, max });
        }
        Ok(RatingScale { min, max })
    }

    pub fn min(&self) -> f64 {
        self.min
    }

    pub fn max(&self) -> f64 {
        self.max
    }

    pub fn midpoint(&self) -> f64 {
        (self.min + self.max) / 2.0
    }

    pub fn contains(&self, value: f64) -> bool {
        value.is_finite() && value >= self.min && value <= self.max
    }

    pub fn clamp(&self, value: f64) -> f64 {
        value.clamp(self.min, self.max)
    }
}

/// User and item identifiers interned to dense indices.
///
/// Identifiers are opaque strings (BookCrossing ISBNs are not numeric);
/// indices are assigned in first-seen order at load time and shared between
/// a matrix and everything derived from it.
#[derive(Debug, Default)]
struct IdSpace {
    users: Vec<String>,
    items: Vec<String>,
    user_index: HashMap<String, u32>,
    item_index: HashMap<String, u32>,
}

impl IdSpace {
    fn intern_user(&mut self, id: &str) -> u32 {
        if let Some(&idx) = self.user_index.get(id) {
            return idx;
        }
        let idx = self.users.len() as u32;
        self.users.push(id.to_owned());
        self.user_index.insert(id.to_owned(), idx);
        idx
    }

    fn intern_item(&mut self, id: &str) -> u32 {
        if let Some(&idx) = self.item_index.get(id) {
            return idx;
        }
        let idx = self.items.len() as u32;
        self.items.push(id.to_owned());
        self.item_index.insert(id.to_owned(), idx);
        idx
    }
}

/// Sparse user x item rating matrix.
///
/// Rows are per-user lists of `(item index, rating)` sorted by item index.
/// Every stored rating lies within the scale and each (user, item) pair is
/// stored at most once. Cloning deep-copies the rows but shares the interned
/// id tables.
#[derive(Debug, Clone)]
pub struct RatingMatrix {
    ids: Arc<IdSpace>,
    rows: Vec<Vec<(u32, f64)>>,
    n_entries: usize,
    scale: RatingScale,
}

impl RatingMatrix {
    pub fn new(scale: RatingScale) -> Self {
        RatingMatrix {
            ids: Arc::new(IdSpace::default()),
            rows: Vec::new(),
            n_entries: 0,
            scale,
        }
    }

    /// Build a matrix from `(user, item, rating)` triples, interning ids in
    /// order of first appearance.
    pub fn from_triples(
        scale: RatingScale,
        triples: &[(&str, &str, f64)],
    ) -> Result<Self, DataError> {
        let mut builder = MatrixBuilder::new(scale);
        for &(user, item, rating) in triples {
            builder.touch(user, item);
            builder.add(user, item, rating)?;
        }
        Ok(builder.finish())
    }

    pub fn n_users(&self) -> usize {
        self.ids.users.len()
    }

    pub fn n_items(&self) -> usize {
        self.ids.items.len()
    }

    pub fn n_entries(&self) -> usize {
        self.n_entries
    }

    pub fn scale(&self) -> RatingScale {
        self.scale
    }

    pub fn user_id(&self, user: u32) -> &str {
        &self.ids.users[user as usize]
    }

    pub fn item_id(&self, item: u32) -> &str {
        &self.ids.items[item as usize]
    }

    pub fn user_index(&self, id: &str) -> Option<u32> {
        self.ids.user_index.get(id).copied()
    }

    pub fn item_index(&self, id: &str) -> Option<u32> {
        self.ids.item_index.get(id).copied()
    }

    /// Ratings of one user, sorted by item index.
    pub fn user_ratings(&self, user: u32) -> &[(u32, f64)] {
        self.rows
            .get(user as usize)
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    pub fn rating(&self, user: u32, item: u32) -> Option<f64> {
        let row = self.user_ratings(user);
        row.binary_search_by_key(&item, |&(i, _)| i)
            .ok()
            .map(|pos| row[pos].1)
    }

    pub fn entries(&self) -> impl Iterator<Item = (u32, u32, f64)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(u, row)| row.iter().map(move |&(i, r)| (u as u32, i, r)))
    }

    /// Insert a rating for already-interned indices. Errors on duplicates and
    /// out-of-scale values; entry count stays consistent.
    pub fn insert(&mut self, user: u32, item: u32, rating: f64) -> Result<(), DataError> {
        if !self.scale.contains(rating) {
            return Err(DataError::OutOfScale {
                value: rating,
                min: self.scale.min,
                max: self.scale.max,
            });
        }
        let row = &mut self.rows[user as usize];
        match row.binary_search_by_key(&item, |&(i, _)| i) {
            Ok(_) => Err(DataError::DuplicateEntry {
                user: self.ids.users[user as usize].clone(),
                item: self.ids.items[item as usize].clone(),
            }),
            Err(pos) => {
                row.insert(pos, (item, rating));
                self.n_entries += 1;
                Ok(())
            }
        }
    }

    pub fn remove(&mut self, user: u32, item: u32) -> Option<f64> {
        let row = &mut self.rows[user as usize];
        match row.binary_search_by_key(&item, |&(i, _)| i) {
            Ok(pos) => {
                let (_, r) = row.remove(pos);
                self.n_entries -= 1;
                Some(r)
            }
            Err(_) => None,
        }
    }

    /// Per-item column view: for each item, the `(user, rating)` pairs sorted
    /// by user index. Built on demand; O(entries).
    pub fn columns(&self) -> Vec<Vec<(u32, f64)>> {
        let mut cols = vec![Vec::new(); self.n_items()];
        for (u, row) in self.rows.iter().enumerate() {
            for &(i, r) in row {
                cols[i as usize].push((u as u32, r));
            }
        }
        cols
    }
}

/// Incremental construction used by the loaders.
pub(crate) struct MatrixBuilder {
    ids: IdSpace,
    rows: Vec<Vec<(u32, f64)>>,
    n_entries: usize,
    scale: RatingScale,
}

impl MatrixBuilder {
    pub(crate) fn new(scale: RatingScale) -> Self {
        MatrixBuilder {
            ids: IdSpace::default(),
            rows: Vec::new(),
            n_entries: 0,
            scale,
        }
    }

    /// Register a user and item without storing a rating. Loaders call this
    /// for every well-formed row so that users whose ratings are all skipped
    /// (sentinel or implicit) still count toward the user set.
    pub(crate) fn touch(&mut self, user: &str, item: &str) {
        let u = self.ids.intern_user(user);
        self.ids.intern_item(item);
        if self.rows.len() <= u as usize {
            self.rows.resize(u as usize + 1, Vec::new());
        }
    }

    pub(crate) fn add(&mut self, user: &str, item: &str, rating: f64) -> Result<(), DataError> {
        let u = self.ids.intern_user(user);
        let i = self.ids.intern_item(item);
        if self.rows.len() <= u as usize {
            self.rows.resize(u as usize + 1, Vec::new());
        }
        let row = &mut self.rows[u as usize];
        match row.binary_search_by_key(&i, |&(j, _)| j) {
            Ok(_) => Err(DataError::DuplicateEntry {
                user: user.to_owned(),
                item: item.to_owned(),
            }),
            Err(pos) => {
                row.insert(pos, (i, rating));
                self.n_entries += 1;
                Ok(())
            }
        }
    }

    pub(crate) fn finish(mut self) -> RatingMatrix {
        self.rows.resize(self.ids.users.len(), Vec::new());
        RatingMatrix {
            ids: Arc::new(self.ids),
            rows: self.rows,
            n_entries: self.n_entries,
            scale: self.scale,
        }
    }
}

/// One held-out user's split: `training` keeps the full community plus a
/// single seed rating for the user; `control` holds the user's removed
/// ratings.
#[derive(Debug, Clone)]
pub struct HoldoutSplit {
    pub user: u32,
    pub training: RatingMatrix,
    pub control: BTreeMap<u32, f64>,
    pub seed_item: u32,
}

/// Remove all but one seeded-random rating of `user` from the matrix.
///
/// Deterministic for a given `rng_seed`: the kept rating is chosen by a
/// single uniform draw over the user's row.
pub fn holdout_user(
    matrix: &RatingMatrix,
    user: u32,
    rng_seed: u64,
) -> Result<HoldoutSplit, DataError> {
    let row = matrix.user_ratings(user);
    if (user as usize) >= matrix.n_users() || row.len() < 2 {
        return Err(DataError::IneligibleUser {
            user: matrix
                .ids
                .users
                .get(user as usize)
                .cloned()
                .unwrap_or_else(|| format!("#{user}")),
            ratings: row.len(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let keep = rng.random_range(0..row.len());
    let (seed_item, seed_rating) = row[keep];

    let mut control = BTreeMap::new();
    for &(item, rating) in row {
        if item != seed_item {
            control.insert(item, rating);
        }
    }
    let mut training = matrix.clone();
    training.rows[user as usize] = vec![(seed_item, seed_rating)];
    training.n_entries = matrix.n_entries - control.len();

    Ok(HoldoutSplit {
        user,
        training,
        control,
        seed_item,
    })
}

/// Map the matrix to a dense 0/1 matrix over the same users and items:
/// 1 where a rating exists, 0 where it is missing. The result has scale
/// (0, 1) and one entry per cell.
pub fn binarize(matrix: &RatingMatrix) -> RatingMatrix {
    let n_items = matrix.n_items();
    let rows: Vec<Vec<(u32, f64)>> = matrix
        .rows
        .iter()
        .map(|row| {
            let mut dense = vec![0.0; n_items];
            for &(i, _) in row {
                dense[i as usize] = 1.0;
            }
            dense
                .into_iter()
                .enumerate()
                .map(|(i, v)| (i as u32, v))
                .collect()
        })
        .collect();
    let n_entries = rows.iter().map(Vec::len).sum();
    RatingMatrix {
        ids: Arc::clone(&matrix.ids),
        rows,
        n_entries,
        scale: RatingScale::new(0.0, 1.0).unwrap(),
    }
}

/// Arithmetic mean of all stored ratings.
pub fn global_mean(matrix: &RatingMatrix) -> Result<f64, DataError> {
    if matrix.n_entries == 0 {
        return Err(DataError::EmptyMatrix);
    }
    let sum: f64 = matrix.entries().map(|(_, _, r)| r).sum();
    Ok(sum / matrix.n_entries as f64)
}
