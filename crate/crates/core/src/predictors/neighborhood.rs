//! User-user and item-item neighborhood collaborative filtering.

use std::collections::HashMap;

use crate::data::RatingMatrix;

use super::NeighborhoodConfig;

/// Pearson correlation between two users' rating vectors over the items
/// both rated. `None` with fewer than two co-rated items or when either
/// side has zero variance over the co-rated set.
pub fn pearson_similarity(a: &[(u32, f64)], b: &[(u32, f64)]) -> Option<f64> {
    let mut n = 0usize;
    let (mut sum_a, mut sum_b) = (0.0, 0.0);
    let (mut ia, mut ib) = (0usize, 0usize);
    // first pass over the sorted-row intersection: means
    let mut shared: Vec<(f64, f64)> = Vec::new();
    while ia < a.len() && ib < b.len() {
        match a[ia].0.cmp(&b[ib].0) {
            std::cmp::Ordering::Less => ia += 1,
            std::cmp::Ordering::Greater => ib += 1,
            std::cmp::Ordering::Equal => {
                shared.push((a[ia].1, b[ib].1));
                sum_a += a[ia].1;
                sum_b += b[ib].1;
                n += 1;
                ia += 1;
                ib += 1;
            }
        }
    }
    if n < 2 {
        return None;
    }
    let mean_a = sum_a / n as f64;
    let mean_b = sum_b / n as f64;
    let (mut cov, mut var_a, mut var_b) = (0.0, 0.0, 0.0);
    for &(ra, rb) in &shared {
        let da = ra - mean_a;
        let db = rb - mean_b;
        cov += da * db;
        var_a += da * da;
        var_b += db * db;
    }
    if var_a == 0.0 || var_b == 0.0 {
        return None;
    }
    Some((cov / (var_a.sqrt() * var_b.sqrt())).clamp(-1.0, 1.0))
}

/// Adjusted-cosine similarity between two items: ratings are centered by
/// each co-rating user's mean before the cosine. `None` with fewer than two
/// co-rating users or a zero centered norm on either side.
///
/// `col_*` are item columns sorted by user index; `user_means` is indexed by
/// user and holds each user's mean over all their ratings.
pub fn adjusted_cosine(
    col_a: &[(u32, f64)],
    col_b: &[(u32, f64)],
    user_means: &[f64],
) -> Option<f64> {
    let (mut ia, mut ib) = (0usize, 0usize);
    let mut n = 0usize;
    let (mut dot, mut norm_a, mut norm_b) = (0.0, 0.0, 0.0);
    while ia < col_a.len() && ib < col_b.len() {
        match col_a[ia].0.cmp(&col_b[ib].0) {
            std::cmp::Ordering::Less => ia += 1,
            std::cmp::Ordering::Greater => ib += 1,
            std::cmp::Ordering::Equal => {
                let mean = user_means[col_a[ia].0 as usize];
                let da = col_a[ia].1 - mean;
                let db = col_b[ib].1 - mean;
                dot += da * db;
                norm_a += da * da;
                norm_b += db * db;
                n += 1;
                ia += 1;
                ib += 1;
            }
        }
    }
    if n < 2 || norm_a == 0.0 || norm_b == 0.0 {
        return None;
    }
    Some((dot / (norm_a.sqrt() * norm_b.sqrt())).clamp(-1.0, 1.0))
}

/// Per-user neighbor table for user-user CF.
#[derive(Debug, Clone)]
pub struct UserUserModel {
    pub(crate) cfg: NeighborhoodConfig,
    /// For each user: `(neighbor, similarity)` sorted by similarity
    /// descending, truncated to `max_neighbors`, all >= `min_similarity`.
    pub(crate) neighbors: Vec<Vec<(u32, f64)>>,
    pub(crate) user_means: Vec<Option<f64>>,
    pub(crate) ratings: RatingMatrix,
}

impl UserUserModel {
    pub fn neighbors(&self, user: u32) -> &[(u32, f64)] {
        &self.neighbors[user as usize]
    }
}

fn row_mean(row: &[(u32, f64)]) -> Option<f64> {
    if row.is_empty() {
        None
    } else {
        Some(row.iter().map(|&(_, r)| r).sum::<f64>() / row.len() as f64)
    }
}

pub fn train_user_user(matrix: &RatingMatrix, cfg: NeighborhoodConfig) -> UserUserModel {
    let n = matrix.n_users();
    let mut neighbors: Vec<Vec<(u32, f64)>> = vec![Vec::new(); n];
    for a in 0..n {
        let row_a = matrix.user_ratings(a as u32);
        if row_a.is_empty() {
            continue;
        }
        for b in (a + 1)..n {
            let row_b = matrix.user_ratings(b as u32);
            if let Some(sim) = pearson_similarity(row_a, row_b) {
                if sim >= cfg.min_similarity {
                    neighbors[a].push((b as u32, sim));
                    neighbors[b].push((a as u32, sim));
                }
            }
        }
    }
    for list in &mut neighbors {
        list.sort_by(|(ua, sa), (ub, sb)| sb.total_cmp(sa).then(ua.cmp(ub)));
        list.truncate(cfg.max_neighbors);
    }
    let user_means = (0..n)
        .map(|u| row_mean(matrix.user_ratings(u as u32)))
        .collect();
    UserUserModel {
        cfg,
        neighbors,
        user_means,
        ratings: matrix.clone(),
    }
}

/// Mean-centered weighted average over neighbors who rated the item:
/// the user's mean plus the similarity-weighted deviation of each
/// contributing neighbor's rating from that neighbor's own mean. Requires at
/// least `min_neighbors` contributors; the result is clamped to the scale.
pub fn predict_user_user(model: &UserUserModel, user: u32, item: u32) -> Option<f64> {
    if user as usize >= model.neighbors.len() {
        return None;
    }
    let user_mean = model.user_means[user as usize]?;
    let mut num = 0.0;
    let mut den = 0.0;
    let mut contributors = 0usize;
    for &(v, sim) in &model.neighbors[user as usize] {
        if let Some(r) = model.ratings.rating(v, item) {
            let neighbor_mean = match model.user_means[v as usize] {
                Some(m) => m,
                None => continue,
            };
            num += sim * (r - neighbor_mean);
            den += sim.abs();
            contributors += 1;
        }
    }
    if contributors < model.cfg.min_neighbors.max(1) || den == 0.0 {
        return None;
    }
    Some(model.ratings.scale().clamp(user_mean + num / den))
}

/// Per-item neighbor table for item-item CF.
#[derive(Debug, Clone)]
pub struct ItemItemModel {
    pub(crate) cfg: NeighborhoodConfig,
    /// For each item: `(neighbor item, similarity)` sorted descending,
    /// truncated to `max_neighbors`, all strictly above `min_similarity`.
    pub(crate) neighbors: Vec<Vec<(u32, f64)>>,
    pub(crate) ratings: RatingMatrix,
}

impl ItemItemModel {
    pub fn neighbors(&self, item: u32) -> &[(u32, f64)] {
        &self.neighbors[item as usize]
    }
}

pub fn train_item_item(matrix: &RatingMatrix, cfg: NeighborhoodConfig) -> ItemItemModel {
    let n_items = matrix.n_items();
    let user_means: Vec<f64> = (0..matrix.n_users())
        .map(|u| row_mean(matrix.user_ratings(u as u32)).unwrap_or(0.0))
        .collect();

    // co-rating accumulation per item pair (i < j): dot and centered norms
    // restricted to co-raters, plus the co-rater count
    let mut acc: Vec<HashMap<u32, (f64, f64, f64, u32)>> = vec![HashMap::new(); n_items];
    for u in 0..matrix.n_users() {
        let row = matrix.user_ratings(u as u32);
        let mean = user_means[u];
        for x in 0..row.len() {
            let (i, ri) = row[x];
            let di = ri - mean;
            for &(j, rj) in &row[x + 1..] {
                let dj = rj - mean;
                let slot = acc[i as usize].entry(j).or_insert((0.0, 0.0, 0.0, 0));
                slot.0 += di * dj;
                slot.1 += di * di;
                slot.2 += dj * dj;
                slot.3 += 1;
            }
        }
    }

    let mut neighbors: Vec<Vec<(u32, f64)>> = vec![Vec::new(); n_items];
    for i in 0..n_items {
        let mut pairs: Vec<(&u32, &(f64, f64, f64, u32))> = acc[i].iter().collect();
        pairs.sort_by_key(|(j, _)| **j);
        for (&j, &(dot, ni, nj, count)) in pairs {
            if count < 2 || ni == 0.0 || nj == 0.0 {
                continue;
            }
            let sim = (dot / (ni.sqrt() * nj.sqrt())).clamp(-1.0, 1.0);
            // strictly-above threshold
            if sim > cfg.min_similarity {
                neighbors[i].push((j, sim));
                neighbors[j as usize].push((i as u32, sim));
            }
        }
    }
    for list in &mut neighbors {
        list.sort_by(|(ia, sa), (ib, sb)| sb.total_cmp(sa).then(ia.cmp(ib)));
        list.truncate(cfg.max_neighbors);
    }
    ItemItemModel {
        cfg,
        neighbors,
        ratings: matrix.clone(),
    }
}

/// Similarity-weighted average of the user's own ratings on the item's
/// neighbors. Requires at least `min_neighbors` contributing neighbors;
/// clamped to the scale.
pub fn predict_item_item(model: &ItemItemModel, user: u32, item: u32) -> Option<f64> {
    if item as usize >= model.neighbors.len() {
        return None;
    }
    let mut num = 0.0;
    let mut den = 0.0;
    let mut contributors = 0usize;
    for &(j, sim) in &model.neighbors[item as usize] {
        if let Some(r) = model.ratings.rating(user, j) {
            num += sim * r;
            den += sim.abs();
            contributors += 1;
        }
    }
    if contributors < model.cfg.min_neighbors.max(1) || den == 0.0 {
        return None;
    }
    Some(model.ratings.scale().clamp(num / den))
}
