//! FunkSVD: gradient-descent matrix factorization trained one feature at a
//! time.
//!
//! The model predicts `mu + dot(P_u, Q_i)` clamped to the rating scale,
//! where `mu` is the training global mean. Training sweeps each feature over
//! all known ratings for `n_iterations` passes; the error for an update is
//! computed against the full prediction, i.e. trained features contribute
//! their current values and not-yet-trained features contribute their
//! initialization values. Factors are initialized uniformly in
//! [0.05, 0.15] from a seeded generator, so training is fully deterministic
//! for a given seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::data::{RatingMatrix, RatingScale};

use super::{FactorConfig, TrainError};

const INIT_LO: f64 = 0.05;
const INIT_HI: f64 = 0.15;

/// Latent-factor model: user and item factor rows plus the global mean.
#[derive(Debug, Clone)]
pub struct FunkSvdModel {
    user_factors: Vec<Vec<f64>>,
    item_factors: Vec<Vec<f64>>,
    global_mean: f64,
    scale: RatingScale,
    known_user: Vec<bool>,
    known_item: Vec<bool>,
}

impl FunkSvdModel {
    /// Assemble a model from explicit parts. `known_*` flags mark users and
    /// items that had at least one training rating; others are unpredictable.
    pub fn from_parts(
        user_factors: Vec<Vec<f64>>,
        item_factors: Vec<Vec<f64>>,
        global_mean: f64,
        scale: RatingScale,
        known_user: Vec<bool>,
        known_item: Vec<bool>,
    ) -> Self {
        FunkSvdModel {
            user_factors,
            item_factors,
            global_mean,
            scale,
            known_user,
            known_item,
        }
    }

    pub fn n_features(&self) -> usize {
        self.user_factors.first().map(Vec::len).unwrap_or(0)
    }

    pub fn global_mean(&self) -> f64 {
        self.global_mean
    }

    pub fn user_factors(&self, user: u32) -> &[f64] {
        &self.user_factors[user as usize]
    }

    pub fn item_factors(&self, item: u32) -> &[f64] {
        &self.item_factors[item as usize]
    }

    /// `mu + dot(P_u, Q_i)` clamped to the scale; `None` for users or items
    /// the training data never rated.
    pub fn predict(&self, user: u32, item: u32) -> Option<f64> {
        let u = user as usize;
        let i = item as usize;
        if u >= self.user_factors.len() || i >= self.item_factors.len() {
            return None;
        }
        if !self.known_user[u] || !self.known_item[i] {
            return None;
        }
        let dot: f64 = self.user_factors[u]
            .iter()
            .zip(&self.item_factors[i])
            .map(|(p, q)| p * q)
            .sum();
        Some(self.scale.clamp(self.global_mean + dot))
    }
}

pub fn train_funk_svd(
    matrix: &RatingMatrix,
    cfg: FactorConfig,
    rng_seed: u64,
) -> Result<FunkSvdModel, TrainError> {
    train_impl(matrix, cfg, rng_seed, false).map(|(m, _)| m)
}

/// Like [`train_funk_svd`] but also records the total squared training error
/// after every sweep, in sweep order across all features.
pub fn train_funk_svd_traced(
    matrix: &RatingMatrix,
    cfg: FactorConfig,
    rng_seed: u64,
) -> Result<(FunkSvdModel, Vec<f64>), TrainError> {
    train_impl(matrix, cfg, rng_seed, true)
}

fn train_impl(
    matrix: &RatingMatrix,
    cfg: FactorConfig,
    rng_seed: u64,
    trace: bool,
) -> Result<(FunkSvdModel, Vec<f64>), TrainError> {
    cfg.validate()?;
    let n_ratings = matrix.n_entries();
    if n_ratings == 0 {
        return Err(TrainError::EmptyMatrix);
    }
    let n_users = matrix.n_users();
    let n_items = matrix.n_items();
    let k = cfg.n_features;
    let lr = cfg.learn_rate;

    // flat samples; the visit order within a sweep is a seeded shuffle,
    // fixed once per training run (part of the determinism contract, and it
    // keeps consecutive updates off the same factor slot)
    struct Sample {
        user: u32,
        item: u32,
        rating: f64,
    }
    let mut samples: Vec<Sample> = matrix
        .entries()
        .map(|(user, item, rating)| Sample { user, item, rating })
        .collect();
    let mu = samples.iter().map(|s| s.rating).sum::<f64>() / n_ratings as f64;

    // factors column-major (feature-major) for the training loop, drawn in
    // user-then-feature order followed by item-then-feature order
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut p = vec![vec![0.0f64; n_users]; k];
    for u in 0..n_users {
        for col in p.iter_mut() {
            col[u] = rng.random_range(INIT_LO..INIT_HI);
        }
    }
    let mut q = vec![vec![0.0f64; n_items]; k];
    for i in 0..n_items {
        for col in q.iter_mut() {
            col[i] = rng.random_range(INIT_LO..INIT_HI);
        }
    }

    // Fisher-Yates over the sample order, drawn after the factor init
    for s in (1..samples.len()).rev() {
        let j = rng.random_range(0..=s);
        samples.swap(s, j);
    }

    // other[s] = prediction minus the current feature's own term: the global
    // mean, all already-trained features, and the init values of the
    // not-yet-trained features
    let mut other = vec![0.0f64; n_ratings];
    for (s, o) in samples.iter().zip(other.iter_mut()) {
        let u = s.user as usize;
        let i = s.item as usize;
        let mut t = mu;
        for f in 1..k {
            t += p[f][u] * q[f][i];
        }
        *o = t;
    }

    let mut sweeps = Vec::new();
    for f in 0..k {
        let p_col = &mut p[f];
        let q_col = &mut q[f];
        for _ in 0..cfg.n_iterations {
            for (s, o) in samples.iter().zip(other.iter()) {
                let pu_slot = &mut p_col[s.user as usize];
                let qi_slot = &mut q_col[s.item as usize];
                let pu = *pu_slot;
                let qi = *qi_slot;
                let err = s.rating - (o + pu * qi);
                *pu_slot = pu + lr * err * qi;
                *qi_slot = qi + lr * err * pu;
            }
            if trace {
                let sse: f64 = samples
                    .iter()
                    .zip(other.iter())
                    .map(|(s, o)| {
                        let e =
                            s.rating - (o + p_col[s.user as usize] * q_col[s.item as usize]);
                        e * e
                    })
                    .sum();
                sweeps.push(sse);
            }
        }
        if p_col.iter().any(|v| !v.is_finite()) || q_col.iter().any(|v| !v.is_finite()) {
            return Err(TrainError::Diverged { feature: f });
        }
        // fold this feature into `other` and lift the next one out
        if f + 1 < k {
            let p_next = &p[f + 1];
            let q_next = &q[f + 1];
            let p_cur = &p[f];
            let q_cur = &q[f];
            for (s, o) in samples.iter().zip(other.iter_mut()) {
                let u = s.user as usize;
                let i = s.item as usize;
                *o += p_cur[u] * q_cur[i] - p_next[u] * q_next[i];
            }
        }
    }

    // transpose to row-major for prediction
    let user_factors: Vec<Vec<f64>> = (0..n_users)
        .map(|u| (0..k).map(|f| p[f][u]).collect())
        .collect();
    let item_factors: Vec<Vec<f64>> = (0..n_items)
        .map(|i| (0..k).map(|f| q[f][i]).collect())
        .collect();
    let mut known_user = vec![false; n_users];
    let mut known_item = vec![false; n_items];
    for s in &samples {
        known_user[s.user as usize] = true;
        known_item[s.item as usize] = true;
    }

    Ok((
        FunkSvdModel {
            user_factors,
            item_factors,
            global_mean: mu,
            scale: matrix.scale(),
            known_user,
            known_item,
        },
        sweeps,
    ))
}
