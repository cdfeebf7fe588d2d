//! Seeded synthetic rating data with the shape of the two supported
//! datasets: a dense Jester-like matrix (continuous ratings on -10..10, a
//! hundred items, users who rated most of them) and a sparse
//! BookCrossing-like matrix (integer ratings 1..10, long-tail item
//! popularity, 20-100 ratings per user).
//!
//! Ratings come from a low-rank user/item factor model plus biases and
//! noise, so neighborhood and factor predictors have real structure to
//! learn. Everything is driven by a single seed and fully deterministic.

use std::io::{self, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::data::{RatingMatrix, RatingScale};

#[derive(Debug, Clone, Copy)]
pub struct DenseConfig {
    pub n_users: usize,
    pub n_items: usize,
    pub rank: usize,
    /// Weight of the user x item factor interaction.
    pub factor_gain: f64,
    pub user_bias_sd: f64,
    pub item_bias_sd: f64,
    pub noise_sd: f64,
    pub min_ratings: usize,
    pub max_ratings: usize,
    pub seed: u64,
}

impl Default for DenseConfig {
    fn default() -> Self {
        DenseConfig {
            n_users: 2000,
            n_items: 100,
            rank: 4,
            factor_gain: 2.2,
            user_bias_sd: 1.2,
            item_bias_sd: 1.8,
            noise_sd: 1.0,
            min_ratings: 60,
            max_ratings: 100,
            seed: 7,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SparseConfig {
    pub n_users: usize,
    pub n_items: usize,
    pub rank: usize,
    pub factor_gain: f64,
    pub item_bias_sd: f64,
    pub noise_sd: f64,
    /// Item popularity follows 1 / (index + 1)^exponent.
    pub zipf_exponent: f64,
    pub min_ratings: usize,
    pub max_ratings: usize,
    pub seed: u64,
}

impl Default for SparseConfig {
    fn default() -> Self {
        SparseConfig {
            n_users: 5000,
            n_items: 1200,
            rank: 4,
            factor_gain: 1.1,
            item_bias_sd: 0.9,
            noise_sd: 0.8,
            zipf_exponent: 0.8,
            min_ratings: 20,
            max_ratings: 100,
            seed: 11,
        }
    }
}

/// One standard normal via Box-Muller.
fn normal(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = rng.random::<f64>().max(1e-300);
    let u2: f64 = rng.random();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

fn factor_vec(rng: &mut ChaCha8Rng, rank: usize) -> Vec<f64> {
    (0..rank).map(|_| normal(rng)).collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Dense Jester-shaped matrix: every user rates `min_ratings..=max_ratings`
/// of the items, drawn uniformly; ratings are continuous and clamped to
/// (-10, 10).
pub fn dense_matrix(cfg: &DenseConfig) -> RatingMatrix {
    let scale = RatingScale::new(-10.0, 10.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let item_bias: Vec<f64> = (0..cfg.n_items)
        .map(|_| cfg.item_bias_sd * normal(&mut rng))
        .collect();
    let item_factors: Vec<Vec<f64>> = (0..cfg.n_items)
        .map(|_| factor_vec(&mut rng, cfg.rank))
        .collect();

    let user_ids: Vec<String> = (0..cfg.n_users).map(|u| format!("u{u:05}")).collect();
    let item_ids: Vec<String> = (0..cfg.n_items).map(|i| format!("i{i:03}")).collect();

    let mut triples: Vec<(&str, &str, f64)> = Vec::new();
    let mut indices: Vec<usize> = (0..cfg.n_items).collect();
    for u in 0..cfg.n_users {
        let user_bias = cfg.user_bias_sd * normal(&mut rng);
        let factors = factor_vec(&mut rng, cfg.rank);
        let count = rng.random_range(cfg.min_ratings..=cfg.max_ratings.min(cfg.n_items));
        // partial shuffle selects `count` distinct items
        for k in 0..count {
            let j = rng.random_range(k..indices.len());
            indices.swap(k, j);
        }
        let mut chosen: Vec<usize> = indices[..count].to_vec();
        chosen.sort_unstable();
        for &i in &chosen {
            let raw = user_bias
                + item_bias[i]
                + cfg.factor_gain * dot(&factors, &item_factors[i])
                + cfg.noise_sd * normal(&mut rng);
            triples.push((&user_ids[u], &item_ids[i], scale.clamp(raw)));
        }
    }
    RatingMatrix::from_triples(scale, &triples).expect("synthetic triples are valid")
}

/// Sparse BookCrossing-shaped matrix: integer ratings 1..=10 with a positive
/// skew, item popularity falling off as a power law.
pub fn sparse_matrix(cfg: &SparseConfig) -> RatingMatrix {
    let scale = RatingScale::new(1.0, 10.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let item_bias: Vec<f64> = (0..cfg.n_items)
        .map(|_| cfg.item_bias_sd * normal(&mut rng))
        .collect();
    let item_factors: Vec<Vec<f64>> = (0..cfg.n_items)
        .map(|_| factor_vec(&mut rng, cfg.rank))
        .collect();

    // cumulative popularity weights for inverse-CDF sampling
    let mut cumulative: Vec<f64> = Vec::with_capacity(cfg.n_items);
    let mut total = 0.0;
    for i in 0..cfg.n_items {
        total += 1.0 / ((i + 1) as f64).powf(cfg.zipf_exponent);
        cumulative.push(total);
    }

    let user_ids: Vec<String> = (0..cfg.n_users).map(|u| format!("u{u:05}")).collect();
    let item_ids: Vec<String> = (0..cfg.n_items).map(|i| format!("b{i:04}")).collect();

    let mut triples: Vec<(&str, &str, f64)> = Vec::new();
    for u in 0..cfg.n_users {
        let user_bias = 0.6 * normal(&mut rng);
        let factors = factor_vec(&mut rng, cfg.rank);
        let count = rng.random_range(cfg.min_ratings..=cfg.max_ratings.min(cfg.n_items));
        let mut chosen: Vec<usize> = Vec::with_capacity(count);
        let mut taken = vec![false; cfg.n_items];
        let mut attempts = 0usize;
        while chosen.len() < count {
            attempts += 1;
            let i = if attempts <= count * 50 {
                let x: f64 = rng.random::<f64>() * total;
                cumulative.partition_point(|&c| c < x).min(cfg.n_items - 1)
            } else {
                // popularity draws keep colliding; fall back to the first
                // untaken item so termination is guaranteed
                (0..cfg.n_items).find(|&i| !taken[i]).unwrap()
            };
            if !taken[i] {
                taken[i] = true;
                chosen.push(i);
            }
        }
        chosen.sort_unstable();
        for &i in &chosen {
            let raw = 6.5
                + 1.5
                    * (user_bias
                        + item_bias[i]
                        + cfg.factor_gain * dot(&factors, &item_factors[i])
                        + cfg.noise_sd * normal(&mut rng));
            let rating = raw.round().clamp(1.0, 10.0);
            triples.push((&user_ids[u], &item_ids[i], rating));
        }
    }
    RatingMatrix::from_triples(scale, &triples).expect("synthetic triples are valid")
}

/// Write a matrix as Jester-normalized CSV (`user,item,rating`).
pub fn write_jester_csv<W: Write>(matrix: &RatingMatrix, out: &mut W) -> io::Result<()> {
    for (u, i, r) in matrix.entries() {
        writeln!(out, "{},{},{}", matrix.user_id(u), matrix.item_id(i), r)?;
    }
    Ok(())
}

/// Write a matrix in the BookCrossing native format: semicolon-separated,
/// double-quoted fields with a header row.
pub fn write_bookcrossing_csv<W: Write>(matrix: &RatingMatrix, out: &mut W) -> io::Result<()> {
    writeln!(out, "\"User-ID\";\"ISBN\";\"Book-Rating\"")?;
    for (u, i, r) in matrix.entries() {
        writeln!(out, "\"{}\";\"{}\";\"{}\"", matrix.user_id(u), matrix.item_id(i), r)?;
    }
    Ok(())
}
