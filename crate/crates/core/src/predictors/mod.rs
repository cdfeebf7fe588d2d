//! The three rating predictors used both inside active learners and as the
//! final recommender: user-user CF, item-item CF, and FunkSVD.
//!
//! Predictions are `Option<f64>`: `None` is the "unpredictable" signal (too
//! few neighbors, unknown user/item). Any returned value is clamped to the
//! training matrix's rating scale.

mod funk;
mod neighborhood;

pub use funk::{train_funk_svd, train_funk_svd_traced, FunkSvdModel};
pub use neighborhood::{
    adjusted_cosine, pearson_similarity, predict_item_item, predict_user_user, train_item_item,
    train_user_user, ItemItemModel, UserUserModel,
};

use thiserror::Error;

use crate::data::RatingMatrix;

#[derive(Debug, Error)]
pub enum TrainError {
    #[error("cannot train on an empty matrix")]
    EmptyMatrix,
    #[error("training diverged: non-finite factor in feature {feature}")]
    Diverged { feature: usize },
    #[error("invalid factor config: {0}")]
    InvalidConfig(String),
}

/// Neighborhood-model parameters.
///
/// `min_similarity` is inclusive for user-user (Pearson >= 0.15) and
/// exclusive for item-item (similarity strictly above 0.0), matching how the
/// two thresholds are specified.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct NeighborhoodConfig {
    pub min_neighbors: usize,
    pub max_neighbors: usize,
    pub min_similarity: f64,
}

impl NeighborhoodConfig {
    /// User-user defaults: 10..30 neighbors, Pearson >= 0.15.
    pub fn user_user() -> Self {
        NeighborhoodConfig {
            min_neighbors: 10,
            max_neighbors: 30,
            min_similarity: 0.15,
        }
    }

    /// Item-item defaults: 1..20 neighbors, similarity above 0.0.
    pub fn item_item() -> Self {
        NeighborhoodConfig {
            min_neighbors: 1,
            max_neighbors: 20,
            min_similarity: 0.0,
        }
    }
}

/// FunkSVD hyperparameters: 25 features, 100 iterations per feature,
/// learn rate 0.001.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct FactorConfig {
    pub n_features: usize,
    pub n_iterations: usize,
    pub learn_rate: f64,
}

impl Default for FactorConfig {
    fn default() -> Self {
        FactorConfig {
            n_features: 25,
            n_iterations: 100,
            learn_rate: 0.001,
        }
    }
}

impl FactorConfig {
    fn validate(&self) -> Result<(), TrainError> {
        if self.n_features == 0 {
            return Err(TrainError::InvalidConfig("n_features must be > 0".into()));
        }
        if !(self.learn_rate > 0.0 && self.learn_rate.is_finite()) {
            return Err(TrainError::InvalidConfig("learn_rate must be > 0".into()));
        }
        Ok(())
    }
}

/// Bundle of per-algorithm parameters; defaults are the reference settings
/// used throughout the experiments.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct PredictorParams {
    pub user_user: NeighborhoodConfig,
    pub item_item: NeighborhoodConfig,
    pub factors: FactorConfig,
}

impl Default for PredictorParams {
    fn default() -> Self {
        PredictorParams {
            user_user: NeighborhoodConfig::user_user(),
            item_item: NeighborhoodConfig::item_item(),
            factors: FactorConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PredictorKind {
    UserUser,
    ItemItem,
    FunkSvd,
}

impl PredictorKind {
    pub fn name(&self) -> &'static str {
        match self {
            PredictorKind::UserUser => "user-user",
            PredictorKind::ItemItem => "item-item",
            PredictorKind::FunkSvd => "funk-svd",
        }
    }

    /// Train this predictor on `matrix`. `rng_seed` only affects FunkSVD
    /// factor initialization; neighborhood training is deterministic.
    pub fn train(
        &self,
        matrix: &RatingMatrix,
        params: &PredictorParams,
        rng_seed: u64,
    ) -> Result<PredictorModel, TrainError> {
        Ok(match self {
            PredictorKind::UserUser => {
                PredictorModel::UserUser(train_user_user(matrix, params.user_user))
            }
            PredictorKind::ItemItem => {
                PredictorModel::ItemItem(train_item_item(matrix, params.item_item))
            }
            PredictorKind::FunkSvd => {
                PredictorModel::FunkSvd(train_funk_svd(matrix, params.factors, rng_seed)?)
            }
        })
    }
}

impl std::str::FromStr for PredictorKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "user-user" => Ok(PredictorKind::UserUser),
            "item-item" => Ok(PredictorKind::ItemItem),
            "funk-svd" => Ok(PredictorKind::FunkSvd),
            other => Err(format!(
                "unknown predictor {other:?} (expected user-user, item-item, or funk-svd)"
            )),
        }
    }
}

/// A trained predictor: neighbor tables or latent factors.
#[derive(Debug, Clone)]
pub enum PredictorModel {
    UserUser(UserUserModel),
    ItemItem(ItemItemModel),
    FunkSvd(FunkSvdModel),
}

impl PredictorModel {
    pub fn predict(&self, user: u32, item: u32) -> Option<f64> {
        match self {
            PredictorModel::UserUser(m) => predict_user_user(m, user, item),
            PredictorModel::ItemItem(m) => predict_item_item(m, user, item),
            PredictorModel::FunkSvd(m) => m.predict(user, item),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Ascending,
    Descending,
}

/// Sort `candidates` by predicted score in the given direction.
///
/// Unpredictable items go after all predictable ones regardless of
/// direction; all ties break by ascending item index.
pub fn rank_items(
    model: &PredictorModel,
    user: u32,
    candidates: &[u32],
    direction: Direction,
) -> Vec<u32> {
    let mut scored: Vec<(u32, Option<f64>)> = candidates
        .iter()
        .map(|&item| (item, model.predict(user, item)))
        .collect();
    scored.sort_by(|(ia, sa), (ib, sb)| match (sa, sb) {
        (Some(a), Some(b)) => {
            let ord = match direction {
                Direction::Descending => b.total_cmp(a),
                Direction::Ascending => a.total_cmp(b),
            };
            ord.then(ia.cmp(ib))
        }
        (Some(_), None) => std::cmp::Ordering::Less,
        (None, Some(_)) => std::cmp::Ordering::Greater,
        (None, None) => ia.cmp(ib),
    });
    scored.into_iter().map(|(item, _)| item).collect()
}
