//! Active-learning rating elicitation for recommender cold-start.
//!
//! The crate provides three collaborative-filtering predictors (user-user,
//! item-item, FunkSVD), five personalized item-selection strategies plus a
//! random baseline, and an offline simulation harness that interviews
//! held-out users in batch or sequential mode and scores the final
//! recommendations with RMSE, precision, and nDCG.
//!
//! Per-user simulations are independent; with the default `parallel` feature
//! they run on a rayon pool, and [`simulation::run_experiment_sequential`]
//! provides the single-threaded path. Both produce identical results.

pub mod data;
pub mod learners;
pub mod metrics;
pub mod predictors;
pub mod seed;
pub mod simulation;
pub mod synth;

pub use data::{DataError, HoldoutSplit, RatingMatrix, RatingScale};
pub use learners::{AskOutcome, LearnerKind, Response};
pub use metrics::BoxplotSummary;
pub use predictors::{FactorConfig, NeighborhoodConfig, PredictorKind, PredictorModel};
pub use simulation::{
    run_experiment, run_experiment_sequential, ExperimentConfig, ExperimentError,
    ExperimentResult, Mode, SimulationOutcome,
};
