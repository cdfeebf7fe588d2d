//! Active-learning strategies: given a user's training state, decide which
//! item to ask for next.
//!
//! Five personalized strategies plus a seeded random baseline, all driven
//! through [`Learner`], the uniform interface the simulation loop consumes.

mod impact;
mod tree;

pub use impact::{impact_score, rank_impact_analysis};
pub use tree::{build_decision_tree, dt_next_item, DecisionTree, TreeNode};

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::data::{binarize, DataError, RatingMatrix};
use crate::predictors::{rank_items, Direction, PredictorKind, PredictorParams, TrainError};
use crate::seed;

#[derive(Debug, Error)]
pub enum LearnerError {
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Train(#[from] TrainError),
}

/// Which strategy proposes items, and for the prediction-based strategies,
/// which predictor scores the candidates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(tag = "strategy", content = "predictor", rename_all = "kebab-case")]
pub enum LearnerKind {
    BinaryPrediction(PredictorKind),
    DecisionTree,
    HighestPrediction(PredictorKind),
    ImpactAnalysis,
    LowestPrediction(PredictorKind),
    RandomBaseline,
}

impl LearnerKind {
    pub fn strategy_name(&self) -> &'static str {
        match self {
            LearnerKind::BinaryPrediction(_) => "binary-prediction",
            LearnerKind::DecisionTree => "decision-tree",
            LearnerKind::HighestPrediction(_) => "highest-prediction",
            LearnerKind::ImpactAnalysis => "impact-analysis",
            LearnerKind::LowestPrediction(_) => "lowest-prediction",
            LearnerKind::RandomBaseline => "random-baseline",
        }
    }

    pub fn predictor(&self) -> Option<PredictorKind> {
        match self {
            LearnerKind::BinaryPrediction(p)
            | LearnerKind::HighestPrediction(p)
            | LearnerKind::LowestPrediction(p) => Some(*p),
            _ => None,
        }
    }
}

/// The user's reply to one asked item: a rating from the control set, or
/// "unknown" when the user has no rating for it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Response {
    Rated(f64),
    Unknown,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AskOutcome {
    pub item: u32,
    pub response: Response,
}

impl AskOutcome {
    pub fn is_rated(&self) -> bool {
        matches!(self.response, Response::Rated(_))
    }
}

fn unrated_items(training: &RatingMatrix, user: u32) -> Vec<u32> {
    let mut rated = vec![false; training.n_items()];
    for &(i, _) in training.user_ratings(user) {
        rated[i as usize] = true;
    }
    (0..training.n_items() as u32)
        .filter(|&i| !rated[i as usize])
        .collect()
}

/// Binary Prediction: binarize the matrix (1 = rated, 0 = not), train the
/// predictor on every cell of that 0/1 matrix, and rank the user's unrated
/// items by predicted "rated-ness" descending. High scores mark items the
/// user is likely familiar with and able to rate.
pub fn rank_binary_prediction(
    training: &RatingMatrix,
    user: u32,
    predictor: PredictorKind,
    params: &PredictorParams,
    rng_seed: u64,
) -> Result<Vec<u32>, LearnerError> {
    let binary = binarize(training);
    let model = predictor.train(&binary, params, rng_seed)?;
    let candidates = unrated_items(training, user);
    Ok(rank_items(&model, user, &candidates, Direction::Descending))
}

/// Highest Prediction: train the predictor on the real ratings and ask for
/// the items with the highest predicted score.
pub fn rank_highest_prediction(
    training: &RatingMatrix,
    user: u32,
    predictor: PredictorKind,
    params: &PredictorParams,
    rng_seed: u64,
) -> Result<Vec<u32>, LearnerError> {
    let model = predictor.train(training, params, rng_seed)?;
    let candidates = unrated_items(training, user);
    Ok(rank_items(&model, user, &candidates, Direction::Descending))
}

/// Lowest Prediction: as Highest Prediction with ascending order, gathering
/// negative feedback. Unpredictable items still rank last.
pub fn rank_lowest_prediction(
    training: &RatingMatrix,
    user: u32,
    predictor: PredictorKind,
    params: &PredictorParams,
    rng_seed: u64,
) -> Result<Vec<u32>, LearnerError> {
    let model = predictor.train(training, params, rng_seed)?;
    let candidates = unrated_items(training, user);
    Ok(rank_items(&model, user, &candidates, Direction::Ascending))
}

enum LearnerState {
    /// Precomputed ranking; consumed front to back.
    Ranking(Vec<u32>),
    /// Interview tree plus the path walked so far.
    Tree {
        tree: DecisionTree,
        path: Vec<AskOutcome>,
    },
    /// Seeded uniform draws over the remaining candidates.
    Random(ChaCha8Rng),
}

/// Per-interview strategy state. Create with [`Learner::start`] (training
/// phase), feed every outcome back with [`Learner::record`], and call
/// [`Learner::retrain`] after acquisitions in sequential mode.
pub struct Learner {
    kind: LearnerKind,
    user: u32,
    params: PredictorParams,
    base_seed: u64,
    trainings: u32,
    state: LearnerState,
}

impl Learner {
    pub fn start(
        kind: LearnerKind,
        training: &RatingMatrix,
        user: u32,
        params: PredictorParams,
        base_seed: u64,
        budget: usize,
    ) -> Result<Self, LearnerError> {
        let state = match kind {
            LearnerKind::DecisionTree => {
                // one question per level, plus the root
                let tree = build_decision_tree(training, budget + 1)?;
                LearnerState::Tree {
                    tree,
                    path: Vec::new(),
                }
            }
            LearnerKind::RandomBaseline => {
                LearnerState::Random(ChaCha8Rng::seed_from_u64(base_seed))
            }
            _ => LearnerState::Ranking(Vec::new()),
        };
        let mut learner = Learner {
            kind,
            user,
            params,
            base_seed,
            trainings: 0,
            state,
        };
        if matches!(learner.state, LearnerState::Ranking(_)) {
            learner.recompute_ranking(training)?;
        }
        Ok(learner)
    }

    fn recompute_ranking(&mut self, training: &RatingMatrix) -> Result<(), LearnerError> {
        let train_seed = seed::derive(self.base_seed, &[b"train", &self.trainings.to_le_bytes()]);
        self.trainings += 1;
        let ranking = match self.kind {
            LearnerKind::BinaryPrediction(p) => {
                rank_binary_prediction(training, self.user, p, &self.params, train_seed)?
            }
            LearnerKind::HighestPrediction(p) => {
                rank_highest_prediction(training, self.user, p, &self.params, train_seed)?
            }
            LearnerKind::LowestPrediction(p) => {
                rank_lowest_prediction(training, self.user, p, &self.params, train_seed)?
            }
            LearnerKind::ImpactAnalysis => rank_impact_analysis(training, self.user),
            LearnerKind::DecisionTree | LearnerKind::RandomBaseline => unreachable!(),
        };
        self.state = LearnerState::Ranking(ranking);
        Ok(())
    }

    /// Retrain on an augmented training set (sequential mode). The decision
    /// tree keeps its structure (its edges already encode the adaptation)
    /// and the random baseline keeps its stream.
    pub fn retrain(&mut self, training: &RatingMatrix) -> Result<(), LearnerError> {
        match self.state {
            LearnerState::Ranking(_) => self.recompute_ranking(training),
            LearnerState::Tree { .. } | LearnerState::Random(_) => Ok(()),
        }
    }

    /// Record the outcome of an asked item so tree-based interviews can
    /// advance along the matching edge.
    pub fn record(&mut self, outcome: &AskOutcome) {
        if let LearnerState::Tree { path, .. } = &mut self.state {
            path.push(*outcome);
        }
    }

    /// Propose the next item: one the user has not rated in `training` and
    /// that was not asked before. `None` once the strategy is exhausted.
    pub fn next_question(
        &mut self,
        training: &RatingMatrix,
        already_asked: &HashSet<u32>,
    ) -> Option<u32> {
        match &mut self.state {
            LearnerState::Ranking(ranking) => ranking
                .iter()
                .copied()
                .find(|&i| !already_asked.contains(&i) && training.rating(self.user, i).is_none()),
            LearnerState::Tree { tree, path } => {
                loop {
                    let item = dt_next_item(tree, path)?;
                    if training.rating(self.user, item).is_none()
                        && !already_asked.contains(&item)
                    {
                        return Some(item);
                    }
                    // the tree proposed an item the user's training row
                    // already covers (the seed rating): advance along the
                    // edge its rating implies without spending a question
                    match training.rating(self.user, item) {
                        Some(r) => path.push(AskOutcome {
                            item,
                            response: Response::Rated(r),
                        }),
                        None => return None, // asked before but unanswered: cannot advance
                    }
                }
            }
            LearnerState::Random(rng) => {
                let candidates: Vec<u32> = unrated_items(training, self.user)
                    .into_iter()
                    .filter(|i| !already_asked.contains(i))
                    .collect();
                if candidates.is_empty() {
                    None
                } else {
                    Some(candidates[rng.random_range(0..candidates.len())])
                }
            }
        }
    }
}
