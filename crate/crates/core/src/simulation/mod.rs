//! Offline evaluation protocol: hold out a user, interview them with an
//! active learner in batch or sequential mode, move acquired ratings from
//! the control set into training, then score a final recommender on what
//! remains in control.

use std::collections::{BTreeMap, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::data::{global_mean, holdout_user, DataError, HoldoutSplit, RatingMatrix};
use crate::learners::{AskOutcome, Learner, LearnerError, LearnerKind, Response};
use crate::metrics::{boxplot, dcg, precision, rmse, BoxplotSummary};
use crate::predictors::{
    rank_items, Direction, PredictorKind, PredictorModel, PredictorParams, TrainError,
};
use crate::seed;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("only {available} users are eligible (need {needed} with at least {min_ratings} ratings)")]
    Eligibility {
        needed: usize,
        available: usize,
        min_ratings: usize,
    },
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Learner(#[from] LearnerError),
    #[error(transparent)]
    Train(#[from] TrainError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Batch,
    Sequential,
}

impl Mode {
    pub fn name(&self) -> &'static str {
        match self {
            Mode::Batch => "batch",
            Mode::Sequential => "sequential",
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "batch" => Ok(Mode::Batch),
            "sequential" => Ok(Mode::Sequential),
            other => Err(format!("unknown mode {other:?} (expected batch or sequential)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DatasetKind {
    Jester,
    Bookcrossing,
}

impl DatasetKind {
    pub fn name(&self) -> &'static str {
        match self {
            DatasetKind::Jester => "jester",
            DatasetKind::Bookcrossing => "bookcrossing",
        }
    }
}

impl std::str::FromStr for DatasetKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "jester" => Ok(DatasetKind::Jester),
            "bookcrossing" => Ok(DatasetKind::Bookcrossing),
            other => Err(format!(
                "unknown dataset {other:?} (expected jester or bookcrossing)"
            )),
        }
    }
}

/// Relevance rule for precision: an item is relevant when its true rating
/// exceeds the training-set global mean, or a fixed constant.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RelevanceThreshold {
    GlobalMean,
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ExperimentConfig {
    pub dataset: DatasetKind,
    pub learner: LearnerKind,
    pub final_recommender: PredictorKind,
    pub mode: Mode,
    /// Ratings to acquire per interview.
    pub budget: usize,
    /// Held-out users to evaluate.
    pub n_users: usize,
    /// Length of the final recommendation list.
    pub top_k: usize,
    pub relevance_threshold: RelevanceThreshold,
    /// Hard cap on proposals per interview, so an interview cannot loop
    /// forever on items outside the control set.
    pub ask_cap: usize,
    pub rng_seed: u64,
    /// Users need at least this many ratings to be sampled for evaluation.
    pub eligibility_min_ratings: usize,
    /// Algorithm hyperparameters; the defaults are the reference settings.
    pub params: PredictorParams,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            dataset: DatasetKind::Jester,
            learner: LearnerKind::HighestPrediction(PredictorKind::FunkSvd),
            final_recommender: PredictorKind::FunkSvd,
            mode: Mode::Batch,
            budget: 6,
            n_users: 100,
            top_k: 10,
            relevance_threshold: RelevanceThreshold::GlobalMean,
            ask_cap: 500,
            rng_seed: 42,
            eligibility_min_ratings: 20,
            params: PredictorParams::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), ExperimentError> {
        if self.budget < 1 {
            return Err(ExperimentError::Config(format!(
                "budget must be >= 1 (got {})",
                self.budget
            )));
        }
        if self.n_users < 1 {
            return Err(ExperimentError::Config(format!(
                "n_users must be >= 1 (got {})",
                self.n_users
            )));
        }
        if self.top_k < 1 {
            return Err(ExperimentError::Config(format!(
                "top_k must be >= 1 (got {})",
                self.top_k
            )));
        }
        if self.ask_cap < self.budget {
            return Err(ExperimentError::Config(format!(
                "ask_cap ({}) must be >= budget ({})",
                self.ask_cap, self.budget
            )));
        }
        Ok(())
    }
}

/// Per-user record of one simulated interview and its final evaluation.
#[derive(Debug, Clone)]
pub struct SimulationOutcome {
    pub user: u32,
    pub user_id: String,
    pub asked: Vec<AskOutcome>,
    /// Ratings moved from control into training.
    pub acquired: usize,
    /// Learner (re)trainings after acquisitions; always 0 in batch mode.
    pub retrains: usize,
    pub rmse: Option<f64>,
    pub precision: Option<f64>,
    pub ndcg: Option<f64>,
}

#[derive(Debug, Clone, Default)]
pub struct MetricSummaries {
    pub rmse: Option<BoxplotSummary>,
    pub precision: Option<BoxplotSummary>,
    pub ndcg: Option<BoxplotSummary>,
}

#[derive(Debug, Clone)]
pub struct ExperimentResult {
    pub outcomes: Vec<SimulationOutcome>,
    pub summaries: MetricSummaries,
    /// Users whose control remainder was empty after acquisition; their
    /// metrics are absent and excluded from the summaries.
    pub users_excluded: usize,
}

/// Final-recommender scores for one user.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FinalMetrics {
    pub rmse: Option<f64>,
    pub precision: Option<f64>,
    pub ndcg: Option<f64>,
}

/// Interview a held-out user in batch mode: the learner is trained once and
/// never retrained, so the proposal order is fixed up front.
pub fn simulate_user_batch(
    cfg: &ExperimentConfig,
    split: HoldoutSplit,
) -> Result<SimulationOutcome, ExperimentError> {
    simulate_user(cfg, split, Mode::Batch)
}

/// Interview a held-out user in sequential mode: after every acquired
/// rating the learner is retrained on the augmented training set; a missing
/// answer continues with the current state.
pub fn simulate_user_sequential(
    cfg: &ExperimentConfig,
    split: HoldoutSplit,
) -> Result<SimulationOutcome, ExperimentError> {
    simulate_user(cfg, split, Mode::Sequential)
}

fn simulate_user(
    cfg: &ExperimentConfig,
    split: HoldoutSplit,
    mode: Mode,
) -> Result<SimulationOutcome, ExperimentError> {
    let HoldoutSplit {
        user,
        mut training,
        mut control,
        ..
    } = split;
    let user_id = training.user_id(user).to_owned();
    let learner_seed = seed::derive(cfg.rng_seed, &[b"learner", user_id.as_bytes()]);
    let mut learner = Learner::start(
        cfg.learner,
        &training,
        user,
        cfg.params,
        learner_seed,
        cfg.budget,
    )?;

    let mut asked: Vec<AskOutcome> = Vec::new();
    let mut asked_set: HashSet<u32> = HashSet::new();
    let mut acquired = 0usize;
    let mut retrains = 0usize;

    while acquired < cfg.budget && asked.len() < cfg.ask_cap {
        let Some(item) = learner.next_question(&training, &asked_set) else {
            break;
        };
        asked_set.insert(item);
        let outcome = match control.remove(&item) {
            Some(rating) => {
                training.insert(user, item, rating)?;
                acquired += 1;
                AskOutcome {
                    item,
                    response: Response::Rated(rating),
                }
            }
            None => AskOutcome {
                item,
                response: Response::Unknown,
            },
        };
        learner.record(&outcome);
        asked.push(outcome);
        if mode == Mode::Sequential && outcome.is_rated() {
            learner.retrain(&training)?;
            retrains += 1;
        }
    }

    let final_seed = seed::derive(cfg.rng_seed, &[b"final", user_id.as_bytes()]);
    let metrics = evaluate_final(cfg, &training, user, &control, final_seed)?;
    if metrics.rmse.is_none() && metrics.precision.is_none() && metrics.ndcg.is_none() {
        log::debug!("user {user_id}: no usable control remainder, metrics absent");
    }

    Ok(SimulationOutcome {
        user,
        user_id,
        asked,
        acquired,
        retrains,
        rmse: metrics.rmse,
        precision: metrics.precision,
        ndcg: metrics.ndcg,
    })
}

/// Train the final recommender on the augmented training set and score it
/// against the control remainder.
pub fn evaluate_final(
    cfg: &ExperimentConfig,
    training: &RatingMatrix,
    user: u32,
    remainder: &BTreeMap<u32, f64>,
    model_seed: u64,
) -> Result<FinalMetrics, ExperimentError> {
    if remainder.is_empty() {
        return Ok(FinalMetrics {
            rmse: None,
            precision: None,
            ndcg: None,
        });
    }
    // leak check: nothing we score against may sit in the training set
    debug_assert!(
        remainder.keys().all(|&i| training.rating(user, i).is_none()),
        "control remainder leaked into training"
    );
    let model = cfg.final_recommender.train(training, &cfg.params, model_seed)?;
    let threshold = match cfg.relevance_threshold {
        RelevanceThreshold::GlobalMean => global_mean(training)?,
        RelevanceThreshold::Fixed(t) => t,
    };
    // negative rating scales would break the nDCG range, so gains are
    // shifted up by the scale minimum
    let shift = if training.scale().min() < 0.0 {
        -training.scale().min()
    } else {
        0.0
    };
    Ok(evaluate_model(
        &model, user, remainder, cfg.top_k, threshold, shift,
    ))
}

/// Score an already-trained model against a user's control remainder.
///
/// The recommendation list is the `top_k` remainder items by predicted score
/// descending (unpredictable items last, ties by item index). RMSE covers
/// the predictable remainder pairs; precision counts items with true rating
/// above `threshold`; nDCG compares shifted gains of the list against the
/// ideal ordering of the whole remainder truncated to the list length.
pub fn evaluate_model(
    model: &PredictorModel,
    user: u32,
    remainder: &BTreeMap<u32, f64>,
    top_k: usize,
    threshold: f64,
    gain_shift: f64,
) -> FinalMetrics {
    let items: Vec<u32> = remainder.keys().copied().collect();

    let pairs: Vec<(f64, f64)> = items
        .iter()
        .filter_map(|&i| model.predict(user, i).map(|p| (p, remainder[&i])))
        .collect();
    let rmse_value = rmse(&pairs);

    let ranked = rank_items(model, user, &items, Direction::Descending);
    let list: Vec<u32> = ranked.into_iter().take(top_k).collect();

    let relevant: HashSet<u32> = items
        .iter()
        .copied()
        .filter(|i| remainder[i] > threshold)
        .collect();
    let precision_value = precision(&list, &relevant);

    let list_gains: Vec<f64> = list.iter().map(|i| remainder[i] + gain_shift).collect();
    let mut ideal_gains: Vec<f64> = items.iter().map(|i| remainder[i] + gain_shift).collect();
    ideal_gains.sort_by(|a, b| b.total_cmp(a));
    ideal_gains.truncate(list.len());
    let ndcg_value = match (dcg(&list_gains), dcg(&ideal_gains)) {
        (Some(actual), Some(best)) if best > 0.0 => Some(actual / best),
        _ => None,
    };

    FinalMetrics {
        rmse: rmse_value,
        precision: precision_value,
        ndcg: ndcg_value,
    }
}

/// Pick the users to evaluate: all users with at least
/// `eligibility_min_ratings` ratings, in ascending index order, sampled
/// without replacement by a partial Fisher-Yates shuffle driven by
/// `ChaCha8Rng::seed_from_u64(rng_seed)` (one `random_range(i..len)` draw
/// per selected user).
pub fn sample_eligible_users(
    matrix: &RatingMatrix,
    cfg: &ExperimentConfig,
) -> Result<Vec<u32>, ExperimentError> {
    let mut eligible: Vec<u32> = (0..matrix.n_users() as u32)
        .filter(|&u| matrix.user_ratings(u).len() >= cfg.eligibility_min_ratings)
        .collect();
    if eligible.len() < cfg.n_users {
        return Err(ExperimentError::Eligibility {
            needed: cfg.n_users,
            available: eligible.len(),
            min_ratings: cfg.eligibility_min_ratings,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    for i in 0..cfg.n_users {
        let j = rng.random_range(i..eligible.len());
        eligible.swap(i, j);
    }
    eligible.truncate(cfg.n_users);
    Ok(eligible)
}

fn simulate_sampled_user(
    cfg: &ExperimentConfig,
    matrix: &RatingMatrix,
    user: u32,
) -> Result<SimulationOutcome, ExperimentError> {
    let holdout_seed = seed::derive(
        cfg.rng_seed,
        &[b"holdout", matrix.user_id(user).as_bytes()],
    );
    let split = holdout_user(matrix, user, holdout_seed)?;
    simulate_user(cfg, split, cfg.mode)
}

fn summarize(outcomes: &[SimulationOutcome]) -> (MetricSummaries, usize) {
    let collect = |f: fn(&SimulationOutcome) -> Option<f64>| -> Vec<f64> {
        outcomes.iter().filter_map(f).collect()
    };
    let summaries = MetricSummaries {
        rmse: boxplot(&collect(|o| o.rmse)),
        precision: boxplot(&collect(|o| o.precision)),
        ndcg: boxplot(&collect(|o| o.ndcg)),
    };
    let excluded = outcomes
        .iter()
        .filter(|o| o.rmse.is_none() && o.precision.is_none() && o.ndcg.is_none())
        .count();
    (summaries, excluded)
}

/// Run the full protocol: sample eligible users, interview each in the
/// configured mode, and aggregate box-plot summaries per metric.
///
/// Per-user simulations are independent; with the `parallel` feature they
/// run on the rayon pool. Results are identical either way because every
/// random stream is keyed by the experiment seed and the user id, and
/// outcomes are collected in sampling order.
pub fn run_experiment(
    cfg: &ExperimentConfig,
    matrix: &RatingMatrix,
) -> Result<ExperimentResult, ExperimentError> {
    cfg.validate()?;
    let sampled = sample_eligible_users(matrix, cfg)?;

    #[cfg(feature = "parallel")]
    let outcomes: Result<Vec<_>, ExperimentError> = {
        use rayon::prelude::*;
        sampled
            .par_iter()
            .map(|&u| simulate_sampled_user(cfg, matrix, u))
            .collect()
    };
    #[cfg(not(feature = "parallel"))]
    let outcomes: Result<Vec<_>, ExperimentError> = sampled
        .iter()
        .map(|&u| simulate_sampled_user(cfg, matrix, u))
        .collect();

    let outcomes = outcomes?;
    let (summaries, users_excluded) = summarize(&outcomes);
    Ok(ExperimentResult {
        outcomes,
        summaries,
        users_excluded,
    })
}

/// Single-threaded [`run_experiment`]: same sampling, same seeds, same
/// results. Kept as a public entry point for benchmarking the parallel
/// speedup and for minimal builds.
pub fn run_experiment_sequential(
    cfg: &ExperimentConfig,
    matrix: &RatingMatrix,
) -> Result<ExperimentResult, ExperimentError> {
    cfg.validate()?;
    let sampled = sample_eligible_users(matrix, cfg)?;
    let outcomes: Result<Vec<_>, ExperimentError> = sampled
        .iter()
        .map(|&u| simulate_sampled_user(cfg, matrix, u))
        .collect();
    let outcomes = outcomes?;
    let (summaries, users_excluded) = summarize(&outcomes);
    Ok(ExperimentResult {
        outcomes,
        summaries,
        users_excluded,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::RatingScale;
    use crate::predictors::{FunkSvdModel, NeighborhoodConfig};
    use approx::assert_abs_diff_eq;

    fn scale() -> RatingScale {
        RatingScale::new(1.0, 10.0).unwrap()
    }

    fn loose_params() -> PredictorParams {
        PredictorParams {
            user_user: NeighborhoodConfig {
                min_neighbors: 1,
                max_neighbors: 30,
                min_similarity: 0.15,
            },
            ..PredictorParams::default()
        }
    }

    /// Find a holdout seed that keeps the wanted item as the seed rating.
    fn split_with_seed_item(
        matrix: &RatingMatrix,
        user: u32,
        want: u32,
    ) -> crate::data::HoldoutSplit {
        for s in 0..512 {
            let split = holdout_user(matrix, user, s).unwrap();
            if split.seed_item == want {
                return split;
            }
        }
        panic!("no holdout seed kept item {want}");
    }

    fn interview_cfg(learner: LearnerKind, mode: Mode, budget: usize) -> ExperimentConfig {
        ExperimentConfig {
            learner,
            final_recommender: PredictorKind::UserUser,
            mode,
            budget,
            ask_cap: 500,
            top_k: 10,
            relevance_threshold: RelevanceThreshold::GlobalMean,
            rng_seed: 1234,
            params: loose_params(),
            ..ExperimentConfig::default()
        }
    }

    #[test]
    fn batch_walks_static_ranking_and_acquires_from_control() {
        // user a rates s, i1, i3; control after holdout on s = {i1, i3};
        // peers give i1 > i2 > i3 > i4 predicted order for user a
        let m = RatingMatrix::from_triples(
            scale(),
            &[
                ("a", "s", 5.0),
                ("a", "i1", 8.0),
                ("a", "i3", 6.0),
                ("b", "s", 5.0),
                ("b", "i1", 9.0),
                ("b", "i2", 8.0),
                ("b", "i3", 6.0),
                ("b", "i4", 2.0),
                ("c", "s", 5.5),
                ("c", "i1", 9.5),
                ("c", "i2", 7.5),
                ("c", "i3", 5.5),
                ("c", "i4", 1.0),
            ],
        )
        .unwrap();
        let a = m.user_index("a").unwrap();
        let s = m.item_index("s").unwrap();
        let split = split_with_seed_item(&m, a, s);
        assert_eq!(split.control.len(), 2);

        let cfg = interview_cfg(
            LearnerKind::HighestPrediction(PredictorKind::UserUser),
            Mode::Batch,
            6,
        );
        // replay oracle: the precomputed static ranking, filtered online
        let static_ranking = crate::learners::rank_highest_prediction(
            &split.training,
            a,
            PredictorKind::UserUser,
            &cfg.params,
            seed::derive(
                seed::derive(cfg.rng_seed, &[b"learner", b"a"]),
                &[b"train", &0u32.to_le_bytes()],
            ),
        )
        .unwrap();

        let outcome = simulate_user_batch(&cfg, split.clone()).unwrap();
        let asked_items: Vec<u32> = outcome.asked.iter().map(|o| o.item).collect();
        assert_eq!(asked_items, static_ranking, "batch asks in static order");
        assert_eq!(outcome.acquired, 2, "only the control items are acquired");
        assert_eq!(outcome.retrains, 0);
        for o in &outcome.asked {
            assert_eq!(o.is_rated(), split.control.contains_key(&o.item));
        }
    }

    #[test]
    fn sequential_retrains_and_changes_course() {
        // hand-traced fixture: after acquiring p the user-user predictor
        // flips the order of the remaining candidates.
        //
        // a's training row starts as {s: 9}. One rating cannot form a
        // Pearson neighborhood, so the initial ranking falls back to item
        // index order: [p, q, t]. Both modes first ask p (control rating 2).
        //
        // batch keeps asking down the static list: q next.
        //
        // sequential retrains with {s: 9, p: 2}: b (s=9, p=1) becomes the
        // only positive neighbor (Pearson +1 over the co-rated pair), so
        // predictions are mean_a + (r_b - mean_b) with mean_a = 5.5 and
        // mean_b = 5: q -> 5.5 + (1 - 5) = 1.5, t -> 5.5 + (9 - 5) = 9.5,
        // and the highest-prediction learner asks t instead.
        let m = RatingMatrix::from_triples(
            scale(),
            &[
                ("a", "s", 9.0),
                ("a", "p", 2.0),
                ("a", "q", 8.0),
                ("a", "t", 3.0),
                ("b", "s", 9.0),
                ("b", "p", 1.0),
                ("b", "q", 1.0),
                ("b", "t", 9.0),
                ("c", "s", 2.0),
                ("c", "p", 9.0),
                ("c", "q", 9.0),
                ("c", "t", 1.0),
            ],
        )
        .unwrap();
        let a = m.user_index("a").unwrap();
        let s = m.item_index("s").unwrap();
        let p = m.item_index("p").unwrap();
        let q = m.item_index("q").unwrap();
        let t = m.item_index("t").unwrap();

        let cfg = interview_cfg(
            LearnerKind::HighestPrediction(PredictorKind::UserUser),
            Mode::Batch,
            2,
        );
        let batch = simulate_user_batch(&cfg, split_with_seed_item(&m, a, s)).unwrap();
        let batch_items: Vec<u32> = batch.asked.iter().map(|o| o.item).collect();
        assert_eq!(batch_items, vec![p, q]);
        assert_eq!(batch.acquired, 2);
        assert_eq!(batch.retrains, 0);

        let seq = simulate_user_sequential(&cfg, split_with_seed_item(&m, a, s)).unwrap();
        let seq_items: Vec<u32> = seq.asked.iter().map(|o| o.item).collect();
        assert_eq!(seq_items, vec![p, t]);
        assert_eq!(seq.acquired, 2);
        assert_eq!(seq.retrains, 2, "one retraining per acquisition");
    }

    #[test]
    fn sequential_with_no_hits_equals_batch() {
        // the user's only control item is rated by nobody else and carries
        // the highest item index, so prediction-based ranking puts it last
        // and an ask_cap below the candidate count keeps it unreached
        let m = RatingMatrix::from_triples(
            scale(),
            &[
                ("a", "s", 5.0),
                ("b", "s", 5.0),
                ("b", "x", 7.0),
                ("b", "y", 4.0),
                ("b", "z", 6.0),
                ("c", "s", 6.0),
                ("c", "x", 8.0),
                ("c", "y", 3.0),
                ("c", "z", 5.0),
                ("a", "private", 9.0),
            ],
        )
        .unwrap();
        let a = m.user_index("a").unwrap();
        let s = m.item_index("s").unwrap();

        let mut cfg = interview_cfg(
            LearnerKind::HighestPrediction(PredictorKind::UserUser),
            Mode::Batch,
            2,
        );
        cfg.ask_cap = 3;
        cfg.budget = 2;

        let batch = simulate_user_batch(&cfg, split_with_seed_item(&m, a, s)).unwrap();
        let seq = simulate_user_sequential(&cfg, split_with_seed_item(&m, a, s)).unwrap();
        assert_eq!(batch.acquired, 0);
        assert_eq!(seq.acquired, 0);
        assert_eq!(seq.retrains, 0);
        let b_items: Vec<u32> = batch.asked.iter().map(|o| o.item).collect();
        let s_items: Vec<u32> = seq.asked.iter().map(|o| o.item).collect();
        assert_eq!(b_items, s_items, "modes collapse without acquisitions");
    }

    #[test]
    fn tiny_control_bounds_acquisition() {
        // user with exactly 2 ratings has a 1-item control set
        let m = RatingMatrix::from_triples(
            scale(),
            &[
                ("a", "s", 5.0),
                ("a", "x", 7.0),
                ("b", "s", 5.0),
                ("b", "x", 7.0),
                ("b", "y", 4.0),
                ("c", "s", 6.0),
                ("c", "x", 8.0),
                ("c", "y", 3.0),
            ],
        )
        .unwrap();
        let a = m.user_index("a").unwrap();
        let split = holdout_user(&m, a, 3).unwrap();
        assert_eq!(split.control.len(), 1);
        let cfg = interview_cfg(LearnerKind::RandomBaseline, Mode::Batch, 6);
        let outcome = simulate_user_batch(&cfg, split).unwrap();
        assert!(outcome.acquired <= 1);
    }

    #[test]
    fn evaluate_model_matches_hand_arithmetic() {
        // four remainder items with hand-set predictions via a one-feature
        // factor model: prediction = item factor (user factor 1, mean 0)
        let model = PredictorModel::FunkSvd(FunkSvdModel::from_parts(
            vec![vec![1.0]],
            vec![vec![8.0], vec![4.0], vec![6.0], vec![7.0]],
            0.0,
            scale(),
            vec![true],
            vec![true, true, true, true],
        ));
        let remainder: BTreeMap<u32, f64> =
            [(0, 9.0), (1, 3.0), (2, 7.0), (3, 5.0)].into_iter().collect();
        let metrics = evaluate_model(&model, 0, &remainder, 2, 6.0, 0.0);

        // rmse over all 4: sqrt((1 + 1 + 1 + 4) / 4)
        assert_abs_diff_eq!(metrics.rmse.unwrap(), (7.0f64 / 4.0).sqrt(), epsilon = 1e-12);
        // L = [item0 (8), item3 (7)]; relevant = {item0, item2} -> 1/2
        assert_abs_diff_eq!(metrics.precision.unwrap(), 0.5, epsilon = 1e-12);
        // dcg([9,5]) / dcg([9,7])
        let expected = (9.0 + 5.0 / 3f64.log2()) / (9.0 + 7.0 / 3f64.log2());
        assert_abs_diff_eq!(metrics.ndcg.unwrap(), expected, epsilon = 1e-12);
    }

    #[test]
    fn evaluate_model_perfect_predictions() {
        let model = PredictorModel::FunkSvd(FunkSvdModel::from_parts(
            vec![vec![1.0]],
            vec![vec![9.0], vec![3.0], vec![7.0]],
            0.0,
            scale(),
            vec![true],
            vec![true, true, true],
        ));
        let remainder: BTreeMap<u32, f64> =
            [(0, 9.0), (1, 3.0), (2, 7.0)].into_iter().collect();
        let metrics = evaluate_model(&model, 0, &remainder, 10, 5.0, 0.0);
        assert_abs_diff_eq!(metrics.rmse.unwrap(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(metrics.ndcg.unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn evaluate_model_nothing_relevant() {
        let model = PredictorModel::FunkSvd(FunkSvdModel::from_parts(
            vec![vec![1.0]],
            vec![vec![2.0], vec![3.0]],
            0.0,
            scale(),
            vec![true],
            vec![true, true],
        ));
        let remainder: BTreeMap<u32, f64> = [(0, 2.0), (1, 3.0)].into_iter().collect();
        let metrics = evaluate_model(&model, 0, &remainder, 2, 9.0, 0.0);
        assert_abs_diff_eq!(metrics.precision.unwrap(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn empty_remainder_yields_absent_metrics() {
        let m = RatingMatrix::from_triples(
            scale(),
            &[("a", "s", 5.0), ("b", "s", 5.0), ("b", "x", 7.0)],
        )
        .unwrap();
        let cfg = interview_cfg(LearnerKind::RandomBaseline, Mode::Batch, 1);
        let metrics = evaluate_final(&cfg, &m, 0, &BTreeMap::new(), 1).unwrap();
        assert_eq!(metrics.rmse, None);
        assert_eq!(metrics.precision, None);
        assert_eq!(metrics.ndcg, None);
    }

    fn thirty_user_matrix() -> RatingMatrix {
        let users: Vec<String> = (0..30).map(|u| format!("u{u:02}")).collect();
        let items: Vec<String> = (0..25).map(|i| format!("i{i:02}")).collect();
        let mut triples = Vec::new();
        for (u, uid) in users.iter().enumerate() {
            for (i, iid) in items.iter().enumerate() {
                // deterministic pseudo-ratings covering the scale
                let r = 1.0 + ((u * 7 + i * 3) % 10) as f64 * 0.9;
                triples.push((uid.as_str(), iid.as_str(), r.min(10.0)));
            }
        }
        RatingMatrix::from_triples(scale(), &triples).unwrap()
    }

    #[test]
    fn sampling_matches_documented_rule() {
        let m = thirty_user_matrix();
        let cfg = ExperimentConfig {
            n_users: 5,
            eligibility_min_ratings: 20,
            rng_seed: 77,
            ..ExperimentConfig::default()
        };
        let sampled = sample_eligible_users(&m, &cfg).unwrap();

        // oracle: independent reimplementation of the documented rule
        let mut pool: Vec<u32> = (0..30)
            .filter(|&u| m.user_ratings(u).len() >= 20)
            .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for i in 0..5 {
            let j = rng.random_range(i..pool.len());
            pool.swap(i, j);
        }
        pool.truncate(5);
        assert_eq!(sampled, pool);

        // without replacement
        let mut dedup = sampled.clone();
        dedup.sort_unstable();
        dedup.dedup();
        assert_eq!(dedup.len(), 5);
    }

    #[test]
    fn eligibility_shortfall_is_an_error() {
        let m = RatingMatrix::from_triples(
            scale(),
            &[("a", "s", 5.0), ("b", "s", 5.0), ("b", "x", 7.0)],
        )
        .unwrap();
        let cfg = ExperimentConfig {
            n_users: 3,
            eligibility_min_ratings: 2,
            ..ExperimentConfig::default()
        };
        match run_experiment(&cfg, &m) {
            Err(ExperimentError::Eligibility {
                needed, available, ..
            }) => {
                assert_eq!(needed, 3);
                assert_eq!(available, 1);
            }
            other => panic!("expected eligibility error, got {other:?}"),
        }
    }

    #[test]
    fn invalid_config_is_rejected() {
        let m = thirty_user_matrix();
        let cfg = ExperimentConfig {
            budget: 0,
            ..ExperimentConfig::default()
        };
        match run_experiment(&cfg, &m) {
            Err(ExperimentError::Config(msg)) => assert!(msg.contains("budget")),
            other => panic!("expected config error, got {other:?}"),
        }
    }

    fn small_cfg(mode: Mode) -> ExperimentConfig {
        ExperimentConfig {
            learner: LearnerKind::HighestPrediction(PredictorKind::ItemItem),
            final_recommender: PredictorKind::ItemItem,
            mode,
            budget: 3,
            n_users: 4,
            top_k: 5,
            ask_cap: 50,
            rng_seed: 9,
            eligibility_min_ratings: 20,
            params: loose_params(),
            ..ExperimentConfig::default()
        }
    }

    #[test]
    fn single_user_summary_is_degenerate() {
        let m = thirty_user_matrix();
        let cfg = ExperimentConfig {
            n_users: 1,
            ..small_cfg(Mode::Batch)
        };
        let result = run_experiment(&cfg, &m).unwrap();
        assert_eq!(result.outcomes.len(), 1);
        if let Some(b) = result.summaries.ndcg {
            assert_eq!(b.n, 1);
            assert_eq!(b.min, b.max);
            assert_eq!(b.min, b.median);
        }
    }

    #[test]
    fn run_experiment_is_deterministic() {
        let m = thirty_user_matrix();
        let cfg = small_cfg(Mode::Sequential);
        let r1 = run_experiment(&cfg, &m).unwrap();
        let r2 = run_experiment(&cfg, &m).unwrap();
        assert_eq!(r1.outcomes.len(), r2.outcomes.len());
        for (a, b) in r1.outcomes.iter().zip(&r2.outcomes) {
            assert_eq!(a.user, b.user);
            assert_eq!(a.asked, b.asked);
            assert_eq!(a.acquired, b.acquired);
            assert_eq!(a.rmse, b.rmse);
            assert_eq!(a.precision, b.precision);
            assert_eq!(a.ndcg, b.ndcg);
        }
    }

    #[test]
    fn parallel_and_sequential_paths_agree() {
        let m = thirty_user_matrix();
        let cfg = small_cfg(Mode::Sequential);
        let par = run_experiment(&cfg, &m).unwrap();
        let seq = run_experiment_sequential(&cfg, &m).unwrap();
        for (a, b) in par.outcomes.iter().zip(&seq.outcomes) {
            assert_eq!(a.user, b.user);
            assert_eq!(a.asked, b.asked);
            assert_eq!(a.rmse, b.rmse);
            assert_eq!(a.ndcg, b.ndcg);
        }
    }

    #[test]
    fn conservation_and_no_leak() {
        let m = thirty_user_matrix();
        let cfg = small_cfg(Mode::Sequential);
        let sampled = sample_eligible_users(&m, &cfg).unwrap();
        for &u in &sampled {
            let hs = seed::derive(cfg.rng_seed, &[b"holdout", m.user_id(u).as_bytes()]);
            let split = holdout_user(&m, u, hs).unwrap();
            let original = m.user_ratings(u).len();
            let outcome = simulate_user(&cfg, split.clone(), cfg.mode).unwrap();
            // 1 seed + acquired in training; the rest still in control
            let control_left = split.control.len() - outcome.acquired;
            assert_eq!(1 + outcome.acquired + control_left, original);
            assert!(outcome.acquired <= cfg.budget.min(split.control.len()));
        }
    }
}
