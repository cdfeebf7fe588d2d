//! Flat `key = value` experiment configuration with flag overrides.
//!
//! Recognized keys and defaults:
//!
//! ```text
//! dataset                 = jester          # jester | bookcrossing
//! data                    =                 # path to the dataset file (required to run)
//! learner                 = highest-prediction
//! predictor               = funk-svd        # predictor inside the learner
//! final                   = funk-svd        # final recommender
//! mode                    = batch           # batch | sequential
//! budget                  = 6
//! n_users                 = 100
//! top_k                   = 10
//! seed                    = 42
//! relevance_threshold     = global-mean     # global-mean | <number>
//! ask_cap                 = 500
//! eligibility_min_ratings = 20
//! out                     = results
//! ```
//!
//! Lines starting with `#` and blank lines are ignored. Unknown keys are
//! rejected. Command-line flags take precedence over file values.

use std::path::{Path, PathBuf};

use coldstart::simulation::{DatasetKind, ExperimentConfig, RelevanceThreshold};
use coldstart::{LearnerKind, PredictorKind};

use crate::CliError;

/// A fully resolved run request: the experiment config plus the two
/// file-system knobs that do not affect simulation results.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSettings {
    pub config: ExperimentConfig,
    pub data_path: Option<PathBuf>,
    pub out_dir: PathBuf,
}

impl Default for RunSettings {
    fn default() -> Self {
        RunSettings {
            config: ExperimentConfig::default(),
            data_path: None,
            out_dir: PathBuf::from("results"),
        }
    }
}

/// Optional overrides collected from command-line flags.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub dataset: Option<String>,
    pub learner: Option<String>,
    pub predictor: Option<String>,
    pub final_recommender: Option<String>,
    pub mode: Option<String>,
    pub budget: Option<usize>,
    pub n_users: Option<usize>,
    pub top_k: Option<usize>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
}

fn parse_learner(strategy: &str, predictor: PredictorKind) -> Result<LearnerKind, CliError> {
    Ok(match strategy {
        "binary-prediction" => LearnerKind::BinaryPrediction(predictor),
        "decision-tree" => LearnerKind::DecisionTree,
        "highest-prediction" => LearnerKind::HighestPrediction(predictor),
        "impact-analysis" => LearnerKind::ImpactAnalysis,
        "lowest-prediction" => LearnerKind::LowestPrediction(predictor),
        "random-baseline" => LearnerKind::RandomBaseline,
        other => {
            return Err(CliError::Config(format!(
                "unknown learner {other:?} (expected binary-prediction, decision-tree, \
                 highest-prediction, impact-analysis, lowest-prediction, or random-baseline)"
            )))
        }
    })
}

fn parse_usize(key: &str, value: &str) -> Result<usize, CliError> {
    value
        .parse()
        .map_err(|_| CliError::Config(format!("{key} must be a non-negative integer, got {value:?}")))
}

/// Parse the config file and apply flag overrides on top.
pub fn parse_config(path: Option<&Path>, overrides: &Overrides) -> Result<RunSettings, CliError> {
    // the learner is assembled last so `predictor` can arrive in any order
    let mut strategy = String::from("highest-prediction");
    let mut predictor = PredictorKind::FunkSvd;
    let mut settings = RunSettings::default();
    let cfg = &mut settings.config;

    if let Some(path) = path {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::Config(format!(
                    "config line {}: expected `key = value`, got {raw:?}",
                    lineno + 1
                )));
            };
            let key = key.trim();
            let value = value.trim();
            match key {
                "dataset" => cfg.dataset = value.parse().map_err(CliError::Config)?,
                "data" => settings.data_path = Some(PathBuf::from(value)),
                "learner" => strategy = value.to_string(),
                "predictor" => predictor = value.parse().map_err(CliError::Config)?,
                "final" => cfg.final_recommender = value.parse().map_err(CliError::Config)?,
                "mode" => cfg.mode = value.parse().map_err(CliError::Config)?,
                "budget" => cfg.budget = parse_usize(key, value)?,
                "n_users" => cfg.n_users = parse_usize(key, value)?,
                "top_k" => cfg.top_k = parse_usize(key, value)?,
                "seed" => {
                    cfg.rng_seed = value.parse().map_err(|_| {
                        CliError::Config(format!("seed must be an integer, got {value:?}"))
                    })?
                }
                "relevance_threshold" => {
                    cfg.relevance_threshold = if value == "global-mean" {
                        RelevanceThreshold::GlobalMean
                    } else {
                        let t: f64 = value.parse().map_err(|_| {
                            CliError::Config(format!(
                                "relevance_threshold must be `global-mean` or a number, got {value:?}"
                            ))
                        })?;
                        RelevanceThreshold::Fixed(t)
                    }
                }
                "ask_cap" => cfg.ask_cap = parse_usize(key, value)?,
                "eligibility_min_ratings" => {
                    cfg.eligibility_min_ratings = parse_usize(key, value)?
                }
                "out" => settings.out_dir = PathBuf::from(value),
                other => {
                    return Err(CliError::Config(format!(
                        "config line {}: unknown key {other:?}",
                        lineno + 1
                    )))
                }
            }
        }
    }

    if let Some(v) = &overrides.dataset {
        cfg.dataset = v.parse().map_err(CliError::Config)?;
    }
    if let Some(v) = &overrides.learner {
        strategy = v.clone();
    }
    if let Some(v) = &overrides.predictor {
        predictor = v.parse().map_err(CliError::Config)?;
    }
    if let Some(v) = &overrides.final_recommender {
        cfg.final_recommender = v.parse().map_err(CliError::Config)?;
    }
    if let Some(v) = &overrides.mode {
        cfg.mode = v.parse().map_err(CliError::Config)?;
    }
    if let Some(v) = overrides.budget {
        cfg.budget = v;
    }
    if let Some(v) = overrides.n_users {
        cfg.n_users = v;
    }
    if let Some(v) = overrides.top_k {
        cfg.top_k = v;
    }
    if let Some(v) = overrides.seed {
        cfg.rng_seed = v;
    }
    if let Some(v) = &overrides.out {
        settings.out_dir = v.clone();
    }

    settings.config.learner = parse_learner(&strategy, predictor)?;
    settings
        .config
        .validate()
        .map_err(|e| CliError::Config(e.to_string()))?;
    Ok(settings)
}

/// Load the dataset named by the settings.
pub fn load_dataset(settings: &RunSettings) -> Result<coldstart::RatingMatrix, CliError> {
    let path = settings
        .data_path
        .as_ref()
        .ok_or_else(|| CliError::Config("no dataset file configured (set `data = <path>`)".into()))?;
    let matrix = match settings.config.dataset {
        DatasetKind::Jester => coldstart::data::load_jester(path),
        DatasetKind::Bookcrossing => coldstart::data::load_bookcrossing(path),
    }
    .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    Ok(matrix)
}
