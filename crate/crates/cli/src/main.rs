//! `coldstart` experiment runner.
//!
//! `run` executes the offline interview protocol from a flat key=value
//! config (flags override file values) and exports per_user.csv,
//! summary.json, and boxplot.dat. `compare` reports which of two exported
//! summaries has the better median for a metric.
//!
//! Exit codes: 0 success, 1 configuration error, 2 data error, 3 runtime
//! error.

mod compare;
mod config;
mod export;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use coldstart::simulation::run_experiment;

use compare::MetricName;
use config::{parse_config, Overrides};
use export::{dataset_fingerprint, export_results, ManifestMetrics, RunManifest};

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Data(String),
    Runtime(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Data(m) => write!(f, "data error: {m}"),
            CliError::Runtime(m) => write!(f, "runtime error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 1,
            CliError::Data(_) => 2,
            CliError::Runtime(_) => 3,
        }
    }
}

#[derive(Parser)]
#[command(name = "coldstart", version, about = "Active-learning cold-start experiment runner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and export its results.
    Run(RunArgs),
    /// Compare two exported summaries on one metric.
    Compare(CompareArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Flat key=value config file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// jester | bookcrossing
    #[arg(long)]
    dataset: Option<String>,
    /// binary-prediction | decision-tree | highest-prediction |
    /// impact-analysis | lowest-prediction | random-baseline
    #[arg(long)]
    learner: Option<String>,
    /// Predictor inside the learner: funk-svd | user-user | item-item
    #[arg(long)]
    predictor: Option<String>,
    /// Final recommender: funk-svd | user-user | item-item
    #[arg(long, name = "final")]
    final_recommender: Option<String>,
    /// batch | sequential
    #[arg(long)]
    mode: Option<String>,
    #[arg(long)]
    budget: Option<usize>,
    #[arg(long)]
    n_users: Option<usize>,
    #[arg(long)]
    top_k: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory for per_user.csv, summary.json, boxplot.dat.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    /// First summary.json.
    #[arg(long)]
    a: PathBuf,
    /// Second summary.json.
    #[arg(long)]
    b: PathBuf,
    /// rmse | precision | ndcg
    #[arg(long)]
    metric: String,
}

fn run(args: &RunArgs) -> Result<(), CliError> {
    let overrides = Overrides {
        dataset: args.dataset.clone(),
        learner: args.learner.clone(),
        predictor: args.predictor.clone(),
        final_recommender: args.final_recommender.clone(),
        mode: args.mode.clone(),
        budget: args.budget,
        n_users: args.n_users,
        top_k: args.top_k,
        seed: args.seed,
        out: args.out.clone(),
    };
    let settings = parse_config(args.config.as_deref(), &overrides)?;
    let matrix = config::load_dataset(&settings)?;
    log::info!(
        "loaded {} users, {} items, {} ratings",
        matrix.n_users(),
        matrix.n_items(),
        matrix.n_entries()
    );

    let started = Instant::now();
    let result = run_experiment(&settings.config, &matrix).map_err(|e| match e {
        coldstart::ExperimentError::Config(_) | coldstart::ExperimentError::Eligibility { .. } => {
            CliError::Config(e.to_string())
        }
        coldstart::ExperimentError::Data(inner) => CliError::Data(inner.to_string()),
        other => CliError::Runtime(other.to_string()),
    })?;
    let duration = started.elapsed();

    let manifest = RunManifest {
        artifact_version: env!("CARGO_PKG_VERSION").to_string(),
        config: settings.config,
        data_path: settings
            .data_path
            .as_ref()
            .map(|p| p.display().to_string()),
        dataset_fingerprint: dataset_fingerprint(&matrix),
        duration_secs: duration.as_secs_f64(),
        users_evaluated: result.outcomes.len(),
        users_excluded: result.users_excluded,
        metrics: ManifestMetrics {
            rmse: result.summaries.rmse,
            precision: result.summaries.precision,
            ndcg: result.summaries.ndcg,
        },
    };
    let files = export_results(&settings.config, &result, &manifest, &settings.out_dir)?;

    println!(
        "evaluated {} users ({} excluded) in {:.1}s",
        result.outcomes.len(),
        result.users_excluded,
        duration.as_secs_f64()
    );
    for (name, summary) in [
        ("rmse", &result.summaries.rmse),
        ("precision", &result.summaries.precision),
        ("ndcg", &result.summaries.ndcg),
    ] {
        match summary {
            Some(b) => println!(
                "{name:>9}: min {:.4}  q1 {:.4}  median {:.4}  q3 {:.4}  max {:.4}  (n={})",
                b.min, b.q1, b.median, b.q3, b.max, b.n
            ),
            None => println!("{name:>9}: absent"),
        }
    }
    println!(
        "wrote {}, {}, {}",
        files.per_user.display(),
        files.summary.display(),
        files.boxplot.display()
    );
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();

    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help/version are not errors
            if e.use_stderr() {
                eprint!("{e}");
                return ExitCode::from(1);
            }
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };

    let outcome = match &cli.command {
        Command::Run(args) => run(args),
        Command::Compare(args) => MetricName::parse(&args.metric)
            .and_then(|metric| compare::compare_runs(&args.a, &args.b, metric))
            .map(|report| print!("{report}")),
    };

    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}
