//! Result export: per-user CSV, the summary manifest, and gnuplot-ready
//! box-plot rows.
//!
//! `per_user.csv` is a bit-exact contract: UTF-8, LF line endings, `.`
//! decimal separator, absent metrics as empty fields. Re-exporting the same
//! outcomes yields byte-identical files.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use coldstart::simulation::{ExperimentConfig, ExperimentResult};
use coldstart::{BoxplotSummary, RatingMatrix};

use crate::CliError;

/// Everything needed to reproduce and interpret a run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub artifact_version: String,
    pub config: ExperimentConfig,
    pub data_path: Option<String>,
    pub dataset_fingerprint: DatasetFingerprint,
    pub duration_secs: f64,
    pub users_evaluated: usize,
    pub users_excluded: usize,
    pub metrics: ManifestMetrics,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DatasetFingerprint {
    pub entries: usize,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ManifestMetrics {
    pub rmse: Option<BoxplotSummary>,
    pub precision: Option<BoxplotSummary>,
    pub ndcg: Option<BoxplotSummary>,
}

/// Entry-order SHA-256 over user id, item id, and the exact rating bits,
/// plus the scale bounds.
pub fn dataset_fingerprint(matrix: &RatingMatrix) -> DatasetFingerprint {
    let mut hasher = Sha256::new();
    hasher.update(matrix.scale().min().to_le_bytes());
    hasher.update(matrix.scale().max().to_le_bytes());
    for (u, i, r) in matrix.entries() {
        hasher.update(matrix.user_id(u).as_bytes());
        hasher.update([0u8]);
        hasher.update(matrix.item_id(i).as_bytes());
        hasher.update([0u8]);
        hasher.update(r.to_bits().to_le_bytes());
    }
    let digest = hasher.finalize();
    let mut hex = String::with_capacity(64);
    for byte in digest {
        let _ = write!(hex, "{byte:02x}");
    }
    DatasetFingerprint {
        entries: matrix.n_entries(),
        sha256: hex,
    }
}

fn opt_field(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Render the per-user CSV contents.
pub fn per_user_csv(cfg: &ExperimentConfig, result: &ExperimentResult) -> String {
    let mut out = String::new();
    out.push_str("user,mode,learner,predictor,acquired,asked,rmse,precision,ndcg\n");
    let predictor = cfg
        .learner
        .predictor()
        .map(|p| p.name())
        .unwrap_or_default();
    for o in &result.outcomes {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            o.user_id,
            cfg.mode.name(),
            cfg.learner.strategy_name(),
            predictor,
            o.acquired,
            o.asked.len(),
            opt_field(o.rmse),
            opt_field(o.precision),
            opt_field(o.ndcg),
        );
    }
    out
}

/// Render boxplot.dat: one `min q1 median q3 max` row per metric in the
/// fixed order rmse, precision, ndcg. Comment lines document the layout;
/// metrics with no values are noted as absent.
pub fn boxplot_dat(result: &ExperimentResult) -> String {
    let mut out = String::new();
    out.push_str("# one row per metric: min q1 median q3 max\n");
    out.push_str("# row order: rmse precision ndcg\n");
    let rows: [(&str, &Option<BoxplotSummary>); 3] = [
        ("rmse", &result.summaries.rmse),
        ("precision", &result.summaries.precision),
        ("ndcg", &result.summaries.ndcg),
    ];
    for (name, summary) in rows {
        match summary {
            Some(b) => {
                let _ = writeln!(out, "{} {} {} {} {}", b.min, b.q1, b.median, b.q3, b.max);
            }
            None => {
                let _ = writeln!(out, "# {name} absent (no users with this metric)");
            }
        }
    }
    out
}

pub struct ExportedFiles {
    pub per_user: PathBuf,
    pub summary: PathBuf,
    pub boxplot: PathBuf,
}

/// Write per_user.csv, summary.json, and boxplot.dat into `out_dir`.
pub fn export_results(
    cfg: &ExperimentConfig,
    result: &ExperimentResult,
    manifest: &RunManifest,
    out_dir: &Path,
) -> Result<ExportedFiles, CliError> {
    std::fs::create_dir_all(out_dir)
        .map_err(|e| CliError::Runtime(format!("cannot create {}: {e}", out_dir.display())))?;
    let files = ExportedFiles {
        per_user: out_dir.join("per_user.csv"),
        summary: out_dir.join("summary.json"),
        boxplot: out_dir.join("boxplot.dat"),
    };

    std::fs::write(&files.per_user, per_user_csv(cfg, result))
        .map_err(|e| CliError::Runtime(format!("write {}: {e}", files.per_user.display())))?;

    let mut json = serde_json::to_string_pretty(manifest)
        .map_err(|e| CliError::Runtime(format!("serialize manifest: {e}")))?;
    json.push('\n');
    std::fs::write(&files.summary, json)
        .map_err(|e| CliError::Runtime(format!("write {}: {e}", files.summary.display())))?;

    std::fs::write(&files.boxplot, boxplot_dat(result))
        .map_err(|e| CliError::Runtime(format!("write {}: {e}", files.boxplot.display())))?;

    Ok(files)
}

pub fn load_manifest(path: &Path) -> Result<RunManifest, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Data(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Data(format!("{} is not a run summary: {e}", path.display())))
}
