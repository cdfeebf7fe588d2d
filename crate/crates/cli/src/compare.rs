//! Compare two run summaries on one metric by box-plot median.

use std::path::Path;

use crate::export::{load_manifest, RunManifest};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricName {
    Rmse,
    Precision,
    Ndcg,
}

impl MetricName {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        match s {
            "rmse" => Ok(MetricName::Rmse),
            "precision" => Ok(MetricName::Precision),
            "ndcg" => Ok(MetricName::Ndcg),
            other => Err(CliError::Config(format!(
                "unknown metric {other:?} (expected rmse, precision, or ndcg)"
            ))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            MetricName::Rmse => "rmse",
            MetricName::Precision => "precision",
            MetricName::Ndcg => "ndcg",
        }
    }

    /// Whether a lower median is the better one.
    pub fn lower_is_better(&self) -> bool {
        matches!(self, MetricName::Rmse)
    }
}

fn median_of(manifest: &RunManifest, metric: MetricName, label: &str) -> Result<f64, CliError> {
    let summary = match metric {
        MetricName::Rmse => &manifest.metrics.rmse,
        MetricName::Precision => &manifest.metrics.precision,
        MetricName::Ndcg => &manifest.metrics.ndcg,
    };
    summary.as_ref().map(|b| b.median).ok_or_else(|| {
        CliError::Data(format!(
            "summary {label} has no {} values to compare",
            metric.name()
        ))
    })
}

#[derive(Debug, Clone)]
pub struct Comparison {
    pub median_a: f64,
    pub median_b: f64,
    /// `median_a - median_b`.
    pub difference: f64,
    /// "a", "b", or "none".
    pub winner: &'static str,
}

pub fn compare_manifests(
    a: &RunManifest,
    b: &RunManifest,
    metric: MetricName,
) -> Result<Comparison, CliError> {
    let median_a = median_of(a, metric, "a")?;
    let median_b = median_of(b, metric, "b")?;
    let difference = median_a - median_b;
    let winner = if difference == 0.0 {
        "none"
    } else if (difference < 0.0) == metric.lower_is_better() {
        "a"
    } else {
        "b"
    };
    Ok(Comparison {
        median_a,
        median_b,
        difference,
        winner,
    })
}

pub fn compare_runs(path_a: &Path, path_b: &Path, metric: MetricName) -> Result<String, CliError> {
    let a = load_manifest(path_a)?;
    let b = load_manifest(path_b)?;
    let cmp = compare_manifests(&a, &b, metric)?;
    let direction = if metric.lower_is_better() {
        "lower is better"
    } else {
        "higher is better"
    };
    let mut out = String::new();
    out.push_str(&format!("metric: {} ({direction})\n", metric.name()));
    out.push_str(&format!("a: {}  median {}\n", path_a.display(), cmp.median_a));
    out.push_str(&format!("b: {}  median {}\n", path_b.display(), cmp.median_b));
    out.push_str(&format!("median difference (a - b): {}\n", cmp.difference));
    match cmp.winner {
        "none" => out.push_str("winner: none (no difference)\n"),
        w => out.push_str(&format!("winner: {w}\n")),
    }
    Ok(out)
}
