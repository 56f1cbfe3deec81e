//! Output schemas. JSON numbers are written by serde_json (shortest
//! round-trip decimals); CSV numbers use `f64`'s `Display`, which is also
//! shortest round-trip.

use std::fmt::Write as _;

use bakerlab_core::eigen::EigenDiagnostics;
use bakerlab_core::stats::{Histogram, Moments};
use bakerlab_core::{CommensurabilityReport, Estimate};
use serde::Serialize;

pub const TOOL: &str = "bakerlab";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Provenance block embedded in every output.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Metadata {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub seed: Option<u64>,
    pub config: serde_json::Value,
}

impl Metadata {
    pub fn new<C: Serialize>(command: &'static str, seed: Option<u64>, config: &C) -> Self {
        Metadata {
            tool: TOOL,
            version: VERSION,
            command,
            seed,
            config: serde_json::to_value(config).expect("config serializes"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HistogramSummary {
    pub metadata: Metadata,
    pub bin_edges: Vec<f64>,
    pub counts: Vec<u64>,
    pub n_samples: u64,
    pub mean: f64,
    pub variance: f64,
    pub skewness: f64,
    /// Standard error of the mean over independent units (initial states
    /// for time sweeps, maps for ensembles).
    pub std_error: f64,
    /// Average linear entropy of Haar-random states on the split.
    pub cue_mean: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cue_reference: Option<ReferenceHistogram>,
}

impl HistogramSummary {
    pub fn new(metadata: Metadata, hist: Histogram, moments: Moments, std_error: f64, cue_mean: f64) -> Self {
        HistogramSummary {
            metadata,
            bin_edges: hist.bin_edges,
            counts: hist.counts,
            n_samples: moments.n_samples,
            mean: moments.mean,
            variance: moments.variance,
            skewness: moments.skewness,
            std_error,
            cue_mean,
            cue_reference: None,
        }
    }
}

/// Entropies of Haar-random states, binned on their own range.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReferenceHistogram {
    pub bin_edges: Vec<f64>,
    pub counts: Vec<u64>,
    pub n_samples: u64,
    pub mean: f64,
    pub variance: f64,
    pub skewness: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossCheck {
    pub mean: f64,
    pub std_error: f64,
    pub n_states: u64,
    pub n_min: u64,
    pub n_max: u64,
    /// `(mc - spectral) / std_error`
    pub z_score: f64,
    pub within_three_sigma: bool,
}

impl CrossCheck {
    pub fn new(est: Estimate, spectral: f64, n_min: u64, n_max: u64) -> Self {
        let z_score = (est.mean - spectral) / est.std_error;
        CrossCheck {
            mean: est.mean,
            std_error: est.std_error,
            n_states: est.n_samples,
            n_min,
            n_max,
            z_score,
            within_three_sigma: z_score.abs() < 3.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EpinfReport {
    pub metadata: Metadata,
    pub dim: usize,
    pub split: String,
    pub spectral_value: f64,
    /// False when the eigenphase resonance search found violations.
    pub formula_assumptions_hold: bool,
    pub cue_mean: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cross_check: Option<CrossCheck>,
    pub commensurability: CommensurabilityReport,
    pub eigensolver: EigenDiagnostics,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumReport {
    pub metadata: Metadata,
    pub dim: usize,
    pub phases: Vec<f64>,
    pub commensurability: CommensurabilityReport,
    pub eigensolver: EigenDiagnostics,
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

/// Entropy CSV: `#`-prefixed provenance lines, then `state_id,n,S_L` rows.
pub fn entropy_csv(metadata: &Metadata, rows: impl IntoIterator<Item = (u64, u64, f64)>) -> String {
    let mut out = String::new();
    writeln!(out, "# tool: {} {}", metadata.tool, metadata.version).unwrap();
    writeln!(out, "# command: {}", metadata.command).unwrap();
    if let Some(seed) = metadata.seed {
        writeln!(out, "# seed: {seed}").unwrap();
    }
    writeln!(out, "# config: {}", metadata.config).unwrap();
    out.push_str("state_id,n,S_L\n");
    for (state, n, s) in rows {
        writeln!(out, "{state},{n},{s}").unwrap();
    }
    out
}

/// Parses the rows of an entropy CSV, skipping `#` lines and the header.
pub fn parse_entropy_csv(text: &str) -> Result<Vec<(u64, u64, f64)>, String> {
    let mut rows = Vec::new();
    let mut saw_header = false;
    for line in text.lines() {
        if line.starts_with('#') || line.is_empty() {
            continue;
        }
        if !saw_header {
            if line != "state_id,n,S_L" {
                return Err(format!("unexpected header {line:?}"));
            }
            saw_header = true;
            continue;
        }
        let mut fields = line.split(',');
        let mut next = || fields.next().ok_or_else(|| format!("short row {line:?}"));
        let state = next()?.parse().map_err(|e| format!("{e} in {line:?}"))?;
        let n = next()?.parse().map_err(|e| format!("{e} in {line:?}"))?;
        let s = next()?.parse().map_err(|e| format!("{e} in {line:?}"))?;
        rows.push((state, n, s));
    }
    if !saw_header {
        return Err("missing header".into());
    }
    Ok(rows)
}
