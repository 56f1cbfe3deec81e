use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use bakerlab_core::{Bipartition, ComplexMatrix, EnsembleKind, MapKind};
use serde::{Serialize, Serializer};

use crate::error::CliError;

/// Preset sample counts. `Desk` shrinks the published protocols to about
/// 10^5 samples; `Paper` keeps the published counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Profile {
    #[default]
    Desk,
    Paper,
}

impl Profile {
    pub fn histogram_states(self) -> u64 {
        match self {
            Profile::Desk => 50,
            Profile::Paper => 1000,
        }
    }

    /// `(n_min, n_max)` of the asymptotic window.
    pub fn window(self) -> (u64, u64) {
        (513, 2512)
    }

    pub fn ensemble_counts(self) -> (u64, u64) {
        match self {
            Profile::Desk => (316, 316),
            Profile::Paper => (1000, 1000),
        }
    }

    pub fn timeseries_states(self) -> u64 {
        5
    }

    pub fn timeseries_nmax(self) -> u64 {
        100
    }

    pub fn cross_check_states(self) -> u64 {
        match self {
            Profile::Desk => 100,
            Profile::Paper => 500,
        }
    }
}

impl FromStr for Profile {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "desk" => Ok(Profile::Desk),
            "paper" => Ok(Profile::Paper),
            _ => Err(CliError::Config(format!("unknown profile {s:?} (expected desk or paper)"))),
        }
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Profile::Desk => "desk",
            Profile::Paper => "paper",
        })
    }
}

/// Where a unitary comes from: a named constructor or a cmatrix-json file.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "source", rename_all = "lowercase")]
pub enum MapSource {
    Kind { kind: MapKind, d: usize },
    File { path: PathBuf },
}

impl MapSource {
    pub fn load(&self) -> Result<ComplexMatrix, CliError> {
        let m = match self {
            MapSource::Kind { kind, d } => kind.build(*d)?,
            MapSource::File { path } => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
                ComplexMatrix::from_json(&text)?
            }
        };
        if !m.is_square() {
            return Err(CliError::Config(format!("map must be square, got {}x{}", m.rows(), m.cols())));
        }
        m.ensure_unitary()?;
        Ok(m)
    }
}

pub(crate) fn serialize_split<S: Serializer>(part: &Bipartition, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(part)
}

pub(crate) fn check_split(part: Bipartition, d: usize) -> Result<(), CliError> {
    if part.dim() != d {
        return Err(CliError::Config(format!("split {part} has dimension {} but the map has {d}", part.dim())));
    }
    Ok(())
}

pub(crate) fn check_positive(name: &str, value: u64) -> Result<(), CliError> {
    if value == 0 {
        return Err(CliError::Config(format!("{name} must be positive")));
    }
    Ok(())
}

pub(crate) fn check_window(n_min: u64, n_max: u64) -> Result<(), CliError> {
    if n_min > n_max {
        return Err(CliError::Config(format!("nmin ({n_min}) exceeds nmax ({n_max})")));
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct TimeseriesConfig {
    pub map: MapSource,
    #[serde(serialize_with = "serialize_split")]
    pub split: Bipartition,
    pub states: u64,
    pub n_min: u64,
    pub n_max: u64,
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct HistogramConfig {
    pub map: MapSource,
    #[serde(serialize_with = "serialize_split")]
    pub split: Bipartition,
    pub states: u64,
    pub n_min: u64,
    pub n_max: u64,
    pub bins: usize,
    /// Number of Haar-random states for a CUE reference histogram (0: none).
    pub cue_reference: u64,
    pub seed: u64,
    pub profile: Profile,
}

#[derive(Debug, Clone, Serialize)]
pub struct EnsembleConfig {
    pub ensemble: EnsembleKind,
    pub d: usize,
    #[serde(serialize_with = "serialize_split")]
    pub split: Bipartition,
    pub maps: u64,
    pub states: u64,
    pub bins: usize,
    pub seed: u64,
    pub profile: Profile,
}

#[derive(Debug, Clone, Serialize)]
pub struct EpinfConfig {
    pub map: MapSource,
    #[serde(serialize_with = "serialize_split")]
    pub split: Bipartition,
    pub cross_check: bool,
    pub states: u64,
    pub n_min: u64,
    pub n_max: u64,
    pub tol: f64,
    pub budget: u64,
    pub seed: u64,
    pub profile: Profile,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumCheckConfig {
    pub map: MapSource,
    pub tol: f64,
    pub budget: u64,
}
