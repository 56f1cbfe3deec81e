//! Experiment runner for the bakerlab library: map export, entropy time
//! series, asymptotic-entropy histograms, ensemble statistics and spectral
//! reports, written as deterministic CSV and JSON files.

pub mod config;
pub mod error;
pub mod experiments;
pub mod report;

pub use config::{
    EnsembleConfig, EpinfConfig, HistogramConfig, MapSource, Profile, SpectrumCheckConfig, TimeseriesConfig,
};
pub use error::CliError;
