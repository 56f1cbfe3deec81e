use std::path::PathBuf;
use std::process::ExitCode;

use bakerlab_cli::config::{
    EnsembleConfig, EpinfConfig, HistogramConfig, MapSource, Profile, SpectrumCheckConfig, TimeseriesConfig,
};
use bakerlab_cli::experiments;
use bakerlab_cli::report::to_json;
use bakerlab_cli::CliError;
use bakerlab_core::commensurability::{DEFAULT_BUDGET, DEFAULT_TOLERANCE};
use bakerlab_core::{Bipartition, EnsembleKind, MapKind};
use clap::{Args, Parser, Subcommand};

const DEFAULT_BINS: usize = 50;

#[derive(Parser)]
#[command(name = "bakerlab", version, about = "Entangling power of quantum baker maps and random unitaries")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a named unitary as cmatrix-json.
    GenMap {
        /// baker, dmap, dprime, bbar, reflection, fourier or lambda
        #[arg(long)]
        kind: String,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Entropy time series of random product states (CSV).
    Timeseries {
        #[command(flatten)]
        map: MapArgs,
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        nmin: Option<u64>,
        #[arg(long)]
        nmax: Option<u64>,
    },
    /// Histogram of asymptotic entropies over a time window (JSON).
    Histogram {
        #[command(flatten)]
        map: MapArgs,
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        nmin: Option<u64>,
        #[arg(long)]
        nmax: Option<u64>,
        #[arg(long, default_value_t = DEFAULT_BINS)]
        bins: usize,
        /// Also bin this many Haar-random states for comparison.
        #[arg(long, default_value_t = 0)]
        cue_reference: u64,
        /// Write every sample to this CSV file.
        #[arg(long)]
        raw: Option<PathBuf>,
    },
    /// Entropies after one application of random maps (JSON).
    Ensemble {
        /// cue, coe or symmetric
        #[arg(long)]
        kind: String,
        #[arg(long)]
        d: usize,
        #[command(flatten)]
        common: CommonArgs,
        /// Number of sampled maps.
        #[arg(long)]
        samples: Option<u64>,
        #[arg(long, default_value_t = DEFAULT_BINS)]
        bins: usize,
    },
    /// Closed-form asymptotic entangling power (JSON).
    Epinf {
        #[command(flatten)]
        map: MapArgs,
        #[command(flatten)]
        common: CommonArgs,
        /// Compare with a brute-force time and state average.
        #[arg(long)]
        cross_check: bool,
        #[arg(long)]
        nmin: Option<u64>,
        #[arg(long)]
        nmax: Option<u64>,
        #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
        tol: f64,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
    },
    /// Eigenphases and the resonance search (JSON).
    SpectrumCheck {
        #[command(flatten)]
        map: MapArgs,
        #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
        tol: f64,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// A map given either by name and dimension or as a cmatrix-json file.
#[derive(Args)]
struct MapArgs {
    #[arg(long, conflicts_with = "map")]
    kind: Option<String>,
    #[arg(long, conflicts_with = "map")]
    d: Option<usize>,
    /// cmatrix-json file
    #[arg(long)]
    map: Option<PathBuf>,
}

#[derive(Args)]
struct CommonArgs {
    /// Bipartition AxB; defaults to the square split when d is a square.
    #[arg(long)]
    split: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "desk")]
    profile: String,
    #[arg(long)]
    states: Option<u64>,
}

impl MapArgs {
    fn source(&self) -> Result<MapSource, CliError> {
        match (&self.map, &self.kind, self.d) {
            (Some(path), None, None) => Ok(MapSource::File { path: path.clone() }),
            (None, Some(kind), Some(d)) => Ok(MapSource::Kind { kind: kind.parse()?, d }),
            _ => Err(CliError::Config("give either --map FILE or both --kind and --d".into())),
        }
    }

    fn dim_hint(&self) -> Result<usize, CliError> {
        match (self.d, &self.map) {
            (Some(d), _) => Ok(d),
            (None, Some(path)) => {
                let m = MapSource::File { path: path.clone() }.load()?;
                Ok(m.rows())
            }
            _ => Err(CliError::Config("missing map".into())),
        }
    }
}

impl CommonArgs {
    fn profile(&self) -> Result<Profile, CliError> {
        self.profile.parse()
    }

    fn split(&self, d: impl FnOnce() -> Result<usize, CliError>) -> Result<Bipartition, CliError> {
        if let Some(s) = &self.split {
            return Ok(s.parse()?);
        }
        let d = d()?;
        let r = (d as f64).sqrt().round() as usize;
        if r * r != d {
            return Err(CliError::Config(format!("dimension {d} is not a square; pass --split AxB")));
        }
        Ok(Bipartition::new(r, r)?)
    }
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => {
            std::fs::write(path, text).map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::GenMap { kind, d, out } => {
            let kind: MapKind = kind.parse()?;
            emit(&out, &experiments::gen_map(kind, d)?)
        }
        Command::Timeseries { map, common, nmin, nmax } => {
            let profile = common.profile()?;
            let cfg = TimeseriesConfig {
                map: map.source()?,
                split: common.split(|| map.dim_hint())?,
                states: common.states.unwrap_or(profile.timeseries_states()),
                n_min: nmin.unwrap_or(0),
                n_max: nmax.unwrap_or(profile.timeseries_nmax()),
                seed: common.seed,
            };
            emit(&common.out, &experiments::timeseries(&cfg)?)
        }
        Command::Histogram { map, common, nmin, nmax, bins, cue_reference, raw } => {
            let profile = common.profile()?;
            let (lo, hi) = profile.window();
            let cfg = HistogramConfig {
                map: map.source()?,
                split: common.split(|| map.dim_hint())?,
                states: common.states.unwrap_or(profile.histogram_states()),
                n_min: nmin.unwrap_or(lo),
                n_max: nmax.unwrap_or(hi),
                bins,
                cue_reference,
                seed: common.seed,
                profile,
            };
            let output = experiments::histogram(&cfg, raw.is_some())?;
            if let (Some(path), Some(csv)) = (&raw, &output.raw_csv) {
                emit(&Some(path.clone()), csv)?;
            }
            emit(&common.out, &to_json(&output.summary))
        }
        Command::Ensemble { kind, d, common, samples, bins } => {
            let profile = common.profile()?;
            let (m, s) = profile.ensemble_counts();
            let ensemble: EnsembleKind = kind.parse()?;
            let cfg = EnsembleConfig {
                ensemble,
                d,
                split: common.split(|| Ok(d))?,
                maps: samples.unwrap_or(m),
                states: common.states.unwrap_or(s),
                bins,
                seed: common.seed,
                profile,
            };
            emit(&common.out, &to_json(&experiments::ensemble(&cfg)?))
        }
        Command::Epinf { map, common, cross_check, nmin, nmax, tol, budget } => {
            let profile = common.profile()?;
            let (lo, hi) = profile.window();
            let cfg = EpinfConfig {
                map: map.source()?,
                split: common.split(|| map.dim_hint())?,
                cross_check,
                states: common.states.unwrap_or(profile.cross_check_states()),
                n_min: nmin.unwrap_or(lo),
                n_max: nmax.unwrap_or(hi),
                tol,
                budget,
                seed: common.seed,
                profile,
            };
            emit(&common.out, &to_json(&experiments::epinf(&cfg)?))
        }
        Command::SpectrumCheck { map, tol, budget, out } => {
            let cfg = SpectrumCheckConfig { map: map.source()?, tol, budget };
            emit(&out, &to_json(&experiments::spectrum_check(&cfg)?))
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("bakerlab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
