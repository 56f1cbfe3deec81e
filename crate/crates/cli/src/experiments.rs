//! One runner per subcommand. Runners validate their config, do the work and
//! return the rendered file contents; writing is left to the caller.
//!
//! Random draws: initial states of time sweeps use stream `i` of the seed
//! (the same streams as the core sweep functions). The ensemble command
//! draws maps from lane 1, states from lane 2 and the optional CUE
//! reference states from lane 3.

use bakerlab_core::ensembles::haar_state;
use bakerlab_core::stats::{Histogram, MeanAccumulator, Moments};
use bakerlab_core::{
    cue_mean_entropy, eigensystem, empirical_asymptotic_distribution, linear_entropy, product_state,
    time_and_state_average, Bipartition, ComplexMatrix, MapKind, RngStream, SpectralAnalysis, StateVector,
};
use rayon::prelude::*;

use crate::config::{
    check_positive, check_split, check_window, EnsembleConfig, EpinfConfig, HistogramConfig, SpectrumCheckConfig,
    TimeseriesConfig,
};
use crate::error::CliError;
use crate::report::{
    entropy_csv, CrossCheck, EpinfReport, HistogramSummary, Metadata, ReferenceHistogram, SpectrumReport,
};

const LANE_MAPS: u64 = 1;
const LANE_STATES: u64 = 2;
const LANE_REFERENCE: u64 = 3;

/// cmatrix-json of a named map.
pub fn gen_map(kind: MapKind, d: usize) -> Result<String, CliError> {
    let mut s = kind.build(d)?.to_json();
    s.push('\n');
    Ok(s)
}

/// Entropy CSV for `states` random product states. Rows run over
/// `n_min..=n_max`; `n = 0` is the initial product state itself.
pub fn timeseries(cfg: &TimeseriesConfig) -> Result<String, CliError> {
    check_positive("states", cfg.states)?;
    check_window(cfg.n_min, cfg.n_max)?;
    let u = cfg.map.load()?;
    check_split(cfg.split, u.rows())?;
    let mut rows = Vec::new();
    if cfg.n_min == 0 {
        for i in 0..cfg.states {
            let psi = product_state(cfg.split, &mut RngStream::new(cfg.seed, i).rng());
            rows.push((i, 0, linear_entropy(&psi, cfg.split)?));
        }
    }
    if cfg.n_max > 0 {
        let samples =
            empirical_asymptotic_distribution(&u, cfg.split, cfg.n_min.max(1), cfg.n_max, cfg.states, cfg.seed)?;
        rows.extend(samples.into_iter().map(|s| (s.state_id, s.time_step, s.value)));
    }
    // state-major order, with the n = 0 rows in place
    rows.sort_by_key(|&(state, n, _)| (state, n));
    let meta = Metadata::new("timeseries", Some(cfg.seed), cfg);
    Ok(entropy_csv(&meta, rows))
}

/// Output of [`histogram`]: the summary and, on request, the raw samples.
pub struct HistogramOutput {
    pub summary: HistogramSummary,
    pub raw_csv: Option<String>,
}

/// Histogram of `S_L(U^n psi)` over the time window and the initial states.
pub fn histogram(cfg: &HistogramConfig, want_raw: bool) -> Result<HistogramOutput, CliError> {
    check_positive("states", cfg.states)?;
    check_positive("bins", cfg.bins as u64)?;
    check_window(cfg.n_min, cfg.n_max)?;
    if cfg.n_min == 0 {
        return Err(CliError::Config("nmin must be at least 1".into()));
    }
    let u = cfg.map.load()?;
    check_split(cfg.split, u.rows())?;
    let samples = empirical_asymptotic_distribution(&u, cfg.split, cfg.n_min, cfg.n_max, cfg.states, cfg.seed)?;
    let values: Vec<f64> = samples.iter().map(|s| s.value).collect();

    let per_state = (cfg.n_max - cfg.n_min + 1) as usize;
    let state_means: MeanAccumulator =
        values.chunks(per_state).map(|c| c.iter().sum::<f64>() / c.len() as f64).collect();

    let meta = Metadata::new("histogram", Some(cfg.seed), cfg);
    let raw_csv = want_raw.then(|| entropy_csv(&meta, samples.iter().map(|s| (s.state_id, s.time_step, s.value))));
    let mut summary = HistogramSummary::new(
        meta,
        Histogram::spanning(&values, cfg.bins)?,
        Moments::of(&values)?,
        state_means.std_error(),
        cue_mean_entropy(cfg.split),
    );
    if cfg.cue_reference > 0 {
        summary.cue_reference = Some(cue_reference(cfg.split, cfg.cue_reference, cfg.bins, cfg.seed)?);
    }
    Ok(HistogramOutput { summary, raw_csv })
}

fn cue_reference(part: Bipartition, n: u64, bins: usize, seed: u64) -> Result<ReferenceHistogram, CliError> {
    let values = (0..n)
        .into_par_iter()
        .map(|i| {
            let psi = haar_state(part.dim(), &mut RngStream::in_lane(seed, LANE_REFERENCE, i).rng())?;
            linear_entropy(&psi, part)
        })
        .collect::<Result<Vec<f64>, _>>()?;
    let hist = Histogram::spanning(&values, bins)?;
    let m = Moments::of(&values)?;
    Ok(ReferenceHistogram {
        bin_edges: hist.bin_edges,
        counts: hist.counts,
        n_samples: m.n_samples,
        mean: m.mean,
        variance: m.variance,
        skewness: m.skewness,
    })
}

/// `S_L(U psi)` for `maps` sampled unitaries times `states` product states.
/// The standard error is taken over the per-map means.
pub fn ensemble(cfg: &EnsembleConfig) -> Result<HistogramSummary, CliError> {
    check_positive("maps", cfg.maps)?;
    check_positive("states", cfg.states)?;
    check_positive("bins", cfg.bins as u64)?;
    check_split(cfg.split, cfg.d)?;
    let per_map = (0..cfg.maps)
        .into_par_iter()
        .map(|j| {
            let u = cfg.ensemble.sample(cfg.d, &mut RngStream::in_lane(cfg.seed, LANE_MAPS, j).rng())?;
            Ok((0..cfg.states)
                .map(|i| {
                    let stream = RngStream::in_lane(cfg.seed, LANE_STATES, j * cfg.states + i);
                    let psi = product_state(cfg.split, &mut stream.rng());
                    once(&u, &psi, cfg.split)
                })
                .collect::<Vec<f64>>())
        })
        .collect::<Result<Vec<Vec<f64>>, CliError>>()?;
    let map_means: MeanAccumulator = per_map.iter().map(|v| v.iter().sum::<f64>() / v.len() as f64).collect();
    let values: Vec<f64> = per_map.into_iter().flatten().collect();
    let meta = Metadata::new("ensemble", Some(cfg.seed), cfg);
    Ok(HistogramSummary::new(
        meta,
        Histogram::spanning(&values, cfg.bins)?,
        Moments::of(&values)?,
        map_means.std_error(),
        cue_mean_entropy(cfg.split),
    ))
}

fn once(u: &ComplexMatrix, psi: &StateVector, part: Bipartition) -> f64 {
    let out = u.apply(psi).expect("dimensions checked");
    linear_entropy(&out, part).expect("dimensions checked")
}

/// Closed-form asymptotic entangling power with its diagnostics and an
/// optional brute-force time average for comparison.
pub fn epinf(cfg: &EpinfConfig) -> Result<EpinfReport, CliError> {
    check_window(cfg.n_min, cfg.n_max)?;
    if cfg.cross_check {
        if cfg.states < 2 {
            return Err(CliError::Config("cross-check needs at least two states".into()));
        }
        if cfg.n_min == 0 {
            return Err(CliError::Config("nmin must be at least 1".into()));
        }
    }
    check_tolerance(cfg.tol)?;
    let u = cfg.map.load()?;
    check_split(cfg.split, u.rows())?;
    let analysis = SpectralAnalysis::with_check(eigensystem(&u)?, cfg.split, cfg.tol, cfg.budget)?;
    let ep = analysis.entangling_power();
    let cross_check = if cfg.cross_check {
        let est = time_and_state_average(&u, cfg.split, cfg.n_min, cfg.n_max, cfg.states, cfg.seed)?;
        Some(CrossCheck::new(est, ep.value, cfg.n_min, cfg.n_max))
    } else {
        None
    };
    Ok(EpinfReport {
        metadata: Metadata::new("epinf", cfg.cross_check.then_some(cfg.seed), cfg),
        dim: u.rows(),
        split: cfg.split.to_string(),
        spectral_value: ep.value,
        formula_assumptions_hold: ep.assumptions_hold,
        cue_mean: cue_mean_entropy(cfg.split),
        cross_check,
        commensurability: analysis.commensurability().clone(),
        eigensolver: analysis.eigensystem().diagnostics(),
    })
}

/// Eigenphases and the resonance search report.
pub fn spectrum_check(cfg: &SpectrumCheckConfig) -> Result<SpectrumReport, CliError> {
    check_tolerance(cfg.tol)?;
    let u = cfg.map.load()?;
    let eig = eigensystem(&u)?;
    let commensurability = bakerlab_core::commensurability_check(eig.phases(), cfg.tol, cfg.budget);
    Ok(SpectrumReport {
        metadata: Metadata::new("spectrum-check", None, cfg),
        dim: u.rows(),
        phases: eig.phases().to_vec(),
        commensurability,
        eigensolver: eig.diagnostics(),
    })
}

fn check_tolerance(tol: f64) -> Result<(), CliError> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(CliError::Config(format!("tolerance must be positive, got {tol}")));
    }
    Ok(())
}
