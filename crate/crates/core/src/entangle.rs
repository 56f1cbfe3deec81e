//! Entanglement functionals of unitary dynamics.
//!
//! Two routes to the asymptotic entangling power are provided and kept
//! independent: brute-force averages of the linear entropy over product
//! initial states and time steps ([`time_and_state_average`]), and the
//! closed-form expression over reduced eigenvector density matrices
//! ([`SpectralAnalysis`]).

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::commensurability::{commensurability_check, CommensurabilityReport, DEFAULT_BUDGET, DEFAULT_TOLERANCE};
use crate::eigen::EigenSystem;
use crate::ensembles::{product_state, RngStream};
use crate::error::{BakerError, Result};
use crate::stats::MeanAccumulator;
use crate::tensor::{purity_of, reduced_outer, Bipartition, ComplexMatrix, StateVector, Subsystem};

/// One linear-entropy observation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntropySample {
    pub value: f64,
    pub time_step: u64,
    pub state_id: u64,
}

/// Monte-Carlo mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub std_error: f64,
    pub n_samples: u64,
}

impl From<MeanAccumulator> for Estimate {
    fn from(acc: MeanAccumulator) -> Self {
        Estimate { mean: acc.mean(), std_error: acc.std_error(), n_samples: acc.count() }
    }
}

fn check_state(psi: &StateVector, part: Bipartition) -> Result<()> {
    if psi.dim() != part.dim() {
        return Err(BakerError::DimensionMismatch(format!("state of dimension {} on split {part}", psi.dim())));
    }
    Ok(())
}

fn check_map(u: &ComplexMatrix, part: Bipartition) -> Result<()> {
    if !u.is_square() || u.rows() != part.dim() {
        return Err(BakerError::DimensionMismatch(format!("{}x{} map on split {part}", u.rows(), u.cols())));
    }
    u.ensure_unitary()
}

/// `S_L = 1 - tr(rho_A^2)`; equal to `1 - tr(rho_B^2)` for a pure state.
pub fn linear_entropy(psi: &StateVector, part: Bipartition) -> Result<f64> {
    check_state(psi, part)?;
    Ok(entropy_of(psi.amplitudes(), part))
}

/// Roundoff can push `1 - purity` a few ulps outside its range.
fn entropy_of(amps: &[Complex64], part: Bipartition) -> f64 {
    (1.0 - purity_of(amps, part)).clamp(0.0, part.max_linear_entropy())
}

/// `<S_L>` of Haar-random states on the split: `(d_a - 1)(d_b - 1) / (d_a d_b + 1)`.
pub fn cue_mean_entropy(part: Bipartition) -> f64 {
    let (a, b) = (part.d_a() as f64, part.d_b() as f64);
    (a - 1.0) * (b - 1.0) / (a * b + 1.0)
}

/// Entropies of `U^n psi0` for `n_min <= n <= n_max`, by repeated
/// matrix-vector products. Unitarity is assumed checked by the caller.
fn sweep(
    u: &ComplexMatrix,
    psi0: &[Complex64],
    part: Bipartition,
    n_min: u64,
    n_max: u64,
    mut sink: impl FnMut(u64, f64),
) {
    let mut cur = psi0.to_vec();
    let mut next = vec![Complex64::new(0.0, 0.0); cur.len()];
    for n in 1..=n_max {
        u.apply_into(&cur, &mut next);
        std::mem::swap(&mut cur, &mut next);
        if n >= n_min {
            sink(n, entropy_of(&cur, part));
        }
    }
}

/// `S_L(U^n psi0)` for `n = 1..=n_max`.
pub fn entropy_timeseries(
    u: &ComplexMatrix,
    psi0: &StateVector,
    part: Bipartition,
    n_max: u64,
) -> Result<Vec<EntropySample>> {
    check_map(u, part)?;
    check_state(psi0, part)?;
    if n_max == 0 {
        return Err(BakerError::InvalidArgument("n_max must be positive".into()));
    }
    let mut out = Vec::with_capacity(n_max as usize);
    sweep(u, psi0.amplitudes(), part, 1, n_max, |n, s| out.push(EntropySample { value: s, time_step: n, state_id: 0 }));
    Ok(out)
}

/// Entangling power `<S_L(U |psi_A> (x) |psi_B>)>` over Haar product states.
/// Sample `i` draws its state from stream `i` of `seed`.
pub fn entangling_power_mc(u: &ComplexMatrix, part: Bipartition, n_samples: u64, seed: u64) -> Result<Estimate> {
    check_map(u, part)?;
    if n_samples < 2 {
        return Err(BakerError::InvalidArgument("need at least two samples for an error estimate".into()));
    }
    let values: Vec<f64> = (0..n_samples)
        .into_par_iter()
        .map(|i| {
            let psi = product_state(part, &mut RngStream::new(seed, i).rng());
            let mut out = vec![Complex64::new(0.0, 0.0); part.dim()];
            u.apply_into(psi.amplitudes(), &mut out);
            entropy_of(&out, part)
        })
        .collect();
    Ok(values.into_iter().collect::<MeanAccumulator>().into())
}

/// For each of `n_states` random product states (state `i` from stream `i`
/// of `seed`), every `S_L(n)` with `n_min <= n <= n_max`. Ordered by state,
/// then time.
pub fn empirical_asymptotic_distribution(
    u: &ComplexMatrix,
    part: Bipartition,
    n_min: u64,
    n_max: u64,
    n_states: u64,
    seed: u64,
) -> Result<Vec<EntropySample>> {
    check_window(n_min, n_max, n_states)?;
    check_map(u, part)?;
    let per_state: Vec<Vec<EntropySample>> = (0..n_states)
        .into_par_iter()
        .map(|i| {
            let psi = product_state(part, &mut RngStream::new(seed, i).rng());
            let mut out = Vec::with_capacity((n_max - n_min + 1) as usize);
            sweep(u, psi.amplitudes(), part, n_min, n_max, |n, s| {
                out.push(EntropySample { value: s, time_step: n, state_id: i })
            });
            out
        })
        .collect();
    Ok(per_state.into_iter().flatten().collect())
}

fn check_window(n_min: u64, n_max: u64, n_states: u64) -> Result<()> {
    if n_min < 1 || n_max < n_min {
        return Err(BakerError::InvalidArgument(format!("bad time window [{n_min}, {n_max}]")));
    }
    if n_states == 0 {
        return Err(BakerError::InvalidArgument("state count must be positive".into()));
    }
    Ok(())
}

/// Brute-force estimate of the asymptotic entangling power: each product
/// state's entropy is averaged over the time window, and the per-state
/// averages (independent samples) give the mean and its standard error.
pub fn time_and_state_average(
    u: &ComplexMatrix,
    part: Bipartition,
    n_min: u64,
    n_max: u64,
    n_states: u64,
    seed: u64,
) -> Result<Estimate> {
    check_window(n_min, n_max, n_states)?;
    check_map(u, part)?;
    let per_state: Vec<f64> = (0..n_states)
        .into_par_iter()
        .map(|i| {
            let psi = product_state(part, &mut RngStream::new(seed, i).rng());
            let mut acc = MeanAccumulator::default();
            sweep(u, psi.amplitudes(), part, n_min, n_max, |_, s| acc.push(s));
            acc.mean()
        })
        .collect();
    Ok(per_state.into_iter().collect::<MeanAccumulator>().into())
}

/// Reduced density matrices of every eigenvector.
#[derive(Debug, Clone)]
pub struct ReducedEigenData {
    pub part: Bipartition,
    pub rho_a: Vec<ComplexMatrix>,
    pub rho_b: Vec<ComplexMatrix>,
}

impl ReducedEigenData {
    pub fn new(eig: &EigenSystem, part: Bipartition) -> Result<Self> {
        if eig.dim() != part.dim() {
            return Err(BakerError::DimensionMismatch(format!(
                "eigensystem of dimension {} on split {part}",
                eig.dim()
            )));
        }
        let reduce = |keep| {
            eig.vectors()
                .par_iter()
                .map(|v| reduced_outer(v.amplitudes(), v.amplitudes(), part, keep))
                .collect::<Vec<_>>()
        };
        Ok(ReducedEigenData { part, rho_a: reduce(Subsystem::A), rho_b: reduce(Subsystem::B) })
    }

    /// `tr(rho_A^i rho_A^j) + tr(rho_B^i rho_B^j)` for all `i, j`, row-major.
    /// The diagonal holds twice the eigenvector purities.
    pub fn overlap_matrix(&self) -> Vec<f64> {
        let d = self.rho_a.len();
        let rows: Vec<Vec<f64>> = (0..d)
            .into_par_iter()
            .map(|i| {
                (0..d)
                    .map(|j| hs_product(&self.rho_a[i], &self.rho_a[j]) + hs_product(&self.rho_b[i], &self.rho_b[j]))
                    .collect()
            })
            .collect();
        rows.into_iter().flatten().collect()
    }
}

/// `tr(x y)` for Hermitian `x`, `y`, i.e. `sum x[a, b] conj(y[a, b])`.
fn hs_product(x: &ComplexMatrix, y: &ComplexMatrix) -> f64 {
    x.entries().iter().zip(y.entries()).map(|(a, b)| (a * b.conj()).re).sum()
}

/// A closed-form value together with whether the spectrum satisfied the
/// no-resonance assumption the formula rests on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralValue {
    pub value: f64,
    pub assumptions_hold: bool,
}

/// Precomputed eigenvector data for the asymptotic entropy and the
/// asymptotic entangling power of one unitary on one split.
#[derive(Debug, Clone)]
pub struct SpectralAnalysis {
    part: Bipartition,
    eig: EigenSystem,
    purities: Vec<f64>,
    overlaps: Vec<f64>,
    report: CommensurabilityReport,
}

impl SpectralAnalysis {
    /// Uses the default resonance tolerance and budget.
    pub fn new(eig: EigenSystem, part: Bipartition) -> Result<Self> {
        Self::with_check(eig, part, DEFAULT_TOLERANCE, DEFAULT_BUDGET)
    }

    pub fn with_check(eig: EigenSystem, part: Bipartition, tol: f64, budget: u64) -> Result<Self> {
        let reduced = ReducedEigenData::new(&eig, part)?;
        let overlaps = reduced.overlap_matrix();
        let purities = reduced.rho_a.iter().map(|r| r.entries().iter().map(|z| z.norm_sqr()).sum()).collect();
        let report = commensurability_check(eig.phases(), tol, budget);
        Ok(SpectralAnalysis { part, eig, purities, overlaps, report })
    }

    pub fn eigensystem(&self) -> &EigenSystem {
        &self.eig
    }

    pub fn commensurability(&self) -> &CommensurabilityReport {
        &self.report
    }

    /// `tr (rho_A^i)^2` for each eigenvector.
    pub fn eigenvector_purities(&self) -> &[f64] {
        &self.purities
    }

    fn flag(&self, value: f64) -> SpectralValue {
        SpectralValue { value, assumptions_hold: self.report.passed() }
    }

    /// Infinite-time average of `S_L(U^n psi)`:
    /// `1 - sum_i p_i^2 P_i - sum_{i != j} p_i p_j X_ij` with `p_i = |<e_i|psi>|^2`,
    /// `P_i` the eigenvector purities and `X` the overlap matrix.
    pub fn asymptotic_entropy(&self, psi: &StateVector) -> Result<SpectralValue> {
        check_state(psi, self.part)?;
        let d = self.eig.dim();
        let p: Vec<f64> = self.eig.vectors().iter().map(|e| e.inner(psi).norm_sqr()).collect();
        let mut quad = 0.0;
        for i in 0..d {
            let row = &self.overlaps[i * d..(i + 1) * d];
            let cross: f64 = row.iter().zip(&p).enumerate().filter(|(j, _)| *j != i).map(|(_, (x, pj))| x * pj).sum();
            quad += p[i] * (p[i] * self.purities[i] + cross);
        }
        Ok(self.flag(1.0 - quad))
    }

    /// `(d + 1)/d' - 2/(d d') sum_i P_i^2 - 1/(d d') sum_{i != j} X_ij^2`.
    pub fn entangling_power(&self) -> SpectralValue {
        let d = self.eig.dim();
        let dd = self.part.dim() as f64;
        let dp = self.part.d_prime() as f64;
        let diag: f64 = self.purities.iter().map(|p| p * p).sum();
        let off: f64 = (0..d)
            .map(|i| {
                self.overlaps[i * d..(i + 1) * d]
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| *j != i)
                    .map(|(_, x)| x * x)
                    .sum::<f64>()
            })
            .sum();
        self.flag((dd + 1.0) / dp - 2.0 * diag / (dd * dp) - off / (dd * dp))
    }
}

pub fn asymptotic_entropy(eig: &EigenSystem, psi: &StateVector, part: Bipartition) -> Result<SpectralValue> {
    SpectralAnalysis::new(eig.clone(), part)?.asymptotic_entropy(psi)
}

pub fn asymptotic_entangling_power(eig: &EigenSystem, part: Bipartition) -> Result<SpectralValue> {
    Ok(SpectralAnalysis::new(eig.clone(), part)?.entangling_power())
}
