//! Search for resonances `phi_k - phi_l + phi_m - phi_n = 0 (mod 2 pi)` among
//! eigenphases, excluding the trivial patterns `k = l, m = n` and
//! `k = n, l = m`.
//!
//! A resonance is the same thing as two different unordered index pairs
//! `{k, m} != {l, n}` with equal phase sums, so the exhaustive search sorts
//! the `d (d + 1) / 2` pair sums on the circle and sweeps for neighbours
//! closer than the tolerance. Above [`EXHAUSTIVE_MAX_DIM`] the default check
//! draws `budget` random quadruples instead and the report says so: with
//! `~d^2/2` pair sums on the circle, accidental coincidences closer than
//! `tol` become expected once `d^4 tol / (8 pi)` approaches one (about 1.7 at
//! `d = 256`, `tol = 1e-8`), so an exhaustive scan there mostly reports
//! chance near-coincidences rather than commensurability.

use std::f64::consts::TAU;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::ensembles::RngStream;

pub const DEFAULT_TOLERANCE: f64 = 1e-8;
pub const DEFAULT_BUDGET: u64 = 10_000_000;
/// Largest dimension scanned exhaustively by [`commensurability_check`].
pub const EXHAUSTIVE_MAX_DIM: usize = 64;

/// Resonances listed in a report beyond this count are only counted.
pub const MAX_LISTED: usize = 64;

const SAMPLING_SEED: u64 = 0x5eed_c0de;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Resonance {
    pub k: usize,
    pub l: usize,
    pub m: usize,
    pub n: usize,
    /// `|phi_k - phi_l + phi_m - phi_n|` reduced to `[0, pi]`.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommensurabilityReport {
    pub dim: usize,
    pub tolerance: f64,
    /// True when every quadruple was covered.
    pub exhaustive: bool,
    /// Pair sums compared (exhaustive) or quadruples drawn (sampled).
    pub candidates_examined: u64,
    /// Resonant pair-of-pairs (exhaustive) or resonant draws (sampled).
    pub violations_found: u64,
    pub violations: Vec<Resonance>,
    /// Smallest distance on the circle between sums of two different pairs
    /// (exhaustive mode only); a near-resonance diagnostic.
    pub min_nontrivial_gap: Option<f64>,
}

impl CommensurabilityReport {
    /// No resonance within the searched set. Not a proof when sampled.
    pub fn passed(&self) -> bool {
        self.violations_found == 0
    }
}

fn circle_distance(x: f64) -> f64 {
    let r = x.rem_euclid(TAU);
    r.min(TAU - r)
}

/// Exhaustive for `d <= EXHAUSTIVE_MAX_DIM`, `budget` sampled quadruples above.
pub fn commensurability_check(phases: &[f64], tol: f64, budget: u64) -> CommensurabilityReport {
    if phases.len() <= EXHAUSTIVE_MAX_DIM {
        exhaustive_check(phases, tol)
    } else {
        sampled(phases, tol, budget)
    }
}

/// Scans every quadruple, at `O(d^2 log d)` cost.
pub fn exhaustive_check(phases: &[f64], tol: f64) -> CommensurabilityReport {
    let d = phases.len();
    let mut sums: Vec<(f64, u32, u32)> = Vec::with_capacity(d * (d + 1) / 2);
    for k in 0..d {
        for m in k..d {
            sums.push(((phases[k] + phases[m]).rem_euclid(TAU), k as u32, m as u32));
        }
    }
    sums.sort_by(|a, b| a.0.total_cmp(&b.0));
    let n = sums.len();

    let mut violations = Vec::new();
    let mut found = 0u64;
    let mut record = |a: &(f64, u32, u32), b: &(f64, u32, u32)| {
        found += 1;
        if violations.len() < MAX_LISTED {
            let (k, m, l, nn) = (a.1 as usize, a.2 as usize, b.1 as usize, b.2 as usize);
            violations.push(Resonance {
                k,
                l,
                m,
                n: nn,
                residual: circle_distance(phases[k] - phases[l] + phases[m] - phases[nn]),
            });
        }
    };

    let mut min_gap: Option<f64> = None;
    for i in 0..n {
        let mut j = i + 1;
        while j < n && sums[j].0 - sums[i].0 < tol {
            record(&sums[i], &sums[j]);
            j += 1;
        }
        if i + 1 < n {
            let gap = sums[i + 1].0 - sums[i].0;
            min_gap = Some(min_gap.map_or(gap, |g: f64| g.min(gap)));
        }
    }
    // matches across the 2 pi seam
    if n > 1 {
        let wrap = sums[0].0 + TAU - sums[n - 1].0;
        min_gap = Some(min_gap.map_or(wrap, |g| g.min(wrap)));
        for lo in 0..n {
            if sums[lo].0 >= tol {
                break;
            }
            for hi in (lo + 1..n).rev() {
                if sums[lo].0 + TAU - sums[hi].0 >= tol {
                    break;
                }
                record(&sums[lo], &sums[hi]);
            }
        }
    }

    CommensurabilityReport {
        dim: d,
        tolerance: tol,
        exhaustive: true,
        candidates_examined: n as u64,
        violations_found: found,
        violations,
        min_nontrivial_gap: min_gap,
    }
}

fn sampled(phases: &[f64], tol: f64, budget: u64) -> CommensurabilityReport {
    let d = phases.len();
    let mut rng = RngStream::new(SAMPLING_SEED, d as u64).rng();
    let mut violations = Vec::new();
    let mut found = 0u64;
    for _ in 0..budget {
        let (k, l, m, n) =
            (rng.random_range(0..d), rng.random_range(0..d), rng.random_range(0..d), rng.random_range(0..d));
        if (k == l && m == n) || (k == n && l == m) {
            continue;
        }
        let residual = circle_distance(phases[k] - phases[l] + phases[m] - phases[n]);
        if residual < tol {
            found += 1;
            if violations.len() < MAX_LISTED {
                violations.push(Resonance { k, l, m, n, residual });
            }
        }
    }
    CommensurabilityReport {
        dim: d,
        tolerance: tol,
        exhaustive: false,
        candidates_examined: budget,
        violations_found: found,
        violations,
        min_nontrivial_gap: None,
    }
}
