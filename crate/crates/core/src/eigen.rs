//! Eigendecomposition of unitary matrices.
//!
//! A unitary matrix is normal, so its complex Schur form is diagonal and the
//! Schur vectors are an orthonormal eigenbasis. The raw solve is followed by a
//! polishing pass that re-orthonormalizes vectors inside clusters of nearly
//! equal phases.

use std::f64::consts::TAU;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{BakerError, Result};
use crate::tensor::{ComplexMatrix, StateVector, EPS_EIGEN};

/// Phases closer than this are treated as one cluster during polishing.
pub const CLUSTER_GAP: f64 = 1e-8;

const SCHUR_MAX_ITER: usize = 0; // 0 lets nalgebra iterate until convergence

/// Eigenphases in `[0, 2pi)`, ascending, with paired orthonormal eigenvectors.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    phases: Vec<f64>,
    vectors: Vec<StateVector>,
    diagnostics: EigenDiagnostics,
}

/// Residuals measured after polishing.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct EigenDiagnostics {
    /// `max_k |U e_k - exp(i phi_k) e_k|_2`
    pub max_residual: f64,
    /// `max_{j != k} |<e_j|e_k>|`, together with `max_k | |e_k| - 1 |`
    pub max_overlap: f64,
}

impl EigenSystem {
    pub fn dim(&self) -> usize {
        self.phases.len()
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    pub fn vectors(&self) -> &[StateVector] {
        &self.vectors
    }

    pub fn diagnostics(&self) -> EigenDiagnostics {
        self.diagnostics
    }

    /// `sum_k exp(i phi_k) |e_k><e_k|`
    pub fn reconstruct(&self) -> ComplexMatrix {
        let d = self.dim();
        let mut m = ComplexMatrix::zeros(d, d);
        for (phi, v) in self.phases.iter().zip(&self.vectors) {
            let lam = Complex64::from_polar(1.0, *phi);
            let a = v.amplitudes();
            for r in 0..d {
                let lr = lam * a[r];
                for c in 0..d {
                    m[(r, c)] += lr * a[c].conj();
                }
            }
        }
        m
    }
}

/// Eigenphases and eigenvectors of a unitary matrix.
///
/// Rejects non-unitary input. Fails explicitly if the Schur iteration does not
/// converge or if the polished pairs miss the residual/orthonormality gates.
pub fn eigensystem(u: &ComplexMatrix) -> Result<EigenSystem> {
    u.ensure_unitary()?;
    let d = u.rows();
    let m = DMatrix::from_row_slice(d, d, u.entries());
    let schur = nalgebra::linalg::Schur::try_new(m, f64::EPSILON, SCHUR_MAX_ITER)
        .ok_or_else(|| BakerError::EigenSolver("Schur iteration did not converge".into()))?;
    let (q, t) = schur.unpack();

    let mut pairs: Vec<(f64, Vec<Complex64>)> = (0..d)
        .map(|k| {
            let phase = wrap_phase(t[(k, k)].arg());
            (phase, q.column(k).iter().copied().collect())
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));

    let (phases, mut vecs): (Vec<f64>, Vec<Vec<Complex64>>) = pairs.into_iter().unzip();
    for cluster in phase_clusters(&phases) {
        orthonormalize(&mut vecs, &cluster);
    }

    let vectors: Vec<StateVector> = vecs.into_iter().map(StateVector::from_raw).collect();
    let diagnostics = measure(u, &phases, &vectors);
    let tol = EPS_EIGEN * (d as f64).sqrt();
    let ok = diagnostics.max_residual < tol && diagnostics.max_overlap < EPS_EIGEN;
    if !ok {
        return Err(BakerError::EigenSolver(format!(
            "eigenpairs failed verification: residual {:e}, overlap {:e}",
            diagnostics.max_residual, diagnostics.max_overlap
        )));
    }
    Ok(EigenSystem { phases, vectors, diagnostics })
}

fn wrap_phase(phi: f64) -> f64 {
    let p = phi.rem_euclid(TAU);
    if p >= TAU {
        0.0
    } else {
        p
    }
}

/// Index groups of sorted phases whose neighbours lie within [`CLUSTER_GAP`],
/// including the wrap from the top of the circle back to zero.
fn phase_clusters(phases: &[f64]) -> Vec<Vec<usize>> {
    let n = phases.len();
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for k in 0..n {
        match clusters.last_mut() {
            Some(last) if phases[k] - phases[k - 1] < CLUSTER_GAP => last.push(k),
            _ => clusters.push(vec![k]),
        }
    }
    if clusters.len() > 1 && phases[0] + TAU - phases[n - 1] < CLUSTER_GAP {
        let first = clusters.remove(0);
        clusters.last_mut().unwrap().extend(first);
    }
    clusters.retain(|c| c.len() > 1);
    clusters
}

/// Modified Gram-Schmidt, applied twice, over the listed vectors.
fn orthonormalize(vecs: &mut [Vec<Complex64>], idx: &[usize]) {
    for _ in 0..2 {
        for (pos, &k) in idx.iter().enumerate() {
            for &j in &idx[..pos] {
                let proj: Complex64 = vecs[j].iter().zip(&vecs[k]).map(|(a, b)| a.conj() * b).sum();
                let (head, tail) = if j < k {
                    let (h, t) = vecs.split_at_mut(k);
                    (&h[j], &mut t[0])
                } else {
                    let (h, t) = vecs.split_at_mut(j);
                    (&t[0], &mut h[k])
                };
                for (x, y) in tail.iter_mut().zip(head) {
                    *x -= proj * y;
                }
            }
            let norm = vecs[k].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            vecs[k].iter_mut().for_each(|z| *z /= norm);
        }
    }
}

fn measure(u: &ComplexMatrix, phases: &[f64], vectors: &[StateVector]) -> EigenDiagnostics {
    let d = u.rows();
    let mut buf = vec![Complex64::new(0.0, 0.0); d];
    let mut max_residual = 0.0f64;
    for (phi, v) in phases.iter().zip(vectors) {
        u.apply_into(v.amplitudes(), &mut buf);
        let lam = Complex64::from_polar(1.0, *phi);
        let r: f64 = buf.iter().zip(v.amplitudes()).map(|(x, y)| (x - lam * y).norm_sqr()).sum::<f64>().sqrt();
        max_residual = max_residual.max(r);
    }
    let mut max_overlap = 0.0f64;
    for j in 0..d {
        max_overlap = max_overlap.max((vectors[j].norm_sqr().sqrt() - 1.0).abs());
        for k in j + 1..d {
            max_overlap = max_overlap.max(vectors[j].inner(&vectors[k]).norm());
        }
    }
    EigenDiagnostics { max_residual, max_overlap }
}
