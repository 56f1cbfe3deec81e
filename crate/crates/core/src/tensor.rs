//! Dense complex linear algebra.
//!
//! Matrices are stored row-major. Tensor products follow the convention that
//! the left factor is the most significant one: for a [`Bipartition`]
//! `(d_a, d_b)` the basis state `|j_a> (x) |j_b>` has index `j_a * d_b + j_b`.

use std::fmt;
use std::ops::{Index, IndexMut};
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{BakerError, Result};

/// Tolerance of the unitarity gate, `max |U U^dag - I| < EPS_UNITARY`.
pub const EPS_UNITARY: f64 = 1e-10;
/// Tolerance on state normalization and trace preservation.
pub const EPS_NORM: f64 = 1e-10;
/// Base tolerance of eigenpair residuals (scaled by `sqrt(d)`).
pub const EPS_EIGEN: f64 = 1e-8;

const C0: Complex64 = Complex64::new(0.0, 0.0);
const C1: Complex64 = Complex64::new(1.0, 0.0);

// below this many multiply-adds a product is not worth splitting across threads
const PAR_THRESHOLD: usize = 1 << 18;

#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(BakerError::InvalidDimension(format!("matrix dimensions must be positive, got {rows}x{cols}")));
        }
        if entries.len() != rows * cols {
            return Err(BakerError::DimensionMismatch(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                entries.len()
            )));
        }
        Ok(ComplexMatrix { rows, cols, data: entries })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        ComplexMatrix { rows, cols, data: vec![C0; rows * cols] }
    }

    pub fn identity(d: usize) -> Self {
        Self::from_fn(d, d, |r, c| if r == c { C1 } else { C0 })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        ComplexMatrix { rows, cols, data }
    }

    pub fn from_diagonal(diag: &[Complex64]) -> Self {
        let d = diag.len();
        Self::from_fn(d, d, |r, c| if r == c { diag[r] } else { C0 })
    }

    /// Real permutation matrix with `P |j> = |perm[j]>`.
    pub fn permutation(perm: &[usize]) -> Result<Self> {
        let d = perm.len();
        let mut seen = vec![false; d];
        for &p in perm {
            if p >= d || std::mem::replace(&mut seen[p], true) {
                return Err(BakerError::InvalidArgument("not a permutation".into()));
            }
        }
        let mut m = Self::zeros(d, d);
        for (j, &p) in perm.iter().enumerate() {
            m[(p, j)] = C1;
        }
        Ok(m)
    }

    /// `blockdiag(a, b)`.
    pub fn block_diag(a: &ComplexMatrix, b: &ComplexMatrix) -> Self {
        let rows = a.rows + b.rows;
        let cols = a.cols + b.cols;
        let mut m = Self::zeros(rows, cols);
        for r in 0..a.rows {
            m.row_mut(r)[..a.cols].copy_from_slice(a.row(r));
        }
        for r in 0..b.rows {
            m.row_mut(a.rows + r)[a.cols..].copy_from_slice(b.row(r));
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Row-major entries.
    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    pub fn into_entries(self) -> Vec<Complex64> {
        self.data
    }

    pub fn row(&self, r: usize) -> &[Complex64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    fn row_mut(&mut self, r: usize) -> &mut [Complex64] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<Complex64> {
        (0..self.rows).map(|r| self[(r, c)]).collect()
    }

    /// Copy of the `rows x cols` block whose top-left corner is `(r0, c0)`.
    pub fn submatrix(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Self {
        assert!(r0 + rows <= self.rows && c0 + cols <= self.cols, "block out of range");
        Self::from_fn(rows, cols, |r, c| self[(r0 + r, c0 + c)])
    }

    pub fn matmul(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        if self.cols != other.rows {
            return Err(BakerError::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let (n, m) = (self.cols, other.cols);
        let mut out = vec![C0; self.rows * m];
        let kernel = |(r, out_row): (usize, &mut [Complex64])| {
            for (k, &a) in self.row(r).iter().enumerate() {
                if a == C0 {
                    continue;
                }
                for (o, &b) in out_row.iter_mut().zip(other.row(k)) {
                    *o += a * b;
                }
            }
        };
        if self.rows * n * m >= PAR_THRESHOLD {
            out.par_chunks_mut(m).enumerate().for_each(kernel);
        } else {
            out.chunks_mut(m).enumerate().for_each(kernel);
        }
        Ok(ComplexMatrix { rows: self.rows, cols: m, data: out })
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> ComplexMatrix {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn transpose(&self) -> ComplexMatrix {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)])
    }

    /// Entrywise complex conjugate.
    pub fn conj(&self) -> ComplexMatrix {
        ComplexMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z.conj()).collect() }
    }

    pub fn scale(&self, s: Complex64) -> ComplexMatrix {
        ComplexMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z * s).collect() }
    }

    pub fn add(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.check_same_shape(other)?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Ok(ComplexMatrix { rows: self.rows, cols: self.cols, data })
    }

    pub fn sub(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.check_same_shape(other)?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Ok(ComplexMatrix { rows: self.rows, cols: self.cols, data })
    }

    /// Kronecker product; `self` is the most significant factor.
    pub fn kron(&self, other: &ComplexMatrix) -> ComplexMatrix {
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        let mut data = vec![C0; rows * cols];
        for ra in 0..self.rows {
            for rb in 0..other.rows {
                let out_row = &mut data[(ra * other.rows + rb) * cols..][..cols];
                for (ca, &a) in self.row(ra).iter().enumerate() {
                    let dst = &mut out_row[ca * other.cols..(ca + 1) * other.cols];
                    for (o, &b) in dst.iter_mut().zip(other.row(rb)) {
                        *o = a * b;
                    }
                }
            }
        }
        ComplexMatrix { rows, cols, data }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|k| self[(k, k)]).sum()
    }

    /// Largest entrywise modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `max |self - other|` over entries.
    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> Result<f64> {
        self.check_same_shape(other)?;
        Ok(self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max))
    }

    /// `max |U U^dag - I|`; infinite for non-square input.
    pub fn unitarity_residual(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let d = self.rows;
        let mut worst = 0.0f64;
        for r in 0..d {
            let row_r = self.row(r);
            for c in 0..d {
                let dot: Complex64 = row_r.iter().zip(self.row(c)).map(|(a, b)| a * b.conj()).sum();
                let target = if r == c { C1 } else { C0 };
                worst = worst.max((dot - target).norm());
            }
        }
        worst
    }

    pub fn is_unitary(&self) -> bool {
        self.unitarity_residual() < EPS_UNITARY
    }

    /// Fails with [`BakerError::NotUnitary`] unless the unitarity gate passes.
    pub fn ensure_unitary(&self) -> Result<()> {
        let residual = self.unitarity_residual();
        if residual < EPS_UNITARY {
            Ok(())
        } else {
            Err(BakerError::NotUnitary { residual })
        }
    }

    /// `self * psi`, written into `out`.
    pub fn apply_into(&self, psi: &[Complex64], out: &mut [Complex64]) {
        assert_eq!(psi.len(), self.cols);
        assert_eq!(out.len(), self.rows);
        for (o, row) in out.iter_mut().zip(self.data.chunks_exact(self.cols)) {
            *o = row.iter().zip(psi).map(|(a, b)| a * b).sum();
        }
    }

    pub fn apply(&self, psi: &StateVector) -> Result<StateVector> {
        if psi.dim() != self.cols || !self.is_square() {
            return Err(BakerError::DimensionMismatch(format!(
                "cannot apply {}x{} matrix to a state of dimension {}",
                self.rows,
                self.cols,
                psi.dim()
            )));
        }
        let mut out = vec![C0; self.rows];
        self.apply_into(psi.amplitudes(), &mut out);
        Ok(StateVector { amps: out })
    }

    fn check_same_shape(&self, other: &ComplexMatrix) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(BakerError::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&CMatrixJson::from(self)).expect("matrix serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: CMatrixJson = serde_json::from_str(text).map_err(|e| BakerError::Format(e.to_string()))?;
        raw.try_into()
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        debug_assert!(r < self.rows && c < self.cols);
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex64 {
        debug_assert!(r < self.rows && c < self.cols);
        &mut self.data[r * self.cols + c]
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows.min(8) {
            write!(f, "  ")?;
            for z in self.row(r).iter().take(8) {
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// On-disk "cmatrix-json" layout: flat row-major `[re, im]` pairs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CMatrixJson {
    pub dim_rows: usize,
    pub dim_cols: usize,
    pub entries: Vec<[f64; 2]>,
}

impl From<&ComplexMatrix> for CMatrixJson {
    fn from(m: &ComplexMatrix) -> Self {
        CMatrixJson { dim_rows: m.rows, dim_cols: m.cols, entries: m.data.iter().map(|z| [z.re, z.im]).collect() }
    }
}

impl TryFrom<CMatrixJson> for ComplexMatrix {
    type Error = BakerError;
    fn try_from(raw: CMatrixJson) -> Result<Self> {
        let entries = raw.entries.iter().map(|&[re, im]| Complex64::new(re, im)).collect();
        ComplexMatrix::new(raw.dim_rows, raw.dim_cols, entries).map_err(|e| BakerError::Format(e.to_string()))
    }
}

pub fn matmul(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    a.matmul(b)
}

pub fn dagger(a: &ComplexMatrix) -> ComplexMatrix {
    a.dagger()
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kron(b)
}

/// Normalized pure state in the computational basis.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amps: Vec<Complex64>,
}

impl StateVector {
    /// Wraps `amps`, which must already have unit norm within [`EPS_NORM`].
    pub fn new(amps: Vec<Complex64>) -> Result<Self> {
        if amps.is_empty() {
            return Err(BakerError::InvalidDimension("empty state".into()));
        }
        let norm2: f64 = amps.iter().map(|z| z.norm_sqr()).sum();
        if (norm2 - 1.0).abs() > EPS_NORM {
            return Err(BakerError::InvalidArgument(format!("state is not normalized: |psi|^2 = {norm2}")));
        }
        Ok(StateVector { amps })
    }

    /// Rescales `amps` to unit norm.
    pub fn normalized(mut amps: Vec<Complex64>) -> Result<Self> {
        let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if amps.is_empty() || norm == 0.0 || !norm.is_finite() {
            return Err(BakerError::InvalidArgument("cannot normalize a zero vector".into()));
        }
        amps.iter_mut().for_each(|z| *z /= norm);
        Ok(StateVector { amps })
    }

    /// `|k>` in dimension `d`.
    pub fn basis(d: usize, k: usize) -> Self {
        assert!(k < d);
        let mut amps = vec![C0; d];
        amps[k] = C1;
        StateVector { amps }
    }

    pub(crate) fn from_raw(amps: Vec<Complex64>) -> Self {
        StateVector { amps }
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn kron(&self, other: &StateVector) -> StateVector {
        let mut amps = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amps {
            amps.extend(other.amps.iter().map(|b| a * b));
        }
        StateVector { amps }
    }

    /// `|psi><psi|`.
    pub fn projector(&self) -> ComplexMatrix {
        let d = self.dim();
        ComplexMatrix::from_fn(d, d, |r, c| self.amps[r] * self.amps[c].conj())
    }
}

/// Which factor of a [`Bipartition`] to keep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

/// Split of a `d = d_a * d_b` space into `H_A (x) H_B`, A most significant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Bipartition {
    d_a: usize,
    d_b: usize,
}

impl Bipartition {
    pub fn new(d_a: usize, d_b: usize) -> Result<Self> {
        if d_a < 2 || d_b < 2 {
            return Err(BakerError::InvalidDimension(format!(
                "both factors of a bipartition must be at least 2, got {d_a}x{d_b}"
            )));
        }
        Ok(Bipartition { d_a, d_b })
    }

    pub fn d_a(&self) -> usize {
        self.d_a
    }

    pub fn d_b(&self) -> usize {
        self.d_b
    }

    pub fn dim(&self) -> usize {
        self.d_a * self.d_b
    }

    /// `(d_a + 1)(d_b + 1)`.
    pub fn d_prime(&self) -> usize {
        (self.d_a + 1) * (self.d_b + 1)
    }

    pub fn factor_dim(&self, which: Subsystem) -> usize {
        match which {
            Subsystem::A => self.d_a,
            Subsystem::B => self.d_b,
        }
    }

    /// Largest linear entropy a state can reach on this split.
    pub fn max_linear_entropy(&self) -> f64 {
        1.0 - 1.0 / self.d_a.min(self.d_b) as f64
    }

    pub fn swapped(&self) -> Bipartition {
        Bipartition { d_a: self.d_b, d_b: self.d_a }
    }

    pub fn index(&self, j_a: usize, j_b: usize) -> usize {
        j_a * self.d_b + j_b
    }

    /// Maps index `j_a * d_b + j_b` to `j_b * d_a + j_a`, i.e. the relabeling
    /// that exchanges the roles of the two factors.
    pub fn swap_permutation(&self) -> Vec<usize> {
        (0..self.dim())
            .map(|j| {
                let (j_a, j_b) = (j / self.d_b, j % self.d_b);
                j_b * self.d_a + j_a
            })
            .collect()
    }

    pub fn swap_state(&self, psi: &StateVector) -> StateVector {
        let perm = self.swap_permutation();
        let mut amps = vec![C0; psi.dim()];
        for (j, &p) in perm.iter().enumerate() {
            amps[p] = psi.amps[j];
        }
        StateVector { amps }
    }

    fn check_dim(&self, d: usize) -> Result<()> {
        if d != self.dim() {
            return Err(BakerError::DimensionMismatch(format!("dimension {d} does not match split {self}")));
        }
        Ok(())
    }
}

impl fmt::Display for Bipartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.d_a, self.d_b)
    }
}

impl FromStr for Bipartition {
    type Err = BakerError;
    fn from_str(s: &str) -> Result<Self> {
        let (a, b) = s
            .split_once(['x', 'X'])
            .ok_or_else(|| BakerError::InvalidArgument(format!("split must look like AxB, got {s:?}")))?;
        let parse = |t: &str| {
            t.trim().parse::<usize>().map_err(|_| BakerError::InvalidArgument(format!("bad split factor {t:?}")))
        };
        Bipartition::new(parse(a)?, parse(b)?)
    }
}

/// Partial trace of a `d x d` operator (not necessarily Hermitian).
pub fn partial_trace(rho: &ComplexMatrix, part: Bipartition, keep: Subsystem) -> Result<ComplexMatrix> {
    if !rho.is_square() {
        return Err(BakerError::DimensionMismatch("partial trace needs a square matrix".into()));
    }
    part.check_dim(rho.rows())?;
    let (da, db) = (part.d_a, part.d_b);
    Ok(match keep {
        Subsystem::A => ComplexMatrix::from_fn(da, da, |a, a2| (0..db).map(|b| rho[(a * db + b, a2 * db + b)]).sum()),
        Subsystem::B => ComplexMatrix::from_fn(db, db, |b, b2| (0..da).map(|a| rho[(a * db + b, a * db + b2)]).sum()),
    })
}

/// `tr_other |left><right|` computed directly from the two vectors.
///
/// With `left == right` this is the reduced density matrix of a pure state.
pub(crate) fn reduced_outer(
    left: &[Complex64],
    right: &[Complex64],
    part: Bipartition,
    keep: Subsystem,
) -> ComplexMatrix {
    let (da, db) = (part.d_a, part.d_b);
    match keep {
        Subsystem::A => ComplexMatrix::from_fn(da, da, |a, a2| {
            let l = &left[a * db..(a + 1) * db];
            let r = &right[a2 * db..(a2 + 1) * db];
            l.iter().zip(r).map(|(x, y)| x * y.conj()).sum()
        }),
        Subsystem::B => {
            ComplexMatrix::from_fn(db, db, |b, b2| (0..da).map(|a| left[a * db + b] * right[a * db + b2].conj()).sum())
        }
    }
}

/// Reduced density matrix of a pure state.
pub fn reduced_density(psi: &StateVector, part: Bipartition, keep: Subsystem) -> Result<ComplexMatrix> {
    part.check_dim(psi.dim())?;
    Ok(reduced_outer(&psi.amps, &psi.amps, part, keep))
}

/// `tr_B |left><right|` (or `tr_A`), the reduced operator of an outer product.
pub fn reduced_operator(
    left: &StateVector,
    right: &StateVector,
    part: Bipartition,
    keep: Subsystem,
) -> Result<ComplexMatrix> {
    part.check_dim(left.dim())?;
    part.check_dim(right.dim())?;
    Ok(reduced_outer(&left.amps, &right.amps, part, keep))
}

/// `tr(rho^2)` of the smaller reduced density matrix of `amps`.
pub(crate) fn purity_of(amps: &[Complex64], part: Bipartition) -> f64 {
    let (da, db) = (part.d_a, part.d_b);
    let mut diag = 0.0;
    let mut off = 0.0;
    if da <= db {
        // rho_A[a, a2] = <row a2 | row a> over the B index
        for a in 0..da {
            let ra = &amps[a * db..(a + 1) * db];
            diag += ra.iter().map(|z| z.norm_sqr()).sum::<f64>().powi(2);
            for a2 in a + 1..da {
                let rb = &amps[a2 * db..(a2 + 1) * db];
                let g: Complex64 = ra.iter().zip(rb).map(|(x, y)| x * y.conj()).sum();
                off += g.norm_sqr();
            }
        }
    } else {
        for b in 0..db {
            let nb: f64 = (0..da).map(|a| amps[a * db + b].norm_sqr()).sum();
            diag += nb * nb;
            for b2 in b + 1..db {
                let g: Complex64 = (0..da).map(|a| amps[a * db + b] * amps[a * db + b2].conj()).sum();
                off += g.norm_sqr();
            }
        }
    }
    diag + 2.0 * off
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn pauli_x() -> ComplexMatrix {
        ComplexMatrix::permutation(&[1, 0]).unwrap()
    }

    fn random_matrix(rows: usize, cols: usize, rng: &mut impl Rng) -> ComplexMatrix {
        ComplexMatrix::from_fn(rows, cols, |_, _| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
    }

    fn random_state(d: usize, rng: &mut impl Rng) -> StateVector {
        StateVector::normalized((0..d).map(|_| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect())
            .unwrap()
    }

    #[test]
    fn identity_and_involution_products() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(i2.matmul(&i2).unwrap(), i2);
        assert_eq!(pauli_x().matmul(&pauli_x()).unwrap(), i2);
    }

    #[test]
    fn matmul_matches_triple_loop() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let a = random_matrix(3, 3, &mut rng);
        let b = random_matrix(3, 3, &mut rng);
        let got = a.matmul(&b).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let mut acc = C0;
                for k in 0..3 {
                    acc += a[(i, k)] * b[(k, j)];
                }
                assert_abs_diff_eq!(got[(i, j)].re, acc.re, epsilon = 1e-14);
                assert_abs_diff_eq!(got[(i, j)].im, acc.im, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn matmul_rejects_bad_shapes() {
        let a = ComplexMatrix::zeros(2, 3);
        assert!(matches!(a.matmul(&a), Err(BakerError::DimensionMismatch(_))));
    }

    #[test]
    fn dagger_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(ComplexMatrix::identity(3).dagger(), ComplexMatrix::identity(3));
        let a = random_matrix(3, 4, &mut rng);
        assert_eq!(a.dagger().dagger(), a);
        let theta = [0.3, -1.2, 2.0];
        let d = ComplexMatrix::from_diagonal(&theta.map(|t| Complex64::from_polar(1.0, t)));
        let expect = ComplexMatrix::from_diagonal(&theta.map(|t| Complex64::from_polar(1.0, -t)));
        assert!(d.dagger().max_abs_diff(&expect).unwrap() < 1e-15);
    }

    #[test]
    fn kron_cases() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(i2.kron(&i2), ComplexMatrix::identity(4));

        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let psi = random_state(2, &mut rng);
        let input = StateVector::basis(2, 0).kron(&psi);
        let out = pauli_x().kron(&i2).apply(&input).unwrap();
        let expect = StateVector::basis(2, 1).kron(&psi);
        assert_eq!(out, expect);

        let a = random_matrix(2, 2, &mut rng);
        let b = random_matrix(2, 2, &mut rng);
        let k = a.kron(&b);
        for ja in 0..2 {
            for jb in 0..2 {
                for ka in 0..2 {
                    for kb in 0..2 {
                        assert_eq!(k[(ja * 2 + jb, ka * 2 + kb)], a[(ja, ka)] * b[(jb, kb)]);
                    }
                }
            }
        }
    }

    #[test]
    fn partial_trace_cases() {
        let part = Bipartition::new(2, 2).unwrap();
        let rho = StateVector::basis(4, 0).projector();
        let out = partial_trace(&rho, part, Subsystem::A).unwrap();
        assert_eq!(out, StateVector::basis(2, 0).projector());

        let s = std::f64::consts::FRAC_1_SQRT_2;
        let bell = StateVector::new(vec![c(s, 0.0), C0, C0, c(s, 0.0)]).unwrap();
        let out = partial_trace(&bell.projector(), part, Subsystem::A).unwrap();
        assert!(out.max_abs_diff(&ComplexMatrix::identity(2).scale(c(0.5, 0.0))).unwrap() < 1e-15);
    }

    #[test]
    fn partial_trace_matches_index_sum_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let part = Bipartition::new(2, 3).unwrap();
        let rho = random_matrix(6, 6, &mut rng);
        let got_a = partial_trace(&rho, part, Subsystem::A).unwrap();
        let got_b = partial_trace(&rho, part, Subsystem::B).unwrap();
        // explicit sum over (j_a, j_b) index pairs
        let mut want_a = ComplexMatrix::zeros(2, 2);
        let mut want_b = ComplexMatrix::zeros(3, 3);
        for r in 0..6 {
            for cc in 0..6 {
                let (ra, rb) = (r / 3, r % 3);
                let (ca, cb) = (cc / 3, cc % 3);
                if rb == cb {
                    want_a[(ra, ca)] += rho[(r, cc)];
                }
                if ra == ca {
                    want_b[(rb, cb)] += rho[(r, cc)];
                }
            }
        }
        assert!(got_a.max_abs_diff(&want_a).unwrap() < 1e-15);
        assert!(got_b.max_abs_diff(&want_b).unwrap() < 1e-15);
    }

    #[test]
    fn partial_trace_rejects_mismatch() {
        let part = Bipartition::new(2, 3).unwrap();
        assert!(partial_trace(&ComplexMatrix::identity(4), part, Subsystem::A).is_err());
    }

    #[test]
    fn bipartition_guards_and_parsing() {
        assert!(Bipartition::new(1, 4).is_err());
        let p: Bipartition = "14x17".parse().unwrap();
        assert_eq!((p.d_a(), p.d_b(), p.dim(), p.d_prime()), (14, 17, 238, 270));
        assert!("16".parse::<Bipartition>().is_err());
        assert!("ax2".parse::<Bipartition>().is_err());
    }

    #[test]
    fn reduced_density_agrees_with_partial_trace() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let part = Bipartition::new(3, 4).unwrap();
        let psi = random_state(12, &mut rng);
        for keep in [Subsystem::A, Subsystem::B] {
            let direct = reduced_density(&psi, part, keep).unwrap();
            let via_rho = partial_trace(&psi.projector(), part, keep).unwrap();
            assert!(direct.max_abs_diff(&via_rho).unwrap() < 1e-15);
        }
    }

    #[test]
    fn json_round_trip_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let m = random_matrix(3, 2, &mut rng);
        let back = ComplexMatrix::from_json(&m.to_json()).unwrap();
        assert_eq!(back, m);
        assert!(ComplexMatrix::from_json(r#"{"dim_rows":2,"dim_cols":2,"entries":[[1,0]]}"#).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = ComplexMatrix> {
            prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), rows * cols).prop_map(move |v| {
                ComplexMatrix::new(rows, cols, v.into_iter().map(|(a, b)| c(a, b)).collect()).unwrap()
            })
        }

        fn state(d: usize) -> impl Strategy<Value = StateVector> {
            prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), d).prop_filter_map("nonzero", |v| {
                StateVector::normalized(v.into_iter().map(|(a, b)| c(a, b)).collect()).ok()
            })
        }

        proptest! {
            #[test]
            fn kron_is_associative(a in matrix(2, 2), b in matrix(3, 2), cc in matrix(2, 3)) {
                let left = a.kron(&b).kron(&cc);
                let right = a.kron(&b.kron(&cc));
                prop_assert!(left.max_abs_diff(&right).unwrap() < 1e-14);
            }

            #[test]
            fn partial_trace_of_product_is_factor(pa in state(3), pb in state(4)) {
                let part = Bipartition::new(3, 4).unwrap();
                let rho = pa.projector().kron(&pb.projector());
                let got = partial_trace(&rho, part, Subsystem::A).unwrap();
                prop_assert!(got.max_abs_diff(&pa.projector()).unwrap() < 1e-14);
            }

            #[test]
            fn partial_trace_preserves_trace(rho in matrix(6, 6)) {
                let part = Bipartition::new(3, 2).unwrap();
                for keep in [Subsystem::A, Subsystem::B] {
                    let t = partial_trace(&rho, part, keep).unwrap().trace();
                    prop_assert!((t - rho.trace()).norm() < 1e-12);
                }
            }
        }
    }
}
