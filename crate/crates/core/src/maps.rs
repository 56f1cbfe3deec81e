//! Quantum baker map and its relatives.
//!
//! All constructors use the antiperiodic Fourier kernel
//! `G_d[j, k] = exp(+2 pi i (j + 1/2)(k + 1/2) / d) / sqrt(d)`, which commutes
//! with the reflection `R_d |j> = |d - 1 - j>`. Two-block operators such as
//! `|0><0| (x) X + |1><1| (x) Y` act on the most significant two-level factor,
//! so in matrix form they are `blockdiag(X, Y)`.

use std::f64::consts::{FRAC_1_SQRT_2, TAU};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{BakerError, Result};
use crate::tensor::{ComplexMatrix, EPS_UNITARY};

/// Off-diagonal tolerance for the parity block reduction.
pub const EPS_BLOCK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MapKind {
    Baker,
    DMap,
    DPrimeMap,
    BBar,
    Reflection,
    AntiperiodicFourier,
    LambdaBasisChange,
}

impl MapKind {
    pub const ALL: [MapKind; 7] = [
        MapKind::Baker,
        MapKind::DMap,
        MapKind::DPrimeMap,
        MapKind::BBar,
        MapKind::Reflection,
        MapKind::AntiperiodicFourier,
        MapKind::LambdaBasisChange,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MapKind::Baker => "baker",
            MapKind::DMap => "dmap",
            MapKind::DPrimeMap => "dprime",
            MapKind::BBar => "bbar",
            MapKind::Reflection => "reflection",
            MapKind::AntiperiodicFourier => "fourier",
            MapKind::LambdaBasisChange => "lambda",
        }
    }

    pub fn requires_even_dimension(self) -> bool {
        matches!(self, MapKind::Baker | MapKind::DMap | MapKind::DPrimeMap | MapKind::BBar | MapKind::LambdaBasisChange)
    }

    pub fn build(self, d: usize) -> Result<ComplexMatrix> {
        match self {
            MapKind::Baker => baker(d),
            MapKind::DMap => d_map(d, Sign::Plus),
            MapKind::DPrimeMap => d_map(d, Sign::Minus),
            MapKind::BBar => bbar(d),
            MapKind::Reflection => reflection(d),
            MapKind::AntiperiodicFourier => antiperiodic_fourier(d),
            MapKind::LambdaBasisChange => lambda_basis(d),
        }
    }
}

impl fmt::Display for MapKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Serialize for MapKind {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for MapKind {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl FromStr for MapKind {
    type Err = BakerError;
    fn from_str(s: &str) -> Result<Self> {
        let key = s.to_ascii_lowercase().replace(['_', '-'], "");
        Ok(match key.as_str() {
            "baker" => MapKind::Baker,
            "dmap" | "d" => MapKind::DMap,
            "dprime" | "dprimemap" => MapKind::DPrimeMap,
            "bbar" => MapKind::BBar,
            "reflection" | "r" => MapKind::Reflection,
            "fourier" | "antiperiodicfourier" | "g" => MapKind::AntiperiodicFourier,
            "lambda" | "lambdabasischange" => MapKind::LambdaBasisChange,
            _ => return Err(BakerError::InvalidArgument(format!("unknown map kind {s:?}"))),
        })
    }
}

/// Relative sign of the second block of a D-map.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

fn require_even(d: usize, min: usize) -> Result<()> {
    if !d.is_multiple_of(2) {
        return Err(BakerError::InvalidDimension(format!("dimension must be even, got {d}")));
    }
    if d < min {
        return Err(BakerError::InvalidDimension(format!("dimension must be at least {min}, got {d}")));
    }
    Ok(())
}

/// Antiperiodic Fourier matrix `G_d`.
pub fn antiperiodic_fourier(d: usize) -> Result<ComplexMatrix> {
    if d < 2 {
        return Err(BakerError::InvalidDimension(format!("fourier dimension must be at least 2, got {d}")));
    }
    let norm = 1.0 / (d as f64).sqrt();
    // reduce (2j+1)(2k+1) mod 4d in integers before taking the angle
    let period = 4 * d as u64;
    Ok(ComplexMatrix::from_fn(d, d, |j, k| {
        let n = ((2 * j as u64 + 1) * (2 * k as u64 + 1)) % period;
        Complex64::from_polar(norm, TAU * n as f64 / period as f64)
    }))
}

/// Reflection `R_d |j> = |d - 1 - j>`.
pub fn reflection(d: usize) -> Result<ComplexMatrix> {
    if d < 1 {
        return Err(BakerError::InvalidDimension("reflection dimension must be positive".into()));
    }
    ComplexMatrix::permutation(&(0..d).rev().collect::<Vec<_>>())
}

/// Quantum baker `B_d = G_d blockdiag(G_{d/2}^-1, G_{d/2}^-1)` for even `d >= 4`.
pub fn baker(d: usize) -> Result<ComplexMatrix> {
    require_even(d, 4)?;
    let g_half_inv = antiperiodic_fourier(d / 2)?.dagger();
    antiperiodic_fourier(d)?.matmul(&ComplexMatrix::block_diag(&g_half_inv, &g_half_inv))
}

/// `D_d` (`Sign::Plus`) or `D'_d` (`Sign::Minus`):
/// `G_d blockdiag(G_{d/2}^-1, +-G_{d/2})`.
pub fn d_map(d: usize, sign: Sign) -> Result<ComplexMatrix> {
    require_even(d, 4)?;
    let g_half = antiperiodic_fourier(d / 2)?;
    let lower = g_half.scale(Complex64::new(sign.value(), 0.0));
    antiperiodic_fourier(d)?.matmul(&ComplexMatrix::block_diag(&g_half.dagger(), &lower))
}

/// Parity basis change `(I_d + i Y (x) R_{d/2}) / sqrt(2)`.
pub fn lambda_basis(d: usize) -> Result<ComplexMatrix> {
    require_even(d, 2)?;
    let h = d / 2;
    // i Y = [[0, 1], [-1, 0]]
    let iy = ComplexMatrix::new(2, 2, vec![0.0, 1.0, -1.0, 0.0].into_iter().map(|x| Complex64::new(x, 0.0)).collect())?;
    let s = Complex64::new(FRAC_1_SQRT_2, 0.0);
    ComplexMatrix::identity(d).add(&iy.kron(&reflection(h)?)).map(|m| m.scale(s))
}

/// `Lambda blockdiag(upper, lower) Lambda^dag`.
pub fn from_parity_blocks(upper: &ComplexMatrix, lower: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !upper.is_square() || !lower.is_square() || upper.rows() != lower.rows() {
        return Err(BakerError::DimensionMismatch("parity blocks must be square and of equal size".into()));
    }
    let lambda = lambda_basis(2 * upper.rows())?;
    lambda.matmul(&ComplexMatrix::block_diag(upper, lower))?.matmul(&lambda.dagger())
}

/// Composite baker `Lambda blockdiag(D_{d/2}, R D'_{d/2} R) Lambda^dag`,
/// defined for `d` divisible by 4 (and `d >= 8` so that `D_{d/2}` exists).
pub fn bbar(d: usize) -> Result<ComplexMatrix> {
    if !d.is_multiple_of(4) {
        return Err(BakerError::InvalidDimension(format!("bbar dimension must be divisible by 4, got {d}")));
    }
    require_even(d, 8)?;
    let h = d / 2;
    let r = reflection(h)?;
    let upper = d_map(h, Sign::Plus)?;
    let lower = r.matmul(&d_map(h, Sign::Minus)?)?.matmul(&r)?;
    from_parity_blocks(&upper, &lower)
}

/// `max |U R_d - R_d U|`.
pub fn reflection_commutator(u: &ComplexMatrix) -> Result<f64> {
    if !u.is_square() {
        return Err(BakerError::DimensionMismatch("commutator needs a square matrix".into()));
    }
    let d = u.rows();
    // R is a permutation, so both products are index shuffles of U
    let mut worst = 0.0f64;
    for j in 0..d {
        for k in 0..d {
            let ur = u[(j, d - 1 - k)];
            let ru = u[(d - 1 - j, k)];
            worst = worst.max((ur - ru).norm());
        }
    }
    Ok(worst)
}

/// `max |(G^-1 M G)^* - M^-1|` for a unitary `M`.
pub fn time_reversal_residual(m: &ComplexMatrix) -> Result<f64> {
    let g = antiperiodic_fourier(m.rows())?;
    let lhs = g.dagger().matmul(m)?.matmul(&g)?.conj();
    lhs.max_abs_diff(&m.dagger())
}

/// Parity sectors of a reflection-symmetric unitary.
#[derive(Debug, Clone)]
pub struct ParityBlocks {
    /// Odd-parity sector (upper-left block of `Lambda^dag U Lambda`).
    pub minus_block: ComplexMatrix,
    /// Even-parity sector (lower-right block).
    pub plus_block: ComplexMatrix,
    /// Largest entry of the discarded off-diagonal blocks.
    pub off_diagonal: f64,
}

/// Block-diagonalizes `U` in the parity basis: `Lambda^dag U Lambda`.
///
/// Rejects non-unitary input and input whose reflection commutator exceeds
/// [`EPS_UNITARY`].
pub fn reduce_by_symmetry(u: &ComplexMatrix) -> Result<ParityBlocks> {
    u.ensure_unitary()?;
    let d = u.rows();
    require_even(d, 2)?;
    let commutator = reflection_commutator(u)?;
    if commutator >= EPS_UNITARY {
        return Err(BakerError::NotReflectionSymmetric { commutator });
    }
    let lambda = lambda_basis(d)?;
    let t = lambda.dagger().matmul(u)?.matmul(&lambda)?;
    let h = d / 2;
    let off_diagonal = t.submatrix(0, h, h, h).max_abs().max(t.submatrix(h, 0, h, h).max_abs());
    if off_diagonal >= EPS_BLOCK {
        return Err(BakerError::NotReflectionSymmetric { commutator: off_diagonal });
    }
    Ok(ParityBlocks { minus_block: t.submatrix(0, 0, h, h), plus_block: t.submatrix(h, h, h, h), off_diagonal })
}
