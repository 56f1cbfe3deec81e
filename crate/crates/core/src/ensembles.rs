//! Reproducible sampling of Haar states and circular ensembles.
//!
//! Every draw comes from an [`RngStream`]: a ChaCha20 generator keyed by a
//! master seed and selected by a stream id. One stream belongs to one
//! Monte-Carlo sample, so results do not depend on how samples are scheduled.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{BakerError, Result};
use crate::maps::from_parity_blocks;
use crate::tensor::{Bipartition, ComplexMatrix, StateVector};

/// Generator handed out by [`RngStream::rng`].
pub type SampleRng = ChaCha20Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngStream {
    pub master_seed: u64,
    pub stream_id: u64,
}

impl RngStream {
    pub fn new(master_seed: u64, stream_id: u64) -> Self {
        RngStream { master_seed, stream_id }
    }

    /// Fresh generator positioned at the start of this stream.
    pub fn rng(&self) -> SampleRng {
        let mut rng = ChaCha20Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.stream_id);
        rng
    }

    /// Stream `stream_id` of an independent family derived from
    /// `(master_seed, lane)`. Lanes keep e.g. map draws and state draws of one
    /// experiment apart.
    pub fn in_lane(master_seed: u64, lane: u64, stream_id: u64) -> Self {
        RngStream { master_seed: splitmix64(master_seed ^ splitmix64(lane.wrapping_add(1))), stream_id }
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im)
}

/// Haar-random pure state: a normalized standard complex-normal vector.
pub fn haar_state<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<StateVector> {
    if d == 0 {
        return Err(BakerError::InvalidDimension("state dimension must be positive".into()));
    }
    loop {
        let amps: Vec<Complex64> = (0..d).map(|_| complex_normal(rng)).collect();
        if let Ok(psi) = StateVector::normalized(amps) {
            return Ok(psi);
        }
    }
}

/// `|psi_A> (x) |psi_B>` with independent Haar factors, A drawn first.
pub fn product_state<R: Rng + ?Sized>(part: Bipartition, rng: &mut R) -> StateVector {
    let a = haar_state(part.d_a(), rng).expect("positive dimension");
    let b = haar_state(part.d_b(), rng).expect("positive dimension");
    a.kron(&b)
}

/// Haar (CUE) unitary: Gram-Schmidt on the columns of a complex Ginibre
/// matrix. Gram-Schmidt yields a positive diagonal in the implied `R`
/// factor, which is the phase fixing that makes `Q` exactly Haar.
pub fn sample_cue<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<ComplexMatrix> {
    if d == 0 {
        return Err(BakerError::InvalidDimension("matrix dimension must be positive".into()));
    }
    // column-major scratch so that each column is contiguous
    let mut cols: Vec<Vec<Complex64>> = (0..d).map(|_| (0..d).map(|_| complex_normal(rng)).collect()).collect();
    for k in 0..d {
        let (done, rest) = cols.split_at_mut(k);
        let v = &mut rest[0];
        // two passes of modified Gram-Schmidt
        for _ in 0..2 {
            for q in done.iter() {
                let proj: Complex64 = q.iter().zip(v.iter()).map(|(a, b)| a.conj() * b).sum();
                for (x, y) in v.iter_mut().zip(q) {
                    *x -= proj * y;
                }
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        v.iter_mut().for_each(|z| *z /= norm);
    }
    Ok(ComplexMatrix::from_fn(d, d, |r, c| cols[c][r]))
}

/// COE unitary `V V^T` with `V` from the CUE (plain transpose).
pub fn sample_coe<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<ComplexMatrix> {
    let v = sample_cue(d, rng)?;
    v.matmul(&v.transpose())
}

/// Random reflection- and time-reversal-symmetric map
/// `Lambda blockdiag(W1, W2) Lambda^dag`, `W1`, `W2` independent COE of size `d/2`.
pub fn sample_symmetric<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<ComplexMatrix> {
    let (w1, w2) = sample_symmetric_blocks(d, rng)?;
    from_parity_blocks(&w1, &w2)
}

/// The two COE blocks that [`sample_symmetric`] would assemble, drawn in the
/// same order from the same stream.
pub fn sample_symmetric_blocks<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<(ComplexMatrix, ComplexMatrix)> {
    if !d.is_multiple_of(2) || d == 0 {
        return Err(BakerError::InvalidDimension(format!("dimension must be even, got {d}")));
    }
    let w1 = sample_coe(d / 2, rng)?;
    let w2 = sample_coe(d / 2, rng)?;
    Ok((w1, w2))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EnsembleKind {
    Cue,
    Coe,
    SymmetricBaker,
}

impl EnsembleKind {
    pub fn name(self) -> &'static str {
        match self {
            EnsembleKind::Cue => "cue",
            EnsembleKind::Coe => "coe",
            EnsembleKind::SymmetricBaker => "symmetric",
        }
    }

    pub fn sample<R: Rng + ?Sized>(self, d: usize, rng: &mut R) -> Result<ComplexMatrix> {
        match self {
            EnsembleKind::Cue => sample_cue(d, rng),
            EnsembleKind::Coe => sample_coe(d, rng),
            EnsembleKind::SymmetricBaker => sample_symmetric(d, rng),
        }
    }
}

impl fmt::Display for EnsembleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Serialize for EnsembleKind {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for EnsembleKind {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl FromStr for EnsembleKind {
    type Err = BakerError;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace(['_', '-'], "").as_str() {
            "cue" => Ok(EnsembleKind::Cue),
            "coe" => Ok(EnsembleKind::Coe),
            "symmetric" | "symmetricbaker" => Ok(EnsembleKind::SymmetricBaker),
            _ => Err(BakerError::InvalidArgument(format!("unknown ensemble {s:?}"))),
        }
    }
}
