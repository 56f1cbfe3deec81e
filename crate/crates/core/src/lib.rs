//! Quantum baker maps, circular random-matrix ensembles and the entangling
//! power of unitary dynamics on bipartite systems.
//!
//! - [`tensor`]: dense complex matrices, states, bipartitions, partial traces
//! - [`eigen`]: eigenphases and eigenvectors of unitaries
//! - [`maps`]: baker, D-maps, reflection, parity basis change and friends
//! - [`ensembles`]: seeded Haar states, CUE, COE and reflection-symmetric samples
//! - [`entangle`]: linear entropy, Monte-Carlo and closed-form entangling power
//! - [`commensurability`]: eigenphase resonance search

pub mod commensurability;
pub mod eigen;
pub mod ensembles;
pub mod entangle;
pub mod error;
pub mod maps;
pub mod stats;
pub mod tensor;

pub use commensurability::{commensurability_check, CommensurabilityReport, Resonance};
pub use eigen::{eigensystem, EigenSystem};
pub use ensembles::{haar_state, product_state, sample_coe, sample_cue, sample_symmetric, EnsembleKind, RngStream};
pub use entangle::{
    asymptotic_entangling_power, asymptotic_entropy, cue_mean_entropy, empirical_asymptotic_distribution,
    entangling_power_mc, entropy_timeseries, linear_entropy, time_and_state_average, EntropySample, Estimate,
    ReducedEigenData, SpectralAnalysis, SpectralValue,
};
pub use error::{BakerError, Result};
pub use maps::{
    antiperiodic_fourier, baker, bbar, d_map, lambda_basis, reduce_by_symmetry, reflection, MapKind, ParityBlocks, Sign,
};
pub use tensor::{dagger, kron, matmul, partial_trace, Bipartition, ComplexMatrix, StateVector, Subsystem};
