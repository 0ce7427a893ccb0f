//! Littlewood-Paley decomposition, Besov norms, Bony paraproducts, commutator
//! blocks and the statistical inequality harness.

pub mod besov;
pub mod bony;
pub mod exponent;
pub mod inequalities;
pub mod partition;
pub mod suite;

pub use besov::{besov_norm, mixed_norm, time_outside_norm, BesovSpec, MixedNormSpec};
pub use bony::{bony_decompose, commutator_block, paraproduct, BonyParts, ParaPart};
pub use inequalities::{verify_inequality, verify_stability, ConstantReport, Ensemble, InequalityId};
pub use partition::{build_partition, chi, phi, DyadicPartition};
pub use suite::{verify_lp, LpSuiteReport};

use crate::spectral::SpectralField;
use crate::Result;

/// `Δ_j u`; `j` must lie in the partition's band range.
pub fn dyadic_block(u: &SpectralField, j: i32, partition: &DyadicPartition) -> Result<SpectralField> {
    partition.block(u, j)
}

/// `Ṡ_j u = Σ_{j' ≤ j-1} Δ_{j'} u`.
pub fn low_cutoff(u: &SpectralField, j: i32, partition: &DyadicPartition) -> Result<SpectralField> {
    partition.low_cutoff(u, j)
}
