//! Periodic grid, FFTs, Fourier multipliers, norms and checkpoints.

pub mod checkpoint;
pub mod fft;
mod field;
mod grid;
pub mod norms;
pub mod ops;
pub mod random;

pub use field::{transform_forward, transform_inverse, PhysicalField, SpectralField};
pub use grid::Grid;
pub use norms::NormKind;
pub use ops::{DiffOp, Pairing};
