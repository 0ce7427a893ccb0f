//! Pseudo-spectral solver for the incompressible Hall-MHD system on a periodic
//! box, together with a Littlewood-Paley / Besov diagnostics toolkit.
//!
//! Layout:
//!
//! * [`spectral`]: grid, transforms, differential operators, Leray projection,
//!   dealiasing, norms and the binary checkpoint format.
//! * [`lp`]: dyadic partition, blocks, Besov and mixed time-space norms, Bony
//!   paraproducts, commutator blocks and the inequality harness.
//! * [`dynamics`]: right-hand sides of the original and extended systems,
//!   integrating-factor Runge-Kutta stepping and conservation audits.
//! * [`experiments`]: initial data, the continuum decay oracle, decay fits,
//!   smallness scans and negative-Besov tracking.
//! * [`config`], [`series`] and [`pipeline`]: run configuration, JSON-lines
//!   output and the simulate-and-record driver.

pub mod config;
pub mod dynamics;
pub mod error;
pub mod experiments;
pub mod lp;
pub mod pipeline;
pub mod series;
pub mod spectral;

pub use error::{Error, Result};
