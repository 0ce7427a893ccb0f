//! Norms and inner products.
//!
//! With the transform convention of [`super::fft`], the box volume
//! `V = (2πM)³` enters every Parseval formula: `‖u‖²_{L²} = V Σ_k |û(k)|²`
//! and `‖u‖²_{Ḣ^s} = V Σ_k |k|^{2s} |û(k)|²`. `L^p` norms use the grid
//! quadrature `(Σ_x |u(x)|^p Δx³)^{1/p}` with `|·|` the Euclidean magnitude
//! across components.

use serde::{Deserialize, Serialize};

use super::ops::lambda_symbol;
use super::{PhysicalField, SpectralField};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum NormKind {
    L2,
    Hdot { s: f64 },
    H { s: f64 },
    Lp { p: f64 },
}

impl NormKind {
    /// Short label used as a key in diagnostics records, e.g. `Hdot(0.5)`.
    pub fn label(&self) -> String {
        match self {
            NormKind::L2 => "L2".into(),
            NormKind::Hdot { s } => format!("Hdot({s})"),
            NormKind::H { s } => format!("H({s})"),
            NormKind::Lp { p } => format!("L{p}"),
        }
    }
}

pub fn norm(field: &SpectralField, kind: NormKind) -> Result<f64> {
    match kind {
        NormKind::L2 => Ok(l2(field)),
        NormKind::Hdot { s } => hdot(field, s),
        NormKind::H { s } => h(field, s),
        NormKind::Lp { p } => lp(field, p),
    }
}

pub fn l2(field: &SpectralField) -> f64 {
    (field.grid().volume() * field.coefficient_energy()).sqrt()
}

pub fn hdot(field: &SpectralField, s: f64) -> Result<f64> {
    Ok(hdot_squared(field, s)?.sqrt())
}

/// `‖u‖²_{Ḣ^s}`, summed with the `|k|^{2s}` weight directly.
pub fn hdot_squared(field: &SpectralField, s: f64) -> Result<f64> {
    if !s.is_finite() {
        return Err(Error::param(format!("Ḣ^s needs a finite s, got {s}")));
    }
    if s < 0.0 && !field.is_mean_zero() {
        return Err(Error::NonzeroMean("Ḣ^s with s < 0"));
    }
    let w = lambda_symbol(field.grid(), 2.0 * s);
    let mut acc = 0.0;
    for c in field.components() {
        for (v, &wk) in c.iter().zip(&w) {
            acc += wk * v.norm_sqr();
        }
    }
    Ok(field.grid().volume() * acc)
}

/// `sqrt(‖u‖²_{L²} + ‖u‖²_{Ḣ^s})`.
pub fn h(field: &SpectralField, s: f64) -> Result<f64> {
    let l = l2(field);
    Ok((l * l + hdot_squared(field, s)?).sqrt())
}

pub fn lp(field: &SpectralField, p: f64) -> Result<f64> {
    lp_physical(&field.to_physical(), p)
}

/// Grid-quadrature `L^p` norm; `p = ∞` gives the sup of the magnitude.
pub fn lp_physical(field: &PhysicalField, p: f64) -> Result<f64> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::param(format!("L^p needs p >= 1, got {p}")));
    }
    let mag = field.magnitude();
    if p.is_infinite() {
        return Ok(mag.into_iter().fold(0.0, f64::max));
    }
    let scale = mag.iter().cloned().fold(0.0, f64::max);
    if scale == 0.0 {
        return Ok(0.0);
    }
    // rescale to avoid overflow for large p
    let sum: f64 = mag.iter().map(|m| (m / scale).powf(p)).sum();
    Ok(scale * (sum * field.grid().cell_volume()).powf(1.0 / p))
}

/// Spectral `L²` inner product `V Σ_k Re(â(k) conj(b̂(k)))`.
pub fn inner(a: &SpectralField, b: &SpectralField) -> Result<f64> {
    a.check_compatible(b)?;
    let mut acc = 0.0;
    for (ca, cb) in a.components().iter().zip(b.components()) {
        for (x, y) in ca.iter().zip(cb) {
            acc += x.re * y.re + x.im * y.im;
        }
    }
    Ok(a.grid().volume() * acc)
}

/// Grid-quadrature inner product `Σ_x a(x)·b(x) Δx³`.
pub fn grid_inner(a: &PhysicalField, b: &PhysicalField) -> Result<f64> {
    if a.grid() != b.grid() {
        return Err(Error::GridMismatch);
    }
    if a.n_components() != b.n_components() {
        return Err(Error::ComponentMismatch {
            op: "grid_inner",
            expected: a.n_components(),
            got: b.n_components(),
        });
    }
    let mut acc = 0.0;
    for (ca, cb) in a.components().iter().zip(b.components()) {
        acc += ca.iter().zip(cb).map(|(x, y)| x * y).sum::<f64>();
    }
    Ok(acc * a.grid().cell_volume())
}
