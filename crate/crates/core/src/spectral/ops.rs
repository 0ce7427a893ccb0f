//! Fourier multipliers: derivatives, `Λ^s`, Leray projection, dealiasing.

use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{Grid, PhysicalField, SpectralField};
use crate::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DiffOp {
    Gradient,
    Divergence,
    Curl,
    Laplacian,
}

fn expect_components(field: &SpectralField, op: &'static str, n: usize) -> Result<()> {
    if field.n_components() != n {
        return Err(Error::ComponentMismatch {
            op,
            expected: n,
            got: field.n_components(),
        });
    }
    Ok(())
}

/// Visits every mode as `(idx, [kx, ky, kz])` using derivative wavenumbers.
fn for_each_k(grid: &Grid, mut f: impl FnMut(usize, [f64; 3])) {
    let kd = grid.derivative_wavenumbers();
    let mut idx = 0;
    for &kx in &kd {
        for &ky in &kd {
            for &kz in &kd {
                f(idx, [kx, ky, kz]);
                idx += 1;
            }
        }
    }
}

pub fn differential(field: &SpectralField, op: DiffOp) -> Result<SpectralField> {
    match op {
        DiffOp::Gradient => gradient(field),
        DiffOp::Divergence => divergence(field),
        DiffOp::Curl => curl(field),
        DiffOp::Laplacian => Ok(laplacian(field)),
    }
}

pub fn gradient(field: &SpectralField) -> Result<SpectralField> {
    expect_components(field, "gradient", 1)?;
    let grid = *field.grid();
    let u = field.component(0);
    let mut out = SpectralField::zeros(grid, 3);
    let mut comps: Vec<Vec<Complex64>> = (0..3).map(|c| out.component(c).to_vec()).collect();
    for_each_k(&grid, |idx, k| {
        let iu = I * u[idx];
        for c in 0..3 {
            comps[c][idx] = iu * k[c];
        }
    });
    for (c, comp) in comps.into_iter().enumerate() {
        out.component_mut(c).copy_from_slice(&comp);
    }
    Ok(out)
}

pub fn divergence(field: &SpectralField) -> Result<SpectralField> {
    expect_components(field, "divergence", 3)?;
    let grid = *field.grid();
    let (a, b, c) = (field.component(0), field.component(1), field.component(2));
    let mut out = vec![Complex64::default(); grid.points()];
    for_each_k(&grid, |idx, k| {
        out[idx] = I * (a[idx] * k[0] + b[idx] * k[1] + c[idx] * k[2]);
    });
    SpectralField::from_components(grid, vec![out])
}

pub fn curl(field: &SpectralField) -> Result<SpectralField> {
    expect_components(field, "curl", 3)?;
    let grid = *field.grid();
    let (a, b, c) = (field.component(0), field.component(1), field.component(2));
    let len = grid.points();
    let (mut x, mut y, mut z) = (
        vec![Complex64::default(); len],
        vec![Complex64::default(); len],
        vec![Complex64::default(); len],
    );
    for_each_k(&grid, |idx, k| {
        x[idx] = I * (c[idx] * k[1] - b[idx] * k[2]);
        y[idx] = I * (a[idx] * k[2] - c[idx] * k[0]);
        z[idx] = I * (b[idx] * k[0] - a[idx] * k[1]);
    });
    SpectralField::from_components(grid, vec![x, y, z])
}

/// `Δu`, acting componentwise with the full symbol `-|k|²`.
pub fn laplacian(field: &SpectralField) -> SpectralField {
    let grid = field.grid();
    let k2: Vec<f64> = grid.mode_m2().into_iter().map(|m2| -grid.k2_of_m2(m2)).collect();
    field.weighted(&k2)
}

/// Symbol `|k|^s` per mode; the `k = 0` entry is `1` for `s = 0` and `0` otherwise.
pub fn lambda_symbol(grid: &Grid, s: f64) -> Vec<f64> {
    let table: Vec<f64> = (0..=grid.max_m2())
        .map(|m2| {
            if m2 == 0 {
                if s == 0.0 {
                    1.0
                } else {
                    0.0
                }
            } else {
                grid.k2_of_m2(m2).powf(0.5 * s)
            }
        })
        .collect();
    grid.mode_m2().into_iter().map(|m2| table[m2]).collect()
}

/// `Λ^s = (-Δ)^{s/2}`.
pub fn lambda_pow(field: &SpectralField, s: f64) -> Result<SpectralField> {
    if !s.is_finite() {
        return Err(Error::param(format!("Λ^s needs a finite s, got {s}")));
    }
    if s < 0.0 && !field.is_mean_zero() {
        return Err(Error::NonzeroMean("Λ^s with s < 0"));
    }
    Ok(field.weighted(&lambda_symbol(field.grid(), s)))
}

/// `(-Δ)^{-1}`.
pub fn inverse_laplacian(field: &SpectralField) -> Result<SpectralField> {
    lambda_pow(field, -2.0)
}

/// Leray projector `Id + (-Δ)^{-1}∇ div` onto divergence-free fields.
pub fn leray_project(field: &SpectralField) -> Result<SpectralField> {
    expect_components(field, "leray_project", 3)?;
    let grid = *field.grid();
    let (a, b, c) = (field.component(0), field.component(1), field.component(2));
    let len = grid.points();
    let (mut x, mut y, mut z) = (
        vec![Complex64::default(); len],
        vec![Complex64::default(); len],
        vec![Complex64::default(); len],
    );
    for_each_k(&grid, |idx, k| {
        let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
        let (u0, u1, u2) = (a[idx], b[idx], c[idx]);
        if k2 == 0.0 {
            // mean and the all-Nyquist corner carry no gradient part
            x[idx] = u0;
            y[idx] = u1;
            z[idx] = u2;
            return;
        }
        let kdotu = (u0 * k[0] + u1 * k[1] + u2 * k[2]) / k2;
        x[idx] = u0 - kdotu * k[0];
        y[idx] = u1 - kdotu * k[1];
        z[idx] = u2 - kdotu * k[2];
    });
    SpectralField::from_components(grid, vec![x, y, z])
}

/// 0/1 mask of modes kept by the 2/3 rule.
pub fn dealias_mask(grid: &Grid) -> Vec<f64> {
    let cut = grid.dealias_index();
    let keep: Vec<bool> = (0..grid.n()).map(|i| grid.signed(i).abs() <= cut).collect();
    let mut mask = Vec::with_capacity(grid.points());
    for &ki in &keep {
        for &kj in &keep {
            for &kl in &keep {
                mask.push(if ki && kj && kl { 1.0 } else { 0.0 });
            }
        }
    }
    mask
}

/// Zeroes every coefficient with an axis wavenumber index above the 2/3 cutoff.
pub fn dealias(field: &SpectralField) -> SpectralField {
    field.weighted(&dealias_mask(field.grid()))
}

/// `e^{tνΔ}` applied to every component.
pub fn heat_semigroup(field: &SpectralField, diffusivity: f64, t: f64) -> SpectralField {
    let grid = field.grid();
    let table: Vec<f64> = (0..=grid.max_m2())
        .map(|m2| (-diffusivity * grid.k2_of_m2(m2) * t).exp())
        .collect();
    let w: Vec<f64> = grid.mode_m2().into_iter().map(|m2| table[m2]).collect();
    field.weighted(&w)
}

/// Pointwise products formed on the grid.
pub mod pointwise {
    use super::*;

    fn expect(field: &PhysicalField, op: &'static str, n: usize) -> Result<()> {
        if field.n_components() != n {
            return Err(Error::ComponentMismatch {
                op,
                expected: n,
                got: field.n_components(),
            });
        }
        Ok(())
    }

    pub fn cross(a: &PhysicalField, b: &PhysicalField) -> Result<PhysicalField> {
        expect(a, "cross", 3)?;
        expect(b, "cross", 3)?;
        let len = a.grid().points();
        let (a0, a1, a2) = (a.component(0), a.component(1), a.component(2));
        let (b0, b1, b2) = (b.component(0), b.component(1), b.component(2));
        let mut out = vec![vec![0.0; len]; 3];
        for i in 0..len {
            out[0][i] = a1[i] * b2[i] - a2[i] * b1[i];
            out[1][i] = a2[i] * b0[i] - a0[i] * b2[i];
            out[2][i] = a0[i] * b1[i] - a1[i] * b0[i];
        }
        PhysicalField::from_components(*a.grid(), out)
    }

    pub fn dot(a: &PhysicalField, b: &PhysicalField) -> Result<PhysicalField> {
        if a.n_components() != b.n_components() {
            return Err(Error::ComponentMismatch {
                op: "dot",
                expected: a.n_components(),
                got: b.n_components(),
            });
        }
        let len = a.grid().points();
        let mut out = vec![0.0; len];
        for (ca, cb) in a.components().iter().zip(b.components()) {
            for i in 0..len {
                out[i] += ca[i] * cb[i];
            }
        }
        PhysicalField::from_components(*a.grid(), vec![out])
    }

    /// Scalar times each component of `b` (or componentwise when both have equal counts).
    pub fn multiply(a: &PhysicalField, b: &PhysicalField) -> Result<PhysicalField> {
        let len = a.grid().points();
        let out: Vec<Vec<f64>> = match (a.n_components(), b.n_components()) {
            (1, _) => b
                .components()
                .iter()
                .map(|cb| (0..len).map(|i| a.component(0)[i] * cb[i]).collect())
                .collect(),
            (_, 1) => a
                .components()
                .iter()
                .map(|ca| (0..len).map(|i| ca[i] * b.component(0)[i]).collect())
                .collect(),
            (p, q) if p == q => a
                .components()
                .iter()
                .zip(b.components())
                .map(|(ca, cb)| (0..len).map(|i| ca[i] * cb[i]).collect())
                .collect(),
            (p, q) => {
                return Err(Error::ComponentMismatch {
                    op: "multiply",
                    expected: p,
                    got: q,
                })
            }
        };
        PhysicalField::from_components(*a.grid(), out)
    }
}

/// How two fields are combined pointwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Pairing {
    /// Scalar-scalar, scalar-vector or componentwise product.
    Multiply,
    /// Vector cross product `f × g`.
    Cross,
}

pub fn pointwise_pair(a: &PhysicalField, b: &PhysicalField, pairing: Pairing) -> Result<PhysicalField> {
    match pairing {
        Pairing::Multiply => pointwise::multiply(a, b),
        Pairing::Cross => pointwise::cross(a, b),
    }
}

/// Product formed in physical space, transformed back and truncated by the 2/3 rule.
pub fn dealiased_product(f: &SpectralField, g: &SpectralField, pairing: Pairing) -> Result<SpectralField> {
    if f.grid() != g.grid() {
        return Err(Error::GridMismatch);
    }
    let p = pointwise_pair(&f.to_physical(), &g.to_physical(), pairing)?;
    Ok(dealias(&p.to_spectral()))
}
