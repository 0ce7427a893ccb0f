//! Nonlinear terms and full right-hand sides.
//!
//! Products are formed on the grid and truncated by the 2/3 rule. Quadratic
//! terms are written in divergence or curl form,
//!
//! ```text
//! B·∇B - u·∇u = ∇·(B⊗B - u⊗u)          (u, B divergence-free)
//! ∇×(u×B) - κ∇×(J×B) = ∇×((u - κJ)×B)   (J = ∇×B)
//! ```
//!
//! which keeps the truncated system exactly energy conserving.

use rustfft::num_complex::Complex64;

use super::integrator::Model;
use super::state::{ExtendedState, PhysicalParams, SolverState};
use crate::spectral::ops::{curl, dealias_mask, laplacian, leray_project};
use crate::spectral::{fft, Grid, PhysicalField, SpectralField};
use crate::Result;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Position of `T_ij` in the packed symmetric layout `xx, xy, xz, yy, yz, zz`.
const SYM: [[usize; 3]; 3] = [[0, 1, 2], [1, 3, 4], [2, 4, 5]];

fn to_physical(grid: &Grid, fields: &[&SpectralField]) -> Vec<Vec<f64>> {
    let refs: Vec<&[Complex64]> = fields
        .iter()
        .flat_map(|f| f.components().iter().map(|c| c.as_slice()))
        .collect();
    fft::inverse_many(grid, &refs)
}

/// Forward transform followed by the 2/3-rule truncation.
fn to_dealiased(grid: &Grid, comps: &[Vec<f64>]) -> Vec<Vec<Complex64>> {
    let refs: Vec<&[f64]> = comps.iter().map(|c| c.as_slice()).collect();
    let mask = dealias_mask(grid);
    let mut out = fft::forward_many(grid, &refs);
    for c in &mut out {
        for (v, &m) in c.iter_mut().zip(&mask) {
            *v *= m;
        }
    }
    out
}

fn vector(grid: &Grid, comps: Vec<Vec<Complex64>>) -> SpectralField {
    SpectralField::from_components(*grid, comps).expect("grid-sized components")
}

fn cross_into(a: [&[f64]; 3], b: [&[f64]; 3], out: &mut [Vec<f64>]) {
    for p in 0..a[0].len() {
        let (a0, a1, a2) = (a[0][p], a[1][p], a[2][p]);
        let (b0, b1, b2) = (b[0][p], b[1][p], b[2][p]);
        out[0][p] = a1 * b2 - a2 * b1;
        out[1][p] = a2 * b0 - a0 * b2;
        out[2][p] = a0 * b1 - a1 * b0;
    }
}

/// Packed `B⊗B - u⊗u`.
fn stress(u: [&[f64]; 3], b: [&[f64]; 3]) -> Vec<Vec<f64>> {
    let len = u[0].len();
    let mut t = vec![vec![0.0; len]; 6];
    for i in 0..3 {
        for j in i..3 {
            let out = &mut t[SYM[i][j]];
            for p in 0..len {
                out[p] = b[i][p] * b[j][p] - u[i][p] * u[j][p];
            }
        }
    }
    t
}

/// `(∇·T)_i = Σ_j ∂_j T_ij` for packed symmetric `T`.
fn tensor_divergence(grid: &Grid, t: &[Vec<Complex64>]) -> SpectralField {
    let kd = grid.derivative_wavenumbers();
    let len = grid.points();
    let mut out = vec![vec![Complex64::default(); len]; 3];
    let mut idx = 0;
    for &kx in &kd {
        for &ky in &kd {
            for &kz in &kd {
                let k = [kx, ky, kz];
                for (i, o) in out.iter_mut().enumerate() {
                    let s = t[SYM[i][0]][idx] * k[0] + t[SYM[i][1]][idx] * k[1] + t[SYM[i][2]][idx] * k[2];
                    o[idx] = I * s;
                }
                idx += 1;
            }
        }
    }
    vector(grid, out)
}

fn split3(v: &[Vec<f64>]) -> [&[f64]; 3] {
    [&v[0], &v[1], &v[2]]
}

/// Nonlinear parts `(P∇·(B⊗B - u⊗u), ∇×((u - κ∇×B)×B))` of the original system.
pub(crate) fn nonlinear_original(
    u: &SpectralField,
    b: &SpectralField,
    kappa: f64,
    model: Model,
) -> Result<(SpectralField, SpectralField)> {
    let grid = *u.grid();
    match model {
        Model::Linear => Ok((SpectralField::zeros(grid, 3), SpectralField::zeros(grid, 3))),
        Model::NavierStokes => {
            let phys = to_physical(&grid, &[u]);
            let zero = vec![0.0; grid.points()];
            let t = stress(split3(&phys), [&zero, &zero, &zero]);
            let du = leray_project(&tensor_divergence(&grid, &to_dealiased(&grid, &t)))?;
            Ok((du, SpectralField::zeros(grid, 3)))
        }
        Model::HallMhd => {
            let j = curl(b)?;
            let phys = to_physical(&grid, &[u, b, &j]);
            let (up, bp, jp) = (&phys[0..3], &phys[3..6], &phys[6..9]);
            let mut prods = stress(split3(up), split3(bp));
            let w: Vec<Vec<f64>> = (0..3)
                .map(|c| up[c].iter().zip(&jp[c]).map(|(a, j)| a - kappa * j).collect())
                .collect();
            let mut e = vec![vec![0.0; grid.points()]; 3];
            cross_into(split3(&w), split3(bp), &mut e);
            prods.extend(e);
            let mut hat = to_dealiased(&grid, &prods);
            let e_hat = hat.split_off(6);
            let du = leray_project(&tensor_divergence(&grid, &hat))?;
            let db = curl(&vector(&grid, e_hat))?;
            Ok((du, db))
        }
    }
}

/// Nonlinear parts `(du, dB, dv)` of the `μ = ν` formulation in `(u, B, v)`.
pub(crate) fn nonlinear_extended(
    u: &SpectralField,
    b: &SpectralField,
    v: &SpectralField,
    kappa: f64,
) -> Result<(SpectralField, SpectralField, SpectralField)> {
    let grid = *u.grid();
    let omega = curl(v)?;
    // ∂_j B_i for i, j in 0..3, stored at 3 i + j
    let grad_b = {
        let kd = grid.derivative_wavenumbers();
        let mut out = vec![vec![Complex64::default(); grid.points()]; 9];
        let mut idx = 0;
        for &kx in &kd {
            for &ky in &kd {
                for &kz in &kd {
                    let k = [kx, ky, kz];
                    for i in 0..3 {
                        let ib = I * b.component(i)[idx];
                        for jj in 0..3 {
                            out[3 * i + jj][idx] = ib * k[jj];
                        }
                    }
                    idx += 1;
                }
            }
        }
        SpectralField::from_components(grid, out)?
    };
    let phys = to_physical(&grid, &[u, b, v, &omega, &grad_b]);
    let (up, bp, vp, wp, gp) = (&phys[0..3], &phys[3..6], &phys[6..9], &phys[9..12], &phys[12..21]);
    let len = grid.points();
    let mut prods = stress(split3(up), split3(bp));

    // -κ ω_v×B + v×u + 2κ (v·∇)B
    let mut w_b = vec![vec![0.0; len]; 3];
    let mut v_u = vec![vec![0.0; len]; 3];
    cross_into(split3(wp), split3(bp), &mut w_b);
    cross_into(split3(vp), split3(up), &mut v_u);
    let mut f = vec![vec![0.0; len]; 3];
    for i in 0..3 {
        for p in 0..len {
            let adv = vp[0][p] * gp[3 * i][p] + vp[1][p] * gp[3 * i + 1][p] + vp[2][p] * gp[3 * i + 2][p];
            f[i][p] = -kappa * w_b[i][p] + v_u[i][p] + 2.0 * kappa * adv;
        }
    }
    let mut e = vec![vec![0.0; len]; 3];
    cross_into(split3(vp), split3(bp), &mut e);
    prods.extend(f);
    prods.extend(e);

    let mut hat = to_dealiased(&grid, &prods);
    let e_hat = hat.split_off(9);
    let f_hat = hat.split_off(6);
    let div_t = leray_project(&tensor_divergence(&grid, &hat))?;
    let dv = &div_t + &curl(&vector(&grid, f_hat))?;
    let db = curl(&vector(&grid, e_hat))?;
    Ok((div_t, db, dv))
}

/// Full right-hand side `(∂_t u, ∂_t B)` of the original system.
pub fn rhs_original(state: &SolverState, params: &PhysicalParams) -> Result<(SpectralField, SpectralField)> {
    let (mut du, mut db) = nonlinear_original(&state.u, &state.b, params.kappa, Model::HallMhd)?;
    du.axpy(params.mu, &laplacian(&state.u))?;
    db.axpy(params.nu, &laplacian(&state.b))?;
    Ok((du, db))
}

/// Full right-hand side `(∂_t u, ∂_t B, ∂_t v)` of the extended system; needs `μ = ν`.
pub fn rhs_extended(
    state: &ExtendedState,
    params: &PhysicalParams,
) -> Result<(SpectralField, SpectralField, SpectralField)> {
    params.require_equal_diffusion()?;
    let s = &state.base;
    let (mut du, mut db, mut dv) = nonlinear_extended(&s.u, &s.b, &state.v, params.kappa)?;
    du.axpy(params.mu, &laplacian(&s.u))?;
    db.axpy(params.nu, &laplacian(&s.b))?;
    dv.axpy(params.mu, &laplacian(&state.v))?;
    Ok((du, db, dv))
}

/// Hall term `-κ∇×((∇×B)×B)`, dealiased.
pub fn hall_term(b: &SpectralField, kappa: f64) -> Result<SpectralField> {
    let grid = *b.grid();
    let j = curl(b)?;
    let phys = to_physical(&grid, &[&j, b]);
    let mut e = vec![vec![0.0; grid.points()]; 3];
    cross_into(split3(&phys[0..3]), split3(&phys[3..6]), &mut e);
    Ok(curl(&vector(&grid, to_dealiased(&grid, &e)))?.scaled(-kappa))
}

/// `sup_x |B(x)|` from the spectral coefficients.
pub(crate) fn sup_magnitude(b: &SpectralField) -> f64 {
    let grid = *b.grid();
    let phys = to_physical(&grid, &[b]);
    PhysicalField::from_components(grid, phys)
        .expect("grid-sized components")
        .sup_norm()
}
