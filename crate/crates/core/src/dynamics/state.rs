use serde::{Deserialize, Serialize};

use crate::spectral::norms::l2;
use crate::spectral::ops::{curl, divergence, leray_project};
use crate::spectral::SpectralField;
use crate::{Error, Result};

/// Viscosity `μ`, resistivity `ν` and Hall coefficient `κ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicalParams {
    pub mu: f64,
    pub nu: f64,
    pub kappa: f64,
}

impl PhysicalParams {
    pub fn new(mu: f64, nu: f64, kappa: f64) -> Result<Self> {
        let p = PhysicalParams { mu, nu, kappa };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("mu", self.mu), ("nu", self.nu), ("kappa", self.kappa)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::param(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }

    pub fn require_equal_diffusion(&self) -> Result<()> {
        if self.mu != self.nu {
            return Err(Error::param(format!(
                "the extended formulation needs mu = nu, got mu = {}, nu = {}",
                self.mu, self.nu
            )));
        }
        Ok(())
    }
}

/// Velocity and magnetic field in spectral space.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverState {
    pub u: SpectralField,
    pub b: SpectralField,
    pub t: f64,
}

fn check_vector(name: &str, f: &SpectralField) -> Result<()> {
    if f.n_components() != 3 {
        return Err(Error::param(format!(
            "{name} needs 3 components, got {}",
            f.n_components()
        )));
    }
    Ok(())
}

/// `‖∇·f‖ / ‖∇f‖`-style relative divergence, zero for the zero field.
pub fn relative_divergence(f: &SpectralField) -> Result<f64> {
    let d = l2(&divergence(f)?);
    let scale = l2(&curl(f)?) + d;
    Ok(if scale == 0.0 { 0.0 } else { d / scale })
}

impl SolverState {
    pub fn new(u: SpectralField, b: SpectralField, t: f64) -> Result<Self> {
        check_vector("u", &u)?;
        check_vector("B", &b)?;
        if u.grid() != b.grid() {
            return Err(Error::GridMismatch);
        }
        Ok(SolverState { u, b, t })
    }

    pub fn zeros(grid: crate::spectral::Grid) -> Self {
        SolverState {
            u: SpectralField::zeros(grid, 3),
            b: SpectralField::zeros(grid, 3),
            t: 0.0,
        }
    }

    pub fn grid(&self) -> &crate::spectral::Grid {
        self.u.grid()
    }

    /// Projects both fields onto divergence-free, mean-zero fields.
    pub fn projected(self) -> Result<Self> {
        Ok(SolverState {
            u: leray_project(&self.u)?.with_zero_mean(),
            b: leray_project(&self.b)?.with_zero_mean(),
            t: self.t,
        })
    }

    /// Largest relative divergence of `u` and `B`.
    pub fn divergence_defect(&self) -> Result<f64> {
        Ok(relative_divergence(&self.u)?.max(relative_divergence(&self.b)?))
    }
}

/// State of the `μ = ν` formulation with the extra unknown `v = u - κ∇×B`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtendedState {
    pub base: SolverState,
    pub v: SpectralField,
}

impl ExtendedState {
    /// Builds the consistent extension `v = u - κ∇×B`.
    pub fn from_base(base: SolverState, kappa: f64) -> Result<Self> {
        let v = &base.u - &curl(&base.b)?.scaled(kappa);
        Ok(ExtendedState { base, v })
    }

    /// `‖v - (u - κ∇×B)‖ / ‖v‖`.
    pub fn consistency(&self, kappa: f64) -> Result<f64> {
        let expect = &self.base.u - &curl(&self.base.b)?.scaled(kappa);
        let num = l2(&(&self.v - &expect));
        let den = l2(&self.v);
        Ok(if den == 0.0 { num } else { num / den })
    }
}
