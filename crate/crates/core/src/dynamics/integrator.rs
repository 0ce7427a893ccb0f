//! Integrating-factor Runge-Kutta time stepping.
//!
//! With `L` the diagonal diffusion operator and `N` the nonlinear terms, an
//! explicit tableau `(a, b, c)` gives
//!
//! ```text
//! y_i     = E(c_i h) y_n + h Σ_j a_ij E((c_i - c_j) h) N(y_j)
//! y_{n+1} = E(h) y_n     + h Σ_j b_j  E((1 - c_j) h)   N(y_j)
//! ```
//!
//! where `E(τ) = e^{τL}` is applied exactly in Fourier space.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::rhs::{nonlinear_extended, nonlinear_original, sup_magnitude};
use super::state::{ExtendedState, PhysicalParams, SolverState};
use crate::spectral::ops::leray_project;
use crate::spectral::{Grid, SpectralField};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scheme {
    #[serde(rename = "IF-RK2")]
    IfRk2,
    #[serde(rename = "IF-RK3")]
    IfRk3,
}

struct Tableau {
    a: &'static [&'static [f64]],
    b: &'static [f64],
    c: &'static [f64],
}

impl Scheme {
    pub fn order(self) -> u32 {
        match self {
            Scheme::IfRk2 => 2,
            Scheme::IfRk3 => 3,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Scheme::IfRk2 => "IF-RK2",
            Scheme::IfRk3 => "IF-RK3",
        }
    }

    fn tableau(self) -> Tableau {
        match self {
            // Heun's second-order method
            Scheme::IfRk2 => Tableau {
                a: &[&[], &[1.0]],
                b: &[0.5, 0.5],
                c: &[0.0, 1.0],
            },
            // Heun's third-order method
            Scheme::IfRk3 => Tableau {
                a: &[&[], &[1.0 / 3.0], &[0.0, 2.0 / 3.0]],
                b: &[0.25, 0.0, 0.75],
                c: &[0.0, 1.0 / 3.0, 2.0 / 3.0],
            },
        }
    }
}

/// Which terms are evolved besides diffusion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Model {
    /// Full Hall-MHD.
    HallMhd,
    /// Incompressible Navier-Stokes for `u`; `B` only diffuses.
    NavierStokes,
    /// Diffusion only.
    Linear,
}

pub const DEFAULT_CFL_HALL: f64 = 0.25;

fn default_cfl_hall() -> f64 {
    DEFAULT_CFL_HALL
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorConfig {
    pub dt: f64,
    pub scheme: Scheme,
    pub t_end: f64,
    #[serde(default = "default_cfl_hall")]
    pub cfl_hall: f64,
}

impl IntegratorConfig {
    pub fn new(dt: f64, scheme: Scheme, t_end: f64) -> Self {
        IntegratorConfig {
            dt,
            scheme,
            t_end,
            cfl_hall: DEFAULT_CFL_HALL,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::param(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t_end.is_finite() && self.t_end >= 0.0) {
            return Err(Error::param(format!(
                "t_end must be non-negative, got {}",
                self.t_end
            )));
        }
        if !(self.cfl_hall.is_finite() && self.cfl_hall > 0.0) {
            return Err(Error::param(format!(
                "cfl_hall must be positive, got {}",
                self.cfl_hall
            )));
        }
        Ok(())
    }

    /// Number of steps of size `dt` covering `[t_start, t_end]`.
    pub fn steps_from(&self, t_start: f64) -> Result<usize> {
        steps_between(t_start, self.t_end, self.dt)
    }
}

pub(crate) fn steps_between(t0: f64, t1: f64, dt: f64) -> Result<usize> {
    let span = t1 - t0;
    if span < -1e-9 * dt {
        return Err(Error::param(format!("start time {t0} lies past t_end = {t1}")));
    }
    let n = (span / dt).round();
    if (n * dt - span).abs() > 1e-6 * dt {
        return Err(Error::param(format!(
            "interval [{t0}, {t1}] is not a whole number of steps of {dt}"
        )));
    }
    Ok(n.max(0.0) as usize)
}

/// Largest step the Hall CFL condition allows: `cfl · Δx² / max(1, sup|B|)`.
pub fn cfl_bound(grid: &Grid, sup_b: f64, cfl_hall: f64) -> f64 {
    cfl_hall * grid.dx() * grid.dx() / sup_b.max(1.0)
}

pub fn check_cfl(dt: f64, grid: &Grid, b: &SpectralField, cfl_hall: f64) -> Result<()> {
    let bound = cfl_bound(grid, sup_magnitude(b), cfl_hall);
    if dt > bound {
        return Err(Error::CflViolation { dt, bound });
    }
    Ok(())
}

/// Reusable stepper; caches the exponential factors.
pub struct Stepper {
    params: PhysicalParams,
    config: IntegratorConfig,
    model: Model,
    grid: Grid,
    mode_m2: Vec<usize>,
    factors: HashMap<(u64, u64), Vec<f64>>,
}

/// `acc += a w ⊙ x`.
fn axpy_weighted(acc: &mut SpectralField, a: f64, x: &SpectralField, w: &[f64]) {
    for c in 0..acc.n_components() {
        let xc = x.component(c);
        for ((v, &xv), &wv) in acc.component_mut(c).iter_mut().zip(xc).zip(w) {
            *v += xv * (a * wv);
        }
    }
}

impl Stepper {
    pub fn new(grid: Grid, params: PhysicalParams, config: IntegratorConfig, model: Model) -> Result<Self> {
        params.validate()?;
        config.validate()?;
        Ok(Stepper {
            params,
            config,
            model,
            grid,
            mode_m2: grid.mode_m2(),
            factors: HashMap::new(),
        })
    }

    pub fn config(&self) -> &IntegratorConfig {
        &self.config
    }

    pub fn params(&self) -> &PhysicalParams {
        &self.params
    }

    pub fn model(&self) -> Model {
        self.model
    }

    /// Per-mode `e^{-d |k|² τ}`.
    fn factor(&mut self, diffusivity: f64, tau: f64) -> &[f64] {
        let (grid, m2) = (&self.grid, &self.mode_m2);
        self.factors
            .entry((diffusivity.to_bits(), tau.to_bits()))
            .or_insert_with(|| {
                let table: Vec<f64> = (0..=grid.max_m2())
                    .map(|q| (-diffusivity * grid.k2_of_m2(q) * tau).exp())
                    .collect();
                m2.iter().map(|&q| table[q]).collect()
            })
    }

    fn advance(
        &mut self,
        y: &[SpectralField],
        diffusivities: &[f64],
        mut nonlinear: impl FnMut(&[SpectralField]) -> Result<Vec<SpectralField>>,
    ) -> Result<Vec<SpectralField>> {
        let tab = self.config.scheme.tableau();
        let h = self.config.dt;
        let mut stages: Vec<Vec<SpectralField>> = Vec::with_capacity(tab.c.len());
        for i in 0..tab.c.len() {
            let yi = if i == 0 {
                nonlinear(y)?
            } else {
                let ci = tab.c[i];
                let mut fields = Vec::with_capacity(y.len());
                for (f, (yf, &d)) in y.iter().zip(diffusivities).enumerate() {
                    let mut acc = yf.weighted(self.factor(d, ci * h));
                    for (j, &aij) in tab.a[i].iter().enumerate() {
                        if aij != 0.0 {
                            let w = self.factor(d, (ci - tab.c[j]) * h).to_vec();
                            axpy_weighted(&mut acc, h * aij, &stages[j][f], &w);
                        }
                    }
                    fields.push(acc);
                }
                nonlinear(&fields)?
            };
            stages.push(yi);
        }
        let mut out = Vec::with_capacity(y.len());
        for (f, (yf, &d)) in y.iter().zip(diffusivities).enumerate() {
            let mut acc = yf.weighted(self.factor(d, h));
            for (j, &bj) in tab.b.iter().enumerate() {
                if bj != 0.0 {
                    let w = self.factor(d, (1.0 - tab.c[j]) * h).to_vec();
                    axpy_weighted(&mut acc, h * bj, &stages[j][f], &w);
                }
            }
            out.push(acc);
        }
        Ok(out)
    }

    fn finish(field: SpectralField, name: &'static str, t: f64) -> Result<SpectralField> {
        if !field.is_finite() {
            return Err(Error::NonFinite { field: name, t });
        }
        Ok(leray_project(&field)?.with_zero_mean())
    }

    fn check_state(&self, s: &SolverState) -> Result<()> {
        if *s.grid() != self.grid {
            return Err(Error::GridMismatch);
        }
        if !s.u.is_finite() {
            return Err(Error::NonFinite { field: "u", t: s.t });
        }
        if !s.b.is_finite() {
            return Err(Error::NonFinite { field: "B", t: s.t });
        }
        if self.model == Model::HallMhd {
            check_cfl(self.config.dt, &self.grid, &s.b, self.config.cfl_hall)?;
        }
        Ok(())
    }

    /// One step of the original `(u, B)` system.
    pub fn step(&mut self, s: &SolverState) -> Result<SolverState> {
        self.check_state(s)?;
        let (kappa, model) = (self.params.kappa, self.model);
        let diffs = [self.params.mu, self.params.nu];
        let y = [s.u.clone(), s.b.clone()];
        let mut out = self.advance(&y, &diffs, |f| {
            let (du, db) = nonlinear_original(&f[0], &f[1], kappa, model)?;
            Ok(vec![du, db])
        })?;
        let t = s.t + self.config.dt;
        let b = Self::finish(out.pop().expect("two fields"), "B", t)?;
        let u = Self::finish(out.pop().expect("two fields"), "u", t)?;
        Ok(SolverState { u, b, t })
    }

    /// One step of the `(u, B, v)` system; needs `μ = ν`.
    pub fn step_extended(&mut self, s: &ExtendedState) -> Result<ExtendedState> {
        self.params.require_equal_diffusion()?;
        if self.model != Model::HallMhd {
            return Err(Error::param("the extended formulation only exists for Hall-MHD"));
        }
        self.check_state(&s.base)?;
        if !s.v.is_finite() {
            return Err(Error::NonFinite {
                field: "v",
                t: s.base.t,
            });
        }
        let kappa = self.params.kappa;
        let mu = self.params.mu;
        let y = [s.base.u.clone(), s.base.b.clone(), s.v.clone()];
        let mut out = self.advance(&y, &[mu, mu, mu], |f| {
            let (du, db, dv) = nonlinear_extended(&f[0], &f[1], &f[2], kappa)?;
            Ok(vec![du, db, dv])
        })?;
        let t = s.base.t + self.config.dt;
        let v = Self::finish(out.pop().expect("three fields"), "v", t)?;
        let b = Self::finish(out.pop().expect("three fields"), "B", t)?;
        let u = Self::finish(out.pop().expect("three fields"), "u", t)?;
        Ok(ExtendedState {
            base: SolverState { u, b, t },
            v,
        })
    }

    /// Runs to `t_end`, calling `observer` on the initial state, every
    /// `every` steps and on the final state.
    pub fn run(
        &mut self,
        state: SolverState,
        every: usize,
        mut observer: impl FnMut(&SolverState) -> Result<()>,
    ) -> Result<SolverState> {
        let n = self.config.steps_from(state.t)?;
        let (t0, dt) = (state.t, self.config.dt);
        drive(state, n, every, &mut observer, |s, k| {
            let mut next = self.step(s)?;
            next.t = t0 + k as f64 * dt;
            Ok(next)
        })
    }

    pub fn run_extended(
        &mut self,
        state: ExtendedState,
        every: usize,
        mut observer: impl FnMut(&ExtendedState) -> Result<()>,
    ) -> Result<ExtendedState> {
        let n = self.config.steps_from(state.base.t)?;
        let (t0, dt) = (state.base.t, self.config.dt);
        drive(state, n, every, &mut observer, |s, k| {
            let mut next = self.step_extended(s)?;
            next.base.t = t0 + k as f64 * dt;
            Ok(next)
        })
    }
}

fn drive<S>(
    mut state: S,
    n_steps: usize,
    every: usize,
    observer: &mut impl FnMut(&S) -> Result<()>,
    mut step: impl FnMut(&S, usize) -> Result<S>,
) -> Result<S> {
    let every = every.max(1);
    observer(&state)?;
    for k in 1..=n_steps {
        state = step(&state, k)?;
        if k % every == 0 || k == n_steps {
            observer(&state)?;
        }
    }
    Ok(state)
}

/// Advances `state` by one step of `config.dt`.
pub fn step(
    state: &SolverState,
    params: &PhysicalParams,
    config: &IntegratorConfig,
    model: Model,
) -> Result<SolverState> {
    Stepper::new(*state.grid(), *params, *config, model)?.step(state)
}
