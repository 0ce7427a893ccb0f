//! Discrete energy balance and the blow-up proxy.

use serde::{Deserialize, Serialize};

use super::integrator::{IntegratorConfig, Model, Stepper};
use super::state::{PhysicalParams, SolverState};
use crate::spectral::norms::{hdot_squared, l2};
use crate::{Error, Result};

/// Energy `½(‖u‖² + ‖B‖²)` and dissipation `μ‖∇u‖² + ν‖∇B‖²` at one time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergySample {
    pub t: f64,
    pub energy: f64,
    pub dissipation: f64,
}

impl EnergySample {
    pub fn of(state: &SolverState, params: &PhysicalParams) -> Result<Self> {
        let (lu, lb) = (l2(&state.u), l2(&state.b));
        Ok(EnergySample {
            t: state.t,
            energy: 0.5 * (lu * lu + lb * lb),
            dissipation: params.mu * hdot_squared(&state.u, 1.0)? + params.nu * hdot_squared(&state.b, 1.0)?,
        })
    }
}

/// Centered finite-difference stencil for `dE/dt`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stencil {
    Second,
    Fourth,
}

impl Stencil {
    fn half_width(self) -> usize {
        match self {
            Stencil::Second => 1,
            Stencil::Fourth => 2,
        }
    }

    fn derivative(self, e: &[f64], i: usize, h: f64) -> f64 {
        match self {
            Stencil::Second => (e[i + 1] - e[i - 1]) / (2.0 * h),
            Stencil::Fourth => (-e[i + 2] + 8.0 * e[i + 1] - 8.0 * e[i - 1] + e[i - 2]) / (12.0 * h),
        }
    }
}

/// Residual `r(t) = dE/dt + D(t)` at every interior sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub stencil: Stencil,
    pub times: Vec<f64>,
    pub residuals: Vec<f64>,
    pub max_abs_residual: f64,
    pub max_dissipation: f64,
    /// `max |r| / max D`; zero when nothing dissipates and nothing changes.
    pub normalized_residual: f64,
}

pub fn energy_audit(samples: &[EnergySample], stencil: Stencil) -> Result<AuditReport> {
    if samples.len() < 3 {
        return Err(Error::param(format!(
            "energy audit needs at least 3 samples, got {}",
            samples.len()
        )));
    }
    let w = stencil.half_width();
    if samples.len() < 2 * w + 1 {
        return Err(Error::param(format!(
            "the {stencil:?} stencil needs at least {} samples, got {}",
            2 * w + 1,
            samples.len()
        )));
    }
    let h = samples[1].t - samples[0].t;
    if !(h > 0.0) {
        return Err(Error::param("sample times must increase"));
    }
    for pair in samples.windows(2) {
        if ((pair[1].t - pair[0].t) - h).abs() > 1e-6 * h {
            return Err(Error::param("energy audit needs uniformly spaced samples"));
        }
    }
    let e: Vec<f64> = samples.iter().map(|s| s.energy).collect();
    let mut times = Vec::new();
    let mut residuals = Vec::new();
    for i in w..samples.len() - w {
        times.push(samples[i].t);
        residuals.push(stencil.derivative(&e, i, h) + samples[i].dissipation);
    }
    let max_abs_residual = residuals.iter().fold(0.0f64, |m, r| m.max(r.abs()));
    let max_dissipation = samples.iter().fold(0.0f64, |m, s| m.max(s.dissipation));
    let normalized_residual = if max_dissipation > 0.0 {
        max_abs_residual / max_dissipation
    } else {
        max_abs_residual
    };
    Ok(AuditReport {
        stencil,
        times,
        residuals,
        max_abs_residual,
        max_dissipation,
        normalized_residual,
    })
}

pub fn energy_audit_states(
    trajectory: &[SolverState],
    params: &PhysicalParams,
    stencil: Stencil,
) -> Result<AuditReport> {
    let samples = trajectory
        .iter()
        .map(|s| EnergySample::of(s, params))
        .collect::<Result<Vec<_>>>()?;
    energy_audit(&samples, stencil)
}

/// Audits a run sampled at every step.
pub fn audit_run(
    initial: &SolverState,
    params: &PhysicalParams,
    config: &IntegratorConfig,
    model: Model,
    stencil: Stencil,
) -> Result<AuditReport> {
    let mut stepper = Stepper::new(*initial.grid(), *params, *config, model)?;
    let mut samples = Vec::new();
    stepper.run(initial.clone(), 1, |s| {
        samples.push(EnergySample::of(s, params)?);
        Ok(())
    })?;
    energy_audit(&samples, stencil)
}

/// The audit at `dt` and `dt/2`, with the observed order of the residual.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditConvergence {
    pub coarse: AuditReport,
    pub fine: AuditReport,
    pub expected_order: u32,
    /// `log2(coarse / fine)` of the normalized residuals.
    pub observed_order: f64,
}

/// Normalized residual bound at the configured step.
pub const AUDIT_TOLERANCE: f64 = 1e-5;
/// How far below the scheme order the observed order may fall.
pub const ORDER_SLACK: f64 = 0.3;

impl AuditConvergence {
    pub fn passes(&self) -> bool {
        self.coarse.normalized_residual < AUDIT_TOLERANCE
            && self.observed_order >= self.expected_order as f64 - ORDER_SLACK
    }
}

pub fn audit_convergence(
    initial: &SolverState,
    params: &PhysicalParams,
    config: &IntegratorConfig,
    model: Model,
    stencil: Stencil,
) -> Result<AuditConvergence> {
    let coarse = audit_run(initial, params, config, model, stencil)?;
    let half = IntegratorConfig {
        dt: 0.5 * config.dt,
        ..*config
    };
    let fine = audit_run(initial, params, &half, model, stencil)?;
    let observed_order = (coarse.normalized_residual / fine.normalized_residual).log2();
    Ok(AuditConvergence {
        coarse,
        fine,
        expected_order: config.scheme.order(),
        observed_order,
    })
}

/// `‖∇u‖²_{Ḣ^{1/2}} + ‖∇B‖²_{Ḣ^{3/2}} = ‖u‖²_{Ḣ^{3/2}} + ‖B‖²_{Ḣ^{5/2}}`.
pub fn blowup_indicator(state: &SolverState) -> Result<f64> {
    Ok(hdot_squared(&state.u, 1.5)? + hdot_squared(&state.b, 2.5)?)
}

/// Time integral of the blow-up proxy with a power-law tail estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlowupReport {
    pub integral: f64,
    /// Least-squares exponent `a` of `value ~ t^a` over the last third of samples.
    pub tail_exponent: f64,
    /// Estimated `∫_T^∞` of the power-law tail; infinite when `a ≥ -1`.
    pub tail_estimate: f64,
    pub converged: bool,
}

pub const BLOWUP_TAIL_FRACTION: f64 = 1e-2;

pub fn blowup_integral(times: &[f64], values: &[f64]) -> Result<BlowupReport> {
    if times.len() != values.len() || times.len() < 3 {
        return Err(Error::param("blow-up integral needs at least 3 matching samples"));
    }
    if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(Error::param("blow-up proxy must be finite and non-negative"));
    }
    let integral: f64 = times
        .windows(2)
        .zip(values.windows(2))
        .map(|(t, v)| 0.5 * (t[1] - t[0]) * (v[0] + v[1]))
        .sum();
    let start = times.len() - (times.len() / 3).max(2);
    let pts: Vec<(f64, f64)> = times[start..]
        .iter()
        .zip(&values[start..])
        .filter(|(t, v)| **t > 0.0 && **v > 0.0)
        .map(|(t, v)| (t.ln(), v.ln()))
        .collect();
    let (tail_exponent, tail_estimate) = if pts.len() < 2 {
        // identically zero tail
        (f64::NEG_INFINITY, 0.0)
    } else {
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let a = sxy / sxx;
        let (t_end, v_end) = (*times.last().unwrap(), *values.last().unwrap());
        let tail = if a < -1.0 {
            -v_end * t_end / (a + 1.0)
        } else {
            f64::INFINITY
        };
        (a, tail)
    };
    let converged = tail_exponent < -1.0 && tail_estimate <= BLOWUP_TAIL_FRACTION * integral;
    Ok(BlowupReport {
        integral,
        tail_exponent,
        tail_estimate,
        converged,
    })
}
