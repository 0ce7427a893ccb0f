//! Runs the original and the extended formulation side by side.

use serde::{Deserialize, Serialize};

use super::integrator::{IntegratorConfig, Model, Scheme, Stepper};
use super::state::{ExtendedState, PhysicalParams, SolverState};
use crate::spectral::norms::l2;
use crate::spectral::ops::{curl, inverse_laplacian};
use crate::spectral::SpectralField;
use crate::Result;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DivergenceReport {
    pub dt: f64,
    pub scheme: Scheme,
    pub t_end: f64,
    /// `max_t ‖v - (u - κ∇×B)‖ / ‖v‖` with `v` from the extended run and
    /// `u`, `B` from the original run.
    pub v_consistency: f64,
    /// `max_t ‖B - (-Δ)^{-1}∇×(u - v)/κ‖ / ‖B‖`, same pairing of runs.
    pub b_identity: f64,
    /// `max_t (‖Δu‖ + ‖ΔB‖) / (‖u‖ + ‖B‖)` between the two runs.
    pub state_difference: f64,
    /// Relative local error of one step, from step doubling at `t = 0`.
    pub truncation_scale: f64,
    pub times: Vec<f64>,
    pub v_series: Vec<f64>,
}

fn rel(num: f64, den: f64) -> f64 {
    if den == 0.0 {
        num
    } else {
        num / den
    }
}

fn v_mismatch(orig: &SolverState, v: &SpectralField, kappa: f64) -> Result<f64> {
    let expect = &orig.u - &curl(&orig.b)?.scaled(kappa);
    Ok(rel(l2(&(v - &expect)), l2(v)))
}

fn b_mismatch(orig: &SolverState, v: &SpectralField, kappa: f64) -> Result<f64> {
    let rebuilt = inverse_laplacian(&curl(&(&orig.u - v))?)?.scaled(1.0 / kappa);
    Ok(rel(l2(&(&orig.b - &rebuilt)), l2(&orig.b)))
}

/// Relative size of the one-step local error, `‖y_h - y_{h/2,h/2}‖ / ‖y‖`
/// scaled by `2^p / (2^p - 1)`.
pub fn local_truncation_scale(
    initial: &SolverState,
    params: &PhysicalParams,
    config: &IntegratorConfig,
) -> Result<f64> {
    let grid = *initial.grid();
    let one = Stepper::new(grid, *params, *config, Model::HallMhd)?.step(initial)?;
    let half_cfg = IntegratorConfig {
        dt: 0.5 * config.dt,
        ..*config
    };
    let mut half = Stepper::new(grid, *params, half_cfg, Model::HallMhd)?;
    let mid = half.step(initial)?;
    let two = half.step(&mid)?;
    let diff = l2(&(&one.u - &two.u)) + l2(&(&one.b - &two.b));
    let size = l2(&two.u) + l2(&two.b);
    let p = 2f64.powi(config.scheme.order() as i32);
    Ok(rel(diff, size) * p / (p - 1.0))
}

/// Evolves both formulations from the same `(u₀, B₀)` and compares them every
/// `every` steps. Needs `μ = ν`.
pub fn cross_check_formulations(
    initial: &SolverState,
    params: &PhysicalParams,
    config: &IntegratorConfig,
    every: usize,
) -> Result<DivergenceReport> {
    params.require_equal_diffusion()?;
    let grid = *initial.grid();
    let kappa = params.kappa;
    let truncation_scale = local_truncation_scale(initial, params, config)?;

    let mut orig_stepper = Stepper::new(grid, *params, *config, Model::HallMhd)?;
    let mut ext_stepper = Stepper::new(grid, *params, *config, Model::HallMhd)?;
    let n = config.steps_from(initial.t)?;
    let every = every.max(1);

    let mut orig = initial.clone();
    let mut ext = ExtendedState::from_base(initial.clone(), kappa)?;
    let mut report = DivergenceReport {
        dt: config.dt,
        scheme: config.scheme,
        t_end: config.t_end,
        v_consistency: 0.0,
        b_identity: 0.0,
        state_difference: 0.0,
        truncation_scale,
        times: Vec::new(),
        v_series: Vec::new(),
    };
    for k in 0..=n {
        if k > 0 {
            orig = orig_stepper.step(&orig)?;
            ext = ext_stepper.step_extended(&ext)?;
        }
        if k % every == 0 || k == n {
            let dv = v_mismatch(&orig, &ext.v, kappa)?;
            let db = b_mismatch(&orig, &ext.v, kappa)?;
            let ds = rel(
                l2(&(&orig.u - &ext.base.u)) + l2(&(&orig.b - &ext.base.b)),
                l2(&orig.u) + l2(&orig.b),
            );
            report.v_consistency = report.v_consistency.max(dv);
            report.b_identity = report.b_identity.max(db);
            report.state_difference = report.state_difference.max(ds);
            report.times.push(orig.t);
            report.v_series.push(dv);
        }
    }
    Ok(report)
}

/// The cross-check at `dt` and `dt/2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FormulationConvergence {
    pub coarse: DivergenceReport,
    pub fine: DivergenceReport,
    pub expected_order: u32,
    /// `log2` of the `v_consistency` ratio; meaningless once both sit at roundoff.
    pub observed_order: f64,
}

/// Mismatch below which both formulations are taken to agree to roundoff.
pub const ROUNDOFF_FLOOR: f64 = 1e-12;

impl FormulationConvergence {
    /// `v` within ten truncation scales, converging at order unless already at
    /// roundoff, and the `B` identity at roundoff.
    pub fn passes(&self) -> bool {
        let c = &self.coarse;
        let at_roundoff = c.v_consistency < ROUNDOFF_FLOOR && self.fine.v_consistency < ROUNDOFF_FLOOR;
        let converging = self.observed_order >= self.expected_order as f64 - super::audit::ORDER_SLACK;
        c.v_consistency < 10.0 * c.truncation_scale
            && (at_roundoff || converging)
            && c.b_identity < ROUNDOFF_FLOOR
    }
}

pub fn formulation_convergence(
    initial: &SolverState,
    params: &PhysicalParams,
    config: &IntegratorConfig,
    every: usize,
) -> Result<FormulationConvergence> {
    let coarse = cross_check_formulations(initial, params, config, every)?;
    let half = IntegratorConfig {
        dt: 0.5 * config.dt,
        ..*config
    };
    let fine = cross_check_formulations(initial, params, &half, 2 * every.max(1))?;
    Ok(FormulationConvergence {
        observed_order: (coarse.v_consistency / fine.v_consistency).log2(),
        expected_order: config.scheme.order(),
        coarse,
        fine,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::ops::dealias;
    use crate::spectral::random::{random_field, RandomFieldSpec};
    use crate::spectral::Grid;

    #[test]
    fn formulations_agree_to_roundoff() {
        let g = Grid::new(16, 1.0).unwrap();
        let spec = RandomFieldSpec::vector(2.0).solenoidal();
        let u = dealias(&random_field(&g, &spec, 11));
        let b = dealias(&random_field(&g, &spec, 12));
        let s = SolverState::new(u.scaled(2.0 / l2(&u)), b.scaled(2.0 / l2(&b)), 0.0).unwrap();
        let p = PhysicalParams::new(0.1, 0.1, 0.8).unwrap();
        let cfg = IntegratorConfig::new(0.005, Scheme::IfRk3, 0.1);
        let r = cross_check_formulations(&s, &p, &cfg, 5).unwrap();
        assert!(r.truncation_scale > 0.0);
        assert!(r.v_consistency < 1e-11, "{r:?}");
        assert!(r.b_identity < 1e-11);
        assert!(r.state_difference < 1e-11);
        assert_eq!(r.times.len(), 5);
    }
}
