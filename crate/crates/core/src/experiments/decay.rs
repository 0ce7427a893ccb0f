//! Nonlinear decay runs compared against the periodic heat flow.

use serde::{Deserialize, Serialize};

use super::data::{gen_initial_data, measure_data, DataReport, DataSpec, RegularityParams};
use super::fit::{fit_decay, DecayFit};
use crate::dynamics::{IntegratorConfig, Model, PhysicalParams, SolverState, Stepper};
use crate::lp::build_partition;
use crate::series::TimeSeries;
use crate::spectral::norms::hdot;
use crate::spectral::ops::heat_semigroup;
use crate::spectral::Grid;
use crate::{Error, Result};

/// Fraction of the slowest box mode's decay time the fit window may reach.
pub const WINDOW_CAP: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayOptions {
    pub sample_dt: f64,
    pub model: Model,
}

/// Fits at one derivative order `s`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayEntry {
    pub s: f64,
    /// `-(s + γ)/2`.
    pub expected: f64,
    pub fit: DecayFit,
    pub baseline_fit: DecayFit,
    /// `max |run / baseline - 1|` over the window.
    pub baseline_deviation: f64,
    pub series: TimeSeries,
    pub baseline: TimeSeries,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayReport {
    pub grid: (usize, f64),
    pub model: Model,
    pub data: DataReport,
    pub window: (f64, f64),
    /// Entries at `s` and `s + 1`.
    pub entries: Vec<DecayEntry>,
    /// Fitted exponent at `s + 1` minus the one at `s`; the heat rate predicts `-1/2`.
    pub gap: f64,
}

/// Fit window `[max(1, t_hi/8), t_hi]` with `t_hi = min(0.1/(μ k_min²), t_end)`.
pub fn fit_window(grid: &Grid, params: &PhysicalParams, t_end: f64) -> Result<(f64, f64)> {
    let k = grid.k_min();
    let hi = (WINDOW_CAP / (params.mu.max(params.nu) * k * k)).min(t_end);
    let lo = (hi / 8.0).max(1.0);
    if hi <= lo {
        return Err(Error::param(format!(
            "decay fit window [{lo}, {hi}] is empty; increase the box scale M or t_end"
        )));
    }
    Ok((lo, hi))
}

fn norm_s(state: &SolverState, s: f64) -> Result<f64> {
    Ok(hdot(&state.u, s)? + hdot(&state.b, s)?)
}

pub fn decay_experiment(
    grid: &Grid,
    spec: &DataSpec,
    params: &PhysicalParams,
    reg: &RegularityParams,
    cfg: &IntegratorConfig,
    opts: &DecayOptions,
) -> Result<DecayReport> {
    reg.validate()?;
    let window = fit_window(grid, params, cfg.t_end)?;
    let every = crate::dynamics::integrator::steps_between(0.0, opts.sample_dt, cfg.dt)
        .map_err(|_| Error::param("sample_dt must be a whole number of steps"))?
        .max(1);
    let partition = build_partition(grid)?;
    let (u0, b0) = gen_initial_data(spec, grid)?;
    let data = measure_data(&u0, &b0, spec, reg, &partition)?;

    let orders = [reg.s, reg.s + 1.0];
    let mut runs: Vec<TimeSeries> = orders
        .iter()
        .map(|s| TimeSeries::new(format!("Lambda^{s}")))
        .collect();
    let mut bases: Vec<TimeSeries> = orders
        .iter()
        .map(|s| TimeSeries::new(format!("heat Lambda^{s}")))
        .collect();
    let mut stepper = Stepper::new(*grid, *params, *cfg, opts.model)?;
    stepper.run(SolverState::new(u0.clone(), b0.clone(), 0.0)?, every, |st| {
        let heat = SolverState {
            u: heat_semigroup(&u0, params.mu, st.t),
            b: heat_semigroup(&b0, params.nu, st.t),
            t: st.t,
        };
        for (i, &s) in orders.iter().enumerate() {
            runs[i].push(st.t, norm_s(st, s)?)?;
            bases[i].push(st.t, norm_s(&heat, s)?)?;
        }
        Ok(())
    })?;

    let mut entries = Vec::new();
    for ((&s, series), baseline) in orders.iter().zip(runs).zip(bases) {
        let fit = fit_decay(&series, window)?;
        let baseline_fit = fit_decay(&baseline, window)?;
        let baseline_deviation = series
            .samples()
            .iter()
            .zip(baseline.samples())
            .filter(|((t, _), _)| *t >= window.0 && *t <= window.1)
            .map(|((_, a), (_, b))| (a / b - 1.0).abs())
            .fold(0.0, f64::max);
        entries.push(DecayEntry {
            s,
            expected: -(s + reg.gamma) / 2.0,
            fit,
            baseline_fit,
            baseline_deviation,
            series,
            baseline,
        });
    }
    let gap = entries[1].fit.exponent - entries[0].fit.exponent;
    Ok(DecayReport {
        grid: (grid.n(), grid.box_scale()),
        model: opts.model,
        data,
        window,
        entries,
        gap,
    })
}
