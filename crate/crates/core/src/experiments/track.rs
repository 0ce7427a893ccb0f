use serde::{Deserialize, Serialize};

use crate::dynamics::audit::{blowup_indicator, blowup_integral, BlowupReport};
use crate::dynamics::{SolverState, Stepper};
use crate::lp::besov::besov_sup_band;
use crate::lp::DyadicPartition;
use crate::series::TimeSeries;
use crate::spectral::norms::h;
use crate::{Error, Result};

/// `E = ‖u‖_{H^{1/2+σ}} + ‖B‖_{H^{3/2}}`.
pub fn smallness_functional(state: &SolverState, sigma: f64) -> Result<f64> {
    Ok(h(&state.u, 0.5 + sigma)? + h(&state.b, 1.5)?)
}

/// `‖u‖_{Ḃ^{-γ}_{2,∞}} + ‖B‖_{Ḃ^{-γ}_{2,∞}}`.
pub fn besov_negative(state: &SolverState, gamma: f64, partition: &DyadicPartition) -> Result<f64> {
    if !(0.0..=2.5).contains(&gamma) {
        return Err(Error::param(format!("gamma must lie in [0,5/2], got {gamma}")));
    }
    if !state.u.is_mean_zero() || !state.b.is_mean_zero() {
        return Err(Error::NonzeroMean("negative Besov norm"));
    }
    Ok(besov_sup_band(&state.u, -gamma, partition).1 + besov_sup_band(&state.b, -gamma, partition).1)
}

pub fn besov_negative_track(
    trajectory: &[SolverState],
    gamma: f64,
    partition: &DyadicPartition,
) -> Result<TimeSeries> {
    let mut series = TimeSeries::new(format!("besov_neg({gamma})"));
    for s in trajectory {
        series.push(s.t, besov_negative(s, gamma, partition)?)?;
    }
    Ok(series)
}

/// Global-regime diagnostics of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrackReport {
    pub times: Vec<f64>,
    /// `E(t) / E(0)`.
    pub e_ratio: Vec<f64>,
    pub sup_ratio: f64,
    pub blowup_series: Vec<f64>,
    pub blowup: BlowupReport,
    pub besov_neg: TimeSeries,
    pub besov_initial: f64,
    pub besov_sup: f64,
    /// `sup_t ‖·‖_{Ḃ^{-γ}} / value at t = 0 - 1`.
    pub besov_margin: f64,
}

/// Runs `stepper` to its `t_end`, sampling every `every` steps.
pub fn track_run(
    initial: SolverState,
    stepper: &mut Stepper,
    sigma: f64,
    gamma: f64,
    partition: &DyadicPartition,
    every: usize,
) -> Result<(SolverState, TrackReport)> {
    let e0 = smallness_functional(&initial, sigma)?;
    let mut times = Vec::new();
    let mut e_ratio = Vec::new();
    let mut blowup_series = Vec::new();
    let mut besov = TimeSeries::new(format!("besov_neg({gamma})"));
    let end = stepper.run(initial, every, |s| {
        let e = smallness_functional(s, sigma)?;
        times.push(s.t);
        e_ratio.push(if e0 > 0.0 { e / e0 } else { 1.0 });
        blowup_series.push(blowup_indicator(s)?);
        besov.push(s.t, besov_negative(s, gamma, partition)?)
    })?;
    let blowup = blowup_integral(&times, &blowup_series)?;
    let besov_initial = besov.samples()[0].1;
    let besov_sup = besov.sup();
    let besov_margin = if besov_initial > 0.0 {
        besov_sup / besov_initial - 1.0
    } else {
        0.0
    };
    Ok((
        end,
        TrackReport {
            sup_ratio: e_ratio.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
            times,
            e_ratio,
            blowup_series,
            blowup,
            besov_neg: besov,
            besov_initial,
            besov_sup,
            besov_margin,
        },
    ))
}
