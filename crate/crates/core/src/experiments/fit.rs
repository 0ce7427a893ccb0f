use serde::{Deserialize, Serialize};

use crate::series::TimeSeries;
use crate::{Error, Result};

/// Above this log-deviation a power law is a poor model for the window.
pub const POWER_LAW_RESIDUAL_WARN: f64 = 0.1;

/// `value ≈ e^intercept (1 + t)^exponent` on the window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub exponent: f64,
    pub intercept: f64,
    pub window: (f64, f64),
    /// Largest `|log value - fitted log value|` over the window.
    pub residual: f64,
    pub n_samples: usize,
    pub warning: Option<String>,
}

pub fn fit_decay(series: &TimeSeries, window: (f64, f64)) -> Result<DecayFit> {
    let (lo, hi) = window;
    if !(lo >= 1.0) {
        return Err(Error::param(format!("fit window must start at t >= 1, got {lo}")));
    }
    if !(hi > lo) {
        return Err(Error::param(format!("fit window ({lo}, {hi}) is empty")));
    }
    let pts: Vec<(f64, f64)> = series
        .samples()
        .iter()
        .filter(|(t, _)| *t >= lo && *t <= hi)
        .cloned()
        .collect();
    if pts.len() < 10 {
        return Err(Error::param(format!(
            "fit needs at least 10 samples in [{lo}, {hi}], found {}",
            pts.len()
        )));
    }
    if let Some(&(t, v)) = pts.iter().find(|(_, v)| !(*v > 0.0)) {
        return Err(Error::param(format!(
            "fit needs positive values, got {v} at t = {t}"
        )));
    }
    let xy: Vec<(f64, f64)> = pts.iter().map(|&(t, v)| ((1.0 + t).ln(), v.ln())).collect();
    let n = xy.len() as f64;
    let mx = xy.iter().map(|p| p.0).sum::<f64>() / n;
    let my = xy.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = xy.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = xy.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let exponent = sxy / sxx;
    let intercept = my - exponent * mx;
    let residual = xy
        .iter()
        .map(|&(x, y)| (y - intercept - exponent * x).abs())
        .fold(0.0, f64::max);
    let warning = (residual > POWER_LAW_RESIDUAL_WARN).then(|| {
        format!("max log deviation {residual:.3} exceeds {POWER_LAW_RESIDUAL_WARN}; a power law fits poorly")
    });
    Ok(DecayFit {
        exponent,
        intercept,
        window,
        residual,
        n_samples: pts.len(),
        warning,
    })
}
