//! Operational smallness threshold: the largest amplitude with `sup_t E(t)/E(0) ≤ 2`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::data::{gen_initial_data, DataSpec, RegularityParams};
use super::track::smallness_functional;
use crate::dynamics::{IntegratorConfig, Model, PhysicalParams, SolverState, Stepper};
use crate::spectral::Grid;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanOptions {
    /// Increasing amplitudes to try first.
    pub amplitudes: Vec<f64>,
    pub horizon: f64,
    pub bisection_steps: usize,
    #[serde(default = "default_cap")]
    pub ratio_cap: f64,
}

fn default_cap() -> f64 {
    2.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanEntry {
    pub amplitude: f64,
    /// `sup_t E(t)/E(0)` up to the horizon, or up to the first time it passed the cap.
    pub sup_ratio: Option<f64>,
    pub exceeded: bool,
    /// Why the run stopped early, if it did.
    pub reason: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdReport {
    pub sigma: f64,
    pub horizon: f64,
    pub ratio_cap: f64,
    pub entries: Vec<ScanEntry>,
    /// Amplitudes `(a, b)` with `a < b` where the ratio decreased; reported, not asserted.
    pub monotonicity_violations: Vec<(f64, f64)>,
    /// Largest amplitude found with ratio within the cap; `None` if even the smallest exceeded it.
    pub threshold: Option<f64>,
    /// Final `(ok, exceeded)` bracket; `None` when no amplitude exceeded the cap.
    pub bracket: Option<(f64, f64)>,
}

fn scan_one(
    grid: &Grid,
    spec: &DataSpec,
    params: &PhysicalParams,
    cfg: &IntegratorConfig,
    sigma: f64,
    cap: f64,
) -> Result<ScanEntry> {
    let (u, b) = gen_initial_data(spec, grid)?;
    let mut state = SolverState::new(u, b, 0.0)?;
    let e0 = smallness_functional(&state, sigma)?;
    let mut entry = ScanEntry {
        amplitude: spec.amplitude,
        sup_ratio: Some(1.0),
        exceeded: false,
        reason: None,
    };
    if e0 == 0.0 {
        return Ok(entry);
    }
    let mut stepper = Stepper::new(*grid, *params, *cfg, Model::HallMhd)?;
    let n = cfg.steps_from(0.0)?;
    let mut sup = 1.0f64;
    for _ in 0..n {
        state = match stepper.step(&state) {
            Ok(s) => s,
            Err(e @ (Error::CflViolation { .. } | Error::NonFinite { .. })) => {
                entry.exceeded = true;
                entry.reason = Some(e.to_string());
                entry.sup_ratio = Some(sup);
                return Ok(entry);
            }
            Err(e) => return Err(e),
        };
        sup = sup.max(smallness_functional(&state, sigma)? / e0);
        if sup > cap {
            entry.exceeded = true;
            entry.reason = Some(format!("ratio passed {cap} at t = {}", state.t));
            break;
        }
    }
    entry.sup_ratio = Some(sup);
    Ok(entry)
}

pub fn smallness_scan(
    grid: &Grid,
    spec: &DataSpec,
    params: &PhysicalParams,
    cfg: &IntegratorConfig,
    reg: &RegularityParams,
    opts: &ScanOptions,
) -> Result<ThresholdReport> {
    reg.validate()?;
    if opts.amplitudes.is_empty() || opts.amplitudes.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::param(
            "scan amplitudes must be a non-empty increasing list",
        ));
    }
    let cfg = IntegratorConfig {
        t_end: opts.horizon,
        ..*cfg
    };
    let cap = opts.ratio_cap;
    let mut entries: Vec<ScanEntry> = opts
        .amplitudes
        .par_iter()
        .map(|&a| scan_one(grid, &spec.with_amplitude(a), params, &cfg, reg.sigma, cap))
        .collect::<Result<_>>()?;

    let first_bad = entries.iter().position(|e| e.exceeded);
    let mut bracket =
        first_bad.and_then(|i| (i > 0).then(|| (entries[i - 1].amplitude, entries[i].amplitude)));
    if let Some((mut lo, mut hi)) = bracket {
        for _ in 0..opts.bisection_steps {
            let mid = 0.5 * (lo + hi);
            let e = scan_one(grid, &spec.with_amplitude(mid), params, &cfg, reg.sigma, cap)?;
            if e.exceeded {
                hi = mid;
            } else {
                lo = mid;
            }
            entries.push(e);
        }
        bracket = Some((lo, hi));
    }
    entries.sort_by(|a, b| a.amplitude.total_cmp(&b.amplitude));

    let mut monotonicity_violations = Vec::new();
    for w in entries.windows(2) {
        if let (Some(r0), Some(r1)) = (w[0].sup_ratio, w[1].sup_ratio) {
            if !w[0].exceeded && !w[1].exceeded && r1 < r0 {
                monotonicity_violations.push((w[0].amplitude, w[1].amplitude));
            }
        }
    }
    let threshold = match (first_bad, bracket) {
        (_, Some((lo, _))) => Some(lo),
        (None, None) => entries.last().map(|e| e.amplitude),
        (Some(_), None) => None,
    };
    Ok(ThresholdReport {
        sigma: reg.sigma,
        horizon: opts.horizon,
        ratio_cap: cap,
        entries,
        monotonicity_violations,
        threshold,
        bracket,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::Scheme;

    #[test]
    fn vanishing_amplitude_gives_unit_ratio() {
        let g = Grid::new(16, 1.0).unwrap();
        let p = PhysicalParams::new(1.0, 1.0, 1.0).unwrap();
        let spec = DataSpec {
            amplitude: 1.0,
            spectrum_slope: 0.0,
            band: (0.0, 3.0),
            seed: 2,
            divergence_free: true,
        };
        let cfg = IntegratorConfig::new(0.01, Scheme::IfRk3, 0.1);
        let opts = ScanOptions {
            amplitudes: vec![1e-8, 1e-6],
            horizon: 0.1,
            bisection_steps: 0,
            ratio_cap: 2.0,
        };
        let r = smallness_scan(&g, &spec, &p, &cfg, &RegularityParams::default(), &opts).unwrap();
        for e in &r.entries {
            assert!((e.sup_ratio.unwrap() - 1.0).abs() < 1e-6);
        }
        assert_eq!(r.threshold, Some(1e-6));
        assert!(r.bracket.is_none());
    }
}
