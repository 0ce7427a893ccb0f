//! Continuum heat-flow decay by radial quadrature.
//!
//! For radial data `|û(ρ)|²` on `R³`,
//! `‖Λ^s e^{tΔ} u₀‖² = ∫₀^∞ ρ^{2s} e^{-2tρ²} |û(ρ)|² 4πρ² dρ`.

use serde::{Deserialize, Serialize};

use super::fit::{fit_decay, DecayFit};
use crate::series::TimeSeries;
use crate::{Error, Result};

/// `|û(ρ)|² = ρ^exponent` on `(0, cutoff]`, zero beyond.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialProfile {
    pub exponent: f64,
    pub cutoff: f64,
}

impl RadialProfile {
    /// `|û|² = ρ^{2γ-3}` on `[0, 1]`, the borderline profile of `Ḃ^{-γ}_{2,∞}`.
    pub fn matched(gamma: f64) -> Self {
        RadialProfile {
            exponent: 2.0 * gamma - 3.0,
            cutoff: 1.0,
        }
    }
}

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7]
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// Gauss-Kronrod 7-15 on `[a, b]`: `(kronrod, |kronrod - gauss|)`.
fn gk15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for i in 0..7 {
        let x = h * XGK[i];
        let s = f(c - x) + f(c + x);
        k += WGK[i] * s;
        if i % 2 == 1 {
            g += WG[i / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

fn adaptive(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
    let (k, err) = gk15(f, a, b);
    if err <= tol || depth == 0 {
        return k;
    }
    let m = 0.5 * (a + b);
    adaptive(f, a, m, 0.5 * tol, depth - 1) + adaptive(f, m, b, 0.5 * tol, depth - 1)
}

/// `∫ₐᵇ f` to relative accuracy about `rel`, with extra breakpoints.
pub fn integrate(f: impl Fn(f64) -> f64, breaks: &[f64], rel: f64) -> f64 {
    let rough: f64 = breaks.windows(2).map(|w| gk15(&f, w[0], w[1]).0.abs()).sum();
    let tol = rel * rough.max(f64::MIN_POSITIVE);
    breaks
        .windows(2)
        .map(|w| adaptive(&f, w[0], w[1], tol / (breaks.len() - 1) as f64, 48))
        .sum()
}

/// `t ↦ ‖Λ^s e^{tΔ}u₀‖_{L²}` (not squared) for a radial profile.
pub fn heat_oracle_radial(profile: &RadialProfile, s: f64, t_grid: &[f64]) -> Result<TimeSeries> {
    if !(profile.cutoff > 0.0 && profile.cutoff.is_finite()) {
        return Err(Error::param("profile cutoff must be positive and finite"));
    }
    // integrand ~ ρ^{2s + exponent + 2} at the origin
    let power = 2.0 * s + profile.exponent + 2.0;
    if !(power > -1.0) {
        return Err(Error::param(format!(
            "profile is not integrable at the origin: integrand ~ rho^{power}"
        )));
    }
    if t_grid.is_empty() || t_grid.iter().any(|&t| !(t > 0.0)) {
        return Err(Error::param("oracle times must be positive"));
    }
    let mut series = TimeSeries::new("heat_oracle");
    for &t in t_grid {
        let f = |rho: f64| {
            if rho <= 0.0 {
                return 0.0;
            }
            4.0 * std::f64::consts::PI * rho.powf(power) * (-2.0 * t * rho * rho).exp()
        };
        // the mass sits near ρ ~ 1/√t; break the interval there
        let width = 1.0 / (2.0 * t).sqrt();
        let mut breaks = vec![0.0];
        for m in [0.25, 1.0, 4.0, 16.0] {
            let x = m * width;
            if x < profile.cutoff {
                breaks.push(x);
            }
        }
        breaks.push(profile.cutoff);
        series.push(t, integrate(f, &breaks, 1e-12).sqrt())?;
    }
    Ok(series)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub s: f64,
    pub gamma: f64,
    /// `-(s + γ)/2`.
    pub expected_slope: f64,
    /// Least-squares slope of `log ‖·‖` against `log t`.
    pub slope: f64,
    /// The same series through [`fit_decay`] in `log(1 + t)`.
    pub fit: DecayFit,
    pub series: TimeSeries,
}

/// Decay slope of the matched profile over `n` log-spaced times in `[t_lo, t_hi]`.
pub fn oracle_decay(s: f64, gamma: f64, t_lo: f64, t_hi: f64, n: usize) -> Result<OracleReport> {
    if !(t_lo > 0.0 && t_hi > t_lo) || n < 10 {
        return Err(Error::param(
            "oracle window needs 0 < t_lo < t_hi and at least 10 points",
        ));
    }
    let ratio = (t_hi / t_lo).ln();
    let times: Vec<f64> = (0..n)
        .map(|i| t_lo * (ratio * i as f64 / (n - 1) as f64).exp())
        .collect();
    let series = heat_oracle_radial(&RadialProfile::matched(gamma), s, &times)?;
    let pts: Vec<(f64, f64)> = series.samples().iter().map(|&(t, v)| (t.ln(), v.ln())).collect();
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let fit = fit_decay(&series, (t_lo, t_hi))?;
    Ok(OracleReport {
        s,
        gamma,
        expected_slope: -(s + gamma) / 2.0,
        slope: sxy / sxx,
        fit,
        series,
    })
}
