//! Homogeneous Besov norms and Chemin-Lerner mixed time-space norms.

use serde::{Deserialize, Serialize};

use super::DyadicPartition;
use crate::spectral::norms::lp_physical;
use crate::spectral::SpectralField;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BesovSpec {
    pub s: f64,
    #[serde(with = "super::exponent")]
    pub p: f64,
    #[serde(with = "super::exponent")]
    pub r: f64,
}

impl BesovSpec {
    pub fn new(s: f64, p: f64, r: f64) -> Result<Self> {
        let spec = BesovSpec { s, p, r };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.s.is_finite() {
            return Err(Error::param(format!(
                "Besov regularity must be finite, got {}",
                self.s
            )));
        }
        if !(self.p >= 1.0) || !(self.r >= 1.0) {
            return Err(Error::param(format!(
                "Besov exponents need p, r >= 1, got p = {}, r = {}",
                self.p, self.r
            )));
        }
        Ok(())
    }

    /// Key used in diagnostics records, e.g. `B(-1.5,2,inf)`.
    pub fn label(&self) -> String {
        let e = |v: f64| {
            if v.is_infinite() {
                "inf".to_string()
            } else {
                v.to_string()
            }
        };
        format!("B({},{},{})", self.s, e(self.p), e(self.r))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MixedNormSpec {
    #[serde(with = "super::exponent")]
    pub q: f64,
    pub besov: BesovSpec,
}

impl MixedNormSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.q >= 1.0) {
            return Err(Error::param(format!(
                "time exponent needs q >= 1, got {}",
                self.q
            )));
        }
        self.besov.validate()
    }
}

/// `‖a‖_{ℓ^r}` of nonnegative entries.
pub fn lr_norm(a: impl IntoIterator<Item = f64>, r: f64) -> f64 {
    if r.is_infinite() {
        return a.into_iter().fold(0.0, f64::max);
    }
    let v: Vec<f64> = a.into_iter().collect();
    let scale = v.iter().cloned().fold(0.0, f64::max);
    if scale == 0.0 {
        return 0.0;
    }
    scale * v.iter().map(|x| (x / scale).powf(r)).sum::<f64>().powf(1.0 / r)
}

/// `‖Δ_j u‖_{L^p}` for every band `j_min..=j_max`.
pub fn band_lp_norms(u: &SpectralField, p: f64, partition: &DyadicPartition) -> Result<Vec<f64>> {
    partition.check_grid(u)?;
    if !(p >= 1.0) {
        return Err(Error::param(format!("L^p needs p >= 1, got {p}")));
    }
    if p == 2.0 {
        return Ok(partition.band_l2_norms(u));
    }
    // stack every band into one field so the inverse transforms pair up
    let ncomp = u.n_components();
    let mut parts = Vec::with_capacity(partition.n_bands());
    for j in partition.bands() {
        parts.push(partition.block(u, j)?);
    }
    let phys = SpectralField::stack(&parts)?.to_physical();
    let comps = phys.into_components();
    comps
        .chunks(ncomp)
        .map(|c| {
            let band = crate::spectral::PhysicalField::from_components(*u.grid(), c.to_vec())?;
            lp_physical(&band, p)
        })
        .collect()
}

/// `ℓ^r` over bands of `2^{js} b_j`, with `b` indexed from `j_min`.
pub fn besov_from_bands(bands: &[f64], j_min: i32, s: f64, r: f64) -> f64 {
    lr_norm(
        bands
            .iter()
            .enumerate()
            .map(|(i, b)| 2f64.powf((j_min + i as i32) as f64 * s) * b),
        r,
    )
}

pub fn besov_norm(u: &SpectralField, spec: BesovSpec, partition: &DyadicPartition) -> Result<f64> {
    spec.validate()?;
    if spec.s <= 0.0 && !u.is_mean_zero() {
        return Err(Error::NonzeroMean("Besov norm with s <= 0"));
    }
    let bands = band_lp_norms(u, spec.p, partition)?;
    Ok(besov_from_bands(&bands, partition.j_min(), spec.s, spec.r))
}

/// `(j, 2^{js} ‖Δ_j u‖_{L²})` at the band attaining the `Ḃ^s_{2,∞}` norm.
pub fn besov_sup_band(u: &SpectralField, s: f64, partition: &DyadicPartition) -> (i32, f64) {
    partition
        .band_l2_norms(u)
        .into_iter()
        .enumerate()
        .map(|(i, b)| {
            let j = partition.j_min() + i as i32;
            (j, 2f64.powf(j as f64 * s) * b)
        })
        .fold(
            (partition.j_min(), 0.0),
            |best, x| if x.1 > best.1 { x } else { best },
        )
}

/// Bounds `[lo, hi]` with `lo ‖u‖_{Ḣ^s} ≤ ‖u‖_{Ḃ^s_{2,2}} ≤ hi ‖u‖_{Ḣ^s}` for every field.
///
/// The ratio of the squared norms is a convex combination over modes of
/// `Σ_j (2^j/|k|)^{2s} φ_j(k)²`, so its extremes over the grid radii are sharp.
pub fn hs_equivalence(partition: &DyadicPartition, s: f64) -> (f64, f64) {
    let g = partition.grid();
    let mut present = vec![false; g.max_m2() + 1];
    for &m2 in partition.mode_m2() {
        present[m2 as usize] = true;
    }
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for m2 in 1..present.len() {
        if !present[m2] {
            continue;
        }
        let k = g.k2_of_m2(m2).sqrt();
        let w: f64 = partition
            .bands()
            .map(|j| {
                let phi = partition.weight(j, m2);
                (2f64.powi(j) / k).powf(2.0 * s) * phi * phi
            })
            .sum();
        lo = lo.min(w.sqrt());
        hi = hi.max(w.sqrt());
    }
    (lo, hi)
}

fn check_series(series: &[(f64, SpectralField)]) -> Result<()> {
    if series.is_empty() {
        return Err(Error::param("mixed norm of an empty series"));
    }
    if series.windows(2).any(|w| !(w[1].0 > w[0].0)) {
        return Err(Error::param("series times must be strictly increasing"));
    }
    Ok(())
}

/// Trapezoidal `L^q` norm in time of nonnegative samples; `q = ∞` is the max.
pub fn time_lq(times: &[f64], values: &[f64], q: f64) -> f64 {
    if q.is_infinite() {
        return values.iter().cloned().fold(0.0, f64::max);
    }
    let scale = values.iter().cloned().fold(0.0, f64::max);
    if scale == 0.0 {
        return 0.0;
    }
    let mut acc = 0.0;
    for i in 1..times.len() {
        let a = (values[i - 1] / scale).powf(q);
        let b = (values[i] / scale).powf(q);
        acc += 0.5 * (times[i] - times[i - 1]) * (a + b);
    }
    scale * acc.powf(1.0 / q)
}

/// Band norms per sample, `[sample][band]`.
pub fn band_history(
    series: &[(f64, SpectralField)],
    p: f64,
    partition: &DyadicPartition,
) -> Result<Vec<Vec<f64>>> {
    series
        .iter()
        .map(|(_, u)| band_lp_norms(u, p, partition))
        .collect()
}

/// `‖u‖_{L̃^q_T(Ḃ^s_{p,r})}`: `L^q` in time inside the band sum.
pub fn mixed_norm(
    series: &[(f64, SpectralField)],
    spec: MixedNormSpec,
    partition: &DyadicPartition,
) -> Result<f64> {
    spec.validate()?;
    check_series(series)?;
    let times: Vec<f64> = series.iter().map(|(t, _)| *t).collect();
    let hist = band_history(series, spec.besov.p, partition)?;
    Ok(mixed_from_history(&times, &hist, spec, partition.j_min()))
}

pub fn mixed_from_history(times: &[f64], hist: &[Vec<f64>], spec: MixedNormSpec, j_min: i32) -> f64 {
    let nb = hist[0].len();
    let per_band: Vec<f64> = (0..nb)
        .map(|b| {
            let col: Vec<f64> = hist.iter().map(|row| row[b]).collect();
            time_lq(times, &col, spec.q)
        })
        .collect();
    besov_from_bands(&per_band, j_min, spec.besov.s, spec.besov.r)
}

/// `‖u‖_{L^q_T(Ḃ^s_{p,r})}`: the Besov norm first, then `L^q` in time.
pub fn time_outside_norm(
    series: &[(f64, SpectralField)],
    spec: MixedNormSpec,
    partition: &DyadicPartition,
) -> Result<f64> {
    spec.validate()?;
    check_series(series)?;
    let times: Vec<f64> = series.iter().map(|(t, _)| *t).collect();
    let hist = band_history(series, spec.besov.p, partition)?;
    Ok(outside_from_history(&times, &hist, spec, partition.j_min()))
}

pub fn outside_from_history(times: &[f64], hist: &[Vec<f64>], spec: MixedNormSpec, j_min: i32) -> f64 {
    let per_time: Vec<f64> = hist
        .iter()
        .map(|row| besov_from_bands(row, j_min, spec.besov.s, spec.besov.r))
        .collect();
    time_lq(times, &per_time, spec.q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::build_partition;
    use crate::spectral::random::{random_field, RandomFieldSpec};
    use crate::spectral::Grid;

    #[test]
    fn lr_norm_cases() {
        assert_eq!(lr_norm([3.0, 4.0], 2.0), 5.0);
        assert_eq!(lr_norm([3.0, 4.0], f64::INFINITY), 4.0);
        assert_eq!(lr_norm([3.0, 4.0], 1.0), 7.0);
        assert_eq!(lr_norm([0.0, 0.0], 3.0), 0.0);
    }

    #[test]
    fn rejects_small_exponents() {
        assert!(BesovSpec::new(0.0, 0.5, 2.0).is_err());
        assert!(BesovSpec::new(0.0, 2.0, 0.9).is_err());
        assert!(BesovSpec::new(0.0, f64::INFINITY, f64::INFINITY).is_ok());
    }

    #[test]
    fn spec_json_uses_inf() {
        let s = BesovSpec::new(-1.5, 2.0, f64::INFINITY).unwrap();
        let text = serde_json::to_string(&s).unwrap();
        assert_eq!(text, r#"{"s":-1.5,"p":2.0,"r":"inf"}"#);
        let back: BesovSpec = serde_json::from_str(&text).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn lp_band_norms_match_parseval_at_p2() {
        let g = Grid::new(16, 1.0).unwrap();
        let part = build_partition(&g).unwrap();
        let u = random_field(&g, &RandomFieldSpec::vector(1.0), 3);
        let fast = part.band_l2_norms(&u);
        let mut slow = Vec::new();
        for j in part.bands() {
            let b = part.block(&u, j).unwrap().to_physical();
            slow.push(lp_physical(&b, 2.0).unwrap());
        }
        for (a, b) in fast.iter().zip(&slow) {
            assert!((a - b).abs() < 1e-12 * (1.0 + a));
        }
    }
}
