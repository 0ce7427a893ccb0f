use serde::{Deserialize, Serialize};

use crate::lp::besov::besov_sup_band;
use crate::lp::partition::{PHI_HI, PHI_LO};
use crate::lp::DyadicPartition;
use crate::spectral::norms::{h, l2};
use crate::spectral::random::{random_field, RandomFieldSpec};
use crate::spectral::{Grid, SpectralField};
use crate::{Error, Result};

/// Extra velocity regularity `σ`, negative Besov index `γ` and decay order `s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegularityParams {
    pub sigma: f64,
    pub gamma: f64,
    pub s: f64,
}

impl Default for RegularityParams {
    fn default() -> Self {
        RegularityParams {
            sigma: 0.5,
            gamma: 1.5,
            s: 0.0,
        }
    }
}

impl RegularityParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.sigma > 0.0 && self.sigma < 2.0) {
            return Err(Error::param(format!(
                "sigma must lie in (0,2), got {}",
                self.sigma
            )));
        }
        if !(0.0..=2.5).contains(&self.gamma) {
            return Err(Error::param(format!(
                "gamma must lie in [0,5/2], got {}",
                self.gamma
            )));
        }
        if !(self.s >= 0.0 && self.s.is_finite()) {
            return Err(Error::param(format!("s must be nonnegative, got {}", self.s)));
        }
        Ok(())
    }
}

/// Random initial data: a power-law envelope `|û(k)| ∝ |k|^{-α}` on a radial band,
/// rescaled so the root-mean-square of each field equals `amplitude`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataSpec {
    pub amplitude: f64,
    pub spectrum_slope: f64,
    pub band: (f64, f64),
    pub seed: u64,
    #[serde(default = "yes")]
    pub divergence_free: bool,
}

fn yes() -> bool {
    true
}

impl DataSpec {
    pub fn with_amplitude(self, amplitude: f64) -> Self {
        DataSpec { amplitude, ..self }
    }

    pub fn with_seed(self, seed: u64) -> Self {
        DataSpec { seed, ..self }
    }

    pub fn validate(&self, grid: &Grid) -> Result<()> {
        if !(self.amplitude >= 0.0 && self.amplitude.is_finite()) {
            return Err(Error::param(format!(
                "amplitude must be nonnegative, got {}",
                self.amplitude
            )));
        }
        if !self.spectrum_slope.is_finite() {
            return Err(Error::param("spectrum_slope must be finite"));
        }
        let (lo, hi) = self.band;
        if !(lo >= 0.0 && lo < hi) {
            return Err(Error::param(format!(
                "band needs 0 <= k_lo < k_hi, got ({lo}, {hi})"
            )));
        }
        // the smallest and largest resolved radii
        let k_min = grid.k_min();
        let k_max = grid.dealias_wavenumber() * 3f64.sqrt();
        if hi < k_min || lo > k_max {
            return Err(Error::param(format!(
                "band ({lo}, {hi}) holds no resolved mode; resolved radii span [{k_min}, {k_max}]"
            )));
        }
        Ok(())
    }
}

fn rescaled(f: SpectralField, amplitude: f64) -> SpectralField {
    let norm = l2(&f);
    if amplitude == 0.0 || norm == 0.0 {
        return SpectralField::zeros(*f.grid(), f.n_components());
    }
    let volume = f.grid().volume();
    f.scaled(amplitude * volume.sqrt() / norm)
}

/// `(u₀, B₀)` from independent seeded streams `2·seed` and `2·seed + 1`.
pub fn gen_initial_data(spec: &DataSpec, grid: &Grid) -> Result<(SpectralField, SpectralField)> {
    spec.validate(grid)?;
    let mut rs = RandomFieldSpec::vector(spec.spectrum_slope).band(spec.band.0, spec.band.1);
    if spec.divergence_free {
        rs = rs.solenoidal();
    }
    let seed = spec.seed.wrapping_mul(2);
    let u = random_field(grid, &rs, seed).with_zero_mean();
    let b = random_field(grid, &rs, seed.wrapping_add(1)).with_zero_mean();
    Ok((rescaled(u, spec.amplitude), rescaled(b, spec.amplitude)))
}

/// Measured regularity of generated data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DataReport {
    pub gamma: f64,
    /// Band attaining `sup_j 2^{-jγ} ‖Δ_j u₀‖`, and the same for `B₀`.
    pub sup_band_u: i32,
    pub sup_band_b: i32,
    /// `‖u₀‖_{Ḃ^{-γ}_{2,∞}} + ‖B₀‖_{Ḃ^{-γ}_{2,∞}}`.
    pub besov_neg: f64,
    /// Slope of `log₂ (‖Δ_j u₀‖² + ‖Δ_j B₀‖²)^{1/2}` in `j` over bands lying
    /// wholly inside the data band; `None` with fewer than two such bands.
    pub gamma_eff: Option<f64>,
    pub l2_u: f64,
    pub l2_b: f64,
    /// `‖u₀‖_{H^s}`, `‖B₀‖_{H^s}` at the requested `s`.
    pub hs_u: f64,
    pub hs_b: f64,
}

pub fn measure_data(
    u: &SpectralField,
    b: &SpectralField,
    spec: &DataSpec,
    reg: &RegularityParams,
    partition: &DyadicPartition,
) -> Result<DataReport> {
    let (ju, vu) = besov_sup_band(u, -reg.gamma, partition);
    let (jb, vb) = besov_sup_band(b, -reg.gamma, partition);
    let bu = partition.band_l2_norms(u);
    let bb = partition.band_l2_norms(b);
    let floor = spec.band.0.max(partition.grid().k_min());
    let pts: Vec<(f64, f64)> = partition
        .bands()
        .zip(bu.iter().zip(&bb))
        .filter(|(j, (x, y))| {
            let scale = 2f64.powi(*j);
            scale * PHI_LO >= floor && scale * PHI_HI <= spec.band.1 && x.hypot(**y) > 0.0
        })
        .map(|(j, (x, y))| (j as f64, x.hypot(*y).log2()))
        .collect();
    let gamma_eff = (pts.len() >= 2).then(|| {
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        sxy / sxx
    });
    Ok(DataReport {
        gamma: reg.gamma,
        sup_band_u: ju,
        sup_band_b: jb,
        besov_neg: vu + vb,
        gamma_eff,
        l2_u: l2(u),
        l2_b: l2(b),
        hs_u: h(u, reg.s)?,
        hs_b: h(b, reg.s)?,
    })
}
