//! Radial dyadic partition of unity.
//!
//! `χ` equals 1 on `[0, 3/4]`, 0 on `[4/3, ∞)` and moves between them with the
//! C^∞ transition `e^{-1/x}`. The annular profile is `φ(ρ) = χ(ρ/2) - χ(ρ)`,
//! supported in `[3/4, 8/3]`, so `Σ_j φ(2^{-j}ρ)` telescopes to one. The band
//! weights on a grid are additionally divided by their computed sum, which
//! removes the last few ulps of summation error.

use std::ops::RangeInclusive;

use rustfft::num_complex::Complex64;

use crate::spectral::{Grid, SpectralField};
use crate::{Error, Result};

const CHI_LO: f64 = 0.75;
const CHI_HI: f64 = 4.0 / 3.0;
pub const PHI_LO: f64 = 0.75;
pub const PHI_HI: f64 = 8.0 / 3.0;

fn bump_edge(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        (-1.0 / x).exp()
    }
}

/// Smooth radial low-pass profile: 1 on `[0, 3/4]`, 0 from `4/3` on.
pub fn chi(rho: f64) -> f64 {
    let t = (rho - CHI_LO) / (CHI_HI - CHI_LO);
    let a = bump_edge(t);
    let b = bump_edge(1.0 - t);
    if a == 0.0 {
        1.0
    } else if b == 0.0 {
        0.0
    } else {
        b / (a + b)
    }
}

/// Annular profile supported in `[3/4, 8/3]`.
pub fn phi(rho: f64) -> f64 {
    (chi(0.5 * rho) - chi(rho)).max(0.0)
}

/// Dyadic bands resolvable on one grid, with their weights tabulated by `|m|²`.
#[derive(Debug, Clone)]
pub struct DyadicPartition {
    grid: Grid,
    j_min: i32,
    j_max: i32,
    /// `weights[j - j_min][m2]`, normalized so each column sums to one.
    weights: Vec<Vec<f64>>,
    mode_m2: Vec<u32>,
}

pub fn build_partition(grid: &Grid) -> Result<DyadicPartition> {
    let m = grid.box_scale();
    let k_min = grid.k_min();
    let k_corner = (grid.max_m2() as f64).sqrt() / m;

    // smallest j whose annulus reaches above k_min, largest whose annulus starts below the corner
    let mut j_min = 0i32;
    while 2f64.powi(j_min) * PHI_HI > k_min {
        j_min -= 1;
    }
    while 2f64.powi(j_min) * PHI_HI <= k_min {
        j_min += 1;
    }
    let mut j_max = j_min;
    while 2f64.powi(j_max + 1) * PHI_LO < k_corner {
        j_max += 1;
    }

    let full = (j_min..=j_max).any(|j| {
        let lo = 2f64.powi(j) * PHI_LO;
        let hi = 2f64.powi(j) * PHI_HI;
        lo >= k_min && hi <= grid.k_max_axis()
    });
    if !full {
        return Err(Error::InvalidGrid(format!(
            "n = {}, M = {m} cannot host one complete dyadic annulus",
            grid.n()
        )));
    }

    let len = grid.max_m2() + 1;
    let radii: Vec<f64> = (0..len).map(|m2| grid.k2_of_m2(m2).sqrt()).collect();
    let mut weights: Vec<Vec<f64>> = (j_min..=j_max)
        .map(|j| {
            let scale = 2f64.powi(-j);
            radii.iter().map(|&r| phi(scale * r)).collect()
        })
        .collect();
    for m2 in 1..len {
        let total: f64 = weights.iter().map(|w| w[m2]).sum();
        if total > 0.0 {
            for w in weights.iter_mut() {
                w[m2] /= total;
            }
        }
    }

    Ok(DyadicPartition {
        grid: *grid,
        j_min,
        j_max,
        weights,
        mode_m2: grid.mode_m2().into_iter().map(|v| v as u32).collect(),
    })
}

impl DyadicPartition {
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn j_min(&self) -> i32 {
        self.j_min
    }

    pub fn j_max(&self) -> i32 {
        self.j_max
    }

    pub fn bands(&self) -> RangeInclusive<i32> {
        self.j_min..=self.j_max
    }

    pub fn n_bands(&self) -> usize {
        (self.j_max - self.j_min + 1) as usize
    }

    pub fn check_band(&self, j: i32) -> Result<()> {
        if j < self.j_min || j > self.j_max {
            return Err(Error::BandOutOfRange {
                j,
                min: self.j_min,
                max: self.j_max,
            });
        }
        Ok(())
    }

    /// Normalized weight of band `j` at integer `|m|²`; zero outside the range.
    pub fn weight(&self, j: i32, m2: usize) -> f64 {
        if j < self.j_min || j > self.j_max {
            return 0.0;
        }
        self.weights[(j - self.j_min) as usize][m2]
    }

    /// Band weights of `j` indexed by `|m|²`.
    pub fn table(&self, j: i32) -> Result<&[f64]> {
        self.check_band(j)?;
        Ok(&self.weights[(j - self.j_min) as usize])
    }

    /// Weights of `Ṡ_j = Σ_{j' ≤ j-1} Δ_{j'}` indexed by `|m|²`.
    pub fn low_table(&self, j: i32) -> Vec<f64> {
        let mut out = vec![0.0; self.grid.max_m2() + 1];
        for jj in self.j_min..j.min(self.j_max + 1) {
            for (o, w) in out.iter_mut().zip(&self.weights[(jj - self.j_min) as usize]) {
                *o += w;
            }
        }
        out
    }

    /// `|m|²` of every mode in storage order.
    pub fn mode_m2(&self) -> &[u32] {
        &self.mode_m2
    }

    /// Multiplies each coefficient by `table[|m|²]`.
    pub fn apply_table(&self, u: &SpectralField, table: &[f64]) -> SpectralField {
        let comps: Vec<Vec<Complex64>> = u
            .components()
            .iter()
            .map(|c| {
                c.iter()
                    .zip(&self.mode_m2)
                    .map(|(&v, &m2)| v * table[m2 as usize])
                    .collect()
            })
            .collect();
        SpectralField::from_components(*u.grid(), comps).expect("same layout")
    }

    /// `Δ_j u`.
    pub fn block(&self, u: &SpectralField, j: i32) -> Result<SpectralField> {
        self.check_grid(u)?;
        Ok(self.apply_table(u, self.table(j)?))
    }

    /// `Ṡ_j u`; zero below the band range and the mean-free part above it.
    pub fn low_cutoff(&self, u: &SpectralField, j: i32) -> Result<SpectralField> {
        self.check_grid(u)?;
        Ok(self.apply_table(u, &self.low_table(j)))
    }

    /// `Σ_k |û(k)|²` grouped by `|m|²`, summed over components.
    pub fn shell_energy(&self, u: &SpectralField) -> Vec<f64> {
        let mut e = vec![0.0; self.grid.max_m2() + 1];
        for c in u.components() {
            for (v, &m2) in c.iter().zip(&self.mode_m2) {
                e[m2 as usize] += v.norm_sqr();
            }
        }
        e
    }

    /// `‖Δ_j u‖_{L²}` for every band, from Parseval.
    pub fn band_l2_norms(&self, u: &SpectralField) -> Vec<f64> {
        let e = self.shell_energy(u);
        let vol = self.grid.volume();
        self.weights
            .iter()
            .map(|w| {
                let s: f64 = w.iter().zip(&e).map(|(wi, ei)| wi * wi * ei).sum();
                (vol * s).sqrt()
            })
            .collect()
    }

    pub(crate) fn check_grid(&self, u: &SpectralField) -> Result<()> {
        if *u.grid() != self.grid {
            return Err(Error::GridMismatch);
        }
        Ok(())
    }

    /// Largest deviation of `Σ_j φ_j` from one over all nonzero grid radii.
    pub fn unity_residual(&self) -> f64 {
        let mut present = vec![false; self.grid.max_m2() + 1];
        for &m2 in &self.mode_m2 {
            present[m2 as usize] = true;
        }
        (1..present.len())
            .filter(|&m2| present[m2])
            .map(|m2| {
                let s: f64 = self.weights.iter().map(|w| w[m2]).sum();
                (s - 1.0).abs()
            })
            .fold(0.0, f64::max)
    }
}
