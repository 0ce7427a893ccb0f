use std::f64::consts::PI;

use serde::Serialize;

use crate::{Error, Result};

/// Periodic grid on the torus of side `2πM`.
///
/// Wavenumbers are integer multiples of `1/M`. Coefficients and physical
/// samples are both stored in row-major `(i, j, l)` order with `l` fastest.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Grid {
    n: usize,
    box_scale: f64,
}

impl Grid {
    pub fn new(n: usize, box_scale: f64) -> Result<Self> {
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "n_per_dim must be a power of two >= 8, got {n}"
            )));
        }
        if !(box_scale.is_finite() && box_scale > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "box_scale must be positive, got {box_scale}"
            )));
        }
        Ok(Grid { n, box_scale })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn box_scale(&self) -> f64 {
        self.box_scale
    }

    /// Number of grid points (equivalently, Fourier modes).
    pub fn points(&self) -> usize {
        self.n * self.n * self.n
    }

    pub fn side(&self) -> f64 {
        2.0 * PI * self.box_scale
    }

    pub fn volume(&self) -> f64 {
        self.side().powi(3)
    }

    pub fn dx(&self) -> f64 {
        self.side() / self.n as f64
    }

    pub fn cell_volume(&self) -> f64 {
        self.dx().powi(3)
    }

    pub fn k_min(&self) -> f64 {
        1.0 / self.box_scale
    }

    /// Largest resolved wavenumber magnitude along one axis.
    pub fn k_max_axis(&self) -> f64 {
        self.n as f64 / (2.0 * self.box_scale)
    }

    pub fn nyquist(&self) -> usize {
        self.n / 2
    }

    /// Signed integer wavenumber of array index `i`; the Nyquist index maps to `-n/2`.
    pub fn signed(&self, i: usize) -> i64 {
        let n = self.n as i64;
        let i = i as i64;
        if i < n / 2 {
            i
        } else {
            i - n
        }
    }

    /// Largest integer wavenumber kept by the 2/3 rule.
    pub fn dealias_index(&self) -> i64 {
        (self.n as i64 - 1) / 3
    }

    /// Physical per-axis wavenumber cutoff of the 2/3 rule.
    pub fn dealias_wavenumber(&self) -> f64 {
        self.dealias_index() as f64 / self.box_scale
    }

    pub fn index(&self, i: usize, j: usize, l: usize) -> usize {
        (i * self.n + j) * self.n + l
    }

    pub fn unravel(&self, idx: usize) -> [usize; 3] {
        let n = self.n;
        [idx / (n * n), (idx / n) % n, idx % n]
    }

    /// Index of the mode at `-k`.
    pub fn mirror(&self, idx: usize) -> usize {
        let n = self.n;
        let [i, j, l] = self.unravel(idx);
        self.index((n - i) % n, (n - j) % n, (n - l) % n)
    }

    /// Physical wavenumber per axis index.
    pub fn axis_wavenumbers(&self) -> Vec<f64> {
        (0..self.n)
            .map(|i| self.signed(i) as f64 / self.box_scale)
            .collect()
    }

    /// Wavenumbers used by odd-order derivatives and the Leray projector.
    ///
    /// The Nyquist entry is zero so that first derivatives of real fields stay real.
    pub fn derivative_wavenumbers(&self) -> Vec<f64> {
        (0..self.n)
            .map(|i| {
                if i == self.nyquist() {
                    0.0
                } else {
                    self.signed(i) as f64 / self.box_scale
                }
            })
            .collect()
    }

    /// Squared integer wavenumber per axis index.
    pub fn axis_m2(&self) -> Vec<usize> {
        (0..self.n)
            .map(|i| {
                let m = self.signed(i);
                (m * m) as usize
            })
            .collect()
    }

    /// Largest integer `|m|^2` on the grid (a corner of the cube).
    pub fn max_m2(&self) -> usize {
        3 * self.nyquist() * self.nyquist()
    }

    /// `|k|^2` as a function of the integer `|m|^2`.
    pub fn k2_of_m2(&self, m2: usize) -> f64 {
        m2 as f64 / (self.box_scale * self.box_scale)
    }

    /// Integer `|m|^2` of every mode, in storage order.
    pub fn mode_m2(&self) -> Vec<usize> {
        let a = self.axis_m2();
        let mut out = Vec::with_capacity(self.points());
        for &ai in &a {
            for &aj in &a {
                for &al in &a {
                    out.push(ai + aj + al);
                }
            }
        }
        out
    }

    /// Whether the mode lies inside the 2/3-rule cube.
    pub fn within_dealias(&self, idx: usize) -> bool {
        let k = self.dealias_index();
        self.unravel(idx).iter().all(|&c| self.signed(c).abs() <= k)
    }

    /// Physical coordinate of sample `i` along an axis.
    pub fn coordinate(&self, i: usize) -> f64 {
        i as f64 * self.dx()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_sizes() {
        assert!(Grid::new(4, 1.0).is_err());
        assert!(Grid::new(24, 1.0).is_err());
        assert!(Grid::new(16, 0.0).is_err());
        assert!(Grid::new(16, -2.0).is_err());
        assert!(Grid::new(16, 1.0).is_ok());
    }

    #[test]
    fn wavenumber_extent() {
        let g = Grid::new(64, 16.0).unwrap();
        let k = g.axis_wavenumbers();
        let smallest = k
            .iter()
            .filter(|v| **v != 0.0)
            .fold(f64::INFINITY, |m, v| m.min(v.abs()));
        assert_eq!(smallest, 1.0 / 16.0);
        let largest = k.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert_eq!(largest, 64.0 / 32.0);
        assert_eq!(g.dealias_index(), 21);
    }

    #[test]
    fn mirror_is_involution() {
        let g = Grid::new(8, 1.0).unwrap();
        for idx in 0..g.points() {
            assert_eq!(g.mirror(g.mirror(idx)), idx);
        }
        assert_eq!(g.mirror(0), 0);
    }
}
