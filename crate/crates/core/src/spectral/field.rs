use std::ops::{Add, Mul, Neg, Sub};

use rustfft::num_complex::Complex64;

use super::{fft, Grid};
use crate::{Error, Result};

/// Field stored as Fourier coefficients, one array per component.
///
/// Fields represent real functions, so coefficients are kept Hermitian:
/// the coefficient at `-k` is the conjugate of the one at `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: Grid,
    comps: Vec<Vec<Complex64>>,
}

/// Samples of a field on the physical grid, one array per component.
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalField {
    grid: Grid,
    comps: Vec<Vec<f64>>,
}

impl SpectralField {
    pub fn zeros(grid: Grid, n_components: usize) -> Self {
        SpectralField {
            grid,
            comps: vec![vec![Complex64::default(); grid.points()]; n_components],
        }
    }

    pub fn from_components(grid: Grid, comps: Vec<Vec<Complex64>>) -> Result<Self> {
        if comps.is_empty() {
            return Err(Error::param("a field needs at least one component"));
        }
        for c in &comps {
            if c.len() != grid.points() {
                return Err(Error::DimensionMismatch {
                    expected: grid.points(),
                    got: c.len(),
                });
            }
        }
        Ok(SpectralField { grid, comps })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn n_components(&self) -> usize {
        self.comps.len()
    }

    pub fn component(&self, c: usize) -> &[Complex64] {
        &self.comps[c]
    }

    pub fn component_mut(&mut self, c: usize) -> &mut [Complex64] {
        &mut self.comps[c]
    }

    pub fn components(&self) -> &[Vec<Complex64>] {
        &self.comps
    }

    pub fn into_components(self) -> Vec<Vec<Complex64>> {
        self.comps
    }

    /// Splits a vector field into scalar fields.
    pub fn split(&self) -> Vec<SpectralField> {
        self.comps
            .iter()
            .map(|c| SpectralField {
                grid: self.grid,
                comps: vec![c.clone()],
            })
            .collect()
    }

    /// Stacks scalar fields into one multi-component field.
    pub fn stack(parts: &[SpectralField]) -> Result<Self> {
        let grid = *parts
            .first()
            .ok_or_else(|| Error::param("nothing to stack"))?
            .grid();
        let mut comps = Vec::new();
        for p in parts {
            if p.grid != grid {
                return Err(Error::GridMismatch);
            }
            comps.extend(p.comps.iter().cloned());
        }
        Ok(SpectralField { grid, comps })
    }

    /// `k = 0` coefficient of each component.
    pub fn mean(&self) -> Vec<Complex64> {
        self.comps.iter().map(|c| c[0]).collect()
    }

    pub fn is_mean_zero(&self) -> bool {
        let scale = self.max_abs().max(f64::MIN_POSITIVE);
        self.comps.iter().all(|c| c[0].norm() <= 1e-14 * scale)
    }

    pub fn with_zero_mean(mut self) -> Self {
        for c in &mut self.comps {
            c[0] = Complex64::default();
        }
        self
    }

    pub fn max_abs(&self) -> f64 {
        self.comps
            .iter()
            .flat_map(|c| c.iter())
            .fold(0.0f64, |m, v| m.max(v.norm()))
    }

    /// Largest `|û(k) - conj(û(-k))|` over all modes and components.
    pub fn hermitian_defect(&self) -> f64 {
        let g = self.grid;
        let mut worst = 0.0f64;
        for c in &self.comps {
            for idx in 0..g.points() {
                worst = worst.max((c[idx] - c[g.mirror(idx)].conj()).norm());
            }
        }
        worst
    }

    /// Replaces each coefficient pair by its Hermitian average.
    pub fn symmetrized(mut self) -> Self {
        let g = self.grid;
        for c in &mut self.comps {
            for idx in 0..g.points() {
                let m = g.mirror(idx);
                if m < idx {
                    continue;
                }
                let avg = (c[idx] + c[m].conj()) * 0.5;
                c[idx] = avg;
                c[m] = avg.conj();
            }
        }
        self
    }

    /// Coefficient-wise `Σ |û|²` over all components.
    pub fn coefficient_energy(&self) -> f64 {
        self.comps
            .iter()
            .flat_map(|c| c.iter())
            .map(|v| v.norm_sqr())
            .sum()
    }

    pub fn is_finite(&self) -> bool {
        self.comps
            .iter()
            .flat_map(|c| c.iter())
            .all(|v| v.re.is_finite() && v.im.is_finite())
    }

    pub fn scaled(&self, a: f64) -> Self {
        self.map(|v| v * a)
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        SpectralField {
            grid: self.grid,
            comps: self
                .comps
                .iter()
                .map(|c| c.iter().map(|&v| f(v)).collect())
                .collect(),
        }
    }

    /// Multiplies every component by a real per-mode weight.
    pub fn weighted(&self, weight: &[f64]) -> Self {
        SpectralField {
            grid: self.grid,
            comps: self
                .comps
                .iter()
                .map(|c| c.iter().zip(weight).map(|(&v, &w)| v * w).collect())
                .collect(),
        }
    }

    /// `self += a * other`.
    pub fn axpy(&mut self, a: f64, other: &SpectralField) -> Result<()> {
        self.check_compatible(other)?;
        for (c, o) in self.comps.iter_mut().zip(&other.comps) {
            for (v, w) in c.iter_mut().zip(o) {
                *v += w * a;
            }
        }
        Ok(())
    }

    pub fn check_compatible(&self, other: &SpectralField) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        if self.comps.len() != other.comps.len() {
            return Err(Error::ComponentMismatch {
                op: "combine",
                expected: self.comps.len(),
                got: other.comps.len(),
            });
        }
        Ok(())
    }

    pub fn to_physical(&self) -> PhysicalField {
        let refs: Vec<&[Complex64]> = self.comps.iter().map(|c| c.as_slice()).collect();
        PhysicalField {
            grid: self.grid,
            comps: fft::inverse_many(&self.grid, &refs),
        }
    }
}

impl PhysicalField {
    pub fn zeros(grid: Grid, n_components: usize) -> Self {
        PhysicalField {
            grid,
            comps: vec![vec![0.0; grid.points()]; n_components],
        }
    }

    pub fn from_components(grid: Grid, comps: Vec<Vec<f64>>) -> Result<Self> {
        if comps.is_empty() {
            return Err(Error::param("a field needs at least one component"));
        }
        for c in &comps {
            if c.len() != grid.points() {
                return Err(Error::DimensionMismatch {
                    expected: grid.points(),
                    got: c.len(),
                });
            }
        }
        Ok(PhysicalField { grid, comps })
    }

    /// Samples `f(x, y, z)` for each component.
    pub fn from_fn(grid: Grid, n_components: usize, f: impl Fn([f64; 3]) -> Vec<f64>) -> Self {
        let n = grid.n();
        let mut comps = vec![vec![0.0; grid.points()]; n_components];
        for i in 0..n {
            for j in 0..n {
                for l in 0..n {
                    let x = [grid.coordinate(i), grid.coordinate(j), grid.coordinate(l)];
                    let v = f(x);
                    let idx = grid.index(i, j, l);
                    for (c, comp) in comps.iter_mut().enumerate() {
                        comp[idx] = v[c];
                    }
                }
            }
        }
        PhysicalField { grid, comps }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn n_components(&self) -> usize {
        self.comps.len()
    }

    pub fn component(&self, c: usize) -> &[f64] {
        &self.comps[c]
    }

    pub fn components(&self) -> &[Vec<f64>] {
        &self.comps
    }

    pub fn into_components(self) -> Vec<Vec<f64>> {
        self.comps
    }

    /// Pointwise Euclidean magnitude across components.
    pub fn magnitude(&self) -> Vec<f64> {
        (0..self.grid.points())
            .map(|i| self.comps.iter().map(|c| c[i] * c[i]).sum::<f64>().sqrt())
            .collect()
    }

    pub fn sup_norm(&self) -> f64 {
        self.magnitude().into_iter().fold(0.0, f64::max)
    }

    pub fn to_spectral(&self) -> SpectralField {
        let refs: Vec<&[f64]> = self.comps.iter().map(|c| c.as_slice()).collect();
        SpectralField {
            grid: self.grid,
            comps: fft::forward_many(&self.grid, &refs),
        }
    }
}

/// Forward transform of physical samples given per component.
pub fn transform_forward(samples: &[Vec<f64>], grid: Grid) -> Result<SpectralField> {
    Ok(PhysicalField::from_components(grid, samples.to_vec())?.to_spectral())
}

pub fn transform_inverse(field: &SpectralField) -> PhysicalField {
    field.to_physical()
}

fn zip_with(
    a: &SpectralField,
    b: &SpectralField,
    f: impl Fn(Complex64, Complex64) -> Complex64,
) -> SpectralField {
    a.check_compatible(b).expect("arithmetic on incompatible fields");
    SpectralField {
        grid: a.grid,
        comps: a
            .comps
            .iter()
            .zip(&b.comps)
            .map(|(x, y)| x.iter().zip(y).map(|(&p, &q)| f(p, q)).collect())
            .collect(),
    }
}

impl Add for &SpectralField {
    type Output = SpectralField;
    fn add(self, rhs: &SpectralField) -> SpectralField {
        zip_with(self, rhs, |p, q| p + q)
    }
}

impl Sub for &SpectralField {
    type Output = SpectralField;
    fn sub(self, rhs: &SpectralField) -> SpectralField {
        zip_with(self, rhs, |p, q| p - q)
    }
}

impl Mul<f64> for &SpectralField {
    type Output = SpectralField;
    fn mul(self, a: f64) -> SpectralField {
        self.scaled(a)
    }
}

impl Neg for &SpectralField {
    type Output = SpectralField;
    fn neg(self) -> SpectralField {
        self.scaled(-1.0)
    }
}
