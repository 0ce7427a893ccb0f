//! Seeded random fields with a power-law envelope.
//!
//! Coefficients are complex Gaussians scaled by `|k|^{-α}`, restricted to the
//! 2/3-rule cube (and optionally a radial band) so that every quadratic or
//! cubic product of ensemble fields is resolved without aliasing.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::num_complex::Complex64;

use super::ops::leray_project;
use super::{Grid, SpectralField};

#[derive(Debug, Clone, PartialEq)]
pub struct RandomFieldSpec {
    pub components: usize,
    /// Envelope exponent `α` in `|û(k)| ∝ |k|^{-α}`.
    pub slope: f64,
    /// Inclusive radial range `[k_lo, k_hi]` of physical wavenumbers.
    pub band: Option<(f64, f64)>,
    pub solenoidal: bool,
}

impl RandomFieldSpec {
    pub fn scalar(slope: f64) -> Self {
        RandomFieldSpec {
            components: 1,
            slope,
            band: None,
            solenoidal: false,
        }
    }

    pub fn vector(slope: f64) -> Self {
        RandomFieldSpec {
            components: 3,
            ..Self::scalar(slope)
        }
    }

    pub fn solenoidal(mut self) -> Self {
        self.solenoidal = true;
        self
    }

    pub fn band(mut self, k_lo: f64, k_hi: f64) -> Self {
        self.band = Some((k_lo, k_hi));
        self
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Mean-zero, Hermitian random field; deterministic in `seed`.
pub fn random_field(grid: &Grid, spec: &RandomFieldSpec, seed: u64) -> SpectralField {
    let mut rng = rng(seed);
    let m2 = grid.mode_m2();
    let mut comps = vec![vec![Complex64::default(); grid.points()]; spec.components];
    for idx in 1..grid.points() {
        let mirror = grid.mirror(idx);
        if mirror < idx || !grid.within_dealias(idx) {
            continue;
        }
        let k = grid.k2_of_m2(m2[idx]).sqrt();
        if let Some((lo, hi)) = spec.band {
            if k < lo || k > hi {
                continue;
            }
        }
        let amp = k.powf(-spec.slope);
        for c in comps.iter_mut() {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            let z = Complex64::new(re, im) * amp;
            c[idx] = z;
            c[mirror] = z.conj();
        }
    }
    let field = SpectralField::from_components(*grid, comps).expect("sized by construction");
    if spec.solenoidal && spec.components == 3 {
        leray_project(&field).expect("three components")
    } else {
        field
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_hermitian() {
        let g = Grid::new(16, 1.0).unwrap();
        let spec = RandomFieldSpec::vector(1.0).solenoidal();
        let a = random_field(&g, &spec, 5);
        let b = random_field(&g, &spec, 5);
        assert_eq!(a, b);
        assert_ne!(a, random_field(&g, &spec, 6));
        assert_eq!(a.hermitian_defect(), 0.0);
        assert!(a.is_mean_zero());
    }

    #[test]
    fn stays_inside_band_and_cube() {
        let g = Grid::new(16, 1.0).unwrap();
        let f = random_field(&g, &RandomFieldSpec::scalar(0.0).band(2.0, 3.0), 1);
        let m2 = g.mode_m2();
        for idx in 0..g.points() {
            if f.component(0)[idx].norm() > 0.0 {
                let k = (m2[idx] as f64).sqrt();
                assert!((2.0..=3.0).contains(&k));
                assert!(g.within_dealias(idx));
            }
        }
    }
}
