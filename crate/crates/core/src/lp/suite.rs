//! Self-checks of the Littlewood-Paley machinery on one grid.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::bony::bony_residual;
use super::build_partition;
use crate::spectral::norms::l2;
use crate::spectral::random::{random_field, RandomFieldSpec};
use crate::spectral::{Grid, Pairing, SpectralField};
use crate::Result;

pub const LP_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpSuiteReport {
    pub n: usize,
    pub box_scale: f64,
    pub j_min: i32,
    pub j_max: i32,
    /// `max_k |Σ_j φ_j(k) - 1|` over nonzero grid radii.
    pub unity_residual: f64,
    /// `‖Σ_j Δ_j u - u‖ / ‖u‖` for a random mean-zero field.
    pub reconstruction_residual: f64,
    /// `max_k |φ_j(k) φ_{j'}(k)|` over `|j - j'| ≥ 2`; zero when bands are almost orthogonal.
    pub orthogonality_defect: f64,
    pub bony_residual_product: f64,
    pub bony_residual_cross: f64,
    pub seconds: f64,
    pub pass: bool,
}

pub fn verify_lp(grid: &Grid, seed: u64) -> Result<LpSuiteReport> {
    let start = Instant::now();
    let part = build_partition(grid)?;

    let u = random_field(grid, &RandomFieldSpec::scalar(1.0), seed);
    let mut sum = SpectralField::zeros(*grid, 1);
    for j in part.bands() {
        sum.axpy(1.0, &part.block(&u, j)?)?;
    }
    let reconstruction_residual = l2(&(&sum - &u)) / l2(&u);

    let mut orthogonality_defect = 0.0f64;
    for j in part.bands() {
        for jj in part.bands().filter(|&jj| jj >= j + 2) {
            let (a, b) = (part.table(j)?, part.table(jj)?);
            for (x, y) in a.iter().zip(b) {
                orthogonality_defect = orthogonality_defect.max((x * y).abs());
            }
        }
    }

    let f = random_field(grid, &RandomFieldSpec::scalar(1.0), seed.wrapping_add(1));
    let g = random_field(grid, &RandomFieldSpec::scalar(0.5), seed.wrapping_add(2));
    let bony_residual_product = bony_residual(&f, &g, Pairing::Multiply, &part)?;
    let a = random_field(
        grid,
        &RandomFieldSpec::vector(1.0).solenoidal(),
        seed.wrapping_add(3),
    );
    let b = random_field(
        grid,
        &RandomFieldSpec::vector(1.0).solenoidal(),
        seed.wrapping_add(4),
    );
    let bony_residual_cross = bony_residual(&a, &b, Pairing::Cross, &part)?;

    let unity_residual = part.unity_residual();
    let pass = unity_residual < LP_TOLERANCE
        && reconstruction_residual < LP_TOLERANCE
        && orthogonality_defect == 0.0
        && bony_residual_product < LP_TOLERANCE
        && bony_residual_cross < LP_TOLERANCE;
    Ok(LpSuiteReport {
        n: grid.n(),
        box_scale: grid.box_scale(),
        j_min: part.j_min(),
        j_max: part.j_max(),
        unity_residual,
        reconstruction_residual,
        orthogonality_defect,
        bony_residual_product,
        bony_residual_cross,
        seconds: start.elapsed().as_secs_f64(),
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_passes_on_small_grid() {
        let r = verify_lp(&Grid::new(16, 1.0).unwrap(), 1).unwrap();
        assert!(r.pass, "{r:?}");
    }
}
