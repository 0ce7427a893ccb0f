//! Bony paraproduct decomposition and Littlewood-Paley commutators.
//!
//! For a bilinear pointwise pairing `B(f, g)` (a product or a cross product)
//!
//! ```text
//! T_f g = Σ_j B(Ṡ_{j-1} f, Δ_j g)
//! T_g f = Σ_j B(Δ_j f, Ṡ_{j-1} g)
//! R     = Σ_{|j-j'| ≤ 1} B(Δ_j f, Δ_{j'} g)
//! ```
//!
//! so that `T_f g + T_g f + R = B(f, g)`. Every product is formed on the grid
//! and truncated by the 2/3 rule, which is linear, so the identity survives
//! discretization up to roundoff.

use serde::{Deserialize, Serialize};

use super::DyadicPartition;
use crate::spectral::norms::l2;
use crate::spectral::ops::{dealias, dealiased_product, pointwise_pair};
use crate::spectral::{Pairing, PhysicalField, SpectralField};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ParaPart {
    /// `T_f g`
    Tfg,
    /// `T_g f`
    Tgf,
    /// `R(f, g)`
    R,
}

#[derive(Debug, Clone)]
pub struct BonyParts {
    pub t_fg: SpectralField,
    pub t_gf: SpectralField,
    pub r: SpectralField,
}

impl BonyParts {
    pub fn part(&self, which: ParaPart) -> &SpectralField {
        match which {
            ParaPart::Tfg => &self.t_fg,
            ParaPart::Tgf => &self.t_gf,
            ParaPart::R => &self.r,
        }
    }

    pub fn sum(&self) -> SpectralField {
        &(&self.t_fg + &self.t_gf) + &self.r
    }
}

/// Every band of `u` in physical space, `[band]`.
fn physical_blocks(u: &SpectralField, partition: &DyadicPartition) -> Result<Vec<PhysicalField>> {
    let ncomp = u.n_components();
    let mut parts = Vec::with_capacity(partition.n_bands());
    for j in partition.bands() {
        parts.push(partition.block(u, j)?);
    }
    let comps = SpectralField::stack(&parts)?.to_physical().into_components();
    comps
        .chunks(ncomp)
        .map(|c| PhysicalField::from_components(*u.grid(), c.to_vec()))
        .collect()
}

fn accumulate(acc: &mut Option<Vec<Vec<f64>>>, p: PhysicalField) {
    match acc {
        None => *acc = Some(p.into_components()),
        Some(a) => {
            for (ac, pc) in a.iter_mut().zip(p.components()) {
                for (x, y) in ac.iter_mut().zip(pc) {
                    *x += y;
                }
            }
        }
    }
}

fn add_physical(a: &PhysicalField, b: &PhysicalField) -> PhysicalField {
    let comps = a
        .components()
        .iter()
        .zip(b.components())
        .map(|(x, y)| x.iter().zip(y).map(|(p, q)| p + q).collect())
        .collect();
    PhysicalField::from_components(*a.grid(), comps).expect("same layout")
}

fn finish(acc: Option<Vec<Vec<f64>>>, template: &SpectralField, ncomp: usize) -> Result<SpectralField> {
    match acc {
        Some(c) => Ok(dealias(
            &PhysicalField::from_components(*template.grid(), c)?.to_spectral(),
        )),
        None => Ok(SpectralField::zeros(*template.grid(), ncomp)),
    }
}

fn require_mean_zero(f: &SpectralField, g: &SpectralField) -> Result<()> {
    if !f.is_mean_zero() || !g.is_mean_zero() {
        return Err(Error::NonzeroMean("Bony decomposition"));
    }
    Ok(())
}

pub fn bony_decompose(
    f: &SpectralField,
    g: &SpectralField,
    pairing: Pairing,
    partition: &DyadicPartition,
) -> Result<BonyParts> {
    partition.check_grid(f)?;
    partition.check_grid(g)?;
    require_mean_zero(f, g)?;
    let fb = physical_blocks(f, partition)?;
    let gb = physical_blocks(g, partition)?;
    let nb = fb.len();
    let out_comps = pointwise_pair(&fb[0], &gb[0], pairing)?.n_components();

    let (mut t_fg, mut t_gf, mut r) = (None, None, None);
    // running Ṡ_{j-1} = Σ_{j' ≤ j-2} Δ_{j'}
    let mut low_f: Option<PhysicalField> = None;
    let mut low_g: Option<PhysicalField> = None;
    for b in 0..nb {
        if b >= 2 {
            low_f = Some(match low_f {
                None => fb[b - 2].clone(),
                Some(acc) => add_physical(&acc, &fb[b - 2]),
            });
            low_g = Some(match low_g {
                None => gb[b - 2].clone(),
                Some(acc) => add_physical(&acc, &gb[b - 2]),
            });
        }
        if let (Some(lf), Some(lg)) = (&low_f, &low_g) {
            accumulate(&mut t_fg, pointwise_pair(lf, &gb[b], pairing)?);
            accumulate(&mut t_gf, pointwise_pair(&fb[b], lg, pairing)?);
        }
        for bb in b.saturating_sub(1)..(b + 2).min(nb) {
            accumulate(&mut r, pointwise_pair(&fb[b], &gb[bb], pairing)?);
        }
    }
    Ok(BonyParts {
        t_fg: finish(t_fg, f, out_comps)?,
        t_gf: finish(t_gf, f, out_comps)?,
        r: finish(r, f, out_comps)?,
    })
}

/// One piece of the Bony decomposition of the pointwise product `fg`.
pub fn paraproduct(
    f: &SpectralField,
    g: &SpectralField,
    part: ParaPart,
    partition: &DyadicPartition,
) -> Result<SpectralField> {
    let parts = bony_decompose(f, g, Pairing::Multiply, partition)?;
    Ok(match part {
        ParaPart::Tfg => parts.t_fg,
        ParaPart::Tgf => parts.t_gf,
        ParaPart::R => parts.r,
    })
}

/// Relative residual `‖T_f g + T_g f + R - fg‖ / ‖fg‖`.
pub fn bony_residual(
    f: &SpectralField,
    g: &SpectralField,
    pairing: Pairing,
    partition: &DyadicPartition,
) -> Result<f64> {
    let parts = bony_decompose(f, g, pairing, partition)?;
    let fg = dealiased_product(f, g, pairing)?;
    let denom = l2(&fg);
    if denom == 0.0 {
        return Ok(l2(&parts.sum()));
    }
    Ok(l2(&(&parts.sum() - &fg)) / denom)
}

/// `[Δ_j, f] g = Δ_j B(f, g) - B(f, Δ_j g)`.
pub fn commutator_block(
    j: i32,
    f: &SpectralField,
    g: &SpectralField,
    pairing: Pairing,
    partition: &DyadicPartition,
) -> Result<SpectralField> {
    partition.check_band(j)?;
    partition.check_grid(f)?;
    partition.check_grid(g)?;
    if !f.is_mean_zero() {
        return Err(Error::NonzeroMean("commutator with a constant part"));
    }
    let fg = dealiased_product(f, g, pairing)?;
    let first = partition.block(&fg, j)?;
    let second = dealiased_product(f, &partition.block(g, j)?, pairing)?;
    Ok(&first - &second)
}

/// `‖[Δ_j, f] g‖_{L²}` for every band, sharing the transform of `f` and `B(f, g)`.
pub fn commutator_band_norms(
    f: &SpectralField,
    g: &SpectralField,
    pairing: Pairing,
    partition: &DyadicPartition,
) -> Result<Vec<f64>> {
    partition.check_grid(f)?;
    partition.check_grid(g)?;
    if !f.is_mean_zero() {
        return Err(Error::NonzeroMean("commutator with a constant part"));
    }
    let fp = f.to_physical();
    let fg = dealias(&pointwise_pair(&fp, &g.to_physical(), pairing)?.to_spectral());
    let gb = physical_blocks(g, partition)?;
    let mut out = Vec::with_capacity(gb.len());
    for (i, j) in partition.bands().enumerate() {
        let second = dealias(&pointwise_pair(&fp, &gb[i], pairing)?.to_spectral());
        out.push(l2(&(&partition.block(&fg, j)? - &second)));
    }
    Ok(out)
}
