//! Ensemble measurement of the constants in the Littlewood-Paley inequalities.
//!
//! Each sample draws seeded random fields, evaluates both sides of one
//! inequality and records `LHS / RHS`. The report keeps the largest ratio (the
//! empirical constant), its 95th percentile and the smallest ratio.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::besov::{band_lp_norms, besov_from_bands};
use super::bony::commutator_band_norms;
use super::{build_partition, DyadicPartition};
use crate::spectral::norms::{hdot, lp};
use crate::spectral::ops::{curl, dealiased_product, gradient, lambda_pow};
use crate::spectral::random::{random_field, RandomFieldSpec};
use crate::spectral::{Grid, Pairing, SpectralField};
use crate::{Error, Result};

/// Which field `g` enters the commutator `[Δ_j, f] g`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CommutatorSource {
    /// Independent scalars `f`, `g` with the ordinary product.
    Scalar,
    /// `[Δ_j, B×](∇×B)`: `f = B` solenoidal, `g = ∇×B`.
    CurlOfF,
    /// `[Δ_j, B×](∇×v)`: `f = B`, `g = ∇×v` with `v` independent.
    CurlOfIndependent,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "id", rename_all = "snake_case", deny_unknown_fields)]
pub enum InequalityId {
    /// `‖Λ^k u‖_{L^q} ≤ C 2^{j(k + 3(1/p - 1/q))} ‖u‖_{L^p}` for `u` supported in `2^j[3/4, 8/3]`.
    Bernstein {
        j: i32,
        k: f64,
        #[serde(with = "super::exponent")]
        p: f64,
        #[serde(with = "super::exponent")]
        q: f64,
    },
    /// `‖u‖_{L^{6/(3-2s)}} ≤ C ‖u‖_{Ḣ^s}`.
    SobolevEmbed { s: f64 },
    /// `‖fg‖_{Ḃ^s_{2,r}} ≤ C (‖f‖_{Ḃ^{3/2-η}_{2,∞}} ‖g‖_{Ḃ^{s+η}_{2,r}} + ‖g‖_{Ḃ^{3/2-θ}_{2,∞}} ‖f‖_{Ḃ^{s+θ}_{2,r}})`.
    ProductLaw {
        s: f64,
        #[serde(with = "super::exponent")]
        r: f64,
        eta: f64,
        theta: f64,
    },
    /// `‖2^{js} ‖[Δ_j, f]g‖_{L²}‖_{ℓ^r} ≤ C (‖f‖_{Ḃ^{5/2-η}_{2,r}} ‖g‖_{Ḃ^{s+η-1}_{2,r}} + ‖g‖_{Ḃ^{3/2-θ}_{2,∞}} ‖f‖_{Ḃ^{s+θ}_{2,r}})`.
    CommutatorEst {
        s: f64,
        #[serde(with = "super::exponent")]
        r: f64,
        eta: f64,
        theta: f64,
        source: CommutatorSource,
    },
    /// `‖[Λ^s, f]g‖_{L^p} ≤ C (‖Λ^s f‖_{L^{p1}} ‖g‖_{L^{p2}} + ‖Λ^{s-1} g‖_{L^{p3}} ‖∇f‖_{L^{p4}})`.
    KatoPonce {
        s: f64,
        p: f64,
        p1: f64,
        #[serde(with = "super::exponent")]
        p2: f64,
        p3: f64,
        #[serde(with = "super::exponent")]
        p4: f64,
    },
    /// `‖u‖_{Ḃ^{θs1 + (1-θ)s2}_{p,r}} ≤ ‖u‖^θ_{Ḃ^{s1}_{p,r}} ‖u‖^{1-θ}_{Ḃ^{s2}_{p,r}}`.
    Interpolation {
        s1: f64,
        s2: f64,
        theta: f64,
        #[serde(with = "super::exponent")]
        p: f64,
        #[serde(with = "super::exponent")]
        r: f64,
    },
}

/// The two product-law instances used for the `H^{1/2+σ} × H^{3/2}` energy
/// estimates, written in the form `(s, r, η, θ)` of [`InequalityId::ProductLaw`].
pub fn product_law_pair(sigma: f64) -> [InequalityId; 2] {
    [
        InequalityId::ProductLaw {
            s: 0.5 + sigma,
            r: 2.0,
            eta: 1.0 - 0.5 * sigma,
            theta: 1.0 - 0.5 * sigma,
        },
        InequalityId::ProductLaw {
            s: 1.5,
            r: 2.0,
            eta: 1.0 - 0.5 * sigma,
            theta: 0.5 * sigma,
        },
    ]
}

/// Named instances checked by the command line and the acceptance suite.
pub fn presets() -> Vec<(&'static str, InequalityId)> {
    let [ppr1, ppr2] = product_law_pair(0.5);
    vec![
        (
            "bernstein",
            InequalityId::Bernstein {
                j: 1,
                k: 1.0,
                p: 2.0,
                q: 2.0,
            },
        ),
        ("sobolev_half", InequalityId::SobolevEmbed { s: 0.5 }),
        ("sobolev_one", InequalityId::SobolevEmbed { s: 1.0 }),
        ("product_low", ppr1),
        ("product_high", ppr2),
        (
            "commutator_hall",
            InequalityId::CommutatorEst {
                s: 1.5,
                r: 2.0,
                eta: 0.5,
                theta: 0.5,
                source: CommutatorSource::CurlOfF,
            },
        ),
        (
            "commutator_mixed",
            InequalityId::CommutatorEst {
                s: 0.5,
                r: 2.0,
                eta: 0.5,
                theta: 1.5,
                source: CommutatorSource::CurlOfIndependent,
            },
        ),
        (
            "kato_ponce",
            InequalityId::KatoPonce {
                s: 1.0,
                p: 2.0,
                p1: 6.0,
                p2: 3.0,
                p3: 6.0,
                p4: 3.0,
            },
        ),
        (
            "interpolation",
            InequalityId::Interpolation {
                s1: 0.0,
                s2: 1.0,
                theta: 0.5,
                p: 2.0,
                r: 2.0,
            },
        ),
    ]
}

/// A preset name or an inline JSON object such as `{"id":"sobolev_embed","s":0.5}`.
pub fn parse_inequality(text: &str) -> Result<InequalityId> {
    let t = text.trim();
    if t.starts_with('{') {
        let id: InequalityId = serde_json::from_str(t)?;
        id.validate()?;
        return Ok(id);
    }
    presets()
        .into_iter()
        .find(|(name, _)| *name == t)
        .map(|(_, id)| id)
        .ok_or_else(|| {
            let names: Vec<&str> = presets().iter().map(|p| p.0).collect();
            Error::param(format!(
                "unknown inequality '{t}'; presets are {}",
                names.join(", ")
            ))
        })
}

fn range_err(id: &str, what: &str) -> Error {
    Error::param(format!("{id}: {what}"))
}

impl InequalityId {
    pub fn name(&self) -> &'static str {
        match self {
            InequalityId::Bernstein { .. } => "bernstein",
            InequalityId::SobolevEmbed { .. } => "sobolev_embed",
            InequalityId::ProductLaw { .. } => "product_law",
            InequalityId::CommutatorEst { .. } => "commutator_est",
            InequalityId::KatoPonce { .. } => "kato_ponce",
            InequalityId::Interpolation { .. } => "interpolation",
        }
    }

    /// Checks the hypotheses under which the inequality is claimed.
    pub fn validate(&self) -> Result<()> {
        let id = self.name();
        match *self {
            InequalityId::Bernstein { k, p, q, .. } => {
                if !(k >= 0.0 && k.is_finite()) {
                    return Err(range_err(id, "needs a finite derivative order k >= 0"));
                }
                if !(p >= 1.0 && q >= p) {
                    return Err(range_err(id, "needs 1 <= p <= q <= inf"));
                }
            }
            InequalityId::SobolevEmbed { s } => {
                if !(0.0..1.5).contains(&s) {
                    return Err(range_err(id, "needs 0 <= s < 3/2"));
                }
            }
            InequalityId::ProductLaw { s, r, eta, theta } => {
                if !(s > -1.5) {
                    return Err(range_err(id, "needs s > -3/2"));
                }
                if !(r >= 1.0) {
                    return Err(range_err(id, "needs r >= 1"));
                }
                if !(eta > 0.0 && theta > 0.0) {
                    return Err(range_err(id, "needs eta, theta > 0"));
                }
            }
            InequalityId::CommutatorEst { s, r, eta, theta, .. } => {
                if !(s > -1.5) {
                    return Err(range_err(id, "needs s > -3/2"));
                }
                if !(r >= 1.0) {
                    return Err(range_err(id, "needs r >= 1"));
                }
                if !(eta > 0.0 && eta < 2.5) {
                    return Err(range_err(id, "needs 0 < eta < 5/2"));
                }
                if !(theta > 0.0) {
                    return Err(range_err(id, "needs theta > 0"));
                }
            }
            InequalityId::KatoPonce { s, p, p1, p2, p3, p4 } => {
                if !(s > 0.0) {
                    return Err(range_err(id, "needs s > 0"));
                }
                let open = |x: f64| x > 1.0 && x.is_finite();
                if !(open(p) && open(p1) && open(p3)) {
                    return Err(range_err(id, "needs p, p1, p3 in (1, inf)"));
                }
                if !(p2 >= 1.0 && p4 >= 1.0) {
                    return Err(range_err(id, "needs p2, p4 in [1, inf]"));
                }
                let a = 1.0 / p1 + 1.0 / p2;
                let b = 1.0 / p3 + 1.0 / p4;
                if (a - 1.0 / p).abs() > 1e-12 || (b - 1.0 / p).abs() > 1e-12 {
                    return Err(range_err(id, "needs 1/p = 1/p1 + 1/p2 = 1/p3 + 1/p4"));
                }
            }
            InequalityId::Interpolation { s1, s2, theta, p, r } => {
                if !(s1 < s2) {
                    return Err(range_err(id, "needs s1 < s2"));
                }
                if !(theta > 0.0 && theta < 1.0) {
                    return Err(range_err(id, "needs 0 < theta < 1"));
                }
                if !(p >= 1.0 && r >= 1.0) {
                    return Err(range_err(id, "needs p, r >= 1"));
                }
            }
        }
        Ok(())
    }

    /// Parameters as a JSON object without the `id` tag.
    pub fn params_json(&self) -> serde_json::Value {
        let mut v = serde_json::to_value(self).expect("plain data");
        if let Some(obj) = v.as_object_mut() {
            obj.remove("id");
        }
        v
    }
}

/// Seeded random-field ensemble; sample `i` draws its spectral slope uniformly
/// from `slope_range` and its coefficients from an independent stream.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Ensemble {
    pub n_samples: usize,
    pub seed: u64,
    pub slope_range: (f64, f64),
}

impl Default for Ensemble {
    fn default() -> Self {
        Ensemble {
            n_samples: 200,
            seed: 2024,
            slope_range: (1.0, 3.0),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridInfo {
    pub n: usize,
    pub box_scale: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConstantReport {
    pub inequality_id: String,
    pub params: serde_json::Value,
    pub n_samples: usize,
    pub max_ratio: f64,
    pub p95_ratio: f64,
    pub min_ratio: f64,
    pub grid: GridInfo,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StabilityReport {
    pub coarse: ConstantReport,
    pub fine: ConstantReport,
    /// `fine.max_ratio / coarse.max_ratio`.
    pub growth: f64,
    pub stable: bool,
}

struct Sample {
    rng: ChaCha8Rng,
    slope: f64,
}

impl Sample {
    fn new(ens: &Ensemble, i: usize) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(ens.seed);
        rng.set_stream(i as u64);
        let (lo, hi) = ens.slope_range;
        let slope = if hi > lo { rng.random_range(lo..hi) } else { lo };
        Sample { rng, slope }
    }

    fn field(&mut self, grid: &Grid, spec: RandomFieldSpec) -> SpectralField {
        let seed = self.rng.next_u64();
        random_field(
            grid,
            &RandomFieldSpec {
                slope: self.slope,
                ..spec
            },
            seed,
        )
    }
}

fn ratio(lhs: f64, rhs: f64) -> Result<f64> {
    if !(lhs.is_finite() && rhs.is_finite()) || rhs <= 0.0 {
        return Err(Error::param(format!(
            "degenerate sample: lhs = {lhs}, rhs = {rhs}"
        )));
    }
    Ok(lhs / rhs)
}

fn sample_ratio(
    id: &InequalityId,
    ens: &Ensemble,
    i: usize,
    grid: &Grid,
    part: &DyadicPartition,
) -> Result<f64> {
    let mut smp = Sample::new(ens, i);
    let scalar = RandomFieldSpec::scalar(0.0);
    let solenoidal = RandomFieldSpec::vector(0.0).solenoidal();
    let j0 = part.j_min();
    match *id {
        InequalityId::Bernstein { j, k, p, q } => {
            let scale = 2f64.powi(j);
            let u = smp.field(grid, scalar.band(0.75 * scale, 8.0 / 3.0 * scale));
            let lhs = lp(&lambda_pow(&u, k)?, q)?;
            let rhs = scale.powf(k + 3.0 * (1.0 / p - 1.0 / q)) * lp(&u, p)?;
            ratio(lhs, rhs)
        }
        InequalityId::SobolevEmbed { s } => {
            let u = smp.field(grid, scalar);
            ratio(lp(&u, 6.0 / (3.0 - 2.0 * s))?, hdot(&u, s)?)
        }
        InequalityId::ProductLaw { s, r, eta, theta } => {
            let f = smp.field(grid, scalar.clone());
            let g = smp.field(grid, scalar);
            let fg = dealiased_product(&f, &g, Pairing::Multiply)?;
            let (bf, bg) = (part.band_l2_norms(&f), part.band_l2_norms(&g));
            let lhs = besov_from_bands(&part.band_l2_norms(&fg), j0, s, r);
            let inf = f64::INFINITY;
            let rhs = besov_from_bands(&bf, j0, 1.5 - eta, inf) * besov_from_bands(&bg, j0, s + eta, r)
                + besov_from_bands(&bg, j0, 1.5 - theta, inf) * besov_from_bands(&bf, j0, s + theta, r);
            ratio(lhs, rhs)
        }
        InequalityId::CommutatorEst {
            s,
            r,
            eta,
            theta,
            source,
        } => {
            let (f, g, pairing) = match source {
                CommutatorSource::Scalar => {
                    let f = smp.field(grid, scalar.clone());
                    (f, smp.field(grid, scalar), Pairing::Multiply)
                }
                CommutatorSource::CurlOfF => {
                    let b = smp.field(grid, solenoidal.clone());
                    let jb = curl(&b)?;
                    (b, jb, Pairing::Cross)
                }
                CommutatorSource::CurlOfIndependent => {
                    let b = smp.field(grid, solenoidal.clone());
                    let v = smp.field(grid, solenoidal);
                    (b, curl(&v)?, Pairing::Cross)
                }
            };
            let c = commutator_band_norms(&f, &g, pairing, part)?;
            let lhs = besov_from_bands(&c, j0, s, r);
            let (bf, bg) = (part.band_l2_norms(&f), part.band_l2_norms(&g));
            let inf = f64::INFINITY;
            let rhs = besov_from_bands(&bf, j0, 2.5 - eta, r) * besov_from_bands(&bg, j0, s + eta - 1.0, r)
                + besov_from_bands(&bg, j0, 1.5 - theta, inf) * besov_from_bands(&bf, j0, s + theta, r);
            ratio(lhs, rhs)
        }
        InequalityId::KatoPonce { s, p, p1, p2, p3, p4 } => {
            let f = smp.field(grid, scalar.clone());
            let g = smp.field(grid, scalar);
            let ls_fg = lambda_pow(&dealiased_product(&f, &g, Pairing::Multiply)?, s)?;
            let f_ls_g = dealiased_product(&f, &lambda_pow(&g, s)?, Pairing::Multiply)?;
            let lhs = lp(&(&ls_fg - &f_ls_g), p)?;
            let rhs = lp(&lambda_pow(&f, s)?, p1)? * lp(&g, p2)?
                + lp(&lambda_pow(&g, s - 1.0)?, p3)? * lp(&gradient(&f)?, p4)?;
            ratio(lhs, rhs)
        }
        InequalityId::Interpolation { s1, s2, theta, p, r } => {
            let u = smp.field(grid, scalar);
            let bands = band_lp_norms(&u, p, part)?;
            let mid = besov_from_bands(&bands, j0, theta * s1 + (1.0 - theta) * s2, r);
            let a = besov_from_bands(&bands, j0, s1, r);
            let b = besov_from_bands(&bands, j0, s2, r);
            ratio(mid, a.powf(theta) * b.powf(1.0 - theta))
        }
    }
}

fn check_fits(id: &InequalityId, grid: &Grid) -> Result<()> {
    if let InequalityId::Bernstein { j, .. } = *id {
        let scale = 2f64.powi(j);
        if 0.75 * scale < grid.k_min() || 8.0 / 3.0 * scale > grid.dealias_wavenumber() {
            return Err(Error::param(format!(
                "bernstein: annulus 2^{j}[3/4, 8/3] is not resolved on n = {}, M = {}",
                grid.n(),
                grid.box_scale()
            )));
        }
    }
    Ok(())
}

fn percentile(sorted: &[f64], q: f64) -> f64 {
    let idx = ((q * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len()) - 1;
    sorted[idx]
}

pub fn verify_inequality(id: &InequalityId, ensemble: &Ensemble, grid: &Grid) -> Result<ConstantReport> {
    id.validate()?;
    if ensemble.n_samples == 0 {
        return Err(Error::param("ensemble needs at least one sample"));
    }
    check_fits(id, grid)?;
    let part = build_partition(grid)?;
    let mut ratios = (0..ensemble.n_samples)
        .into_par_iter()
        .map(|i| sample_ratio(id, ensemble, i, grid, &part))
        .collect::<Result<Vec<f64>>>()?;
    ratios.sort_by(f64::total_cmp);
    Ok(ConstantReport {
        inequality_id: id.name().to_string(),
        params: id.params_json(),
        n_samples: ratios.len(),
        max_ratio: *ratios.last().expect("nonempty"),
        p95_ratio: percentile(&ratios, 0.95),
        min_ratio: ratios[0],
        grid: GridInfo {
            n: grid.n(),
            box_scale: grid.box_scale(),
        },
    })
}

/// Runs the same ensemble on two grids; stable when the constant stays finite
/// and grows by less than a factor two.
pub fn verify_stability(
    id: &InequalityId,
    ensemble: &Ensemble,
    coarse: &Grid,
    fine: &Grid,
) -> Result<StabilityReport> {
    let c = verify_inequality(id, ensemble, coarse)?;
    let f = verify_inequality(id, ensemble, fine)?;
    let growth = f.max_ratio / c.max_ratio;
    Ok(StabilityReport {
        stable: growth.is_finite() && f.max_ratio.is_finite() && growth < 2.0,
        coarse: c,
        fine: f,
        growth,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> Ensemble {
        Ensemble {
            n_samples: 8,
            ..Ensemble::default()
        }
    }

    #[test]
    fn hypotheses_are_enforced() {
        let bad = [
            InequalityId::SobolevEmbed { s: 1.5 },
            InequalityId::ProductLaw {
                s: -1.6,
                r: 2.0,
                eta: 0.5,
                theta: 0.5,
            },
            InequalityId::ProductLaw {
                s: 0.5,
                r: 2.0,
                eta: 0.0,
                theta: 0.5,
            },
            InequalityId::CommutatorEst {
                s: 0.5,
                r: 2.0,
                eta: 2.5,
                theta: 0.5,
                source: CommutatorSource::Scalar,
            },
            InequalityId::KatoPonce {
                s: 1.0,
                p: 2.0,
                p1: 6.0,
                p2: 4.0,
                p3: 6.0,
                p4: 3.0,
            },
            InequalityId::Interpolation {
                s1: 1.0,
                s2: 0.0,
                theta: 0.5,
                p: 2.0,
                r: 2.0,
            },
            InequalityId::Bernstein {
                j: 0,
                k: 1.0,
                p: 4.0,
                q: 2.0,
            },
        ];
        for id in bad {
            assert!(id.validate().is_err(), "{id:?}");
        }
    }

    #[test]
    fn json_shape() {
        let id = InequalityId::ProductLaw {
            s: 1.5,
            r: f64::INFINITY,
            eta: 0.5,
            theta: 0.25,
        };
        let text = serde_json::to_string(&id).unwrap();
        assert_eq!(
            text,
            r#"{"id":"product_law","s":1.5,"r":"inf","eta":0.5,"theta":0.25}"#
        );
        let back: InequalityId = serde_json::from_str(&text).unwrap();
        assert_eq!(back, id);
    }

    #[test]
    fn interpolation_never_exceeds_one() {
        let g = Grid::new(16, 1.0).unwrap();
        let id = InequalityId::Interpolation {
            s1: 0.0,
            s2: 1.0,
            theta: 0.5,
            p: 2.0,
            r: 2.0,
        };
        let rep = verify_inequality(&id, &small(), &g).unwrap();
        assert!(rep.max_ratio <= 1.0 + 1e-10);
    }

    #[test]
    fn deterministic_reports() {
        let g = Grid::new(16, 1.0).unwrap();
        let id = InequalityId::SobolevEmbed { s: 1.0 };
        let a = verify_inequality(&id, &small(), &g).unwrap();
        let b = verify_inequality(&id, &small(), &g).unwrap();
        assert_eq!(a.max_ratio.to_bits(), b.max_ratio.to_bits());
        assert!(a.min_ratio <= a.p95_ratio && a.p95_ratio <= a.max_ratio);
    }

    #[test]
    fn unresolved_band_rejected() {
        let g = Grid::new(16, 1.0).unwrap();
        let id = InequalityId::Bernstein {
            j: 3,
            k: 1.0,
            p: 2.0,
            q: 2.0,
        };
        assert!(verify_inequality(&id, &small(), &g).is_err());
    }
}
