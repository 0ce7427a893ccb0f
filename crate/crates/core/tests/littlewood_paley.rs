use hallmhd::lp::besov::{besov_from_bands, hs_equivalence, mixed_from_history, outside_from_history};
use hallmhd::lp::bony::bony_residual;
use hallmhd::lp::{build_partition, chi, phi, BesovSpec, MixedNormSpec};
use hallmhd::spectral::norms::{hdot, l2};
use hallmhd::spectral::random::{random_field, RandomFieldSpec};
use hallmhd::spectral::{Grid, Pairing, SpectralField};
use proptest::prelude::*;

#[global_allocator]
static GLOBAL: mimalloc::MiMalloc = mimalloc::MiMalloc;

#[test]
fn profile_supports() {
    assert_eq!(chi(0.0), 1.0);
    assert_eq!(chi(4.0 / 3.0 + 1e-9), 0.0);
    assert_eq!(chi(0.75), 1.0);
    assert_eq!(phi(0.75 - 1e-9), 0.0);
    assert_eq!(phi(8.0 / 3.0 + 1e-9), 0.0);
}

#[test]
fn blocks_resum_to_the_field() {
    let grid = Grid::new(16, 2.0).unwrap();
    let part = build_partition(&grid).unwrap();
    let u = random_field(&grid, &RandomFieldSpec::vector(1.0), 4);
    let mut acc = SpectralField::zeros(grid, 3);
    for j in part.bands() {
        acc = &acc + &part.block(&u, j).unwrap();
    }
    assert!(l2(&(&acc - &u)) < 1e-13 * l2(&u));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn dyadic_sum_is_one(log_rho in -8.0f64..8.0) {
        let rho = 2f64.powf(log_rho);
        let sum: f64 = (-20..=20).map(|j| phi(rho / 2f64.powi(j))).sum();
        prop_assert!((sum - 1.0).abs() < 1e-14);
        // at most two blocks overlap at any radius
        let live = (-20..=20).filter(|&j| phi(rho / 2f64.powi(j)) > 0.0).count();
        prop_assert!(live <= 2);
    }

    #[test]
    fn besov_22_is_equivalent_to_hdot(seed in any::<u64>(), s in -1.5f64..2.5, slope in 0.0f64..3.0) {
        let grid = Grid::new(16, 1.0).unwrap();
        let part = build_partition(&grid).unwrap();
        let u = random_field(&grid, &RandomFieldSpec::scalar(slope), seed);
        let (lo, hi) = hs_equivalence(&part, s);
        let b = besov_from_bands(&part.band_l2_norms(&u), part.j_min(), s, 2.0);
        let h = hdot(&u, s).unwrap();
        prop_assert!(b >= lo * h * (1.0 - 1e-12) && b <= hi * h * (1.0 + 1e-12), "{lo} {b} {h} {hi}");
    }

    #[test]
    fn besov_interpolation_never_exceeds_one(
        seed in any::<u64>(),
        s1 in -2.0f64..2.0,
        s2 in -2.0f64..2.0,
        theta in 0.0f64..1.0,
        r in prop_oneof![Just(1.0), Just(2.0), Just(f64::INFINITY)],
    ) {
        let grid = Grid::new(16, 1.0).unwrap();
        let part = build_partition(&grid).unwrap();
        let u = random_field(&grid, &RandomFieldSpec::scalar(1.0), seed);
        let bands = part.band_l2_norms(&u);
        let j0 = part.j_min();
        let mid = besov_from_bands(&bands, j0, theta * s1 + (1.0 - theta) * s2, r);
        let bound = besov_from_bands(&bands, j0, s1, r).powf(theta) * besov_from_bands(&bands, j0, s2, r).powf(1.0 - theta);
        prop_assert!(mid <= bound * (1.0 + 1e-12));
    }

    #[test]
    fn bony_pieces_resum_to_the_product(seed in any::<u64>(), cross in any::<bool>()) {
        let grid = Grid::new(16, 1.0).unwrap();
        let part = build_partition(&grid).unwrap();
        let spec = if cross { RandomFieldSpec::vector(1.0) } else { RandomFieldSpec::scalar(1.0) };
        let f = random_field(&grid, &spec, seed);
        let g = random_field(&grid, &spec, seed.wrapping_add(1));
        let pairing = if cross { Pairing::Cross } else { Pairing::Multiply };
        prop_assert!(bony_residual(&f, &g, pairing, &part).unwrap() < 1e-12);
    }

    #[test]
    fn far_blocks_are_orthogonal(seed in any::<u64>()) {
        let grid = Grid::new(16, 1.0).unwrap();
        let part = build_partition(&grid).unwrap();
        let u = random_field(&grid, &RandomFieldSpec::scalar(0.5), seed);
        for j in part.bands() {
            for k in part.bands().filter(|k| (k - j).abs() >= 2) {
                let twice = part.block(&part.block(&u, j).unwrap(), k).unwrap();
                prop_assert_eq!(twice.max_abs(), 0.0);
            }
        }
    }

    #[test]
    fn chemin_lerner_minkowski_ordering(
        hist in prop::collection::vec(prop::collection::vec(0.0f64..10.0, 5), 3..12),
        q in 1.0f64..4.0,
    ) {
        let times: Vec<f64> = (0..hist.len()).map(|i| i as f64 * 0.5).collect();
        let spec = |r: f64| MixedNormSpec { q, besov: BesovSpec { s: 0.5, p: 2.0, r } };
        // ℓ^r inside L^q: Minkowski orders the two norms according to r against q
        let big_r = spec(q.max(2.0) * 2.0);
        prop_assert!(mixed_from_history(&times, &hist, big_r, -1) <= outside_from_history(&times, &hist, big_r, -1) * (1.0 + 1e-12));
        let small_r = spec(1.0);
        prop_assert!(mixed_from_history(&times, &hist, small_r, -1) * (1.0 + 1e-12) >= outside_from_history(&times, &hist, small_r, -1));
    }
}
