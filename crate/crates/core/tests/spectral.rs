use hallmhd::spectral::norms::{inner, l2};
use hallmhd::spectral::ops::{curl, dealias, dealiased_product, divergence, gradient, leray_project};
use hallmhd::spectral::random::{random_field, RandomFieldSpec};
use hallmhd::spectral::{Grid, Pairing, SpectralField};
use proptest::prelude::*;
use rustfft::num_complex::Complex64;

#[global_allocator]
static GLOBAL: mimalloc::MiMalloc = mimalloc::MiMalloc;

fn mode_index(grid: &Grid, m: [i64; 3]) -> usize {
    let n = grid.n() as i64;
    let w = |v: i64| v.rem_euclid(n) as usize;
    grid.index(w(m[0]), w(m[1]), w(m[2]))
}

#[test]
fn dealiased_product_is_truncated_convolution() {
    let grid = Grid::new(16, 1.0).unwrap();
    let f = dealias(&random_field(&grid, &RandomFieldSpec::scalar(0.5), 1));
    let g = dealias(&random_field(&grid, &RandomFieldSpec::scalar(1.5), 2));
    let fast = dealiased_product(&f, &g, Pairing::Multiply).unwrap();

    let k = grid.dealias_index();
    let modes: Vec<[i64; 3]> = (-k..=k)
        .flat_map(|a| (-k..=k).flat_map(move |b| (-k..=k).map(move |c| [a, b, c])))
        .collect();
    let (fc, gc) = (f.component(0), g.component(0));
    let mut worst = 0.0f64;
    for &out in &modes {
        let mut acc = Complex64::default();
        for &p in &modes {
            let q = [out[0] - p[0], out[1] - p[1], out[2] - p[2]];
            if q.iter().all(|v| v.abs() <= k) {
                acc += fc[mode_index(&grid, p)] * gc[mode_index(&grid, q)];
            }
        }
        worst = worst.max((fast.component(0)[mode_index(&grid, out)] - acc).norm());
    }
    assert!(
        worst < 1e-14 * fast.max_abs().max(1.0),
        "worst coefficient error {worst}"
    );
    // nothing survives outside the retained cube
    for (idx, v) in fast.component(0).iter().enumerate() {
        if !grid.within_dealias(idx) {
            assert_eq!(*v, Complex64::default());
        }
    }
}

fn field(grid: &Grid, seed: u64, slope: f64, solenoidal: bool) -> SpectralField {
    let spec = RandomFieldSpec::vector(slope);
    random_field(grid, &if solenoidal { spec.solenoidal() } else { spec }, seed)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn transform_round_trip_and_parseval(seed in any::<u64>(), slope in 0.0f64..3.0, m in 0.5f64..4.0) {
        let grid = Grid::new(8, m).unwrap();
        let u = field(&grid, seed, slope, false);
        let phys = u.to_physical();
        let back = phys.to_spectral();
        let scale = u.max_abs().max(1e-300);
        for (a, b) in u.components().iter().zip(back.components()) {
            for (x, y) in a.iter().zip(b) {
                prop_assert!((x - y).norm() <= 1e-13 * scale);
            }
        }
        let grid_sum: f64 = phys.components().iter().flatten().map(|v| v * v).sum::<f64>() * grid.cell_volume();
        let spectral = l2(&u).powi(2);
        prop_assert!((grid_sum - spectral).abs() <= 1e-12 * spectral.max(1e-300));
    }

    #[test]
    fn leray_is_an_orthogonal_projection(seed in any::<u64>(), slope in 0.0f64..3.0) {
        let grid = Grid::new(8, 1.0).unwrap();
        let u = field(&grid, seed, slope, false);
        let p = leray_project(&u).unwrap();
        let pp = leray_project(&p).unwrap();
        prop_assert!(l2(&(&pp - &p)) <= 1e-13 * l2(&u));
        prop_assert!(l2(&divergence(&p).unwrap()) <= 1e-12 * l2(&u) * grid.k_max_axis());
        // the removed part is orthogonal to what remains
        let rest = &u - &p;
        prop_assert!(inner(&rest, &p).unwrap().abs() <= 1e-12 * l2(&u).powi(2));
    }

    #[test]
    fn curl_of_gradient_vanishes(seed in any::<u64>()) {
        let grid = Grid::new(8, 2.0).unwrap();
        let phi = random_field(&grid, &RandomFieldSpec::scalar(1.0), seed);
        let g = gradient(&phi).unwrap();
        prop_assert!(l2(&curl(&g).unwrap()) <= 1e-12 * l2(&g) * grid.k_max_axis());
    }
}
