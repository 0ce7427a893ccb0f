//! Three-dimensional FFTs for real fields.
//!
//! Convention: `û(k) = N⁻³ Σ_x u(x) e^{-ik·x}` and `u(x) = Σ_k û(k) e^{ik·x}`,
//! so a constant field `1` has coefficient `1` at `k = 0` and Parseval reads
//! `‖u‖²_{L²} = (2πM)³ Σ_k |û(k)|²`.
//!
//! Two real fields are always transformed together as the real and imaginary
//! parts of one complex field, which halves the number of complex FFTs.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::Grid;

/// Planned 1D transforms for one grid size; shareable across threads.
struct Engine {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

fn engine(n: usize) -> Arc<Engine> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Engine>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut map = cache.lock().expect("fft cache poisoned");
    map.entry(n)
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            Arc::new(Engine {
                n,
                forward: planner.plan_fft_forward(n),
                inverse: planner.plan_fft_inverse(n),
            })
        })
        .clone()
}

impl Engine {
    /// Unnormalized in-place 3D transform.
    ///
    /// The contiguous axis is transformed directly. The other two axes are
    /// handled one `n × n` slab at a time: the slab is gathered transposed into
    /// a small buffer, transformed along its rows and scattered back, which
    /// keeps the working set in cache.
    fn transform(&self, data: &mut [Complex64], inverse: bool) {
        let n = self.n;
        let fft = if inverse { &self.inverse } else { &self.forward };
        let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
        let mut slab = vec![Complex64::default(); n * n];
        fft.process_with_scratch(data, &mut scratch);
        // axis 1: slab i holds data[i, :, :]
        for plane in data.chunks_exact_mut(n * n) {
            transpose::transpose(plane, &mut slab, n, n);
            fft.process_with_scratch(&mut slab, &mut scratch);
            transpose::transpose(&slab, plane, n, n);
        }
        // axis 0: slab j holds data[:, j, :]
        for j in 0..n {
            for i in 0..n {
                let src = &data[(i * n + j) * n..(i * n + j + 1) * n];
                for (l, v) in src.iter().enumerate() {
                    slab[l * n + i] = *v;
                }
            }
            fft.process_with_scratch(&mut slab, &mut scratch);
            for i in 0..n {
                let dst = &mut data[(i * n + j) * n..(i * n + j + 1) * n];
                for (l, v) in dst.iter_mut().enumerate() {
                    *v = slab[l * n + i];
                }
            }
        }
    }
}

/// Forward transform of two real fields at once.
pub fn forward_pair(grid: &Grid, a: &[f64], b: &[f64]) -> (Vec<Complex64>, Vec<Complex64>) {
    let len = grid.points();
    debug_assert!(a.len() == len && b.len() == len);
    let mut z: Vec<Complex64> = a.iter().zip(b).map(|(&re, &im)| Complex64::new(re, im)).collect();
    engine(grid.n()).transform(&mut z, false);
    let scale = 1.0 / len as f64;
    let mut fa = vec![Complex64::default(); len];
    let mut fb = vec![Complex64::default(); len];
    let n = grid.n();
    let neg: Vec<usize> = (0..n).map(|i| (n - i) % n).collect();
    let mut idx = 0;
    for &mi in &neg {
        for &mj in &neg {
            let row = (mi * n + mj) * n;
            for &ml in &neg {
                let zk = z[idx];
                let zm = z[row + ml].conj();
                fa[idx] = (zk + zm) * (0.5 * scale);
                // (zk - zm) / 2i
                let d = (zk - zm) * (0.5 * scale);
                fb[idx] = Complex64::new(d.im, -d.re);
                idx += 1;
            }
        }
    }
    (fa, fb)
}

pub fn forward(grid: &Grid, a: &[f64]) -> Vec<Complex64> {
    let zeros = vec![0.0; a.len()];
    forward_pair(grid, a, &zeros).0
}

/// Inverse transform of two Hermitian coefficient arrays at once.
pub fn inverse_pair(grid: &Grid, a: &[Complex64], b: &[Complex64]) -> (Vec<f64>, Vec<f64>) {
    let len = grid.points();
    debug_assert!(a.len() == len && b.len() == len);
    let mut z: Vec<Complex64> = a
        .iter()
        .zip(b)
        .map(|(&ca, &cb)| ca + Complex64::new(-cb.im, cb.re))
        .collect();
    engine(grid.n()).transform(&mut z, true);
    z.into_iter().map(|c| (c.re, c.im)).unzip()
}

pub fn inverse(grid: &Grid, a: &[Complex64]) -> Vec<f64> {
    let zeros = vec![Complex64::default(); a.len()];
    inverse_pair(grid, a, &zeros).0
}

/// Forward transforms of any number of real arrays, paired up internally.
///
/// Identically zero arrays are not transformed, so they come back exactly zero
/// and do not perturb the array they would otherwise share a transform with.
pub fn forward_many(grid: &Grid, fields: &[&[f64]]) -> Vec<Vec<Complex64>> {
    let mut out = vec![Vec::new(); fields.len()];
    let live: Vec<usize> = (0..fields.len())
        .filter(|&i| fields[i].iter().any(|&v| v != 0.0))
        .collect();
    for chunk in live.chunks(2) {
        match *chunk {
            [a, b] => {
                let (fa, fb) = forward_pair(grid, fields[a], fields[b]);
                out[a] = fa;
                out[b] = fb;
            }
            [a] => out[a] = forward(grid, fields[a]),
            _ => unreachable!(),
        }
    }
    for o in out.iter_mut().filter(|o| o.is_empty()) {
        *o = vec![Complex64::default(); grid.points()];
    }
    out
}

/// Inverse transforms of any number of coefficient arrays, paired up internally.
///
/// Identically zero arrays are skipped as in [`forward_many`].
pub fn inverse_many(grid: &Grid, fields: &[&[Complex64]]) -> Vec<Vec<f64>> {
    let mut out = vec![Vec::new(); fields.len()];
    let zero = Complex64::default();
    let live: Vec<usize> = (0..fields.len())
        .filter(|&i| fields[i].iter().any(|&v| v != zero))
        .collect();
    for chunk in live.chunks(2) {
        match *chunk {
            [a, b] => {
                let (pa, pb) = inverse_pair(grid, fields[a], fields[b]);
                out[a] = pa;
                out[b] = pb;
            }
            [a] => out[a] = inverse(grid, fields[a]),
            _ => unreachable!(),
        }
    }
    for o in out.iter_mut().filter(|o| o.is_empty()) {
        *o = vec![0.0; grid.points()];
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive_dft(grid: &Grid, u: &[f64]) -> Vec<Complex64> {
        let n = grid.n();
        let mut out = vec![Complex64::default(); grid.points()];
        let w = -2.0 * std::f64::consts::PI / n as f64;
        for (kidx, o) in out.iter_mut().enumerate() {
            let [a, b, c] = grid.unravel(kidx);
            let mut acc = Complex64::default();
            for (xidx, &v) in u.iter().enumerate() {
                let [i, j, l] = grid.unravel(xidx);
                let phase = w * ((a * i + b * j + c * l) % n) as f64;
                acc += Complex64::from_polar(v, phase);
            }
            *o = acc / grid.points() as f64;
        }
        out
    }

    #[test]
    fn matches_direct_dft() {
        let grid = Grid::new(8, 1.0).unwrap();
        let u: Vec<f64> = (0..grid.points())
            .map(|i| ((i * 37 % 101) as f64 / 50.0 - 1.0) * (1.0 + (i % 7) as f64))
            .collect();
        let fast = forward(&grid, &u);
        let slow = naive_dft(&grid, &u);
        for (a, b) in fast.iter().zip(&slow) {
            assert!((a - b).norm() < 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn pair_round_trip() {
        let grid = Grid::new(16, 2.0).unwrap();
        let a: Vec<f64> = (0..grid.points()).map(|i| (i as f64 * 0.37).sin()).collect();
        let b: Vec<f64> = (0..grid.points()).map(|i| (i as f64 * 0.11).cos()).collect();
        let (fa, fb) = forward_pair(&grid, &a, &b);
        let (ra, rb) = inverse_pair(&grid, &fa, &fb);
        for i in 0..grid.points() {
            assert!((ra[i] - a[i]).abs() < 1e-12);
            assert!((rb[i] - b[i]).abs() < 1e-12);
        }
    }
}
