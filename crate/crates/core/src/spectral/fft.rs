//! n-dimensional complex FFT over the flat row-major layout of a [`Grid`].
//!
//! Plans come from one process-wide planner behind a mutex; `rustfft`
//! caches plans per length internally.

use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::sync::{Arc, Mutex, OnceLock};

use super::grid::Grid;

fn planner() -> &'static Mutex<FftPlanner<f64>> {
    static PLANNER: OnceLock<Mutex<FftPlanner<f64>>> = OnceLock::new();
    PLANNER.get_or_init(|| Mutex::new(FftPlanner::new()))
}

fn plan(len: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    let mut p = planner().lock().expect("fft planner poisoned");
    if inverse {
        p.plan_fft_inverse(len)
    } else {
        p.plan_fft_forward(len)
    }
}

fn transform(grid: &Grid, data: &mut [Complex64], inverse: bool) {
    let n = grid.resolution();
    assert_eq!(data.len(), grid.len());
    let fft = plan(n, inverse);
    let dims = grid.n_dims();
    for axis in 0..dims {
        // lines along `axis` have stride n^(dims-1-axis); consecutive blocks of
        // n*stride entries are independent.
        let stride = n.pow((dims - 1 - axis) as u32);
        let block = n * stride;
        data.par_chunks_mut(block).for_each(|chunk| {
            let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
            if stride == 1 {
                fft.process_with_scratch(chunk, &mut scratch);
                return;
            }
            let mut line = vec![Complex64::default(); n];
            for inner in 0..stride {
                for (j, v) in line.iter_mut().enumerate() {
                    *v = chunk[inner + j * stride];
                }
                fft.process_with_scratch(&mut line, &mut scratch);
                for (j, v) in line.iter().enumerate() {
                    chunk[inner + j * stride] = *v;
                }
            }
        });
    }
    if inverse {
        let norm = 1.0 / grid.len() as f64;
        data.par_iter_mut().for_each(|v| *v *= norm);
    }
}

/// Unnormalised forward DFT of real samples.
pub fn forward_real(grid: &Grid, values: &[f64]) -> Vec<Complex64> {
    let mut data: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    transform(grid, &mut data, false);
    data
}

/// Inverse DFT including the `1/Nⁿ` normalisation.
pub fn inverse(grid: &Grid, spectrum: &[Complex64]) -> Vec<Complex64> {
    let mut data = spectrum.to_vec();
    transform(grid, &mut data, true);
    data
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn single_mode_lands_in_one_bin() {
        let g = Grid::new(2, 16, 1.0).unwrap();
        let vals: Vec<f64> = (0..g.len())
            .map(|i| {
                let x = g.node(i);
                (2.0 * PI * (2.0 * x[0] + 3.0 * x[1])).cos()
            })
            .collect();
        let s = forward_real(&g, &vals);
        let hit = g.flat_index([2, 3, 0]);
        assert!((s[hit].re - 128.0).abs() < 1e-10);
        let back = inverse(&g, &s);
        for (a, b) in back.iter().zip(&vals) {
            assert!((a.re - b).abs() < 1e-13 && a.im.abs() < 1e-13);
        }
    }

    #[test]
    fn three_dims_round_trip() {
        let g = Grid::new(3, 16, 1.0).unwrap();
        let vals: Vec<f64> = (0..g.len()).map(|i| ((i * 7919) % 101) as f64 / 101.0).collect();
        let back = inverse(&g, &forward_real(&g, &vals));
        let err = back.iter().zip(&vals).map(|(a, b)| (a.re - b).abs()).fold(0.0, f64::max);
        assert!(err < 1e-13);
    }
}
