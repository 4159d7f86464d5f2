//! Three-axis complex FFT on row-major buffers.
//!
//! Each pass transforms the contiguous (last) axis and then rotates the axes
//! `(d0, d1, d2) -> (d2, d0, d1)`; three passes restore the original layout.

use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

#[derive(Clone)]
pub struct Fft3 {
    dims: [usize; 3],
    forward: [Arc<dyn Fft<f64>>; 3],
    inverse: [Arc<dyn Fft<f64>>; 3],
}

impl std::fmt::Debug for Fft3 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Fft3").field("dims", &self.dims).finish()
    }
}

impl Fft3 {
    pub fn new(dims: [usize; 3]) -> Self {
        let mut planner = FftPlanner::new();
        let forward = dims.map(|d| planner.plan_fft_forward(d));
        let inverse = dims.map(|d| planner.plan_fft_inverse(d));
        Self {
            dims,
            forward,
            inverse,
        }
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn len(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Unnormalized forward transform (`exp(-i ...)`).
    pub fn forward(&self, data: &mut [Complex64]) {
        self.run(data, &self.forward);
    }

    /// Unnormalized inverse transform (`exp(+i ...)`).
    pub fn inverse(&self, data: &mut [Complex64]) {
        self.run(data, &self.inverse);
    }

    fn run(&self, data: &mut [Complex64], plans: &[Arc<dyn Fft<f64>>; 3]) {
        assert_eq!(data.len(), self.len(), "fft buffer length");
        let mut tmp = vec![Complex64::new(0.0, 0.0); data.len()];
        let mut scratch = Vec::new();
        // current layout dims, last axis is transformed in each pass
        let mut cur = self.dims;
        let mut axis_order = [0usize, 1, 2];
        for _ in 0..3 {
            let last = cur[2];
            if last > 1 {
                let plan = &plans[axis_order[2]];
                let need = plan.get_inplace_scratch_len();
                if scratch.len() < need {
                    scratch.resize(need, Complex64::new(0.0, 0.0));
                }
                plan.process_with_scratch(data, &mut scratch[..need]);
            }
            rotate(data, &mut tmp, cur);
            data.copy_from_slice(&tmp);
            cur = [cur[2], cur[0], cur[1]];
            axis_order = [axis_order[2], axis_order[0], axis_order[1]];
        }
    }
}

/// `out[(k*d0 + i)*d1 + j] = inp[(i*d1 + j)*d2 + k]`
fn rotate(inp: &[Complex64], out: &mut [Complex64], d: [usize; 3]) {
    let [d0, d1, d2] = d;
    if d2 == 1 {
        out.copy_from_slice(inp);
        return;
    }
    for i in 0..d0 {
        for j in 0..d1 {
            let src = &inp[(i * d1 + j) * d2..(i * d1 + j + 1) * d2];
            for (k, v) in src.iter().enumerate() {
                out[(k * d0 + i) * d1 + j] = *v;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive_dft(data: &[Complex64], dims: [usize; 3]) -> Vec<Complex64> {
        let [a, b, c] = dims;
        let mut out = vec![Complex64::new(0.0, 0.0); data.len()];
        for k0 in 0..a {
            for k1 in 0..b {
                for k2 in 0..c {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for i in 0..a {
                        for j in 0..b {
                            for k in 0..c {
                                let ph = -2.0
                                    * std::f64::consts::PI
                                    * ((k0 * i) as f64 / a as f64
                                        + (k1 * j) as f64 / b as f64
                                        + (k2 * k) as f64 / c as f64);
                                acc += data[(i * b + j) * c + k] * Complex64::from_polar(1.0, ph);
                            }
                        }
                    }
                    out[(k0 * b + k1) * c + k2] = acc;
                }
            }
        }
        out
    }

    #[test]
    fn matches_naive_dft_on_uneven_dims() {
        let dims = [3, 4, 5];
        let data: Vec<Complex64> = (0..60)
            .map(|i| Complex64::new((i as f64 * 0.37).sin(), (i as f64 * 1.3).cos()))
            .collect();
        let mut fast = data.clone();
        Fft3::new(dims).forward(&mut fast);
        let slow = naive_dft(&data, dims);
        for (x, y) in fast.iter().zip(&slow) {
            assert!((x - y).norm() < 1e-11);
        }
    }

    #[test]
    fn inverse_undoes_forward() {
        let dims = [1, 8, 1];
        let fft = Fft3::new(dims);
        let data: Vec<Complex64> = (0..8).map(|i| Complex64::new(i as f64, 0.5)).collect();
        let mut buf = data.clone();
        fft.forward(&mut buf);
        fft.inverse(&mut buf);
        for (x, y) in buf.iter().zip(&data) {
            assert!((x / 8.0 - y).norm() < 1e-13);
        }
    }
}
