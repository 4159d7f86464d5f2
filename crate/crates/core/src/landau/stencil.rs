//! One-dimensional difference operators applied along one axis of an
//! `n × n × n` velocity array.

use crate::phase_grid::{C64, ZERO};

/// Sparse `n × n` matrix stored by rows.
#[derive(Debug, Clone)]
pub struct Stencil1d {
    n: usize,
    rows: Vec<Vec<(usize, f64)>>,
}

impl Stencil1d {
    /// Second-order first derivative: central inside, one-sided three-point
    /// closure at both ends. Exact on quadratics.
    pub fn first_derivative(n: usize, h: f64) -> Self {
        assert!(n >= 3, "derivative stencil needs at least 3 points");
        let c = 1.0 / (2.0 * h);
        let mut rows = Vec::with_capacity(n);
        rows.push(vec![(0, -3.0 * c), (1, 4.0 * c), (2, -c)]);
        for i in 1..n - 1 {
            rows.push(vec![(i - 1, -c), (i + 1, c)]);
        }
        rows.push(vec![(n - 3, c), (n - 2, -4.0 * c), (n - 1, 3.0 * c)]);
        Self { n, rows }
    }

    /// Fourth-order central first derivative with zero extension past the
    /// ends (used for the force term, not for the collision operator).
    pub fn first_derivative_4th(n: usize, h: f64) -> Self {
        let c = 1.0 / (12.0 * h);
        let rows = (0..n)
            .map(|i| {
                let mut r = Vec::with_capacity(4);
                for (off, w) in [(-2i64, 1.0), (-1, -8.0), (1, 8.0), (2, -1.0)] {
                    let j = i as i64 + off;
                    if j >= 0 && (j as usize) < n {
                        r.push((j as usize, w * c));
                    }
                }
                r
            })
            .collect();
        Self { n, rows }
    }

    /// Second-order central derivative with zero extension.
    pub fn central_zero_ext(n: usize, h: f64) -> Self {
        let c = 1.0 / (2.0 * h);
        let rows = (0..n)
            .map(|i| {
                let mut r = Vec::with_capacity(2);
                if i > 0 {
                    r.push((i - 1, -c));
                }
                if i + 1 < n {
                    r.push((i + 1, c));
                }
                r
            })
            .collect();
        Self { n, rows }
    }

    /// Conjugate by a diagonal: `diag(s) · self · diag(1/s)`.
    pub fn conjugated(&self, s: &[f64]) -> Self {
        let rows = self
            .rows
            .iter()
            .enumerate()
            .map(|(i, r)| r.iter().map(|&(j, c)| (j, c * s[i] / s[j])).collect())
            .collect();
        Self { n: self.n, rows }
    }

    pub fn transpose(&self) -> Self {
        let mut rows = vec![Vec::new(); self.n];
        for (i, r) in self.rows.iter().enumerate() {
            for &(j, c) in r {
                rows[j].push((i, c));
            }
        }
        Self { n: self.n, rows }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> &[Vec<(usize, f64)>] {
        &self.rows
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.rows[i]
            .iter()
            .filter(|(k, _)| *k == j)
            .map(|(_, c)| c)
            .sum()
    }

    pub fn apply_1d(&self, x: &[f64]) -> Vec<f64> {
        self.rows
            .iter()
            .map(|r| r.iter().map(|&(j, c)| c * x[j]).sum())
            .collect()
    }

    /// `out = self` applied along `axis` of the cube `inp`.
    pub fn apply_axis(&self, axis: usize, inp: &[C64], out: &mut [C64]) {
        let n = self.n;
        debug_assert_eq!(inp.len(), n * n * n);
        let stride = match axis {
            0 => n * n,
            1 => n,
            _ => 1,
        };
        // enumerate the n² lines orthogonal to `axis`
        for line in 0..n * n {
            let base = match axis {
                0 => line,
                1 => (line / n) * n * n + line % n,
                _ => line * n,
            };
            for (i, r) in self.rows.iter().enumerate() {
                let mut acc = ZERO;
                for &(j, c) in r {
                    acc += inp[base + j * stride] * c;
                }
                out[base + i * stride] = acc;
            }
        }
    }

    /// Real-valued counterpart of [`apply_axis`](Self::apply_axis).
    pub fn apply_axis_real(&self, axis: usize, inp: &[f64], out: &mut [f64]) {
        let n = self.n;
        let stride = match axis {
            0 => n * n,
            1 => n,
            _ => 1,
        };
        for line in 0..n * n {
            let base = match axis {
                0 => line,
                1 => (line / n) * n * n + line % n,
                _ => line * n,
            };
            for (i, r) in self.rows.iter().enumerate() {
                out[base + i * stride] = r.iter().map(|&(j, c)| inp[base + j * stride] * c).sum();
            }
        }
    }
}
