//! Discrete convolution with the Landau kernel on the velocity lattice,
//! `(K ⊛ F)(v_a) = h³ Σ_b K(v_a − v_b) F(v_b)`, evaluated by zero-padded FFT.

use std::sync::Arc;

use rustfft::{Fft, FftPlanner};

use crate::fft::Fft3;
use crate::phase_grid::{C64, ZERO};

/// Symmetric 3×3 components in the order xx, xy, xz, yy, yz, zz.
pub const SYM: [(usize, usize); 6] = [(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)];

#[inline]
pub fn sym_index(i: usize, j: usize) -> usize {
    match (i.min(j), i.max(j)) {
        (0, 0) => 0,
        (0, 1) => 1,
        (0, 2) => 2,
        (1, 1) => 3,
        (1, 2) => 4,
        _ => 5,
    }
}

/// `(δ_ij − v_i v_j/|v|²) |v|^{γ+2}` as six symmetric components.
pub fn phi_components(v: [f64; 3], gamma: f64) -> [f64; 6] {
    let r2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
    let p = r2.powf(0.5 * (gamma + 2.0));
    SYM.map(|(i, j)| {
        let d = if i == j { 1.0 } else { 0.0 };
        (d - v[i] * v[j] / r2) * p
    })
}

/// Cell-averaged kernel at zero separation: the integral of `|u|^{γ+2}` over
/// a ball of volume `h³`, times the angular mean `(2/3) I` of the projector,
/// divided by `h³`.
pub fn self_cell_value(h: f64, gamma: f64) -> f64 {
    let r = (3.0 / (4.0 * std::f64::consts::PI)).cbrt() * h;
    let ball = 4.0 * std::f64::consts::PI * r.powf(gamma + 5.0) / (gamma + 5.0);
    (2.0 / 3.0) * ball / h.powi(3)
}

/// Kernel value on the lattice offset `d` (in cells).
pub fn lattice_kernel(d: [i64; 3], h: f64, gamma: f64) -> [f64; 6] {
    if d == [0, 0, 0] {
        let s = self_cell_value(h, gamma);
        [s, 0.0, 0.0, s, 0.0, s]
    } else {
        phi_components(d.map(|c| c as f64 * h), gamma)
    }
}

#[derive(Clone)]
pub struct KernelConvolver {
    n: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    /// FFT of each kernel component, pre-scaled by `h³ / (2n)³`; real
    /// because the lattice kernel is real and even.
    khat: [Vec<f64>; 6],
}

impl std::fmt::Debug for KernelConvolver {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("KernelConvolver").field("n", &self.n).finish()
    }
}

impl KernelConvolver {
    pub fn new(n: usize, h: f64, gamma: f64) -> Self {
        let m = 2 * n;
        let fft = Fft3::new([m, m, m]);
        let len = m * m * m;
        let mut comps: [Vec<C64>; 6] = std::array::from_fn(|_| vec![ZERO; len]);
        let scale = h.powi(3) / len as f64;
        let ni = n as i64;
        for a in -(ni - 1)..ni {
            for b in -(ni - 1)..ni {
                for c in -(ni - 1)..ni {
                    let k = lattice_kernel([a, b, c], h, gamma);
                    let idx = |x: i64| x.rem_euclid(m as i64) as usize;
                    let p = (idx(a) * m + idx(b)) * m + idx(c);
                    for s in 0..6 {
                        comps[s][p] = C64::new(k[s] * scale, 0.0);
                    }
                }
            }
        }
        for comp in comps.iter_mut() {
            fft.forward(comp);
        }
        let khat = comps.map(|c| c.into_iter().map(|z| z.re).collect());
        let mut planner = FftPlanner::new();
        Self {
            n,
            fwd: planner.plan_fft_forward(m),
            inv: planner.plan_fft_inverse(m),
            khat,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// FFT along the middle and first axes of a `m³` array whose nonzero
    /// content is confined to the first-axis range `rows`.
    fn pass_middle(&self, buf: &mut [C64], plan: &Arc<dyn Fft<f64>>, rows: usize, keep: usize, tmp: &mut [C64], scratch: &mut [C64]) {
        let m = 2 * self.n;
        for a in 0..rows {
            let block = &mut buf[a * m * m..(a + 1) * m * m];
            for b in 0..m {
                for c in 0..m {
                    tmp[c * m + b] = block[b * m + c];
                }
            }
            plan.process_with_scratch(&mut tmp[..m * m], scratch);
            for b in 0..keep {
                for c in 0..m {
                    block[b * m + c] = tmp[c * m + b];
                }
            }
        }
    }

    fn pass_outer(&self, buf: &mut [C64], plan: &Arc<dyn Fft<f64>>, keep: usize, tmp: &mut [C64], scratch: &mut [C64]) {
        let m = 2 * self.n;
        for b in 0..m {
            for a in 0..m {
                let src = (a * m + b) * m;
                for c in 0..m {
                    tmp[c * m + a] = buf[src + c];
                }
            }
            plan.process_with_scratch(&mut tmp[..m * m], scratch);
            for a in 0..keep {
                let dst = (a * m + b) * m;
                for c in 0..m {
                    buf[dst + c] = tmp[c * m + a];
                }
            }
        }
    }

    fn scratch(&self) -> (Vec<C64>, Vec<C64>) {
        let m = 2 * self.n;
        let s = self.fwd.get_inplace_scratch_len().max(self.inv.get_inplace_scratch_len());
        (vec![ZERO; m * m], vec![ZERO; s])
    }

    fn padded_forward(&self, f: &[C64]) -> Vec<C64> {
        let n = self.n;
        let m = 2 * n;
        let mut buf = vec![ZERO; m * m * m];
        let (mut tmp, mut scratch) = self.scratch();
        for a in 0..n {
            for b in 0..n {
                let dst = (a * m + b) * m;
                buf[dst..dst + n].copy_from_slice(&f[(a * n + b) * n..(a * n + b + 1) * n]);
            }
            let slab = a * m * m;
            self.fwd.process_with_scratch(&mut buf[slab..slab + n * m], &mut scratch);
        }
        self.pass_middle(&mut buf, &self.fwd, n, m, &mut tmp, &mut scratch);
        self.pass_outer(&mut buf, &self.fwd, m, &mut tmp, &mut scratch);
        buf
    }

    fn inverse_extract(&self, mut buf: Vec<C64>) -> Vec<C64> {
        let n = self.n;
        let m = 2 * n;
        let (mut tmp, mut scratch) = self.scratch();
        self.pass_outer(&mut buf, &self.inv, n, &mut tmp, &mut scratch);
        self.pass_middle(&mut buf, &self.inv, n, n, &mut tmp, &mut scratch);
        let mut out = vec![ZERO; n * n * n];
        for a in 0..n {
            let slab = a * m * m;
            self.inv.process_with_scratch(&mut buf[slab..slab + n * m], &mut scratch);
            for b in 0..n {
                let src = (a * m + b) * m;
                out[(a * n + b) * n..(a * n + b + 1) * n].copy_from_slice(&buf[src..src + n]);
            }
        }
        out
    }

    /// Matrix field `K ⊛ f` (six symmetric components).
    pub fn conv_scalar(&self, f: &[C64]) -> [Vec<C64>; 6] {
        let fh = self.padded_forward(f);
        std::array::from_fn(|s| {
            let prod: Vec<C64> = fh.iter().zip(&self.khat[s]).map(|(a, k)| a * *k).collect();
            self.inverse_extract(prod)
        })
    }

    /// Vector field `Σ_j K_ij ⊛ u_j`.
    pub fn conv_vector(&self, u: &[Vec<C64>; 3]) -> [Vec<C64>; 3] {
        let uh: [Vec<C64>; 3] = std::array::from_fn(|j| self.padded_forward(&u[j]));
        std::array::from_fn(|i| {
            let len = uh[0].len();
            let k0 = &self.khat[sym_index(i, 0)];
            let k1 = &self.khat[sym_index(i, 1)];
            let k2 = &self.khat[sym_index(i, 2)];
            let mut acc = vec![ZERO; len];
            for p in 0..len {
                acc[p] = uh[0][p] * k0[p] + uh[1][p] * k1[p] + uh[2][p] * k2[p];
            }
            self.inverse_extract(acc)
        })
    }

    pub fn conv_scalar_real(&self, f: &[f64]) -> [Vec<f64>; 6] {
        let c: Vec<C64> = f.iter().map(|&x| C64::new(x, 0.0)).collect();
        self.conv_scalar(&c).map(|v| v.into_iter().map(|z| z.re).collect())
    }
}
