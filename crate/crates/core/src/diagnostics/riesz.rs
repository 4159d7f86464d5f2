//! Scaling checks of the Riesz-potential, embedding and interpolation
//! inequalities on a dilation family, plus the mixed-norm Minkowski order.
//!
//! The family is `f_λ(x) = g((x − c)/λ)` with `g(y) = y₁y₂y₃ e^{−|y|²/2}`:
//! zero mean and with a spectrum vanishing to third order at ξ = 0, so the
//! torus sums approximate the whole-space integrals closely. Dilations are
//! integer multiples of the grid spacing, which keeps the maximum on a node.

use std::cell::OnceCell;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Result, VmlError};
use crate::phase_grid::{multi_indices, SpatialGrid, C64};

const SLOPE_TOL: f64 = 0.02;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RieszItem {
    pub name: String,
    /// log-log slopes of both sides against the dilation λ (NaN when the
    /// item is not a scaling check)
    pub lhs_slope: f64,
    pub rhs_slope: f64,
    /// largest `lhs / rhs` over the family
    pub max_ratio: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RieszReport {
    pub s: f64,
    pub items: Vec<RieszItem>,
}

impl RieszReport {
    pub fn passed(&self) -> bool {
        self.items.iter().all(|i| i.passed)
    }
}

struct Sample {
    hat: Vec<C64>,
    sg: SpatialGrid,
    lambda: f64,
    centre: f64,
    fine: OnceCell<Vec<f64>>,
}

fn profile(y: [f64; 3]) -> f64 {
    y[0] * y[1] * y[2] * (-0.5 * (y[0] * y[0] + y[1] * y[1] + y[2] * y[2])).exp()
}

/// Refinement of the quadrature lattice for `‖f‖_{L^p}`; `|f|^p` has kinks
/// on the zero planes of `f` that the coarse grid resolves poorly for p < 2.
const REFINE: usize = 2;

impl Sample {
    fn new(sg: &SpatialGrid, lambda: f64) -> Result<Self> {
        let h = sg.box_length() / sg.dims()[0] as f64;
        let c = 0.5 * sg.box_length() - 0.5 * h * (sg.dims()[0] % 2) as f64;
        let vals: Vec<f64> = (0..sg.len())
            .map(|i| profile(sg.position(i).map(|x| (x - c) / lambda)))
            .collect();
        let hat = crate::phase_grid::fourier_forward(sg, &vals)?;
        Ok(Self {
            hat,
            sg: sg.clone(),
            lambda,
            centre: c,
            fine: OnceCell::new(),
        })
    }

    /// `‖f‖_{L^p}` by quadrature on the lattice refined `REFINE` times.
    fn lp_fine(&self, p: f64) -> f64 {
        let n = self.sg.dims()[0] * REFINE;
        let h = self.sg.box_length() / n as f64;
        let vals = self.fine.get_or_init(|| {
            let axis: Vec<f64> = (0..n).map(|i| (i as f64 * h - self.centre) / self.lambda).collect();
            let mut v = Vec::with_capacity(n * n * n);
            for &a in &axis {
                for &b in &axis {
                    for &c in &axis {
                        v.push(profile([a, b, c]).abs());
                    }
                }
            }
            v
        });
        if p.is_infinite() {
            return vals.iter().fold(0.0, |m: f64, x| m.max(*x));
        }
        (h * h * h * vals.iter().map(|x| x.powf(p)).sum::<f64>()).powf(1.0 / p)
    }

    fn lambda_norm(&self, s: f64) -> f64 {
        let sum: f64 = self
            .hat
            .iter()
            .enumerate()
            .map(|(m, z)| self.sg.lambda_multiplier(m, s).powi(2) * z.norm_sqr())
            .sum();
        (self.sg.cell_volume() * sum).sqrt()
    }

    /// `‖∇^k f‖` with `|∇^k f|² = Σ_{|α|=k} |∂^α f|²`.
    fn grad_l2(&self, k: usize) -> f64 {
        let sum: f64 = self
            .hat
            .iter()
            .enumerate()
            .map(|(m, z)| self.sg.derivative_multiplier(m, k) * z.norm_sqr())
            .sum();
        (self.sg.cell_volume() * sum).sqrt()
    }

    /// Pointwise `|∇^j f|` in physical space.
    fn grad_pointwise(&self, j: usize) -> Result<Vec<f64>> {
        let mut acc = vec![0.0; self.sg.len()];
        for alpha in multi_indices(j).into_iter().filter(|a| a.iter().sum::<usize>() == j) {
            let mut buf: Vec<C64> = self
                .hat
                .iter()
                .enumerate()
                .map(|(m, z)| {
                    let k = self.sg.kappa(m);
                    let mut factor = C64::new(1.0, 0.0);
                    for i in 0..3 {
                        factor *= C64::new(0.0, k[i]).powi(alpha[i] as i32);
                    }
                    if self.sg.is_nyquist(m) {
                        factor = C64::new(0.0, 0.0);
                    }
                    z * factor
                })
                .collect();
            self.sg.inverse_in_place(&mut buf)?;
            acc.iter_mut().zip(&buf).for_each(|(a, z)| *a += z.re * z.re);
        }
        Ok(acc.into_iter().map(f64::sqrt).collect())
    }

    fn lp(&self, u: &[f64], p: f64) -> f64 {
        if p.is_infinite() {
            return u.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
        }
        (self.sg.cell_volume() * u.iter().map(|x| x.abs().powf(p)).sum::<f64>()).powf(1.0 / p)
    }
}

fn slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// One scaling item: `lhs(f)` against `Π rhs_i(f)^{θ_i}`.
type Side<'a> = Box<dyn Fn(&Sample) -> Result<f64> + 'a>;

fn scaling_item(name: String, samples: &[(f64, Sample)], lhs: Side, rhs: Vec<(Side, f64)>) -> Result<RieszItem> {
    let mut ll = Vec::new();
    let mut lr = Vec::new();
    let mut lx = Vec::new();
    let mut max_ratio: f64 = 0.0;
    for (lambda, smp) in samples {
        let l = lhs(smp)?;
        let mut r = 1.0;
        for (side, th) in &rhs {
            r *= side(smp)?.powf(*th);
        }
        max_ratio = max_ratio.max(l / r);
        ll.push(l.ln());
        lr.push(r.ln());
        lx.push(lambda.ln());
    }
    let (a, b) = (slope(&lx, &ll), slope(&lx, &lr));
    Ok(RieszItem {
        name,
        lhs_slope: a,
        rhs_slope: b,
        max_ratio,
        passed: (a - b).abs() <= SLOPE_TOL && max_ratio.is_finite(),
    })
}

/// Dilation factors in grid cells.
const DILATIONS: [f64; 5] = [3.0, 4.0, 5.0, 6.0, 7.0];

/// Run every scaling check for `s ∈ (0, 3/2)` on a grid with all three
/// axes active.
pub fn riesz_checks(grid: &SpatialGrid, s: f64) -> Result<RieszReport> {
    if !(s > 0.0 && s < 1.5) {
        return Err(VmlError::InvalidParameter(format!("s must lie in (0, 3/2), got {s}")));
    }
    if grid.active_axes() != [true; 3] {
        return Err(VmlError::InvalidParameter(
            "the Riesz checks need a grid with three active axes".into(),
        ));
    }
    let h = grid.box_length() / grid.dims()[0] as f64;
    let samples: Vec<(f64, Sample)> = DILATIONS
        .iter()
        .map(|&c| Ok((c * h, Sample::new(grid, c * h)?)))
        .collect::<Result<_>>()?;
    let mut items = Vec::new();

    let lp_of = |j: usize, p: f64| -> Side {
        Box::new(move |x: &Sample| {
            if j == 0 {
                Ok(x.lp_fine(p))
            } else {
                Ok(x.lp(&x.grad_pointwise(j)?, p))
            }
        })
    };
    let lam = |e: f64| -> Side { Box::new(move |x: &Sample| Ok(x.lambda_norm(e))) };
    let grad = |k: usize| -> Side { Box::new(move |x: &Sample| Ok(x.grad_l2(k))) };

    // ‖Λ^{−s} f‖_{L²} ≲ ‖f‖_{L^p}, 1/2 + s/3 = 1/p
    let p = 6.0 / (3.0 + 2.0 * s);
    items.push(scaling_item(format!("hls: |L^-s f|_2 vs |f|_{p:.4}"), &samples, lam(-s), vec![(lp_of(0, p), 1.0)])?);
    items.push(scaling_item(
        "embedding: |f|_{12/(3+2s)} vs |L^{3/4-s/2} f|".into(),
        &samples,
        lp_of(0, 12.0 / (3.0 + 2.0 * s)),
        vec![(lam(0.75 - 0.5 * s), 1.0)],
    )?);
    items.push(scaling_item(
        "embedding: |f|_{3/s} vs |L^{3/2-s} f|".into(),
        &samples,
        lp_of(0, 3.0 / s),
        vec![(lam(1.5 - s), 1.0)],
    )?);
    for k in 1..=2usize {
        let kf = k as f64;
        let den = 2.0 * (kf + 1.0 + s);
        items.push(scaling_item(
            format!("interpolation L^inf, k={k}"),
            &samples,
            lp_of(0, f64::INFINITY),
            vec![(lam(-s), (2.0 * kf - 1.0) / den), (grad(k + 1), (3.0 + 2.0 * s) / den)],
        )?);
        for j in 0..=k {
            let jf = j as f64;
            items.push(scaling_item(
                format!("interpolation L^6, j={j}, k={k}"),
                &samples,
                lp_of(j, 6.0),
                vec![
                    (lam(-s), (kf - jf) / (kf + 1.0 + s)),
                    (grad(k + 1), (jf + s + 1.0) / (kf + 1.0 + s)),
                ],
            )?);
            items.push(scaling_item(
                format!("interpolation L^3, j={j}, k={k}"),
                &samples,
                lp_of(j, 3.0),
                vec![
                    (lam(-s), (2.0 * kf - 2.0 * jf + 1.0) / den),
                    (grad(k + 1), (2.0 * jf + 2.0 * s + 1.0) / den),
                ],
            )?);
        }
    }
    // j = k = 0: ‖f‖ ≤ ‖Λ^{−s}f‖^{1/(1+s)} ‖∇f‖^{s/(1+s)} holds with constant 1
    let mut l2 = scaling_item(
        "interpolation L^2, j=0, k=0".into(),
        &samples,
        grad(0),
        vec![(lam(-s), 1.0 / (1.0 + s)), (grad(1), s / (1.0 + s))],
    )?;
    l2.passed &= l2.max_ratio <= 1.0 + 1e-12;
    items.push(l2);
    Ok(RieszReport { s, items })
}

/// `‖f‖_{L^q_x L^p_v}` and `‖f‖_{L^p_v L^q_x}` with uniform weights.
pub fn mixed_norms(f: &[Vec<f64>], p: f64, q: f64, wx: f64, wv: f64) -> (f64, f64) {
    let lp = |row: &[f64]| (wv * row.iter().map(|x| x.abs().powf(p)).sum::<f64>()).powf(1.0 / p);
    let qx_pv = (wx * f.iter().map(|row| lp(row).powf(q)).sum::<f64>()).powf(1.0 / q);
    let nv = f[0].len();
    let pv_qx = (wv
        * (0..nv)
            .map(|a| (wx * f.iter().map(|row| row[a].abs().powf(q)).sum::<f64>()).powf(p / q))
            .sum::<f64>())
    .powf(1.0 / p);
    (qx_pv, pv_qx)
}

/// `‖f‖_{L^q_x L^p_v} ≤ ‖f‖_{L^p_v L^q_x}` for `p ≤ q` on seeded nonnegative
/// samples, with equality when `p = q`.
pub fn minkowski_checks(seed: u64) -> Vec<RieszItem> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for (p, q) in [(1.0, 2.0), (1.5, 3.0), (2.0, 6.0), (2.0, 2.0), (3.0, 3.0)] {
        let mut worst: f64 = 0.0;
        for _ in 0..20 {
            let f: Vec<Vec<f64>> = (0..16)
                .map(|_| (0..40).map(|_| rng.random::<f64>().powi(3)).collect())
                .collect();
            let (a, b) = mixed_norms(&f, p, q, 0.3, 0.05);
            worst = worst.max(a / b);
        }
        let passed = if p == q { (worst - 1.0).abs() <= 1e-12 } else { worst <= 1.0 + 1e-12 };
        out.push(RieszItem {
            name: format!("minkowski p={p}, q={q}"),
            lhs_slope: f64::NAN,
            rhs_slope: f64::NAN,
            max_ratio: worst,
            passed,
        });
    }
    out
}
