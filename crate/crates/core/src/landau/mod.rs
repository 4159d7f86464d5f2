//! Landau kernel, collision frequency, the bilinear collision operator and its
//! linearization about the Maxwellian, the σ-norms and coercivity sampling.
//!
//! In `L` and `Γ` the first argument of `Q` is read as the test particle and
//! the second as the field particle, so that
//!
//! ```text
//! L± f = 2 A f± + K (f₊ + f₋)
//! A g  = −μ^{-1/2} ∇·(σ μ ∇(μ^{-1/2} g))
//! K g  = −μ^{-1/2} Q(field = μ^{1/2} g, test = μ)
//! ```
//!
//! With `h = f₊ + f₋`, `d = f₊ − f₋` and `T = A + K` this reads
//! `L₊ = T h + A d`, `L₋ = T h − A d`, whence `⟨Lf, f⟩ = ⟨T h, h⟩ + ⟨A d, d⟩ ≥ 0`.
//!
//! The discrete operators use the folded derivative
//! `D̃ g = μ^{1/2} D(μ^{-1/2} g)` with all Maxwellian factors absorbed into
//! bounded stencil coefficients:
//!
//! ```text
//! A = D̃ᵀ σ D̃,   T = D̃ᵀ (σ − μ^{1/2} K⊛ μ^{1/2}) D̃,   σ = K⊛μ
//! ```
//!
//! `T` is a symmetric difference form `½ Σ μ_a μ_b (U_a − U_b)ᵀ K_ab (U_a − U_b)`
//! whose null space is exact because `D` is exact on quadratics and
//! `Φ(z) z = 0`.

pub mod cache;
mod coercivity;
pub mod conv;
mod dense;
mod norm;
mod solver;
pub mod stencil;

use crate::error::{Result, VmlError};
use crate::phase_grid::{VelocityGrid, C64, ZERO};

pub use coercivity::{coercivity_gap, coercivity_ratio, hermite_sample, CoercivityReport};
pub use conv::{sym_index, KernelConvolver};
pub use dense::{assemble_dense_l, DENSE_MAX_NV};
pub use norm::{sigma_norm, sigma_norm_pair, sigma_norm_sq, transverse_part_sq, SigmaNormSpec};
pub use solver::{pcg, PcgOutcome};
use stencil::Stencil1d;

/// Velocity vector of both species at one spatial node or mode.
pub type VPair = [Vec<C64>; 2];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelSample {
    pub matrix: [[f64; 3]; 3],
    pub at: [f64; 3],
}

/// `Φ^{ij}(v) = (δ_ij − v_i v_j/|v|²) |v|^{γ+2}`
pub fn phi_kernel(v: [f64; 3], gamma: f64) -> Result<KernelSample> {
    if v == [0.0; 3] {
        return Err(VmlError::Domain("Landau kernel is singular at v = 0".into()));
    }
    let c = conv::phi_components(v, gamma);
    let mut matrix = [[0.0; 3]; 3];
    for (i, row) in matrix.iter_mut().enumerate() {
        for (j, m) in row.iter_mut().enumerate() {
            *m = c[sym_index(i, j)];
        }
    }
    Ok(KernelSample { matrix, at: v })
}

#[derive(Debug, Clone)]
pub struct CollisionTables {
    grid: VelocityGrid,
    gamma: f64,
    conv: KernelConvolver,
    sigma: Vec<[f64; 6]>,
    d: Stencil1d,
    d_t: Stencil1d,
    df: Stencil1d,
    df_t: Stencil1d,
    jv_par: Vec<f64>,
    jv_perp: Vec<f64>,
    diag_a: Vec<f64>,
}

pub fn build_collision_tables(grid: &VelocityGrid, gamma: f64) -> Result<CollisionTables> {
    check_inputs(grid, gamma)?;
    let conv = KernelConvolver::new(grid.n_v(), grid.spacing(), gamma);
    let comps = conv.conv_scalar_real(grid.mu());
    let sigma = (0..grid.len())
        .map(|a| std::array::from_fn(|s| comps[s][a]))
        .collect();
    Ok(CollisionTables::assemble(grid, gamma, conv, sigma))
}

fn check_inputs(grid: &VelocityGrid, gamma: f64) -> Result<()> {
    if grid.n_v() < 8 {
        return Err(VmlError::ResolutionTooCoarse { n_v: grid.n_v() });
    }
    if !(-3.0..-2.0).contains(&gamma) {
        return Err(VmlError::InvalidParameter(format!(
            "gamma must lie in [-3, -2), got {gamma}"
        )));
    }
    Ok(())
}

impl CollisionTables {
    /// Rebuild from a previously computed σ table (see [`cache`]).
    pub fn with_sigma(grid: &VelocityGrid, gamma: f64, sigma: Vec<[f64; 6]>) -> Result<Self> {
        check_inputs(grid, gamma)?;
        if sigma.len() != grid.len() {
            return Err(VmlError::ShapeMismatch {
                expected: grid.len(),
                got: sigma.len(),
            });
        }
        let conv = KernelConvolver::new(grid.n_v(), grid.spacing(), gamma);
        Ok(Self::assemble(grid, gamma, conv, sigma))
    }

    fn assemble(grid: &VelocityGrid, gamma: f64, conv: KernelConvolver, sigma: Vec<[f64; 6]>) -> Self {
        let n = grid.n_v();
        let h = grid.spacing();
        let d = Stencil1d::first_derivative(n, h);
        let fold: Vec<f64> = grid.axis().iter().map(|x| (-0.25 * x * x).exp()).collect();
        let df = d.conjugated(&fold);
        let jv_par = grid
            .nodes()
            .iter()
            .map(|&v| (1.0 + crate::phase_grid::norm2(v)).powf(0.25 * gamma))
            .collect();
        let jv_perp = grid
            .nodes()
            .iter()
            .map(|&v| (1.0 + crate::phase_grid::norm2(v)).powf(0.25 * (gamma + 2.0)))
            .collect();
        let mut t = Self {
            grid: grid.clone(),
            gamma,
            conv,
            sigma,
            d_t: d.transpose(),
            d,
            df_t: df.transpose(),
            df,
            jv_par,
            jv_perp,
            diag_a: Vec::new(),
        };
        t.diag_a = t.compute_diag_a();
        t
    }

    pub fn grid(&self) -> &VelocityGrid {
        &self.grid
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    /// σ at node `a` as six symmetric components (xx, xy, xz, yy, yz, zz).
    pub fn sigma(&self) -> &[[f64; 6]] {
        &self.sigma
    }

    pub fn sigma_matrix(&self, a: usize) -> [[f64; 3]; 3] {
        let s = &self.sigma[a];
        std::array::from_fn(|i| std::array::from_fn(|j| s[sym_index(i, j)]))
    }

    pub fn convolver(&self) -> &KernelConvolver {
        &self.conv
    }

    /// `⟨v⟩^{γ/2}` at every node.
    pub fn weight_parallel(&self) -> &[f64] {
        &self.jv_par
    }

    /// `⟨v⟩^{(γ+2)/2}` at every node.
    pub fn weight_transverse(&self) -> &[f64] {
        &self.jv_perp
    }

    /// Exact diagonal of the discrete `A`, used as the Jacobi preconditioner.
    pub fn diag_a(&self) -> &[f64] {
        &self.diag_a
    }

    pub(crate) fn folded_stencil(&self) -> &Stencil1d {
        &self.df
    }

    fn compute_diag_a(&self) -> Vec<f64> {
        let n = self.grid.n_v();
        let cols = self.df_t.rows();
        let mut diag = vec![0.0; self.len()];
        for (p, out) in diag.iter_mut().enumerate() {
            let ijk = [p / (n * n), (p / n) % n, p % n];
            // rows k of D̃_i that touch column p, with coefficient per axis
            let mut touched: Vec<(usize, [f64; 3])> = Vec::with_capacity(9);
            for axis in 0..3 {
                let stride = self.grid.stride(axis);
                for &(row, c) in &cols[ijk[axis]] {
                    let k = p - ijk[axis] * stride + row * stride;
                    match touched.iter_mut().find(|(q, _)| *q == k) {
                        Some((_, cs)) => cs[axis] += c,
                        None => {
                            let mut cs = [0.0; 3];
                            cs[axis] = c;
                            touched.push((k, cs));
                        }
                    }
                }
            }
            *out = touched
                .iter()
                .map(|(k, c)| {
                    let s = self.sigma_matrix(*k);
                    (0..3)
                        .flat_map(|i| (0..3).map(move |j| (i, j)))
                        .map(|(i, j)| c[i] * s[i][j] * c[j])
                        .sum::<f64>()
                })
                .sum();
        }
        diag
    }

    fn grad_with(&self, st: &Stencil1d, g: &[C64]) -> [Vec<C64>; 3] {
        std::array::from_fn(|axis| {
            let mut out = vec![ZERO; g.len()];
            st.apply_axis(axis, g, &mut out);
            out
        })
    }

    fn div_with(&self, st_t: &Stencil1d, w: &[Vec<C64>; 3]) -> Vec<C64> {
        let len = w[0].len();
        let mut out = vec![ZERO; len];
        let mut tmp = vec![ZERO; len];
        for (axis, comp) in w.iter().enumerate() {
            st_t.apply_axis(axis, comp, &mut tmp);
            out.iter_mut().zip(&tmp).for_each(|(o, t)| *o += t);
        }
        out
    }

    /// `D̃ g`
    pub fn grad_folded(&self, g: &[C64]) -> [Vec<C64>; 3] {
        self.grad_with(&self.df, g)
    }

    /// `D̃ᵀ w`
    pub fn div_folded_t(&self, w: &[Vec<C64>; 3]) -> Vec<C64> {
        self.div_with(&self.df_t, w)
    }

    /// Gradient of a perturbation, `∇g ≈ D̃ g − (v/2) g`; exact on
    /// polynomial-times-`μ^{1/2}` of degree ≤ 2.
    pub fn grad_perturbation(&self, g: &[C64]) -> [Vec<C64>; 3] {
        let mut v = self.grad_folded(g);
        for (axis, comp) in v.iter_mut().enumerate() {
            for (a, z) in comp.iter_mut().enumerate() {
                *z -= g[a] * (0.5 * self.grid.node(a)[axis]);
            }
        }
        v
    }

    fn sigma_times(&self, v: &[Vec<C64>; 3]) -> [Vec<C64>; 3] {
        std::array::from_fn(|i| {
            (0..self.len())
                .map(|a| {
                    let s = &self.sigma[a];
                    v[0][a] * s[sym_index(i, 0)] + v[1][a] * s[sym_index(i, 1)] + v[2][a] * s[sym_index(i, 2)]
                })
                .collect()
        })
    }

    /// `A g = D̃ᵀ σ D̃ g`
    pub fn apply_a(&self, g: &[C64]) -> Vec<C64> {
        let v = self.grad_folded(g);
        self.div_folded_t(&self.sigma_times(&v))
    }

    /// `T g = D̃ᵀ (σ − μ^{1/2} K⊛ μ^{1/2}) D̃ g`, the one-species linearization.
    pub fn apply_t(&self, g: &[C64]) -> Vec<C64> {
        let v = self.grad_folded(g);
        let sm = self.grid.sqrt_mu();
        let u: [Vec<C64>; 3] = std::array::from_fn(|i| v[i].iter().zip(sm).map(|(z, s)| z * s).collect());
        let c = self.conv.conv_vector(&u);
        let mut w = self.sigma_times(&v);
        for i in 0..3 {
            for a in 0..self.len() {
                w[i][a] -= c[i][a] * sm[a];
            }
        }
        self.div_folded_t(&w)
    }

    /// `K g = T g − A g`
    pub fn apply_k(&self, g: &[C64]) -> Vec<C64> {
        let t = self.apply_t(g);
        let a = self.apply_a(g);
        t.into_iter().zip(a).map(|(x, y)| x - y).collect()
    }

    /// `Q(F, G) = ∇·∫Φ(v−v*){F(v*)∇G(v) − ∇F(v*)G(v)}dv*` with `F` the
    /// field particle, in conservative divergence form.
    pub fn apply_q(&self, field: &[C64], test: &[C64]) -> Vec<C64> {
        let a = self.conv.conv_scalar(field);
        let df = self.grad_with(&self.d, field);
        let b = self.conv.conv_vector(&df);
        let dg = self.grad_with(&self.d, test);
        let j: [Vec<C64>; 3] = std::array::from_fn(|i| {
            (0..self.len())
                .map(|p| {
                    let mut s = -b[i][p] * test[p];
                    for k in 0..3 {
                        s += a[sym_index(i, k)][p] * dg[k][p];
                    }
                    s
                })
                .collect()
        });
        let mut out = self.div_with(&self.d_t, &j);
        out.iter_mut().for_each(|z| *z = -*z);
        out
    }

    /// `L± f = T h ± A d` with `h = f₊ + f₋`, `d = f₊ − f₋`.
    pub fn apply_l(&self, f: &VPair) -> VPair {
        let (h, d) = sum_diff(f);
        let th = self.apply_t(&h);
        let ad = self.apply_a(&d);
        [
            th.iter().zip(&ad).map(|(x, y)| x + y).collect(),
            th.iter().zip(&ad).map(|(x, y)| x - y).collect(),
        ]
    }

    /// `Γ±(f, g) = μ^{-1/2} Q(field = μ^{1/2}(g₊ + g₋), test = μ^{1/2} f±)`,
    /// folded so that `−Γ(f, m) − Γ(m, f) = L f` holds exactly for
    /// `m = μ^{1/2}[1, 1]`.
    pub fn apply_gamma(&self, f: &VPair, g: &VPair) -> VPair {
        let sm = self.grid.sqrt_mu();
        let hsum: Vec<C64> = g[0].iter().zip(&g[1]).map(|(x, y)| x + y).collect();
        let weighted: Vec<C64> = hsum.iter().zip(sm).map(|(z, s)| z * s).collect();
        let a = self.conv.conv_scalar(&weighted);
        let dh = self.grad_perturbation(&hsum);
        let dh_w: [Vec<C64>; 3] = std::array::from_fn(|i| dh[i].iter().zip(sm).map(|(z, s)| z * s).collect());
        let b = self.conv.conv_vector(&dh_w);
        std::array::from_fn(|sp| {
            let fs = &f[sp];
            let df = self.grad_perturbation(fs);
            let j: [Vec<C64>; 3] = std::array::from_fn(|i| {
                (0..self.len())
                    .map(|p| {
                        let mut s = -b[i][p] * fs[p];
                        for k in 0..3 {
                            s += a[sym_index(i, k)][p] * df[k][p];
                        }
                        s
                    })
                    .collect()
            });
            let mut out = self.div_folded_t(&j);
            out.iter_mut().for_each(|z| *z = -*z);
            out
        })
    }

    /// Species-summed quadrature inner product `⟨f, g⟩`.
    pub fn pair_inner(&self, f: &VPair, g: &VPair) -> C64 {
        self.grid.inner_c(&f[0], &g[0]) + self.grid.inner_c(&f[1], &g[1])
    }
}

pub fn sum_diff(f: &VPair) -> (Vec<C64>, Vec<C64>) {
    let h = f[0].iter().zip(&f[1]).map(|(a, b)| a + b).collect();
    let d = f[0].iter().zip(&f[1]).map(|(a, b)| a - b).collect();
    (h, d)
}

/// Inverse of [`sum_diff`].
pub fn from_sum_diff(h: &[C64], d: &[C64]) -> VPair {
    [
        h.iter().zip(d).map(|(a, b)| (a + b) * 0.5).collect(),
        h.iter().zip(d).map(|(a, b)| (a - b) * 0.5).collect(),
    ]
}

pub fn to_complex(x: &[f64]) -> Vec<C64> {
    x.iter().map(|&r| C64::new(r, 0.0)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tables(n: usize) -> CollisionTables {
        let g = VelocityGrid::new(n, 6.0).unwrap();
        build_collision_tables(&g, -3.0).unwrap()
    }

    #[test]
    fn phi_examples() {
        let k = phi_kernel([1.0, 0.0, 0.0], -3.0).unwrap();
        assert_eq!(k.matrix, [[0.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);
        assert!(phi_kernel([0.0; 3], -3.0).is_err());
    }

    #[test]
    fn refuses_coarse_grid() {
        let g = VelocityGrid::new(6, 6.0).unwrap();
        assert!(matches!(
            build_collision_tables(&g, -3.0),
            Err(VmlError::ResolutionTooCoarse { n_v: 6 })
        ));
    }

    #[test]
    fn null_space_of_t_is_exact() {
        let t = tables(10);
        let g = t.grid().clone();
        let sm = g.sqrt_mu();
        for poly in [
            Box::new(|_v: [f64; 3]| 1.0) as Box<dyn Fn([f64; 3]) -> f64>,
            Box::new(|v: [f64; 3]| v[1]),
            Box::new(|v: [f64; 3]| v[0] * v[0] + v[1] * v[1] + v[2] * v[2]),
        ] {
            let f: Vec<C64> = g.nodes().iter().zip(sm).map(|(&v, s)| C64::new(poly(v) * s, 0.0)).collect();
            let out = t.apply_t(&f);
            let m = out.iter().map(|z| z.norm()).fold(0.0, f64::max);
            assert!(m < 1e-12, "residual {m}");
        }
    }

    #[test]
    fn diag_matches_unit_vector_probe() {
        let t = tables(8);
        for p in [0usize, 37, 200, 511] {
            let mut e = vec![ZERO; t.len()];
            e[p] = C64::new(1.0, 0.0);
            let col = t.apply_a(&e);
            assert!((col[p].re - t.diag_a()[p]).abs() < 1e-12 * (1.0 + t.diag_a()[p]));
        }
    }

    #[test]
    fn gamma_reproduces_l() {
        let t = tables(8);
        let g = t.grid().clone();
        let sm = g.sqrt_mu();
        let f: VPair = std::array::from_fn(|s| {
            g.nodes()
                .iter()
                .zip(sm)
                .map(|(v, m)| C64::new((v[0] + 0.3 * s as f64 * v[2] * v[1] + 0.5) * m, 0.0))
                .collect()
        });
        let m: VPair = [to_complex(sm), to_complex(sm)];
        let l = t.apply_l(&f);
        let g1 = t.apply_gamma(&f, &m);
        let g2 = t.apply_gamma(&m, &f);
        for s in 0..2 {
            for p in 0..t.len() {
                let r = l[s][p] + g1[s][p] + g2[s][p];
                assert!(r.norm() < 1e-12 * (1.0 + l[s][p].norm()));
            }
        }
    }
}
