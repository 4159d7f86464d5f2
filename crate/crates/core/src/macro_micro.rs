//! Orthogonal projection onto the collision invariants, macroscopic fields,
//! higher moments and the conservation-law residuals of the fluid system.
//!
//! The projection is computed against the quadrature inner product with the
//! Gram matrix of the six invariants, so `P² = P` and `P ⊥ (I − P)` hold to
//! round-off irrespective of the Gaussian moment errors of the grid. Its
//! coordinates are the macroscopic fields in
//! `Pf = a₊[1,0]μ^{1/2} + a₋[0,1]μ^{1/2} + b·v[1,1]μ^{1/2} + c(|v|²−3)[1,1]μ^{1/2}`.

use nalgebra::{Matrix6, Vector6};

use crate::error::{Result, VmlError};
use crate::landau::VPair;
use crate::phase_grid::{DistributionPair, Representation, SpatialGrid, VelocityGrid, C64, ZERO};

#[derive(Debug, Clone)]
pub struct Projection {
    grid: VelocityGrid,
    /// basis functions, one velocity vector each; species pattern in `SPECIES`
    basis: [Vec<f64>; 6],
    gram_inv: Matrix6<f64>,
}

/// Species weights `[w₊, w₋]` of each basis element.
const SPECIES: [[f64; 2]; 6] = [
    [1.0, 0.0],
    [0.0, 1.0],
    [1.0, 1.0],
    [1.0, 1.0],
    [1.0, 1.0],
    [1.0, 1.0],
];

impl Projection {
    pub fn new(grid: &VelocityGrid) -> Result<Self> {
        let sm = grid.sqrt_mu();
        let nodes = grid.nodes();
        let basis: [Vec<f64>; 6] = std::array::from_fn(|k| {
            nodes
                .iter()
                .zip(sm)
                .map(|(v, s)| {
                    s * match k {
                        0 | 1 => 1.0,
                        2..=4 => v[k - 2],
                        _ => v[0] * v[0] + v[1] * v[1] + v[2] * v[2] - 3.0,
                    }
                })
                .collect()
        });
        let mut gram = Matrix6::zeros();
        for i in 0..6 {
            for j in 0..6 {
                let w = SPECIES[i][0] * SPECIES[j][0] + SPECIES[i][1] * SPECIES[j][1];
                gram[(i, j)] = w * grid.inner(&basis[i], &basis[j]);
            }
        }
        let chol = gram
            .cholesky()
            .ok_or_else(|| VmlError::Domain("Gram matrix of the invariants is singular".into()))?;
        Ok(Self {
            grid: grid.clone(),
            basis,
            gram_inv: chol.inverse(),
        })
    }

    pub fn grid(&self) -> &VelocityGrid {
        &self.grid
    }

    /// Basis element `k` of the null space as a species pair.
    pub fn basis_pair(&self, k: usize) -> VPair {
        std::array::from_fn(|s| {
            self.basis[k]
                .iter()
                .map(|&x| C64::new(x * SPECIES[k][s], 0.0))
                .collect()
        })
    }

    /// Coordinates `(a₊, a₋, b₁, b₂, b₃, c)` of `Pf`.
    pub fn coords(&self, f: &VPair) -> [C64; 6] {
        let h3 = self.grid.quad_weight();
        let mut re = Vector6::zeros();
        let mut im = Vector6::zeros();
        for k in 0..6 {
            let mut acc = ZERO;
            for s in 0..2 {
                if SPECIES[k][s] != 0.0 {
                    let p: C64 = self.basis[k].iter().zip(&f[s]).map(|(b, z)| z * *b).sum();
                    acc += p * SPECIES[k][s];
                }
            }
            re[k] = acc.re * h3;
            im[k] = acc.im * h3;
        }
        let cr = self.gram_inv * re;
        let ci = self.gram_inv * im;
        std::array::from_fn(|k| C64::new(cr[k], ci[k]))
    }

    pub fn assemble(&self, c: &[C64; 6]) -> VPair {
        let n = self.grid.len();
        std::array::from_fn(|s| {
            (0..n)
                .map(|a| {
                    let mut z = ZERO;
                    for k in 0..6 {
                        if SPECIES[k][s] != 0.0 {
                            z += c[k] * self.basis[k][a];
                        }
                    }
                    z
                })
                .collect()
        })
    }

    pub fn project(&self, f: &VPair) -> VPair {
        self.assemble(&self.coords(f))
    }

    /// `{I − P} f`
    pub fn micro(&self, f: &VPair) -> VPair {
        let p = self.project(f);
        std::array::from_fn(|s| f[s].iter().zip(&p[s]).map(|(a, b)| a - b).collect())
    }
}

/// Macroscopic fields on the spatial grid (physical or spectral, following
/// the input representation).
#[derive(Debug, Clone, PartialEq)]
pub struct MacroFields {
    pub a_plus: Vec<C64>,
    pub a_minus: Vec<C64>,
    pub b: [Vec<C64>; 3],
    pub c: Vec<C64>,
    pub representation: Representation,
}

impl MacroFields {
    fn zeros(n: usize, repr: Representation) -> Self {
        Self {
            a_plus: vec![ZERO; n],
            a_minus: vec![ZERO; n],
            b: std::array::from_fn(|_| vec![ZERO; n]),
            c: vec![ZERO; n],
            representation: repr,
        }
    }
}

pub fn project_p(f: &DistributionPair, proj: &Projection) -> (DistributionPair, MacroFields) {
    let n_x = f.n_x();
    let mut pf = DistributionPair::zeros(n_x, f.n_v(), f.representation());
    let mut m = MacroFields::zeros(n_x, f.representation());
    for x in 0..n_x {
        let c = proj.coords(&f.pair_at(x));
        m.a_plus[x] = c[0];
        m.a_minus[x] = c[1];
        for i in 0..3 {
            m.b[i][x] = c[2 + i];
        }
        m.c[x] = c[5];
        pf.set_pair_at(x, &proj.assemble(&c));
    }
    (pf, m)
}

pub fn micro_part(f: &DistributionPair, proj: &Projection) -> DistributionPair {
    let (pf, _) = project_p(f, proj);
    let mut out = f.clone();
    out.axpy(-1.0, &pf);
    out
}

/// `A_mj(g) = ∫(v_m v_j − 1) μ^{1/2} g dv`
pub fn moment_a(grid: &VelocityGrid, g: &[C64]) -> [[C64; 3]; 3] {
    let mut out = [[ZERO; 3]; 3];
    for ((v, s), z) in grid.nodes().iter().zip(grid.sqrt_mu()).zip(g) {
        for m in 0..3 {
            for j in 0..3 {
                out[m][j] += z * ((v[m] * v[j] - 1.0) * s);
            }
        }
    }
    let h3 = grid.quad_weight();
    out.map(|r| r.map(|z| z * h3))
}

/// `B_j(g) = (1/10) ∫(|v|² − 5) v_j μ^{1/2} g dv`
pub fn moment_b(grid: &VelocityGrid, g: &[C64]) -> [C64; 3] {
    let mut out = [ZERO; 3];
    for ((v, s), z) in grid.nodes().iter().zip(grid.sqrt_mu()).zip(g) {
        let r2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
        for j in 0..3 {
            out[j] += z * ((r2 - 5.0) * v[j] * s);
        }
    }
    let k = grid.quad_weight() / 10.0;
    out.map(|z| z * k)
}

/// `∫ v μ^{1/2} g dv`
pub fn moment_v(grid: &VelocityGrid, g: &[C64]) -> [C64; 3] {
    let mut out = [ZERO; 3];
    for ((v, s), z) in grid.nodes().iter().zip(grid.sqrt_mu()).zip(g) {
        for j in 0..3 {
            out[j] += z * (v[j] * s);
        }
    }
    out.map(|z| z * grid.quad_weight())
}

/// Higher moments at one spatial point: `A` and `B` of `{I−P}f·[1,1]` and
/// `G = ⟨v μ^{1/2}, {I−P}f·q₁⟩` with `q₁ = [1, −1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentSet {
    pub a: [[C64; 3]; 3],
    pub bv: [C64; 3],
    pub g: [C64; 3],
}

pub fn moments(f: &VPair, proj: &Projection) -> MomentSet {
    let grid = proj.grid();
    let micro = proj.micro(f);
    let sum: Vec<C64> = micro[0].iter().zip(&micro[1]).map(|(a, b)| a + b).collect();
    let diff: Vec<C64> = micro[0].iter().zip(&micro[1]).map(|(a, b)| a - b).collect();
    MomentSet {
        a: moment_a(grid, &sum),
        bv: moment_b(grid, &sum),
        g: moment_v(grid, &diff),
    }
}

/// Spectral snapshot of the fields entering the conservation laws.
#[derive(Debug, Clone)]
pub struct FluidSnapshot {
    pub t: f64,
    pub a_plus: Vec<C64>,
    pub a_minus: Vec<C64>,
    pub b: [Vec<C64>; 3],
    pub g: [Vec<C64>; 3],
}

impl FluidSnapshot {
    /// Requires `f` in the Fourier representation.
    pub fn from_state(t: f64, f: &DistributionPair, proj: &Projection) -> Self {
        let (_, m) = project_p(f, proj);
        let n_x = f.n_x();
        let mut g: [Vec<C64>; 3] = std::array::from_fn(|_| vec![ZERO; n_x]);
        for x in 0..n_x {
            let pair = f.pair_at(x);
            let mom = moments(&pair, proj);
            for i in 0..3 {
                g[i][x] = mom.g[i];
            }
        }
        Self {
            t,
            a_plus: m.a_plus,
            a_minus: m.a_minus,
            b: m.b,
            g,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FluidResiduals {
    pub t: Vec<f64>,
    /// `‖∂_t((a₊+a₋)/2) + ∇·b‖` per snapshot
    pub continuity: Vec<f64>,
    /// `‖∂_t(a₊−a₋) + ∇·G‖` per snapshot
    pub charge: Vec<f64>,
}

impl FluidResiduals {
    pub fn max_continuity(&self) -> f64 {
        self.continuity.iter().cloned().fold(0.0, f64::max)
    }

    pub fn max_charge(&self) -> f64 {
        self.charge.iter().cloned().fold(0.0, f64::max)
    }
}

/// Weights of the second-order derivative at `t[i]` from three samples.
fn three_point(t: [f64; 3], at: usize) -> [f64; 3] {
    let [t0, t1, t2] = t;
    let x = t[at];
    [
        ((x - t1) + (x - t2)) / ((t0 - t1) * (t0 - t2)),
        ((x - t0) + (x - t2)) / ((t1 - t0) * (t1 - t2)),
        ((x - t0) + (x - t1)) / ((t2 - t0) * (t2 - t1)),
    ]
}

pub fn fluid_residuals(history: &[FluidSnapshot], grid: &SpatialGrid) -> Result<FluidResiduals> {
    if history.len() < 3 {
        return Err(VmlError::InsufficientHistory {
            needed: 3,
            got: history.len(),
        });
    }
    let n = history.len();
    let nm = grid.len();
    let i_unit = C64::new(0.0, 1.0);
    let mut out = FluidResiduals {
        t: Vec::with_capacity(n),
        continuity: Vec::with_capacity(n),
        charge: Vec::with_capacity(n),
    };
    for i in 0..n {
        let (lo, at) = if i == 0 {
            (0, 0)
        } else if i == n - 1 {
            (n - 3, 2)
        } else {
            (i - 1, 1)
        };
        let tt = [history[lo].t, history[lo + 1].t, history[lo + 2].t];
        let w = three_point(tt, at);
        let s = &history[i];
        let mut r1 = 0.0;
        let mut r2 = 0.0;
        for m in 0..nm {
            let mut dsum = ZERO;
            let mut ddiff = ZERO;
            for k in 0..3 {
                let h = &history[lo + k];
                dsum += (h.a_plus[m] + h.a_minus[m]) * (0.5 * w[k]);
                ddiff += (h.a_plus[m] - h.a_minus[m]) * w[k];
            }
            let kap = grid.kappa(m);
            let mut divb = ZERO;
            let mut divg = ZERO;
            for a in 0..3 {
                divb += i_unit * kap[a] * s.b[a][m];
                divg += i_unit * kap[a] * s.g[a][m];
            }
            r1 += (dsum + divb).norm_sqr();
            r2 += (ddiff + divg).norm_sqr();
        }
        let dv = grid.cell_volume();
        out.t.push(s.t);
        out.continuity.push((dv * r1).sqrt());
        out.charge.push((dv * r2).sqrt());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn proj() -> Projection {
        Projection::new(&VelocityGrid::new(16, 6.0).unwrap()).unwrap()
    }

    #[test]
    fn maxwellian_of_first_species() {
        let p = proj();
        let sm: Vec<C64> = p.grid().sqrt_mu().iter().map(|&s| C64::new(s, 0.0)).collect();
        let f: VPair = [sm.clone(), vec![ZERO; sm.len()]];
        let c = p.coords(&f);
        assert!((c[0].re - 1.0).abs() < 1e-12);
        for k in 1..6 {
            assert!(c[k].norm() < 1e-12);
        }
    }

    #[test]
    fn first_moment_coordinate() {
        let p = proj();
        let f = p.basis_pair(2);
        let c = p.coords(&f);
        assert!((c[2].re - 1.0).abs() < 1e-12);
        let m = p.micro(&f);
        assert!(m[0].iter().chain(&m[1]).all(|z| z.norm() < 1e-12));
    }

    #[test]
    fn too_short_history() {
        let g = SpatialGrid::one_d(4, 1.0).unwrap();
        assert!(matches!(
            fluid_residuals(&[], &g),
            Err(VmlError::InsufficientHistory { needed: 3, got: 0 })
        ));
    }

    #[test]
    fn three_point_weights_differentiate_quadratics() {
        let t = [0.0, 0.3, 1.0];
        for at in 0..3 {
            let w = three_point(t, at);
            let d: f64 = (0..3).map(|k| w[k] * t[k] * t[k]).sum();
            assert!((d - 2.0 * t[at]).abs() < 1e-12);
        }
    }
}
