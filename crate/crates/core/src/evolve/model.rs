//! Grids, operator tables and the split-step integrator.
//!
//! One step of length `dt` is the Strang composition
//! `T(dt/2) F(dt/2) C(dt) F(dt/2) T(dt/2)`:
//!
//! * `T`: free streaming `−v·∇ₓf` as an exact phase shift per Fourier mode,
//!   together with the exact source-free Maxwell rotation;
//! * `F`: the field–particle exchange `∂f = E·v μ^{1/2} q₁`, `∂E = −j`, solved
//!   exactly per mode as a three-frequency oscillator; in nonlinear mode the
//!   force and quadratic terms are added by an exponential (Lawson) midpoint
//!   rule around that oscillator;
//! * `C`: `∂f = −L f` by the trapezoid rule, written in `h = f₊ + f₋`,
//!   `d = f₊ − f₋` where it decouples into two Hermitian solves.

use nalgebra::{Matrix3, SymmetricEigen};

use crate::error::{Result, VmlError};
use crate::landau::stencil::Stencil1d;
use crate::landau::{cache, from_sum_diff, pcg, sum_diff, CollisionTables};
use crate::macro_micro::Projection;
use crate::maxwell::{curl_mode, current_at, vacuum_rotate, EMField};
use crate::phase_grid::{DistributionPair, Representation, SpatialGrid, VelocityGrid, C64, ZERO};

use super::config::{Mode, RunConfig};
use super::PhaseState;

/// Per-step output of the integrator.
#[derive(Debug, Clone, PartialEq)]
pub struct StepInfo {
    /// `ΔV ⟨L f̄, f̄⟩` per Fourier mode at the collision midpoint
    /// `f̄ = (f⁰ + f¹)/2`; zero when collisions are off.
    pub dissipation: Vec<f64>,
    pub solver_iterations: usize,
    pub solver_residual: f64,
}

/// Time derivative of a state.
#[derive(Debug, Clone, PartialEq)]
pub struct Derivative {
    pub f: DistributionPair,
    pub em: EMField,
}

#[derive(Debug, Clone)]
struct Oscillator {
    basis: Matrix3<f64>,
    omega: [f64; 3],
}

#[derive(Debug, Clone)]
pub struct Model {
    config: RunConfig,
    sg: SpatialGrid,
    vg: VelocityGrid,
    tables: CollisionTables,
    proj: Projection,
    d4: Stencil1d,
    osc: Oscillator,
}

impl Model {
    /// Build grids and tables; σ comes from the configured cache directory
    /// when one is set.
    pub fn new(config: &RunConfig) -> Result<Self> {
        config.validate()?;
        let vg = VelocityGrid::new(config.grids.n_v, config.grids.v_max)?;
        let tables = if config.output.table_cache.is_empty() {
            crate::landau::build_collision_tables(&vg, config.physics.gamma)?
        } else {
            cache::load_or_build(std::path::Path::new(&config.output.table_cache), &vg, config.physics.gamma)?
        };
        Self::with_tables(config, tables)
    }

    pub fn with_tables(config: &RunConfig, tables: CollisionTables) -> Result<Self> {
        config.validate()?;
        let g = &config.grids;
        let vg = tables.grid().clone();
        if vg.n_v() != g.n_v || vg.v_max() != g.v_max || tables.gamma() != config.physics.gamma {
            return Err(VmlError::InvalidParameter(
                "collision tables do not match the configured grid".into(),
            ));
        }
        let sg = SpatialGrid::new(g.n_x, g.box_length, g.active_axes())?;
        let proj = Projection::new(&vg)?;
        let d4 = Stencil1d::first_derivative_4th(vg.n_v(), vg.spacing());
        let mut m = Matrix3::<f64>::zeros();
        for (v, mu) in vg.nodes().iter().zip(vg.mu()) {
            for i in 0..3 {
                for k in 0..3 {
                    m[(i, k)] += v[i] * v[k] * mu;
                }
            }
        }
        m *= 2.0 * vg.quad_weight();
        let eig = SymmetricEigen::new(m);
        let omega = std::array::from_fn(|k| eig.eigenvalues[k].max(0.0).sqrt());
        Ok(Self {
            config: config.clone(),
            sg,
            vg,
            tables,
            proj,
            d4,
            osc: Oscillator {
                basis: eig.eigenvectors,
                omega,
            },
        })
    }

    pub fn config(&self) -> &RunConfig {
        &self.config
    }

    pub fn spatial(&self) -> &SpatialGrid {
        &self.sg
    }

    pub fn velocity(&self) -> &VelocityGrid {
        &self.vg
    }

    pub fn tables(&self) -> &CollisionTables {
        &self.tables
    }

    pub fn projection(&self) -> &Projection {
        &self.proj
    }

    fn nonlinear(&self) -> bool {
        self.config.physics.mode == Mode::Nonlinear
    }

    fn check_state(&self, s: &PhaseState) -> Result<()> {
        if s.f.n_x() != self.sg.len() || s.f.n_v() != self.vg.len() || s.em.len() != self.sg.len() {
            return Err(VmlError::ShapeMismatch {
                expected: 2 * self.sg.len() * self.vg.len(),
                got: s.f.values().len(),
            });
        }
        if s.f.representation() != Representation::Fourier {
            return Err(VmlError::InvalidParameter("state must hold f in the Fourier representation".into()));
        }
        Ok(())
    }

    fn mode_is_zero(f: &DistributionPair, m: usize) -> bool {
        f.slice(0, m).iter().chain(f.slice(1, m)).all(|z| *z == ZERO)
    }

    /// `exp(−i κ·v τ)` on every velocity node, from one table per axis.
    fn phase(&self, m: usize, tau: f64) -> Vec<C64> {
        let k = self.sg.kappa(m);
        let axis = self.vg.axis();
        let tab: [Vec<C64>; 3] =
            std::array::from_fn(|i| axis.iter().map(|&x| C64::from_polar(1.0, -k[i] * x * tau)).collect());
        let n = self.vg.n_v();
        let mut out = Vec::with_capacity(self.vg.len());
        for a in 0..n {
            for b in 0..n {
                let ab = tab[0][a] * tab[1][b];
                for c in 0..n {
                    out.push(ab * tab[2][c]);
                }
            }
        }
        out
    }

    /// Free streaming plus vacuum Maxwell over `tau`.
    pub fn transport(&self, s: &mut PhaseState, tau: f64) {
        for m in 0..self.sg.len() {
            if self.sg.kappa_abs(m) == 0.0 || Self::mode_is_zero(&s.f, m) {
                continue;
            }
            let ph = self.phase(m, tau);
            for sp in 0..2 {
                s.f.slice_mut(sp, m).iter_mut().zip(&ph).for_each(|(z, p)| *z *= p);
            }
        }
        vacuum_rotate(&mut s.em, &self.sg, tau);
    }

    /// Exact solution of `∂f = E·v μ^{1/2} q₁`, `∂E = −j` over `tau` for
    /// the data `(f, E)` of one mode.
    fn oscillate(&self, f: &mut DistributionPair, em: &mut EMField, m: usize, tau: f64) {
        let e = em.e_at(m);
        let j = current_at(f, &self.vg, m);
        let q = &self.osc.basis;
        let mut e_new = [ZERO; 3];
        let mut e_int = [ZERO; 3];
        for k in 0..3 {
            let ek: C64 = (0..3).map(|i| e[i] * q[(i, k)]).sum();
            let jk: C64 = (0..3).map(|i| j[i] * q[(i, k)]).sum();
            let w = self.osc.omega[k];
            let (c, s) = ((w * tau).cos(), (w * tau).sin());
            let (val, int) = if w > 0.0 {
                (ek * c - jk * (s / w), ek * (s / w) - jk * ((1.0 - c) / (w * w)))
            } else {
                (ek - jk * tau, ek * tau - jk * (0.5 * tau * tau))
            };
            for i in 0..3 {
                e_new[i] += val * q[(i, k)];
                e_int[i] += int * q[(i, k)];
            }
        }
        em.set_e(m, e_new);
        if e_int.iter().all(|z| *z == ZERO) {
            return;
        }
        let sm = self.vg.sqrt_mu();
        let nodes = self.vg.nodes();
        let (fp, fm) = {
            let n = self.vg.len();
            let vals = f.values_mut();
            let (a, b) = vals.split_at_mut(self.sg.len() * n);
            (&mut a[m * n..(m + 1) * n], &mut b[m * n..(m + 1) * n])
        };
        for a in 0..nodes.len() {
            let v = nodes[a];
            let g = (e_int[0] * v[0] + e_int[1] * v[1] + e_int[2] * v[2]) * sm[a];
            fp[a] += g;
            fm[a] -= g;
        }
    }

    fn oscillate_all(&self, f: &mut DistributionPair, em: &mut EMField, tau: f64) {
        for m in 0..self.sg.len() {
            self.oscillate(f, em, m, tau);
        }
    }

    /// Nonlinear part `−q₀(E + v×B)·∇ᵥf + (q₀/2) E·v f + Γ(f, f)`, evaluated
    /// node by node in physical space; the force terms require coupling and
    /// `Γ` requires collisions.
    pub fn nonlinear_term(&self, f: &DistributionPair, em: &EMField) -> Result<DistributionPair> {
        let coupling = self.config.physics.coupling;
        let collisions = self.config.physics.collisions;
        let mut fp = f.clone();
        fp.to_physical(&self.sg)?;
        let to_phys = |c: &[Vec<C64>; 3]| -> Result<[Vec<f64>; 3]> {
            let mut out: [Vec<f64>; 3] = Default::default();
            for i in 0..3 {
                out[i] = crate::phase_grid::fourier_inverse(&self.sg, &c[i])?;
            }
            Ok(out)
        };
        let e = to_phys(&em.e)?;
        let b = to_phys(&em.b)?;
        let nv = self.vg.len();
        let mut out = DistributionPair::zeros(self.sg.len(), nv, Representation::Physical);
        let mut grad = [vec![0.0; nv], vec![0.0; nv], vec![0.0; nv]];
        for x in 0..self.sg.len() {
            let pair = fp.pair_at(x);
            if pair.iter().all(|s| s.iter().all(|z| *z == ZERO)) {
                continue;
            }
            let mut acc: [Vec<C64>; 2] = if collisions {
                self.tables.apply_gamma(&pair, &pair)
            } else {
                [vec![ZERO; nv], vec![ZERO; nv]]
            };
            if coupling {
                let ex = [e[0][x], e[1][x], e[2][x]];
                let bx = [b[0][x], b[1][x], b[2][x]];
                for sp in 0..2 {
                    let sign = if sp == 0 { 1.0 } else { -1.0 };
                    let g: Vec<f64> = pair[sp].iter().map(|z| z.re).collect();
                    for (axis, gr) in grad.iter_mut().enumerate() {
                        self.d4.apply_axis_real(axis, &g, gr);
                    }
                    for (a, v) in self.vg.nodes().iter().enumerate() {
                        let force = [
                            ex[0] + v[1] * bx[2] - v[2] * bx[1],
                            ex[1] + v[2] * bx[0] - v[0] * bx[2],
                            ex[2] + v[0] * bx[1] - v[1] * bx[0],
                        ];
                        let fg = force[0] * grad[0][a] + force[1] * grad[1][a] + force[2] * grad[2][a];
                        let ev = ex[0] * v[0] + ex[1] * v[1] + ex[2] * v[2];
                        acc[sp][a] += C64::new(sign * (0.5 * ev * g[a] - fg), 0.0);
                    }
                }
            }
            out.set_pair_at(x, &acc);
        }
        out.to_fourier(&self.sg)?;
        self.zero_nyquist_f(&mut out);
        Ok(out)
    }

    fn zero_nyquist_f(&self, f: &mut DistributionPair) {
        for m in 0..self.sg.len() {
            if self.sg.is_nyquist(m) {
                for sp in 0..2 {
                    f.slice_mut(sp, m).iter_mut().for_each(|z| *z = ZERO);
                }
            }
        }
    }

    fn zero_nyquist(&self, s: &mut PhaseState) {
        self.zero_nyquist_f(&mut s.f);
        for m in 0..self.sg.len() {
            if self.sg.is_nyquist(m) {
                s.em.set_e(m, [ZERO; 3]);
                s.em.set_b(m, [ZERO; 3]);
            }
        }
    }

    /// Field–force substep over `tau`.
    pub fn field_force(&self, s: &mut PhaseState, tau: f64) -> Result<()> {
        let coupling = self.config.physics.coupling;
        if !self.nonlinear() {
            if coupling {
                self.oscillate_all(&mut s.f, &mut s.em, tau);
            }
            return Ok(());
        }
        // Lawson midpoint: y₁ = Φ_τ y₀ + τ Φ_{τ/2} N(Φ_{τ/2}(y₀ + τ/2 N(y₀)))
        let flow = |f: &mut DistributionPair, em: &mut EMField, t: f64| {
            if coupling {
                self.oscillate_all(f, em, t);
            }
        };
        let n0 = self.nonlinear_term(&s.f, &s.em)?;
        let mut fm = s.f.clone();
        fm.axpy(0.5 * tau, &n0);
        let mut em_m = s.em.clone();
        flow(&mut fm, &mut em_m, 0.5 * tau);
        let mut n1 = self.nonlinear_term(&fm, &em_m)?;
        let mut em_n = EMField::zeros(self.sg.len());
        flow(&mut n1, &mut em_n, 0.5 * tau);
        flow(&mut s.f, &mut s.em, tau);
        s.f.axpy(tau, &n1);
        for i in 0..3 {
            for (z, w) in s.em.e[i].iter_mut().zip(&em_n.e[i]) {
                *z += w * tau;
            }
        }
        self.zero_nyquist(s);
        Ok(())
    }

    /// Trapezoid collision substep; returns the midpoint dissipation per
    /// mode and solver statistics.
    pub fn collide(&self, s: &mut PhaseState, dt: f64) -> Result<StepInfo> {
        let n_modes = self.sg.len();
        let mut info = StepInfo {
            dissipation: vec![0.0; n_modes],
            solver_iterations: 0,
            solver_residual: 0.0,
        };
        if !self.config.physics.collisions {
            return Ok(info);
        }
        let tol = self.config.integrator.solver_tol;
        let max_iter = self.config.integrator.solver_max_iter;
        let precond: Vec<f64> = self.tables.diag_a().iter().map(|d| 1.0 + dt * d).collect();
        let dv = self.sg.cell_volume();
        for m in self.sg.canonical_modes() {
            if Self::mode_is_zero(&s.f, m) {
                continue;
            }
            let (h0, d0) = sum_diff(&s.f.pair_at(m));
            let mut solve = |x0: &[C64], op: &dyn Fn(&[C64]) -> Vec<C64>| -> Result<Vec<C64>> {
                let ax = op(x0);
                let rhs: Vec<C64> = x0.iter().zip(&ax).map(|(x, a)| x - a * dt).collect();
                let mut x = x0.to_vec();
                let apply = |y: &[C64]| -> Vec<C64> {
                    let ay = op(y);
                    y.iter().zip(&ay).map(|(p, q)| p + q * dt).collect()
                };
                let out = pcg(apply, &rhs, &mut x, &precond, tol, max_iter)?;
                info.solver_iterations += out.iterations;
                info.solver_residual = info.solver_residual.max(out.residual);
                Ok(x)
            };
            let h1 = solve(&h0, &|y| self.tables.apply_t(y))?;
            let d1 = solve(&d0, &|y| self.tables.apply_a(y))?;
            let hm: Vec<C64> = h0.iter().zip(&h1).map(|(a, b)| (a + b) * 0.5).collect();
            let dm: Vec<C64> = d0.iter().zip(&d1).map(|(a, b)| (a + b) * 0.5).collect();
            let th = self.tables.apply_t(&hm);
            let ad = self.tables.apply_a(&dm);
            let diss = dv * (self.vg.inner_c(&hm, &th).re + self.vg.inner_c(&dm, &ad).re);
            let pair = from_sum_diff(&h1, &d1);
            s.f.set_pair_at(m, &pair);
            info.dissipation[m] = diss;
            let mm = self.sg.mirror(m);
            if mm != m {
                let conj: [Vec<C64>; 2] = std::array::from_fn(|sp| pair[sp].iter().map(|z| z.conj()).collect());
                s.f.set_pair_at(mm, &conj);
                info.dissipation[mm] = diss;
            }
        }
        Ok(info)
    }

    /// One Strang step; advances `t` by `dt`.
    pub fn step(&self, s: &mut PhaseState, dt: f64) -> Result<StepInfo> {
        if !(dt > 0.0) {
            return Err(VmlError::InvalidParameter(format!("dt must be positive, got {dt}")));
        }
        self.check_state(s)?;
        self.transport(s, 0.5 * dt);
        self.field_force(s, 0.5 * dt)?;
        let info = self.collide(s, dt)?;
        self.field_force(s, 0.5 * dt)?;
        self.transport(s, 0.5 * dt);
        s.t += dt;
        Ok(info)
    }

    /// Full right-hand side
    /// `−v·∇ₓf − q₀(E+v×B)·∇ᵥf + E·v μ^{1/2} q₁ − L f + (q₀/2) E·v f + Γ(f,f)`
    /// and the Maxwell derivatives; the quadratic terms only in nonlinear mode.
    pub fn rhs_full(&self, s: &PhaseState) -> Result<Derivative> {
        self.check_state(s)?;
        let p = &self.config.physics;
        let nv = self.vg.len();
        let mut df = DistributionPair::zeros(self.sg.len(), nv, Representation::Fourier);
        let sm = self.vg.sqrt_mu();
        let nodes = self.vg.nodes();
        let mut dem = EMField::zeros(self.sg.len());
        for m in 0..self.sg.len() {
            let k = self.sg.kappa(m);
            let e = s.em.e_at(m);
            let pair = s.f.pair_at(m);
            let lf = if p.collisions && !Self::mode_is_zero(&s.f, m) {
                self.tables.apply_l(&pair)
            } else {
                [vec![ZERO; nv], vec![ZERO; nv]]
            };
            for sp in 0..2 {
                let sign = if sp == 0 { 1.0 } else { -1.0 };
                let out = df.slice_mut(sp, m);
                for a in 0..nv {
                    let v = nodes[a];
                    let kv = k[0] * v[0] + k[1] * v[1] + k[2] * v[2];
                    let mut z = -C64::new(0.0, kv) * pair[sp][a] - lf[sp][a];
                    if p.coupling {
                        z += (e[0] * v[0] + e[1] * v[1] + e[2] * v[2]) * (sign * sm[a]);
                    }
                    out[a] = z;
                }
            }
            let cb = curl_mode(k, s.em.b_at(m));
            let ce = curl_mode(k, e);
            let j = if p.coupling { current_at(&s.f, &self.vg, m) } else { [ZERO; 3] };
            dem.set_e(m, std::array::from_fn(|i| cb[i] - j[i]));
            dem.set_b(m, ce.map(|z| -z));
        }
        if self.nonlinear() {
            let n = self.nonlinear_term(&s.f, &s.em)?;
            df.axpy(1.0, &n);
        }
        Ok(Derivative { f: df, em: dem })
    }
}
