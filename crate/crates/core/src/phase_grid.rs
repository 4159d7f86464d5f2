//! Truncated phase space: velocity tensor grid, periodic spatial grid with its
//! Fourier tables, the Maxwellian, the time-velocity weight and the Λ^s
//! multipliers.
//!
//! Velocity nodes are `v_a = -v_max + a·h`, `h = 2 v_max / n_v`, so the grid
//! contains the origin and is symmetric under `v -> -v` except for the lone
//! plane at `-v_max` (its mirror `+v_max` is not a node). Quadrature is the
//! uniform rule `h³` per node; the Maxwellian tail at the cut is far below
//! every tolerance used here.

use std::f64::consts::PI;

use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, VmlError};
use crate::fft::Fft3;

pub type C64 = Complex64;

pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// `(2π)^{-3/2} exp(-|v|²/2)`
pub fn maxwellian(v: [f64; 3]) -> f64 {
    (2.0 * PI).powf(-1.5) * (-0.5 * norm2(v)).exp()
}

#[inline]
pub fn norm2(v: [f64; 3]) -> f64 {
    v[0] * v[0] + v[1] * v[1] + v[2] * v[2]
}

/// `⟨v⟩ = sqrt(1 + |v|²)`
#[inline]
pub fn japanese(v: [f64; 3]) -> f64 {
    (1.0 + norm2(v)).sqrt()
}

#[derive(Debug, Clone)]
pub struct VelocityGrid {
    v_max: f64,
    n_v: usize,
    spacing: f64,
    axis: Vec<f64>,
    nodes: Vec<[f64; 3]>,
    mu: Vec<f64>,
    sqrt_mu: Vec<f64>,
}

impl VelocityGrid {
    pub fn new(n_v: usize, v_max: f64) -> Result<Self> {
        if n_v < 2 {
            return Err(VmlError::InvalidParameter(format!(
                "n_v must be at least 2, got {n_v}"
            )));
        }
        if !(v_max > 0.0 && v_max.is_finite()) {
            return Err(VmlError::InvalidParameter(format!(
                "v_max must be positive, got {v_max}"
            )));
        }
        let spacing = 2.0 * v_max / n_v as f64;
        let axis: Vec<f64> = (0..n_v).map(|a| -v_max + a as f64 * spacing).collect();
        let mut nodes = Vec::with_capacity(n_v * n_v * n_v);
        for &x in &axis {
            for &y in &axis {
                for &z in &axis {
                    nodes.push([x, y, z]);
                }
            }
        }
        let mu: Vec<f64> = nodes.iter().map(|&v| maxwellian(v)).collect();
        let sqrt_mu = mu.iter().map(|m| m.sqrt()).collect();
        Ok(Self {
            v_max,
            n_v,
            spacing,
            axis,
            nodes,
            mu,
            sqrt_mu,
        })
    }

    pub fn v_max(&self) -> f64 {
        self.v_max
    }

    pub fn n_v(&self) -> usize {
        self.n_v
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// Number of velocity nodes, `n_v³`.
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// 1-D node coordinates shared by all three axes.
    pub fn axis(&self) -> &[f64] {
        &self.axis
    }

    pub fn nodes(&self) -> &[[f64; 3]] {
        &self.nodes
    }

    pub fn node(&self, i: usize) -> [f64; 3] {
        self.nodes[i]
    }

    pub fn quad_weight(&self) -> f64 {
        self.spacing.powi(3)
    }

    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    pub fn sqrt_mu(&self) -> &[f64] {
        &self.sqrt_mu
    }

    #[inline]
    pub fn index(&self, a: usize, b: usize, c: usize) -> usize {
        (a * self.n_v + b) * self.n_v + c
    }

    /// Stride of velocity axis `k` in the flattened node array.
    #[inline]
    pub fn stride(&self, k: usize) -> usize {
        match k {
            0 => self.n_v * self.n_v,
            1 => self.n_v,
            _ => 1,
        }
    }

    pub fn integrate(&self, f: &[f64]) -> f64 {
        self.quad_weight() * f.iter().sum::<f64>()
    }

    pub fn inner(&self, f: &[f64], g: &[f64]) -> f64 {
        self.quad_weight() * f.iter().zip(g).map(|(a, b)| a * b).sum::<f64>()
    }

    /// Hermitian quadrature inner product `Σ conj(f) g h³`.
    pub fn inner_c(&self, f: &[C64], g: &[C64]) -> C64 {
        let s: C64 = f.iter().zip(g).map(|(a, b)| a.conj() * b).sum();
        s * self.quad_weight()
    }

    /// Evaluate a function at every node.
    pub fn sample(&self, f: impl Fn([f64; 3]) -> f64) -> Vec<f64> {
        self.nodes.iter().map(|&v| f(v)).collect()
    }
}

/// Probabilists' Hermite polynomial `He_n(x)`.
pub fn hermite_he(n: usize, x: f64) -> f64 {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return p0;
    }
    for k in 1..n {
        let p2 = x * p1 - k as f64 * p0;
        p0 = p1;
        p1 = p2;
    }
    p1
}

/// Multi-indices of total degree at most `deg`, graded order.
pub fn multi_indices(deg: usize) -> Vec<[usize; 3]> {
    let mut out = Vec::new();
    for total in 0..=deg {
        for a in (0..=total).rev() {
            for b in (0..=total - a).rev() {
                out.push([a, b, total - a - b]);
            }
        }
    }
    out
}

/// `He_α(v) / sqrt(α!) · μ^{1/2}(v)`, orthonormal in `L²(ℝ³)`.
pub fn hermite_function(alpha: [usize; 3], v: [f64; 3]) -> f64 {
    let fact = |n: usize| (1..=n).map(|k| k as f64).product::<f64>();
    let mut p = maxwellian(v).sqrt();
    for i in 0..3 {
        p *= hermite_he(alpha[i], v[i]) / fact(alpha[i]).sqrt();
    }
    p
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightParams {
    pub gamma: f64,
    pub ell: f64,
    pub q: f64,
    pub theta: f64,
}

impl WeightParams {
    pub fn new(gamma: f64, ell: f64, q: f64, theta: f64) -> Result<Self> {
        let p = Self {
            gamma,
            ell,
            q,
            theta,
        };
        p.validate()?;
        Ok(p)
    }

    /// Trivial weight `w ≡ 1`; only usable through [`weight_w`], it fails
    /// [`validate`](Self::validate) because `q = 0`.
    pub fn unit(gamma: f64) -> Self {
        Self {
            gamma,
            ell: 0.0,
            q: 0.0,
            theta: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(-3.0..-2.0).contains(&self.gamma) {
            return Err(VmlError::InvalidParameter(format!(
                "gamma must lie in [-3, -2), got {}",
                self.gamma
            )));
        }
        if !(self.q > 0.0 && self.q <= 0.1) {
            return Err(VmlError::InvalidParameter(format!(
                "q must lie in (0, 0.1], got {}",
                self.q
            )));
        }
        if !self.ell.is_finite() || !self.theta.is_finite() || self.theta < 0.0 {
            return Err(VmlError::InvalidParameter(
                "ell and theta must be finite, theta nonnegative".into(),
            ));
        }
        Ok(())
    }

    /// Time-exponent bracket: ϑ ≤ s/2 for s ∈ [½,1], ϑ ≤ s/2 − ½ for s ∈ (1, 3/2).
    pub fn check_theta(&self, s: f64) -> Result<()> {
        let cap = if (0.5..=1.0).contains(&s) {
            s / 2.0
        } else if s > 1.0 && s < 1.5 {
            s / 2.0 - 0.5
        } else {
            return Err(VmlError::InvalidParameter(format!(
                "s must lie in [1/2, 3/2), got {s}"
            )));
        };
        if self.theta > cap + 1e-15 {
            return Err(VmlError::InvalidParameter(format!(
                "theta = {} exceeds the admissible bound {cap} for s = {s}",
                self.theta
            )));
        }
        Ok(())
    }

    pub fn with_ell(self, ell: f64) -> Self {
        Self { ell, ..self }
    }
}

/// `⟨v⟩^{-(γ+2)ℓ} exp(q⟨v⟩² / (1+t)^ϑ)`
pub fn weight_w(p: &WeightParams, t: f64, v: [f64; 3]) -> f64 {
    let jv2 = 1.0 + norm2(v);
    jv2.powf(-0.5 * (p.gamma + 2.0) * p.ell) * (p.q * jv2 / (1.0 + t).powf(p.theta)).exp()
}

#[derive(Debug, Clone)]
pub struct SpatialGrid {
    box_length: f64,
    n_x: usize,
    active: [bool; 3],
    dims: [usize; 3],
    xi: Vec<[i64; 3]>,
    kappa: Vec<[f64; 3]>,
    mirror: Vec<usize>,
    fft: Fft3,
}

impl SpatialGrid {
    pub fn new(n_x: usize, box_length: f64, active: [bool; 3]) -> Result<Self> {
        if n_x == 0 {
            return Err(VmlError::InvalidParameter("n_x must be positive".into()));
        }
        if !(box_length > 0.0 && box_length.is_finite()) {
            return Err(VmlError::InvalidParameter(format!(
                "box length must be positive, got {box_length}"
            )));
        }
        let dims = active.map(|a| if a { n_x } else { 1 });
        let total: usize = dims.iter().product();
        let mut xi = Vec::with_capacity(total);
        let mut mirror = Vec::with_capacity(total);
        let signed = |m: usize, n: usize| -> i64 {
            if 2 * m < n {
                m as i64
            } else {
                m as i64 - n as i64
            }
        };
        for i in 0..dims[0] {
            for j in 0..dims[1] {
                for k in 0..dims[2] {
                    xi.push([signed(i, dims[0]), signed(j, dims[1]), signed(k, dims[2])]);
                    let (mi, mj, mk) = (
                        (dims[0] - i) % dims[0],
                        (dims[1] - j) % dims[1],
                        (dims[2] - k) % dims[2],
                    );
                    mirror.push((mi * dims[1] + mj) * dims[2] + mk);
                }
            }
        }
        let scale = 2.0 * PI / box_length;
        let kappa = xi
            .iter()
            .map(|x| x.map(|c| c as f64 * scale))
            .collect();
        Ok(Self {
            box_length,
            n_x,
            active,
            dims,
            xi,
            kappa,
            mirror,
            fft: Fft3::new(dims),
        })
    }

    /// One active axis (x₁), the default reduced geometry.
    pub fn one_d(n_x: usize, box_length: f64) -> Result<Self> {
        Self::new(n_x, box_length, [true, false, false])
    }

    pub fn box_length(&self) -> f64 {
        self.box_length
    }

    pub fn n_x(&self) -> usize {
        self.n_x
    }

    pub fn active_axes(&self) -> [bool; 3] {
        self.active
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    /// Number of spatial nodes (and of Fourier modes).
    pub fn len(&self) -> usize {
        self.xi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xi.is_empty()
    }

    /// Volume element `Π L/n_x` over the active axes.
    pub fn cell_volume(&self) -> f64 {
        self.dims
            .iter()
            .filter(|&&d| d > 1)
            .map(|&d| self.box_length / d as f64)
            .product()
    }

    pub fn xi(&self, m: usize) -> [i64; 3] {
        self.xi[m]
    }

    /// Wavevector `2π ξ / L` of mode `m`.
    pub fn kappa(&self, m: usize) -> [f64; 3] {
        self.kappa[m]
    }

    pub fn kappa_abs(&self, m: usize) -> f64 {
        norm2(self.kappa[m]).sqrt()
    }

    /// Index of the mode carrying `-ξ`.
    pub fn mirror(&self, m: usize) -> usize {
        self.mirror[m]
    }

    /// True when any component of `ξ` sits at the Nyquist index.
    pub fn is_nyquist(&self, m: usize) -> bool {
        (0..3).any(|a| self.dims[a] > 1 && self.dims[a].is_multiple_of(2) && 2 * self.xi[m][a].unsigned_abs() as usize == self.dims[a])
    }

    /// Modes `m ≤ mirror(m)`: one representative per conjugate pair.
    pub fn canonical_modes(&self) -> Vec<usize> {
        (0..self.len()).filter(|&m| m <= self.mirror[m]).collect()
    }

    /// Node coordinates `x_a = a L / n` (inactive axes at 0).
    pub fn position(&self, idx: usize) -> [f64; 3] {
        let [_, d1, d2] = self.dims;
        let ijk = [idx / (d1 * d2), (idx / d2) % d1, idx % d2];
        let mut x = [0.0; 3];
        for a in 0..3 {
            if self.dims[a] > 1 {
                x[a] = ijk[a] as f64 * self.box_length / self.dims[a] as f64;
            }
        }
        x
    }

    /// `Σ_{|α|=a} κ^{2α}`, the squared-derivative multiplier of order `a`.
    pub fn derivative_multiplier(&self, m: usize, order: usize) -> f64 {
        let k2 = self.kappa[m].map(|c| c * c);
        let mut total = 0.0;
        for i in 0..=order {
            for j in 0..=order - i {
                let l = order - i - j;
                total += k2[0].powi(i as i32) * k2[1].powi(j as i32) * k2[2].powi(l as i32);
            }
        }
        total
    }

    /// `Σ_{|α| ≤ n} κ^{2α}`
    pub fn sobolev_multiplier(&self, m: usize, n: usize) -> f64 {
        (0..=n).map(|a| self.derivative_multiplier(m, a)).sum()
    }

    /// `|κ|^s` with the torus ξ = 0 policy: zero unless `s == 0`.
    pub fn lambda_multiplier(&self, m: usize, s: f64) -> f64 {
        if s == 0.0 {
            return 1.0;
        }
        let k = self.kappa_abs(m);
        if k == 0.0 {
            0.0
        } else {
            k.powf(s)
        }
    }

    fn check_len(&self, n: usize) -> Result<()> {
        if n != self.len() {
            return Err(VmlError::ShapeMismatch {
                expected: self.len(),
                got: n,
            });
        }
        Ok(())
    }

    /// Unitary forward transform in place.
    pub fn forward_in_place(&self, data: &mut [C64]) -> Result<()> {
        self.check_len(data.len())?;
        self.fft.forward(data);
        let s = 1.0 / (self.len() as f64).sqrt();
        data.iter_mut().for_each(|z| *z *= s);
        Ok(())
    }

    /// Unitary inverse transform in place.
    pub fn inverse_in_place(&self, data: &mut [C64]) -> Result<()> {
        self.check_len(data.len())?;
        self.fft.inverse(data);
        let s = 1.0 / (self.len() as f64).sqrt();
        data.iter_mut().for_each(|z| *z *= s);
        Ok(())
    }

    /// Transform every column of a `[x][stride]` array along x.
    pub(crate) fn transform_columns(&self, data: &mut [C64], stride: usize, inverse: bool) {
        let n = self.len();
        debug_assert_eq!(data.len(), n * stride);
        let mut col = vec![ZERO; n];
        let s = 1.0 / (n as f64).sqrt();
        for c in 0..stride {
            for (x, z) in col.iter_mut().enumerate() {
                *z = data[x * stride + c];
            }
            if inverse {
                self.fft.inverse(&mut col);
            } else {
                self.fft.forward(&mut col);
            }
            for (x, z) in col.iter().enumerate() {
                data[x * stride + c] = z * s;
            }
        }
    }

    /// `‖f‖²` of a spectral field: `ΔV Σ |f̂|²`.
    pub fn norm2_spectral(&self, hat: &[C64]) -> f64 {
        self.cell_volume() * hat.iter().map(|z| z.norm_sqr()).sum::<f64>()
    }
}

pub fn fourier_forward(grid: &SpatialGrid, f: &[f64]) -> Result<Vec<C64>> {
    let mut out: Vec<C64> = f.iter().map(|&x| C64::new(x, 0.0)).collect();
    grid.forward_in_place(&mut out)?;
    Ok(out)
}

/// Inverse transform; returns the real part (imaginary residue of a
/// Hermitian spectrum is round-off).
pub fn fourier_inverse(grid: &SpatialGrid, hat: &[C64]) -> Result<Vec<f64>> {
    let mut buf = hat.to_vec();
    grid.inverse_in_place(&mut buf)?;
    Ok(buf.into_iter().map(|z| z.re).collect())
}

/// Multiply spectral coefficients by `|κ|^s` (ξ = 0 zeroed for s ≠ 0).
pub fn lambda_s_spectral(grid: &SpatialGrid, hat: &mut [C64], s: f64) -> Result<()> {
    grid.check_len(hat.len())?;
    for (m, z) in hat.iter_mut().enumerate() {
        *z *= grid.lambda_multiplier(m, s);
    }
    Ok(())
}

/// `Λ^s f` for a real field given on the spatial nodes.
pub fn lambda_s_apply(grid: &SpatialGrid, f: &[f64], s: f64) -> Result<Vec<f64>> {
    let mut hat = fourier_forward(grid, f)?;
    lambda_s_spectral(grid, &mut hat, s)?;
    fourier_inverse(grid, &hat)
}

/// `(‖Λ^{-s} f‖, ‖f‖_{H^n})` from spectral coefficients.
pub fn sobolev_norms_spectral(grid: &SpatialGrid, hat: &[C64], s: f64, n: usize) -> Result<(f64, f64)> {
    grid.check_len(hat.len())?;
    let mut neg = 0.0;
    let mut pos = 0.0;
    for (m, z) in hat.iter().enumerate() {
        let a = z.norm_sqr();
        let l = grid.lambda_multiplier(m, -s);
        neg += l * l * a;
        pos += grid.sobolev_multiplier(m, n) * a;
    }
    let dv = grid.cell_volume();
    Ok(((dv * neg).sqrt(), (dv * pos).sqrt()))
}

pub fn sobolev_norms(grid: &SpatialGrid, f: &[f64], s: f64, n: usize) -> Result<(f64, f64)> {
    let hat = fourier_forward(grid, f)?;
    sobolev_norms_spectral(grid, &hat, s, n)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Representation {
    Physical,
    Fourier,
}

/// Species pair `f = [f₊, f₋]` laid out as `[species][x][v]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DistributionPair {
    n_x: usize,
    n_v: usize,
    repr: Representation,
    values: Vec<C64>,
}

impl DistributionPair {
    pub fn zeros(n_x: usize, n_v: usize, repr: Representation) -> Self {
        Self {
            n_x,
            n_v,
            repr,
            values: vec![ZERO; 2 * n_x * n_v],
        }
    }

    pub fn for_grids(sg: &SpatialGrid, vg: &VelocityGrid, repr: Representation) -> Self {
        Self::zeros(sg.len(), vg.len(), repr)
    }

    pub fn from_values(n_x: usize, n_v: usize, repr: Representation, values: Vec<C64>) -> Result<Self> {
        if values.len() != 2 * n_x * n_v {
            return Err(VmlError::ShapeMismatch {
                expected: 2 * n_x * n_v,
                got: values.len(),
            });
        }
        Ok(Self {
            n_x,
            n_v,
            repr,
            values,
        })
    }

    pub fn n_x(&self) -> usize {
        self.n_x
    }

    pub fn n_v(&self) -> usize {
        self.n_v
    }

    pub fn representation(&self) -> Representation {
        self.repr
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [C64] {
        &mut self.values
    }

    #[inline]
    fn offset(&self, species: usize, x: usize) -> usize {
        (species * self.n_x + x) * self.n_v
    }

    /// Velocity vector of one species at spatial node or mode `x`.
    pub fn slice(&self, species: usize, x: usize) -> &[C64] {
        let o = self.offset(species, x);
        &self.values[o..o + self.n_v]
    }

    pub fn slice_mut(&mut self, species: usize, x: usize) -> &mut [C64] {
        let o = self.offset(species, x);
        &mut self.values[o..o + self.n_v]
    }

    pub fn species(&self, species: usize) -> &[C64] {
        let o = self.offset(species, 0);
        &self.values[o..o + self.n_x * self.n_v]
    }

    pub fn species_mut(&mut self, species: usize) -> &mut [C64] {
        let o = self.offset(species, 0);
        let len = self.n_x * self.n_v;
        &mut self.values[o..o + len]
    }

    /// Both species at `x` as owned vectors.
    pub fn pair_at(&self, x: usize) -> [Vec<C64>; 2] {
        [self.slice(0, x).to_vec(), self.slice(1, x).to_vec()]
    }

    pub fn set_pair_at(&mut self, x: usize, pair: &[Vec<C64>; 2]) {
        self.slice_mut(0, x).copy_from_slice(&pair[0]);
        self.slice_mut(1, x).copy_from_slice(&pair[1]);
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn scale(&mut self, a: f64) {
        self.values.iter_mut().for_each(|z| *z *= a);
    }

    /// `self += a · other`
    pub fn axpy(&mut self, a: f64, other: &Self) {
        debug_assert_eq!(self.values.len(), other.values.len());
        for (z, w) in self.values.iter_mut().zip(&other.values) {
            *z += w * a;
        }
    }

    /// Largest imaginary magnitude; meaningful in the physical representation.
    pub fn max_imag(&self) -> f64 {
        self.values.iter().fold(0.0, |m, z| m.max(z.im.abs()))
    }

    pub fn to_fourier(&mut self, grid: &SpatialGrid) -> Result<()> {
        self.check_grid(grid)?;
        if self.repr == Representation::Fourier {
            return Ok(());
        }
        for s in 0..2 {
            let n_v = self.n_v;
            grid.transform_columns(self.species_mut(s), n_v, false);
        }
        self.repr = Representation::Fourier;
        Ok(())
    }

    /// Back to physical space; imaginary parts are dropped.
    pub fn to_physical(&mut self, grid: &SpatialGrid) -> Result<()> {
        self.check_grid(grid)?;
        if self.repr == Representation::Physical {
            return Ok(());
        }
        for s in 0..2 {
            let n_v = self.n_v;
            grid.transform_columns(self.species_mut(s), n_v, true);
        }
        self.values.iter_mut().for_each(|z| z.im = 0.0);
        self.repr = Representation::Physical;
        Ok(())
    }

    fn check_grid(&self, grid: &SpatialGrid) -> Result<()> {
        if grid.len() != self.n_x {
            return Err(VmlError::ShapeMismatch {
                expected: grid.len(),
                got: self.n_x,
            });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn maxwellian_at_origin() {
        assert!((maxwellian([0.0; 3]) - 0.063_493_635_934_240_97).abs() < 1e-15);
    }

    #[test]
    fn hermite_functions_are_orthonormal() {
        let g = VelocityGrid::new(32, 8.0).unwrap();
        let idx = multi_indices(3);
        assert_eq!(idx.len(), 20);
        for a in &idx {
            let fa = g.sample(|v| hermite_function(*a, v));
            for b in &idx {
                let fb = g.sample(|v| hermite_function(*b, v));
                let expect = if a == b { 1.0 } else { 0.0 };
                assert!((g.inner(&fa, &fb) - expect).abs() < 1e-8, "{a:?} {b:?} {}", g.inner(&fa, &fb));
            }
        }
    }

    #[test]
    fn grid_contains_origin() {
        let g = VelocityGrid::new(24, 6.0).unwrap();
        assert_eq!(g.node(g.index(12, 12, 12)), [0.0; 3]);
        assert_eq!(g.axis()[0], -6.0);
        assert!((g.integrate(g.mu()) - 1.0).abs() < 1e-6);
    }

    #[test]
    fn weight_is_one_for_degenerate_params() {
        let p = WeightParams::unit(-3.0);
        assert_eq!(weight_w(&p, 3.0, [1.0, 2.0, -0.5]), 1.0);
        let p = WeightParams::new(-3.0, 2.0, 0.01, 0.25).unwrap();
        let w0 = weight_w(&p, 0.0, [0.0; 3]);
        assert!((w0 - 0.01f64.exp()).abs() < 1e-15);
    }

    #[test]
    fn theta_bracket() {
        let p = WeightParams::new(-3.0, 0.0, 0.01, 0.25).unwrap();
        assert!(p.check_theta(0.5).is_ok());
        assert!(p.check_theta(1.2).is_err());
        assert!(WeightParams::new(-2.0, 0.0, 0.01, 0.1).is_err());
    }

    #[test]
    fn mirror_and_nyquist() {
        let g = SpatialGrid::one_d(8, 2.0 * PI).unwrap();
        assert_eq!(g.mirror(1), 7);
        assert_eq!(g.mirror(0), 0);
        assert!(g.is_nyquist(4));
        assert_eq!(g.xi(5), [-3, 0, 0]);
        assert_eq!(g.canonical_modes(), vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn multiplier_of_first_order_is_kappa_squared() {
        let g = SpatialGrid::new(6, 2.0 * PI, [true, true, false]).unwrap();
        for m in 0..g.len() {
            let k2 = norm2(g.kappa(m));
            assert!((g.derivative_multiplier(m, 1) - k2).abs() < 1e-12);
        }
    }

    #[test]
    fn pair_transform_round_trip() {
        let sg = SpatialGrid::one_d(8, 10.0).unwrap();
        let n_v = 5;
        let vals: Vec<C64> = (0..2 * 8 * n_v)
            .map(|i| C64::new((i as f64 * 0.71).sin(), 0.0))
            .collect();
        let mut f = DistributionPair::from_values(8, n_v, Representation::Physical, vals.clone()).unwrap();
        f.to_fourier(&sg).unwrap();
        f.to_physical(&sg).unwrap();
        for (a, b) in f.values().iter().zip(&vals) {
            assert!((a - b).norm() < 1e-14);
        }
    }
}
