//! Electromagnetic field of the perturbation, advanced spectrally:
//! `∂_t E = ∇×B − ∫ v μ^{1/2}(f₊ − f₋)`, `∂_t B = −∇×E`, subject to
//! `∇·E = a₊ − a₋` and `∇·B = 0`.

use crate::error::{Result, VmlError};
use crate::phase_grid::{DistributionPair, Representation, SpatialGrid, VelocityGrid, C64, ZERO};

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// `E`, `B` as Fourier coefficients on the spatial grid.
#[derive(Debug, Clone, PartialEq)]
pub struct EMField {
    pub e: [Vec<C64>; 3],
    pub b: [Vec<C64>; 3],
}

impl EMField {
    pub fn zeros(n: usize) -> Self {
        Self {
            e: std::array::from_fn(|_| vec![ZERO; n]),
            b: std::array::from_fn(|_| vec![ZERO; n]),
        }
    }

    pub fn len(&self) -> usize {
        self.e[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.e[0].is_empty()
    }

    pub fn e_at(&self, m: usize) -> [C64; 3] {
        [self.e[0][m], self.e[1][m], self.e[2][m]]
    }

    pub fn b_at(&self, m: usize) -> [C64; 3] {
        [self.b[0][m], self.b[1][m], self.b[2][m]]
    }

    pub fn set_e(&mut self, m: usize, v: [C64; 3]) {
        for i in 0..3 {
            self.e[i][m] = v[i];
        }
    }

    pub fn set_b(&mut self, m: usize, v: [C64; 3]) {
        for i in 0..3 {
            self.b[i][m] = v[i];
        }
    }

    pub fn scale(&mut self, a: f64) {
        for c in self.e.iter_mut().chain(self.b.iter_mut()) {
            c.iter_mut().for_each(|z| *z *= a);
        }
    }

    pub fn is_finite(&self) -> bool {
        self.e
            .iter()
            .chain(self.b.iter())
            .all(|c| c.iter().all(|z| z.re.is_finite() && z.im.is_finite()))
    }

    /// `‖E‖² + ‖B‖²`
    pub fn energy(&self, grid: &SpatialGrid) -> f64 {
        self.e
            .iter()
            .chain(self.b.iter())
            .map(|c| grid.norm2_spectral(c))
            .sum()
    }
}

/// `i κ × x`
pub fn curl_mode(kappa: [f64; 3], x: [C64; 3]) -> [C64; 3] {
    [
        I * (x[2] * kappa[1] - x[1] * kappa[2]),
        I * (x[0] * kappa[2] - x[2] * kappa[0]),
        I * (x[1] * kappa[0] - x[0] * kappa[1]),
    ]
}

/// `i κ · x`
pub fn div_mode(kappa: [f64; 3], x: [C64; 3]) -> C64 {
    I * (x[0] * kappa[0] + x[1] * kappa[1] + x[2] * kappa[2])
}

/// `(k̂ (k̂·x), x − k̂ (k̂·x))`; at `κ = 0` everything counts as longitudinal.
pub fn split_mode(kappa: [f64; 3], x: [C64; 3]) -> ([C64; 3], [C64; 3]) {
    let k2 = kappa[0] * kappa[0] + kappa[1] * kappa[1] + kappa[2] * kappa[2];
    if k2 == 0.0 {
        return (x, [ZERO; 3]);
    }
    let proj = (x[0] * kappa[0] + x[1] * kappa[1] + x[2] * kappa[2]) / k2;
    let long = kappa.map(|k| proj * k);
    (long, [x[0] - long[0], x[1] - long[1], x[2] - long[2]])
}

fn check(f: &DistributionPair, sg: &SpatialGrid, vg: &VelocityGrid) -> Result<()> {
    if f.n_x() != sg.len() || f.n_v() != vg.len() {
        return Err(VmlError::ShapeMismatch {
            expected: sg.len() * vg.len(),
            got: f.n_x() * f.n_v(),
        });
    }
    if f.representation() != Representation::Fourier {
        return Err(VmlError::InvalidParameter(
            "field coupling requires f in the Fourier representation".into(),
        ));
    }
    Ok(())
}

/// Charge density `a₊ − a₋ = ∫ μ^{1/2}(f₊ − f₋) dv` per mode.
pub fn charge_density(f: &DistributionPair, vg: &VelocityGrid) -> Vec<C64> {
    let sm = vg.sqrt_mu();
    let h3 = vg.quad_weight();
    (0..f.n_x())
        .map(|m| {
            let s: C64 = f
                .slice(0, m)
                .iter()
                .zip(f.slice(1, m))
                .zip(sm)
                .map(|((p, q), w)| (p - q) * *w)
                .sum();
            s * h3
        })
        .collect()
}

/// Current `∫ v μ^{1/2}(f₊ − f₋) dv` at one mode.
pub fn current_at(f: &DistributionPair, vg: &VelocityGrid, m: usize) -> [C64; 3] {
    let mut j = [ZERO; 3];
    for (((p, q), w), v) in f.slice(0, m).iter().zip(f.slice(1, m)).zip(vg.sqrt_mu()).zip(vg.nodes()) {
        let d = (p - q) * *w;
        for i in 0..3 {
            j[i] += d * v[i];
        }
    }
    j.map(|z| z * vg.quad_weight())
}

/// `(∂_t E, ∂_t B)` with spectral curls.
pub fn field_rhs(
    em: &EMField,
    f: &DistributionPair,
    sg: &SpatialGrid,
    vg: &VelocityGrid,
) -> Result<EMField> {
    check(f, sg, vg)?;
    let mut out = EMField::zeros(sg.len());
    for m in 0..sg.len() {
        let k = sg.kappa(m);
        let cb = curl_mode(k, em.b_at(m));
        let ce = curl_mode(k, em.e_at(m));
        let j = current_at(f, vg, m);
        out.set_e(m, std::array::from_fn(|i| cb[i] - j[i]));
        out.set_b(m, ce.map(|z| -z));
    }
    Ok(out)
}

/// `‖∇·E − (a₊ − a₋)‖`
pub fn gauss_residual(em: &EMField, f: &DistributionPair, sg: &SpatialGrid, vg: &VelocityGrid) -> Result<f64> {
    check(f, sg, vg)?;
    let rho = charge_density(f, vg);
    let r: Vec<C64> = (0..sg.len())
        .map(|m| div_mode(sg.kappa(m), em.e_at(m)) - rho[m])
        .collect();
    Ok(sg.norm2_spectral(&r).sqrt())
}

/// `‖∇·B‖`
pub fn div_b(em: &EMField, sg: &SpatialGrid) -> f64 {
    let r: Vec<C64> = (0..sg.len()).map(|m| div_mode(sg.kappa(m), em.b_at(m))).collect();
    sg.norm2_spectral(&r).sqrt()
}

/// Replace the longitudinal part of `E` so that `∇·E = a₊ − a₋` holds mode by
/// mode, and remove the longitudinal part of `B`.
pub fn make_compatible(
    guess: &EMField,
    f: &DistributionPair,
    sg: &SpatialGrid,
    vg: &VelocityGrid,
) -> Result<EMField> {
    check(f, sg, vg)?;
    let rho = charge_density(f, vg);
    let scale = sg.norm2_spectral(&rho).sqrt().max(1.0);
    let zero_modes: Vec<usize> = (0..sg.len()).filter(|&m| sg.kappa_abs(m) == 0.0).collect();
    for &m in &zero_modes {
        if rho[m].norm() > 1e-13 * scale {
            return Err(VmlError::NonNeutral { charge: rho[m].norm() });
        }
    }
    let mut out = guess.clone();
    for m in 0..sg.len() {
        let k = sg.kappa(m);
        let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
        if k2 == 0.0 {
            continue;
        }
        let (_, et) = split_mode(k, guess.e_at(m));
        // i κ·E_L = ρ  =>  E_L = −i κ ρ / |κ|²
        let el = k.map(|c| -I * rho[m] * (c / k2));
        out.set_e(m, std::array::from_fn(|i| et[i] + el[i]));
        let (_, bt) = split_mode(k, guess.b_at(m));
        out.set_b(m, bt);
    }
    Ok(out)
}

/// Exact source-free Maxwell flow over time `t` (transverse rotation with
/// frequency `|κ|`; the longitudinal part is stationary).
pub fn vacuum_rotate(em: &mut EMField, sg: &SpatialGrid, t: f64) {
    for m in 0..sg.len() {
        let k = sg.kappa(m);
        let w = sg.kappa_abs(m);
        if w == 0.0 {
            continue;
        }
        let (el, et) = split_mode(k, em.e_at(m));
        let (bl, bt) = split_mode(k, em.b_at(m));
        let kh = k.map(|c| c / w);
        let ce = curl_mode(kh, et);
        let cb = curl_mode(kh, bt);
        let (c, s) = ((w * t).cos(), (w * t).sin());
        em.set_e(m, std::array::from_fn(|i| el[i] + et[i] * c + cb[i] * s));
        em.set_b(m, std::array::from_fn(|i| bl[i] + bt[i] * c - ce[i] * s));
    }
}
