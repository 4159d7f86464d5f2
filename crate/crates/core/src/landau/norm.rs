use crate::phase_grid::{weight_w, WeightParams, C64};

use super::{CollisionTables, VPair};

/// Weighted anisotropic norm `|f|_{σ,w}`. The squared sum of the three
/// pieces is used as the representative of the equivalence class.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SigmaNormSpec {
    /// `None` means `w ≡ 1`.
    pub weight: Option<WeightParams>,
    pub t: f64,
}

impl SigmaNormSpec {
    pub fn unweighted() -> Self {
        Self::default()
    }

    pub fn weighted(p: WeightParams, t: f64) -> Self {
        Self { weight: Some(p), t }
    }
}

/// `Σ h³ w² [⟨v⟩^{γ+2}|f|² + ⟨v⟩^{γ}|∇f·v̂|² + ⟨v⟩^{γ+2}|∇f×v̂|²]`.
/// At the origin the whole gradient carries the transverse weight.
pub fn sigma_norm_sq(f: &[C64], spec: &SigmaNormSpec, tables: &CollisionTables) -> f64 {
    let grid = tables.grid();
    let grad = tables.grad_perturbation(f);
    let par = tables.weight_parallel();
    let perp = tables.weight_transverse();
    let mut total = 0.0;
    for (a, &v) in grid.nodes().iter().enumerate() {
        let w2 = match &spec.weight {
            Some(p) => weight_w(p, spec.t, v).powi(2),
            None => 1.0,
        };
        let g = [grad[0][a], grad[1][a], grad[2][a]];
        let r = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        let wp2 = perp[a] * perp[a];
        let mut term = wp2 * f[a].norm_sqr();
        if r == 0.0 {
            term += wp2 * g.iter().map(|z| z.norm_sqr()).sum::<f64>();
        } else {
            let u = v.map(|c| c / r);
            let along: C64 = g[0] * u[0] + g[1] * u[1] + g[2] * u[2];
            let across: f64 = (0..3).map(|i| (g[i] - along * u[i]).norm_sqr()).sum();
            term += par[a] * par[a] * along.norm_sqr() + wp2 * across;
        }
        total += w2 * term;
    }
    total * grid.quad_weight()
}

pub fn sigma_norm(f: &[C64], spec: &SigmaNormSpec, tables: &CollisionTables) -> f64 {
    sigma_norm_sq(f, spec, tables).sqrt()
}

/// Norm of a species pair: the two squared norms are added.
pub fn sigma_norm_pair(f: &VPair, spec: &SigmaNormSpec, tables: &CollisionTables) -> f64 {
    (sigma_norm_sq(&f[0], spec, tables) + sigma_norm_sq(&f[1], spec, tables)).sqrt()
}

/// Only the transverse gradient piece, for the radial-function check.
pub fn transverse_part_sq(f: &[C64], tables: &CollisionTables) -> f64 {
    let grid = tables.grid();
    let grad = tables.grad_perturbation(f);
    let perp = tables.weight_transverse();
    let mut total = 0.0;
    for (a, &v) in grid.nodes().iter().enumerate() {
        let r = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if r == 0.0 {
            continue;
        }
        let u = v.map(|c| c / r);
        let g = [grad[0][a], grad[1][a], grad[2][a]];
        let along: C64 = g[0] * u[0] + g[1] * u[1] + g[2] * u[2];
        let across: f64 = (0..3).map(|i| (g[i] - along * u[i]).norm_sqr()).sum();
        total += perp[a] * perp[a] * across;
    }
    total * grid.quad_weight()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::landau::{build_collision_tables, to_complex};
    use crate::phase_grid::VelocityGrid;

    #[test]
    fn radial_function_has_no_transverse_gradient() {
        let g = VelocityGrid::new(12, 6.0).unwrap();
        let t = build_collision_tables(&g, -3.0).unwrap();
        let f: Vec<f64> = g
            .nodes()
            .iter()
            .zip(g.sqrt_mu())
            .map(|(v, s)| (1.0 + v[0] * v[0] + v[1] * v[1] + v[2] * v[2]) * s)
            .collect();
        let f = to_complex(&f);
        let full = sigma_norm_sq(&f, &SigmaNormSpec::unweighted(), &t);
        assert!(transverse_part_sq(&f, &t) < 1e-8 * full);
        assert_eq!(sigma_norm(&vec![C64::new(0.0, 0.0); t.len()], &SigmaNormSpec::unweighted(), &t), 0.0);
    }
}
