//! Per-mode velocity profiles behind the mixed-derivative norms
//! `‖w ∂^α_β f‖`: x-derivatives act as Fourier multipliers, so only the
//! velocity part `Σ_v h³ w² |∂_β f̂(ξ, v)|²` has to be stored per mode.

use std::collections::HashMap;

use crate::error::Result;
use crate::evolve::Model;
use crate::landau::stencil::Stencil1d;
use crate::landau::{sigma_norm_sq, SigmaNormSpec, VPair};
use crate::phase_grid::{japanese, multi_indices, weight_w, DistributionPair, WeightParams, C64, ZERO};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MixedKind {
    /// `Σ h³ w² |∂_β f|²`
    Plain,
    /// σ-norm `|w ∂_β {I−P}f|²_σ` and `Σ h³ ⟨v⟩² w² |∂_β {I−P}f|²`
    Micro,
}

/// Velocity profile per β (multi-indices up to `bmax`, graded order) and
/// per mode. For [`MixedKind::Micro`] the second vector holds the
/// `⟨v⟩`-weighted values, otherwise it is empty.
pub type Profiles = Vec<([usize; 3], Vec<f64>, Vec<f64>)>;

/// All `∂_β g` for `|β| ≤ bmax` with central differences and zero extension.
pub fn velocity_derivatives(st: &Stencil1d, g: &[C64], bmax: usize) -> HashMap<[usize; 3], Vec<C64>> {
    let mut out: HashMap<[usize; 3], Vec<C64>> = HashMap::new();
    for beta in multi_indices(bmax) {
        if beta == [0, 0, 0] {
            out.insert(beta, g.to_vec());
            continue;
        }
        let axis = (0..3).find(|&i| beta[i] > 0).unwrap();
        let mut prev = beta;
        prev[axis] -= 1;
        let src = &out[&prev];
        let mut d = vec![ZERO; g.len()];
        st.apply_axis(axis, src, &mut d);
        out.insert(beta, d);
    }
    out
}

fn mode_is_zero(f: &DistributionPair, m: usize) -> bool {
    f.slice(0, m).iter().chain(f.slice(1, m)).all(|z| *z == ZERO)
}

/// Squared weights `w²_{ℓ−k}(t, v)` for `k = 0..=bmax`.
fn weights(model: &Model, base: &WeightParams, ell: f64, t: f64, bmax: usize) -> Vec<Vec<f64>> {
    (0..=bmax)
        .map(|k| {
            let p = base.with_ell(ell - k as f64);
            model
                .velocity()
                .nodes()
                .iter()
                .map(|&v| weight_w(&p, t, v).powi(2))
                .collect()
        })
        .collect()
}

pub fn weighted_profiles(
    model: &Model,
    f: &DistributionPair,
    base: &WeightParams,
    ell: f64,
    t: f64,
    bmax: usize,
    kind: MixedKind,
) -> Result<Profiles> {
    let vg = model.velocity();
    let sg = model.spatial();
    let st = Stencil1d::central_zero_ext(vg.n_v(), vg.spacing());
    let betas = multi_indices(bmax);
    let n_modes = sg.len();
    let mut out: Profiles = betas
        .iter()
        .map(|b| {
            let extra = if kind == MixedKind::Micro { vec![0.0; n_modes] } else { Vec::new() };
            (*b, vec![0.0; n_modes], extra)
        })
        .collect();
    let w2 = weights(model, base, ell, t, bmax);
    let jv2: Vec<f64> = vg.nodes().iter().map(|&v| japanese(v).powi(2)).collect();
    let h3 = vg.quad_weight();
    for m in sg.canonical_modes() {
        if mode_is_zero(f, m) {
            continue;
        }
        let pair: VPair = match kind {
            MixedKind::Plain => f.pair_at(m),
            MixedKind::Micro => model.projection().micro(&f.pair_at(m)),
        };
        let derivs: [HashMap<[usize; 3], Vec<C64>>; 2] =
            std::array::from_fn(|s| velocity_derivatives(&st, &pair[s], bmax));
        for (beta, main, extra) in out.iter_mut() {
            let nb: usize = beta.iter().sum();
            let w = &w2[nb];
            let (mut a, mut b) = (0.0, 0.0);
            for d in derivs.iter().map(|d| &d[beta]) {
                match kind {
                    MixedKind::Plain => {
                        a += h3 * d.iter().zip(w).map(|(z, w)| w * z.norm_sqr()).sum::<f64>();
                    }
                    MixedKind::Micro => {
                        let spec = SigmaNormSpec::weighted(base.with_ell(ell - nb as f64), t);
                        a += sigma_norm_sq(d, &spec, model.tables());
                        b += h3 * d
                            .iter()
                            .zip(w)
                            .zip(&jv2)
                            .map(|((z, w), j)| w * j * z.norm_sqr())
                            .sum::<f64>();
                    }
                }
            }
            main[m] = a;
            let mm = sg.mirror(m);
            main[mm] = a;
            if kind == MixedKind::Micro {
                extra[m] = b;
                extra[mm] = b;
            }
        }
    }
    Ok(out)
}
