//! Time integration of the perturbation `(f, E, B)`, scenario initial data,
//! checkpoints and the initial-data smallness functional `Y₀`.

pub mod checkpoint;
mod config;
mod init;
mod model;

pub use config::{
    DiagnosticsConfig, GridConfig, InitialData, IntegratorConfig, Mode, OutputConfig, PhysicsConfig, RunConfig,
    WeightIndices, PRESETS,
};
pub use init::{initial_state, rms_amplitude};
pub use model::{Derivative, Model, StepInfo};

use crate::diagnostics::mixed::{weighted_profiles, MixedKind};
use crate::error::{Result, VmlError};
use crate::maxwell::EMField;
use crate::phase_grid::{multi_indices, DistributionPair};

/// Unknowns of the perturbation system at time `t`; `f` is kept in the
/// Fourier representation in x.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseState {
    pub f: DistributionPair,
    pub em: EMField,
    pub t: f64,
}

impl PhaseState {
    pub fn is_finite(&self) -> bool {
        self.t.is_finite() && self.f.is_finite() && self.em.is_finite()
    }
}

/// Index of the step that starts at `state.t`.
pub fn step_index(config: &RunConfig, t: f64) -> usize {
    (t / config.integrator.dt).round() as usize
}

/// Integrate from `state` to the configured end time. `observe` sees the
/// starting state (with `None`) and every later state together with the
/// step statistics. A non-finite state aborts with the last finite one.
pub fn run(
    model: &Model,
    mut state: PhaseState,
    mut observe: impl FnMut(&PhaseState, Option<&StepInfo>) -> Result<()>,
) -> Result<PhaseState> {
    let cfg = model.config();
    let dt = cfg.integrator.dt;
    let total = cfg.n_steps();
    observe(&state, None)?;
    for _ in step_index(cfg, state.t)..total {
        let last_good = state.clone();
        let info = match model.step(&mut state, dt) {
            Ok(info) => info,
            Err(VmlError::SolverDiverged { .. }) if !state.is_finite() => {
                return Err(VmlError::NonFinite {
                    t: last_good.t,
                    last_good: Box::new(last_good),
                })
            }
            Err(e) => return Err(e),
        };
        if !state.is_finite() {
            return Err(VmlError::NonFinite {
                t: last_good.t,
                last_good: Box::new(last_good),
            });
        }
        observe(&state, Some(&info))?;
    }
    Ok(state)
}

/// Discrete `Y₀`:
/// `Σ_{|α|+|β|≤N₀} ‖w_{l₀+l*−|β|} ∂^α_β f₀‖ + Σ_{|α|+|β|≤N} ‖w_{l−|β|} ∂^α_β f₀‖
///  + ‖(E₀,B₀)‖_{H^N} + ‖Λ^{−s}(E₀,B₀)‖ + ‖Λ^{−s} f₀‖`,
/// with each `‖∂^α·‖` taken per multi-index (norms, not squares).
pub fn y0_functional(f0: &DistributionPair, em0: &EMField, model: &Model) -> Result<f64> {
    let cfg = model.config();
    let sg = model.spatial();
    let idx = WeightIndices::from_config(cfg);
    let n0 = cfg.diagnostics.n0;
    let n = cfg.diagnostics.n;
    let bmax = cfg.diagnostics.beta_max;
    let base = cfg.weight_params();
    let dv = sg.cell_volume();
    let mut total = 0.0;
    for (order, ell) in [(n0, idx.l0 + idx.l_star), (n, idx.l)] {
        let prof = weighted_profiles(model, f0, &base, ell, 0.0, bmax.min(order), MixedKind::Plain)?;
        for (beta, per_mode, _) in prof.iter() {
            let nb = beta.iter().sum::<usize>();
            for alpha in multi_indices(order - nb) {
                let s: f64 = per_mode
                    .iter()
                    .enumerate()
                    .map(|(m, w)| monomial(sg.kappa(m), alpha) * w)
                    .sum();
                total += (dv * s).sqrt();
            }
        }
    }
    let s_exp = cfg.physics.s_exp;
    let mut field_hn = 0.0;
    let mut field_neg = 0.0;
    let mut f_neg = 0.0;
    let h3 = model.velocity().quad_weight();
    for m in 0..sg.len() {
        let a: f64 = em0.e.iter().chain(em0.b.iter()).map(|c| c[m].norm_sqr()).sum();
        field_hn += sg.sobolev_multiplier(m, n) * a;
        let l = sg.lambda_multiplier(m, -s_exp);
        field_neg += l * l * a;
        let fm: f64 = f0.slice(0, m).iter().chain(f0.slice(1, m)).map(|z| z.norm_sqr()).sum::<f64>() * h3;
        f_neg += l * l * fm;
    }
    total += (dv * field_hn).sqrt() + (dv * field_neg).sqrt() + (dv * f_neg).sqrt();
    Ok(total)
}

/// `κ^{2α}`
fn monomial(kappa: [f64; 3], alpha: [usize; 3]) -> f64 {
    (0..3).map(|i| kappa[i].powi(2 * alpha[i] as i32)).product()
}
