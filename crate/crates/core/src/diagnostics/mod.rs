//! Energy and dissipation functionals, the a priori functional `X(t)`, the
//! Lyapunov and interpolation monitors, decay fits and the Riesz-potential
//! checks.
//!
//! Every functional is a fixed representative of its equivalence class: all
//! combination coefficients are 1. On the torus the ξ = 0 mode is excluded
//! from `Λ^{−s}` norms and its size is reported separately.

mod fit;
pub mod mixed;
mod riesz;

pub use fit::{decay_fit, late_exponential_rate, DecayFit};
pub use riesz::{minkowski_checks, mixed_norms, riesz_checks, RieszItem, RieszReport};

use serde::Serialize;

use crate::error::Result;
use crate::evolve::{Model, PhaseState, StepInfo, WeightIndices};
use crate::landau::{sigma_norm_sq, SigmaNormSpec};
use crate::maxwell::{div_b, gauss_residual};
use crate::phase_grid::{SpatialGrid, WeightParams};
use mixed::{weighted_profiles, MixedKind};

/// Unweighted per-mode squared quantities of a state (no `ΔV` factor).
#[derive(Debug, Clone, PartialEq)]
pub struct ModeData {
    /// `‖f̂(ξ)‖²_{L²_v}` summed over species
    pub f: Vec<f64>,
    pub e: Vec<f64>,
    pub b: Vec<f64>,
    /// `‖P f̂(ξ)‖²`
    pub p: Vec<f64>,
    /// `|{I−P} f̂(ξ)|²_σ`
    pub micro_sigma: Vec<f64>,
    /// `|â₊ − â₋|²`
    pub charge: Vec<f64>,
    /// `|â₊|² + |â₋|² + |b̂|² + |ĉ|²`
    pub fluid: Vec<f64>,
}

impl ModeData {
    pub fn new(model: &Model, state: &PhaseState) -> Self {
        let sg = model.spatial();
        let vg = model.velocity();
        let n = sg.len();
        let mut d = Self {
            f: vec![0.0; n],
            e: vec![0.0; n],
            b: vec![0.0; n],
            p: vec![0.0; n],
            micro_sigma: vec![0.0; n],
            charge: vec![0.0; n],
            fluid: vec![0.0; n],
        };
        let spec = SigmaNormSpec::unweighted();
        for m in 0..n {
            d.e[m] = state.em.e_at(m).iter().map(|z| z.norm_sqr()).sum();
            d.b[m] = state.em.b_at(m).iter().map(|z| z.norm_sqr()).sum();
        }
        for m in sg.canonical_modes() {
            let pair = state.f.pair_at(m);
            if pair.iter().flatten().all(|z| z.norm_sqr() == 0.0) {
                continue;
            }
            let c = model.projection().coords(&pair);
            let pf = model.projection().assemble(&c);
            let micro: [Vec<_>; 2] =
                std::array::from_fn(|s| pair[s].iter().zip(&pf[s]).map(|(a, b)| a - b).collect());
            let norm = |x: &[Vec<_>; 2]| vg.inner_c(&x[0], &x[0]).re + vg.inner_c(&x[1], &x[1]).re;
            let vals = [
                norm(&pair),
                norm(&pf),
                sigma_norm_sq(&micro[0], &spec, model.tables()) + sigma_norm_sq(&micro[1], &spec, model.tables()),
                (c[0] - c[1]).norm_sqr(),
                c.iter().map(|z| z.norm_sqr()).sum(),
            ];
            for mm in [m, sg.mirror(m)] {
                d.f[mm] = vals[0];
                d.p[mm] = vals[1];
                d.micro_sigma[mm] = vals[2];
                d.charge[mm] = vals[3];
                d.fluid[mm] = vals[4];
            }
        }
        d
    }
}

/// `Σ_{a=lo}^{hi} Σ_{|α|=a} κ^{2α}` (empty when `lo > hi`).
fn band(sg: &SpatialGrid, m: usize, lo: usize, hi: usize) -> f64 {
    (lo..=hi).map(|a| sg.derivative_multiplier(m, a)).sum()
}

fn spectral_sum(sg: &SpatialGrid, term: impl Fn(usize) -> f64) -> f64 {
    sg.cell_volume() * (0..sg.len()).map(term).sum::<f64>()
}

/// `E_n = Σ_{|α|≤n} ‖∂^α(f, E, B)‖²`
pub fn energy_unweighted(sg: &SpatialGrid, d: &ModeData, n: usize) -> f64 {
    energy_k(sg, d, 0, n)
}

/// `E^k_{n₀} = Σ_{k≤|α|≤n₀} ‖∂^α(f, E, B)‖²`
pub fn energy_k(sg: &SpatialGrid, d: &ModeData, k: usize, n0: usize) -> f64 {
    spectral_sum(sg, |m| band(sg, m, k, n0) * (d.f[m] + d.e[m] + d.b[m]))
}

/// `D^k_{n₀} = ‖∇^k(E, a₊−a₋)‖² + Σ_{k+1≤|α|≤n₀−1} ‖∂^α(Pf, E, B)‖²
///  + Σ_{|α|=n₀} ‖∂^α Pf‖² + Σ_{k≤|α|≤n₀} |∂^α {I−P}f|²_σ`; with `k = 0`,
/// `n₀ = N` this is `D_N`.
pub fn dissipation_k(sg: &SpatialGrid, d: &ModeData, k: usize, n0: usize) -> f64 {
    spectral_sum(sg, |m| {
        let mid = if n0 >= 1 { band(sg, m, k + 1, n0 - 1) } else { 0.0 };
        sg.derivative_multiplier(m, k) * (d.e[m] + d.charge[m])
            + mid * (d.p[m] + d.e[m] + d.b[m])
            + sg.derivative_multiplier(m, n0) * d.p[m]
            + band(sg, m, k, n0) * d.micro_sigma[m]
    })
}

/// `‖Λ^{−s} f‖², ‖Λ^{−s} E‖², ‖Λ^{−s} B‖²`
pub fn negative_sobolev_sq(sg: &SpatialGrid, d: &ModeData, s: f64) -> [f64; 3] {
    let lam = |m: usize| sg.lambda_multiplier(m, -s).powi(2);
    [
        spectral_sum(sg, |m| lam(m) * d.f[m]),
        spectral_sum(sg, |m| lam(m) * d.e[m]),
        spectral_sum(sg, |m| lam(m) * d.b[m]),
    ]
}

/// `E^k_{n,ℓ} = Σ_{|α|+|β|≤n, |α|≥k} ‖w_{ℓ−|β|} ∂^α_β f‖² + Σ_{k≤|α|≤n} ‖∂^α(E,B)‖²`;
/// `k = 0` gives `E_{n,ℓ}`.
pub fn energy_weighted_k(
    model: &Model,
    state: &PhaseState,
    d: &ModeData,
    k: usize,
    n: usize,
    ell: f64,
    params: &WeightParams,
) -> Result<f64> {
    let sg = model.spatial();
    let bmax = model.config().diagnostics.beta_max.min(n);
    let prof = weighted_profiles(model, &state.f, params, ell, state.t, bmax, MixedKind::Plain)?;
    let mut total = spectral_sum(sg, |m| band(sg, m, k, n) * (d.e[m] + d.b[m]));
    for (beta, w, _) in &prof {
        let nb: usize = beta.iter().sum();
        if nb > n {
            continue;
        }
        total += spectral_sum(sg, |m| band(sg, m, k, n - nb) * w[m]);
    }
    Ok(total)
}

pub fn energy_weighted(model: &Model, state: &PhaseState, d: &ModeData, n: usize, ell: f64, params: &WeightParams) -> Result<f64> {
    energy_weighted_k(model, state, d, 0, n, ell, params)
}

/// `D_{n,ℓ} = Σ_{1≤|α|≤n} ‖∂^α(a±,b,c)‖² + Σ_{|α|+|β|≤n} |w_{ℓ−|β|} ∂^α_β {I−P}f|²_σ
///  + ‖a₊−a₋‖² + ‖E‖²_{H^{n−1}} + ‖∇ₓB‖²_{H^{n−2}}
///  + (1+t)^{−1−ϑ} Σ_{|α|+|β|≤n} ‖⟨v⟩ w_{ℓ−|β|} ∂^α_β {I−P}f‖²`.
pub fn dissipation_weighted(
    model: &Model,
    state: &PhaseState,
    d: &ModeData,
    n: usize,
    ell: f64,
    params: &WeightParams,
) -> Result<f64> {
    let sg = model.spatial();
    let bmax = model.config().diagnostics.beta_max.min(n);
    let prof = weighted_profiles(model, &state.f, params, ell, state.t, bmax, MixedKind::Micro)?;
    let extra = (1.0 + state.t).powf(-1.0 - params.theta);
    let mut total = spectral_sum(sg, |m| {
        let e_part = if n >= 1 { band(sg, m, 0, n - 1) } else { 0.0 };
        let b_part = if n >= 1 { band(sg, m, 1, n - 1) } else { 0.0 };
        band(sg, m, 1, n) * d.fluid[m] + d.charge[m] + e_part * d.e[m] + b_part * d.b[m]
    });
    for (beta, sig, vel) in &prof {
        let nb: usize = beta.iter().sum();
        total += spectral_sum(sg, |m| band(sg, m, 0, n - nb) * (sig[m] + extra * vel[m]));
    }
    Ok(total)
}

/// Snapshot of every functional at one time. Vectors are indexed by `k`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FunctionalReport {
    pub t: f64,
    /// `‖f‖²`
    pub f_norm2: f64,
    /// `‖E‖² + ‖B‖²`
    pub field_energy: f64,
    pub e_n: f64,
    pub d_n: f64,
    pub e_k: Vec<f64>,
    pub d_k: Vec<f64>,
    /// `E_{N,l}` and `D_{N,l}`
    pub e_nl: f64,
    pub d_nl: f64,
    /// `E^k_{N₀,l₀}`
    pub e_k_l0: Vec<f64>,
    /// `Ē_{N₀,l₀+l*}`
    pub e_bar_x: f64,
    /// interpolation cap candidates `Ē_{N₀,(k+s)/2}` and `E_{⌈N₀+k+s⌉}`
    pub cap_weighted: Vec<f64>,
    pub cap_unweighted: Vec<f64>,
    pub neg_f: f64,
    pub neg_e: f64,
    pub neg_b: f64,
    /// `‖f̂(0)‖`, excluded from every `Λ^{−s}` norm
    pub zero_mode_f: f64,
    pub gauss_residual: f64,
    pub div_b: f64,
    /// Integrand of `X(t)` before the running supremum.
    pub x_integrand: f64,
}

pub fn report(model: &Model, state: &PhaseState) -> Result<FunctionalReport> {
    let cfg = model.config();
    let dc = &cfg.diagnostics;
    let sg = model.spatial();
    let vg = model.velocity();
    let s = cfg.physics.s_exp;
    let params = cfg.weight_params();
    let idx = WeightIndices::from_config(cfg);
    let d = ModeData::new(model, state);
    let neg = negative_sobolev_sq(sg, &d, s);
    let neg_all = neg.iter().sum::<f64>();
    let e_n = energy_unweighted(sg, &d, dc.n);
    let e_nl = energy_weighted(model, state, &d, dc.n, idx.l, &params)?;
    let e_bar_x = energy_weighted(model, state, &d, dc.n0, idx.l0 + idx.l_star, &params)? + neg_all;
    let mut e_k_l0 = Vec::new();
    let mut cap_weighted = Vec::new();
    let mut cap_unweighted = Vec::new();
    for k in 0..=dc.k_max {
        e_k_l0.push(energy_weighted_k(model, state, &d, k, dc.n0, idx.l0, &params)?);
        let kk = k as f64 + s;
        cap_weighted.push(energy_weighted(model, state, &d, dc.n0, kk / 2.0, &params)? + neg_all);
        cap_unweighted.push(energy_unweighted(sg, &d, (dc.n0 as f64 + kk).ceil() as usize));
    }
    let x_integrand = e_bar_x + e_n + (1.0 + state.t).powf(-(1.0 + dc.eps0) / 2.0) * e_nl;
    let dv = sg.cell_volume();
    Ok(FunctionalReport {
        t: state.t,
        f_norm2: dv * d.f.iter().sum::<f64>(),
        field_energy: state.em.energy(sg),
        e_n,
        d_n: dissipation_k(sg, &d, 0, dc.n),
        e_k: (0..=dc.k_max).map(|k| energy_k(sg, &d, k, dc.n0)).collect(),
        d_k: (0..=dc.k_max).map(|k| dissipation_k(sg, &d, k, dc.n0)).collect(),
        e_nl,
        d_nl: dissipation_weighted(model, state, &d, dc.n, idx.l, &params)?,
        e_k_l0,
        e_bar_x,
        cap_weighted,
        cap_unweighted,
        neg_f: neg[0].sqrt(),
        neg_e: neg[1].sqrt(),
        neg_b: neg[2].sqrt(),
        zero_mode_f: (dv * d.f[0]).sqrt(),
        gauss_residual: gauss_residual(&state.em, &state.f, sg, vg)?,
        div_b: div_b(&state.em, sg),
        x_integrand,
    })
}

/// `X(t) = sup_{τ≤t} {Ē_{N₀,l₀+l*} + E_N + (1+τ)^{−(1+ε₀)/2} E_{N,l}}` as the
/// running supremum of the per-report integrands.
pub fn x_functional(reports: &[FunctionalReport]) -> Vec<f64> {
    reports
        .iter()
        .scan(f64::NEG_INFINITY, |sup, r| {
            *sup = sup.max(r.x_integrand);
            Some(*sup)
        })
        .collect()
}

/// Energies `E_N, E^0_{N₀}, …, E^{k_max}_{N₀}` and the matching collision
/// dissipation proxies of one step, `Σ_ξ mult(ξ) ΔV ⟨L f̄, f̄⟩(ξ)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LyapunovRecord {
    pub t0: f64,
    pub t1: f64,
    pub e0: Vec<f64>,
    pub e1: Vec<f64>,
    pub d: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LyapunovStep {
    pub t: f64,
    /// `ΔE/Δt + D` per functional
    pub delta: Vec<f64>,
    pub allowance: Vec<f64>,
    pub flagged: bool,
}

/// Cheap energies `[E_N, E^0_{N₀}, …]` tracked every step.
pub fn lyapunov_energies(model: &Model, state: &PhaseState) -> Vec<f64> {
    let sg = model.spatial();
    let dc = &model.config().diagnostics;
    let h3 = model.velocity().quad_weight();
    let per_mode: Vec<f64> = (0..sg.len())
        .map(|m| {
            let f: f64 = state.f.slice(0, m).iter().chain(state.f.slice(1, m)).map(|z| z.norm_sqr()).sum::<f64>() * h3;
            let e: f64 = state.em.e_at(m).iter().chain(state.em.b_at(m).iter()).map(|z| z.norm_sqr()).sum();
            f + e
        })
        .collect();
    let mut out = vec![spectral_sum(sg, |m| band(sg, m, 0, dc.n) * per_mode[m])];
    for k in 0..=dc.k_max {
        out.push(spectral_sum(sg, |m| band(sg, m, k, dc.n0) * per_mode[m]));
    }
    out
}

/// Dissipation proxies matching [`lyapunov_energies`].
pub fn lyapunov_dissipation(model: &Model, info: &StepInfo) -> Vec<f64> {
    let sg = model.spatial();
    let dc = &model.config().diagnostics;
    let sum = |lo: usize, hi: usize| (0..sg.len()).map(|m| band(sg, m, lo, hi) * info.dissipation[m]).sum::<f64>();
    let mut out = vec![sum(0, dc.n)];
    for k in 0..=dc.k_max {
        out.push(sum(k, dc.n0));
    }
    out
}

/// `ΔE/Δt + D` per step, flagged when positive beyond
/// `C dt² max(E⁰, E¹)` plus a round-off floor.
pub fn lyapunov_monitor(records: &[LyapunovRecord], c: f64) -> Vec<LyapunovStep> {
    records
        .iter()
        .map(|r| {
            let dt = r.t1 - r.t0;
            let mut flagged = false;
            let mut delta = Vec::with_capacity(r.e0.len());
            let mut allowance = Vec::with_capacity(r.e0.len());
            for i in 0..r.e0.len() {
                let scale = r.e0[i].max(r.e1[i]);
                let a = c * dt * dt * scale + 1e-12 * scale / dt;
                let x = (r.e1[i] - r.e0[i]) / dt + r.d[i];
                flagged |= x > a || !x.is_finite();
                delta.push(x);
                allowance.push(a);
            }
            LyapunovStep {
                t: r.t1,
                delta,
                allowance,
                flagged,
            }
        })
        .collect()
}

/// `r(t) = E^k / [(D^k)^θ cap^{1−θ}]`, `θ = (k+s)/(k+s+1)`, with `cap` the
/// running supremum of `max(Ē_{N₀,(k+s)/2}, E_{⌈N₀+k+s⌉})`; zero where
/// `E^k = 0`.
pub fn interpolation_monitor(reports: &[FunctionalReport], k: usize, s: f64) -> Vec<f64> {
    let theta = (k as f64 + s) / (k as f64 + s + 1.0);
    let mut cap: f64 = 0.0;
    reports
        .iter()
        .map(|r| {
            cap = cap.max(r.cap_weighted[k].max(r.cap_unweighted[k]));
            interpolation_ratio(r.e_k[k], r.d_k[k], cap, theta)
        })
        .collect()
}

pub fn interpolation_ratio(e: f64, d: f64, cap: f64, theta: f64) -> f64 {
    if e == 0.0 {
        return 0.0;
    }
    e / (d.powf(theta) * cap.powf(1.0 - theta))
}

impl FunctionalReport {
    /// CSV header for `k = 0..=k_max`.
    pub fn csv_header(k_max: usize) -> Vec<String> {
        let mut h: Vec<String> = ["t", "f_norm2", "field_energy", "e_n", "d_n"].map(String::from).to_vec();
        for name in ["e_k", "d_k", "e_k_l0"] {
            h.extend((0..=k_max).map(|k| format!("{name}{k}")));
        }
        h.extend(["e_nl", "d_nl", "e_bar_x", "neg_f", "neg_e", "neg_b", "zero_mode_f", "gauss_residual", "div_b"].map(String::from));
        h.extend(["x_functional", "lyapunov_delta", "lyapunov_flag"].map(String::from));
        h.extend((0..=k_max).map(|k| format!("interp_r{k}")));
        h
    }

    /// Row values matching [`csv_header`](Self::csv_header); `x`, the last
    /// Lyapunov delta and its flag and the interpolation ratios are
    /// supplied by the caller.
    pub fn csv_values(&self, x: f64, lyapunov: f64, flag: bool, interp: &[f64]) -> Vec<f64> {
        let mut v = vec![self.t, self.f_norm2, self.field_energy, self.e_n, self.d_n];
        v.extend(&self.e_k);
        v.extend(&self.d_k);
        v.extend(&self.e_k_l0);
        v.extend([
            self.e_nl,
            self.d_nl,
            self.e_bar_x,
            self.neg_f,
            self.neg_e,
            self.neg_b,
            self.zero_mode_f,
            self.gauss_residual,
            self.div_b,
            x,
            lyapunov,
            if flag { 1.0 } else { 0.0 },
        ]);
        v.extend(interp);
        v
    }
}

/// Everything a run produces besides its final state.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct RunOutput {
    pub reports: Vec<FunctionalReport>,
    pub lyapunov: Vec<LyapunovRecord>,
}

/// Integrate `model` from `state`, collecting a report every
/// `diagnostics.every` steps (and at the final step) and a Lyapunov record
/// every step. `hook` sees every state after it is recorded.
pub fn run_with_reports(
    model: &Model,
    state: PhaseState,
    mut hook: impl FnMut(&PhaseState, usize) -> Result<()>,
) -> Result<(PhaseState, RunOutput)> {
    let cfg = model.config();
    let every = cfg.diagnostics.every;
    let total = cfg.n_steps();
    let mut step = crate::evolve::step_index(cfg, state.t);
    let mut out = RunOutput::default();
    let mut prev: Option<(f64, Vec<f64>)> = None;
    let last = crate::evolve::run(model, state, |s, info| {
        let e = lyapunov_energies(model, s);
        if let (Some(info), Some((t0, e0))) = (info, prev.take()) {
            step += 1;
            out.lyapunov.push(LyapunovRecord {
                t0,
                t1: s.t,
                e0,
                e1: e.clone(),
                d: lyapunov_dissipation(model, info),
            });
        }
        if step.is_multiple_of(every) || step == total {
            out.reports.push(report(model, s)?);
        }
        hook(s, step)?;
        prev = Some((s.t, e));
        Ok(())
    })?;
    Ok((last, out))
}
