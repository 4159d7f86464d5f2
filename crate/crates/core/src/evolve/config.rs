//! Run configuration with five sections and named scenario presets.

use serde::{Deserialize, Serialize};

use crate::error::{Result, VmlError};
use crate::phase_grid::WeightParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Linearized,
    Nonlinear,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitialData {
    /// `f = 0`, `E = B = 0`.
    Zero,
    /// Low-mode perturbation along x₁ with a flat mode spectrum, Gauss
    /// compatible fields and random transverse `B`.
    Broadband,
    /// x-independent `f` (only the ξ = 0 mode), no fields.
    Homogeneous,
    /// `f = 0` with random transverse electromagnetic waves.
    VacuumWaves,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    pub n_x: usize,
    /// Number of active spatial axes (1, 2 or 3).
    pub dims: usize,
    pub box_length: f64,
    pub n_v: usize,
    pub v_max: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            n_x: 64,
            dims: 1,
            box_length: 40.0 * std::f64::consts::PI,
            n_v: 16,
            v_max: 6.0,
        }
    }
}

impl GridConfig {
    pub fn active_axes(&self) -> [bool; 3] {
        [self.dims >= 1, self.dims >= 2, self.dims >= 3]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PhysicsConfig {
    pub gamma: f64,
    pub s_exp: f64,
    pub q: f64,
    pub theta: f64,
    pub mode: Mode,
    /// Apply `−L f` (off gives collisionless dynamics).
    pub collisions: bool,
    /// Couple `f` and `(E, B)` through the current and the force terms.
    pub coupling: bool,
    pub initial: InitialData,
    pub amplitude: f64,
    /// Highest excited mode index `ξ₁` of the broadband data.
    pub modes: usize,
    pub seed: u64,
}

impl Default for PhysicsConfig {
    fn default() -> Self {
        Self {
            gamma: -3.0,
            s_exp: 0.5,
            q: 0.01,
            theta: 0.25,
            mode: Mode::Linearized,
            collisions: true,
            coupling: true,
            initial: InitialData::Broadband,
            amplitude: 1e-3,
            modes: 24,
            seed: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IntegratorConfig {
    pub dt: f64,
    pub t_end: f64,
    pub solver_tol: f64,
    pub solver_max_iter: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            dt: 0.25,
            t_end: 40.0,
            solver_tol: 1e-10,
            solver_max_iter: 500,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DiagnosticsConfig {
    /// Full functional report every this many steps (the Lyapunov delta is
    /// recorded every step regardless).
    pub every: usize,
    pub n0: usize,
    pub n: usize,
    pub k_max: usize,
    /// Highest total order of velocity derivatives in mixed norms.
    pub beta_max: usize,
    pub eps0: f64,
    pub l_prime: f64,
    /// `C` in the Lyapunov allowance `C dt² E`.
    pub allowance: f64,
    /// Fit residual above which a decay exponent is flagged as not meaningful.
    pub fit_threshold: f64,
    /// Smallest ratio `(1+t_end)/(1+t_start)` of an automatically chosen
    /// fit window.
    pub fit_min_span: f64,
    /// Trailing fraction of the series used for the exponential rate.
    pub late_fraction: f64,
}

impl Default for DiagnosticsConfig {
    fn default() -> Self {
        Self {
            every: 4,
            n0: 4,
            n: 7,
            k_max: 2,
            beta_max: 2,
            eps0: 0.1,
            l_prime: 1.0,
            allowance: 10.0,
            fit_threshold: 0.05,
            fit_min_span: 4.0,
            late_fraction: 0.25,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    /// Checkpoint every this many steps; 0 disables periodic checkpoints.
    pub checkpoint_every: usize,
    pub final_checkpoint: bool,
    /// Directory for cached σ tables; empty disables caching.
    pub table_cache: String,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            checkpoint_every: 0,
            final_checkpoint: true,
            table_cache: String::new(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub grids: GridConfig,
    pub physics: PhysicsConfig,
    pub integrator: IntegratorConfig,
    pub diagnostics: DiagnosticsConfig,
    pub output: OutputConfig,
}

pub const PRESETS: [&str; 5] = [
    "zero",
    "relaxation",
    "vacuum-maxwell",
    "default-linearized",
    "small-broadband",
];

impl RunConfig {
    pub fn preset(name: &str) -> Result<Self> {
        let mut c = Self::default();
        match name {
            "default-linearized" => {}
            "zero" => {
                c.physics.initial = InitialData::Zero;
                c.grids.n_x = 16;
                c.grids.n_v = 8;
                c.integrator.t_end = 1.0;
            }
            "relaxation" => {
                c.grids.n_x = 1;
                c.physics.initial = InitialData::Homogeneous;
                c.physics.coupling = false;
                c.integrator.t_end = 5.0;
                c.diagnostics.every = 1;
            }
            "vacuum-maxwell" => {
                c.grids.n_x = 32;
                c.grids.n_v = 8;
                c.physics.initial = InitialData::VacuumWaves;
                c.physics.collisions = false;
                c.physics.coupling = false;
                c.integrator.dt = 0.1;
                c.integrator.t_end = 20.0;
                c.diagnostics.every = 10;
            }
            "small-broadband" => {
                c.grids.n_x = 16;
                c.grids.n_v = 12;
                c.grids.box_length = 4.0 * std::f64::consts::PI;
                c.physics.modes = 3;
                c.integrator.dt = 0.1;
                c.integrator.t_end = 1.0;
                c.diagnostics.every = 1;
            }
            other => {
                return Err(VmlError::InvalidParameter(format!(
                    "unknown preset '{other}' (known: {})",
                    PRESETS.join(", ")
                )))
            }
        }
        Ok(c)
    }

    pub fn weight_params(&self) -> WeightParams {
        WeightParams {
            gamma: self.physics.gamma,
            ell: 0.0,
            q: self.physics.q,
            theta: self.physics.theta,
        }
    }

    /// Number of steps `round(t_end / dt)`.
    pub fn n_steps(&self) -> usize {
        (self.integrator.t_end / self.integrator.dt).round() as usize
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(VmlError::InvalidParameter(m));
        let g = &self.grids;
        if !(1..=3).contains(&g.dims) {
            return bad(format!("grids.dims must be 1, 2 or 3, got {}", g.dims));
        }
        if g.n_x == 0 || g.n_v < 8 {
            return bad(format!("grids need n_x >= 1 and n_v >= 8, got n_x = {}, n_v = {}", g.n_x, g.n_v));
        }
        if !(g.v_max > 0.0 && g.box_length > 0.0) {
            return bad("grids.v_max and grids.box_length must be positive".into());
        }
        let p = &self.physics;
        if !(0.5..1.5).contains(&p.s_exp) {
            return bad(format!("physics.s_exp must lie in [1/2, 3/2), got {}", p.s_exp));
        }
        let w = WeightParams::new(p.gamma, 0.0, p.q, p.theta)?;
        w.check_theta(p.s_exp)?;
        if !(p.amplitude >= 0.0 && p.amplitude.is_finite()) {
            return bad(format!("physics.amplitude must be finite and nonnegative, got {}", p.amplitude));
        }
        if p.initial == InitialData::Broadband && (p.modes == 0 || 2 * p.modes >= g.n_x) {
            return bad(format!(
                "physics.modes must satisfy 1 <= modes < n_x / 2, got {} with n_x = {}",
                p.modes, g.n_x
            ));
        }
        let i = &self.integrator;
        if !(i.dt > 0.0 && i.dt.is_finite()) || !(i.t_end >= 0.0) {
            return bad("integrator.dt must be positive and t_end nonnegative".into());
        }
        if !(i.solver_tol > 0.0) || i.solver_max_iter == 0 {
            return bad("integrator.solver_tol and solver_max_iter must be positive".into());
        }
        let d = &self.diagnostics;
        if d.every == 0 {
            return bad("diagnostics.every must be at least 1".into());
        }
        if d.n0 < 1 || d.n < d.n0 || d.k_max > d.n0 {
            return bad(format!(
                "diagnostics orders need 1 <= n0 <= n and k_max <= n0, got n0 = {}, n = {}, k_max = {}",
                d.n0, d.n, d.k_max
            ));
        }
        if !(d.eps0 > 0.0 && d.eps0 < 1.0) {
            return bad(format!("diagnostics.eps0 must lie in (0, 1), got {}", d.eps0));
        }
        if !(d.fit_min_span >= 1.0) || !(d.late_fraction > 0.0 && d.late_fraction <= 1.0) {
            return bad("diagnostics.fit_min_span must be >= 1 and late_fraction in (0, 1]".into());
        }
        Ok(())
    }
}

/// Derived weight indices: `l = N`, `l₀ = l + (γ−2)/(2(γ+2))`,
/// `l* = l′ + (N₀−1)/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightIndices {
    pub l: f64,
    pub l0: f64,
    pub l_star: f64,
}

impl WeightIndices {
    pub fn from_config(c: &RunConfig) -> Self {
        let g = c.physics.gamma;
        let l = c.diagnostics.n as f64;
        Self {
            l,
            l0: l + (g - 2.0) / (2.0 * (g + 2.0)),
            l_star: c.diagnostics.l_prime + (c.diagnostics.n0 as f64 - 1.0) / 2.0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_validate() {
        for p in PRESETS {
            RunConfig::preset(p).unwrap().validate().unwrap();
        }
        assert!(RunConfig::preset("nope").is_err());
    }

    #[test]
    fn weight_indices_at_coulomb() {
        let w = WeightIndices::from_config(&RunConfig::default());
        assert_eq!(w.l, 7.0);
        assert!((w.l0 - 9.5).abs() < 1e-15);
        assert!((w.l_star - 2.5).abs() < 1e-15);
    }
}
