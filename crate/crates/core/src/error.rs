use thiserror::Error;

use crate::evolve::PhaseState;

pub type Result<T> = std::result::Result<T, VmlError>;

#[derive(Debug, Error)]
pub enum VmlError {
    #[error("shape mismatch: expected {expected} values, got {got}")]
    ShapeMismatch { expected: usize, got: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("velocity grid too coarse for collision tables: n_v = {n_v} (need at least 8)")]
    ResolutionTooCoarse { n_v: usize },

    #[error("net charge {charge:e} in the zero mode; a periodic box requires global neutrality")]
    NonNeutral { charge: f64 },

    #[error("collision solve did not converge: {iterations} iterations, relative residual {residual:e}")]
    SolverDiverged { iterations: usize, residual: f64 },

    #[error("coercivity gap is not positive: ratio {ratio:e} at sample {sample}")]
    CoercivityFailure {
        ratio: f64,
        sample: usize,
        coefficients: Vec<f64>,
    },

    #[error("input is purely macroscopic; coercivity ratio undefined")]
    PureMacro,

    #[error("non-finite value detected at t = {t}")]
    NonFinite { t: f64, last_good: Box<PhaseState> },

    #[error("need at least {needed} snapshots, got {got}")]
    InsufficientHistory { needed: usize, got: usize },

    #[error("non-positive value {value:e} at t = {t} in fit window")]
    NonPositiveData { t: f64, value: f64 },

    #[error("fit window holds {points} points; need at least {needed}")]
    WindowTooSmall { points: usize, needed: usize },

    #[error("bad file format: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
