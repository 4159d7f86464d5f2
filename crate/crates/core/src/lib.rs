//! Two-species Vlasov–Maxwell–Landau perturbation solver with the energy,
//! dissipation and negative-Sobolev diagnostics used to study its decay.

pub mod diagnostics;
pub mod error;
pub mod evolve;
mod fft;
pub mod landau;
pub mod macro_micro;
pub mod maxwell;
pub mod phase_grid;

pub use error::{Result, VmlError};
pub use fft::Fft3;
pub use landau::{build_collision_tables, CollisionTables, SigmaNormSpec, VPair};
pub use macro_micro::{MacroFields, MomentSet, Projection};
pub use phase_grid::{
    fourier_forward, fourier_inverse, lambda_s_apply, maxwellian, sobolev_norms, weight_w,
    DistributionPair, Representation, SpatialGrid, VelocityGrid, WeightParams, C64,
};
pub use maxwell::EMField;
pub use evolve::{initial_state, Model, PhaseState, RunConfig, StepInfo};
pub use diagnostics::{decay_fit, riesz_checks, DecayFit, FunctionalReport, RunOutput};
