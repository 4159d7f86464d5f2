//! Fixtures shared by the benchmarks.

use vml_core::landau::{hermite_sample, VPair};
use vml_core::{RunConfig, VelocityGrid};

/// Smooth pair with fixed Hermite coefficients up to degree 3.
pub fn sample_pair(grid: &VelocityGrid) -> VPair {
    let n = vml_core::phase_grid::multi_indices(3).len();
    let coeffs: Vec<f64> = (0..2 * n).map(|i| ((i * 7919) % 23) as f64 / 23.0 - 0.5).collect();
    hermite_sample(grid, 3, &coeffs)
}

/// Default scenario shortened to `steps` steps.
pub fn short_run(steps: usize) -> RunConfig {
    let mut c = RunConfig::default();
    c.integrator.t_end = steps as f64 * c.integrator.dt;
    c
}
