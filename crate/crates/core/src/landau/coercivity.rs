use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Result, VmlError};
use crate::macro_micro::Projection;
use crate::phase_grid::{hermite_function, multi_indices, VelocityGrid, C64};

use super::{sigma_norm_sq, CollisionTables, SigmaNormSpec, VPair};

#[derive(Debug, Clone, PartialEq)]
pub struct CoercivityReport {
    pub min: f64,
    pub median: f64,
    pub ratios: Vec<f64>,
}

/// Pair with species coefficients on the orthonormal Hermite functions of
/// total degree `≤ degree`; `coeffs` holds both species back to back.
pub fn hermite_sample(grid: &VelocityGrid, degree: usize, coeffs: &[f64]) -> VPair {
    let idx = multi_indices(degree);
    assert_eq!(coeffs.len(), 2 * idx.len(), "coefficient count");
    let table: Vec<Vec<f64>> = idx.iter().map(|a| grid.sample(|v| hermite_function(*a, v))).collect();
    std::array::from_fn(|s| {
        let c = &coeffs[s * idx.len()..(s + 1) * idx.len()];
        (0..grid.len())
            .map(|p| C64::new(table.iter().zip(c).map(|(t, k)| t[p] * k).sum(), 0.0))
            .collect()
    })
}

/// `⟨L {I−P}f, {I−P}f⟩ / |{I−P}f|²_σ`
pub fn coercivity_ratio(tables: &CollisionTables, proj: &Projection, f: &VPair) -> Result<f64> {
    let spec = SigmaNormSpec::unweighted();
    let micro = proj.micro(f);
    let whole = sigma_norm_sq(&f[0], &spec, tables) + sigma_norm_sq(&f[1], &spec, tables);
    let den = sigma_norm_sq(&micro[0], &spec, tables) + sigma_norm_sq(&micro[1], &spec, tables);
    if den <= 1e-24 * whole.max(f64::MIN_POSITIVE) {
        return Err(VmlError::PureMacro);
    }
    let lf = tables.apply_l(&micro);
    Ok(tables.pair_inner(&lf, &micro).re / den)
}

/// Minimum and median of the coercivity ratio over `samples` seeded
/// standard-normal Hermite coefficient vectors.
pub fn coercivity_gap(
    tables: &CollisionTables,
    proj: &Projection,
    samples: usize,
    degree: usize,
    seed: u64,
) -> Result<CoercivityReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nb = 2 * multi_indices(degree).len();
    let mut ratios = Vec::with_capacity(samples);
    for k in 0..samples {
        let coeffs: Vec<f64> = (0..nb).map(|_| StandardNormal.sample(&mut rng)).collect();
        let f = hermite_sample(tables.grid(), degree, &coeffs);
        let r = coercivity_ratio(tables, proj, &f)?;
        if r <= 0.0 || !r.is_finite() {
            return Err(VmlError::CoercivityFailure {
                ratio: r,
                sample: k,
                coefficients: coeffs,
            });
        }
        ratios.push(r);
    }
    let mut sorted = ratios.clone();
    sorted.sort_by(f64::total_cmp);
    let median = if sorted.is_empty() {
        f64::NAN
    } else if sorted.len() % 2 == 1 {
        sorted[sorted.len() / 2]
    } else {
        0.5 * (sorted[sorted.len() / 2 - 1] + sorted[sorted.len() / 2])
    };
    Ok(CoercivityReport {
        min: sorted.first().copied().unwrap_or(f64::NAN),
        median,
        ratios,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::landau::build_collision_tables;

    #[test]
    fn pure_macro_is_rejected() {
        let g = VelocityGrid::new(8, 6.0).unwrap();
        let t = build_collision_tables(&g, -3.0).unwrap();
        let p = Projection::new(&g).unwrap();
        let f = p.basis_pair(5);
        assert!(matches!(coercivity_ratio(&t, &p, &f), Err(VmlError::PureMacro)));
    }
}
