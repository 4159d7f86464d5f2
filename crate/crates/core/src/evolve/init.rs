//! Seeded initial data for the scenario presets.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::Result;
use crate::maxwell::{make_compatible, split_mode, EMField};
use crate::phase_grid::{hermite_function, multi_indices, DistributionPair, Representation, C64};

use super::config::InitialData;
use super::model::Model;
use super::PhaseState;

/// Hermite degree of the velocity profiles.
const PROFILE_DEGREE: usize = 2;

fn normal_c(rng: &mut ChaCha8Rng) -> C64 {
    C64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
}

fn random_profile(model: &Model, rng: &mut ChaCha8Rng, real: bool) -> [Vec<C64>; 2] {
    let vg = model.velocity();
    let idx = multi_indices(PROFILE_DEGREE);
    let table: Vec<Vec<f64>> = idx.iter().map(|a| vg.sample(|v| hermite_function(*a, v))).collect();
    std::array::from_fn(|_| {
        let c: Vec<C64> = idx
            .iter()
            .map(|_| {
                let z = normal_c(rng);
                if real {
                    C64::new(z.re, 0.0)
                } else {
                    z
                }
            })
            .collect();
        (0..vg.len())
            .map(|p| table.iter().zip(&c).map(|(t, k)| k * t[p]).sum())
            .collect()
    })
}

/// Root mean square over x of `‖f(x, ·)‖_{L²_v}`.
pub fn rms_amplitude(model: &Model, f: &DistributionPair) -> f64 {
    let h3 = model.velocity().quad_weight();
    let total: f64 = f.values().iter().map(|z| z.norm_sqr()).sum::<f64>() * h3;
    (total / model.spatial().len() as f64).sqrt()
}

fn transverse_random(model: &Model, rng: &mut ChaCha8Rng, m: usize) -> [C64; 3] {
    let k = model.spatial().kappa(m);
    let raw = [normal_c(rng), normal_c(rng), normal_c(rng)];
    split_mode(k, raw).1
}

fn rms_field(model: &Model, c: &[Vec<C64>; 3]) -> f64 {
    let total: f64 = c.iter().flatten().map(|z| z.norm_sqr()).sum();
    (total / model.spatial().len() as f64).sqrt()
}

/// Fill `m` and its mirror with `v` and its conjugate.
fn set_hermitian_e(em: &mut EMField, model: &Model, m: usize, v: [C64; 3], field_b: bool) {
    let mm = model.spatial().mirror(m);
    let c = v.map(|z| z.conj());
    if field_b {
        em.set_b(m, v);
        em.set_b(mm, c);
    } else {
        em.set_e(m, v);
        em.set_e(mm, c);
    }
}

/// Build the initial state of the configured preset at `t = 0`.
pub fn initial_state(model: &Model) -> Result<PhaseState> {
    let c = model.config();
    let sg = model.spatial();
    let vg = model.velocity();
    let amp = c.physics.amplitude;
    let mut rng = ChaCha8Rng::seed_from_u64(c.physics.seed);
    let mut f = DistributionPair::for_grids(sg, vg, Representation::Fourier);
    let mut em = EMField::zeros(sg.len());
    match c.physics.initial {
        InitialData::Zero => {}
        InitialData::Homogeneous => {
            let mut prof = random_profile(model, &mut rng, true);
            // neutral: a homogeneous charge cannot satisfy Gauss's law
            let sq: Vec<C64> = vg.sqrt_mu().iter().map(|&x| C64::new(x, 0.0)).collect();
            let diff: Vec<C64> = prof[0].iter().zip(&prof[1]).map(|(a, b)| a - b).collect();
            let q = 0.5 * vg.inner_c(&diff, &sq).re / vg.inner_c(&sq, &sq).re;
            for (i, &w) in vg.sqrt_mu().iter().enumerate() {
                prof[0][i] -= q * w;
                prof[1][i] += q * w;
            }
            f.set_pair_at(0, &prof);
            let r = rms_amplitude(model, &f);
            if r > 0.0 {
                f.scale(amp / r);
            }
        }
        InitialData::Broadband => {
            let n = sg.dims()[0];
            for xi in 1..=c.physics.modes {
                let m = xi * sg.dims()[1] * sg.dims()[2];
                let mm = sg.mirror(m);
                let mut prof = random_profile(model, &mut rng, false);
                // flat spectrum: every excited mode carries the same L²_v norm
                let norm = (vg.inner_c(&prof[0], &prof[0]).re + vg.inner_c(&prof[1], &prof[1]).re).sqrt();
                prof.iter_mut().flatten().for_each(|z| *z /= norm);
                let conj: [Vec<C64>; 2] = std::array::from_fn(|s| prof[s].iter().map(|z| z.conj()).collect());
                f.set_pair_at(m, &prof);
                f.set_pair_at(mm, &conj);
                debug_assert!(2 * xi < n);
                let et = transverse_random(model, &mut rng, m);
                set_hermitian_e(&mut em, model, m, et, false);
                let bt = transverse_random(model, &mut rng, m);
                set_hermitian_e(&mut em, model, m, bt, true);
            }
            let r = rms_amplitude(model, &f);
            f.scale(amp / r);
            let rf = rms_field(model, &em.e).max(rms_field(model, &em.b));
            em.scale(amp / rf);
            em = make_compatible(&em, &f, sg, vg)?;
        }
        InitialData::VacuumWaves => {
            let n = sg.dims()[0];
            let top = c.physics.modes.min(n.saturating_sub(1) / 2).max(1);
            for xi in 1..=top {
                let m = xi * sg.dims()[1] * sg.dims()[2];
                let et = transverse_random(model, &mut rng, m);
                set_hermitian_e(&mut em, model, m, et, false);
                let bt = transverse_random(model, &mut rng, m);
                set_hermitian_e(&mut em, model, m, bt, true);
            }
            let rf = rms_field(model, &em.e).max(rms_field(model, &em.b));
            if rf > 0.0 {
                em.scale(amp / rf);
            }
        }
    }
    Ok(PhaseState { f, em, t: 0.0 })
}
