use std::f64::consts::PI;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vml_core::maxwell::{div_b, field_rhs, gauss_residual, make_compatible, vacuum_rotate};
use vml_core::phase_grid::lambda_s_spectral;
use vml_core::{
    fourier_forward, fourier_inverse, lambda_s_apply, sobolev_norms, DistributionPair, EMField, Representation,
    SpatialGrid, VelocityGrid, C64,
};

fn plane() -> SpatialGrid {
    SpatialGrid::new(8, 2.0 * PI, [true, true, false]).unwrap()
}

fn random_field(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
}

fn random_em(n: usize, seed: u64) -> EMField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut em = EMField::zeros(n);
    for c in em.e.iter_mut().chain(em.b.iter_mut()) {
        for z in c.iter_mut() {
            *z = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        }
    }
    em
}

fn mean_free(mut f: Vec<f64>) -> Vec<f64> {
    let m = f.iter().sum::<f64>() / f.len() as f64;
    f.iter_mut().for_each(|x| *x -= m);
    f
}

#[test]
fn lambda_scales_a_cosine_exactly() {
    let g = SpatialGrid::one_d(32, 10.0).unwrap();
    let k = 2.0 * PI * 3.0 / 10.0;
    let f: Vec<f64> = (0..32).map(|i| (k * g.position(i)[0]).cos()).collect();
    for s in [-1.25, -0.5, 0.5, 1.0, 2.0] {
        let out = lambda_s_apply(&g, &f, s).unwrap();
        for (a, b) in out.iter().zip(&f) {
            assert!((a - k.powf(s) * b).abs() < 1e-12, "s = {s}");
        }
    }
}

#[test]
fn sobolev_norms_of_a_sine() {
    // ‖sin(kx)‖² = L/2 on a box of length L
    let len = 6.0;
    let g = SpatialGrid::one_d(16, len).unwrap();
    let k = 2.0 * PI * 2.0 / len;
    let f: Vec<f64> = (0..16).map(|i| (k * g.position(i)[0]).sin()).collect();
    let (neg, h2) = sobolev_norms(&g, &f, 0.5, 2).unwrap();
    let base = 0.5 * len;
    assert!((neg * neg - base / k).abs() < 1e-12);
    assert!((h2 * h2 - base * (1.0 + k * k + k.powi(4))).abs() < 1e-10);
}

#[test]
fn zero_mode_is_annihilated_by_lambda() {
    let g = plane();
    let out = lambda_s_apply(&g, &vec![2.5; g.len()], 0.5).unwrap();
    assert!(out.iter().all(|x| x.abs() < 1e-14));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn plancherel(seed in any::<u64>()) {
        let g = plane();
        let f = random_field(g.len(), seed);
        let hat = fourier_forward(&g, &f).unwrap();
        let phys: f64 = f.iter().map(|x| x * x).sum::<f64>() * g.cell_volume();
        prop_assert!((g.norm2_spectral(&hat) - phys).abs() <= 1e-12 * phys);
        let back = fourier_inverse(&g, &hat).unwrap();
        for (a, b) in back.iter().zip(&f) {
            prop_assert!((a - b).abs() <= 1e-13);
        }
    }

    #[test]
    fn lambda_powers_compose(seed in any::<u64>(), s in -1.5f64..1.5, t in -1.5f64..1.5) {
        let g = plane();
        let f = mean_free(random_field(g.len(), seed));
        let hat = fourier_forward(&g, &f).unwrap();
        let mut a = hat.clone();
        lambda_s_spectral(&g, &mut a, s).unwrap();
        lambda_s_spectral(&g, &mut a, t).unwrap();
        let mut b = hat;
        if s + t != 0.0 {
            lambda_s_spectral(&g, &mut b, s + t).unwrap();
        }
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).norm() <= 1e-11 * (1.0 + y.norm()));
        }
    }

    #[test]
    fn vacuum_rotation_is_a_flow(seed in any::<u64>(), t1 in 0.0f64..3.0, t2 in 0.0f64..3.0) {
        let g = plane();
        let em = random_em(g.len(), seed);
        let mut a = em.clone();
        vacuum_rotate(&mut a, &g, t1);
        vacuum_rotate(&mut a, &g, t2);
        let mut b = em.clone();
        vacuum_rotate(&mut b, &g, t1 + t2);
        for (x, y) in a.e.iter().chain(&a.b).flatten().zip(b.e.iter().chain(&b.b).flatten()) {
            prop_assert!((x - y).norm() <= 1e-12);
        }
        let e0 = em.energy(&g);
        prop_assert!((a.energy(&g) - e0).abs() <= 1e-12 * e0);
        prop_assert!((div_b(&a, &g) - div_b(&em, &g)).abs() <= 1e-11);
    }
}

/// Classical RK4 on the source-free field equations.
fn rk4(em: &EMField, g: &SpatialGrid, f: &DistributionPair, vg: &VelocityGrid, t: f64, steps: usize) -> EMField {
    let h = t / steps as f64;
    let add = |a: &EMField, k: &EMField, c: f64| {
        let mut out = a.clone();
        for (x, y) in out.e.iter_mut().chain(out.b.iter_mut()).zip(k.e.iter().chain(k.b.iter())) {
            x.iter_mut().zip(y).for_each(|(p, q)| *p += q * c);
        }
        out
    };
    let mut y = em.clone();
    for _ in 0..steps {
        let k1 = field_rhs(&y, f, g, vg).unwrap();
        let k2 = field_rhs(&add(&y, &k1, 0.5 * h), f, g, vg).unwrap();
        let k3 = field_rhs(&add(&y, &k2, 0.5 * h), f, g, vg).unwrap();
        let k4 = field_rhs(&add(&y, &k3, h), f, g, vg).unwrap();
        y = add(&y, &k1, h / 6.0);
        y = add(&y, &k2, h / 3.0);
        y = add(&y, &k3, h / 3.0);
        y = add(&y, &k4, h / 6.0);
    }
    y
}

#[test]
fn vacuum_rotation_matches_time_stepping() {
    let g = SpatialGrid::new(4, 2.0 * PI, [true, true, false]).unwrap();
    let vg = VelocityGrid::new(2, 1.0).unwrap();
    let f = DistributionPair::for_grids(&g, &vg, Representation::Fourier);
    let em = random_em(g.len(), 7);
    let mut exact = em.clone();
    vacuum_rotate(&mut exact, &g, 1.3);
    let num = rk4(&em, &g, &f, &vg, 1.3, 400);
    for (x, y) in exact.e.iter().chain(&exact.b).flatten().zip(num.e.iter().chain(&num.b).flatten()) {
        assert!((x - y).norm() < 1e-9, "{x} vs {y}");
    }
}

#[test]
fn compatible_fields_satisfy_the_constraints() {
    let g = SpatialGrid::one_d(8, 4.0 * PI).unwrap();
    let vg = VelocityGrid::new(4, 3.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut f = DistributionPair::for_grids(&g, &vg, Representation::Fourier);
    for z in f.values_mut() {
        *z = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
    }
    // neutral zero mode: equal species there
    let zero = (0..g.len()).find(|&m| g.kappa_abs(m) == 0.0).unwrap();
    let plus = f.slice(0, zero).to_vec();
    f.slice_mut(1, zero).copy_from_slice(&plus);
    let em = make_compatible(&random_em(g.len(), 4), &f, &g, &vg).unwrap();
    assert!(gauss_residual(&em, &f, &g, &vg).unwrap() < 1e-13);
    assert!(div_b(&em, &g) < 1e-13);

    f.slice_mut(1, zero)[0] += C64::new(1.0, 0.0);
    assert!(make_compatible(&em, &f, &g, &vg).is_err());
}
