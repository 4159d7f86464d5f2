use std::f64::consts::PI;
use std::sync::OnceLock;

use proptest::prelude::*;
use vml_core::landau::{assemble_dense_l, hermite_sample, sigma_norm_sq};
use vml_core::{build_collision_tables, CollisionTables, Projection, SigmaNormSpec, VPair, VelocityGrid, C64};

/// Taylor series of erf; accurate to round-off for |x| < 3.
fn erf(x: f64) -> f64 {
    let mut sum = 0.0;
    let mut term = x;
    for n in 0..200 {
        sum += term / (2 * n + 1) as f64;
        term *= -x * x / (n + 1) as f64;
    }
    2.0 / PI.sqrt() * sum
}

/// σ for γ = −3 from the second Rosenbluth potential `g = |·| * μ`:
/// parallel eigenvalue `g''(r)`, transverse `g'(r)/r`.
fn sigma_coulomb(v: [f64; 3]) -> [[f64; 3]; 3] {
    let r = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    let c = (2.0 / PI).sqrt();
    let (par, perp) = if r == 0.0 {
        (2.0 / 3.0 * c, 2.0 / 3.0 * c)
    } else {
        let e = erf(r / 2f64.sqrt());
        let g = (-0.5 * r * r).exp();
        let gp = (1.0 - 1.0 / (r * r)) * e + c * g / r;
        let gpp = 2.0 / r.powi(3) * e - 2.0 * c * g / (r * r);
        (gpp, gp / r)
    };
    let u = if r == 0.0 { [0.0; 3] } else { v.map(|x| x / r) };
    std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            let d = if i == j { 1.0 } else { 0.0 };
            par * u[i] * u[j] + perp * (d - u[i] * u[j])
        })
    })
}

fn sigma_error(n_v: usize) -> f64 {
    let g = VelocityGrid::new(n_v, 6.0).unwrap();
    let t = build_collision_tables(&g, -3.0).unwrap();
    let mut worst: f64 = 0.0;
    for (a, &v) in g.nodes().iter().enumerate() {
        if v.iter().map(|x| x * x).sum::<f64>() > 16.0 {
            continue;
        }
        let want = sigma_coulomb(v);
        let got = t.sigma_matrix(a);
        let mut diff = 0.0;
        let mut norm = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                diff += (got[i][j] - want[i][j]).powi(2);
                norm += want[i][j].powi(2);
            }
        }
        worst = worst.max((diff / norm).sqrt());
    }
    worst
}

#[test]
fn sigma_matches_rosenbluth_potential() {
    let e16 = sigma_error(16);
    let e24 = sigma_error(24);
    assert!(e16 < 0.025, "n_v = 16: {e16}");
    assert!(e24 < 0.6 * e16, "no convergence: {e16} -> {e24}");
}

#[test]
fn quadrature_moments_of_maxwellian() {
    let g = VelocityGrid::new(16, 6.0).unwrap();
    let mu = g.mu();
    // the lattice stops one cell short of +v_max, so the Gaussian tail beyond
    // |v| = 6 (about 1e-8) bounds the error
    assert!((g.integrate(mu) - 1.0).abs() < 1e-7);
    let e: Vec<f64> = g.nodes().iter().zip(mu).map(|(v, m)| (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]) * m).collect();
    assert!((g.integrate(&e) - 3.0).abs() < 1e-6);
    let odd: Vec<f64> = g.nodes().iter().zip(mu).map(|(v, m)| v[0] * m).collect();
    assert!(g.integrate(&odd).abs() < 1e-7);
}

#[test]
fn dense_assembly_matches_matrix_free() {
    let g = VelocityGrid::new(8, 5.0).unwrap();
    let t = build_collision_tables(&g, -3.0).unwrap();
    let dense = assemble_dense_l(&t).unwrap();
    let n = g.len();
    let f = hermite_sample(&g, 3, &(0..40).map(|k| ((k * 7919) % 13) as f64 / 6.0 - 1.0).collect::<Vec<_>>());
    let lf = t.apply_l(&f);
    let flat: Vec<f64> = f[0].iter().chain(&f[1]).map(|z| z.re).collect();
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for i in 0..2 * n {
        let row: f64 = (0..2 * n).map(|j| dense[(i, j)] * flat[j]).sum();
        let mf = lf[i / n][i % n].re;
        worst = worst.max((row - mf).abs());
        scale = scale.max(row.abs());
    }
    assert!(worst <= 1e-10 * scale, "{worst} vs {scale}");
}

#[test]
fn sigma_norm_of_radial_function() {
    // f = e^{−|v|²/4}: ∂_r f = −r f / 2, no transverse gradient
    let gamma = -3.0;
    let g = VelocityGrid::new(24, 6.0).unwrap();
    let t = build_collision_tables(&g, gamma).unwrap();
    let f: Vec<C64> = g.sqrt_mu().iter().map(|&s| C64::new(s, 0.0)).collect();
    let got = sigma_norm_sq(&f, &SigmaNormSpec::unweighted(), &t);
    let want: f64 = g
        .nodes()
        .iter()
        .zip(g.sqrt_mu())
        .map(|(v, s)| {
            let r2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
            let jv = 1.0 + r2;
            jv.powf(0.5 * (gamma + 2.0)) * s * s + jv.powf(0.5 * gamma) * 0.25 * r2 * s * s
        })
        .sum::<f64>()
        * g.quad_weight();
    assert!(((got - want) / want).abs() < 5e-3, "{got} vs {want}");
}

struct Fixture {
    tables: CollisionTables,
    proj: Projection,
}

fn fixture() -> &'static Fixture {
    static F: OnceLock<Fixture> = OnceLock::new();
    F.get_or_init(|| {
        let g = VelocityGrid::new(12, 6.0).unwrap();
        Fixture {
            tables: build_collision_tables(&g, -3.0).unwrap(),
            proj: Projection::new(&g).unwrap(),
        }
    })
}

fn sample(coeffs: &[f64]) -> VPair {
    hermite_sample(fixture().tables.grid(), 2, coeffs)
}

#[test]
fn invariants_span_null_space() {
    let fx = fixture();
    for k in 0..6 {
        let e = fx.proj.basis_pair(k);
        let le = fx.tables.apply_l(&e);
        let a = fx.tables.pair_inner(&le, &le).re.sqrt();
        let b = fx.tables.pair_inner(&e, &e).re.sqrt();
        assert!(a <= 1e-12 * b, "invariant {k}: {a} vs {b}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn l_is_symmetric_and_nonnegative(
        a in prop::collection::vec(-1.0f64..1.0, 20),
        b in prop::collection::vec(-1.0f64..1.0, 20),
    ) {
        let t = &fixture().tables;
        let (f, g) = (sample(&a), sample(&b));
        let lf = t.apply_l(&f);
        let lg = t.apply_l(&g);
        let x = t.pair_inner(&lf, &g).re;
        let y = t.pair_inner(&f, &lg).re;
        let scale = t.pair_inner(&lf, &lf).re.sqrt() * t.pair_inner(&g, &g).re.sqrt();
        prop_assert!((x - y).abs() <= 1e-12 * scale.max(1e-300));
        prop_assert!(t.pair_inner(&lf, &f).re >= -1e-13 * scale.max(1e-300));
    }

    #[test]
    fn projection_is_orthogonal(a in prop::collection::vec(-1.0f64..1.0, 20)) {
        let fx = fixture();
        let f = sample(&a);
        let p = fx.proj.project(&f);
        let pp = fx.proj.project(&p);
        let micro = fx.proj.micro(&f);
        let t = &fx.tables;
        let norm = t.pair_inner(&f, &f).re;
        let diff: VPair = std::array::from_fn(|s| p[s].iter().zip(&pp[s]).map(|(x, y)| x - y).collect());
        prop_assert!(t.pair_inner(&diff, &diff).re <= 1e-26 * norm);
        prop_assert!(t.pair_inner(&p, &micro).norm() <= 1e-13 * norm);
        for k in 0..6 {
            prop_assert!(t.pair_inner(&fx.proj.basis_pair(k), &micro).norm() <= 1e-13 * norm.sqrt());
        }
    }

    #[test]
    fn collision_micro_part_is_dissipated(a in prop::collection::vec(-1.0f64..1.0, 20)) {
        // ⟨Lf, f⟩ only sees {I−P}f
        let fx = fixture();
        let f = sample(&a);
        let micro = fx.proj.micro(&f);
        let t = &fx.tables;
        let whole = t.pair_inner(&t.apply_l(&f), &f).re;
        let part = t.pair_inner(&t.apply_l(&micro), &micro).re;
        prop_assert!((whole - part).abs() <= 1e-10 * whole.abs().max(1e-12));
    }
}
