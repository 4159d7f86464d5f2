use vml_core::diagnostics::{report, run_with_reports};
use vml_core::evolve::{checkpoint, run, y0_functional, Mode};
use vml_core::{initial_state, Model, PhaseState, RunConfig, VmlError};

fn small(mode: Mode) -> RunConfig {
    let mut c = RunConfig::preset("small-broadband").unwrap();
    c.physics.mode = mode;
    c.physics.amplitude = 0.05;
    c.integrator.t_end = 0.6;
    c
}

/// `‖a − b‖` over `f`, `E` and `B`.
fn distance(a: &PhaseState, b: &PhaseState) -> f64 {
    let f: f64 = a.f.values().iter().zip(b.f.values()).map(|(x, y)| (x - y).norm_sqr()).sum();
    let em: f64 = a
        .em
        .e
        .iter()
        .chain(&a.em.b)
        .flatten()
        .zip(b.em.e.iter().chain(&b.em.b).flatten())
        .map(|(x, y)| (x - y).norm_sqr())
        .sum();
    (f + em).sqrt()
}

#[test]
fn zero_data_stays_zero() {
    let cfg = RunConfig::preset("zero").unwrap();
    let model = Model::new(&cfg).unwrap();
    let end = run(&model, initial_state(&model).unwrap(), |_, _| Ok(())).unwrap();
    assert!(end.f.values().iter().all(|z| z.norm() == 0.0));
    assert_eq!(end.em.energy(model.spatial()), 0.0);
    assert!((end.t - cfg.integrator.t_end).abs() < 1e-12);
}

#[test]
fn collision_step_dissipates_exactly_what_it_reports() {
    // trapezoid: ‖f¹‖² − ‖f⁰‖² = −2 dt ⟨L f̄, f̄⟩
    let mut cfg = RunConfig::preset("relaxation").unwrap();
    cfg.grids.n_v = 12;
    cfg.integrator.solver_tol = 1e-13;
    let model = Model::new(&cfg).unwrap();
    let dt = cfg.integrator.dt;
    let mut s = initial_state(&model).unwrap();
    let mut prev = report(&model, &s).unwrap().f_norm2;
    for _ in 0..8 {
        let info = model.step(&mut s, dt).unwrap();
        let now = report(&model, &s).unwrap().f_norm2;
        let d: f64 = info.dissipation.iter().sum();
        assert!(d > 0.0);
        assert!(now < prev);
        assert!(((now - prev) + 2.0 * dt * d).abs() <= 1e-9 * prev, "{} vs {}", now - prev, -2.0 * dt * d);
        prev = now;
    }
}

fn consistency_error(model: &Model, s0: &PhaseState, dt: f64) -> (f64, f64) {
    let rhs = model.rhs_full(s0).unwrap();
    let mut s = s0.clone();
    model.step(&mut s, dt).unwrap();
    let mut expect = s0.clone();
    expect.f.axpy(dt, &rhs.f);
    for (x, y) in expect.em.e.iter_mut().chain(expect.em.b.iter_mut()).zip(rhs.em.e.iter().chain(&rhs.em.b)) {
        x.iter_mut().zip(y).for_each(|(p, q)| *p += q * dt);
    }
    let scale = distance(&expect, s0) / dt;
    (distance(&s, &expect) / dt, scale)
}

#[test]
fn split_step_is_consistent_with_the_full_right_hand_side() {
    for mode in [Mode::Linearized, Mode::Nonlinear] {
        let cfg = small(mode);
        let model = Model::new(&cfg).unwrap();
        let s0 = initial_state(&model).unwrap();
        let (e1, scale) = consistency_error(&model, &s0, 0.01);
        let (e2, _) = consistency_error(&model, &s0, 0.005);
        let ratio = e2 / e1;
        assert!(e1 < 0.05 * scale, "{mode:?}: {e1} vs {scale}");
        assert!((0.4..0.6).contains(&ratio), "{mode:?}: error ratio {ratio}");
    }
}

#[test]
fn runs_are_deterministic() {
    let cfg = small(Mode::Nonlinear);
    let model = Model::new(&cfg).unwrap();
    let a = run(&model, initial_state(&model).unwrap(), |_, _| Ok(())).unwrap();
    let b = run(&model, initial_state(&model).unwrap(), |_, _| Ok(())).unwrap();
    assert_eq!(a, b);
    let mut other = cfg.clone();
    other.physics.seed += 1;
    let m2 = Model::new(&other).unwrap();
    assert_ne!(initial_state(&m2).unwrap(), initial_state(&model).unwrap());
}

#[test]
fn resume_from_checkpoint_is_bit_exact() {
    let cfg = small(Mode::Nonlinear);
    let model = Model::new(&cfg).unwrap();
    let (full, out) = run_with_reports(&model, initial_state(&model).unwrap(), |_, _| Ok(())).unwrap();

    let mut half = cfg.clone();
    half.integrator.t_end = 0.3;
    let hm = Model::new(&half).unwrap();
    let mid = run(&hm, initial_state(&hm).unwrap(), |_, _| Ok(())).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("mid.bin");
    checkpoint::save(&path, &mid, model.spatial(), model.velocity()).unwrap();
    let loaded = checkpoint::load(&path, model.spatial(), model.velocity()).unwrap();
    assert_eq!(loaded, mid);

    let (resumed, out2) = run_with_reports(&model, loaded, |_, _| Ok(())).unwrap();
    assert_eq!(resumed, full);
    let tail = &out.reports[out.reports.len() - out2.reports.len()..];
    assert_eq!(tail, &out2.reports[..]);
}

#[test]
fn checkpoint_rejects_other_grids() {
    let cfg = small(Mode::Linearized);
    let model = Model::new(&cfg).unwrap();
    let s = initial_state(&model).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.bin");
    checkpoint::save(&path, &s, model.spatial(), model.velocity()).unwrap();
    let mut other = cfg.clone();
    other.grids.n_v = 8;
    let om = Model::new(&other).unwrap();
    assert!(checkpoint::load(&path, om.spatial(), om.velocity()).is_err());
    std::fs::write(&path, b"not a checkpoint").unwrap();
    assert!(matches!(
        checkpoint::load(&path, model.spatial(), model.velocity()),
        Err(VmlError::Format(_) | VmlError::Io(_))
    ));
}

#[test]
fn y0_is_homogeneous_of_degree_one() {
    let mut cfg = small(Mode::Linearized);
    let mut values = Vec::new();
    for amp in [1e-3, 2e-3, 8e-3] {
        cfg.physics.amplitude = amp;
        let model = Model::new(&cfg).unwrap();
        let s = initial_state(&model).unwrap();
        values.push(y0_functional(&s.f, &s.em, &model).unwrap() / amp);
    }
    for v in &values[1..] {
        assert!((v / values[0] - 1.0).abs() < 1e-12, "{values:?}");
    }
}
