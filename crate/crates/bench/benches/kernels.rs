use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use vml_bench::{sample_pair, short_run};
use vml_core::diagnostics::report;
use vml_core::{build_collision_tables, initial_state, Model, VelocityGrid};

fn collision(c: &mut Criterion) {
    let mut g = c.benchmark_group("collision");
    g.sample_size(20);
    for n in [12usize, 16] {
        let grid = VelocityGrid::new(n, 6.0).unwrap();
        let t = build_collision_tables(&grid, -3.0).unwrap();
        let f = sample_pair(&grid);
        g.bench_function(format!("apply_l n_v={n}"), |b| b.iter(|| black_box(t.apply_l(black_box(&f)))));
        g.bench_function(format!("apply_gamma n_v={n}"), |b| {
            b.iter(|| black_box(t.apply_gamma(black_box(&f), black_box(&f))))
        });
    }
    let grid = VelocityGrid::new(12, 6.0).unwrap();
    g.bench_function("build tables n_v=12", |b| b.iter(|| black_box(build_collision_tables(&grid, -3.0).unwrap())));
    g.finish();
}

fn stepping(c: &mut Criterion) {
    let mut g = c.benchmark_group("evolve");
    g.sample_size(10);
    let cfg = short_run(1);
    let model = Model::new(&cfg).unwrap();
    let s0 = initial_state(&model).unwrap();
    g.bench_function("strang step, default scenario", |b| {
        b.iter(|| {
            let mut s = s0.clone();
            black_box(model.step(&mut s, cfg.integrator.dt).unwrap())
        })
    });
    g.bench_function("transport half-step", |b| {
        b.iter(|| {
            let mut s = s0.clone();
            model.transport(&mut s, 0.5 * cfg.integrator.dt);
            black_box(s)
        })
    });
    g.bench_function("functional report", |b| b.iter(|| black_box(report(&model, &s0).unwrap())));
    g.finish();
}

criterion_group!(benches, collision, stepping);
criterion_main!(benches);
