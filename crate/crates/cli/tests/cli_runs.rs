use std::path::Path;
use std::process::{Command, Output};

use vml_cli::export::read_column;

fn vml(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vml")).args(args).output().expect("spawn vml")
}

fn text(o: &Output) -> String {
    format!("{}{}", String::from_utf8_lossy(&o.stdout), String::from_utf8_lossy(&o.stderr))
}

fn simulate(out: &Path, args: &[&str]) -> Output {
    let mut all = vec!["simulate", "--out", out.to_str().unwrap()];
    all.extend_from_slice(args);
    let o = vml(&all);
    assert!(o.status.success(), "{}", text(&o));
    o
}

#[test]
fn relaxation_energy_decreases() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    simulate(&out, &["--preset", "relaxation", "--set", "grids.n_v=12"]);
    let (t, f) = read_column(&out.join("diagnostics.csv"), "f_norm2").unwrap();
    assert_eq!(t.len(), 21);
    assert!(f.windows(2).all(|w| w[1] < w[0]), "{f:?}");
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["lyapunov"]["flagged"], 0);
    assert!(report["torus_caveat"].as_str().unwrap().contains("spectral gap"));
    assert!(out.join("checkpoints/final.bin").exists());
}

#[test]
fn vacuum_field_energy_is_constant() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    simulate(&out, &["--preset", "vacuum-maxwell", "--set", "integrator.t_end=5"]);
    let (_, e) = read_column(&out.join("diagnostics.csv"), "field_energy").unwrap();
    assert!(e[0] > 0.0);
    assert!(e.iter().all(|x| (x - e[0]).abs() <= 1e-13 * e[0]), "{e:?}");
}

#[test]
fn manifest_reproduces_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    simulate(&a, &["--preset", "small-broadband", "--set", "physics.mode=nonlinear", "--seed", "11"]);
    let manifest = a.join("manifest.cfg");
    simulate(&b, &["--config", manifest.to_str().unwrap()]);
    let read = |p: &Path| std::fs::read(p).unwrap();
    assert_eq!(read(&a.join("diagnostics.csv")), read(&b.join("diagnostics.csv")));
    assert_eq!(read(&a.join("checkpoints/final.bin")), read(&b.join("checkpoints/final.bin")));
    assert_eq!(read(&manifest), read(&b.join("manifest.cfg")));
}

#[test]
fn norms_of_final_checkpoint_match_last_row() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    simulate(&out, &["--preset", "small-broadband"]);
    let ckpt = out.join("checkpoints/final.bin");
    let o = vml(&["norms", ckpt.to_str().unwrap(), "--preset", "small-broadband"]);
    assert!(o.status.success(), "{}", text(&o));
    let r: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let (_, f) = read_column(&out.join("diagnostics.csv"), "f_norm2").unwrap();
    let got = r["f_norm2"].as_f64().unwrap();
    assert!((got - f.last().unwrap()).abs() <= 1e-15 * got);
}

#[test]
fn configuration_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let o = vml(&["simulate", "--out", out.to_str().unwrap(), "--set", "physics.bogus=1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(text(&o).contains("bogus"));

    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "[grids]\nn_x = 8\n\n[physics]\nwat = 3\n").unwrap();
    let o = vml(&["simulate", "--out", out.to_str().unwrap(), "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let msg = text(&o);
    assert!(msg.contains("wat") && msg.contains("line 5"), "{msg}");

    let o = vml(&["verify", "nonsense"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn blow_up_keeps_the_last_good_state() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let o = vml(&[
        "simulate",
        "--out",
        out.to_str().unwrap(),
        "--preset",
        "small-broadband",
        "--set",
        "physics.mode=nonlinear",
        "--set",
        "physics.amplitude=1e4",
    ]);
    assert_eq!(o.status.code(), Some(3), "{}", text(&o));
    assert!(out.join("checkpoints/last_good.bin").exists());
}

#[test]
fn fit_decay_on_synthetic_series() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("d.csv");
    let mut body = String::from("t,e_k1\n");
    for i in 0..100 {
        let t = i as f64 * 0.5;
        body += &format!("{t},{}\n", 2.0 * (1.0 + t).powf(-1.5));
    }
    std::fs::write(&csv, body).unwrap();
    let o = vml(&["fit-decay", csv.to_str().unwrap(), "--column", "e_k1", "--k", "1"]);
    assert!(o.status.success(), "{}", text(&o));
    let s = text(&o);
    assert!(s.contains("exponent -1.5000") && s.contains("matches"), "{s}");

    let o = vml(&["fit-decay", csv.to_str().unwrap(), "--column", "missing"]);
    assert_eq!(o.status.code(), Some(2));
}
