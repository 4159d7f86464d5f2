//! Run orchestration: manifest, diagnostics CSV, report JSON and
//! checkpoints for one configuration.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use vml_core::diagnostics::{
    interpolation_monitor, late_exponential_rate, lyapunov_monitor, run_with_reports, x_functional, LyapunovStep,
};
use vml_core::evolve::{checkpoint, y0_functional};
use vml_core::{decay_fit, initial_state, DecayFit, FunctionalReport, Model, PhaseState, RunConfig, RunOutput, VmlError};

use crate::config::manifest;
use crate::error::{CliError, Result};

pub const TORUS_CAVEAT: &str = "Periodic box: the smallest nonzero wavenumber 2*pi/L gives the linearized flow a \
spectral gap, so every functional eventually decays exponentially. The whole-space rates (1+t)^-(k+s) can only \
appear on an intermediate window before that regime; the fitted exponents below refer to that window and the late \
exponential rates to the tail.";

#[derive(Debug, Clone, Serialize)]
pub struct FitEntry {
    pub column: String,
    pub k: usize,
    pub fit: Option<DecayFit>,
    pub error: Option<String>,
    /// Exponential rate over the trailing part of the series.
    pub late_rate: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct LyapunovSummary {
    pub steps: usize,
    pub flagged: usize,
    /// Largest `delta / allowance` over steps and functionals.
    pub worst_ratio: f64,
    pub max_delta: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub version: String,
    pub steps: usize,
    pub t_final: f64,
    pub y0: f64,
    pub x_final: f64,
    pub lyapunov: LyapunovSummary,
    pub max_gauss_residual: f64,
    pub max_div_b: f64,
    pub fits: Vec<FitEntry>,
    /// Largest interpolation ratio per `k`.
    pub interpolation_max: Vec<f64>,
    pub torus_caveat: String,
}

pub struct RunSummary {
    pub report: RunReport,
    pub output: RunOutput,
    pub final_state: PhaseState,
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|e| CliError::io(path, e))
}

fn checkpoint_dir(out: &Path) -> Result<PathBuf> {
    let dir = out.join("checkpoints");
    fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
    Ok(dir)
}

fn lyapunov_summary(steps: &[LyapunovStep]) -> LyapunovSummary {
    let mut worst = f64::NEG_INFINITY;
    let mut max_delta = f64::NEG_INFINITY;
    for s in steps {
        for (d, a) in s.delta.iter().zip(&s.allowance) {
            max_delta = max_delta.max(*d);
            if *a > 0.0 {
                worst = worst.max(d / a);
            }
        }
    }
    LyapunovSummary {
        steps: steps.len(),
        flagged: steps.iter().filter(|s| s.flagged).count(),
        worst_ratio: worst,
        max_delta,
    }
}

/// CSV text, one row per report, every value with 17 significant digits.
pub fn diagnostics_csv(cfg: &RunConfig, reports: &[FunctionalReport], lyap: &[LyapunovStep]) -> Result<String> {
    let k_max = cfg.diagnostics.k_max;
    let s = cfg.physics.s_exp;
    let x = x_functional(reports);
    let interp: Vec<Vec<f64>> = (0..=k_max).map(|k| interpolation_monitor(reports, k, s)).collect();
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(FunctionalReport::csv_header(k_max))?;
    let mut next = 0;
    for (i, r) in reports.iter().enumerate() {
        // Lyapunov steps ending in (previous report, this report]
        let mut delta = 0.0;
        let mut flag = false;
        while next < lyap.len() && lyap[next].t <= r.t + 1e-9 * cfg.integrator.dt {
            delta = lyap[next].delta[0];
            flag |= lyap[next].flagged;
            next += 1;
        }
        let ratios: Vec<f64> = interp.iter().map(|v| v[i]).collect();
        let row = r.csv_values(x[i], delta, flag, &ratios);
        w.write_record(row.iter().map(|v| format!("{v:.16e}")))?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Csv(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Csv(e.to_string()))
}

fn fits(cfg: &RunConfig, reports: &[FunctionalReport]) -> Vec<FitEntry> {
    let d = &cfg.diagnostics;
    let t: Vec<f64> = reports.iter().map(|r| r.t).collect();
    (0..=d.k_max)
        .map(|k| {
            let v: Vec<f64> = reports.iter().map(|r| r.e_k[k]).collect();
            let fit = decay_fit(&t, &v, None, k, cfg.physics.s_exp, d.fit_threshold, d.fit_min_span);
            FitEntry {
                column: format!("e_k{k}"),
                k,
                error: fit.as_ref().err().map(|e| e.to_string()),
                fit: fit.ok(),
                late_rate: late_exponential_rate(&t, &v, d.late_fraction).ok(),
            }
        })
        .collect()
}

/// Run `cfg` and write `manifest.cfg`, `diagnostics.csv`, `report.json` and
/// checkpoints under `out`. A non-finite state writes
/// `checkpoints/last_good.bin` before the error is returned.
pub fn simulate(cfg: &RunConfig, out: &Path, log: &mut dyn Write) -> Result<RunSummary> {
    fs::create_dir_all(out).map_err(|e| CliError::io(out, e))?;
    write_file(&out.join("manifest.cfg"), manifest(cfg)?.as_bytes())?;
    let model = Model::new(cfg)?;
    let (sg, vg) = (model.spatial(), model.velocity());
    let state = initial_state(&model)?;
    let y0 = y0_functional(&state.f, &state.em, &model)?;
    let every = cfg.output.checkpoint_every;
    let total = cfg.n_steps();
    let _ = writeln!(log, "running {total} steps, dt = {}, Y0 = {y0:.6e}", cfg.integrator.dt);
    let result = run_with_reports(&model, state, |s, step| {
        if every > 0 && step % every == 0 {
            let path = checkpoint_dir(out).map_err(|e| VmlError::Format(e.to_string()))?;
            checkpoint::save(&path.join(format!("step_{step:08}.bin")), s, sg, vg)?;
        }
        Ok(())
    });
    let (final_state, output) = match result {
        Ok(v) => v,
        Err(VmlError::NonFinite { t, last_good }) => {
            let path = checkpoint_dir(out)?.join("last_good.bin");
            checkpoint::save(&path, &last_good, sg, vg)?;
            let _ = writeln!(log, "non-finite state after t = {t}; last good state in {}", path.display());
            return Err(VmlError::NonFinite { t, last_good }.into());
        }
        Err(e) => return Err(e.into()),
    };
    if cfg.output.final_checkpoint {
        checkpoint::save(&checkpoint_dir(out)?.join("final.bin"), &final_state, sg, vg)?;
    }
    let lyap = lyapunov_monitor(&output.lyapunov, cfg.diagnostics.allowance);
    write_file(&out.join("diagnostics.csv"), diagnostics_csv(cfg, &output.reports, &lyap)?.as_bytes())?;

    let reports = &output.reports;
    let report = RunReport {
        version: env!("CARGO_PKG_VERSION").to_string(),
        steps: total,
        t_final: final_state.t,
        y0,
        x_final: x_functional(reports).last().copied().unwrap_or(0.0),
        lyapunov: lyapunov_summary(&lyap),
        max_gauss_residual: reports.iter().map(|r| r.gauss_residual).fold(0.0, f64::max),
        max_div_b: reports.iter().map(|r| r.div_b).fold(0.0, f64::max),
        fits: fits(cfg, reports),
        interpolation_max: (0..=cfg.diagnostics.k_max)
            .map(|k| interpolation_monitor(reports, k, cfg.physics.s_exp).into_iter().fold(0.0, f64::max))
            .collect(),
        torus_caveat: TORUS_CAVEAT.to_string(),
    };
    let json = serde_json::to_string_pretty(&report).map_err(|e| CliError::Csv(e.to_string()))?;
    write_file(&out.join("report.json"), json.as_bytes())?;
    print_summary(&report, log);
    Ok(RunSummary {
        report,
        output,
        final_state,
    })
}

pub fn print_summary(r: &RunReport, log: &mut dyn Write) {
    let _ = writeln!(log, "t = {:.4}, {} steps, X = {:.6e}", r.t_final, r.steps, r.x_final);
    let l = &r.lyapunov;
    let _ = writeln!(
        log,
        "lyapunov: {} flagged of {} steps, worst delta/allowance {:.3e}",
        l.flagged, l.steps, l.worst_ratio
    );
    let _ = writeln!(log, "constraints: gauss <= {:.3e}, div B <= {:.3e}", r.max_gauss_residual, r.max_div_b);
    for f in &r.fits {
        match &f.fit {
            Some(fit) => {
                let _ = writeln!(
                    log,
                    "{}: exponent {:+.4} on [{}, {}] (target {:+.2}, residual {:.3e}{})",
                    f.column,
                    fit.exponent,
                    fit.window.0,
                    fit.window.1,
                    fit.target,
                    fit.residual,
                    if fit.meaningful { "" } else { ", not meaningful" }
                );
            }
            None => {
                let _ = writeln!(log, "{}: no fit ({})", f.column, f.error.as_deref().unwrap_or("?"));
            }
        }
        if let Some(rate) = f.late_rate {
            let _ = writeln!(log, "{}: late exponential rate {rate:.4e}", f.column);
        }
    }
    let _ = writeln!(log, "note: {}", r.torus_caveat);
}
