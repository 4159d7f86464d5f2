//! Post-processing verbs: decay fits on diagnostics CSV columns, functional
//! reports of checkpoints and collision-table builds.

use std::path::Path;
use std::time::Instant;

use serde::Serialize;
use vml_core::diagnostics::{late_exponential_rate, report};
use vml_core::evolve::checkpoint;
use vml_core::landau::cache;
use vml_core::{decay_fit, build_collision_tables, DecayFit, FunctionalReport, Model, RunConfig, VelocityGrid};

use crate::error::{CliError, Result};

/// Read column `name` together with `t` from a diagnostics CSV.
pub fn read_column(path: &Path, name: &str) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut r = csv::Reader::from_path(path).map_err(|e| CliError::Csv(format!("{}: {e}", path.display())))?;
    let headers = r.headers()?.clone();
    let find = |col: &str| {
        headers
            .iter()
            .position(|h| h == col)
            .ok_or_else(|| CliError::Csv(format!("{}: no column '{col}'", path.display())))
    };
    let (it, ic) = (find("t")?, find(name)?);
    let mut t = Vec::new();
    let mut v = Vec::new();
    for (row, rec) in r.records().enumerate() {
        let rec = rec?;
        let parse = |i: usize| {
            rec[i]
                .trim()
                .parse::<f64>()
                .map_err(|e| CliError::Csv(format!("{}: row {}: {e}", path.display(), row + 2)))
        };
        t.push(parse(it)?);
        v.push(parse(ic)?);
    }
    Ok((t, v))
}

#[derive(Debug, Clone, Serialize)]
pub struct FitOutput {
    pub column: String,
    pub k: usize,
    pub s: f64,
    #[serde(flatten)]
    pub fit: DecayFit,
    pub verdict: String,
    pub late_rate: Option<f64>,
}

pub struct FitRequest<'a> {
    pub csv: &'a Path,
    pub column: &'a str,
    pub window: Option<(f64, f64)>,
    pub k: usize,
    pub s: f64,
    pub threshold: f64,
    pub min_span: f64,
    /// Allowed distance between the exponent and `−(k+s)`.
    pub tol: f64,
}

pub fn fit_decay(req: &FitRequest) -> Result<FitOutput> {
    let (t, v) = read_column(req.csv, req.column)?;
    let fit = decay_fit(&t, &v, req.window, req.k, req.s, req.threshold, req.min_span)?;
    let verdict = if !fit.meaningful {
        "not a power law on this window".to_string()
    } else if fit.meets_target(req.tol) {
        format!("matches -(k+s) = {:.3} within {}", fit.target, req.tol)
    } else {
        format!("differs from -(k+s) = {:.3} by more than {}", fit.target, req.tol)
    };
    Ok(FitOutput {
        column: req.column.to_string(),
        k: req.k,
        s: req.s,
        late_rate: late_exponential_rate(&t, &v, 0.25).ok(),
        fit,
        verdict,
    })
}

/// Parse `a:b` into a window.
pub fn parse_window(s: &str) -> Result<(f64, f64)> {
    let bad = || CliError::Usage(format!("window '{s}': expected start:end"));
    let (a, b) = s.split_once(':').ok_or_else(bad)?;
    let a: f64 = a.trim().parse().map_err(|_| bad())?;
    let b: f64 = b.trim().parse().map_err(|_| bad())?;
    if !(b > a) {
        return Err(bad());
    }
    Ok((a, b))
}

/// Every functional of a checkpointed state.
pub fn norms(cfg: &RunConfig, path: &Path) -> Result<FunctionalReport> {
    let model = Model::new(cfg)?;
    let state = checkpoint::load(path, model.spatial(), model.velocity())?;
    Ok(report(&model, &state)?)
}

#[derive(Debug, Clone, Serialize)]
pub struct TablesSummary {
    pub n_v: usize,
    pub v_max: f64,
    pub gamma: f64,
    pub seconds: f64,
    /// `σ(0)` diagonal.
    pub sigma_origin: f64,
    pub file: Option<String>,
}

/// Build the collision tables of the configured velocity grid, caching
/// them under `dir` when given.
pub fn tables(cfg: &RunConfig, dir: Option<&Path>) -> Result<TablesSummary> {
    let g = VelocityGrid::new(cfg.grids.n_v, cfg.grids.v_max)?;
    let start = Instant::now();
    let t = match dir {
        Some(d) => {
            std::fs::create_dir_all(d).map_err(|e| CliError::io(d, e))?;
            cache::load_or_build(d, &g, cfg.physics.gamma)?
        }
        None => build_collision_tables(&g, cfg.physics.gamma)?,
    };
    let seconds = start.elapsed().as_secs_f64();
    let n = g.n_v();
    // node n/2 on each axis sits at v = 0
    let o = g.index(n / 2, n / 2, n / 2);
    Ok(TablesSummary {
        n_v: n,
        v_max: g.v_max(),
        gamma: cfg.physics.gamma,
        seconds,
        sigma_origin: t.sigma()[o][0],
        file: dir.map(|d| d.join(cache::cache_file_name(&g, cfg.physics.gamma)).display().to_string()),
    })
}
