use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use vml_cli::config::{resolve, ConfigSource};
use vml_cli::export::{fit_decay, norms, parse_window, tables, FitRequest};
use vml_cli::simulate::simulate;
use vml_cli::verify::{expand, run_suites, SUITES};
use vml_cli::{CliError, Result};

#[derive(Parser)]
#[command(name = "vml", version, about = "Two-species Vlasov-Maxwell-Landau perturbation simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct ConfigArgs {
    /// TOML run configuration
    #[arg(long)]
    config: Option<PathBuf>,
    /// Named scenario (zero, relaxation, vacuum-maxwell, default-linearized, small-broadband)
    #[arg(long, conflicts_with = "config")]
    preset: Option<String>,
    /// Override one value, e.g. --set integrator.dt=0.1 (repeatable)
    #[arg(long = "set", value_name = "SECTION.KEY=VALUE")]
    overrides: Vec<String>,
    /// Seed of the initial data
    #[arg(long)]
    seed: Option<u64>,
}

impl ConfigArgs {
    fn resolve(&self) -> Result<vml_core::RunConfig> {
        resolve(&ConfigSource {
            file: self.config.as_deref(),
            preset: self.preset.as_deref(),
            overrides: &self.overrides,
            seed: self.seed,
        })
    }
}

#[derive(Subcommand)]
enum Command {
    /// Integrate a scenario and write manifest, diagnostics and checkpoints
    Simulate {
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(long, default_value = "vml-out")]
        out: PathBuf,
    },
    /// Run property suites: operator, projection, maxwell, transforms or all
    Verify {
        #[arg(default_value = "all")]
        suite: String,
        /// Suites run concurrently
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Write the machine-readable report here
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Fit (1+t)^p to one diagnostics column
    FitDecay {
        csv: PathBuf,
        #[arg(long, default_value = "e_k0")]
        column: String,
        /// start:end; chosen automatically when omitted
        #[arg(long)]
        window: Option<String>,
        #[arg(long, default_value_t = 0)]
        k: usize,
        #[arg(long, default_value_t = 0.5)]
        s: f64,
        #[arg(long, default_value_t = 0.05)]
        threshold: f64,
        #[arg(long, default_value_t = 4.0)]
        min_span: f64,
        #[arg(long, default_value_t = 0.3)]
        tol: f64,
    },
    /// Evaluate every functional on a checkpoint
    Norms {
        checkpoint: PathBuf,
        #[command(flatten)]
        cfg: ConfigArgs,
    },
    /// Build (and optionally cache) the collision tables of a configuration
    Tables {
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(long)]
        cache: Option<PathBuf>,
    },
}

fn to_json<T: serde::Serialize>(v: &T) -> Result<String> {
    serde_json::to_string_pretty(v).map_err(|e| CliError::Usage(e.to_string()))
}

fn execute(cmd: Command) -> Result<ExitCode> {
    let mut stdout = std::io::stdout();
    match cmd {
        Command::Simulate { cfg, out } => {
            let c = cfg.resolve()?;
            simulate(&c, &out, &mut stdout)?;
            println!("outputs in {}", out.display());
        }
        Command::Verify { suite, jobs, json } => {
            let names = expand(&suite);
            if names.is_empty() {
                return Err(CliError::Usage(format!(
                    "unknown suite '{suite}' (known: {}, all)",
                    SUITES.join(", ")
                )));
            }
            let checks = run_suites(&names, jobs)?;
            for c in &checks {
                println!("{}", c.line());
            }
            let failed = checks.iter().filter(|c| !c.passed).count();
            println!("{} checks, {failed} failed", checks.len());
            if let Some(path) = json {
                std::fs::write(&path, to_json(&checks)?).map_err(|e| CliError::io(&path, e))?;
            }
            if failed > 0 {
                return Ok(ExitCode::from(1));
            }
        }
        Command::FitDecay {
            csv,
            column,
            window,
            k,
            s,
            threshold,
            min_span,
            tol,
        } => {
            let window = window.as_deref().map(parse_window).transpose()?;
            let out = fit_decay(&FitRequest {
                csv: &csv,
                column: &column,
                window,
                k,
                s,
                threshold,
                min_span,
                tol,
            })?;
            println!(
                "{}: exponent {:+.4} on [{}, {}], residual {:.3e}, target {:+.3}: {}",
                out.column, out.fit.exponent, out.fit.window.0, out.fit.window.1, out.fit.residual, out.fit.target, out.verdict
            );
            println!("{}", to_json(&out)?);
        }
        Command::Norms { checkpoint, cfg } => {
            let r = norms(&cfg.resolve()?, &checkpoint)?;
            println!("{}", to_json(&r)?);
        }
        Command::Tables { cfg, cache } => {
            let s = tables(&cfg.resolve()?, cache.as_deref())?;
            println!("{}", to_json(&s)?);
        }
    }
    let _ = stdout.flush();
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
