//! Run configuration files: TOML with the sections `grids`, `physics`,
//! `integrator`, `diagnostics` and `output`, plus `section.key=value`
//! overrides from the command line.

use std::path::Path;

use vml_core::RunConfig;

use crate::error::{CliError, Result};

/// Version of the diagnostics CSV column layout.
pub const CSV_SCHEMA: u32 = 1;

/// Where the base configuration comes from before overrides apply.
#[derive(Debug, Clone, Default)]
pub struct ConfigSource<'a> {
    pub file: Option<&'a Path>,
    pub preset: Option<&'a str>,
    pub overrides: &'a [String],
    pub seed: Option<u64>,
}

pub fn parse_config(text: &str, origin: &str) -> Result<RunConfig> {
    toml::from_str(text).map_err(|e| CliError::Config(format!("{origin}: {e}")))
}

fn parse_value(raw: &str) -> toml::Value {
    // bare words such as `nonlinear` are taken as strings
    let doc = format!("x = {raw}");
    match toml::from_str::<toml::Table>(&doc) {
        Ok(mut t) => t.remove("x").unwrap_or_else(|| toml::Value::String(raw.into())),
        Err(_) => toml::Value::String(raw.into()),
    }
}

/// Apply one `section.key=value` override.
pub fn apply_override(cfg: &RunConfig, spec: &str) -> Result<RunConfig> {
    let (path, raw) = spec
        .split_once('=')
        .ok_or_else(|| CliError::Config(format!("override '{spec}': expected section.key=value")))?;
    let (section, key) = path
        .trim()
        .split_once('.')
        .ok_or_else(|| CliError::Config(format!("override '{spec}': key must be section.key")))?;
    let mut table = toml::Table::try_from(cfg).map_err(|e| CliError::Config(e.to_string()))?;
    let sec = table
        .get_mut(section)
        .and_then(|v| v.as_table_mut())
        .ok_or_else(|| CliError::Config(format!("override '{spec}': unknown section '{section}'")))?;
    if !sec.contains_key(key) {
        return Err(CliError::Config(format!("override '{spec}': unknown key '{key}' in [{section}]")));
    }
    let mut value = parse_value(raw.trim());
    // integers are accepted where floats are expected
    if let (Some(toml::Value::Float(_)), toml::Value::Integer(i)) = (sec.get(key), &value) {
        value = toml::Value::Float(*i as f64);
    }
    sec.insert(key.to_string(), value);
    toml::Value::Table(table)
        .try_into()
        .map_err(|e: toml::de::Error| CliError::Config(format!("override '{spec}': {e}")))
}

/// Resolve the configuration: file or preset (default scenario when
/// neither is given), then overrides in order, then the seed, then
/// validation.
pub fn resolve(src: &ConfigSource) -> Result<RunConfig> {
    let mut cfg = match (src.file, src.preset) {
        (Some(_), Some(_)) => return Err(CliError::Usage("--config and --preset are exclusive".into())),
        (Some(path), None) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
            parse_config(&text, &path.display().to_string())?
        }
        (None, Some(name)) => RunConfig::preset(name)?,
        (None, None) => RunConfig::default(),
    };
    for o in src.overrides {
        cfg = apply_override(&cfg, o)?;
    }
    if let Some(seed) = src.seed {
        cfg.physics.seed = seed;
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Manifest text: a comment header followed by the fully resolved config,
/// so the manifest can be fed back as `--config`.
pub fn manifest(cfg: &RunConfig) -> Result<String> {
    let body = toml::to_string(cfg).map_err(|e| CliError::Config(e.to_string()))?;
    Ok(format!(
        "# vml {} resolved configuration\n# csv schema {CSV_SCHEMA}\n\n{body}",
        env!("CARGO_PKG_VERSION")
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn override_round_trip() {
        let c = apply_override(&RunConfig::default(), "physics.mode=nonlinear").unwrap();
        assert_eq!(c.physics.mode, vml_core::evolve::Mode::Nonlinear);
        let c = apply_override(&c, "integrator.dt=1").unwrap();
        assert_eq!(c.integrator.dt, 1.0);
        assert!(apply_override(&c, "physics.nope=1").is_err());
        assert!(apply_override(&c, "grids.n_x=-3").is_err());
    }

    #[test]
    fn manifest_parses_back() {
        let c = RunConfig::preset("relaxation").unwrap();
        let back = parse_config(&manifest(&c).unwrap(), "manifest").unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn unknown_key_reports_line() {
        let err = parse_config("[grids]\nn_x = 8\nbogus = 1\n", "run.cfg").unwrap_err().to_string();
        assert!(err.contains("line 3"), "{err}");
    }
}
