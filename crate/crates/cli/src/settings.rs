//! Config file values and their merge with flags and defaults.

use std::path::Path;

use serde::Deserialize;

use crate::error::{CliError, CliResult};
use crate::io::Format;

/// A grid written either as a TOML array or as `a,b,c` / `start:stop:step`.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum GridValue {
    List(Vec<f64>),
    One(f64),
    Text(String),
}

impl GridValue {
    pub fn resolve(&self) -> CliResult<Vec<f64>> {
        match self {
            GridValue::List(v) => Ok(v.clone()),
            GridValue::One(x) => Ok(vec![*x]),
            GridValue::Text(s) => parse_grid(s),
        }
    }
}

/// Flat table of defaults, keyed like the long flags with `_` for `-`.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub format: Option<Format>,
    pub jobs: Option<usize>,
    pub input: Option<String>,
    pub alpha: Option<f64>,
    pub hurst: Option<f64>,
    pub sigma: Option<f64>,
    pub dt: Option<f64>,
    pub horizon: Option<f64>,
    pub truncation: Option<f64>,
    pub seed: Option<u64>,
    pub every: Option<usize>,
    pub tau0: Option<f64>,
    pub theta_grid: Option<GridValue>,
    pub tau_grid: Option<GridValue>,
    pub t: Option<usize>,
    pub d: Option<GridValue>,
    pub tol: Option<f64>,
    pub solver: Option<String>,
    pub alpha_grid: Option<GridValue>,
    pub hurst_grid: Option<GridValue>,
    pub length: Option<usize>,
    pub spacing: Option<f64>,
    pub window: Option<usize>,
    pub step: Option<usize>,
    pub stride: Option<usize>,
    pub reproduce: Option<ReproduceConfig>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReproduceConfig {
    pub seed: u64,
    pub frontier: FrontierScan,
    pub hit_ratio_by_hurst: HurstScan,
    pub hit_ratio_by_alpha: AlphaScan,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrontierScan {
    pub alpha_grid: GridValue,
    pub hurst_grid: GridValue,
    pub t: usize,
    pub d: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HurstScan {
    pub alpha: f64,
    pub hurst_grid: GridValue,
    pub d: Vec<usize>,
    pub length: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlphaScan {
    pub hurst: f64,
    pub alpha_grid: GridValue,
    pub d: Vec<usize>,
    pub length: usize,
}

impl FileConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::input(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| CliError::input(format!("config {}: {e}", path.display())))
    }

    pub fn parse(text: &str) -> Result<Self, toml::de::Error> {
        toml::from_str(text)
    }
}

/// Flag, then config file, then default.
pub fn pick<T>(flag: Option<T>, file: Option<T>, default: T) -> T {
    flag.or(file).unwrap_or(default)
}

/// Flag grid, then config grid, then `default`.
pub fn pick_grid(flag: Option<&str>, file: Option<&GridValue>, default: &[f64]) -> CliResult<Vec<f64>> {
    match (flag, file) {
        (Some(s), _) => parse_grid(s),
        (None, Some(g)) => g.resolve(),
        (None, None) => Ok(default.to_vec()),
    }
}

/// As [`pick_grid`] for positive integer lists.
pub fn pick_dims(flag: Option<&str>, file: Option<&GridValue>, default: &[usize]) -> CliResult<Vec<usize>> {
    let fallback: Vec<f64> = default.iter().map(|&d| d as f64).collect();
    pick_grid(flag, file, &fallback)?
        .into_iter()
        .map(|x| {
            if x >= 1.0 && x.fract() == 0.0 {
                Ok(x as usize)
            } else {
                Err(CliError::input(format!("dimension {x} is not a positive integer")))
            }
        })
        .collect()
}

/// `a,b,c` or an inclusive `start:stop:step` range (`start:stop` steps by 1).
pub fn parse_grid(s: &str) -> CliResult<Vec<f64>> {
    let bad = || CliError::input(format!("cannot parse grid `{s}`"));
    let s = s.trim();
    if s.contains(':') {
        let parts: Vec<f64> = s
            .split(':')
            .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
            .collect::<CliResult<_>>()?;
        let (start, stop, step) = match parts[..] {
            [a, b] => (a, b, 1.0),
            [a, b, c] => (a, b, c),
            _ => return Err(bad()),
        };
        if !(step > 0.0) || !(stop >= start) || !start.is_finite() || !stop.is_finite() {
            return Err(bad());
        }
        let n = ((stop - start) / step + 1e-9).floor() as usize;
        // k * step keeps values like 0.3 exact to round-off
        return Ok((0..=n).map(|k| start + k as f64 * step).map(round_grid).collect());
    }
    let out: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
        .collect::<CliResult<_>>()?;
    if out.is_empty() || out.iter().any(|x| !x.is_finite()) {
        return Err(bad());
    }
    Ok(out)
}

fn round_grid(x: f64) -> f64 {
    (x * 1e12).round() / 1e12
}
