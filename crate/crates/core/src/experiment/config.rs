use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use super::output::fmt_num;
use crate::states::visibility_for_concurrence;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("config field `{field}`: {message}")]
    Field { field: String, message: String },
    #[error("config file {path}: {message}")]
    File { path: String, message: String },
}

impl ConfigError {
    pub fn field(field: &str, message: impl Into<String>) -> Self {
        ConfigError::Field {
            field: field.to_string(),
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Analytic,
    Tomographic,
}

impl FromStr for Mode {
    type Err = ConfigError;
    fn from_str(s: &str) -> Result<Self, ConfigError> {
        match s {
            "analytic" => Ok(Mode::Analytic),
            "tomographic" => Ok(Mode::Tomographic),
            other => Err(ConfigError::field(
                "mode",
                format!("`{other}` is not one of analytic, tomographic"),
            )),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Analytic => "analytic",
            Mode::Tomographic => "tomographic",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = ConfigError;
    fn from_str(s: &str) -> Result<Self, ConfigError> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(ConfigError::field(
                "format",
                format!("`{other}` is not one of csv, json"),
            )),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Csv => "csv",
            Format::Json => "json",
        })
    }
}

/// Concurrence of the prepared source state used by the default visibility.
pub const DEFAULT_INITIAL_CONCURRENCE: f64 = 0.975;
pub const DEFAULT_FIDELITY: f64 = 0.97;
pub const DEFAULT_COUNTS: u64 = 10_000;
pub const DEFAULT_REPETITIONS: usize = 200;
pub const DEFAULT_SEED: u64 = 1;
pub const DEFAULT_GRID: &str = "0:0.5:0.01";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepConfig {
    pub epsilon_grid: Vec<f64>,
    pub fidelity: f64,
    pub visibility: f64,
    pub mode: Mode,
    pub counts: u64,
    pub repetitions: usize,
    pub seed: u64,
    pub format: Format,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            epsilon_grid: parse_grid(DEFAULT_GRID).expect("default grid"),
            fidelity: DEFAULT_FIDELITY,
            visibility: visibility_for_concurrence(DEFAULT_INITIAL_CONCURRENCE),
            mode: Mode::Analytic,
            counts: DEFAULT_COUNTS,
            repetitions: DEFAULT_REPETITIONS,
            seed: DEFAULT_SEED,
            format: Format::Csv,
        }
    }
}

/// Values that may come from a config file or the command line. `None`
/// leaves the current value untouched.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub epsilon: Option<f64>,
    pub epsilon_grid: Option<String>,
    pub fidelity: Option<f64>,
    pub visibility: Option<f64>,
    pub counts: Option<u64>,
    pub repetitions: Option<usize>,
    pub seed: Option<u64>,
    pub mode: Option<Mode>,
    pub format: Option<Format>,
}

fn parse_field<T: FromStr>(field: &str, value: &str) -> Result<T, ConfigError> {
    value
        .parse()
        .map_err(|_| ConfigError::field(field, format!("cannot parse `{value}`")))
}

impl Overrides {
    /// Parse flat `key = value` lines; `#` starts a comment.
    pub fn parse_key_values(text: &str) -> Result<Overrides, ConfigError> {
        let mut o = Overrides::default();
        for raw in text.lines() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| ConfigError::field(line, "expected key=value"))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "epsilon" => o.epsilon = Some(parse_field(key, value)?),
                "epsilon_grid" | "epsilon-grid" => o.epsilon_grid = Some(value.to_string()),
                "fidelity" => o.fidelity = Some(parse_field(key, value)?),
                "visibility" => o.visibility = Some(parse_field(key, value)?),
                "counts" | "N" => o.counts = Some(parse_field(key, value)?),
                "repetitions" | "reps" => o.repetitions = Some(parse_field(key, value)?),
                "seed" => o.seed = Some(parse_field(key, value)?),
                "mode" => o.mode = Some(value.parse()?),
                "format" => o.format = Some(value.parse()?),
                other => return Err(ConfigError::field(other, "unknown key")),
            }
        }
        Ok(o)
    }

    pub fn from_file(path: &Path) -> Result<Overrides, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::File {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::parse_key_values(&text)
    }

    pub fn apply(&self, cfg: &mut SweepConfig) -> Result<(), ConfigError> {
        if self.epsilon.is_some() && self.epsilon_grid.is_some() {
            return Err(ConfigError::field(
                "epsilon",
                "give either epsilon or epsilon_grid, not both",
            ));
        }
        if let Some(e) = self.epsilon {
            cfg.epsilon_grid = vec![e];
        }
        if let Some(g) = &self.epsilon_grid {
            cfg.epsilon_grid = parse_grid(g)?;
        }
        if let Some(v) = self.fidelity {
            cfg.fidelity = v;
        }
        if let Some(v) = self.visibility {
            cfg.visibility = v;
        }
        if let Some(v) = self.counts {
            cfg.counts = v;
        }
        if let Some(v) = self.repetitions {
            cfg.repetitions = v;
        }
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if let Some(v) = self.mode {
            cfg.mode = v;
        }
        if let Some(v) = self.format {
            cfg.format = v;
        }
        Ok(())
    }
}

fn snap(x: f64) -> f64 {
    (x * 1e12).round() / 1e12
}

/// `start:stop:step` (inclusive of `stop` up to rounding) or a
/// comma-separated list.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>, ConfigError> {
    const FIELD: &str = "epsilon_grid";
    let spec = spec.trim();
    if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').collect();
        if parts.len() != 3 {
            return Err(ConfigError::field(FIELD, "expected start:stop:step"));
        }
        let start: f64 = parse_field(FIELD, parts[0].trim())?;
        let stop: f64 = parse_field(FIELD, parts[1].trim())?;
        let step: f64 = parse_field(FIELD, parts[2].trim())?;
        if !step.is_finite() || step <= 0.0 {
            return Err(ConfigError::field(FIELD, "step must be positive"));
        }
        if stop < start {
            return Err(ConfigError::field(FIELD, "stop is below start"));
        }
        let count = ((stop - start) / step + 1e-9).floor() as usize;
        Ok((0..=count).map(|k| snap(start + k as f64 * step)).collect())
    } else {
        spec.split(',')
            .map(|v| parse_field(FIELD, v.trim()))
            .collect()
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.epsilon_grid.is_empty() {
            return Err(ConfigError::field("epsilon_grid", "empty grid"));
        }
        if let Some(e) = self
            .epsilon_grid
            .iter()
            .find(|e| !(0.0..=0.5).contains(*e))
        {
            return Err(ConfigError::field(
                "epsilon_grid",
                format!("value {e} outside [0, 0.5]"),
            ));
        }
        if self.epsilon_grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(ConfigError::field("epsilon_grid", "grid must be strictly increasing"));
        }
        if !(0.0..=1.0).contains(&self.fidelity) {
            return Err(ConfigError::field("fidelity", format!("{} outside [0, 1]", self.fidelity)));
        }
        if !(0.0..=1.0).contains(&self.visibility) {
            return Err(ConfigError::field(
                "visibility",
                format!("{} outside [0, 1]", self.visibility),
            ));
        }
        if self.counts < 1 {
            return Err(ConfigError::field("counts", "must be at least 1"));
        }
        if self.mode == Mode::Tomographic && self.repetitions < 2 {
            return Err(ConfigError::field("repetitions", "must be at least 2"));
        }
        Ok(())
    }

    /// One-line `key=value` rendering that [`Overrides::parse_key_values`]
    /// reads back (after the leading `#`).
    pub fn header_line(&self) -> String {
        let grid: Vec<String> = self.epsilon_grid.iter().map(|&e| fmt_num(e)).collect();
        format!(
            "mode={} fidelity={} visibility={} counts={} repetitions={} seed={} format={} entropy_units=bits epsilon_grid={}",
            self.mode,
            fmt_num(self.fidelity),
            fmt_num(self.visibility),
            self.counts,
            self.repetitions,
            self.seed,
            self.format,
            grid.join(",")
        )
    }
}
