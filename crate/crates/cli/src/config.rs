//! Flat `key = value` run configuration.
//!
//! Every key can also be given as a command-line flag of the same name;
//! flags win over the file, which wins over the built-in defaults.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use blindrec::protocol::CrossoverPolicy;

use crate::CliError;

pub const KEYS: &[&str] = &[
    "code",
    "n",
    "distribution",
    "code_seed",
    "r0",
    "delta",
    "rounds",
    "e0",
    "e1",
    "e",
    "grid",
    "trials",
    "max_iters",
    "assumed_crossover",
    "seed",
    "output",
    "parallel",
];

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// Alist file; when absent a PEG code is built from `n`,
    /// `distribution` and `code_seed`.
    pub code: Option<PathBuf>,
    pub n: usize,
    pub distribution: Option<PathBuf>,
    pub code_seed: u64,
    /// Mother-code rate for `schedule`; other commands take it from the code.
    pub r0: Option<f64>,
    pub delta: f64,
    pub rounds: usize,
    pub e0: f64,
    pub e1: f64,
    /// Crossover for `run`, `serve` and `connect`.
    pub e: f64,
    pub grid: Vec<f64>,
    pub trials: usize,
    pub max_iters: usize,
    pub assumed_crossover: CrossoverPolicy,
    pub seed: u64,
    pub output: Option<PathBuf>,
    pub parallel: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            code: None,
            n: 2000,
            distribution: None,
            code_seed: 1,
            r0: None,
            delta: 0.1,
            rounds: 6,
            e0: 0.062,
            e1: 0.092,
            e: 0.07,
            grid: vec![0.055, 0.06, 0.065, 0.07, 0.075, 0.08],
            trials: 200,
            max_iters: 100,
            assumed_crossover: CrossoverPolicy::CapacityMatched,
            seed: 1,
            output: None,
            parallel: true,
        }
    }
}

impl RunConfig {
    /// Defaults overridden by the file at `path`, if any, then by `overrides`.
    pub fn load(path: Option<&Path>, overrides: &[(&str, String)]) -> Result<Self, CliError> {
        let mut config = RunConfig::default();
        if let Some(path) = path {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            config.apply_text(&text)?;
        }
        for (key, value) in overrides {
            config.set(key, value)?;
        }
        config.validate()?;
        Ok(config)
    }

    pub fn apply_text(&mut self, text: &str) -> Result<(), CliError> {
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Config(format!("line {}: expected key = value", idx + 1))
            })?;
            self.set(key.trim(), value.trim())
                .map_err(|e| CliError::Config(format!("line {}: {e}", idx + 1)))?;
        }
        Ok(())
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        let bad = |what: &str| CliError::Config(format!("{key}: cannot parse {value:?} as {what}"));
        let float = || value.parse::<f64>().map_err(|_| bad("a number"));
        let uint = || value.parse::<usize>().map_err(|_| bad("an integer"));
        let u64v = || value.parse::<u64>().map_err(|_| bad("an integer"));
        let path = || (!value.is_empty()).then(|| PathBuf::from(value));
        match key {
            "code" => self.code = path(),
            "n" => self.n = uint()?,
            "distribution" => self.distribution = path(),
            "code_seed" => self.code_seed = u64v()?,
            "r0" => self.r0 = if value.is_empty() { None } else { Some(float()?) },
            "delta" => self.delta = float()?,
            "rounds" => self.rounds = uint()?,
            "e0" => self.e0 = float()?,
            "e1" => self.e1 = float()?,
            "e" => self.e = float()?,
            "grid" => self.grid = parse_grid(value).ok_or_else(|| bad("a grid"))?,
            "trials" => self.trials = uint()?,
            "max_iters" => self.max_iters = uint()?,
            "assumed_crossover" => {
                self.assumed_crossover = match value {
                    "capacity" => CrossoverPolicy::CapacityMatched,
                    _ => CrossoverPolicy::Fixed(float()?),
                }
            }
            "seed" => self.seed = u64v()?,
            "output" => self.output = path(),
            "parallel" => {
                self.parallel = value.parse::<bool>().map_err(|_| bad("true/false"))?
            }
            _ => return Err(CliError::Config(format!("unknown key {key:?}"))),
        }
        Ok(())
    }

    /// Checks that do not need the code; range coverage is checked once
    /// the mother-code rate is known.
    pub fn validate(&self) -> Result<(), CliError> {
        if self.trials == 0 {
            return Err(CliError::Config("trials must be at least 1".into()));
        }
        if self.max_iters == 0 {
            return Err(CliError::Config("max_iters must be at least 1".into()));
        }
        if !(0.0 <= self.e0 && self.e0 <= self.e1 && self.e1 < 0.5) {
            return Err(CliError::Config(format!(
                "error range [{}, {}] invalid",
                self.e0, self.e1
            )));
        }
        if let Some(bad) = self.grid.iter().find(|e| !(0.0..0.5).contains(*e)) {
            return Err(CliError::Config(format!("grid point {bad} outside [0, 0.5)")));
        }
        Ok(())
    }

    /// The configuration in file form, e.g. for recording next to results.
    pub fn to_text(&self) -> String {
        let path = |p: &Option<PathBuf>| p.as_ref().map(|p| p.display().to_string()).unwrap_or_default();
        let grid: Vec<String> = self.grid.iter().map(|e| e.to_string()).collect();
        let mut out = String::new();
        let _ = writeln!(out, "code = {}", path(&self.code));
        let _ = writeln!(out, "n = {}", self.n);
        let _ = writeln!(out, "distribution = {}", path(&self.distribution));
        let _ = writeln!(out, "code_seed = {}", self.code_seed);
        let _ = writeln!(out, "r0 = {}", self.r0.map(|r| r.to_string()).unwrap_or_default());
        let _ = writeln!(out, "delta = {}", self.delta);
        let _ = writeln!(out, "rounds = {}", self.rounds);
        let _ = writeln!(out, "e0 = {}", self.e0);
        let _ = writeln!(out, "e1 = {}", self.e1);
        let _ = writeln!(out, "e = {}", self.e);
        let _ = writeln!(out, "grid = {}", grid.join(","));
        let _ = writeln!(out, "trials = {}", self.trials);
        let _ = writeln!(out, "max_iters = {}", self.max_iters);
        let crossover = match self.assumed_crossover {
            CrossoverPolicy::CapacityMatched => "capacity".to_string(),
            CrossoverPolicy::Fixed(e) => e.to_string(),
        };
        let _ = writeln!(out, "assumed_crossover = {crossover}");
        let _ = writeln!(out, "seed = {}", self.seed);
        let _ = writeln!(out, "output = {}", path(&self.output));
        let _ = writeln!(out, "parallel = {}", self.parallel);
        out
    }
}

/// Comma-separated values, or `start:stop:step` with `stop` inclusive.
pub fn parse_grid(text: &str) -> Option<Vec<f64>> {
    let text = text.trim();
    if text.is_empty() {
        return Some(Vec::new());
    }
    if let Some((start, rest)) = text.split_once(':') {
        let (stop, step) = rest.split_once(':')?;
        let parse = |s: &str| s.trim().parse::<f64>().ok();
        let (start, stop, step) = (parse(start)?, parse(stop)?, parse(step)?);
        if step.is_nan() || step <= 0.0 || stop < start {
            return None;
        }
        let count = ((stop - start) / step + 1e-9).floor() as usize;
        // round to 1e-9 so 0.055 + 3 * 0.005 prints as 0.07
        return Some((0..=count)
            .map(|i| ((start + i as f64 * step) * 1e9).round() / 1e9)
            .collect());
    }
    text.split(',')
        .map(|s| s.trim().parse::<f64>().ok())
        .collect()
}
