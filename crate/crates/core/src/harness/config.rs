//! Flat `key = value` experiment configuration.
//!
//! Every command-line flag has a key of the same name. Values given on the
//! command line override the file.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};

/// Parameters shared by the subcommands. Unset fields take each
/// subcommand's default.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ExperimentConfig {
    pub seed: Option<u64>,
    pub trials: Option<usize>,
    pub delta: Option<f64>,
    pub k: Option<usize>,
    pub iterations: Option<usize>,
    pub batch: Option<usize>,
    pub out: Option<PathBuf>,
    pub highdim: Option<bool>,
    pub protocol: Option<String>,
    pub strategy: Option<String>,
    pub instance: Option<PathBuf>,
    pub n: Option<usize>,
    pub d: Option<usize>,
    pub ratio: Option<f64>,
    pub separation: Option<f64>,
    pub repeats: Option<usize>,
    pub timing: Option<bool>,
}

pub const CONFIG_KEYS: [&str; 17] = [
    "seed",
    "trials",
    "delta",
    "k",
    "iterations",
    "batch",
    "out",
    "highdim",
    "protocol",
    "strategy",
    "instance",
    "n",
    "d",
    "ratio",
    "separation",
    "repeats",
    "timing",
];

fn parse_value<V: FromStr>(key: &str, value: &str, line: usize) -> Result<V> {
    value
        .parse()
        .map_err(|_| Error::Parse { line, message: format!("invalid value '{value}' for '{key}'") })
}

fn parse_bool(key: &str, value: &str, line: usize) -> Result<bool> {
    match value {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        _ => Err(Error::Parse { line, message: format!("invalid boolean '{value}' for '{key}'") }),
    }
}

impl ExperimentConfig {
    /// Parses `key = value` lines. Blank lines and lines starting with `#` or
    /// `;` are ignored; unknown keys and repeated keys are errors.
    pub fn parse(text: &str) -> Result<Self> {
        let mut seen = BTreeMap::new();
        let mut cfg = ExperimentConfig::default();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') || trimmed.starts_with(';') {
                continue;
            }
            let (key, value) = trimmed
                .split_once('=')
                .ok_or_else(|| Error::Parse { line, message: format!("expected key = value, got '{trimmed}'") })?;
            let (key, value) = (key.trim(), value.trim());
            if seen.insert(key.to_string(), line).is_some() {
                return Err(Error::Parse { line, message: format!("duplicate key '{key}'") });
            }
            match key {
                "seed" => cfg.seed = Some(parse_value(key, value, line)?),
                "trials" => cfg.trials = Some(parse_value(key, value, line)?),
                "delta" => cfg.delta = Some(parse_value(key, value, line)?),
                "k" => cfg.k = Some(parse_value(key, value, line)?),
                "iterations" => cfg.iterations = Some(parse_value(key, value, line)?),
                "batch" => cfg.batch = Some(parse_value(key, value, line)?),
                "out" => cfg.out = Some(PathBuf::from(value)),
                "highdim" => cfg.highdim = Some(parse_bool(key, value, line)?),
                "protocol" => cfg.protocol = Some(value.to_string()),
                "strategy" => cfg.strategy = Some(value.to_string()),
                "instance" => cfg.instance = Some(PathBuf::from(value)),
                "n" => cfg.n = Some(parse_value(key, value, line)?),
                "d" => cfg.d = Some(parse_value(key, value, line)?),
                "ratio" => cfg.ratio = Some(parse_value(key, value, line)?),
                "separation" => cfg.separation = Some(parse_value(key, value, line)?),
                "repeats" => cfg.repeats = Some(parse_value(key, value, line)?),
                "timing" => cfg.timing = Some(parse_bool(key, value, line)?),
                _ => return Err(Error::Parse { line, message: format!("unknown key '{key}'") }),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path.as_ref())
            .map_err(|e| Error::Io(format!("{}: {e}", path.as_ref().display())))?;
        ExperimentConfig::parse(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: Option<usize>| match v {
            Some(0) => Err(Error::InvalidParameter(format!("{name} must be >= 1"))),
            _ => Ok(()),
        };
        positive("trials", self.trials)?;
        positive("k", self.k)?;
        positive("iterations", self.iterations)?;
        positive("batch", self.batch)?;
        positive("repeats", self.repeats)?;
        positive("n", self.n)?;
        positive("d", self.d)?;
        if let Some(delta) = self.delta {
            if !(delta > 0.0 && delta < 1.0) {
                return Err(Error::InvalidParameter(format!("delta = {delta} must lie in (0, 1)")));
            }
        }
        if let Some(r) = self.ratio {
            if !(0.0..=1.0).contains(&r) {
                return Err(Error::InvalidParameter(format!("ratio = {r} must lie in [0, 1]")));
            }
        }
        Ok(())
    }

    /// Fields set in `self` win over `base`.
    pub fn over(self, base: &ExperimentConfig) -> ExperimentConfig {
        let b = base.clone();
        ExperimentConfig {
            seed: self.seed.or(b.seed),
            trials: self.trials.or(b.trials),
            delta: self.delta.or(b.delta),
            k: self.k.or(b.k),
            iterations: self.iterations.or(b.iterations),
            batch: self.batch.or(b.batch),
            out: self.out.or(b.out),
            highdim: self.highdim.or(b.highdim),
            protocol: self.protocol.or(b.protocol),
            strategy: self.strategy.or(b.strategy),
            instance: self.instance.or(b.instance),
            n: self.n.or(b.n),
            d: self.d.or(b.d),
            ratio: self.ratio.or(b.ratio),
            separation: self.separation.or(b.separation),
            repeats: self.repeats.or(b.repeats),
            timing: self.timing.or(b.timing),
        }
    }

    pub fn seed_or_default(&self) -> u64 {
        self.seed.unwrap_or(0)
    }
}
