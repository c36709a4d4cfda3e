//! Experiment descriptions and their flat `key = value` config format.
//!
//! ```text
//! # comments start with '#'
//! n = 50000
//! rho = 0.01
//! trials = 1000000
//! seed = 1
//! detector = lr
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::detectors::DetectorKind;
use crate::sigmodel::{CovarianceParams, RadarKind};
use crate::{Error, Result};

/// Which hypothesis a batch of trials is drawn under.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Hypothesis {
    /// Target absent, `rho = 0`.
    Null,
    /// Target present at the plan's `rho`.
    Alternative,
}

impl Hypothesis {
    pub(crate) fn stream_tag(self) -> u64 {
        match self {
            Hypothesis::Null => 0,
            Hypothesis::Alternative => 1,
        }
    }
}

/// A complete Monte Carlo experiment.
#[derive(Clone, Debug, PartialEq)]
pub struct SimulationPlan {
    /// Samples integrated per trial.
    pub n: u64,
    pub rho: f64,
    pub trials: u64,
    pub seed: u64,
    pub detector: DetectorKind,
    pub sigma1: f64,
    pub sigma2: f64,
    pub phi: f64,
    pub kind: RadarKind,
}

impl Default for SimulationPlan {
    fn default() -> Self {
        Self {
            n: 50_000,
            rho: 0.0,
            trials: 1_000_000,
            seed: 0,
            detector: DetectorKind::LrExact,
            sigma1: 1.0,
            sigma2: 1.0,
            phi: 0.0,
            kind: RadarKind::Qtms,
        }
    }
}

pub(crate) const PLAN_KEYS: [&str; 9] = [
    "n", "rho", "trials", "seed", "detector", "sigma1", "sigma2", "phi", "kind",
];

impl SimulationPlan {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::param("n must be at least 1"));
        }
        if self.trials == 0 {
            return Err(Error::param("trials must be at least 1"));
        }
        self.params(Hypothesis::Alternative).validate()
    }

    /// Covariance parameters for the given hypothesis.
    pub fn params(&self, hypothesis: Hypothesis) -> CovarianceParams {
        CovarianceParams {
            sigma1: self.sigma1,
            sigma2: self.sigma2,
            phi: self.phi,
            rho: match hypothesis {
                Hypothesis::Null => 0.0,
                Hypothesis::Alternative => self.rho,
            },
            kind: self.kind,
        }
    }

    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let bad = |e: String| Error::parse(format!("key `{key}`"), e);
        let value = value.trim();
        match key {
            "n" => self.n = value.parse().map_err(|e| bad(format!("{e}")))?,
            "rho" => self.rho = parse_f64(value).map_err(bad)?,
            "trials" => self.trials = parse_count(value).map_err(bad)?,
            "seed" => self.seed = value.parse().map_err(|e| bad(format!("{e}")))?,
            "detector" => self.detector = value.parse()?,
            "sigma1" => self.sigma1 = parse_f64(value).map_err(bad)?,
            "sigma2" => self.sigma2 = parse_f64(value).map_err(bad)?,
            "phi" => self.phi = parse_f64(value).map_err(bad)?,
            "kind" => self.kind = value.parse()?,
            _ => return Err(Error::parse(format!("key `{key}`"), "unknown plan key")),
        }
        Ok(())
    }
}

fn parse_f64(s: &str) -> std::result::Result<f64, String> {
    s.parse::<f64>().map_err(|e| e.to_string())
}

/// Accepts plain integers and exact float spellings such as `1e6`.
fn parse_count(s: &str) -> std::result::Result<u64, String> {
    if let Ok(v) = s.parse::<u64>() {
        return Ok(v);
    }
    let f = s.parse::<f64>().map_err(|e| e.to_string())?;
    if f >= 0.0 && f.fract() == 0.0 && f < u64::MAX as f64 {
        Ok(f as u64)
    } else {
        Err(format!("`{s}` is not a nonnegative integer"))
    }
}

/// Writes every field; floats use the shortest representation that parses back
/// to the same value.
impl fmt::Display for SimulationPlan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "n = {}", self.n)?;
        writeln!(f, "rho = {:?}", self.rho)?;
        writeln!(f, "trials = {}", self.trials)?;
        writeln!(f, "seed = {}", self.seed)?;
        writeln!(f, "detector = {}", self.detector)?;
        writeln!(f, "sigma1 = {:?}", self.sigma1)?;
        writeln!(f, "sigma2 = {:?}", self.sigma2)?;
        writeln!(f, "phi = {:?}", self.phi)?;
        writeln!(f, "kind = {}", self.kind)
    }
}

impl FromStr for SimulationPlan {
    type Err = Error;

    /// Parses a config that may only contain plan keys.
    fn from_str(s: &str) -> Result<Self> {
        let config = ConfigFile::from_str(s)?;
        if let Some(key) = config.extra.keys().next() {
            return Err(Error::parse(format!("key `{key}`"), "unknown plan key"));
        }
        let plan = config.apply(SimulationPlan::default())?;
        plan.validate()?;
        Ok(plan)
    }
}

/// A parsed config file: plan keys plus any command-specific extras
/// (`grid`, `bins`, `detectors`, ...).
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ConfigFile {
    plan: Vec<(String, String)>,
    pub extra: BTreeMap<String, String>,
}

impl ConfigFile {
    /// Overlays the plan keys onto `plan`.
    pub fn apply(&self, mut plan: SimulationPlan) -> Result<SimulationPlan> {
        for (key, value) in &self.plan {
            plan.set(key, value)?;
        }
        Ok(plan)
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.extra.get(key).map(String::as_str)
    }
}

impl FromStr for ConfigFile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut config = ConfigFile::default();
        for (lineno, raw) in s.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::parse(format!("line {}", lineno + 1), "expected `key = value`"))?;
            let (key, value) = (key.trim().to_string(), value.trim().trim_matches('"').to_string());
            if PLAN_KEYS.contains(&key.as_str()) {
                config.plan.push((key, value));
            } else {
                config.extra.insert(key, value);
            }
        }
        Ok(config)
    }
}
