//! Plain-text `key = value` configuration with command-line overrides.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::params::ModelParams;

/// Parsed `key = value` pairs. Blank lines and `#` comments are ignored.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ConfigMap {
    entries: BTreeMap<String, String>,
}

impl ConfigMap {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`, got `{line}`", no + 1)))?;
            let key = key.trim().replace('-', "_");
            if key.is_empty() {
                return Err(Error::Config(format!("line {}: empty key", no + 1)));
            }
            if entries.insert(key.clone(), value.trim().to_string()).is_some() {
                return Err(Error::Config(format!("line {}: duplicate key `{key}`", no + 1)));
            }
        }
        Ok(ConfigMap { entries })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Sets `key`, replacing any value from the file.
    pub fn set(&mut self, key: &str, value: impl ToString) {
        self.entries.insert(key.replace('-', "_"), value.to_string());
    }

    pub fn contains(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        self.raw(key)
            .map(|v| v.parse::<T>().map_err(|e| Error::Config(format!("key `{key}` = `{v}`: {e}"))))
            .transpose()
    }

    pub fn get_or<T: FromStr>(&self, key: &str, default: T) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        Ok(self.get(key)?.unwrap_or(default))
    }

    /// `dim`, `alpha`, `lambda`, `omega` with defaults `N = 1`, `α = 8`, `λ = ω = 1`.
    pub fn params(&self) -> Result<ModelParams> {
        ModelParams::new(
            self.get_or("dim", 1usize)?,
            self.get_or("alpha", 8.0)?,
            self.get_or("lambda", 1.0)?,
            self.get_or("omega", 1.0)?,
        )
        .map_err(|e| Error::Config(e.to_string()))
    }
}

/// `count` log-spaced values from `lo` to `hi` inclusive.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogRange {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

impl LogRange {
    pub fn new(lo: f64, hi: f64, count: usize) -> Result<Self> {
        if !(lo > 0.0 && hi >= lo && hi.is_finite()) {
            return Err(Error::Config(format!("range [{lo}, {hi}] must be positive and ordered")));
        }
        if count == 0 || (count == 1 && hi != lo) {
            return Err(Error::Config(format!(
                "range [{lo}, {hi}] needs count ≥ 2 (or lo = hi with count 1), got {count}"
            )));
        }
        Ok(LogRange { lo, hi, count })
    }

    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.lo];
        }
        let (l0, l1) = (self.lo.ln(), self.hi.ln());
        (0..self.count)
            .map(|i| match i {
                0 => self.lo,
                i if i + 1 == self.count => self.hi,
                i => (l0 + (l1 - l0) * i as f64 / (self.count - 1) as f64).exp(),
            })
            .collect()
    }

    fn from_map(map: &ConfigMap, prefix: &str) -> Result<Self> {
        let lo: f64 = map
            .get(&format!("{prefix}_min"))?
            .ok_or_else(|| Error::Config(format!("missing `{prefix}_min`")))?;
        let hi = map.get_or(&format!("{prefix}_max"), lo)?;
        let count = map.get_or(&format!("{prefix}_count"), if hi == lo { 1 } else { 3 })?;
        Self::new(lo, hi, count)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DatumFamily {
    PhiAb,
    Gaussian,
}

impl FromStr for DatumFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "phi_ab" | "phiab" => Ok(DatumFamily::PhiAb),
            "gaussian" => Ok(DatumFamily::Gaussian),
            other => Err(Error::Config(format!("unknown datum family `{other}` (phi_ab | gaussian)"))),
        }
    }
}

impl std::fmt::Display for DatumFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            DatumFamily::PhiAb => "phi_ab",
            DatumFamily::Gaussian => "gaussian",
        })
    }
}

/// Ten times the fixed-step count of a run, enough for the adaptive steps
/// of a resolved collapse.
pub fn default_step_budget(t_end: f64, dt0: f64) -> usize {
    let nominal = (t_end / dt0).ceil();
    if nominal.is_finite() && nominal >= 0.0 {
        (10.0 * nominal.max(1.0)).min(1e15) as usize
    } else {
        usize::MAX
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepConfig {
    pub params: ModelParams,
    pub a_range: LogRange,
    pub b_range: LogRange,
    pub t_end: f64,
    pub dt0: f64,
    /// Record stride of each run.
    pub stride: usize,
    /// Step budget per run; a run that exhausts it is undecided.
    pub max_steps: usize,
    pub points_per_axis: usize,
    /// Box half-width for Gaussian data; `φ_{a,b}` sizes its own box.
    pub gaussian_half_width: f64,
    pub family: DatumFamily,
    pub out_dir: PathBuf,
    pub parallelism: usize,
    pub reproducible: bool,
    pub cache_dir: Option<PathBuf>,
}

impl SweepConfig {
    /// Reads the sweep keys; only `a_min` and `b_min` are required.
    pub fn from_map(map: &ConfigMap) -> Result<Self> {
        let t_end: f64 = map.get_or("t_end", 1.0)?;
        let dt0: f64 = map.get_or("dt", 1e-3)?;
        let cfg = SweepConfig {
            params: map.params()?,
            a_range: LogRange::from_map(map, "a")?,
            b_range: LogRange::from_map(map, "b")?,
            t_end,
            dt0,
            stride: map.get_or("stride", 10)?,
            max_steps: map.get_or("max_steps", default_step_budget(t_end, dt0))?,
            points_per_axis: map.get_or("points", 4096)?,
            gaussian_half_width: map.get_or("half_width", 40.0)?,
            family: map.get_or("family", DatumFamily::PhiAb)?,
            out_dir: map.get_or("out", PathBuf::from("."))?,
            parallelism: map.get_or("parallelism", 1)?,
            reproducible: map.get_or("reproducible", false)?,
            cache_dir: map.get("cache_dir")?,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_end > 0.0 && self.dt0 > 0.0) {
            return Err(Error::Config(format!("t_end = {} and dt = {} must be positive", self.t_end, self.dt0)));
        }
        if self.parallelism == 0 || self.stride == 0 || self.max_steps == 0 {
            return Err(Error::Config("parallelism, stride and max_steps must be at least 1".into()));
        }
        if !(self.points_per_axis.is_power_of_two() && self.points_per_axis >= 8) {
            return Err(Error::Config(format!("points = {} must be a power of two ≥ 8", self.points_per_axis)));
        }
        if !(self.gaussian_half_width > 0.0) {
            return Err(Error::Config("half_width must be positive".into()));
        }
        Ok(())
    }
}
