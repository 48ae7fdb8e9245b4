//! Settings resolution: command-line flags override the optional
//! `key = value` config file, which overrides the built-in defaults. The
//! `CVCENSUS_WORKERS` environment variable only replaces the default worker
//! count.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use cvcensus::measures::{GridPlan, MetricKind};
use cvcensus::montecarlo::Estimator;

pub const WORKERS_ENV: &str = "CVCENSUS_WORKERS";

const KEYS: &[&str] = &[
    "k",
    "l",
    "samples",
    "seed",
    "workers",
    "format",
    "out",
    "strict_physical",
    "dump_dir",
    "scale",
    "metric",
    "grid",
    "grid_size",
    "n_grids",
    "grid_range",
    "robust",
    "ks",
    "l_ratio",
    "step",
];

#[derive(Debug)]
pub enum SettingsError {
    /// Bad value or unknown key; exit code 64.
    Usage(String),
    /// The config file could not be read; exit code 1.
    Io(String),
}

impl fmt::Display for SettingsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SettingsError::Usage(m) | SettingsError::Io(m) => f.write_str(m),
        }
    }
}

/// Parsed `key = value` file. Blank lines and `#` comments are ignored.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigFile(BTreeMap<String, String>);

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self, SettingsError> {
        let mut map = BTreeMap::new();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| SettingsError::Usage(format!("config line {}: expected key = value", no + 1)))?;
            let key = key.trim().replace('-', "_");
            if !KEYS.contains(&key.as_str()) {
                return Err(SettingsError::Usage(format!("config line {}: unknown key '{key}'", no + 1)));
            }
            map.insert(key, value.trim().to_string());
        }
        Ok(Self(map))
    }

    pub fn load(path: &Path) -> Result<Self, SettingsError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| SettingsError::Io(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, SettingsError>
    where
        T::Err: fmt::Display,
    {
        self.0
            .get(key)
            .map(|v| v.parse::<T>().map_err(|e| SettingsError::Usage(format!("config key {key}: {e}"))))
            .transpose()
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(String::as_str)
    }
}

/// Flag value, else config value, else `default`.
pub fn pick<T: FromStr>(flag: Option<T>, config: &ConfigFile, key: &str, default: T) -> Result<T, SettingsError>
where
    T::Err: fmt::Display,
{
    match flag {
        Some(v) => Ok(v),
        None => Ok(config.get(key)?.unwrap_or(default)),
    }
}

pub fn default_workers() -> Result<usize, SettingsError> {
    match std::env::var(WORKERS_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|e| SettingsError::Usage(format!("{WORKERS_ENV}={v}: {e}"))),
        Err(_) => Ok(1),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
    Table,
}

impl FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            "table" => Ok(Format::Table),
            _ => Err(format!("unknown format '{s}' (csv, json, table)")),
        }
    }
}

/// A metric name on the command line; `fisher` selects the Jeffreys row.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricChoice {
    Fisher,
    Volume(MetricKind),
}

impl FromStr for MetricChoice {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "fisher" => Ok(MetricChoice::Fisher),
            "bures" => Ok(MetricChoice::Volume(MetricKind::Bures)),
            "kubo-mori" => Ok(MetricChoice::Volume(MetricKind::KuboMori)),
            "maximal" => Ok(MetricChoice::Volume(MetricKind::Maximal)),
            _ => Err(format!("unknown metric '{s}' (fisher, bures, kubo-mori, maximal)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Robust {
    None,
    Median,
    TrimmedMean,
}

impl FromStr for Robust {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "none" => Ok(Robust::None),
            "median" => Ok(Robust::Median),
            "trimmed-mean" => Ok(Robust::TrimmedMean),
            _ => Err(format!("unknown estimator '{s}' (none, median, trimmed-mean)")),
        }
    }
}

impl Robust {
    pub fn estimator(self) -> Estimator {
        match self {
            Robust::None => Estimator::Raw,
            Robust::Median => Estimator::Median,
            Robust::TrimmedMean => Estimator::TrimmedMean,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridKindChoice {
    Regular,
    Random,
}

impl FromStr for GridKindChoice {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "regular" => Ok(GridKindChoice::Regular),
            "random" => Ok(GridKindChoice::Random),
            _ => Err(format!("unknown grid kind '{s}' (regular, random)")),
        }
    }
}

/// `lo,hi`
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Range(pub f64, pub f64);

impl FromStr for Range {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (a, b) = s.split_once(',').ok_or_else(|| format!("expected lo,hi, got '{s}'"))?;
        let lo: f64 = a.trim().parse().map_err(|e| format!("{a}: {e}"))?;
        let hi: f64 = b.trim().parse().map_err(|e| format!("{b}: {e}"))?;
        if !(hi > lo) {
            return Err(format!("empty range {lo},{hi}"));
        }
        Ok(Range(lo, hi))
    }
}

/// Comma-separated list of positive reals.
#[derive(Debug, Clone, PartialEq)]
pub struct List(pub Vec<f64>);

impl FromStr for List {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.split(',')
            .map(|x| x.trim().parse::<f64>().map_err(|e| format!("{x}: {e}")))
            .collect::<Result<Vec<_>, _>>()
            .map(List)
    }
}

/// Comma-separated metric names, as written in a config file.
pub fn metrics_from_config(config: &ConfigFile) -> Result<Option<Vec<MetricChoice>>, SettingsError> {
    config
        .raw("metric")
        .map(|v| {
            v.split(',')
                .map(|m| m.trim().parse::<MetricChoice>().map_err(SettingsError::Usage))
                .collect()
        })
        .transpose()
}

pub fn grid_plan(kind: GridKindChoice, size: usize, n_grids: usize, range: Range) -> GridPlan {
    match kind {
        GridKindChoice::Regular => GridPlan::Regular { m: size },
        GridKindChoice::Random => GridPlan::Random { n_grids, m: size, range: (range.0, range.1) },
    }
}

pub fn optional_path(flag: Option<PathBuf>, config: &ConfigFile, key: &str) -> Option<PathBuf> {
    flag.or_else(|| config.raw(key).map(PathBuf::from))
}
