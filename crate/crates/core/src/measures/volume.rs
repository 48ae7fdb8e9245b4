use std::f64::consts::LN_2;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{discretize, GaussianKernel, GridSpec, KernelMatrix};
use crate::states::CovarianceMatrix;
use crate::{MeasureError, Tolerances};

/// Monotone metric, identified by the mean of eigenvalue pairs entering its
/// volume element. Each mean is scaled so that `mean(a, a) = 2a`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MetricKind {
    /// `a + b`
    Bures,
    /// `2 (a - b) / (ln a - ln b)`
    KuboMori,
    /// `4ab / (a + b)`
    Maximal,
}

impl MetricKind {
    pub const ALL: [MetricKind; 3] = [MetricKind::Bures, MetricKind::KuboMori, MetricKind::Maximal];

    pub fn name(self) -> &'static str {
        match self {
            MetricKind::Bures => "bures",
            MetricKind::KuboMori => "kubo-mori",
            MetricKind::Maximal => "maximal",
        }
    }
}

/// `ln(e^x + e^y)`
fn log_add(x: f64, y: f64) -> f64 {
    let (hi, lo) = if x >= y { (x, y) } else { (y, x) };
    hi + (lo - hi).exp().ln_1p()
}

/// `ln(sinh t / t)` for `t ≥ 0`.
fn ln_sinhc(t: f64) -> f64 {
    if t < 1e-3 {
        let t2 = t * t;
        t2 / 6.0 - t2 * t2 / 180.0
    } else if t < 20.0 {
        (t.sinh() / t).ln()
    } else {
        t + (-(-2.0 * t).exp()).ln_1p() - (2.0 * t).ln()
    }
}

/// Log of the pair mean of `a = e^x`, `b = e^y`, taking the logs directly.
pub fn log_pair_mean(x: f64, y: f64, metric: MetricKind) -> f64 {
    match metric {
        MetricKind::Bures => log_add(x, y),
        MetricKind::KuboMori => LN_2 + 0.5 * (x + y) + ln_sinhc(0.5 * (x - y).abs()),
        MetricKind::Maximal => 2.0 * LN_2 + x + y - log_add(x, y),
    }
}

/// `ln V = -½ Σ ln λᵢ - Σ_{i<j} ln mean(λᵢ, λⱼ)`, constants dropped.
pub fn log_volume_element(eigenvalues: &[f64], metric: MetricKind) -> f64 {
    let logs: Vec<f64> = eigenvalues.iter().map(|l| l.ln()).collect();
    log_volume_from_logs(&logs, metric)
}

fn log_volume_from_logs(logs: &[f64], metric: MetricKind) -> f64 {
    let mut pairs = 0.0;
    for (i, &x) in logs.iter().enumerate() {
        for &y in &logs[i + 1..] {
            pairs += log_pair_mean(x, y, metric);
        }
    }
    -0.5 * logs.iter().sum::<f64>() - pairs
}

/// Log volume elements of one sample over several grids.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VolumeEstimate {
    pub metric: MetricKind,
    pub log_volumes: Vec<f64>,
    pub median: f64,
    /// Mean after dropping the smallest and largest value; the plain mean
    /// when fewer than three grids are used.
    pub trimmed_mean: f64,
}

impl VolumeEstimate {
    pub fn from_log_volumes(metric: MetricKind, log_volumes: Vec<f64>) -> Self {
        assert!(!log_volumes.is_empty(), "at least one grid is required");
        let mut sorted = log_volumes.clone();
        sorted.sort_by(f64::total_cmp);
        let n = sorted.len();
        let median = if n % 2 == 1 {
            sorted[n / 2]
        } else {
            0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
        };
        let core = if n >= 3 { &sorted[1..n - 1] } else { &sorted[..] };
        let trimmed_mean = core.iter().sum::<f64>() / core.len() as f64;
        Self { metric, log_volumes, median, trimmed_mean }
    }

    /// The single value of a one-grid estimate, otherwise the median.
    pub fn raw(&self) -> f64 {
        if self.log_volumes.len() == 1 {
            self.log_volumes[0]
        } else {
            self.median
        }
    }
}

/// Which grids a sample is discretized on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum GridPlan {
    /// One unit-spacing grid of `m` points per axis.
    Regular { m: usize },
    /// `n_grids` independent random grids of `m` points from `range`.
    Random { n_grids: usize, m: usize, range: (f64, f64) },
}

impl Default for GridPlan {
    fn default() -> Self {
        GridPlan::Random { n_grids: 5, m: 5, range: (-2.0, 2.0) }
    }
}

impl GridPlan {
    pub fn validate(&self) -> Result<(), MeasureError> {
        match *self {
            GridPlan::Regular { m } if m == 0 || m % 2 == 0 => {
                Err(MeasureError::InvalidGrid(format!("regular grid size must be odd, got {m}")))
            }
            GridPlan::Random { n_grids, m, range } if n_grids == 0 || m == 0 || !(range.1 > range.0) => {
                Err(MeasureError::InvalidGrid(format!(
                    "random grids need n_grids > 0, m > 0 and a nonempty range (got {n_grids}, {m}, {range:?})"
                )))
            }
            _ => Ok(()),
        }
    }
}

/// Volume estimates of `m` for every metric in `metrics`, sharing one set
/// of grids. A single rejected kernel discards the whole sample.
pub fn robust_volume<R: Rng + ?Sized>(
    m: &CovarianceMatrix,
    plan: &GridPlan,
    metrics: &[MetricKind],
    rng: &mut R,
    tol: &Tolerances,
) -> Result<Vec<VolumeEstimate>, MeasureError> {
    plan.validate()?;
    let kernel = GaussianKernel::two_mode(m)?;
    let spectra = match *plan {
        GridPlan::Regular { m } => vec![checked(&kernel, &GridSpec::regular(m)?, tol)?],
        GridPlan::Random { n_grids, m, range } => {
            let mut out = Vec::with_capacity(n_grids);
            for _ in 0..n_grids {
                let grid = GridSpec::random(m, range, tol.grid_coincidence, rng)?;
                out.push(checked(&kernel, &grid, tol)?);
            }
            out
        }
    };
    Ok(estimates(&spectra, metrics))
}

/// Same as [`robust_volume`] on caller-supplied grids.
pub fn robust_volume_on_grids(
    m: &CovarianceMatrix,
    grids: &[GridSpec],
    metrics: &[MetricKind],
    tol: &Tolerances,
) -> Result<Vec<VolumeEstimate>, MeasureError> {
    if grids.is_empty() {
        return Err(MeasureError::InvalidGrid("no grids supplied".into()));
    }
    let kernel = GaussianKernel::two_mode(m)?;
    let spectra = grids
        .iter()
        .map(|g| checked(&kernel, g, tol))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(estimates(&spectra, metrics))
}

fn checked(kernel: &GaussianKernel, grid: &GridSpec, tol: &Tolerances) -> Result<KernelMatrix, MeasureError> {
    discretize(kernel, grid, tol).map_err(|e| MeasureError::SampleDiscarded(Box::new(e)))
}

fn estimates(spectra: &[KernelMatrix], metrics: &[MetricKind]) -> Vec<VolumeEstimate> {
    let logs: Vec<Vec<f64>> = spectra
        .iter()
        .map(|k| k.eigenvalues.iter().map(|l| l.ln()).collect())
        .collect();
    metrics
        .iter()
        .map(|&metric| {
            let vols = logs.iter().map(|l| log_volume_from_logs(l, metric)).collect();
            VolumeEstimate::from_log_volumes(metric, vols)
        })
        .collect()
}
