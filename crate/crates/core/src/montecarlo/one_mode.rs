use nalgebra::Matrix2;
use serde::{Deserialize, Serialize};

use super::accumulate::{WeightedEstimate, WeightedTally};
use super::exec::run_chunked;
use super::{derive_seed, sample_one_mode, RunOptions, SamplerConfig, StreamFactory};
use crate::measures::jeffreys_log_weight_one_mode;
use crate::states::is_physical_one_mode;
use crate::CensusError;

/// Classicality census at one point of the `k` schedule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OneModePoint {
    pub config: SamplerConfig,
    pub accepted: u64,
    pub classical: u64,
    pub estimate: Option<WeightedEstimate>,
}

impl OneModePoint {
    /// Jeffreys-weighted probability of classicality. Zero when nothing was
    /// accepted, which is forced for `k < 1` since no sampled block reaches
    /// unit determinant.
    pub fn prob_classical(&self) -> f64 {
        self.estimate.map_or(0.0, |e| e.prob_classical)
    }

    pub fn standard_error(&self) -> f64 {
        self.estimate.map_or(0.0, |e| e.se_classical)
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Tally {
    accepted: u64,
    classical: u64,
    weights: WeightedTally,
}

/// `A - I` positive definite with margin.
fn is_classical_one_mode(a: &Matrix2<f64>, margin: f64) -> bool {
    (a - Matrix2::identity()).symmetric_eigenvalues().min() > margin
}

/// One census per `k`, with `l = l_ratio · k` and a seed derived from
/// `seed` and the position in the schedule.
pub fn run_one_mode_classicality(
    ks: &[f64],
    l_ratio: f64,
    samples: u64,
    seed: u64,
    opts: &RunOptions,
) -> Result<Vec<OneModePoint>, CensusError> {
    let tol = opts.tolerances;
    ks.iter()
        .enumerate()
        .map(|(idx, &k)| {
            let cfg = SamplerConfig::one_mode(k, l_ratio * k, samples, derive_seed(seed, idx as u64));
            cfg.validate()?;
            let streams = StreamFactory::new(cfg.seed);
            let t = run_chunked(
                samples,
                opts.workers,
                "one-mode",
                Tally::default,
                |t, i| {
                    let a = sample_one_mode(&cfg, &mut streams.stream(i));
                    if is_physical_one_mode(&a, &tol) {
                        let classical = is_classical_one_mode(&a, tol.classical);
                        t.accepted += 1;
                        t.classical += u64::from(classical);
                        t.weights.add(jeffreys_log_weight_one_mode(&a), classical, classical);
                    }
                    Ok(())
                },
                |total, part| {
                    total.accepted += part.accepted;
                    total.classical += part.classical;
                    total.weights.merge(&part.weights);
                },
            )?;
            Ok(OneModePoint {
                config: cfg,
                accepted: t.accepted,
                classical: t.classical,
                estimate: t.weights.estimate(),
            })
        })
        .collect()
}
