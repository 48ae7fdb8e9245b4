use serde::{Deserialize, Serialize};

use super::exec::run_chunked;
use super::{sample_matrix, RunOptions, SamplerConfig, StreamFactory};
use crate::criteria::evaluate;
use crate::states::{entropy, one_mode_entropy, CovarianceMatrix};
use crate::CensusError;

const MAX_EXAMPLES: usize = 3;

/// A separable state whose global entropy is below a marginal entropy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyExample {
    pub index: u64,
    pub matrix: CovarianceMatrix,
    pub joint: f64,
    pub mode_1: f64,
    pub mode_2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyReport {
    pub config: SamplerConfig,
    pub generated: u64,
    /// Accepted by the filter chain with the strict physicality test on.
    pub accepted: u64,
    pub separable: u64,
    /// Separable samples with `S(ρ₁₂) < max(S(ρ₁), S(ρ₂))`.
    pub violations: u64,
    /// The first few violations in sample order.
    pub examples: Vec<EntropyExample>,
}

/// Checks whether the entropic separability condition `S(ρ₁₂) ≥ S(ρᵢ)`
/// holds on separable sampled states.
pub fn run_entropy_probe(cfg: &SamplerConfig, opts: &RunOptions) -> Result<EntropyReport, CensusError> {
    cfg.validate()?;
    let streams = StreamFactory::new(cfg.seed);
    let tol = opts.tolerances;
    let empty = || EntropyReport {
        config: *cfg,
        generated: 0,
        accepted: 0,
        separable: 0,
        violations: 0,
        examples: Vec::new(),
    };
    run_chunked(
        cfg.samples,
        opts.workers,
        "entropy probe",
        empty,
        |rep, i| {
            rep.generated += 1;
            let m = sample_matrix(cfg, &mut streams.stream(i));
            let Ok(eval) = evaluate(&m, &tol, true) else {
                return Ok(());
            };
            rep.accepted += 1;
            if !eval.verdict.separable {
                return Ok(());
            }
            rep.separable += 1;
            let joint = entropy(&m);
            let (mode_1, mode_2) = (one_mode_entropy(&m.block_a()), one_mode_entropy(&m.block_b()));
            if joint < mode_1.max(mode_2) {
                rep.violations += 1;
                if rep.examples.len() < MAX_EXAMPLES {
                    rep.examples.push(EntropyExample { index: i, matrix: m, joint, mode_1, mode_2 });
                }
            }
            Ok(())
        },
        |total, part| {
            total.generated += part.generated;
            total.accepted += part.accepted;
            total.separable += part.separable;
            total.violations += part.violations;
            let room = MAX_EXAMPLES - total.examples.len();
            total.examples.extend(part.examples.into_iter().take(room));
        },
    )
}
