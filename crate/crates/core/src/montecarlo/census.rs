use std::fmt;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use super::accumulate::{WeightedEstimate, WeightedTally};
use super::exec::run_chunked;
use super::{sample_matrix, SamplerConfig, StreamFactory};
use crate::criteria::{compare_oracles, evaluate, Evaluation, OracleOutcome, Rejection};
use crate::measures::{jeffreys_log_weight, robust_volume, GridPlan, MetricKind, VolumeEstimate};
use crate::states::CovarianceMatrix;
use crate::{CensusError, MeasureError, Tolerances};

/// Execution settings shared by every driver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunOptions {
    pub tolerances: Tolerances,
    /// Add the strict `M + iΩ ⪰ 0` test to the filter chain.
    pub strict_physical: bool,
    pub workers: usize,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self { tolerances: Tolerances::default(), strict_physical: false, workers: 1 }
    }
}

/// Raw counts of a census run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusCounts {
    pub generated: u64,
    pub accepted: u64,
    pub separable: u64,
    pub classical: u64,
    pub not_positive_definite: u64,
    pub complex_standard_form: u64,
    pub local_determinant: u64,
    pub solver_failures: u64,
    pub uncertainty_rejected: u64,
    pub unphysical_rejected: u64,
    /// Accepted by the filter chain but failing `M + iΩ ⪰ 0`.
    pub unphysical_accepted: u64,
    pub boundary_disagreements: u64,
    pub discarded_grids: u64,
    pub singular_kernels: u64,
    pub numerical_faults: u64,
    pub ordering_violations: u64,
    /// Accepted samples whose volume estimates were all usable.
    pub survived: u64,
}

impl CensusCounts {
    fn merge(&mut self, o: &CensusCounts) {
        self.generated += o.generated;
        self.accepted += o.accepted;
        self.separable += o.separable;
        self.classical += o.classical;
        self.not_positive_definite += o.not_positive_definite;
        self.complex_standard_form += o.complex_standard_form;
        self.local_determinant += o.local_determinant;
        self.solver_failures += o.solver_failures;
        self.uncertainty_rejected += o.uncertainty_rejected;
        self.unphysical_rejected += o.unphysical_rejected;
        self.unphysical_accepted += o.unphysical_accepted;
        self.boundary_disagreements += o.boundary_disagreements;
        self.discarded_grids += o.discarded_grids;
        self.singular_kernels += o.singular_kernels;
        self.numerical_faults += o.numerical_faults;
        self.ordering_violations += o.ordering_violations;
        self.survived += o.survived;
    }

    fn reject(&mut self, r: Rejection) {
        let slot = match r {
            Rejection::NotPositiveDefinite => &mut self.not_positive_definite,
            Rejection::ComplexStandardForm => &mut self.complex_standard_form,
            Rejection::LocalDeterminant => &mut self.local_determinant,
            Rejection::SolverFailure => &mut self.solver_failures,
            Rejection::UncertaintyBound => &mut self.uncertainty_rejected,
            Rejection::Unphysical => &mut self.unphysical_rejected,
        };
        *slot += 1;
    }

    /// Fraction of accepted samples whose kernels were discarded.
    pub fn discard_fraction(&self) -> f64 {
        (self.discarded_grids + self.singular_kernels) as f64 / self.accepted as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Estimator {
    /// Single regular grid.
    Raw,
    Median,
    TrimmedMean,
}

impl Estimator {
    fn pick(self, v: &VolumeEstimate) -> f64 {
        match self {
            Estimator::Raw => v.raw(),
            Estimator::Median => v.median,
            Estimator::TrimmedMean => v.trimmed_mean,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Estimator::Raw => "raw",
            Estimator::Median => "median",
            Estimator::TrimmedMean => "trimmed-mean",
        }
    }
}

/// Which weighting a tally belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MeasureLabel {
    Fisher,
    Volume { metric: MetricKind, estimator: Estimator },
}

impl fmt::Display for MeasureLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MeasureLabel::Fisher => f.write_str("fisher"),
            MeasureLabel::Volume { metric, estimator } => write!(f, "{}-{}", metric.name(), estimator.name()),
        }
    }
}

/// Mergeable per-chunk state of a census.
#[derive(Debug, Clone, PartialEq)]
pub struct CensusAccumulator {
    pub counts: CensusCounts,
    pub tallies: Vec<(MeasureLabel, WeightedTally)>,
}

impl CensusAccumulator {
    pub fn new(labels: &[MeasureLabel]) -> Self {
        Self {
            counts: CensusCounts::default(),
            tallies: labels.iter().map(|&l| (l, WeightedTally::default())).collect(),
        }
    }

    pub fn merge(&mut self, other: CensusAccumulator) {
        self.counts.merge(&other.counts);
        for ((la, ta), (lb, tb)) in self.tallies.iter_mut().zip(&other.tallies) {
            debug_assert_eq!(la, lb);
            ta.merge(tb);
        }
    }

    fn tally(&mut self, label: MeasureLabel) -> &mut WeightedTally {
        &mut self
            .tallies
            .iter_mut()
            .find(|(l, _)| *l == label)
            .expect("label registered at construction")
            .1
    }

    /// Filter chain plus the shadow oracle. Returns the evaluation of an
    /// accepted sample.
    fn screen(
        &mut self,
        index: u64,
        m: &CovarianceMatrix,
        opts: &RunOptions,
    ) -> Result<Option<Evaluation>, CensusError> {
        let tol = &opts.tolerances;
        self.counts.generated += 1;
        let eval = match evaluate(m, tol, opts.strict_physical) {
            Ok(e) => e,
            Err(r) => {
                self.counts.reject(r);
                return Ok(None);
            }
        };
        match compare_oracles(&eval, tol) {
            OracleOutcome::Disagreement => {
                return Err(CensusError::OracleDisagreement {
                    index,
                    matrix: Box::new(*m),
                    margin_sep: eval.verdict.margin_sep,
                    margin_ppt: eval.verdict.margin_ppt,
                })
            }
            OracleOutcome::BoundaryDisagreement => {
                log::debug!(
                    "sample {index}: verdicts differ inside the boundary band (margins {:e}, {:e})",
                    eval.verdict.margin_sep,
                    eval.verdict.margin_ppt
                );
                self.counts.boundary_disagreements += 1;
            }
            OracleOutcome::Agree | OracleOutcome::NotApplicable => {}
        }
        self.counts.accepted += 1;
        self.counts.separable += u64::from(eval.verdict.separable);
        self.counts.classical += u64::from(eval.verdict.classical);
        self.counts.unphysical_accepted += u64::from(!eval.physical);
        Ok(Some(eval))
    }

    pub fn finish(self, config: SamplerConfig, wall_time: Duration) -> CensusResult {
        CensusResult {
            config,
            counts: self.counts,
            measures: self.tallies.iter().map(|(l, t)| (*l, t.estimate())).collect(),
            wall_time,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CensusResult {
    pub config: SamplerConfig,
    pub counts: CensusCounts,
    /// `None` where no sample carried weight.
    pub measures: Vec<(MeasureLabel, Option<WeightedEstimate>)>,
    #[serde(skip)]
    pub wall_time: Duration,
}

impl CensusResult {
    pub fn measure(&self, label: MeasureLabel) -> Result<WeightedEstimate, CensusError> {
        self.measures
            .iter()
            .find(|(l, _)| *l == label)
            .and_then(|(_, e)| *e)
            .ok_or(CensusError::EmptyCensus)
    }

    pub fn fisher(&self) -> Result<WeightedEstimate, CensusError> {
        self.measure(MeasureLabel::Fisher)
    }
}

/// Jeffreys-weighted census over the box sampler.
pub fn run_classical_census(cfg: &SamplerConfig, opts: &RunOptions) -> Result<CensusResult, CensusError> {
    cfg.validate()?;
    let start = Instant::now();
    let labels = [MeasureLabel::Fisher];
    let streams = StreamFactory::new(cfg.seed);
    let acc = run_chunked(
        cfg.samples,
        opts.workers,
        "census",
        || CensusAccumulator::new(&labels),
        |acc, i| {
            let m = sample_matrix(cfg, &mut streams.stream(i));
            if let Some(e) = acc.screen(i, &m, opts)? {
                acc.tally(MeasureLabel::Fisher)
                    .add(jeffreys_log_weight(&m), e.verdict.separable, e.verdict.classical);
            }
            Ok(())
        },
        CensusAccumulator::merge,
    )?;
    Ok(acc.finish(*cfg, start.elapsed()))
}

/// Grid settings of a volume-weighted census.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BuresConfig {
    pub plan: GridPlan,
    pub metrics: Vec<MetricKind>,
}

impl Default for BuresConfig {
    fn default() -> Self {
        Self { plan: GridPlan::default(), metrics: vec![MetricKind::Bures] }
    }
}

impl BuresConfig {
    pub fn estimators(&self) -> &'static [Estimator] {
        match self.plan {
            GridPlan::Regular { .. } => &[Estimator::Raw],
            GridPlan::Random { .. } => &[Estimator::Median, Estimator::TrimmedMean],
        }
    }

    /// Volume labels in metric-major order, then the shadow Fisher label.
    pub fn labels(&self) -> Vec<MeasureLabel> {
        let mut out: Vec<MeasureLabel> = self
            .metrics
            .iter()
            .flat_map(|&metric| {
                self.estimators()
                    .iter()
                    .map(move |&estimator| MeasureLabel::Volume { metric, estimator })
            })
            .collect();
        out.push(MeasureLabel::Fisher);
        out
    }
}

/// Slack on the per-grid ordering `ln V_bures ≤ ln V_km ≤ ln V_max`,
/// relative to the magnitude of the values compared.
const ORDERING_SLACK: f64 = 1e-12;

fn ordered(lo: f64, hi: f64) -> bool {
    lo <= hi + ORDERING_SLACK * lo.abs().max(hi.abs()).max(1.0)
}

/// Volume-weighted census. Every accepted sample is discretized on the
/// planned grids; a rejected kernel discards the sample. Jeffreys weights
/// are tallied on the same surviving population.
pub fn run_bures_census(
    cfg: &SamplerConfig,
    bures: &BuresConfig,
    opts: &RunOptions,
) -> Result<CensusResult, CensusError> {
    cfg.validate()?;
    bures.plan.validate().map_err(|e| CensusError::InvalidConfig(e.to_string()))?;
    if bures.metrics.is_empty() {
        return Err(CensusError::InvalidConfig("at least one metric is required".into()));
    }
    let start = Instant::now();
    let labels = bures.labels();
    let streams = StreamFactory::new(cfg.seed);
    let tol = opts.tolerances;
    let acc = run_chunked(
        cfg.samples,
        opts.workers,
        "bures census",
        || CensusAccumulator::new(&labels),
        |acc, i| {
            let mut rng = streams.stream(i);
            let m = sample_matrix(cfg, &mut rng);
            let Some(eval) = acc.screen(i, &m, opts)? else {
                return Ok(());
            };
            let volumes = match robust_volume(&m, &bures.plan, &MetricKind::ALL, &mut rng, &tol) {
                Ok(v) => v,
                Err(MeasureError::SampleDiscarded(_)) => {
                    acc.counts.discarded_grids += 1;
                    return Ok(());
                }
                Err(MeasureError::SingularBlock) => {
                    acc.counts.singular_kernels += 1;
                    return Ok(());
                }
                Err(e) => return Err(CensusError::InvalidConfig(e.to_string())),
            };
            if volumes.iter().flat_map(|v| &v.log_volumes).any(|x| !x.is_finite()) {
                acc.counts.numerical_faults += 1;
                return Ok(());
            }
            let [b, km, max] = [&volumes[0], &volumes[1], &volumes[2]];
            let in_order = (0..b.log_volumes.len()).all(|g| {
                ordered(b.log_volumes[g], km.log_volumes[g]) && ordered(km.log_volumes[g], max.log_volumes[g])
            });
            acc.counts.ordering_violations += u64::from(!in_order);
            acc.counts.survived += 1;
            let (sep, cls) = (eval.verdict.separable, eval.verdict.classical);
            for &metric in &bures.metrics {
                let v = &volumes[MetricKind::ALL.iter().position(|&k| k == metric).unwrap_or(0)];
                for &estimator in bures.estimators() {
                    acc.tally(MeasureLabel::Volume { metric, estimator }).add(estimator.pick(v), sep, cls);
                }
            }
            acc.tally(MeasureLabel::Fisher).add(jeffreys_log_weight(&m), sep, cls);
            Ok(())
        },
        CensusAccumulator::merge,
    )?;
    Ok(acc.finish(*cfg, start.elapsed()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_census_has_no_probabilities() {
        let cfg = SamplerConfig::two_mode(10.0, 5.0, 0, 1);
        let r = run_classical_census(&cfg, &RunOptions::default()).unwrap();
        assert_eq!(r.counts, CensusCounts::default());
        assert_eq!(r.fisher(), Err(CensusError::EmptyCensus));
    }

    #[test]
    fn counts_are_nested() {
        let cfg = SamplerConfig::two_mode(10.0, 5.0, 20_000, 5);
        let r = run_classical_census(&cfg, &RunOptions::default()).unwrap();
        let c = r.counts;
        assert_eq!(c.generated, 20_000);
        assert!(c.classical <= c.separable && c.separable <= c.accepted && c.accepted <= c.generated);
        let rejected = c.not_positive_definite
            + c.complex_standard_form
            + c.local_determinant
            + c.solver_failures
            + c.uncertainty_rejected
            + c.unphysical_rejected;
        assert_eq!(rejected + c.accepted, c.generated);
        let p = r.fisher().unwrap();
        assert!((0.0..=1.0).contains(&p.prob_sep) && p.prob_classical <= p.prob_sep);
    }

    #[test]
    fn labels_are_stable() {
        let cfg = BuresConfig { plan: GridPlan::default(), metrics: vec![MetricKind::Bures, MetricKind::KuboMori] };
        let names: Vec<String> = cfg.labels().iter().map(ToString::to_string).collect();
        assert_eq!(
            names,
            ["bures-median", "bures-trimmed-mean", "kubo-mori-median", "kubo-mori-trimmed-mean", "fisher"]
        );
        let regular = BuresConfig { plan: GridPlan::Regular { m: 3 }, metrics: vec![MetricKind::Maximal] };
        assert_eq!(regular.labels()[0].to_string(), "maximal-raw");
    }
}
