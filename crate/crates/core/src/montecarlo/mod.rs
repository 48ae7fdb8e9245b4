//! Sampling, filtering and weighted estimation.
//!
//! Every sample index owns its own random stream and samples are folded in
//! fixed-size chunks merged in index order, so results do not depend on the
//! number of workers.

mod accumulate;
mod census;
mod entropy_probe;
mod exec;
mod one_mode;
mod rng;
mod sampler;

pub use accumulate::{LogSumExp, WeightedEstimate, WeightedTally};
pub use census::{
    run_bures_census, run_classical_census, BuresConfig, CensusAccumulator, CensusCounts,
    CensusResult, Estimator, MeasureLabel, RunOptions,
};
pub use entropy_probe::{run_entropy_probe, EntropyExample, EntropyReport};
pub use exec::{run_chunked, CHUNK};
pub use one_mode::{run_one_mode_classicality, OneModePoint};
pub use rng::{derive_seed, StreamFactory};
pub use sampler::{sample_matrix, sample_one_mode, SamplerConfig};
