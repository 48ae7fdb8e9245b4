use thiserror::Error;

use crate::states::CovarianceMatrix;

/// Failures of the state-level reductions.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum StateError {
    #[error("matrix is not exactly symmetric")]
    NotSymmetric,
    #[error("standard form I has complex roots (discriminant {discriminant:e})")]
    ComplexRoot { discriminant: f64 },
    #[error("local determinant below one (n = {n}, m = {m})")]
    LocalDeterminant { n: f64, m: f64 },
    #[error("standard form II solver did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("degenerate standard form: n = m = 1 with nonzero correlations")]
    Degenerate,
}

/// Failures of the prior-measure computations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum MeasureError {
    #[error("momentum block of the inverse covariance is singular")]
    SingularBlock,
    #[error("discretized kernel has a non-positive eigenvalue ({min:e}, max {max:e})")]
    NonPositiveSpectrum { min: f64, max: f64 },
    #[error("sample discarded: {0}")]
    SampleDiscarded(Box<MeasureError>),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
}

/// Failures of census runs.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum CensusError {
    #[error("census has no accepted samples; probabilities are undefined")]
    EmptyCensus,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(
        "oracle disagreement at sample {index}: variance margin {margin_sep:e}, ppt margin {margin_ppt:e}"
    )]
    OracleDisagreement {
        index: u64,
        matrix: Box<CovarianceMatrix>,
        margin_sep: f64,
        margin_ppt: f64,
    },
}

/// Failures of the fidelity routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("fidelity domain error: det(A1 + A2) + P = {0:e} < 0")]
    Domain(f64),
    #[error("expected a thermal diagonal 4x4 covariance matrix")]
    Shape,
    #[error("finite-difference steps disagree (relative {0:e})")]
    Step(f64),
    #[error(transparent)]
    State(#[from] StateError),
}
