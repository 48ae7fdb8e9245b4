//! Prior measures on covariance matrices.
//!
//! The Jeffreys weight is closed form. The monotone-metric volume elements
//! are estimated by sampling the position-space density matrix on a small
//! grid and feeding the normalized spectrum of the resulting Gram matrix to
//! the volume formula of the chosen metric.

mod grid;
mod kernel;
mod volume;

use nalgebra::Matrix2;

use crate::linalg::det2;
use crate::states::CovarianceMatrix;

pub use grid::{GridKind, GridSpec};
pub use kernel::{discretize, GaussianKernel, KernelMatrix};
pub use volume::{
    log_pair_mean, log_volume_element, robust_volume, robust_volume_on_grids, GridPlan,
    MetricKind, VolumeEstimate,
};

/// `-(5/2) ln det M`, Jeffreys' prior for a zero-mean four-variate normal
/// up to a constant.
pub fn jeffreys_log_weight(m: &CovarianceMatrix) -> f64 {
    -2.5 * m.det().ln()
}

/// `-(3/2) ln det A` for a single mode.
pub fn jeffreys_log_weight_one_mode(a: &Matrix2<f64>) -> f64 {
    -1.5 * det2(a).ln()
}
