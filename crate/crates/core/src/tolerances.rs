use serde::{Deserialize, Serialize};

/// Every numerical threshold used by the filter chain and the measures.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// `M + iΩ` may dip this far below zero and still count as physical.
    pub physical: f64,
    /// Same slack for the mirror-reflected matrix in the PPT test.
    pub ppt: f64,
    /// `M - I` must have all eigenvalues above this to be classical.
    pub classical: f64,
    /// Slack on the ≥ comparisons against the variance bounds.
    pub bound: f64,
    /// Relative slack on the standard-form-I discriminant.
    pub discriminant: f64,
    /// Convergence threshold on the scaled standard-form-II residuals.
    pub newton_residual: f64,
    pub newton_max_iterations: usize,
    /// A kernel is rejected when its smallest eigenvalue is at most this
    /// fraction of its largest. Zero reproduces the plain "non-positive" rule.
    pub kernel_eigenvalue: f64,
    /// Margins smaller than this are inside the boundary band, where the
    /// two separability verdicts may legitimately disagree.
    pub margin_band: f64,
    /// Minimum spacing between random grid coordinates.
    pub grid_coincidence: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            physical: 1e-10,
            ppt: 1e-10,
            classical: 1e-12,
            bound: 1e-12,
            discriminant: 1e-10,
            newton_residual: 1e-12,
            newton_max_iterations: 200,
            kernel_eigenvalue: 0.0,
            margin_band: 1e-9,
            grid_coincidence: 1e-9,
        }
    }
}
