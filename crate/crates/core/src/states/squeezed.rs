use nalgebra::Matrix2;
use serde::{Deserialize, Serialize};

/// One-mode squeezed thermal state: inverse-temperature-like `beta > 0`,
/// squeeze `r ≥ 0` and phase `theta ∈ (-π, π]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SqueezedThermalParams {
    pub beta: f64,
    pub r: f64,
    pub theta: f64,
}

impl SqueezedThermalParams {
    pub fn new(beta: f64, r: f64, theta: f64) -> Self {
        Self { beta, r, theta }
    }

    pub fn covariance(&self) -> Matrix2<f64> {
        squeezed_thermal_covariance(self)
    }
}

/// `coth(β/4) · R(θ) diag(e^{2r}, e^{-2r}) R(θ)ᵀ`.
///
/// The thermal factor is `2n̄ + 1` for the Boltzmann weight `e^{-β/2}` per
/// quantum; `β = ∞` gives the squeezed vacuum.
pub fn squeezed_thermal_covariance(p: &SqueezedThermalParams) -> Matrix2<f64> {
    let nu = 1.0 / (0.25 * p.beta).tanh();
    let (sin, cos) = p.theta.sin_cos();
    let rot = Matrix2::new(cos, -sin, sin, cos);
    let sq = Matrix2::new((2.0 * p.r).exp(), 0.0, 0.0, (-2.0 * p.r).exp());
    let a = rot * sq * rot.transpose() * nu;
    // exact symmetry
    Matrix2::new(a[(0, 0)], a[(0, 1)], a[(0, 1)], a[(1, 1)])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn limits() {
        let vac = squeezed_thermal_covariance(&SqueezedThermalParams::new(f64::INFINITY, 0.0, 0.0));
        assert_eq!(vac, Matrix2::identity());
        let th = squeezed_thermal_covariance(&SqueezedThermalParams::new(2.0, 0.0, 0.7));
        let coth = 1.0 / 0.5f64.tanh();
        assert!((th - Matrix2::identity() * coth).abs().max() < 1e-14);
    }

    #[test]
    fn determinant_is_thermal_factor_squared() {
        let p = SqueezedThermalParams::new(3.0, 0.8, -1.1);
        let a = p.covariance();
        let coth = 1.0 / 0.75f64.tanh();
        assert!((a.determinant() - coth * coth).abs() < 1e-12);
        assert_eq!(a[(0, 1)], a[(1, 0)]);
    }
}
