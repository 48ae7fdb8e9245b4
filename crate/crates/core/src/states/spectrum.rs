use nalgebra::{Matrix2, Matrix4};
use num_complex::Complex64;

use super::{CovarianceMatrix, SymplecticForm};
use crate::linalg::det2;

/// Symplectic eigenvalues `ν₁ ≥ ν₂`, the moduli of the eigenvalues of `iΩM`.
///
/// Taken from the Hermitian matrix `i M^½ Ω M^½`, whose spectrum is
/// `±ν₁, ±ν₂`. This stays accurate when `ν₁ = ν₂`, where the closed form
/// through `det A + det B + 2 det C` loses half its digits.
pub fn symplectic_eigenvalues(m: &CovarianceMatrix) -> (f64, f64) {
    let eig = m.matrix().symmetric_eigen();
    let root = eig.eigenvectors
        * Matrix4::from_diagonal(&eig.eigenvalues.map(|l| l.max(0.0).sqrt()))
        * eig.eigenvectors.transpose();
    let skew = root * SymplecticForm::matrix() * root;
    let h = Matrix4::from_fn(|i, j| Complex64::new(0.0, 0.5 * (skew[(i, j)] - skew[(j, i)])));
    let mut ev: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    (ev[3], ev[2])
}

/// Entropy contribution of one symplectic eigenvalue, in nats.
fn mode_entropy(nu: f64) -> f64 {
    if nu <= 1.0 {
        return 0.0;
    }
    let plus = 0.5 * (nu + 1.0);
    let minus = 0.5 * (nu - 1.0);
    plus * plus.ln() - minus * minus.ln()
}

/// Von Neumann entropy of the Gaussian state, in nats.
pub fn entropy(m: &CovarianceMatrix) -> f64 {
    let (nu1, nu2) = symplectic_eigenvalues(m);
    mode_entropy(nu1) + mode_entropy(nu2)
}

/// Entropy of a one-mode state; its symplectic eigenvalue is `√det A`.
pub fn one_mode_entropy(a: &Matrix2<f64>) -> f64 {
    mode_entropy(det2(a).max(0.0).sqrt())
}

/// `Tr ρ² = (det M)^(-1/2)`; its reciprocal is the participation ratio.
pub fn purity(m: &CovarianceMatrix) -> f64 {
    1.0 / m.det().sqrt()
}
