//! Two-mode covariance matrices, their local standard forms and symplectic
//! spectra.

use nalgebra::{Matrix2, Matrix4};
use serde::{Deserialize, Serialize};

use crate::linalg::{det2, min_hermitian_eigenvalue, min_symmetric_eigenvalue};
use crate::{StateError, Tolerances};

mod spectrum;
mod squeezed;
mod standard_form;

pub use spectrum::{entropy, one_mode_entropy, purity, symplectic_eigenvalues};
pub use squeezed::{squeezed_thermal_covariance, SqueezedThermalParams};
pub use standard_form::{
    to_standard_form_one, to_standard_form_two, StandardFormI, StandardFormII,
};

/// Real symmetric 4×4 covariance matrix in `(x₁, p₁, x₂, p₂)` order.
///
/// Symmetry is structural: every constructor writes the upper triangle and
/// mirrors it, so `m[(i, j)] == m[(j, i)]` holds bit for bit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CovarianceMatrix(Matrix4<f64>);

/// The constant `Ω = J ⊕ J` with `J = [[0, 1], [-1, 0]]`.
pub struct SymplecticForm;

impl SymplecticForm {
    pub fn matrix() -> Matrix4<f64> {
        Matrix4::new(
            0.0, 1.0, 0.0, 0.0, //
            -1.0, 0.0, 0.0, 0.0, //
            0.0, 0.0, 0.0, 1.0, //
            0.0, 0.0, -1.0, 0.0,
        )
    }

    pub fn one_mode() -> Matrix2<f64> {
        Matrix2::new(0.0, 1.0, -1.0, 0.0)
    }
}

impl CovarianceMatrix {
    pub fn identity() -> Self {
        Self(Matrix4::identity())
    }

    /// Builds the matrix from its four diagonal entries and the six upper
    /// off-diagonals in row-major order `(12, 13, 14, 23, 24, 34)`.
    pub fn from_entries(diag: [f64; 4], upper: [f64; 6]) -> Self {
        let mut m = Matrix4::from_diagonal(&diag.into());
        let mut idx = 0;
        for i in 0..4 {
            for j in (i + 1)..4 {
                m[(i, j)] = upper[idx];
                m[(j, i)] = upper[idx];
                idx += 1;
            }
        }
        Self(m)
    }

    /// Rejects anything that is not exactly symmetric.
    pub fn try_new(m: Matrix4<f64>) -> Result<Self, StateError> {
        if m == m.transpose() {
            Ok(Self(m))
        } else {
            Err(StateError::NotSymmetric)
        }
    }

    /// Mirrors the upper triangle of `m` into the lower one.
    pub fn from_upper_triangle(m: &Matrix4<f64>) -> Self {
        let mut out = *m;
        for i in 0..4 {
            for j in (i + 1)..4 {
                out[(j, i)] = out[(i, j)];
            }
        }
        Self(out)
    }

    /// `[[A, C], [Cᵀ, B]]`; `a` and `b` are read from their upper triangles.
    pub fn from_blocks(a: &Matrix2<f64>, b: &Matrix2<f64>, c: &Matrix2<f64>) -> Self {
        let mut m = Matrix4::zeros();
        m.fixed_view_mut::<2, 2>(0, 0).copy_from(a);
        m.fixed_view_mut::<2, 2>(2, 2).copy_from(b);
        m.fixed_view_mut::<2, 2>(0, 2).copy_from(c);
        Self::from_upper_triangle(&m)
    }

    pub fn matrix(&self) -> &Matrix4<f64> {
        &self.0
    }

    pub fn block_a(&self) -> Matrix2<f64> {
        self.0.fixed_view::<2, 2>(0, 0).into_owned()
    }

    pub fn block_b(&self) -> Matrix2<f64> {
        self.0.fixed_view::<2, 2>(2, 2).into_owned()
    }

    pub fn block_c(&self) -> Matrix2<f64> {
        self.0.fixed_view::<2, 2>(0, 2).into_owned()
    }

    pub fn det(&self) -> f64 {
        self.0.determinant()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self(self.0 * factor)
    }

    /// Congruence `S M Sᵀ`, re-symmetrized from the upper triangle.
    pub fn transformed(&self, s: &Matrix4<f64>) -> Self {
        Self::from_upper_triangle(&(s * self.0 * s.transpose()))
    }

    /// Exchanges the two modes.
    pub fn swap_modes(&self) -> Self {
        let p = [2, 3, 0, 1];
        Self(Matrix4::from_fn(|i, j| self.0[(p[i], p[j])]))
    }

    /// Momentum reversal of mode 2, `ΛMΛ` with `Λ = diag(1, 1, 1, -1)`:
    /// the phase-space picture of the partial transpose.
    pub fn mirrored(&self) -> Self {
        let mut m = self.0;
        for k in 0..3 {
            m[(k, 3)] = -m[(k, 3)];
            m[(3, k)] = -m[(3, k)];
        }
        Self(m)
    }

    /// Two-mode squeezed vacuum with squeeze parameter `r`.
    pub fn two_mode_squeezed_vacuum(r: f64) -> Self {
        let (c, s) = ((2.0 * r).cosh(), (2.0 * r).sinh());
        Self::from_blocks(
            &(Matrix2::identity() * c),
            &(Matrix2::identity() * c),
            &Matrix2::new(s, 0.0, 0.0, -s),
        )
    }
}

/// All four eigenvalues strictly positive.
pub fn is_positive_definite(m: &CovarianceMatrix) -> bool {
    min_symmetric_eigenvalue(m.matrix()) > 0.0
}

/// Smallest eigenvalue of the Hermitian matrix `M + iΩ`.
pub fn uncertainty_margin(m: &CovarianceMatrix) -> f64 {
    min_hermitian_eigenvalue(m.matrix(), &SymplecticForm::matrix())
}

/// The full uncertainty principle: `M + iΩ ⪰ 0`.
pub fn is_physical(m: &CovarianceMatrix, tol: &Tolerances) -> bool {
    uncertainty_margin(m) >= -tol.physical
}

/// A 2×2 one-mode block is physical iff it is positive definite with
/// determinant at least one.
pub fn is_physical_one_mode(a: &Matrix2<f64>, tol: &Tolerances) -> bool {
    a[(0, 0)] > 0.0 && det2(a) >= 1.0 - tol.physical
}
