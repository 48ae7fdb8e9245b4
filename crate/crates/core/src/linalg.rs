use nalgebra::{DMatrix, Matrix4};
use num_complex::Complex64;

pub(crate) fn min_symmetric_eigenvalue(m: &Matrix4<f64>) -> f64 {
    m.symmetric_eigenvalues().min()
}

/// Smallest eigenvalue of the Hermitian matrix `re + i·im`.
pub(crate) fn min_hermitian_eigenvalue(re: &Matrix4<f64>, im: &Matrix4<f64>) -> f64 {
    let h = Matrix4::from_fn(|i, j| Complex64::new(re[(i, j)], im[(i, j)]));
    h.symmetric_eigenvalues().min()
}

/// Eigenvalues (ascending) of a dense Hermitian matrix.
pub(crate) fn hermitian_eigenvalues(h: &DMatrix<Complex64>) -> Vec<f64> {
    let mut ev: Vec<f64> = h.clone().symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

pub(crate) fn det2(a: &nalgebra::Matrix2<f64>) -> f64 {
    a[(0, 0)] * a[(1, 1)] - a[(0, 1)] * a[(1, 0)]
}
