use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64;

use super::GridSpec;
use crate::linalg::hermitian_eigenvalues;
use crate::states::CovarianceMatrix;
use crate::{MeasureError, Tolerances};

/// Position-space density matrix `ρ(x, x')` of a zero-mean Gaussian state,
/// for any number of modes, scaled so that `ρ(0, 0) = 1`.
///
/// With `K` the inverse covariance in `(x…, p…)` block order, `q` the
/// midpoint and `v = x - x'`:
///
/// `ρ = exp(-½ qᵀ(K_qq - K_qp K_pp⁻¹ K_qpᵀ) q - ⅛ vᵀ K_pp⁻¹ v - (i/2) qᵀ K_qp K_pp⁻¹ v)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianKernel {
    modes: usize,
    quad: DMatrix<f64>,
    coherence: DMatrix<f64>,
    phase: DMatrix<f64>,
}

impl GaussianKernel {
    /// `cov` is `2n × 2n` in `(x₁, p₁, …, xₙ, pₙ)` order.
    pub fn new(cov: &DMatrix<f64>) -> Result<Self, MeasureError> {
        let dim = cov.nrows();
        if dim == 0 || !dim.is_multiple_of(2) || cov.ncols() != dim {
            return Err(MeasureError::InvalidGrid(format!("covariance of size {dim} is not 2n × 2n")));
        }
        let n = dim / 2;
        let order: Vec<usize> = (0..n).map(|i| 2 * i).chain((0..n).map(|i| 2 * i + 1)).collect();
        let sigma = DMatrix::from_fn(dim, dim, |i, j| cov[(order[i], order[j])]);
        let k = sigma.try_inverse().ok_or(MeasureError::SingularBlock)?;
        let kqq = k.view((0, 0), (n, n)).into_owned();
        let kqp = k.view((0, n), (n, n)).into_owned();
        let kpp = k.view((n, n), (n, n)).into_owned();
        let kpp_inv = kpp.try_inverse().ok_or(MeasureError::SingularBlock)?;
        let phase = &kqp * &kpp_inv;
        let quad = &kqq - &phase * kqp.transpose();
        if quad.iter().chain(kpp_inv.iter()).any(|v| !v.is_finite()) {
            return Err(MeasureError::SingularBlock);
        }
        Ok(Self {
            modes: n,
            quad: symmetrize(quad),
            coherence: symmetrize(kpp_inv),
            phase,
        })
    }

    pub fn two_mode(m: &CovarianceMatrix) -> Result<Self, MeasureError> {
        Self::new(&DMatrix::from_iterator(4, 4, m.matrix().iter().copied()))
    }

    pub fn one_mode(a: &Matrix2<f64>) -> Result<Self, MeasureError> {
        Self::new(&DMatrix::from_iterator(2, 2, a.iter().copied()))
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn eval(&self, x: &[f64], xp: &[f64]) -> Complex64 {
        let n = self.modes;
        assert!(x.len() == n && xp.len() == n, "point dimension must match the mode count");
        let mut re = 0.0;
        let mut im = 0.0;
        for i in 0..n {
            let qi = 0.5 * (x[i] + xp[i]);
            let vi = x[i] - xp[i];
            for j in 0..n {
                let qj = 0.5 * (x[j] + xp[j]);
                let vj = x[j] - xp[j];
                re -= 0.5 * qi * self.quad[(i, j)] * qj + 0.125 * vi * self.coherence[(i, j)] * vj;
                im -= 0.5 * qi * self.phase[(i, j)] * vj;
            }
        }
        Complex64::from_polar(re.exp(), im)
    }

    /// Gram matrix over the Cartesian grid, points in row-major order. Only
    /// the upper triangle is evaluated; the rest is its conjugate.
    pub fn gram(&self, grid: &GridSpec) -> DMatrix<Complex64> {
        let points = grid_points(grid.coords(), self.modes);
        let size = points.len();
        let mut gamma = DMatrix::zeros(size, size);
        for a in 0..size {
            let diag = self.eval(&points[a], &points[a]);
            gamma[(a, a)] = Complex64::new(diag.re, 0.0);
            for b in a + 1..size {
                let v = self.eval(&points[a], &points[b]);
                gamma[(a, b)] = v;
                gamma[(b, a)] = v.conj();
            }
        }
        gamma
    }
}

fn symmetrize(m: DMatrix<f64>) -> DMatrix<f64> {
    (&m + m.transpose()) * 0.5
}

fn grid_points(coords: &[f64], modes: usize) -> Vec<Vec<f64>> {
    let m = coords.len();
    let total = m.pow(modes as u32);
    (0..total)
        .map(|mut idx| {
            let mut p = vec![0.0; modes];
            for slot in p.iter_mut().rev() {
                *slot = coords[idx % m];
                idx /= m;
            }
            p
        })
        .collect()
}

/// Discretized density matrix with its normalized spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelMatrix {
    pub gamma: DMatrix<Complex64>,
    /// Ascending, summing to one.
    pub eigenvalues: Vec<f64>,
    /// `Σ ln λ` of the normalized spectrum.
    pub log_det: f64,
}

/// Builds the Gram matrix of `kernel` on `grid` and rejects it when its
/// smallest eigenvalue is at most `tol.kernel_eigenvalue` times the largest.
pub fn discretize(
    kernel: &GaussianKernel,
    grid: &GridSpec,
    tol: &Tolerances,
) -> Result<KernelMatrix, MeasureError> {
    let gamma = kernel.gram(grid);
    let raw = hermitian_eigenvalues(&gamma);
    let (min, max) = (raw[0], raw[raw.len() - 1]);
    if !(min > tol.kernel_eigenvalue * max) || !max.is_finite() {
        return Err(MeasureError::NonPositiveSpectrum { min, max });
    }
    let total: f64 = raw.iter().sum();
    let eigenvalues: Vec<f64> = raw.iter().map(|l| l / total).collect();
    let log_det = eigenvalues.iter().map(|l| l.ln()).sum();
    Ok(KernelMatrix { gamma, eigenvalues, log_det })
}
