mod common;

use nalgebra::{Matrix2, Matrix4};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::random_physical;
use cvcensus::measures::{discretize, GaussianKernel, GridKind, GridSpec};
use cvcensus::states::{squeezed_thermal_covariance, CovarianceMatrix, SqueezedThermalParams};
use cvcensus::Tolerances;

/// `∫ W(q, p) e^{i p·v/2} dp` by the trapezoid rule on a box around the
/// conditional mean of `p`, with `W = exp(-½ ξᵀ M⁻¹ ξ)` in `(x₁, p₁, x₂, p₂)`.
fn fourier_of_wigner(m: &Matrix4<f64>, q: [f64; 2], v: [f64; 2]) -> Complex64 {
    let k = m.try_inverse().unwrap();
    let kpp = Matrix2::new(k[(1, 1)], k[(1, 3)], k[(3, 1)], k[(3, 3)]);
    let kpq = Matrix2::new(k[(1, 0)], k[(1, 2)], k[(3, 0)], k[(3, 2)]);
    let cond = kpp.try_inverse().unwrap();
    let centre = -(cond * kpq) * nalgebra::Vector2::new(q[0], q[1]);
    let ev = cond.symmetric_eigenvalues();
    let (s_min, s_max) = (ev.min().sqrt(), ev.max().sqrt());
    let h = s_min / 2.0;
    let half = (11.0 * s_max / h).ceil() as i64;
    let mut sum = Complex64::new(0.0, 0.0);
    for i in -half..=half {
        for j in -half..=half {
            let p = [centre[0] + i as f64 * h, centre[1] + j as f64 * h];
            let xi = nalgebra::Vector4::new(q[0], p[0], q[1], p[1]);
            let w = (-0.5 * xi.dot(&(k * xi))).exp();
            sum += Complex64::from_polar(w, 0.5 * (p[0] * v[0] + p[1] * v[1]));
        }
    }
    sum * h * h
}

#[test]
fn kernel_matches_fourier_transform_of_the_wigner_function() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let m = random_physical(&mut rng, 3.0, 0.6);
        let kernel = GaussianKernel::two_mode(&m).unwrap();
        let norm = fourier_of_wigner(m.matrix(), [0.0; 2], [0.0; 2]);
        for _ in 0..10 {
            let x: [f64; 2] = std::array::from_fn(|_| rng.random_range(-1.5..1.5));
            let xp: [f64; 2] = std::array::from_fn(|_| rng.random_range(-1.5..1.5));
            let q = [0.5 * (x[0] + xp[0]), 0.5 * (x[1] + xp[1])];
            let v = [x[0] - xp[0], x[1] - xp[1]];
            let expected = fourier_of_wigner(m.matrix(), q, v) / norm;
            let got = kernel.eval(&x, &xp);
            worst = worst.max((got - expected).norm() / expected.norm());
        }
    }
    assert!(worst < 1e-8, "worst relative error {worst:e}");
}

#[test]
fn discretized_purity_matches_determinant() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let grid = GridSpec::regular(11).unwrap();
    let mut tested = 0;
    while tested < 10 {
        let m = random_physical(&mut rng, 1.6, 0.25);
        if m.matrix().symmetric_eigenvalues().max() > 3.0 {
            continue;
        }
        let kernel = GaussianKernel::two_mode(&m).unwrap();
        let gamma = kernel.gram(&grid);
        let trace: f64 = (0..gamma.nrows()).map(|i| gamma[(i, i)].re).sum();
        let frob: f64 = gamma.iter().map(|z| z.norm_sqr()).sum();
        let discrete = frob / (trace * trace);
        let exact = 1.0 / m.det().sqrt();
        assert!((discrete / exact - 1.0).abs() < 0.02, "{discrete} vs {exact}");
        tested += 1;
    }
}

fn thermal_entropy(nu: f64) -> f64 {
    if nu <= 1.0 {
        return 0.0;
    }
    let (a, b) = (0.5 * (nu + 1.0), 0.5 * (nu - 1.0));
    a * a.ln() - b * b.ln()
}

#[test]
fn fine_grid_spectrum_reproduces_the_entropy() {
    let tol = Tolerances { kernel_eigenvalue: -1.0, ..Tolerances::default() };
    let coords: Vec<f64> = (0..=120).map(|i| -15.0 + 0.25 * i as f64).collect();
    let grid = GridSpec::from_coords(coords, GridKind::Regular).unwrap();
    for (beta, r, theta) in [(1.0, 0.0, 0.0), (2.0, 0.3, 0.4), (0.8, 0.5, -1.0), (6.0, 0.2, 0.0)] {
        let a = squeezed_thermal_covariance(&SqueezedThermalParams::new(beta, r, theta));
        let nu = (a[(0, 0)] * a[(1, 1)] - a[(0, 1)] * a[(1, 0)]).sqrt();
        let kernel = GaussianKernel::one_mode(&a).unwrap();
        let spectrum = discretize(&kernel, &grid, &tol).unwrap().eigenvalues;
        let s: f64 = spectrum.iter().filter(|&&l| l > 0.0).map(|&l| -l * l.ln()).sum();
        assert!((s - thermal_entropy(nu)).abs() < 1e-6, "beta {beta}: {s} vs {}", thermal_entropy(nu));
    }
}

#[test]
fn product_state_kernel_factorizes() {
    let a = squeezed_thermal_covariance(&SqueezedThermalParams::new(2.0, 0.4, 0.3));
    let b = squeezed_thermal_covariance(&SqueezedThermalParams::new(3.0, 0.1, -0.7));
    let m = CovarianceMatrix::from_blocks(&a, &b, &Matrix2::zeros());
    let (ka, kb) = (GaussianKernel::one_mode(&a).unwrap(), GaussianKernel::one_mode(&b).unwrap());
    let k = GaussianKernel::two_mode(&m).unwrap();
    let (x, xp) = ([0.4, -0.9], [-1.1, 0.3]);
    let joint = k.eval(&x, &xp);
    let split = ka.eval(&x[..1], &xp[..1]) * kb.eval(&x[1..], &xp[1..]);
    assert!((joint - split).norm() < 1e-14);
}
