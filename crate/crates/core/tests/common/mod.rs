#![allow(dead_code)]

use nalgebra::{Matrix2, Matrix4};
use rand::Rng;

use cvcensus::states::CovarianceMatrix;

pub fn rotation(phi: f64) -> Matrix2<f64> {
    let (s, c) = phi.sin_cos();
    Matrix2::new(c, -s, s, c)
}

/// `R(φ) diag(eˢ, e⁻ˢ) R(ψ)`, a generic element of Sp(2, ℝ).
pub fn local_symplectic(phi: f64, squeeze: f64, psi: f64) -> Matrix2<f64> {
    rotation(phi) * Matrix2::new(squeeze.exp(), 0.0, 0.0, (-squeeze).exp()) * rotation(psi)
}

pub fn random_local<R: Rng>(rng: &mut R, max_squeeze: f64) -> Matrix2<f64> {
    let tau = std::f64::consts::TAU;
    local_symplectic(
        rng.random::<f64>() * tau,
        rng.random_range(-max_squeeze..max_squeeze),
        rng.random::<f64>() * tau,
    )
}

pub fn direct_sum(s1: &Matrix2<f64>, s2: &Matrix2<f64>) -> Matrix4<f64> {
    let mut s = Matrix4::zeros();
    s.fixed_view_mut::<2, 2>(0, 0).copy_from(s1);
    s.fixed_view_mut::<2, 2>(2, 2).copy_from(s2);
    s
}

pub fn beam_splitter(theta: f64) -> Matrix4<f64> {
    let (s, c) = theta.sin_cos();
    let i = Matrix2::identity();
    let mut m = Matrix4::zeros();
    m.fixed_view_mut::<2, 2>(0, 0).copy_from(&(i * c));
    m.fixed_view_mut::<2, 2>(0, 2).copy_from(&(i * s));
    m.fixed_view_mut::<2, 2>(2, 0).copy_from(&(i * -s));
    m.fixed_view_mut::<2, 2>(2, 2).copy_from(&(i * c));
    m
}

pub fn two_mode_squeezer(r: f64) -> Matrix4<f64> {
    let z = Matrix2::new(r.sinh(), 0.0, 0.0, -r.sinh());
    let mut m = Matrix4::zeros();
    m.fixed_view_mut::<2, 2>(0, 0).copy_from(&(Matrix2::identity() * r.cosh()));
    m.fixed_view_mut::<2, 2>(0, 2).copy_from(&z);
    m.fixed_view_mut::<2, 2>(2, 0).copy_from(&z);
    m.fixed_view_mut::<2, 2>(2, 2).copy_from(&(Matrix2::identity() * r.cosh()));
    m
}

/// Physical by construction: a symplectic congruence of a thermal state
/// with symplectic eigenvalues `ν₁, ν₂ ≥ 1`.
pub fn random_physical<R: Rng>(rng: &mut R, max_nu: f64, max_squeeze: f64) -> CovarianceMatrix {
    let nu1 = rng.random_range(1.0..max_nu);
    let nu2 = rng.random_range(1.0..max_nu);
    let thermal = CovarianceMatrix::from_entries([nu1, nu1, nu2, nu2], [0.0; 6]);
    let s = direct_sum(&random_local(rng, max_squeeze), &random_local(rng, max_squeeze))
        * beam_splitter(rng.random::<f64>() * std::f64::consts::PI)
        * two_mode_squeezer(rng.random_range(0.0..max_squeeze))
        * direct_sum(&random_local(rng, max_squeeze), &random_local(rng, max_squeeze));
    thermal.transformed(&s)
}
