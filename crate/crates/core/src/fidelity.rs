//! Gaussian fidelities, the Bures distance and the metric they induce on
//! one-mode squeezed thermal states.
//!
//! The fidelity here is the squared Uhlmann fidelity, `(Tr √(√ρ₁ ρ₂ √ρ₁))²`,
//! and the Bures distance is `2(1 - F)`.

use nalgebra::{Matrix2, Matrix3, Matrix4};
use serde::{Deserialize, Serialize};

use crate::linalg::det2;
use crate::quadrature::integrate;
use crate::states::SqueezedThermalParams;
use crate::Error;

/// Slack on the radicand before it is treated as a domain error.
const RADICAND_SLACK: f64 = 1e-12;

/// `2 / (√(det(A₁ + A₂) + P) - √P)` with `P = (det A₁ - 1)(det A₂ - 1)`.
pub fn fidelity_one_mode(a1: &Matrix2<f64>, a2: &Matrix2<f64>) -> Result<f64, Error> {
    let p = (det2(a1) - 1.0) * (det2(a2) - 1.0);
    let radicand = det2(&(a1 + a2)) + p;
    if radicand < -RADICAND_SLACK || p < -RADICAND_SLACK {
        return Err(Error::Domain(radicand.min(p)));
    }
    Ok(2.0 / (radicand.max(0.0).sqrt() - p.max(0.0).sqrt()))
}

fn thermal_diagonal(d: &Matrix4<f64>) -> Result<[f64; 2], Error> {
    let off_diagonal_zero = (0..4).all(|i| (0..4).all(|j| i == j || d[(i, j)] == 0.0));
    if !off_diagonal_zero || d[(0, 0)] != d[(1, 1)] || d[(2, 2)] != d[(3, 3)] {
        return Err(Error::Shape);
    }
    Ok([d[(0, 0)], d[(2, 2)]])
}

/// Fidelity of two product thermal states `diag(a, a, b, b)`:
/// `Π 2 / (aᵢbᵢ + 1 - √((aᵢ² - 1)(bᵢ² - 1)))` over the two modes.
pub fn fidelity_two_mode_diagonal(d1: &Matrix4<f64>, d2: &Matrix4<f64>) -> Result<f64, Error> {
    let (x, y) = (thermal_diagonal(d1)?, thermal_diagonal(d2)?);
    let mut f = 1.0;
    for (a, b) in x.into_iter().zip(y) {
        let p = (a * a - 1.0) * (b * b - 1.0);
        if p < -RADICAND_SLACK {
            return Err(Error::Domain(p));
        }
        f *= 2.0 / (a * b + 1.0 - p.max(0.0).sqrt());
    }
    Ok(f)
}

pub fn bures_distance_sq(fidelity: f64) -> f64 {
    2.0 * (1.0 - fidelity)
}

fn params_at(p: &SqueezedThermalParams, delta: [f64; 3]) -> SqueezedThermalParams {
    SqueezedThermalParams::new(p.beta + delta[0], p.r + delta[1], p.theta + delta[2])
}

fn distance(base: &Matrix2<f64>, p: &SqueezedThermalParams, delta: [f64; 3]) -> Result<f64, Error> {
    Ok(bures_distance_sq(fidelity_one_mode(base, &params_at(p, delta).covariance())?))
}

fn metric_at_step(p: &SqueezedThermalParams, h: f64) -> Result<Matrix3<f64>, Error> {
    let base = p.covariance();
    let steps = [h * p.beta.abs().max(1.0), h * p.r.abs().max(1.0), h * p.theta.abs().max(1.0)];
    let shift = |a: usize, sa: f64, b: usize, sb: f64| {
        let mut d = [0.0; 3];
        d[a] += sa * steps[a];
        d[b] += sb * steps[b];
        distance(&base, p, d)
    };
    let mut g = Matrix3::zeros();
    for a in 0..3 {
        let mut plus = [0.0; 3];
        plus[a] = steps[a];
        let mut minus = [0.0; 3];
        minus[a] = -steps[a];
        g[(a, a)] = (distance(&base, p, plus)? + distance(&base, p, minus)?) / (steps[a] * steps[a]);
        for b in a + 1..3 {
            let v = (shift(a, 1.0, b, 1.0)? - shift(a, 1.0, b, -1.0)? - shift(a, -1.0, b, 1.0)?
                + shift(a, -1.0, b, -1.0)?)
                / (4.0 * steps[a] * steps[b]);
            g[(a, b)] = v;
            g[(b, a)] = v;
        }
    }
    Ok(g)
}

/// Metric in `(β, r, θ)` from central second differences of the Bures
/// distance `D(p, p + δ)`, with steps `h · max(|pₐ|, 1)`.
///
/// The estimate at `h/2` must agree with the one at `h` to `1e-3` relative
/// (largest entry); the Richardson combination of the two is returned.
pub fn metric_by_finite_difference(p: &SqueezedThermalParams, h: f64) -> Result<Matrix3<f64>, Error> {
    let coarse = metric_at_step(p, h)?;
    let fine = metric_at_step(p, 0.5 * h)?;
    let scale = fine.abs().max();
    let rel = (fine - coarse).abs().max() / scale;
    if !(rel <= 1e-3) {
        return Err(Error::Step(rel));
    }
    Ok((fine * 4.0 - coarse) / 3.0)
}

/// Closed-form marginals of the Bures volume element on squeezed thermal
/// states, `f(r) g(β)`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MarginalDensity;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Marginal {
    F,
    G,
}

impl MarginalDensity {
    pub fn f(&self, r: f64) -> f64 {
        (2.0 * r).sinh()
    }

    pub fn g(&self, beta: f64) -> f64 {
        let q = 0.25 * beta;
        q.cosh() / q.tanh() / (2.0 * q).cosh() / 8.0
    }

    pub fn eval(&self, which: Marginal, x: f64) -> f64 {
        match which {
            Marginal::F => self.f(x),
            Marginal::G => self.g(x),
        }
    }
}

/// `∫_ε^R` of the chosen marginal with `ε = 1e-6`.
pub fn improperness_probe(density: &MarginalDensity, which: Marginal, upper: f64) -> f64 {
    const EPS: f64 = 1e-6;
    integrate(|x| density.eval(which, x), EPS, upper, 0.0, 1e-13, 4000).value
}

/// Ratios `√det g / (f(r) g(β))` over a parameter grid at `θ = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossValidation {
    /// `(β, r, ratio)` per grid point.
    pub points: Vec<(f64, f64, f64)>,
    pub mean: f64,
    /// `(max - min) / mean`
    pub relative_spread: f64,
}

pub fn cross_validate_marginals(betas: &[f64], rs: &[f64], h: f64) -> Result<CrossValidation, Error> {
    let density = MarginalDensity;
    let mut points = Vec::with_capacity(betas.len() * rs.len());
    for &beta in betas {
        for &r in rs {
            let g = metric_by_finite_difference(&SqueezedThermalParams::new(beta, r, 0.0), h)?;
            let ratio = g.determinant().sqrt() / (density.f(r) * density.g(beta));
            points.push((beta, r, ratio));
        }
    }
    let ratios = points.iter().map(|p| p.2);
    let mean = ratios.clone().sum::<f64>() / points.len() as f64;
    let lo = ratios.clone().fold(f64::INFINITY, f64::min);
    let hi = ratios.fold(f64::NEG_INFINITY, f64::max);
    Ok(CrossValidation { points, mean, relative_spread: (hi - lo) / mean })
}

/// `n` evenly spaced values from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![lo],
        _ => (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect(),
    }
}
