//! Separability and classicality verdicts.
//!
//! Two independent separability tests live here. The EPR-variance test
//! works on standard form II and compares the total variance of the pair
//! `û = (a x₁ ∓ x₂/a)/√2`, `v̂ = (a p₁ ± p₂/a)/√2` against `a₀² + 1/a₀²`.
//! The mirror-reflection test flips the momentum of mode 2 and checks the
//! uncertainty relation again. For physical two-mode Gaussian states both
//! are necessary and sufficient, so they must agree away from the boundary.

use std::fmt::Write as _;
use std::io;
use std::path::Path;

use nalgebra::Matrix4;
use serde::{Deserialize, Serialize};

use crate::linalg::{min_hermitian_eigenvalue, min_symmetric_eigenvalue};
use crate::states::{
    is_physical, is_positive_definite, to_standard_form_one, to_standard_form_two,
    CovarianceMatrix, StandardFormI, StandardFormII, SymplecticForm,
};
use crate::{StateError, Tolerances};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VarianceReport {
    pub total_variance: f64,
    /// `|a₀² - 1/a₀²|`, required by the uncertainty relation alone.
    pub uncertainty_bound: f64,
    /// `a₀² + 1/a₀²`, required for separability.
    pub separability_bound: f64,
    pub a0: f64,
}

impl VarianceReport {
    pub fn separability_margin(&self) -> f64 {
        self.total_variance - self.separability_bound
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub physical_proxy: bool,
    pub separable: bool,
    pub classical: bool,
    pub margin_sep: f64,
    pub margin_ppt: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PptVerdict {
    pub separable: bool,
    pub margin: f64,
}

pub fn total_variance(f2: &StandardFormII) -> VarianceReport {
    let a_sq = f2.a0 * f2.a0;
    let total =
        0.5 * (a_sq * (f2.n1 + f2.n2) + (f2.m1 + f2.m2) / a_sq) - f2.c1.abs() - f2.c2.abs();
    VarianceReport {
        total_variance: total,
        uncertainty_bound: (a_sq - 1.0 / a_sq).abs(),
        separability_bound: a_sq + 1.0 / a_sq,
        a0: f2.a0,
    }
}

pub fn passes_uncertainty_filter(v: &VarianceReport, f1: &StandardFormI, tol: &Tolerances) -> bool {
    f1.n >= 1.0 && f1.m >= 1.0 && v.total_variance >= v.uncertainty_bound - tol.bound
}

/// Boundary states (total variance equal to the bound) count as separable.
pub fn is_separable_duan(v: &VarianceReport, tol: &Tolerances) -> bool {
    v.total_variance >= v.separability_bound - tol.bound
}

/// Uncertainty relation for the mirror-reflected matrix `ΛMΛ`.
pub fn is_separable_ppt(m: &CovarianceMatrix, tol: &Tolerances) -> PptVerdict {
    let margin = min_hermitian_eigenvalue(m.mirrored().matrix(), &SymplecticForm::matrix());
    PptVerdict {
        separable: margin >= -tol.ppt,
        margin,
    }
}

/// Smallest eigenvalue of `M - I`.
pub fn classical_margin(m: &CovarianceMatrix) -> f64 {
    min_symmetric_eigenvalue(&(m.matrix() - Matrix4::identity()))
}

/// Positive P-representation: `M - I` strictly positive definite.
pub fn is_classical(m: &CovarianceMatrix, tol: &Tolerances) -> bool {
    classical_margin(m) > tol.classical
}

/// Why a sampled matrix left the filter chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Rejection {
    NotPositiveDefinite,
    ComplexStandardForm,
    LocalDeterminant,
    SolverFailure,
    UncertaintyBound,
    Unphysical,
}

/// Everything the census needs to know about an accepted matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub standard_form_one: StandardFormI,
    pub standard_form_two: StandardFormII,
    pub variance: VarianceReport,
    pub verdict: Verdict,
    /// Outcome of the strict `M + iΩ ⪰ 0` test.
    pub physical: bool,
}

/// Runs the filter chain: positive definiteness, standard form I, local
/// determinants `n, m ≥ 1`, standard form II, the uncertainty bound, and
/// optionally the strict physicality test; then computes all verdicts.
pub fn evaluate(
    m: &CovarianceMatrix,
    tol: &Tolerances,
    strict_physical: bool,
) -> Result<Evaluation, Rejection> {
    if !is_positive_definite(m) {
        return Err(Rejection::NotPositiveDefinite);
    }
    let f1 = to_standard_form_one(m, tol).map_err(|_| Rejection::ComplexStandardForm)?;
    if f1.n < 1.0 || f1.m < 1.0 {
        return Err(Rejection::LocalDeterminant);
    }
    let f2 = to_standard_form_two(&f1, tol).map_err(|e| match e {
        StateError::LocalDeterminant { .. } => Rejection::LocalDeterminant,
        _ => Rejection::SolverFailure,
    })?;
    let variance = total_variance(&f2);
    if !passes_uncertainty_filter(&variance, &f1, tol) {
        return Err(Rejection::UncertaintyBound);
    }
    let physical = is_physical(m, tol);
    if strict_physical && !physical {
        return Err(Rejection::Unphysical);
    }
    let separable = is_separable_duan(&variance, tol);
    let ppt = is_separable_ppt(m, tol);
    Ok(Evaluation {
        standard_form_one: f1,
        standard_form_two: f2,
        variance,
        verdict: Verdict {
            physical_proxy: true,
            separable,
            classical: separable && is_classical(m, tol),
            margin_sep: variance.separability_margin(),
            margin_ppt: ppt.margin,
        },
        physical,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleOutcome {
    /// The mirror test presupposes a physical state.
    NotApplicable,
    Agree,
    /// Disagreement with at least one margin inside the boundary band.
    BoundaryDisagreement,
    Disagreement,
}

/// Compares the variance verdict with the mirror-reflection verdict.
pub fn compare_oracles(eval: &Evaluation, tol: &Tolerances) -> OracleOutcome {
    if !eval.physical {
        return OracleOutcome::NotApplicable;
    }
    let v = &eval.verdict;
    let ppt_separable = v.margin_ppt >= -tol.ppt;
    if v.separable == ppt_separable {
        OracleOutcome::Agree
    } else if v.margin_sep.abs() <= tol.margin_band || v.margin_ppt.abs() <= tol.margin_band {
        OracleOutcome::BoundaryDisagreement
    } else {
        OracleOutcome::Disagreement
    }
}

/// Plain-text dump: four rows of the matrix with 17 significant digits,
/// then one line per margin.
pub fn format_dump(m: &CovarianceMatrix, margin_sep: f64, margin_ppt: f64) -> String {
    let mut out = String::new();
    for i in 0..4 {
        let row: Vec<String> = (0..4).map(|j| format!("{:.16e}", m.matrix()[(i, j)])).collect();
        let _ = writeln!(out, "{}", row.join(" "));
    }
    let _ = writeln!(out, "margin_sep {margin_sep:.16e}");
    let _ = writeln!(out, "margin_ppt {margin_ppt:.16e}");
    out
}

pub fn write_dump(
    path: &Path,
    m: &CovarianceMatrix,
    margin_sep: f64,
    margin_ppt: f64,
) -> io::Result<()> {
    std::fs::write(path, format_dump(m, margin_sep, margin_ppt))
}

/// Inverse of [`format_dump`].
pub fn parse_dump(text: &str) -> Option<(CovarianceMatrix, f64, f64)> {
    let mut lines = text.lines();
    let mut m = Matrix4::zeros();
    for i in 0..4 {
        let vals: Vec<f64> = lines
            .next()?
            .split_whitespace()
            .map(str::parse)
            .collect::<Result<_, _>>()
            .ok()?;
        if vals.len() != 4 {
            return None;
        }
        for (j, v) in vals.into_iter().enumerate() {
            m[(i, j)] = v;
        }
    }
    let mut margin = |key: &str| -> Option<f64> {
        let line = lines.next()?;
        line.strip_prefix(key)?.trim().parse().ok()
    };
    let sep = margin("margin_sep")?;
    let ppt = margin("margin_ppt")?;
    Some((CovarianceMatrix::try_new(m).ok()?, sep, ppt))
}
