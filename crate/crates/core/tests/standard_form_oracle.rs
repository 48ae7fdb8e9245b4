mod common;

use nalgebra::Matrix2;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{direct_sum, local_symplectic, random_local, random_physical};
use cvcensus::criteria::{compare_oracles, evaluate, OracleOutcome};
use cvcensus::states::{
    symplectic_eigenvalues, to_standard_form_one, to_standard_form_two, CovarianceMatrix, StandardFormI,
};
use cvcensus::Tolerances;

#[test]
fn standard_form_one_undoes_explicit_local_maps() {
    let tol = Tolerances::default();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut checked = 0;
    while checked < 200 {
        let n = rng.random_range(1.5..6.0);
        let m = rng.random_range(1.5..6.0);
        let limit = 0.95 * (n * m - 1.0f64).sqrt();
        let c = rng.random_range(0.0..limit);
        let cp = rng.random_range(-c..c);
        if c - cp.abs() < 0.1 {
            continue;
        }
        let f = StandardFormI { n, m, c, cp };
        let s = direct_sum(&random_local(&mut rng, 1.0), &random_local(&mut rng, 1.0));
        let got = to_standard_form_one(&f.covariance().transformed(&s), &tol).unwrap();
        let scale = n.max(m);
        for (a, b) in [(got.n, n), (got.m, m), (got.c, c), (got.cp, cp)] {
            assert!((a - b).abs() < 1e-9 * scale, "{got:?} vs {f:?}");
        }
        checked += 1;
    }
}

#[test]
fn standard_form_two_preserves_local_determinants() {
    let tol = Tolerances::default();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..500 {
        let m = random_physical(&mut rng, 4.0, 1.0);
        let f1 = to_standard_form_one(&m, &tol).unwrap();
        let Ok(f2) = to_standard_form_two(&f1, &tol) else {
            continue;
        };
        assert!((f2.n1 * f2.n2 - f1.n * f1.n).abs() < 1e-10 * f1.n * f1.n);
        assert!((f2.m1 * f2.m2 - f1.m * f1.m).abs() < 1e-10 * f1.m * f1.m);
        assert!((f2.c1 * f2.c2 - f1.c * f1.cp).abs() < 1e-9 * f1.n * f1.m);
        let gap = (f2.n1 - 1.0) * (f2.m2 - 1.0) - (f2.n2 - 1.0) * (f2.m1 - 1.0);
        assert!(gap.abs() < 1e-9 * f1.n * f1.m);
    }
}

#[test]
fn variance_and_mirror_verdicts_agree_on_constructed_states() {
    let tol = Tolerances::default();
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let (mut entangled, mut separable) = (0, 0);
    for _ in 0..2000 {
        let m = random_physical(&mut rng, 3.0, 1.2);
        let Ok(eval) = evaluate(&m, &tol, true) else {
            continue;
        };
        let outcome = compare_oracles(&eval, &tol);
        assert_ne!(outcome, OracleOutcome::Disagreement, "{m:?}");
        if eval.verdict.separable {
            separable += 1;
        } else {
            entangled += 1;
        }
    }
    assert!(entangled > 100 && separable > 100, "{entangled} / {separable}");
}

fn physical_state() -> impl Strategy<Value = CovarianceMatrix> {
    any::<u64>().prop_map(|seed| random_physical(&mut ChaCha8Rng::seed_from_u64(seed), 4.0, 1.0))
}

fn local_map() -> impl Strategy<Value = nalgebra::Matrix4<f64>> {
    let angle = 0.0..std::f64::consts::TAU;
    (angle.clone(), -0.8..0.8f64, angle.clone(), angle.clone(), -0.8..0.8f64, angle).prop_map(
        |(a, b, c, d, e, f)| direct_sum(&local_symplectic(a, b, c), &local_symplectic(d, e, f)),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn swapping_modes_keeps_every_verdict(m in physical_state()) {
        let tol = Tolerances::default();
        let (a, b) = (evaluate(&m, &tol, false), evaluate(&m.swap_modes(), &tol, false));
        prop_assert_eq!(a.is_ok(), b.is_ok());
        if let (Ok(a), Ok(b)) = (a, b) {
            prop_assert!((a.verdict.margin_ppt - b.verdict.margin_ppt).abs() < 1e-9);
            prop_assert!((a.verdict.margin_sep - b.verdict.margin_sep).abs() < 1e-6 * (1.0 + a.verdict.margin_sep.abs()));
            if a.verdict.margin_sep.abs() > 1e-6 {
                prop_assert_eq!(a.verdict.separable, b.verdict.separable);
                prop_assert_eq!(a.verdict.classical, b.verdict.classical);
            }
        }
    }

    #[test]
    fn local_symplectic_maps_keep_the_separability_verdict(m in physical_state(), s in local_map()) {
        let tol = Tolerances::default();
        let t = m.transformed(&s);
        let (a, b) = (evaluate(&m, &tol, false), evaluate(&t, &tol, false));
        if let (Ok(a), Ok(b)) = (a, b) {
            prop_assert!((a.verdict.margin_sep - b.verdict.margin_sep).abs() < 1e-6 * (1.0 + a.verdict.margin_sep.abs()));
            if a.verdict.margin_sep.abs() > 1e-6 {
                prop_assert_eq!(a.verdict.separable, b.verdict.separable);
            }
        }
        let (nu_a, nu_b) = (symplectic_eigenvalues(&m), symplectic_eigenvalues(&t));
        prop_assert!((nu_a.0 - nu_b.0).abs() < 1e-8 * nu_a.0 && (nu_a.1 - nu_b.1).abs() < 1e-8 * nu_a.0);
    }
}

#[test]
fn squeezed_thermal_block_is_not_classical_once_squeezed_below_vacuum() {
    let tol = Tolerances::default();
    let a = local_symplectic(0.3, 0.9, 0.0) * Matrix2::identity() * 1.5 * local_symplectic(0.3, 0.9, 0.0).transpose();
    let m = CovarianceMatrix::from_blocks(&a, &(Matrix2::identity() * 2.0), &Matrix2::zeros());
    let eval = evaluate(&m, &tol, true).unwrap();
    assert!(eval.verdict.separable && !eval.verdict.classical);
}
