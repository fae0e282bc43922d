use std::sync::Arc;

use ndarray::Array2;
use proptest::prelude::*;
use suprand_core::estimators::{ate_dr, ate_ipw, ate_naive};
use suprand_core::evaluation::{mae_ite, qini};
use suprand_core::randomization::{assign, build_quantile_mapping, AssignmentScheme, PropensityMapping};
use suprand_core::{Column, Dataset, FeatureSchema, Truth};

fn schema() -> Arc<FeatureSchema> {
    Arc::new(FeatureSchema::new(vec![Column::numeric("x")]).unwrap())
}

fn assigned(rows: &[(bool, bool, f64)]) -> Dataset {
    let n = rows.len();
    let x = Array2::from_shape_fn((n, 1), |(i, _)| i as f64);
    let d = rows.iter().map(|r| u8::from(r.0)).collect();
    let y = rows.iter().map(|r| u8::from(r.1)).collect();
    let e = rows.iter().map(|r| r.2).collect();
    Dataset::new(schema(), x, d, y, e, None).unwrap()
}

fn unassigned(n: usize) -> Dataset {
    let x = Array2::from_shape_fn((n, 1), |(i, _)| i as f64);
    let truth = Truth {
        ite: vec![0.0; n],
        y1: (0..n).map(|i| (i % 3 == 0) as u8).collect(),
        y0: vec![0; n],
    };
    Dataset::unassigned(schema(), x, vec![0; n]).unwrap().with_truth(truth).unwrap()
}

fn rows_strategy() -> impl Strategy<Value = Vec<(bool, bool, f64)>> {
    prop::collection::vec((any::<bool>(), any::<bool>(), 0.02f64..0.98), 4..80)
        .prop_filter("both arms", |r| r.iter().any(|v| v.0) && r.iter().any(|v| !v.0))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn dr_with_zero_models_is_ipw(rows in rows_strategy()) {
        let ds = assigned(&rows);
        let z = vec![0.0; ds.n()];
        let gap = (ate_dr(&ds, &z, &z).unwrap().value - ate_ipw(&ds).unwrap().value).abs();
        prop_assert!(gap < 1e-12);
    }

    #[test]
    fn ipw_reduces_under_constant_propensity(
        arms in prop::collection::vec((any::<bool>(), any::<bool>()), 4..60),
        e in 0.05f64..0.95,
    ) {
        prop_assume!(arms.iter().any(|a| a.0) && arms.iter().any(|a| !a.0));
        let rows: Vec<_> = arms.iter().map(|&(d, y)| (d, y, e)).collect();
        let ds = assigned(&rows);
        let n = ds.n() as f64;
        let (mut nt, mut yt, mut nc, mut yc) = (0.0, 0.0, 0.0, 0.0);
        for &(d, y) in &arms {
            if d { nt += 1.0; yt += f64::from(u8::from(y)); } else { nc += 1.0; yc += f64::from(u8::from(y)); }
        }
        let expected = (yt / nt) * nt / (e * n) - (yc / nc) * nc / ((1.0 - e) * n);
        prop_assert!((ate_ipw(&ds).unwrap().value - expected).abs() < 1e-12);
        if e == 0.5 && nt == nc {
            prop_assert!((ate_ipw(&ds).unwrap().value - ate_naive(&ds).unwrap().value).abs() < 1e-12);
        }
    }

    #[test]
    fn qini_ignores_monotone_transforms(
        rows in rows_strategy(),
        raw in prop::collection::vec(-5.0f64..5.0, 80),
        a in 0.1f64..10.0,
        b in -3.0f64..3.0,
    ) {
        let ds = assigned(&rows);
        let s: Vec<f64> = raw[..ds.n()].to_vec();
        let t: Vec<f64> = s.iter().map(|v| a * v + b).collect();
        let u: Vec<f64> = s.iter().map(|v| v.exp()).collect();
        let q = qini(&s, &ds, false).unwrap().coefficient;
        prop_assert!((qini(&t, &ds, false).unwrap().coefficient - q).abs() < 1e-12);
        prop_assert!((qini(&u, &ds, false).unwrap().coefficient - q).abs() < 1e-12);
    }

    #[test]
    fn supervised_propensities_are_logged_and_bounded(
        scores in prop::collection::vec(-1.0f64..1.0, 20..200),
        k in 1usize..12,
        seed in any::<u64>(),
        rep in 0u64..1000,
    ) {
        // Distinct scores, so equal-share bins always exist.
        let scores: Vec<f64> = scores.iter().enumerate().map(|(i, v)| v + i as f64 * 1e-6).collect();
        let ds = unassigned(scores.len());
        let mapping = build_quantile_mapping(&scores, k, 0.05, 0.95).unwrap();
        let out = assign(&ds, &AssignmentScheme::supervised(mapping, scores.clone(), seed, rep)).unwrap();
        prop_assert_eq!(out.propensity().len(), out.n());
        for &e in out.propensity() {
            prop_assert!(e > 0.0 && e < 1.0);
            prop_assert!((0.05..=0.95).contains(&e));
        }
        prop_assert!(out.treatment().iter().all(|&d| d <= 1));
    }

    #[test]
    fn constant_mapping_matches_full_bitwise(
        n in 1usize..300,
        e in 0.01f64..0.99,
        seed in any::<u64>(),
        rep in 0u64..1000,
    ) {
        let ds = unassigned(n);
        let scores: Vec<f64> = (0..n).map(|i| (i as f64).sin()).collect();
        let full = assign(&ds, &AssignmentScheme::full(e, seed, rep)).unwrap();
        let mapping = PropensityMapping::constant(e).unwrap();
        let sup = assign(&ds, &AssignmentScheme::supervised(mapping, scores, seed, rep)).unwrap();
        prop_assert_eq!(full.treatment(), sup.treatment());
        let same = full.propensity().iter().zip(sup.propensity()).all(|(a, b)| a.to_bits() == b.to_bits());
        prop_assert!(same);
    }

    #[test]
    fn mae_obeys_triangle_inequality(
        v in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0), 1..100),
    ) {
        let a: Vec<f64> = v.iter().map(|t| t.0).collect();
        let b: Vec<f64> = v.iter().map(|t| t.1).collect();
        let c: Vec<f64> = v.iter().map(|t| t.2).collect();
        let ac = mae_ite(&a, &c).unwrap();
        prop_assert!(ac <= mae_ite(&a, &b).unwrap() + mae_ite(&b, &c).unwrap() + 1e-12);
        prop_assert!(mae_ite(&a, &a).unwrap() == 0.0);
    }
}
