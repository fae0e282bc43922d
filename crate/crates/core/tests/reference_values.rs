//! Kruskal–Wallis, Levene and logistic regression against values frozen from
//! an independent scientific stack.

use ndarray::Array2;
use suprand_core::estimators::fit_logistic;
use suprand_core::evaluation::{kruskal_wallis, levene, Center};

mod common;

use common::{StatFixture, STAT_FIXTURES};

fn groups(f: &StatFixture) -> Vec<Vec<f64>> {
    f.groups.iter().map(|g| g.to_vec()).collect()
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-10 * b.abs().max(1.0)
}

#[test]
fn kruskal_wallis_matches_reference() {
    for (k, f) in STAT_FIXTURES.iter().enumerate() {
        let r = kruskal_wallis(&groups(f)).unwrap();
        assert_eq!(r.df, f.groups.len() - 1);
        assert!(close(r.h, f.h), "fixture {k}: H {} vs {}", r.h, f.h);
        assert!(close(r.p_value, f.h_p), "fixture {k}: p {} vs {}", r.p_value, f.h_p);
    }
}

#[test]
fn levene_matches_reference() {
    for (k, f) in STAT_FIXTURES.iter().enumerate() {
        let m = levene(&groups(f), Center::Mean).unwrap();
        assert!(close(m.f, f.f_mean), "fixture {k}: F {} vs {}", m.f, f.f_mean);
        assert!(close(m.p_value, f.f_mean_p), "fixture {k}: p {} vs {}", m.p_value, f.f_mean_p);
        let md = levene(&groups(f), Center::Median).unwrap();
        assert!(close(md.f, f.f_median), "fixture {k}: F {} vs {}", md.f, f.f_median);
        assert!(close(md.p_value, f.f_median_p), "fixture {k}: p {} vs {}", md.p_value, f.f_median_p);
    }
}

#[test]
fn separable_logistic_matches_convex_solver() {
    let xs = [-2.0, -1.5, -1.0, -0.5, 0.5, 1.0, 1.5, 2.0];
    let y = [0, 0, 0, 0, 1, 1, 1, 1];
    let x = Array2::from_shape_vec((8, 1), xs.to_vec()).unwrap();
    let m = fit_logistic(&x, &y, &[1.0; 8], 1e-6).unwrap();
    assert!(m.converged);
    assert!(m.intercept().is_finite() && m.slopes()[0].is_finite());
    // Quasi-Newton fit of the same penalized likelihood to gradient norm 1e-13.
    let expected = [
        2.1347339664486122e-19,
        9.93133931432719e-15,
        4.620318132418986e-10,
        2.1494463273530355e-05,
        0.9999785055367264,
        0.9999999995379683,
        0.99999999999999,
        1.0,
    ];
    for (row, e) in x.rows().into_iter().zip(expected) {
        let p = m.predict_row(row);
        assert!((p - e).abs() < 1e-6, "{p} vs {e}");
    }
    assert!((m.slopes()[0] - 21.495387366924554).abs() < 1e-3 * 21.5);
}
