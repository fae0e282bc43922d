//! Fast oracle checks runnable from the command line: hand-computed values,
//! algebraic identities and structural invariants.

use std::sync::Arc;

use ndarray::Array2;
use rand::Rng;
use serde::Serialize;

use crate::data::{Column, Dataset, FeatureSchema};
use crate::error::Result;
use crate::estimators::{ate_dr, ate_ipw, fit_causal_forest, fit_logistic, ipw_leaf_effect, ForestParams};
use crate::evaluation::{kruskal_wallis, levene, qini, CampaignStats, Center, ProfitSetting};
use crate::randomization::{assign, AssignmentScheme, PropensityMapping};
use crate::rng::{domain, StreamKey};
use crate::simulation::{
    default_base_model, default_tau_columns, generate_covariates, make_potential_outcomes_synthetic, simulate_tau,
};

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn one_column(d: Vec<u8>, y: Vec<u8>, e: Vec<f64>) -> Result<Dataset> {
    let n = d.len();
    let schema = Arc::new(FeatureSchema::new(vec![Column::numeric("x")])?);
    let x = Array2::from_shape_fn((n, 1), |(i, _)| i as f64);
    Dataset::new(schema, x, d, y, e, None)
}

fn random_fixture(seed: u64, n: usize) -> Result<Dataset> {
    let mut rng = StreamKey::new(seed, domain::SYNTHETIC, 99).rng(0);
    let e: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..0.95)).collect();
    let d: Vec<u8> = e.iter().map(|p| u8::from(rng.random::<f64>() < *p)).collect();
    let y: Vec<u8> = (0..n).map(|_| u8::from(rng.random::<f64>() < 0.3)).collect();
    one_column(d, y, e)
}

fn small_truth(n: usize, seed: u64) -> Result<Dataset> {
    let x = generate_covariates(n, seed)?;
    let beta = default_base_model(&x, 0.109)?;
    let (tau, _) = simulate_tau(&x, &default_tau_columns(), seed, 0.05, 0.04)?;
    make_potential_outcomes_synthetic(&x, &tau, &beta, seed)
}

fn check(name: &'static str, f: impl FnOnce() -> Result<(bool, String)>) -> CheckResult {
    match f() {
        Ok((passed, detail)) => CheckResult { name, passed, detail },
        Err(e) => CheckResult {
            name,
            passed: false,
            detail: format!("error: {e}"),
        },
    }
}

/// Run every check. None of them takes more than a fraction of a second.
pub fn run_selftest() -> Vec<CheckResult> {
    vec![
        check("ipw_hand_fixture", || {
            let ds = one_column(vec![1, 0], vec![1, 1], vec![0.2, 0.8])?;
            let v = ate_ipw(&ds)?.value;
            Ok((v.abs() < 1e-12, format!("{v:e} (expected 0)")))
        }),
        check("ipw_five_rows", || {
            let ds = one_column(vec![1, 0, 1, 0, 0], vec![1, 1, 0, 0, 1], vec![0.3, 0.6, 0.9, 0.1, 0.45])?;
            let expected = (1.0 / 0.3 - 1.0 / 0.4 - 1.0 / 0.55) / 5.0;
            let v = ate_ipw(&ds)?.value;
            Ok(((v - expected).abs() < 1e-12, format!("{v} vs {expected}")))
        }),
        check("dr_zero_models_equals_ipw", || {
            let mut worst: f64 = 0.0;
            for seed in 0..100 {
                let ds = random_fixture(seed, 50)?;
                let z = vec![0.0; ds.n()];
                worst = worst.max((ate_dr(&ds, &z, &z)?.value - ate_ipw(&ds)?.value).abs());
            }
            Ok((worst < 1e-12, format!("max gap {worst:e} over 100 fixtures")))
        }),
        check("leaf_effect_whole_set", || {
            let ds = random_fixture(7, 40)?;
            let all: Vec<usize> = (0..ds.n()).collect();
            let gap = (ipw_leaf_effect(&all, &ds) - ate_ipw(&ds)?.value).abs();
            Ok((gap == 0.0, format!("gap {gap:e}")))
        }),
        check("qini_constant_score", || {
            let ds = random_fixture(3, 60)?;
            let q = qini(&vec![0.25; ds.n()], &ds, false)?.coefficient;
            Ok((q == 0.0, format!("{q:e}")))
        }),
        check("kruskal_wallis_hand", || {
            let h = kruskal_wallis(&[vec![1.0, 2.0, 3.0], vec![4.0, 5.0, 6.0]])?.h;
            Ok(((h - 27.0 / 7.0).abs() < 1e-12, format!("H = {h}")))
        }),
        check("levene_hand", || {
            let f = levene(&[vec![0.0, 0.0, 0.0, 4.0], vec![1.0; 4]], Center::Mean)?.f;
            Ok(((f - 9.0).abs() < 1e-12, format!("F = {f}")))
        }),
        check("logistic_intercept_closed_form", || {
            let y = vec![1, 1, 0, 0, 0, 0, 0, 0];
            let m = fit_logistic(&Array2::zeros((8, 1)), &y, &[1.0; 8], 0.0)?;
            let expected = (0.25f64 / 0.75).ln();
            Ok((
                (m.intercept() - expected).abs() < 1e-10,
                format!("{} vs {expected}", m.intercept()),
            ))
        }),
        check("profit_identity", || {
            let s = ProfitSetting::new(10.0, 1.0)?;
            let p = CampaignStats {
                targeted_fraction: 0.5,
                conversion_rate: 0.135,
            }
            .profit(&s);
            Ok(((p - 0.85).abs() < 1e-12, format!("{p}")))
        }),
        check("constant_mapping_equals_full", || {
            let ds = small_truth(500, 1)?;
            let full = assign(&ds, &AssignmentScheme::full(0.5, 9, 2))?;
            let scores: Vec<f64> = (0..ds.n()).map(|i| i as f64).collect();
            let constant = PropensityMapping::new(vec![100.0, 200.0], vec![0.5; 3])?;
            let sup = assign(&ds, &AssignmentScheme::supervised(constant, scores, 9, 2))?;
            let same = full.treatment() == sup.treatment() && full.propensity() == sup.propensity();
            Ok((same, "treatments and logged propensities compared bitwise".into()))
        }),
        check("propensities_logged", || {
            let ds = small_truth(500, 2)?;
            let scores: Vec<f64> = ds.require_truth()?.ite.clone();
            let mapping = crate::randomization::build_quantile_mapping(&scores, 10, 0.05, 0.95)?;
            let a = assign(&ds, &AssignmentScheme::supervised(mapping, scores, 3, 0))?;
            let ok = a.propensity().len() == a.n() && a.propensity().iter().all(|e| *e > 0.0 && *e < 1.0);
            Ok((ok, format!("{} rows", a.n())))
        }),
        check("forest_depth_zero_and_honesty", || {
            let ds = assign(&small_truth(1200, 3)?, &AssignmentScheme::full(0.5, 4, 0))?;
            let params = ForestParams {
                trees: 1,
                max_depth: Some(0),
                keep_samples: true,
                seed: 5,
                ..ForestParams::default()
            };
            let forest = fit_causal_forest(&ds, &params)?;
            let samples = forest.trees[0].samples.clone().expect("samples kept");
            let expected = ate_ipw(&ds.subset(&samples.estimation))?.value;
            let gap = forest
                .predict(&ds)
                .iter()
                .fold(0.0_f64, |m, p| m.max((p - expected).abs()));
            let disjoint = samples.structure.iter().all(|i| !samples.estimation.contains(i));
            Ok((gap < 1e-12 && disjoint, format!("max gap {gap:e}, disjoint halves {disjoint}")))
        }),
    ]
}
