//! Ground-truth construction: simulated treatment effects, potential outcomes
//! and the noisy scoring model that drives supervised assignment.

mod synthetic;
mod tau;

pub use synthetic::{
    bank_schema, default_base_model, default_tau_columns, generate_covariates, DEFAULT_BASE_RATE,
    DEFAULT_ROWS,
};
pub use tau::{simulate_tau, TauNetwork, DEFAULT_ATE, DEFAULT_SD};

use ndarray::Axis;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::data::{Dataset, Truth};
use crate::error::{invalid, Error, Result};
use crate::estimators::logistic::fit_logistic;
use crate::numeric::{sigmoid, Standardizer};
use crate::rng::{domain, StreamKey};

/// Probabilities used to draw potential outcomes are clipped into this range.
pub const PROB_FLOOR: f64 = 0.001;
pub const PROB_CEIL: f64 = 0.999;

/// Ridge penalty of the auxiliary treated-outcome model used by label flipping.
pub const FLIP_MODEL_RIDGE: f64 = 1.0;

/// Fully synthetic potential outcomes.
///
/// `base_model` holds logistic coefficients over the encoded columns,
/// intercept first. With `p0 = logistic(x'beta)` and `p1 = p0 + tau`, both
/// clipped, one shared uniform `U_i` per row gives `y0 = 1{U < p0}` and
/// `y1 = 1{U < p1}`; the stored effect is `p1 - p0`. The returned data is
/// unassigned, so its observed outcome is `y0`.
pub fn make_potential_outcomes_synthetic(
    ds: &Dataset,
    tau: &[f64],
    base_model: &[f64],
    seed: u64,
) -> Result<Dataset> {
    if base_model.len() != ds.d() + 1 {
        return Err(invalid(format!(
            "base model has {} coefficients, expected {} (intercept + {} columns)",
            base_model.len(),
            ds.d() + 1,
            ds.d()
        )));
    }
    if tau.len() != ds.n() {
        return Err(invalid("effect vector length does not match row count"));
    }
    let key = StreamKey::new(seed, domain::OUTCOMES, 0);
    let n = ds.n();
    let mut truth = Truth {
        ite: Vec::with_capacity(n),
        y1: Vec::with_capacity(n),
        y0: Vec::with_capacity(n),
    };
    for (i, row) in ds.x().axis_iter(Axis(0)).enumerate() {
        let eta = base_model[0]
            + base_model[1..]
                .iter()
                .zip(row.iter())
                .map(|(b, v)| b * v)
                .sum::<f64>();
        let p0 = sigmoid(eta).clamp(PROB_FLOOR, PROB_CEIL);
        let p1 = (p0 + tau[i]).clamp(PROB_FLOOR, PROB_CEIL);
        let u = key.uniform(ds.row_ids()[i]);
        truth.y0.push(u8::from(u < p0));
        truth.y1.push(u8::from(u < p1));
        truth.ite.push(p1 - p0);
    }
    ds.with_truth(truth)
}

/// Semi-synthetic potential outcomes from data in which every customer was
/// treated.
///
/// The observed outcome is taken as `y1`. An auxiliary ridge-logistic model
/// `p1(x)` of the treated outcome on the observed columns sets the flip rate:
/// for `tau >= 0` a converted row loses its conversion under control with
/// probability `min(1, tau / p1)`; for `tau < 0` a non-converted row gains one
/// with probability `min(1, -tau / (1 - p1))`. The stored effect is the
/// conditional effect those rates implant: `min(p1, tau)` or
/// `max(tau, -(1 - p1))`.
pub fn make_potential_outcomes_flip(ds_all_treated: &Dataset, tau: &[f64], seed: u64) -> Result<Dataset> {
    let ds = ds_all_treated;
    if tau.len() != ds.n() {
        return Err(invalid("effect vector length does not match row count"));
    }
    let observed = ds.observed_indices();
    let x = ds.x().select(Axis(1), &observed);
    let scaling = Standardizer::fit(&x);
    let z = scaling.transform(&x);
    let model = fit_logistic(&z, ds.outcome(), &vec![1.0; ds.n()], FLIP_MODEL_RIDGE)?;
    let p1_hat = model.predict(&z);
    if let Some(i) = p1_hat.iter().position(|p| !(*p > 0.0 && *p < 1.0)) {
        return Err(Error::Numerical(format!(
            "auxiliary outcome model predicts {} at row {i}",
            p1_hat[i]
        )));
    }
    let key = StreamKey::new(seed, domain::OUTCOMES, 0);
    let n = ds.n();
    let mut truth = Truth {
        ite: Vec::with_capacity(n),
        y1: Vec::with_capacity(n),
        y0: Vec::with_capacity(n),
    };
    for i in 0..n {
        let y1 = ds.outcome()[i];
        let p = p1_hat[i];
        let t = tau[i];
        let u = key.uniform(ds.row_ids()[i]);
        let (y0, ite) = if t >= 0.0 {
            let q = (t / p).min(1.0);
            (if y1 == 1 && u < q { 0 } else { y1 }, p * q)
        } else {
            let q = (-t / (1.0 - p)).min(1.0);
            (if y1 == 0 && u < q { 1 } else { y1 }, -(1.0 - p) * q)
        };
        truth.y1.push(y1);
        truth.y0.push(y0);
        truth.ite.push(ite);
    }
    let unassigned = Dataset::new(
        ds.schema_arc(),
        ds.x().clone(),
        vec![0; n],
        truth.y0.clone(),
        vec![crate::data::UNASSIGNED_PROPENSITY; n],
        None,
    )?;
    unassigned.with_truth(truth)
}

/// Scoring model that sees the true effect through Gaussian noise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoisyOracle {
    pub sigma: f64,
    pub seed: u64,
}

pub const DEFAULT_ORACLE_SIGMA: f64 = 0.025;

/// Scores `S_i = ite_i + eps_i`, `eps_i ~ N(0, sigma)`, with the noise for a
/// row fixed by `(oracle.seed, repetition, row id)`.
pub fn oracle_scores(ds: &Dataset, oracle: &NoisyOracle, repetition: u64) -> Result<Vec<f64>> {
    let truth = ds
        .truth()
        .ok_or_else(|| Error::Dataset("oracle scores need ground truth".into()))?;
    if !(oracle.sigma >= 0.0 && oracle.sigma.is_finite()) {
        return Err(invalid("oracle noise sd must be finite and non-negative"));
    }
    let key = StreamKey::new(oracle.seed, domain::ORACLE, repetition);
    Ok(truth
        .ite
        .iter()
        .zip(ds.row_ids())
        .map(|(&t, &id)| {
            if oracle.sigma == 0.0 {
                t
            } else {
                let e: f64 = StandardNormal.sample(&mut key.rng(id));
                t + oracle.sigma * e
            }
        })
        .collect())
}
