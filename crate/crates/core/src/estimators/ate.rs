//! Average treatment effect estimators on assigned data.

use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AteMethod {
    Naive,
    Ipw,
    Dr,
}

impl AteMethod {
    pub const ALL: [AteMethod; 3] = [AteMethod::Naive, AteMethod::Ipw, AteMethod::Dr];

    pub fn as_str(&self) -> &'static str {
        match self {
            AteMethod::Naive => "naive",
            AteMethod::Ipw => "ipw",
            AteMethod::Dr => "dr",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AteEstimate {
    pub method: AteMethod,
    pub value: f64,
    pub n: usize,
}

fn check_binary(ds: &Dataset) -> Result<()> {
    if ds.n() == 0 {
        return Err(invalid("cannot estimate an effect on an empty dataset"));
    }
    if let Some(i) = ds.treatment().iter().position(|&d| d > 1) {
        return Err(invalid(format!(
            "row {i} has treatment arm {}; only binary treatment is supported",
            ds.treatment()[i]
        )));
    }
    Ok(())
}

fn check_propensity(ds: &Dataset) -> Result<()> {
    if let Some(i) = ds.propensity().iter().position(|e| !(*e > 0.0 && *e < 1.0)) {
        return Err(Error::Numerical(format!(
            "propensity {} at row {i} is not strictly inside (0, 1)",
            ds.propensity()[i]
        )));
    }
    Ok(())
}

fn finite(method: AteMethod, value: f64, n: usize) -> Result<AteEstimate> {
    if !value.is_finite() {
        return Err(Error::Numerical(format!("{} estimate is not finite", method.as_str())));
    }
    Ok(AteEstimate { method, value, n })
}

/// Difference in observed conversion rates, ignoring how treatment was assigned.
pub fn ate_naive(ds: &Dataset) -> Result<AteEstimate> {
    check_binary(ds)?;
    let (mut nt, mut nc, mut yt, mut yc) = (0usize, 0usize, 0usize, 0usize);
    for (&d, &y) in ds.treatment().iter().zip(ds.outcome()) {
        if d == 1 {
            nt += 1;
            yt += usize::from(y);
        } else {
            nc += 1;
            yc += usize::from(y);
        }
    }
    if nt == 0 || nc == 0 {
        return Err(invalid("naive estimate needs both treated and control rows"));
    }
    finite(
        AteMethod::Naive,
        yt as f64 / nt as f64 - yc as f64 / nc as f64,
        ds.n(),
    )
}

/// Horvitz-Thompson style inverse probability weighting with the logged
/// propensities:
/// `(1/N) (sum D Y / e - sum (1 - D) Y / (1 - e))`.
pub fn ate_ipw(ds: &Dataset) -> Result<AteEstimate> {
    check_binary(ds)?;
    check_propensity(ds)?;
    let (t, c) = ipw_sums(ds, 0..ds.n());
    finite(AteMethod::Ipw, (t - c) / ds.n() as f64, ds.n())
}

fn ipw_sums(ds: &Dataset, rows: impl IntoIterator<Item = usize>) -> (f64, f64) {
    let (d, y, e) = (ds.treatment(), ds.outcome(), ds.propensity());
    let mut treated = 0.0;
    let mut control = 0.0;
    for i in rows {
        if y[i] == 1 {
            if d[i] == 1 {
                treated += 1.0 / e[i];
            } else {
                control += 1.0 / (1.0 - e[i]);
            }
        }
    }
    (treated, control)
}

/// Doubly robust estimate with outcome-model predictions `g1[i]`, `g0[i]`
/// (the modelled conversion probability of row `i` under treatment and control):
///
/// `(1/N) sum [D Y - (D - e) g1] / e  -  (1/N) sum [(1 - D) Y + (D - e) g0] / (1 - e)`.
pub fn ate_dr(ds: &Dataset, g1: &[f64], g0: &[f64]) -> Result<AteEstimate> {
    check_binary(ds)?;
    check_propensity(ds)?;
    let n = ds.n();
    if g1.len() != n || g0.len() != n {
        return Err(invalid("outcome model predictions must have one entry per row"));
    }
    if g1.iter().chain(g0).any(|v| !v.is_finite()) {
        return Err(Error::Numerical("outcome model predictions are not finite".into()));
    }
    let (d, y, e) = (ds.treatment(), ds.outcome(), ds.propensity());
    let mut treated = 0.0;
    let mut control = 0.0;
    for i in 0..n {
        let di = f64::from(d[i]);
        let yi = f64::from(y[i]);
        treated += (di * yi - (di - e[i]) * g1[i]) / e[i];
        control += ((1.0 - di) * yi + (di - e[i]) * g0[i]) / (1.0 - e[i]);
    }
    finite(AteMethod::Dr, treated / n as f64 - control / n as f64, n)
}

/// Inverse-probability-weighted effect restricted to `rows`, normalized by
/// the number of rows in the set. Zero for an empty set.
pub fn ipw_leaf_effect(rows: &[usize], ds: &Dataset) -> f64 {
    if rows.is_empty() {
        return 0.0;
    }
    let (t, c) = ipw_sums(ds, rows.iter().copied());
    (t - c) / rows.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{Column, FeatureSchema};
    use ndarray::Array2;
    use std::sync::Arc;

    pub(crate) fn fixture(d: &[u8], y: &[u8], e: &[f64]) -> Dataset {
        let n = d.len();
        let schema = Arc::new(FeatureSchema::new(vec![Column::numeric("x")]).unwrap());
        let x = Array2::from_shape_fn((n, 1), |(i, _)| i as f64);
        Dataset::new(schema, x, d.to_vec(), y.to_vec(), e.to_vec(), None).unwrap()
    }

    #[test]
    fn naive_difference() {
        let ds = fixture(&[1, 1, 0, 0], &[1, 1, 0, 0], &[0.5; 4]);
        assert_eq!(ate_naive(&ds).unwrap().value, 1.0);
        let ds = fixture(&[1, 1, 0, 0], &[1, 0, 1, 0], &[0.5; 4]);
        assert_eq!(ate_naive(&ds).unwrap().value, 0.0);
    }

    #[test]
    fn naive_needs_both_arms() {
        let ds = fixture(&[1, 1], &[1, 0], &[0.5; 2]);
        assert!(ate_naive(&ds).is_err());
    }

    #[test]
    fn ipw_uniform_propensity() {
        let ds = fixture(&[1, 1, 0, 0], &[1, 1, 0, 0], &[0.5; 4]);
        assert_eq!(ate_ipw(&ds).unwrap().value, 1.0);
    }

    #[test]
    fn ipw_control_weight_uses_complement() {
        // (1/2)(1/0.2 - 1/(1 - 0.8)) = 0
        let ds = fixture(&[1, 0], &[1, 1], &[0.2, 0.8]);
        let v = ate_ipw(&ds).unwrap().value;
        assert!(v.abs() < 1e-12, "{v}");
    }

    #[test]
    fn dr_with_zero_models_is_ipw() {
        let ds = fixture(&[1, 0, 1, 0, 0], &[1, 1, 0, 0, 1], &[0.3, 0.6, 0.9, 0.1, 0.45]);
        let z = vec![0.0; 5];
        let dr = ate_dr(&ds, &z, &z).unwrap().value;
        let ipw = ate_ipw(&ds).unwrap().value;
        assert!((dr - ipw).abs() < 1e-12);
    }

    #[test]
    fn dr_with_arm_means_under_balance_is_naive() {
        let d = [1, 1, 1, 0, 0, 0];
        let y = [1, 1, 0, 1, 0, 0];
        let ds = fixture(&d, &y, &[0.5; 6]);
        let g1 = vec![2.0 / 3.0; 6];
        let g0 = vec![1.0 / 3.0; 6];
        let dr = ate_dr(&ds, &g1, &g0).unwrap().value;
        let naive = ate_naive(&ds).unwrap().value;
        assert!((dr - naive).abs() < 1e-12, "{dr} vs {naive}");
    }

    #[test]
    fn leaf_effect_examples() {
        let ds = fixture(&[1, 1, 0, 0], &[1, 0, 0, 0], &[0.5; 4]);
        assert_eq!(ipw_leaf_effect(&[0, 1, 2, 3], &ds), 0.5);
        assert_eq!(ipw_leaf_effect(&[], &ds), 0.0);
        let ds = fixture(&[1, 0, 1, 0, 0], &[1, 1, 0, 0, 1], &[0.3, 0.6, 0.9, 0.1, 0.45]);
        let all: Vec<usize> = (0..5).collect();
        assert_eq!(ipw_leaf_effect(&all, &ds), ate_ipw(&ds).unwrap().value);
    }

    #[test]
    fn rejects_multi_arm_and_length_mismatch() {
        let ds = fixture(&[2, 0], &[1, 0], &[0.5; 2]);
        assert!(ate_ipw(&ds).is_err());
        let ds = fixture(&[1, 0], &[1, 0], &[0.5; 2]);
        assert!(ate_dr(&ds, &[0.0], &[0.0, 0.0]).is_err());
    }
}
