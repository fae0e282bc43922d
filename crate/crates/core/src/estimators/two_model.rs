use ndarray::{Array2, Axis};
use serde::{Deserialize, Serialize};

use super::logistic::{fit_logistic, LogisticModel, DEFAULT_RIDGE};
use crate::data::Dataset;
use crate::error::{invalid, Result};
use crate::numeric::Standardizer;

/// Rows required in each arm.
pub const MIN_ARM_ROWS: usize = 25;

/// Separate logistic outcome models for treated and control customers; the
/// uplift is the difference of their predicted conversion probabilities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoModel {
    /// Encoded dataset columns the models read.
    pub columns: Vec<usize>,
    pub scaling: Standardizer,
    pub treated: LogisticModel,
    pub control: LogisticModel,
    pub ipw_weighting: bool,
}

/// Fit on the observed columns of `ds`. With `ipw_weighting`, treated rows are
/// weighted by `1/e` and control rows by `1/(1-e)`.
pub fn fit_two_model(ds: &Dataset, ipw_weighting: bool) -> Result<TwoModel> {
    fit_two_model_with(ds, ipw_weighting, DEFAULT_RIDGE)
}

pub fn fit_two_model_with(ds: &Dataset, ipw_weighting: bool, ridge: f64) -> Result<TwoModel> {
    let columns = ds.observed_indices();
    let x = ds.x().select(Axis(1), &columns);
    let scaling = Standardizer::fit(&x);
    let z = scaling.transform(&x);

    let mut treated_rows = Vec::new();
    let mut control_rows = Vec::new();
    for (i, &d) in ds.treatment().iter().enumerate() {
        match d {
            0 => control_rows.push(i),
            1 => treated_rows.push(i),
            other => return Err(invalid(format!("row {i} has unsupported treatment arm {other}"))),
        }
    }
    if treated_rows.len() < MIN_ARM_ROWS || control_rows.len() < MIN_ARM_ROWS {
        return Err(invalid(format!(
            "two-model learner needs at least {MIN_ARM_ROWS} rows per arm (treated {}, control {})",
            treated_rows.len(),
            control_rows.len()
        )));
    }
    let e = ds.propensity();
    let fit_arm = |rows: &[usize], treated: bool| -> Result<LogisticModel> {
        let xa = z.select(Axis(0), rows);
        let ya: Vec<u8> = rows.iter().map(|&i| ds.outcome()[i]).collect();
        let wa: Vec<f64> = rows
            .iter()
            .map(|&i| match (ipw_weighting, treated) {
                (false, _) => 1.0,
                (true, true) => 1.0 / e[i],
                (true, false) => 1.0 / (1.0 - e[i]),
            })
            .collect();
        fit_logistic(&xa, &ya, &wa, ridge)
    };
    let treated = fit_arm(&treated_rows, true)?;
    let control = fit_arm(&control_rows, false)?;
    Ok(TwoModel {
        columns,
        scaling,
        treated,
        control,
        ipw_weighting,
    })
}

impl TwoModel {
    fn standardized(&self, ds: &Dataset) -> Array2<f64> {
        self.scaling.transform(&ds.x().select(Axis(1), &self.columns))
    }

    /// Predicted conversion probability under treatment and under control.
    pub fn outcome_predictions(&self, ds: &Dataset) -> (Vec<f64>, Vec<f64>) {
        let z = self.standardized(ds);
        (self.treated.predict(&z), self.control.predict(&z))
    }

    pub fn predict(&self, ds: &Dataset) -> Vec<f64> {
        let (p1, p0) = self.outcome_predictions(ds);
        p1.iter().zip(&p0).map(|(a, b)| a - b).collect()
    }
}
