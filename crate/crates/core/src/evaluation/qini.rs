use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QiniResult {
    pub coefficient: f64,
    /// `(fraction targeted, incremental conversions / N)`, from `(0, 0)` to
    /// fraction 1. Points sit at the boundaries of groups of tied scores.
    pub curve: Vec<(f64, f64)>,
}

/// Qini coefficient of `predictions` on assigned data.
///
/// Rows are ranked by predicted uplift, descending. After the top `k` rows the
/// incremental gain is `g(k) = Y_T(k) - Y_C(k) * N_T(k) / N_C(k)`, with arm
/// counts and conversions either raw or, when `weighted`, inverse-propensity
/// weighted. The coefficient is the area under `g/N` over the targeted
/// fraction minus the area under the chord to its endpoint.
///
/// Tied scores enter the ranking together, so a constant score yields exactly
/// zero.
pub fn qini(predictions: &[f64], ds: &Dataset, weighted: bool) -> Result<QiniResult> {
    let n = ds.n();
    if predictions.len() != n {
        return Err(invalid(format!(
            "{} predictions for {n} rows",
            predictions.len()
        )));
    }
    if predictions.iter().any(|p| p.is_nan()) {
        return Err(Error::Numerical("NaN uplift prediction".into()));
    }
    let (d, y, e) = (ds.treatment(), ds.outcome(), ds.propensity());
    let treated = d.iter().filter(|&&v| v == 1).count();
    if treated == 0 || treated == n {
        return Err(invalid("Qini needs both treated and control rows"));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| predictions[b].total_cmp(&predictions[a]).then(a.cmp(&b)));

    let total = n as f64;
    let (mut nt, mut yt, mut nc, mut yc) = (0.0, 0.0, 0.0, 0.0);
    let mut control_rate = 0.0;
    let mut curve = Vec::with_capacity(n + 1);
    curve.push((0.0, 0.0));
    for (k, &i) in order.iter().enumerate() {
        let (wt, wc) = if weighted {
            (1.0 / e[i], 1.0 / (1.0 - e[i]))
        } else {
            (1.0, 1.0)
        };
        if d[i] == 1 {
            nt += wt;
            yt += wt * f64::from(y[i]);
        } else {
            nc += wc;
            yc += wc * f64::from(y[i]);
        }
        let boundary = k + 1 == n || predictions[order[k + 1]] != predictions[i];
        if boundary {
            if nc > 0.0 {
                control_rate = yc / nc;
            }
            let g = yt - control_rate * nt;
            curve.push(((k + 1) as f64 / total, g / total));
        }
    }

    let area: f64 = curve
        .windows(2)
        .map(|w| 0.5 * (w[1].0 - w[0].0) * (w[0].1 + w[1].1))
        .sum();
    let end = curve.last().expect("curve has an endpoint").1;
    let coefficient = area - 0.5 * end;
    if !coefficient.is_finite() {
        return Err(Error::Numerical("Qini coefficient is not finite".into()));
    }
    Ok(QiniResult { coefficient, curve })
}
