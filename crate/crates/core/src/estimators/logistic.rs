//! Weighted, ridge-penalized logistic regression fitted by iteratively
//! reweighted least squares (Newton's method on the penalized log-likelihood).

use nalgebra::{DMatrix, DVector};
use ndarray::{Array2, ArrayView1};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::numeric::sigmoid;

pub const DEFAULT_RIDGE: f64 = 1e-6;
pub const DEFAULT_TOLERANCE: f64 = 1e-8;
pub const DEFAULT_MAX_ITER: usize = 100;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogisticModel {
    /// Intercept first, then one slope per input column.
    pub coefficients: Vec<f64>,
    pub ridge: f64,
    pub converged: bool,
    pub iterations: usize,
}

impl LogisticModel {
    pub fn intercept(&self) -> f64 {
        self.coefficients[0]
    }

    pub fn slopes(&self) -> &[f64] {
        &self.coefficients[1..]
    }

    pub fn linear_predictor(&self, row: &[f64]) -> f64 {
        self.coefficients[0]
            + self.coefficients[1..]
                .iter()
                .zip(row)
                .map(|(b, x)| b * x)
                .sum::<f64>()
    }

    pub fn predict_proba(&self, row: &[f64]) -> f64 {
        sigmoid(self.linear_predictor(row))
    }

    pub fn predict_row(&self, row: ArrayView1<'_, f64>) -> f64 {
        let eta = self.coefficients[0]
            + self.coefficients[1..]
                .iter()
                .zip(row.iter())
                .map(|(b, x)| b * x)
                .sum::<f64>();
        sigmoid(eta)
    }

    pub fn predict(&self, x: &Array2<f64>) -> Vec<f64> {
        x.rows().into_iter().map(|r| self.predict_row(r)).collect()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct IrlsOptions {
    pub tolerance: f64,
    pub max_iter: usize,
}

impl Default for IrlsOptions {
    fn default() -> Self {
        Self {
            tolerance: DEFAULT_TOLERANCE,
            max_iter: DEFAULT_MAX_ITER,
        }
    }
}

/// Fit with the default tolerance (1e-8 on the largest coefficient update)
/// and iteration cap (100).
pub fn fit_logistic(x: &Array2<f64>, y: &[u8], weights: &[f64], ridge: f64) -> Result<LogisticModel> {
    fit_logistic_with(x, y, weights, ridge, IrlsOptions::default())
}

/// Maximize `sum_i w_i [y_i eta_i - log(1 + exp eta_i)] - ridge/2 * |slopes|^2`.
///
/// Weights are rescaled to average 1, so multiplying all of them by a constant
/// leaves the fit unchanged and `ridge` is measured against an average row.
/// The intercept is not penalized unless only one outcome class carries
/// weight, where it has no finite optimum otherwise.
pub fn fit_logistic_with(
    x: &Array2<f64>,
    y: &[u8],
    weights: &[f64],
    ridge: f64,
    opts: IrlsOptions,
) -> Result<LogisticModel> {
    let (n, d) = x.dim();
    if n == 0 {
        return Err(invalid("logistic regression needs at least one row"));
    }
    if y.len() != n || weights.len() != n {
        return Err(invalid("x, y and weights must have the same length"));
    }
    if !(ridge >= 0.0 && ridge.is_finite()) {
        return Err(invalid(format!("ridge must be finite and non-negative, got {ridge}")));
    }
    if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
        return Err(invalid("weights must be finite and non-negative"));
    }
    let wsum: f64 = weights.iter().sum();
    if wsum <= 0.0 {
        return Err(invalid("weights sum to zero"));
    }
    let scale = n as f64 / wsum;
    let w: Vec<f64> = weights.iter().map(|v| v * scale).collect();
    let wy: f64 = w.iter().zip(y).map(|(wi, &yi)| wi * f64::from(yi)).sum();
    let ybar = wy / n as f64;
    if ridge == 0.0 && (ybar <= 0.0 || ybar >= 1.0) {
        return Err(invalid("both outcome classes are required when ridge is zero"));
    }

    let penalize_intercept = ybar <= 0.0 || ybar >= 1.0;
    let first_penalized = if penalize_intercept { 0 } else { 1 };

    let p = d + 1;
    let mut beta = vec![0.0; p];
    beta[0] = crate::numeric::logit(ybar.clamp(1e-6, 1.0 - 1e-6));

    // Design with a leading intercept column; products go through gemm.
    let mut design = Array2::<f64>::ones((n, p));
    design.slice_mut(ndarray::s![.., 1..]).assign(x);
    let yf: Vec<f64> = y.iter().map(|&v| f64::from(v)).collect();

    let objective = |beta: &[f64]| -> f64 {
        let eta = design.dot(&ndarray::ArrayView1::from(beta));
        let mut f = 0.0;
        for i in 0..n {
            let e = eta[i];
            // log(1 + e^eta) without overflow
            let softplus = if e > 0.0 { e + (-e).exp().ln_1p() } else { e.exp().ln_1p() };
            f -= w[i] * (yf[i] * e - softplus);
        }
        f + 0.5 * ridge * beta[first_penalized..].iter().map(|b| b * b).sum::<f64>()
    };

    let mut current = objective(&beta);
    let mut converged = false;
    let mut iterations = 0;
    let mut scaled = Array2::<f64>::zeros((n, p));
    let mut resid = ndarray::Array1::<f64>::zeros(n);

    while iterations < opts.max_iter {
        iterations += 1;
        let eta = design.dot(&ndarray::ArrayView1::from(&beta[..]));
        for i in 0..n {
            let mu = sigmoid(eta[i]);
            resid[i] = w[i] * (yf[i] - mu);
            let root = (w[i] * mu * (1.0 - mu)).sqrt();
            scaled
                .row_mut(i)
                .iter_mut()
                .zip(design.row(i))
                .for_each(|(s, v)| *s = root * v);
        }
        let mut grad = design.t().dot(&resid).to_vec();
        let mut hess = scaled.t().dot(&scaled).into_raw_vec_and_offset().0;
        for a in first_penalized..p {
            grad[a] -= ridge * beta[a];
            hess[a * p + a] += ridge;
        }
        let h = DMatrix::from_row_slice(p, p, &hess);
        let g = DVector::from_column_slice(&grad);
        // A column with no variation leaves a flat direction when the ridge is
        // zero; a jitter far below any real curvature resolves it with a zero step.
        let jitter = 1e-10 * (0..p).map(|a| hess[a * p + a]).fold(1.0_f64, f64::max);
        let step = match h
            .clone()
            .cholesky()
            .or_else(|| (&h + DMatrix::identity(p, p) * jitter).cholesky())
        {
            Some(ch) => ch.solve(&g),
            None => h.lu().solve(&g).ok_or_else(|| {
                Error::Numerical(format!(
                    "singular information matrix in logistic regression (iteration {iterations})"
                ))
            })?,
        };
        if step.iter().any(|s| !s.is_finite()) {
            return Err(Error::Numerical(
                "non-finite Newton step in logistic regression".into(),
            ));
        }
        // Half the squared Newton decrement estimates the remaining objective
        // gap. Below round-off in the objective, further steps only chase
        // noise along weakly identified directions.
        let decrement = 0.5 * g.dot(&step);
        if decrement <= 1e-14 * current.abs().max(1.0) {
            converged = true;
            break;
        }

        // Damped Newton: halve the step until the penalized objective does not increase.
        let mut t = 1.0;
        let mut accepted = false;
        let mut candidate = beta.clone();
        for _ in 0..40 {
            for (c, (b, s)) in candidate.iter_mut().zip(beta.iter().zip(step.iter())) {
                *c = b + t * s;
            }
            let f = objective(&candidate);
            if f.is_finite() && f <= current + 1e-12 * current.abs().max(1.0) {
                current = f;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        let max_update = step.iter().fold(0.0_f64, |m, s| m.max((t * s).abs()));
        if !accepted {
            // No descent along the Newton direction: we are at the optimum to
            // machine precision.
            converged = step.amax() < opts.tolerance.sqrt();
            break;
        }
        beta.copy_from_slice(&candidate);
        if max_update < opts.tolerance {
            converged = true;
            break;
        }
    }

    if beta.iter().any(|b| !b.is_finite()) {
        return Err(Error::Numerical("logistic coefficients diverged".into()));
    }
    Ok(LogisticModel {
        coefficients: beta,
        ridge,
        converged,
        iterations,
    })
}
