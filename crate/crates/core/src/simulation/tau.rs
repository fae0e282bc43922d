use ndarray::Array2;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{invalid, Error, Result};
use crate::numeric::{mean, sd, sigmoid, Standardizer};
use crate::rng::{domain, StreamKey};

pub const DEFAULT_ATE: f64 = 0.05;
pub const DEFAULT_SD: f64 = 0.04;

/// Random one-hidden-layer network with sigmoid activations that maps the
/// selected covariates to an individual treatment effect, followed by an
/// affine recalibration to a target mean and standard deviation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TauNetwork {
    pub input_columns: Vec<String>,
    /// Encoded column indices feeding the network.
    pub encoded_indices: Vec<usize>,
    /// In-sample z-scoring of the inputs.
    pub scaling: Standardizer,
    /// hidden_dim x input_dim, hidden_dim == input_dim.
    pub w1: Vec<Vec<f64>>,
    pub b1: Vec<f64>,
    pub w2: Vec<f64>,
    pub b2: f64,
    /// tau = scale * g(x) + shift
    pub scale: f64,
    pub shift: f64,
    pub target_ate: f64,
    pub target_sd: f64,
}

impl TauNetwork {
    /// Draw standard-Gaussian weights for `input_dim` inputs.
    fn random(input_dim: usize, seed: u64) -> (Vec<Vec<f64>>, Vec<f64>, Vec<f64>, f64) {
        let mut rng = StreamKey::new(seed, domain::TAU, 0).rng(0);
        let mut draw = || -> f64 { StandardNormal.sample(&mut rng) };
        let w1 = (0..input_dim)
            .map(|_| (0..input_dim).map(|_| draw()).collect())
            .collect();
        let b1 = (0..input_dim).map(|_| draw()).collect();
        let w2 = (0..input_dim).map(|_| draw()).collect();
        let b2 = draw();
        (w1, b1, w2, b2)
    }

    /// Raw (uncalibrated) network output for standardized inputs.
    fn raw(&self, z: &[f64]) -> f64 {
        self.w1
            .iter()
            .zip(&self.b1)
            .zip(&self.w2)
            .map(|((row, b), w)| {
                let a = b + row.iter().zip(z).map(|(u, v)| u * v).sum::<f64>();
                w * sigmoid(a)
            })
            .sum::<f64>()
            + self.b2
    }

    fn raw_outputs(&self, x: &Array2<f64>) -> Vec<f64> {
        let mut z = Vec::with_capacity(self.encoded_indices.len());
        x.rows()
            .into_iter()
            .map(|row| {
                z.clear();
                z.extend(
                    self.encoded_indices
                        .iter()
                        .enumerate()
                        .map(|(j, &c)| (row[c] - self.scaling.means[j]) / self.scaling.sds[j]),
                );
                self.raw(&z)
            })
            .collect()
    }

    /// Calibrated effect for every row of `ds`.
    pub fn evaluate(&self, ds: &Dataset) -> Vec<f64> {
        self.raw_outputs(ds.x())
            .into_iter()
            .map(|g| self.scale * g + self.shift)
            .collect()
    }
}

/// Simulate individual treatment effects from the named columns.
///
/// The returned vector has in-sample mean `target_ate` and sample standard
/// deviation `target_sd` (up to rounding).
pub fn simulate_tau(
    ds: &Dataset,
    columns: &[String],
    seed: u64,
    target_ate: f64,
    target_sd: f64,
) -> Result<(Vec<f64>, TauNetwork)> {
    if columns.is_empty() {
        return Err(invalid("the effect network needs at least one input column"));
    }
    if !(target_sd >= 0.0 && target_sd.is_finite() && target_ate.is_finite()) {
        return Err(invalid("target mean must be finite and target sd non-negative"));
    }
    if ds.n() < 2 {
        return Err(invalid("need at least two rows to calibrate the effect distribution"));
    }
    let encoded_indices = ds.schema().encoded_indices(columns)?;
    let inputs = ds.x().select(ndarray::Axis(1), &encoded_indices);
    let scaling = Standardizer::fit(&inputs);
    let (w1, b1, w2, b2) = TauNetwork::random(encoded_indices.len(), seed);
    let mut net = TauNetwork {
        input_columns: columns.to_vec(),
        encoded_indices,
        scaling,
        w1,
        b1,
        w2,
        b2,
        scale: 1.0,
        shift: 0.0,
        target_ate,
        target_sd,
    };
    let g = net.raw_outputs(ds.x());
    let g_mean = mean(&g);
    let g_sd = sd(&g);
    // Rounding noise on a constant output is not variation worth rescaling.
    if target_sd > 0.0 && (g_sd.is_nan() || g_sd <= 1e-12 * g_mean.abs().max(1.0)) {
        return Err(Error::Numerical(
            "network output is constant over the sample; cannot rescale".into(),
        ));
    }
    net.scale = if target_sd > 0.0 { target_sd / g_sd } else { 0.0 };
    net.shift = target_ate - net.scale * g_mean;
    let tau = g.iter().map(|v| net.scale * v + net.shift).collect();
    Ok((tau, net))
}
