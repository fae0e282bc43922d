//! Synthetic covariates shaped like a retail-bank telemarketing table.
//!
//! Sixteen covariates (socio-demographics, account data, contact history and
//! macroeconomic indicators) are drawn row by row from keyed streams. A
//! logistic base-rate model over them provides the untreated conversion
//! probability.

use std::sync::Arc;

use ndarray::Array2;
use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::data::{Column, Dataset, FeatureSchema};
use crate::error::{invalid, Result};
use crate::numeric::sigmoid;
use crate::rng::{domain, StreamKey};

pub const DEFAULT_ROWS: usize = 45_211;
pub const DEFAULT_BASE_RATE: f64 = 0.109;

const JOBS: [&str; 8] = [
    "admin",
    "blue-collar",
    "technician",
    "services",
    "management",
    "retired",
    "self-employed",
    "student",
];
const MARITAL: [&str; 3] = ["married", "single", "divorced"];
const EDUCATION: [&str; 3] = ["primary", "secondary", "tertiary"];
const NO_YES: [&str; 2] = ["no", "yes"];
const CONTACT: [&str; 2] = ["cellular", "telephone"];

// Macroeconomic regimes: (weight, employment variation, CPI, confidence, euribor).
const REGIMES: [(f64, f64, f64, f64, f64); 8] = [
    (0.19, 1.4, 93.918, -42.7, 4.962),
    (0.16, 1.4, 94.465, -41.8, 4.864),
    (0.19, 1.1, 93.994, -36.4, 4.857),
    (0.09, -0.1, 93.200, -42.0, 4.191),
    (0.20, -1.8, 92.893, -46.2, 1.299),
    (0.10, -1.8, 93.075, -47.1, 1.250),
    (0.04, -2.9, 92.201, -31.4, 0.879),
    (0.03, -3.4, 92.431, -26.9, 0.754),
];

/// Schema of the synthetic table. Age and marital status are hidden from
/// learners.
pub fn bank_schema() -> FeatureSchema {
    FeatureSchema::new(vec![
        Column::numeric("age").hidden(),
        Column::categorical("job", &JOBS),
        Column::categorical("marital", &MARITAL).hidden(),
        Column::categorical("education", &EDUCATION),
        Column::categorical("default", &NO_YES),
        Column::numeric("balance"),
        Column::categorical("housing", &NO_YES),
        Column::categorical("loan", &NO_YES),
        Column::categorical("contact", &CONTACT),
        Column::numeric("duration"),
        Column::numeric("campaign"),
        Column::numeric("previous"),
        Column::numeric("emp_var_rate"),
        Column::numeric("cons_price_idx"),
        Column::numeric("cons_conf_idx"),
        Column::numeric("euribor3m"),
    ])
    .expect("static schema is valid")
}

/// The twelve personal and macroeconomic columns that drive the treatment effect.
pub fn default_tau_columns() -> Vec<String> {
    [
        "age",
        "job",
        "marital",
        "education",
        "default",
        "balance",
        "housing",
        "loan",
        "emp_var_rate",
        "cons_price_idx",
        "cons_conf_idx",
        "euribor3m",
    ]
    .iter()
    .map(|s| (*s).to_owned())
    .collect()
}

fn pick<R: Rng>(rng: &mut R, weights: &[f64]) -> usize {
    let total: f64 = weights.iter().sum();
    let mut u = rng.random::<f64>() * total;
    for (i, w) in weights.iter().enumerate() {
        if u < *w {
            return i;
        }
        u -= w;
    }
    weights.len() - 1
}

fn geometric<R: Rng>(rng: &mut R, p: f64, cap: u32) -> f64 {
    let mut k = 0;
    while k < cap && rng.random::<f64>() > p {
        k += 1;
    }
    f64::from(k)
}

fn one_hot(out: &mut Vec<f64>, k: usize, levels: usize) {
    out.extend((0..levels).map(|j| if j == k { 1.0 } else { 0.0 }));
}

/// Draw `n` synthetic customers. Outcomes are left at zero; see
/// [`crate::simulation::make_potential_outcomes_synthetic`].
pub fn generate_covariates(n: usize, seed: u64) -> Result<Dataset> {
    if n == 0 {
        return Err(invalid("synthetic data needs at least one row"));
    }
    let schema = Arc::new(bank_schema());
    let d = schema.encoded_width();
    let key = StreamKey::new(seed, domain::SYNTHETIC, 0);
    let std_normal = Normal::new(0.0, 1.0).expect("valid normal");
    let mut values = Vec::with_capacity(n * d);
    for i in 0..n {
        let mut rng = key.rng(i as u64);
        let mut z = || -> f64 { std_normal.sample(&mut rng) };
        let age = (41.0 + 10.5 * z()).clamp(18.0, 95.0).round();
        let balance = ((6.8 + 1.3 * z()).exp() - 400.0).round().min(100_000.0);
        let duration = (5.2 + 0.7 * z()).exp().round().max(1.0);
        let mut rng = key.rng(i as u64 ^ 0xA5A5_A5A5);
        let job = if age >= 60.0 && rng.random::<f64>() < 0.7 {
            5
        } else if age < 25.0 && rng.random::<f64>() < 0.35 {
            7
        } else {
            pick(&mut rng, &[0.22, 0.25, 0.18, 0.10, 0.15, 0.02, 0.05, 0.03])
        };
        let marital = if age < 30.0 {
            pick(&mut rng, &[0.38, 0.60, 0.02])
        } else {
            pick(&mut rng, &[0.65, 0.20, 0.15])
        };
        let education = match job {
            4 => pick(&mut rng, &[0.05, 0.25, 0.70]),
            1 => pick(&mut rng, &[0.40, 0.50, 0.10]),
            _ => pick(&mut rng, &[0.15, 0.55, 0.30]),
        };
        let default = usize::from(rng.random::<f64>() < 0.02);
        let housing = usize::from(rng.random::<f64>() < if age > 60.0 { 0.2 } else { 0.55 });
        let loan = usize::from(rng.random::<f64>() < 0.16);
        let regime = pick(&mut rng, &REGIMES.map(|r| r.0));
        let contact_tel = if regime < 3 { 0.45 } else { 0.2 };
        let contact = usize::from(rng.random::<f64>() < contact_tel);
        let campaign = 1.0 + geometric(&mut rng, 0.45, 30);
        let previous = if rng.random::<f64>() < 0.82 {
            0.0
        } else {
            1.0 + geometric(&mut rng, 0.5, 20)
        };
        let (_, emp, cpi, conf, eur) = REGIMES[regime];

        values.push(age);
        one_hot(&mut values, job, JOBS.len());
        one_hot(&mut values, marital, MARITAL.len());
        one_hot(&mut values, education, EDUCATION.len());
        one_hot(&mut values, default, 2);
        values.push(balance);
        one_hot(&mut values, housing, 2);
        one_hot(&mut values, loan, 2);
        one_hot(&mut values, contact, 2);
        values.push(duration);
        values.push(campaign);
        values.push(previous);
        values.push(emp);
        values.push(cpi);
        values.push(conf);
        values.push(eur);
    }
    let x = Array2::from_shape_vec((n, d), values).expect("row width matches schema");
    Dataset::unassigned(schema, x, vec![0; n])
}

/// Base-rate model for [`bank_schema`] data: coefficients on the encoded
/// columns (intercept first), with the intercept calibrated so that the mean
/// clipped conversion probability equals `base_rate`.
pub fn default_base_model(ds: &Dataset, base_rate: f64) -> Result<Vec<f64>> {
    if !(base_rate > 0.0 && base_rate < 1.0) {
        return Err(invalid("base rate must be inside (0, 1)"));
    }
    let schema = ds.schema();
    let names = schema.encoded_names();
    // Effects on the standardized scale for numeric columns, raw scale for
    // indicators.
    let effects: [(&str, f64); 19] = [
        ("duration", 1.1),
        ("previous", 0.35),
        ("euribor3m", -0.55),
        ("emp_var_rate", -0.2),
        ("cons_conf_idx", 0.15),
        ("campaign", -0.25),
        ("balance", 0.1),
        ("age", 0.05),
        ("contact=telephone", -0.5),
        ("housing=yes", -0.35),
        ("loan=yes", -0.3),
        ("job=retired", 0.5),
        ("job=student", 0.6),
        ("job=blue-collar", -0.25),
        ("education=tertiary", 0.2),
        ("marital=single", 0.15),
        ("default=yes", -0.3),
        ("job=management", 0.1),
        ("education=primary", -0.1),
    ];
    let mut beta = vec![0.0; ds.d() + 1];
    let mut offset = 0.0;
    let n = ds.n() as f64;
    for (name, effect) in effects {
        let j = names
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| invalid(format!("base model column `{name}` not in schema")))?;
        if name.contains('=') {
            beta[j + 1] = effect;
        } else {
            let col = ds.x().column(j);
            let m = col.sum() / n;
            let s = (col.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / n).sqrt().max(1e-12);
            beta[j + 1] = effect / s;
            offset -= effect * m / s;
        }
    }
    let eta: Vec<f64> = ds
        .x()
        .rows()
        .into_iter()
        .map(|r| offset + beta[1..].iter().zip(r.iter()).map(|(b, v)| b * v).sum::<f64>())
        .collect();
    let mean_rate = |c: f64| -> f64 {
        eta.iter()
            .map(|e| sigmoid(e + c).clamp(super::PROB_FLOOR, super::PROB_CEIL))
            .sum::<f64>()
            / n
    };
    let (mut lo, mut hi) = (-30.0, 30.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mean_rate(mid) < base_rate {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    beta[0] = offset + 0.5 * (lo + hi);
    Ok(beta)
}
