use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{DataSource, ExperimentConfig, ModelKind, ATE_REFERENCE};
use crate::data::{ingest_csv, split_folds, Dataset, FeatureSchema};
use crate::error::{Error, Result};
use crate::estimators::{
    ate_dr, ate_ipw, ate_naive, fit_causal_forest, fit_two_model, AteMethod, ForestParams,
};
use crate::evaluation::{
    campaign_stats, kruskal_wallis, levene, mae_ite, policy_profit, qini, CampaignStats, Center,
    KruskalWallis, Levene, ProfitSetting,
};
use crate::numeric::{mean, sd};
use crate::randomization::{assign, AssignmentScheme};
use crate::rng::{derive_seed, domain, mix};
use crate::simulation::{
    default_base_model, generate_covariates, make_potential_outcomes_flip, make_potential_outcomes_synthetic,
    oracle_scores, simulate_tau, NoisyOracle,
};

/// Stream seeds derived from the master seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Seeds {
    pub master: u64,
    pub covariates: u64,
    pub tau: u64,
    pub outcomes: u64,
    pub oracle: u64,
    pub assignment: u64,
    pub holdout: u64,
    pub folds: u64,
    pub forest: u64,
}

impl Seeds {
    pub fn new(cfg: &ExperimentConfig) -> Self {
        let m = cfg.master_seed;
        Seeds {
            master: m,
            covariates: derive_seed(m, domain::SYNTHETIC),
            tau: cfg.tau.seed.unwrap_or_else(|| derive_seed(m, domain::TAU)),
            outcomes: derive_seed(m, domain::OUTCOMES),
            oracle: derive_seed(m, domain::ORACLE),
            assignment: derive_seed(m, domain::ASSIGN),
            holdout: derive_seed(m, domain::HOLDOUT),
            folds: derive_seed(m, domain::FOLDS),
            forest: derive_seed(m, domain::FOREST),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroundTruthSummary {
    pub n: usize,
    pub true_ate: f64,
    /// Conversion rate if nobody is contacted.
    pub conversion_untreated: f64,
    /// Conversion rate if everybody is contacted.
    pub conversion_treated: f64,
}

/// Build the unassigned ground-truth table the whole run works on.
pub fn build_ground_truth(cfg: &ExperimentConfig) -> Result<(Dataset, GroundTruthSummary)> {
    let seeds = Seeds::new(cfg);
    let ds = match &cfg.data_source {
        DataSource::Synthetic { n, base_rate } => {
            let x = generate_covariates(*n, seeds.covariates)?;
            let beta = default_base_model(&x, *base_rate)?;
            let (tau, _) = simulate_tau(&x, &cfg.tau.columns, seeds.tau, cfg.tau.ate, cfg.tau.sd)?;
            make_potential_outcomes_synthetic(&x, &tau, &beta, seeds.outcomes)?
        }
        DataSource::Csv { path, schema, target } => {
            let schema = FeatureSchema::from_json_file(schema)?;
            let raw = ingest_csv(path, &schema, target)?;
            if raw.truth().is_some() {
                raw
            } else {
                let (tau, _) = simulate_tau(&raw, &cfg.tau.columns, seeds.tau, cfg.tau.ate, cfg.tau.sd)?;
                make_potential_outcomes_flip(&raw, &tau, seeds.outcomes)?
            }
        }
    };
    let truth = ds.require_truth()?;
    let n = ds.n() as f64;
    let summary = GroundTruthSummary {
        n: ds.n(),
        true_ate: mean(&truth.ite),
        conversion_untreated: truth.y0.iter().map(|&v| f64::from(v)).sum::<f64>() / n,
        conversion_treated: truth.y1.iter().map(|&v| f64::from(v)).sum::<f64>() / n,
    };
    Ok((ds, summary))
}

/// Metrics of one learner in one repetition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelOutcome {
    pub model: String,
    pub mae: f64,
    pub qini: Option<f64>,
    /// Policy profit per conversion value of the grid.
    pub policy_profit: Vec<f64>,
}

/// Everything measured for one scheme in one repetition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemeOutcome {
    pub scheme: String,
    pub fold: usize,
    pub draw: usize,
    pub repetition: usize,
    pub campaign: CampaignStats,
    pub naive: f64,
    pub ipw: f64,
    pub dr: f64,
    pub models: Vec<ModelOutcome>,
}

fn contextualize(scheme: &str, fold: usize, draw: usize) -> impl FnOnce(Error) -> Error + '_ {
    move |e| Error::Repetition {
        scheme: scheme.to_owned(),
        fold,
        draw,
        source: Box::new(e),
    }
}

struct Split<'a> {
    fold: usize,
    draw: usize,
    repetition: usize,
    train: Dataset,
    holdout: &'a Dataset,
    train_scores: Vec<f64>,
}

fn run_repetition(cfg: &ExperimentConfig, seeds: &Seeds, split: &Split<'_>) -> Result<Vec<SchemeOutcome>> {
    let settings: Vec<ProfitSetting> = cfg
        .profit_grid
        .iter()
        .map(|&v| ProfitSetting::new(v, cfg.contact_cost))
        .collect::<Result<_>>()?;
    let rep = split.repetition as u64;
    let hold_truth = &split.holdout.require_truth()?.ite;
    let hold_assigned = assign(split.holdout, &AssignmentScheme::full(0.5, seeds.holdout, rep))?;

    let mut out = Vec::with_capacity(cfg.schemes.len());
    for spec in &cfg.schemes {
        let ctx = contextualize(spec.name(), split.fold, split.draw);
        let result = (|| -> Result<SchemeOutcome> {
            let (scheme, _) = spec.instantiate(&split.train_scores, &split.train_scores, seeds.assignment, rep)?;
            let train = assign(&split.train, &scheme)?;
            let campaign = campaign_stats(&train);
            let naive = ate_naive(&train)?.value;
            let ipw = ate_ipw(&train)?.value;
            let two = fit_two_model(&train, cfg.two_model_ipw)?;
            let (g1, g0) = two.outcome_predictions(&train);
            let dr = ate_dr(&train, &g1, &g0)?.value;

            let evaluate = |name: &str, pred: Vec<f64>, rank: bool| -> Result<ModelOutcome> {
                Ok(ModelOutcome {
                    model: name.to_owned(),
                    mae: mae_ite(&pred, hold_truth)?,
                    qini: if rank {
                        Some(qini(&pred, &hold_assigned, cfg.qini_weighted)?.coefficient)
                    } else {
                        None
                    },
                    policy_profit: settings
                        .iter()
                        .map(|s| policy_profit(&pred, split.holdout, s))
                        .collect::<Result<_>>()?,
                })
            };
            let mut models = vec![evaluate(ATE_REFERENCE, vec![ipw; split.holdout.n()], false)?];
            for kind in &cfg.models {
                let pred = match kind {
                    ModelKind::TwoModel => two.predict(split.holdout),
                    ModelKind::CausalForest => {
                        let params = ForestParams {
                            seed: mix(&[seeds.forest, rep]),
                            keep_samples: false,
                            ..cfg.forest.clone()
                        };
                        fit_causal_forest(&train, &params)?.predict(split.holdout)
                    }
                };
                models.push(evaluate(kind.as_str(), pred, true)?);
            }
            Ok(SchemeOutcome {
                scheme: spec.name().to_owned(),
                fold: split.fold,
                draw: split.draw,
                repetition: split.repetition,
                campaign,
                naive,
                ipw,
                dr,
                models,
            })
        })();
        out.push(result.map_err(ctx)?);
    }
    Ok(out)
}

/// Run every repetition and return the per-scheme outcomes in
/// `(repetition, scheme)` order.
pub fn run_repetitions(cfg: &ExperimentConfig, ds: &Dataset) -> Result<Vec<SchemeOutcome>> {
    cfg.validate()?;
    let seeds = Seeds::new(cfg);
    let folds = split_folds(ds.n(), cfg.folds, seeds.folds)?;
    let oracle = NoisyOracle {
        sigma: cfg.oracle_sigma,
        seed: seeds.oracle,
    };
    let jobs: Vec<(usize, usize)> = (0..cfg.folds)
        .flat_map(|f| (0..cfg.draws_per_fold).map(move |j| (f, j)))
        .collect();
    let holdouts: Vec<Dataset> = folds.iter().map(|rows| ds.subset(rows)).collect();
    let train_rows: Vec<Vec<usize>> = (0..cfg.folds)
        .map(|f| {
            let mut rows: Vec<usize> = folds
                .iter()
                .enumerate()
                .filter(|(g, _)| *g != f)
                .flat_map(|(_, r)| r.iter().copied())
                .collect();
            rows.sort_unstable();
            rows
        })
        .collect();

    let results: Vec<Result<Vec<SchemeOutcome>>> = jobs
        .par_iter()
        .map(|&(fold, draw)| {
            let repetition = fold * cfg.draws_per_fold + draw;
            let train = ds.subset(&train_rows[fold]);
            let train_scores = oracle_scores(&train, &oracle, repetition as u64)?;
            let split = Split {
                fold,
                draw,
                repetition,
                train,
                holdout: &holdouts[fold],
                train_scores,
            };
            run_repetition(cfg, &seeds, &split)
        })
        .collect();
    let mut all = Vec::with_capacity(jobs.len() * cfg.schemes.len());
    for r in results {
        all.extend(r?);
    }
    Ok(all)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mean: f64,
    pub sd: f64,
    pub n: usize,
}

impl Summary {
    pub fn of(values: &[f64]) -> Self {
        Summary {
            mean: mean(values),
            sd: sd(values),
            n: values.len(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfitCell {
    pub conversion_value: f64,
    pub profit: Summary,
}

/// Deterministic reference policies evaluated on the full ground truth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicyReport {
    pub name: String,
    pub targeted_fraction: f64,
    pub conversion_rate: f64,
    pub profit: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemeReport {
    pub name: String,
    pub targeted_fraction: Summary,
    pub conversion_rate: Summary,
    pub experiment_profit: Vec<ProfitCell>,
    pub ate_naive: Summary,
    pub ate_ipw: Summary,
    pub ate_dr: Summary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelReport {
    pub scheme: String,
    pub model: String,
    pub mae: Summary,
    /// Absent for predictors that cannot rank customers.
    pub qini: Option<Summary>,
    pub policy_profit: Vec<ProfitCell>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AteRecord {
    pub scheme: String,
    pub method: AteMethod,
    pub repetition: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KruskalReport {
    /// `scheme/method` labels of the compared groups.
    pub groups: Vec<String>,
    pub result: KruskalWallis,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeveneReport {
    pub scheme: String,
    pub center: Center,
    pub result: Levene,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestReport {
    pub kruskal_wallis: Option<KruskalReport>,
    pub levene_ipw_dr: Option<LeveneReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub config: ExperimentConfig,
    pub config_hash: String,
    pub seeds: Seeds,
    pub repetitions: usize,
    pub ground_truth: GroundTruthSummary,
    pub policies: Vec<PolicyReport>,
    pub schemes: Vec<SchemeReport>,
    pub models: Vec<ModelReport>,
    pub tests: TestReport,
    pub ate_estimates: Vec<AteRecord>,
}

impl RunReport {
    pub fn scheme(&self, name: &str) -> Option<&SchemeReport> {
        self.schemes.iter().find(|s| s.name == name)
    }

    pub fn model(&self, scheme: &str, model: &str) -> Option<&ModelReport> {
        self.models.iter().find(|m| m.scheme == scheme && m.model == model)
    }

    /// Estimates of one method under one scheme, in repetition order.
    pub fn estimates(&self, scheme: &str, method: AteMethod) -> Vec<f64> {
        self.ate_estimates
            .iter()
            .filter(|r| r.scheme == scheme && r.method == method)
            .map(|r| r.value)
            .collect()
    }
}

/// Full study: ground truth, all repetitions, aggregation and tests.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunReport> {
    cfg.validate()?;
    let (ds, truth) = build_ground_truth(cfg)?;
    let outcomes = run_repetitions(cfg, &ds)?;
    aggregate(cfg, truth, &outcomes)
}

fn profit_cells(grid: &[f64], values: impl Fn(usize) -> Vec<f64>) -> Vec<ProfitCell> {
    grid.iter()
        .enumerate()
        .map(|(k, &v)| ProfitCell {
            conversion_value: v,
            profit: Summary::of(&values(k)),
        })
        .collect()
}

/// Aggregate per-repetition outcomes into a report.
pub fn aggregate(
    cfg: &ExperimentConfig,
    truth: GroundTruthSummary,
    outcomes: &[SchemeOutcome],
) -> Result<RunReport> {
    let grid = &cfg.profit_grid;
    let c = cfg.contact_cost;
    let policies = vec![
        PolicyReport {
            name: "none".into(),
            targeted_fraction: 0.0,
            conversion_rate: truth.conversion_untreated,
            profit: grid.iter().map(|&v| (v, truth.conversion_untreated * v)).collect(),
        },
        PolicyReport {
            name: "all".into(),
            targeted_fraction: 1.0,
            conversion_rate: truth.conversion_treated,
            profit: grid.iter().map(|&v| (v, truth.conversion_treated * v - c)).collect(),
        },
    ];

    let mut schemes = Vec::new();
    let mut models = Vec::new();
    let mut ate_estimates = Vec::new();
    for spec in &cfg.schemes {
        let rows: Vec<&SchemeOutcome> = outcomes.iter().filter(|o| o.scheme == spec.name()).collect();
        let pick = |f: &dyn Fn(&SchemeOutcome) -> f64| -> Vec<f64> { rows.iter().map(|o| f(o)).collect() };
        let fraction = pick(&|o| o.campaign.targeted_fraction);
        let conversion = pick(&|o| o.campaign.conversion_rate);
        schemes.push(SchemeReport {
            name: spec.name().to_owned(),
            targeted_fraction: Summary::of(&fraction),
            conversion_rate: Summary::of(&conversion),
            experiment_profit: profit_cells(grid, |k| {
                let setting = ProfitSetting {
                    conversion_value: grid[k],
                    contact_cost: c,
                };
                rows.iter().map(|o| o.campaign.profit(&setting)).collect()
            }),
            ate_naive: Summary::of(&pick(&|o| o.naive)),
            ate_ipw: Summary::of(&pick(&|o| o.ipw)),
            ate_dr: Summary::of(&pick(&|o| o.dr)),
        });
        for o in &rows {
            for (method, value) in [(AteMethod::Naive, o.naive), (AteMethod::Ipw, o.ipw), (AteMethod::Dr, o.dr)] {
                ate_estimates.push(AteRecord {
                    scheme: o.scheme.clone(),
                    method,
                    repetition: o.repetition,
                    value,
                });
            }
        }
        let model_names: Vec<String> = rows
            .first()
            .map(|o| o.models.iter().map(|m| m.model.clone()).collect())
            .unwrap_or_default();
        for (mi, name) in model_names.iter().enumerate() {
            let ms: Vec<&ModelOutcome> = rows.iter().map(|o| &o.models[mi]).collect();
            let mae: Vec<f64> = ms.iter().map(|m| m.mae).collect();
            let qini: Option<Vec<f64>> = ms.iter().map(|m| m.qini).collect();
            models.push(ModelReport {
                scheme: spec.name().to_owned(),
                model: name.clone(),
                mae: Summary::of(&mae),
                qini: qini.map(|q| Summary::of(&q)),
                policy_profit: profit_cells(grid, |k| ms.iter().map(|m| m.policy_profit[k]).collect()),
            });
        }
    }
    ate_estimates.sort_by(|a, b| {
        (a.scheme.as_str(), a.method.as_str(), a.repetition).cmp(&(b.scheme.as_str(), b.method.as_str(), b.repetition))
    });
    let tests = hypothesis_tests(cfg, outcomes)?;
    Ok(RunReport {
        config: cfg.clone(),
        config_hash: cfg.hash(),
        seeds: Seeds::new(cfg),
        repetitions: cfg.repetitions(),
        ground_truth: truth,
        policies,
        schemes,
        models,
        tests,
        ate_estimates,
    })
}

/// Kruskal-Wallis over the corrected estimates of every setting (IPW for
/// constant-propensity schemes, IPW and DR for supervised ones) and Levene
/// IPW against DR under the first supervised scheme.
fn hypothesis_tests(cfg: &ExperimentConfig, outcomes: &[SchemeOutcome]) -> Result<TestReport> {
    let values = |scheme: &str, f: fn(&SchemeOutcome) -> f64| -> Vec<f64> {
        outcomes.iter().filter(|o| o.scheme == scheme).map(f).collect()
    };
    let mut labels = Vec::new();
    let mut groups = Vec::new();
    for spec in &cfg.schemes {
        labels.push(format!("{}/ipw", spec.name()));
        groups.push(values(spec.name(), |o| o.ipw));
        if spec.is_supervised() {
            labels.push(format!("{}/dr", spec.name()));
            groups.push(values(spec.name(), |o| o.dr));
        }
    }
    let kruskal = if groups.len() >= 2 {
        Some(KruskalReport {
            groups: labels,
            result: kruskal_wallis(&groups)?,
        })
    } else {
        None
    };
    let levene_ipw_dr = match cfg.schemes.iter().find(|s| s.is_supervised()) {
        Some(spec) if cfg.repetitions() >= 2 => {
            let ipw = values(spec.name(), |o| o.ipw);
            let dr = values(spec.name(), |o| o.dr);
            Some(LeveneReport {
                scheme: spec.name().to_owned(),
                center: Center::Mean,
                result: levene(&[ipw, dr], Center::Mean)?,
            })
        }
        _ => None,
    };
    Ok(TestReport {
        kruskal_wallis: kruskal,
        levene_ipw_dr,
    })
}
