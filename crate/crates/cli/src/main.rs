use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde::Serialize;

use suprand_core::data::{ingest_csv, write_csv};
use suprand_core::estimators::{ate_dr, ate_ipw, ate_naive, fit_causal_forest, fit_two_model};
use suprand_core::evaluation::{mae_ite, qini};
use suprand_core::harness::{
    build_ground_truth, run_experiment, unix_ms, write_report, write_run_log, RunLog, Seeds,
};
use suprand_core::randomization::assign;
use suprand_core::selftest::run_selftest;
use suprand_core::simulation::{bank_schema, oracle_scores, NoisyOracle};
use suprand_core::{AteEstimate, Error, ErrorClass, ExperimentConfig, FeatureSchema, ForestParams, SchemeSpec};

#[derive(Parser)]
#[command(name = "suprand", version, about = "Supervised randomization simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a ground-truth dataset and write it as CSV
    Simulate {
        /// Experiment config; the built-in defaults are used when absent
        #[arg(long)]
        config: Option<PathBuf>,
        /// Override the master seed
        #[arg(long)]
        seed: Option<u64>,
        /// Output CSV; the schema is written next to it as `<stem>.schema.json`
        #[arg(long)]
        out: PathBuf,
    },
    /// Assign treatments to a dataset under one scheme
    Assign {
        #[arg(long)]
        data: PathBuf,
        /// Scheme as NAME[:PARAM], e.g. full:0.5 or supervised:10
        #[arg(long)]
        scheme: String,
        /// JSON schema of the data; defaults to the built-in bank layout
        #[arg(long)]
        schema: Option<PathBuf>,
        #[arg(long, default_value = "y")]
        target: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Noise of the scoring oracle used by supervised schemes
        #[arg(long, default_value_t = suprand_core::simulation::DEFAULT_ORACLE_SIGMA)]
        oracle_sigma: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Estimate effects and fit uplift models on an assigned dataset
    Estimate {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        schema: Option<PathBuf>,
        #[arg(long, default_value = "y")]
        target: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Trees in the causal forest; 0 skips the forest
        #[arg(long, default_value_t = suprand_core::estimators::forest::DEFAULT_TREES)]
        trees: usize,
        /// Output JSON file
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the full Monte Carlo study and write the report tables
    Report {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads; all cores by default
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Run the built-in oracle checks
    Selftest,
}

#[derive(Serialize)]
struct ModelEstimate {
    model: &'static str,
    mae: Option<f64>,
    qini: Option<f64>,
}

#[derive(Serialize)]
struct Estimates {
    n: usize,
    treated: usize,
    true_ate: Option<f64>,
    ate: Vec<AteEstimate>,
    models: Vec<ModelEstimate>,
}

fn load_config(path: Option<&Path>, seed: Option<u64>) -> suprand_core::Result<ExperimentConfig> {
    let mut cfg = match path {
        Some(p) => ExperimentConfig::from_json_file(p)?,
        None => ExperimentConfig::default(),
    };
    if let Some(s) = seed {
        cfg.master_seed = s;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn load_schema(path: Option<&Path>) -> suprand_core::Result<FeatureSchema> {
    match path {
        Some(p) => FeatureSchema::from_json_file(p),
        None => Ok(bank_schema()),
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> suprand_core::Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn schema_path(out: &Path) -> PathBuf {
    let stem = out.file_stem().and_then(|s| s.to_str()).unwrap_or("data");
    out.with_file_name(format!("{stem}.schema.json"))
}

fn simulate(config: Option<&Path>, seed: Option<u64>, out: &Path) -> suprand_core::Result<()> {
    let cfg = load_config(config, seed)?;
    let (ds, summary) = build_ground_truth(&cfg)?;
    write_csv(&ds, out)?;
    write_json(&schema_path(out), ds.schema())?;
    eprintln!(
        "wrote {} rows to {} (true ATE {:.5})",
        summary.n,
        out.display(),
        summary.true_ate
    );
    Ok(())
}

fn assign_cmd(
    data: &Path,
    scheme: &str,
    schema: Option<&Path>,
    target: &str,
    seed: u64,
    oracle_sigma: f64,
    out: &Path,
) -> suprand_core::Result<()> {
    let spec: SchemeSpec = scheme.parse()?;
    let schema = load_schema(schema)?;
    let ds = ingest_csv(data, &schema, target)?;
    let seeds = Seeds::new(&ExperimentConfig {
        master_seed: seed,
        ..ExperimentConfig::default()
    });
    let scores = if spec.is_supervised() {
        let oracle = NoisyOracle {
            sigma: oracle_sigma,
            seed: seeds.oracle,
        };
        oracle_scores(&ds, &oracle, 0)?
    } else {
        Vec::new()
    };
    let (scheme, _) = spec.instantiate(&scores, &scores, seeds.assignment, 0)?;
    let assigned = assign(&ds, &scheme)?;
    write_csv(&assigned, out)?;
    eprintln!(
        "{}: treated {} of {} rows",
        spec.name(),
        assigned.treated_count(),
        assigned.n()
    );
    Ok(())
}

fn estimate(
    data: &Path,
    schema: Option<&Path>,
    target: &str,
    seed: u64,
    trees: usize,
    out: &Path,
) -> suprand_core::Result<()> {
    let schema = load_schema(schema)?;
    let ds = ingest_csv(data, &schema, target)?;
    let two_model = fit_two_model(&ds, true)?;
    let (g1, g0) = two_model.outcome_predictions(&ds);
    let ate = vec![ate_naive(&ds)?, ate_ipw(&ds)?, ate_dr(&ds, &g1, &g0)?];

    let mut predictions = vec![("two_model", two_model.predict(&ds))];
    if trees > 0 {
        let params = ForestParams {
            trees,
            seed,
            ..ForestParams::default()
        };
        predictions.push(("causal_forest", fit_causal_forest(&ds, &params)?.predict(&ds)));
    }
    let truth = ds.truth();
    let mut models = Vec::new();
    for (model, pred) in predictions {
        let mae = truth.map(|t| mae_ite(&pred, &t.ite)).transpose()?;
        models.push(ModelEstimate {
            model,
            mae,
            qini: Some(qini(&pred, &ds, false)?.coefficient),
        });
    }
    let report = Estimates {
        n: ds.n(),
        treated: ds.treated_count(),
        true_ate: ds.true_ate(),
        ate,
        models,
    };
    write_json(out, &report)
}

fn report(config: Option<&Path>, out: &Path, seed: Option<u64>, threads: Option<usize>) -> suprand_core::Result<()> {
    let cfg = load_config(config, seed)?;
    if let Some(t) = threads {
        if t == 0 {
            return Err(Error::InvalidArgument("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
    }
    let started = unix_ms();
    let clock = Instant::now();
    let result = run_experiment(&cfg)?;
    write_report(&result, out)?;
    let log = RunLog {
        config_hash: result.config_hash.clone(),
        started_unix_ms: started,
        finished_unix_ms: unix_ms(),
        elapsed_ms: clock.elapsed().as_millis(),
        threads: rayon::current_num_threads(),
    };
    write_run_log(&log, out)?;
    eprintln!(
        "{} repetitions x {} schemes in {:.1}s, report in {}",
        result.repetitions,
        result.schemes.len(),
        clock.elapsed().as_secs_f64(),
        out.display()
    );
    Ok(())
}

fn selftest() -> suprand_core::Result<bool> {
    let results = run_selftest();
    let mut ok = true;
    for r in &results {
        println!("{} {}: {}", if r.passed { "PASS" } else { "FAIL" }, r.name, r.detail);
        ok &= r.passed;
    }
    Ok(ok)
}

fn exit_code(class: ErrorClass) -> u8 {
    match class {
        ErrorClass::Usage => 1,
        ErrorClass::Data => 2,
        ErrorClass::Numerical => 3,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match &cli.command {
        Command::Simulate { config, seed, out } => simulate(config.as_deref(), *seed, out),
        Command::Assign {
            data,
            scheme,
            schema,
            target,
            seed,
            oracle_sigma,
            out,
        } => assign_cmd(data, scheme, schema.as_deref(), target, *seed, *oracle_sigma, out),
        Command::Estimate {
            data,
            schema,
            target,
            seed,
            trees,
            out,
        } => estimate(data, schema.as_deref(), target, *seed, *trees, out),
        Command::Report {
            config,
            out,
            seed,
            threads,
        } => report(config.as_deref(), out, *seed, *threads),
        Command::Selftest => match selftest() {
            Ok(true) => Ok(()),
            Ok(false) => return ExitCode::from(3),
            Err(e) => Err(e),
        },
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(e.class()))
        }
    }
}
