//! Shared inputs for the benchmarks.

use suprand_core::harness::build_ground_truth;
use suprand_core::randomization::{assign, AssignmentScheme};
use suprand_core::{Dataset, ExperimentConfig};

/// Synthetic ground truth of `n` rows under full randomization at 0.5.
pub fn assigned_fixture(n: usize) -> Dataset {
    let cfg = ExperimentConfig::from_json_str(&format!(r#"{{"data_source": {{"kind": "synthetic", "n": {n}}}}}"#))
        .expect("valid config");
    let (truth, _) = build_ground_truth(&cfg).expect("ground truth");
    assign(&truth, &AssignmentScheme::full(0.5, 1, 0)).expect("assignment")
}
