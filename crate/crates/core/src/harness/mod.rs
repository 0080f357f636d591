//! Experiment harness: reproducible seed derivation, sweep configuration,
//! trial records, and the CSV/JSON emitters behind the CLI.

mod config;
mod seed;
mod sweeps;

pub use config::{
    resolve_against_out_dir, Assertion, EpsRule, ExperimentConfig, ExperimentKind, FamilySpec,
    GeometryStats,
};
pub use seed::{derive_seed, splitmix64};
pub use sweeps::{
    evaluate_assertions, quantile, run_condition_tables, run_coupling_check, run_experiment,
    run_supercritical_sweep, run_tree_check, run_window_sweep, write_artifacts, AssertionOutcome,
    ConditionRow, ConditionsRun, CouplingRow, CouplingRun, MetricSource, RunArtifacts, RunOutput,
    SummaryRow, SweepResult, TreeCheckAggregate, TreeCheckRow, TreeRun, TrialRecord,
};

/// Environment variable naming the default output directory for harness
/// artifacts; paths in configs are resolved against it when relative.
pub const OUT_DIR_ENV: &str = "PERCNB_OUT_DIR";
