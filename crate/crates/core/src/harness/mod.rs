//! Deterministic experiment runner.
//!
//! Each seed gets its own environment, Q-table and strategy, with random
//! streams derived from the seed by [`crate::seeding`]. Seeds may run in
//! parallel; results are collected in seed order and written once all seeds
//! have finished, so output files are byte-identical across runs.

mod aggregate;
mod config;
mod output;
mod run;

pub use aggregate::{aggregate, moving_average, BinStat, Z_95};
pub use config::{parse_override, AgentSection, EnvironmentSection, ExperimentConfig, RunSection, StrategySection};
pub use output::{
    write_episodes, write_raster, write_summary, write_trace, EPISODES_HEADER, RASTER_HEADER, SUMMARY_HEADER,
    TRACE_HEADER,
};
pub use run::{
    build_strategy, execute, run_ablation, run_experiment, run_seed, run_sweep, run_trace, AblationReport,
    EpisodeRecord, RunSummary, SeedRun, StepTraceRecord, SweepReport, TraceReport, ABLATION_STRATEGIES,
};
