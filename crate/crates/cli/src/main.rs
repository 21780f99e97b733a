//! `vdsc`: run, ablate, trace and sweep exploration experiments.
//!
//! Exit codes: 0 on success, 1 for usage or configuration errors, 2 for
//! failures while running.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use vdsc::harness::{self, parse_override, ExperimentConfig};
use vdsc::Error;

#[derive(Parser)]
#[command(name = "vdsc", version, about = "Exploration-timing experiments on small hard-exploration tasks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment and write episodes.csv, summary.csv and run.toml.
    Run(Common),
    /// Compare VDSC, VPD-only, counts-only and epsilon-greedy on shared seeds.
    Ablate(Common),
    /// Record per-step exploration decisions for consecutive training episodes.
    Trace {
        #[command(flatten)]
        common: Common,
        /// Number of consecutive episodes to trace.
        #[arg(long, default_value_t = 20)]
        trace_episodes: usize,
        /// Tracing starts with the first episode beginning at or after this step.
        #[arg(long, default_value_t = 0)]
        trace_start: u64,
    },
    /// Rerun the experiment for several values of one config key.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Dotted key to vary, e.g. strategy.rho_final.
        #[arg(long)]
        param: String,
        /// Comma-separated values.
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<String>,
    },
}

#[derive(Args)]
struct Common {
    /// Experiment config (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Override a config value, e.g. --set strategy.rho_final=0.05 (repeatable).
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Output directory (overrides run.output_dir).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Maximum number of seeds run concurrently (overrides run.parallel).
    #[arg(long)]
    parallel: Option<usize>,
}

impl Common {
    fn load(&self) -> Result<ExperimentConfig, Error> {
        let mut overrides = self.overrides.iter().map(|s| parse_override(s)).collect::<Result<Vec<_>, _>>()?;
        if let Some(out) = &self.out {
            overrides.push(("run.output_dir".into(), toml_string(&out.to_string_lossy())));
        }
        if let Some(n) = self.parallel {
            overrides.push(("run.parallel".into(), n.to_string()));
        }
        ExperimentConfig::load(&self.config, &overrides)
    }
}

fn toml_string(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Failure class, mapped to the process exit code.
enum Failure {
    Config(Error),
    Runtime(Error),
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Config(_) => 1,
            Failure::Runtime(_) => 2,
        }
    }

    fn error(&self) -> &Error {
        match self {
            Failure::Config(e) | Failure::Runtime(e) => e,
        }
    }
}

fn execute(command: Command) -> Result<(), Failure> {
    let common = match &command {
        Command::Run(c) | Command::Ablate(c) => c,
        Command::Trace { common, .. } | Command::Sweep { common, .. } => common,
    };
    let config = common.load().map_err(Failure::Config)?;
    run_command(command, &config).map_err(|e| if e.is_config_error() { Failure::Config(e) } else { Failure::Runtime(e) })
}

fn run_command(command: Command, config: &ExperimentConfig) -> Result<(), Error> {
    match command {
        Command::Run(_) => {
            let run = harness::run_experiment(config)?;
            println!(
                "{} seeds, {} episodes, explore fraction {:.4}, mean return {:.4} -> {}",
                run.seeds.len(),
                run.seeds.iter().map(|s| s.episodes.len()).sum::<usize>(),
                run.explore_fraction(),
                run.mean_return(),
                config.run.output_dir.display()
            );
        }
        Command::Ablate(_) => {
            let report = harness::run_ablation(config)?;
            for (kind, run) in &report.runs {
                println!(
                    "{:<15} explore fraction {:.4}  mean return {:.4}",
                    kind.name(),
                    run.explore_fraction(),
                    run.mean_return()
                );
            }
            println!("-> {}", config.run.output_dir.join("ablation.csv").display());
        }
        Command::Trace { trace_episodes, trace_start, .. } => {
            let report = harness::run_trace(config, trace_episodes, trace_start)?;
            let traced = report.run.seeds.iter().map(|s| s.trace.len()).sum::<usize>();
            println!("{traced} traced steps -> {}, {}", report.trace_path.display(), report.raster_path.display());
        }
        Command::Sweep { param, values, .. } => {
            let report = harness::run_sweep(config, &param, &values)?;
            for (value, run) in &report.runs {
                println!("{param}={value}: explore fraction {:.4}  mean return {:.4}", run.explore_fraction(), run.mean_return());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.error());
            ExitCode::from(failure.exit_code())
        }
    }
}
