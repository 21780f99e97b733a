use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use super::aggregate::{aggregate, moving_average, BinStat};
use super::config::ExperimentConfig;
use super::output::{write_episodes, write_raster, write_summary, write_trace};
use crate::agent::QTable;
use crate::error::{Error, Result};
use crate::seeding::{self, component};
use crate::strategies::{
    Boltzmann, EpsilonGreedy, ExplorationStrategy, StrategyContext, StrategyKind, Vdsc, VdscStreams,
};

#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeRecord {
    pub seed: u64,
    pub episode: u64,
    pub episode_return: f64,
    pub steps: u64,
    pub explore_steps: u64,
    pub explore_fraction: f64,
    /// Mean |VPD| over steps where it was available; 0 if never.
    pub mean_abs_vpd: f64,
    /// Mean count bonus over the episode; 0 for strategies that do not hash.
    pub mean_bonus: f64,
    pub mean_p_bar: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepTraceRecord {
    pub seed: u64,
    pub global_step: u64,
    pub episode: u64,
    pub episode_step: u64,
    pub explore: bool,
    pub p_bar: f64,
    pub vpd: Option<f64>,
    pub bonus: f64,
}

#[derive(Debug, Clone)]
pub struct SeedRun {
    pub seed: u64,
    /// Completed episodes only; a trailing partial episode is dropped.
    pub episodes: Vec<EpisodeRecord>,
    /// Per-step records of traced, completed episodes.
    pub trace: Vec<StepTraceRecord>,
    /// Agent steps taken, including any trailing partial episode.
    pub steps: u64,
    pub explore_steps: u64,
    pub initial_state: usize,
    pub q_table: QTable,
    /// `<hex> <count>` dump for trigger-driven strategies.
    pub hash_counts: Option<String>,
}

impl SeedRun {
    pub fn explore_fraction(&self) -> f64 {
        if self.steps == 0 {
            0.0
        } else {
            self.explore_steps as f64 / self.steps as f64
        }
    }

    pub fn max_return(&self) -> Option<f64> {
        self.episodes.iter().map(|e| e.episode_return).reduce(f64::max)
    }

    /// Smoothed return at the end of each step bin, `None` before the first
    /// completed episode.
    pub fn binned_returns(&self, eval_interval: u64, total_steps: u64, window: usize) -> Vec<Option<f64>> {
        let bins = total_steps.div_ceil(eval_interval) as usize;
        let returns: Vec<f64> = self.episodes.iter().map(|e| e.episode_return).collect();
        let smoothed = moving_average(&returns, window);
        let mut ends = Vec::with_capacity(self.episodes.len());
        let mut t = 0;
        for e in &self.episodes {
            t += e.steps;
            ends.push(t);
        }
        let mut out = Vec::with_capacity(bins);
        let mut next = 0;
        let mut current = None;
        for b in 0..bins as u64 {
            let edge = (b + 1) * eval_interval;
            while next < ends.len() && ends[next] <= edge {
                current = Some(smoothed[next]);
                next += 1;
            }
            out.push(current);
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub config: ExperimentConfig,
    pub seeds: Vec<SeedRun>,
    pub summary: Vec<BinStat>,
}

impl RunSummary {
    pub fn explore_fraction(&self) -> f64 {
        let steps: u64 = self.seeds.iter().map(|s| s.steps).sum();
        let explores: u64 = self.seeds.iter().map(|s| s.explore_steps).sum();
        if steps == 0 {
            0.0
        } else {
            explores as f64 / steps as f64
        }
    }

    pub fn mean_return(&self) -> f64 {
        let (sum, n) = self
            .seeds
            .iter()
            .flat_map(|s| s.episodes.iter())
            .fold((0.0, 0usize), |(s, n), e| (s + e.episode_return, n + 1));
        if n == 0 {
            0.0
        } else {
            sum / n as f64
        }
    }
}

pub fn build_strategy(config: &ExperimentConfig, obs_dim: usize, seed: u64) -> Result<Box<dyn ExplorationStrategy>> {
    let kind = config.strategy_kind();
    let actions = seeding::stream(seed, component::STRATEGY);
    Ok(match kind {
        StrategyKind::EpsilonGreedy => Box::new(EpsilonGreedy::new(config.schedule(), actions)),
        StrategyKind::Boltzmann => Box::new(Boltzmann::new(config.schedule(), actions)),
        StrategyKind::Vdsc | StrategyKind::VpdOnly | StrategyKind::CountsOnly => {
            let streams = VdscStreams {
                projection: seeding::stream(seed, component::PROJECTION),
                homeostat: seeding::stream(seed, component::HOMEOSTAT),
                actions,
            };
            Box::new(Vdsc::new(kind, &config.vdsc_params(), obs_dim, streams)?)
        }
    })
}

#[derive(Default)]
struct EpisodeAccumulator {
    ret: f64,
    steps: u64,
    explores: u64,
    vpd_sum: f64,
    vpd_n: u64,
    bonus_sum: f64,
    p_sum: f64,
}

/// Runs one seed to completion without touching the filesystem.
pub fn run_seed(config: &ExperimentConfig, seed: u64) -> Result<SeedRun> {
    let choice = config.env_choice().map_err(|e| Error::InvalidConfig(vec![e]))?;
    let mut env = choice.build(config.environment.max_episode_steps, seeding::child_seed(seed, component::ENVIRONMENT))?;
    let spec = env.spec().clone();
    let mut q = QTable::new(spec.state_count, spec.action_count, config.agent.learning_rate, config.agent.discount)?;
    let mut strategy = build_strategy(config, spec.obs_dim, seed)?;

    let run = &config.run;
    let mut global_step = 0u64;
    let mut explore_steps = 0u64;
    let mut episodes = Vec::new();
    let mut trace = Vec::new();
    let mut traced_episodes = 0usize;
    let mut initial_state = None;

    while global_step < run.total_steps {
        let episode = episodes.len() as u64;
        strategy.begin_episode();
        let (mut state, mut observation) = env.reset(None);
        initial_state.get_or_insert(state);
        let tracing = run.trace
            && global_step >= run.trace_start
            && (run.trace_episodes == 0 || traced_episodes < run.trace_episodes);
        let mut episode_trace = Vec::new();
        let mut acc = EpisodeAccumulator::default();
        let mut reward_prev = 0.0;
        let mut completed = false;

        while global_step < run.total_steps {
            let ctx = StrategyContext::new(q.q_values(state)?, &observation, reward_prev, acc.steps, global_step);
            let decision = strategy.act(&ctx)?;
            let t = env.step(decision.action)?;
            q.update(state, decision.action, t.reward, t.state, t.terminal)?;

            if tracing {
                episode_trace.push(StepTraceRecord {
                    seed,
                    global_step,
                    episode,
                    episode_step: acc.steps,
                    explore: decision.explore,
                    p_bar: decision.p_bar,
                    vpd: decision.vpd,
                    bonus: decision.bonus.unwrap_or(0.0),
                });
            }
            acc.ret += t.reward;
            acc.steps += 1;
            acc.explores += u64::from(decision.explore);
            acc.p_sum += decision.p_bar;
            acc.bonus_sum += decision.bonus.unwrap_or(0.0);
            if let Some(v) = decision.vpd {
                acc.vpd_sum += v.abs();
                acc.vpd_n += 1;
            }
            global_step += 1;
            explore_steps += u64::from(decision.explore);

            if t.episode_over() {
                completed = true;
                break;
            }
            state = t.state;
            observation = t.observation;
            reward_prev = t.reward;
        }

        if !completed {
            break;
        }
        let steps = acc.steps as f64;
        episodes.push(EpisodeRecord {
            seed,
            episode,
            episode_return: acc.ret,
            steps: acc.steps,
            explore_steps: acc.explores,
            explore_fraction: acc.explores as f64 / steps,
            mean_abs_vpd: if acc.vpd_n > 0 { acc.vpd_sum / acc.vpd_n as f64 } else { 0.0 },
            mean_bonus: acc.bonus_sum / steps,
            mean_p_bar: acc.p_sum / steps,
        });
        if tracing {
            trace.append(&mut episode_trace);
            traced_episodes += 1;
        }
    }

    let hash_counts = if run.dump_tables { dump_counts(strategy.as_ref()) } else { None };
    Ok(SeedRun {
        seed,
        episodes,
        trace,
        steps: global_step,
        explore_steps,
        initial_state: initial_state.unwrap_or(0),
        q_table: q,
        hash_counts,
    })
}

fn dump_counts(strategy: &dyn ExplorationStrategy) -> Option<String> {
    let mut out = Vec::new();
    strategy.hash_counts()?.write_dump(&mut out).ok()?;
    String::from_utf8(out).ok()
}

/// Runs every seed (in parallel up to `run.parallel`) and aggregates, without
/// writing files.
pub fn execute(config: &ExperimentConfig) -> Result<RunSummary> {
    config.validate()?;
    let seeds = &config.run.seeds;
    let runs: Vec<Result<SeedRun>> = if config.run.parallel == 1 || seeds.len() == 1 {
        seeds.iter().map(|&s| run_seed(config, s)).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.run.parallel)
            .build()
            .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
        pool.install(|| seeds.par_iter().map(|&s| run_seed(config, s)).collect())
    };
    let seeds = runs.into_iter().collect::<Result<Vec<_>>>()?;
    let run = &config.run;
    let series: Vec<_> = seeds
        .iter()
        .map(|s| s.binned_returns(run.eval_interval, run.total_steps, run.smoothing_window))
        .collect();
    let summary = aggregate(&series)?;
    Ok(RunSummary { config: config.clone(), seeds, summary })
}

fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| Error::io(path, e))
}

fn metadata(config: &ExperimentConfig) -> String {
    let mut out = String::new();
    writeln!(out, "# Resolved configuration.").unwrap();
    writeln!(
        out,
        "# summary.csv: trailing {}-episode moving average of returns, sampled every {} steps; 95% CI = mean +- 1.96 sd / sqrt(n).",
        config.run.smoothing_window, config.run.eval_interval
    )
    .unwrap();
    writeln!(out, "# Sub-seeds: splitmix64(seed ^ fnv1a64(component)), components environment/strategy/homeostat/projection.").unwrap();
    out.push_str(&config.to_toml());
    out
}

/// Writes a finished run into `dir`.
pub fn write_outputs(summary: &RunSummary, dir: &Path) -> Result<()> {
    ensure_dir(dir)?;
    write_file(&dir.join("run.toml"), &metadata(&summary.config))?;
    write_episodes(&dir.join("episodes.csv"), summary.seeds.iter().flat_map(|s| s.episodes.iter()))?;
    if summary.config.run.trace {
        write_trace(&dir.join("trace.csv"), summary.seeds.iter().flat_map(|s| s.trace.iter()))?;
    }
    write_summary(&dir.join("summary.csv"), &summary.summary)?;
    if summary.config.run.dump_tables {
        for s in &summary.seeds {
            s.q_table.dump_to_file(&dir.join(format!("qtable-seed{}.txt", s.seed)))?;
            if let Some(counts) = &s.hash_counts {
                write_file(&dir.join(format!("hash-counts-seed{}.txt", s.seed)), counts)?;
            }
        }
    }
    Ok(())
}

/// Runs the experiment and writes `episodes.csv`, `summary.csv`, `run.toml`
/// and, when tracing, `trace.csv` into `run.output_dir`.
pub fn run_experiment(config: &ExperimentConfig) -> Result<RunSummary> {
    config.validate()?;
    // Fail on an unwritable directory before spending time on the run.
    ensure_dir(&config.run.output_dir)?;
    let summary = execute(config)?;
    write_outputs(&summary, &config.run.output_dir)?;
    Ok(summary)
}

pub const ABLATION_STRATEGIES: [StrategyKind; 4] =
    [StrategyKind::Vdsc, StrategyKind::VpdOnly, StrategyKind::CountsOnly, StrategyKind::EpsilonGreedy];

#[derive(Debug, Clone)]
pub struct AblationReport {
    pub runs: Vec<(StrategyKind, RunSummary)>,
}

impl AblationReport {
    pub fn get(&self, kind: StrategyKind) -> Option<&RunSummary> {
        self.runs.iter().find(|(k, _)| *k == kind).map(|(_, r)| r)
    }
}

/// Runs VDSC, both single-trigger ablations and epsilon-greedy with the same
/// seeds, schedule and budget. Each goes to `<output_dir>/<strategy>/`; the
/// joined comparison is `ablation.csv` plus `ablation_overview.csv`.
pub fn run_ablation(config: &ExperimentConfig) -> Result<AblationReport> {
    config.validate()?;
    let root = config.run.output_dir.clone();
    ensure_dir(&root)?;
    let mut runs = Vec::new();
    for kind in ABLATION_STRATEGIES {
        let mut c = config.clone();
        c.strategy.name = kind.name().into();
        c.run.output_dir = root.join(kind.name());
        runs.push((kind, run_experiment(&c)?));
    }

    let mut joined = String::from("strategy,bin,mean_return,ci_low,ci_high,n_seeds\n");
    let mut overview = String::from("strategy,explore_fraction,mean_return,episodes\n");
    let fmt = |v: f64| if v.is_nan() { String::new() } else { v.to_string() };
    for (kind, r) in &runs {
        for s in &r.summary {
            writeln!(joined, "{},{},{},{},{},{}", kind.name(), s.bin, fmt(s.mean), fmt(s.ci_low), fmt(s.ci_high), s.n)
                .unwrap();
        }
        let episodes: usize = r.seeds.iter().map(|s| s.episodes.len()).sum();
        writeln!(overview, "{},{},{},{}", kind.name(), r.explore_fraction(), r.mean_return(), episodes).unwrap();
    }
    write_file(&root.join("ablation.csv"), &joined)?;
    write_file(&root.join("ablation_overview.csv"), &overview)?;
    Ok(AblationReport { runs })
}

#[derive(Debug, Clone)]
pub struct TraceReport {
    pub run: RunSummary,
    pub trace_path: PathBuf,
    pub raster_path: PathBuf,
}

/// Traces `episodes` consecutive training episodes of the first configured
/// seed, starting with the first episode that begins at or after `start`,
/// and writes `trace.csv` plus `raster.csv` (`episode,step_offset,y`).
pub fn run_trace(config: &ExperimentConfig, episodes: usize, start: u64) -> Result<TraceReport> {
    if episodes == 0 {
        return Err(Error::InvalidParameter("trace needs at least one episode".into()));
    }
    let mut c = config.clone();
    c.run.seeds.truncate(1);
    c.run.trace = true;
    c.run.trace_episodes = episodes;
    c.run.trace_start = start;
    let run = run_experiment(&c)?;
    let raster_path = c.run.output_dir.join("raster.csv");
    write_raster(&raster_path, run.seeds.iter().flat_map(|s| s.trace.iter()))?;
    Ok(TraceReport { trace_path: c.run.output_dir.join("trace.csv"), raster_path, run })
}

#[derive(Debug, Clone)]
pub struct SweepReport {
    pub key: String,
    pub runs: Vec<(String, RunSummary)>,
}

/// Reruns the experiment once per value of `key`, each into
/// `<output_dir>/<key>=<value>/`, and joins the summaries into `sweep.csv`.
pub fn run_sweep(config: &ExperimentConfig, key: &str, values: &[String]) -> Result<SweepReport> {
    if values.is_empty() {
        return Err(Error::InvalidParameter("sweep needs at least one value".into()));
    }
    let root = config.run.output_dir.clone();
    ensure_dir(&root)?;
    let mut runs = Vec::new();
    for value in values {
        let mut c = config.with_override(key, value)?;
        c.run.output_dir = root.join(format!("{key}={value}"));
        runs.push((value.clone(), run_experiment(&c)?));
    }
    let mut joined = String::from("value,bin,mean_return,ci_low,ci_high,n_seeds\n");
    let fmt = |v: f64| if v.is_nan() { String::new() } else { v.to_string() };
    for (value, r) in &runs {
        for s in &r.summary {
            writeln!(joined, "{value},{},{},{},{},{}", s.bin, fmt(s.mean), fmt(s.ci_low), fmt(s.ci_high), s.n).unwrap();
        }
    }
    write_file(&root.join("sweep.csv"), &joined)?;
    Ok(SweepReport { key: key.to_string(), runs })
}
