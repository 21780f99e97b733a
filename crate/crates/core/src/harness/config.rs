//! Experiment configuration.
//!
//! The file is TOML with four sections. Unknown keys are rejected.
//!
//! ```toml
//! [environment]
//! name = "deep_sea"        # river_swim | deep_sea | sparse_grid | dense_grid
//! size = 10                # deep_sea
//! # width = 8, height = 8, slip = 0.25 for the grids
//! # max_episode_steps = 40
//!
//! [strategy]
//! name = "vdsc"            # epsilon_greedy | boltzmann | vdsc | vpd_only | counts_only
//! k = 5
//! bits = 256
//! rho_initial = 1.0        # shared schedule: epsilon, temperature or target rate
//! rho_final = 0.01
//! decay_steps = 25000
//!
//! [agent]
//! learning_rate = 0.1
//! discount = 0.99
//!
//! [run]
//! seeds = [1, 2, 3]
//! total_steps = 50000
//! eval_interval = 1000
//! output_dir = "out"
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::agent::{DEFAULT_DISCOUNT, DEFAULT_LEARNING_RATE};
use crate::env::{EnvChoice, DEFAULT_SLIP};
use crate::error::{Error, Result};
use crate::hashing::Preprocessor;
use crate::homeostasis::HomeostatParams;
use crate::schedule::DecaySchedule;
use crate::strategies::{StrategyKind, VdscParams};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvironmentSection {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub size: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub width: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub height: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slip: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_episode_steps: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StrategySection {
    pub name: String,
    /// VPD horizon.
    pub k: usize,
    /// SimHash code length.
    pub bits: usize,
    pub rho_initial: f64,
    pub rho_final: f64,
    pub decay_steps: u64,
    pub preprocessor: Preprocessor,
    pub variance_epsilon: f64,
    pub exponent_clamp: f64,
}

impl Default for StrategySection {
    fn default() -> Self {
        let h = HomeostatParams::default();
        Self {
            name: StrategyKind::Vdsc.name().into(),
            k: 5,
            bits: 256,
            rho_initial: 1.0,
            rho_final: 0.01,
            decay_steps: 25_000,
            preprocessor: Preprocessor::default(),
            variance_epsilon: h.variance_epsilon,
            exponent_clamp: h.exponent_clamp,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AgentSection {
    pub learning_rate: f64,
    pub discount: f64,
}

impl Default for AgentSection {
    fn default() -> Self {
        Self { learning_rate: DEFAULT_LEARNING_RATE, discount: DEFAULT_DISCOUNT }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunSection {
    pub seeds: Vec<u64>,
    pub total_steps: u64,
    /// Width of a summary bin, in agent steps.
    pub eval_interval: u64,
    /// Trailing moving-average window (episodes) applied to returns before binning.
    pub smoothing_window: usize,
    pub output_dir: PathBuf,
    /// Seeds run concurrently; 0 uses all cores.
    pub parallel: usize,
    pub trace: bool,
    /// Tracing starts with the first episode that begins at or after this step.
    pub trace_start: u64,
    /// Number of consecutive traced episodes; 0 traces every episode after the start.
    pub trace_episodes: usize,
    /// Also write the final Q-table and hash counts per seed.
    pub dump_tables: bool,
}

impl Default for RunSection {
    fn default() -> Self {
        Self {
            seeds: (1..=10).collect(),
            total_steps: 50_000,
            eval_interval: 1_000,
            smoothing_window: 10,
            output_dir: PathBuf::from("out"),
            parallel: 0,
            trace: false,
            trace_start: 0,
            trace_episodes: 0,
            dump_tables: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub environment: EnvironmentSection,
    #[serde(default)]
    pub strategy: StrategySection,
    #[serde(default)]
    pub agent: AgentSection,
    #[serde(default)]
    pub run: RunSection,
}

/// Splits `section.key=value`.
pub fn parse_override(spec: &str) -> Result<(String, String)> {
    let (key, value) = spec
        .split_once('=')
        .ok_or_else(|| Error::ConfigParse(format!("override `{spec}` is not of the form key=value")))?;
    Ok((key.trim().to_string(), value.trim().to_string()))
}

fn parse_value(raw: &str) -> toml::Value {
    let doc = format!("v = {raw}");
    match toml::from_str::<toml::Table>(&doc) {
        Ok(mut t) => t.remove("v").unwrap_or_else(|| toml::Value::String(raw.into())),
        Err(_) => toml::Value::String(raw.into()),
    }
}

fn apply_override(table: &mut toml::Table, key: &str, raw: &str) -> Result<()> {
    let (section, field) = key
        .split_once('.')
        .ok_or_else(|| Error::ConfigParse(format!("override key `{key}` must be section.key")))?;
    let entry = table.entry(section.to_string()).or_insert_with(|| toml::Value::Table(toml::Table::new()));
    let toml::Value::Table(section_table) = entry else {
        return Err(Error::ConfigParse(format!("`{section}` is not a section")));
    };
    section_table.insert(field.to_string(), parse_value(raw));
    Ok(())
}

impl ExperimentConfig {
    /// Parses TOML text, applies `section.key=value` overrides, then validates.
    pub fn parse(text: &str, overrides: &[(String, String)]) -> Result<Self> {
        let mut table: toml::Table = toml::from_str(text).map_err(|e| Error::ConfigParse(e.to_string()))?;
        for (key, value) in overrides {
            apply_override(&mut table, key, value)?;
        }
        let config: Self = toml::Value::Table(table).try_into().map_err(|e: toml::de::Error| Error::ConfigParse(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path, overrides: &[(String, String)]) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, overrides)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// A copy with one more override applied.
    pub fn with_override(&self, key: &str, value: &str) -> Result<Self> {
        Self::parse(&self.to_toml(), &[(key.to_string(), value.to_string())])
    }

    /// Checks every field and reports all violations at once.
    pub fn validate(&self) -> Result<()> {
        let mut errors = Vec::new();
        if let Err(e) = self.env_choice() {
            errors.push(e);
        }
        let s = &self.strategy;
        if StrategyKind::from_name(&s.name).is_none() {
            let names: Vec<_> = StrategyKind::ALL.iter().map(|k| k.name()).collect();
            errors.push(format!("strategy.name: unknown strategy `{}` (expected one of {})", s.name, names.join(", ")));
        }
        if s.k < 1 {
            errors.push("strategy.k: must be at least 1".into());
        }
        if s.bits < 1 {
            errors.push("strategy.bits: must be at least 1".into());
        }
        if s.decay_steps < 1 {
            errors.push("strategy.decay_steps: must be positive".into());
        }
        let kind = StrategyKind::from_name(&s.name);
        for (field, v) in [("rho_initial", s.rho_initial), ("rho_final", s.rho_final)] {
            let ok = match kind {
                Some(StrategyKind::Boltzmann) => v > 0.0 && v.is_finite(),
                Some(StrategyKind::EpsilonGreedy) => (0.0..=1.0).contains(&v),
                _ => v > 0.0 && v <= 1.0,
            };
            if !ok {
                let range = match kind {
                    Some(StrategyKind::Boltzmann) => "a positive temperature",
                    Some(StrategyKind::EpsilonGreedy) => "in [0, 1]",
                    _ => "in (0, 1]",
                };
                errors.push(format!("strategy.{field}: {v} must be {range}"));
            }
        }
        if !(s.variance_epsilon > 0.0 && s.variance_epsilon.is_finite()) {
            errors.push("strategy.variance_epsilon: must be positive".into());
        }
        if !(s.exponent_clamp > 0.0 && s.exponent_clamp.is_finite()) {
            errors.push("strategy.exponent_clamp: must be positive".into());
        }
        let a = &self.agent;
        if !(a.learning_rate > 0.0 && a.learning_rate <= 1.0) {
            errors.push(format!("agent.learning_rate: {} must be in (0, 1]", a.learning_rate));
        }
        if !(a.discount > 0.0 && a.discount <= 1.0) {
            errors.push(format!("agent.discount: {} must be in (0, 1]", a.discount));
        }
        let r = &self.run;
        if r.seeds.is_empty() {
            errors.push("run.seeds: at least one seed is required".into());
        }
        let mut sorted = r.seeds.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != r.seeds.len() {
            errors.push("run.seeds: seeds must be distinct".into());
        }
        if r.eval_interval < 1 {
            errors.push("run.eval_interval: must be positive".into());
        }
        if r.smoothing_window < 1 {
            errors.push("run.smoothing_window: must be positive".into());
        }
        if errors.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidConfig(errors))
        }
    }

    pub fn strategy_kind(&self) -> StrategyKind {
        StrategyKind::from_name(&self.strategy.name).expect("validated strategy name")
    }

    pub fn env_choice(&self) -> std::result::Result<EnvChoice, String> {
        let e = &self.environment;
        let unused = |fields: &[(&str, bool)]| -> std::result::Result<(), String> {
            match fields.iter().find(|(_, set)| *set) {
                Some((f, _)) => Err(format!("environment.{f}: not a parameter of `{}`", e.name)),
                None => Ok(()),
            }
        };
        let grid = |dense: bool| -> std::result::Result<EnvChoice, String> {
            unused(&[("size", e.size.is_some())])?;
            let width = e.width.unwrap_or(8);
            let height = e.height.unwrap_or(8);
            let slip = e.slip.unwrap_or(DEFAULT_SLIP);
            if width < 2 || height < 2 {
                return Err(format!("environment.width/height: grid must be at least 2x2, got {width}x{height}"));
            }
            if !(0.0..1.0).contains(&slip) {
                return Err(format!("environment.slip: {slip} must be in [0, 1)"));
            }
            Ok(if dense {
                EnvChoice::DenseGrid { width, height, slip }
            } else {
                EnvChoice::SparseGrid { width, height, slip }
            })
        };
        if e.max_episode_steps == Some(0) {
            return Err("environment.max_episode_steps: must be positive".into());
        }
        match e.name.as_str() {
            "river_swim" => {
                unused(&[
                    ("size", e.size.is_some()),
                    ("width", e.width.is_some()),
                    ("height", e.height.is_some()),
                    ("slip", e.slip.is_some()),
                ])?;
                Ok(EnvChoice::RiverSwim)
            }
            "deep_sea" => {
                unused(&[("width", e.width.is_some()), ("height", e.height.is_some()), ("slip", e.slip.is_some())])?;
                let size = e.size.unwrap_or(10);
                if size < 2 {
                    return Err(format!("environment.size: {size} must be at least 2"));
                }
                Ok(EnvChoice::DeepSea { size })
            }
            "sparse_grid" => grid(false),
            "dense_grid" => grid(true),
            other => Err(format!(
                "environment.name: unknown environment `{other}` (expected river_swim, deep_sea, sparse_grid or dense_grid)"
            )),
        }
    }

    pub fn schedule(&self) -> DecaySchedule {
        DecaySchedule {
            initial: self.strategy.rho_initial,
            final_value: self.strategy.rho_final,
            decay_steps: self.strategy.decay_steps,
        }
    }

    pub fn vdsc_params(&self) -> VdscParams {
        VdscParams {
            horizon: self.strategy.k,
            discount: self.agent.discount,
            bits: self.strategy.bits,
            preprocessor: self.strategy.preprocessor,
            homeostat: HomeostatParams {
                variance_epsilon: self.strategy.variance_epsilon,
                exponent_clamp: self.strategy.exponent_clamp,
                ..HomeostatParams::default()
            },
            rho: self.schedule(),
        }
    }
}
