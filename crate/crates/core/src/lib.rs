//! Exploration timing from value discrepancy and hashed state counts.
//!
//! The crate decides *when* a value-based agent should explore. Two internal
//! signals drive the decision:
//!
//! * [`vpd`]: the value promise discrepancy, the gap between the value an agent
//!   predicted `k` steps ago and the discounted rewards plus value it actually
//!   reached;
//! * [`hashing`]: a novelty score `1 / sqrt(n)` from visit counts of SimHash
//!   codes of the observation.
//!
//! [`homeostasis`] turns these streams into Bernoulli explore/exploit decisions
//! whose long-run rate tracks a target, and [`strategies`] combines everything
//! (VDSC) next to epsilon-greedy and Boltzmann baselines. [`agent`],
//! [`env`] and [`harness`] provide a tabular Q-learner, small hard-exploration
//! environments and a deterministic experiment runner.

pub mod agent;
pub mod env;
pub mod error;
pub mod harness;
pub mod hashing;
pub mod homeostasis;
pub mod schedule;
pub mod seeding;
pub mod strategies;
pub mod vpd;

pub use agent::QTable;
pub use env::{EnvChoice, EnvSpec, Environment, Transition};
pub use error::{Error, Result};
pub use harness::{EpisodeRecord, ExperimentConfig, RunSummary, StepTraceRecord};
pub use hashing::{HashCode, HashCountTable, Preprocessor, SimHashEncoder};
pub use homeostasis::{Homeostat, HomeostatDecision, HomeostatParams, TriggerKind};
pub use schedule::DecaySchedule;
pub use strategies::{ExplorationStrategy, StepDecision, StrategyContext, StrategyKind, Vdsc};
pub use vpd::VpdTracker;
