//! Desk-scale environments, from dense and easy to sparse and hard.
//!
//! Every environment exposes a state index for the tabular agent and a
//! normalized coordinate observation in `[0, 1]^D` for hashing. Episodes end on
//! a terminal transition or when `max_episode_steps` is reached (truncation).
//! Stepping after either requires a reset.

mod deep_sea;
mod grid;
mod river_swim;

use rand::SeedableRng;
use serde::{Deserialize, Serialize};

pub use deep_sea::DeepSea;
pub use grid::{GridWorld, GridReward};
pub use river_swim::RiverSwim;

use crate::error::{Error, Result};
use crate::seeding::StreamRng;

/// Sticky-action probability used by the grid worlds.
pub const DEFAULT_SLIP: f64 = 0.25;

#[derive(Debug, Clone, PartialEq)]
pub struct EnvSpec {
    pub name: String,
    pub state_count: usize,
    pub action_count: usize,
    pub obs_dim: usize,
    pub max_episode_steps: usize,
    /// Inclusive bounds on any single-step reward.
    pub reward_range: (f64, f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Transition {
    pub state: usize,
    pub observation: Vec<f64>,
    pub reward: f64,
    pub terminal: bool,
    /// The step limit was hit; the state is not terminal for bootstrapping.
    pub truncated: bool,
}

impl Transition {
    pub fn episode_over(&self) -> bool {
        self.terminal || self.truncated
    }
}

pub trait Environment: Send {
    fn spec(&self) -> &EnvSpec;

    /// Starts a new episode. `Some(seed)` reseeds the environment's random
    /// stream first; `None` continues it.
    fn reset(&mut self, seed: Option<u64>) -> (usize, Vec<f64>);

    fn step(&mut self, action: usize) -> Result<Transition>;
}

/// One possible result of taking an action, for model-based oracles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Outcome {
    pub probability: f64,
    pub next_state: usize,
    pub reward: f64,
    pub terminal: bool,
}

/// Environments whose dynamics can be enumerated as a transition table.
pub trait TabularModel {
    fn outcomes(&self, state: usize, action: usize) -> Vec<Outcome>;
}

/// Which environment to build, with its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum EnvChoice {
    RiverSwim,
    DeepSea { size: usize },
    SparseGrid { width: usize, height: usize, slip: f64 },
    DenseGrid { width: usize, height: usize, slip: f64 },
}

impl EnvChoice {
    pub fn name(&self) -> &'static str {
        match self {
            EnvChoice::RiverSwim => "river_swim",
            EnvChoice::DeepSea { .. } => "deep_sea",
            EnvChoice::SparseGrid { .. } => "sparse_grid",
            EnvChoice::DenseGrid { .. } => "dense_grid",
        }
    }

    pub fn build(&self, max_episode_steps: Option<usize>, seed: u64) -> Result<Box<dyn Environment>> {
        let rng = StreamRng::seed_from_u64(seed);
        Ok(match *self {
            EnvChoice::RiverSwim => Box::new(RiverSwim::new(max_episode_steps, rng)?),
            EnvChoice::DeepSea { size } => Box::new(DeepSea::new(size, max_episode_steps)?),
            EnvChoice::SparseGrid { width, height, slip } => {
                Box::new(GridWorld::new(width, height, slip, GridReward::Sparse, max_episode_steps, rng)?)
            }
            EnvChoice::DenseGrid { width, height, slip } => {
                Box::new(GridWorld::new(width, height, slip, GridReward::Dense, max_episode_steps, rng)?)
            }
        })
    }
}

/// Shared step bookkeeping.
#[derive(Debug, Clone, Default)]
pub(crate) struct EpisodeClock {
    steps: usize,
    over: bool,
}

impl EpisodeClock {
    pub(crate) fn reset(&mut self) {
        self.steps = 0;
        self.over = false;
    }

    pub(crate) fn begin_step(&self, action: usize, spec: &EnvSpec) -> Result<()> {
        if self.over {
            return Err(Error::EpisodeOver);
        }
        if action >= spec.action_count {
            return Err(Error::IndexOutOfRange { what: "action", index: action, size: spec.action_count });
        }
        Ok(())
    }

    /// Returns whether the episode was truncated by the step limit.
    pub(crate) fn finish_step(&mut self, terminal: bool, limit: usize) -> bool {
        self.steps += 1;
        let truncated = !terminal && self.steps >= limit;
        self.over = terminal || truncated;
        truncated
    }

    #[cfg(test)]
    pub(crate) fn steps(&self) -> usize {
        self.steps
    }
}

pub(crate) fn check_limit(limit: Option<usize>, default: usize) -> Result<usize> {
    match limit {
        Some(0) => Err(Error::InvalidParameter("max_episode_steps must be positive".into())),
        Some(n) => Ok(n),
        None => Ok(default),
    }
}
