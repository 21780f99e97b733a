//! DeepSea(N): an N x N grid descended one row per step.
//!
//! The agent starts at the top-left cell. Action 0 moves left, action 1 moves
//! right (both clamped to the grid), and every step descends one row, so an
//! episode lasts exactly N steps. Moving right costs `0.01 / N`. Moving right
//! from the bottom-right cell pays 1, so only the always-right policy collects
//! the prize, with return `1 - 0.01 = 0.99`. Dynamics are deterministic.
//!
//! State index is `row * N + column` with `row` in `0..=N`; row N holds the
//! terminal cells.

use super::{check_limit, EnvSpec, Environment, EpisodeClock, Outcome, TabularModel, Transition};
use crate::error::{Error, Result};

pub const GOAL_REWARD: f64 = 1.0;
pub const MOVE_COST: f64 = 0.01;

#[derive(Debug, Clone)]
pub struct DeepSea {
    size: usize,
    spec: EnvSpec,
    row: usize,
    column: usize,
    clock: EpisodeClock,
}

impl DeepSea {
    pub fn new(size: usize, max_episode_steps: Option<usize>) -> Result<Self> {
        if size < 2 {
            return Err(Error::InvalidParameter(format!("deep_sea size must be at least 2, got {size}")));
        }
        let cost = MOVE_COST / size as f64;
        let spec = EnvSpec {
            name: format!("deep_sea_{size}"),
            state_count: size * (size + 1),
            action_count: 2,
            obs_dim: 2,
            max_episode_steps: check_limit(max_episode_steps, size)?,
            reward_range: (-cost, GOAL_REWARD - cost),
        };
        Ok(Self { size, spec, row: 0, column: 0, clock: EpisodeClock::default() })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn state_index(&self, row: usize, column: usize) -> usize {
        row * self.size + column
    }

    fn observation(&self) -> Vec<f64> {
        vec![self.row as f64 / self.size as f64, self.column as f64 / (self.size - 1) as f64]
    }

    fn transition(&self, row: usize, column: usize, action: usize) -> (usize, usize, f64) {
        let n = self.size;
        if action == 1 {
            let mut reward = -MOVE_COST / n as f64;
            if row == n - 1 && column == n - 1 {
                reward += GOAL_REWARD;
            }
            (row + 1, (column + 1).min(n - 1), reward)
        } else {
            (row + 1, column.saturating_sub(1), 0.0)
        }
    }
}

impl TabularModel for DeepSea {
    fn outcomes(&self, state: usize, action: usize) -> Vec<Outcome> {
        let (row, column) = (state / self.size, state % self.size);
        if row >= self.size {
            return vec![Outcome { probability: 1.0, next_state: state, reward: 0.0, terminal: true }];
        }
        let (r, c, reward) = self.transition(row, column, action);
        vec![Outcome { probability: 1.0, next_state: self.state_index(r, c), reward, terminal: r == self.size }]
    }
}

impl Environment for DeepSea {
    fn spec(&self) -> &EnvSpec {
        &self.spec
    }

    fn reset(&mut self, _seed: Option<u64>) -> (usize, Vec<f64>) {
        self.clock.reset();
        self.row = 0;
        self.column = 0;
        (0, self.observation())
    }

    fn step(&mut self, action: usize) -> Result<Transition> {
        self.clock.begin_step(action, &self.spec)?;
        let (row, column, reward) = self.transition(self.row, self.column, action);
        self.row = row;
        self.column = column;
        let terminal = row == self.size;
        let truncated = self.clock.finish_step(terminal, self.spec.max_episode_steps);
        Ok(Transition {
            state: self.state_index(row, column),
            observation: self.observation(),
            reward,
            terminal,
            truncated,
        })
    }
}
