//! W x H grid worlds with sticky actions.
//!
//! The agent starts in cell (0, 0); the goal is (W-1, H-1) and reaching it ends
//! the episode with reward 1. Actions are up, down, left, right (0..4), clamped
//! at the walls. With probability `slip` the previously executed action is
//! repeated instead of the chosen one (never on an episode's first step).
//!
//! * Sparse: the goal reward is the only reward.
//! * Dense: every step also pays `(d_before - d_after) / (W + H - 2)`, the
//!   normalized reduction in Manhattan distance to the goal.
//!
//! Episodes are truncated after `4 * W * H` steps by default.

use rand::{Rng, SeedableRng};

use super::{check_limit, EnvSpec, Environment, EpisodeClock, Transition};
use crate::error::{Error, Result};
use crate::seeding::StreamRng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridReward {
    Sparse,
    Dense,
}

#[derive(Debug, Clone)]
pub struct GridWorld {
    width: usize,
    height: usize,
    slip: f64,
    reward: GridReward,
    spec: EnvSpec,
    x: usize,
    y: usize,
    previous_action: Option<usize>,
    clock: EpisodeClock,
    rng: StreamRng,
}

impl GridWorld {
    pub fn new(
        width: usize,
        height: usize,
        slip: f64,
        reward: GridReward,
        max_episode_steps: Option<usize>,
        rng: StreamRng,
    ) -> Result<Self> {
        if width < 2 || height < 2 {
            return Err(Error::InvalidParameter(format!("grid must be at least 2x2, got {width}x{height}")));
        }
        if !(0.0..1.0).contains(&slip) {
            return Err(Error::InvalidParameter(format!("slip probability {slip} is outside [0, 1)")));
        }
        let span = (width + height - 2) as f64;
        let (name, reward_range) = match reward {
            GridReward::Sparse => ("sparse_grid", (0.0, 1.0)),
            GridReward::Dense => ("dense_grid", (-1.0 / span, 1.0 + 1.0 / span)),
        };
        let spec = EnvSpec {
            name: format!("{name}_{width}x{height}"),
            state_count: width * height,
            action_count: 4,
            obs_dim: 2,
            max_episode_steps: check_limit(max_episode_steps, 4 * width * height)?,
            reward_range,
        };
        Ok(Self {
            width,
            height,
            slip,
            reward,
            spec,
            x: 0,
            y: 0,
            previous_action: None,
            clock: EpisodeClock::default(),
            rng,
        })
    }

    fn state(&self) -> usize {
        self.y * self.width + self.x
    }

    fn observation(&self) -> Vec<f64> {
        vec![self.x as f64 / (self.width - 1) as f64, self.y as f64 / (self.height - 1) as f64]
    }

    fn distance_to_goal(&self) -> usize {
        (self.width - 1 - self.x) + (self.height - 1 - self.y)
    }
}

impl Environment for GridWorld {
    fn spec(&self) -> &EnvSpec {
        &self.spec
    }

    fn reset(&mut self, seed: Option<u64>) -> (usize, Vec<f64>) {
        if let Some(seed) = seed {
            self.rng = StreamRng::seed_from_u64(seed);
        }
        self.clock.reset();
        self.x = 0;
        self.y = 0;
        self.previous_action = None;
        (self.state(), self.observation())
    }

    fn step(&mut self, action: usize) -> Result<Transition> {
        self.clock.begin_step(action, &self.spec)?;
        // Always draw so the stream advances identically whatever the history.
        let slipped = self.rng.random::<f64>() < self.slip;
        let executed = match self.previous_action {
            Some(prev) if slipped => prev,
            _ => action,
        };
        self.previous_action = Some(executed);

        let before = self.distance_to_goal();
        match executed {
            0 => self.y = (self.y + 1).min(self.height - 1),
            1 => self.y = self.y.saturating_sub(1),
            2 => self.x = self.x.saturating_sub(1),
            _ => self.x = (self.x + 1).min(self.width - 1),
        }
        let after = self.distance_to_goal();
        let terminal = after == 0;
        let mut reward = if terminal { 1.0 } else { 0.0 };
        if self.reward == GridReward::Dense {
            reward += (before as f64 - after as f64) / (self.width + self.height - 2) as f64;
        }
        let truncated = self.clock.finish_step(terminal, self.spec.max_episode_steps);
        Ok(Transition { state: self.state(), observation: self.observation(), reward, terminal, truncated })
    }
}
