//! RiverSwim: six states in a line, two actions.
//!
//! | action | at state `s` | outcome |
//! |---|---|---|
//! | left (0) | any | move to `max(s-1, 0)`; reward 0.005 when already at state 0 |
//! | right (1) | any | p=0.35 move to `min(s+1, 5)`, p=0.60 stay, p=0.05 move to `max(s-1, 0)` |
//!
//! A successful right move taken at state 5 pays 1. Episodes start at state 0 or
//! 1 (uniform), never terminate, and are truncated after 200 steps by default.

use rand::Rng;

use super::{check_limit, EnvSpec, Environment, EpisodeClock, Outcome, TabularModel, Transition};
use crate::error::Result;
use crate::seeding::StreamRng;
use rand::SeedableRng;

pub const STATES: usize = 6;
pub const LEFT_REWARD: f64 = 0.005;
pub const RIGHT_REWARD: f64 = 1.0;
pub const P_RIGHT: f64 = 0.35;
pub const P_STAY: f64 = 0.60;

#[derive(Debug, Clone)]
pub struct RiverSwim {
    spec: EnvSpec,
    state: usize,
    clock: EpisodeClock,
    rng: StreamRng,
}

impl RiverSwim {
    pub fn new(max_episode_steps: Option<usize>, rng: StreamRng) -> Result<Self> {
        let spec = EnvSpec {
            name: "river_swim".into(),
            state_count: STATES,
            action_count: 2,
            obs_dim: 1,
            max_episode_steps: check_limit(max_episode_steps, 200)?,
            reward_range: (0.0, RIGHT_REWARD),
        };
        Ok(Self { spec, state: 0, clock: EpisodeClock::default(), rng })
    }

    fn observation(state: usize) -> Vec<f64> {
        vec![state as f64 / (STATES - 1) as f64]
    }
}

impl TabularModel for RiverSwim {
    fn outcomes(&self, s: usize, action: usize) -> Vec<Outcome> {
        let last = STATES - 1;
        let out = |probability, next_state, reward| Outcome { probability, next_state, reward, terminal: false };
        if action == 0 {
            let reward = if s == 0 { LEFT_REWARD } else { 0.0 };
            return vec![out(1.0, s.saturating_sub(1), reward)];
        }
        let success_reward = if s == last { RIGHT_REWARD } else { 0.0 };
        vec![
            out(P_RIGHT, (s + 1).min(last), success_reward),
            out(P_STAY, s, 0.0),
            out(1.0 - P_RIGHT - P_STAY, s.saturating_sub(1), 0.0),
        ]
    }
}

impl Environment for RiverSwim {
    fn spec(&self) -> &EnvSpec {
        &self.spec
    }

    fn reset(&mut self, seed: Option<u64>) -> (usize, Vec<f64>) {
        if let Some(seed) = seed {
            self.rng = StreamRng::seed_from_u64(seed);
        }
        self.clock.reset();
        self.state = self.rng.random_range(0..2);
        (self.state, Self::observation(self.state))
    }

    fn step(&mut self, action: usize) -> Result<Transition> {
        self.clock.begin_step(action, &self.spec)?;
        let u: f64 = self.rng.random();
        let mut acc = 0.0;
        let outcomes = self.outcomes(self.state, action);
        let mut chosen = *outcomes.last().unwrap();
        for o in outcomes {
            acc += o.probability;
            if u < acc {
                chosen = o;
                break;
            }
        }
        self.state = chosen.next_state;
        let truncated = self.clock.finish_step(false, self.spec.max_episode_steps);
        Ok(Transition {
            state: self.state,
            observation: Self::observation(self.state),
            reward: chosen.reward,
            terminal: false,
            truncated,
        })
    }
}
