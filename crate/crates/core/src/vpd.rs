//! Value Promise Discrepancy over a sliding window.
//!
//! The tracker keeps the last `k + 1` state-value estimates and the last `k`
//! rewards. Once the value window is full it reports
//!
//! ```text
//! VPD(t-k, t) = V(s_{t-k}) - sum_{i=0}^{k-1} gamma^i r_{t-k+1+i} - gamma^k V(s_t)
//! ```
//!
//! where `r_j` is the reward received on the transition into `s_j`. Rewards are
//! discounted forward in time, so the expression is the gap between the value
//! promised `k` steps ago and the `k`-step bootstrapped return actually obtained.
//! For an exact value function of a deterministic policy in a deterministic
//! environment it is identically zero.

use std::collections::VecDeque;

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct VpdTracker {
    horizon: usize,
    gamma: f64,
    gamma_k: f64,
    values: VecDeque<f64>,
    rewards: VecDeque<f64>,
    steps_seen: u64,
}

impl VpdTracker {
    pub fn new(horizon: usize, gamma: f64) -> Result<Self> {
        if horizon == 0 {
            return Err(Error::InvalidParameter("VPD horizon k must be at least 1".into()));
        }
        if !(gamma > 0.0 && gamma <= 1.0) {
            return Err(Error::InvalidParameter(format!("discount {gamma} is outside (0, 1]")));
        }
        Ok(Self {
            horizon,
            gamma,
            gamma_k: gamma.powi(horizon as i32),
            values: VecDeque::with_capacity(horizon + 1),
            rewards: VecDeque::with_capacity(horizon),
            steps_seen: 0,
        })
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn steps_seen(&self) -> u64 {
        self.steps_seen
    }

    pub fn is_ready(&self) -> bool {
        self.values.len() == self.horizon + 1
    }

    /// Buffers the value of the current state and the reward that led into it,
    /// then returns the discrepancy if `k + 1` values are available.
    pub fn push(&mut self, value_estimate: f64, reward: f64) -> Option<f64> {
        if self.values.len() == self.horizon + 1 {
            self.values.pop_front();
        }
        self.values.push_back(value_estimate);
        // The reward attached to the oldest buffered state lies outside the window.
        if self.steps_seen > 0 {
            if self.rewards.len() == self.horizon {
                self.rewards.pop_front();
            }
            self.rewards.push_back(reward);
        }
        self.steps_seen += 1;
        self.current()
    }

    /// The discrepancy for the current window contents, if full.
    pub fn current(&self) -> Option<f64> {
        if !self.is_ready() {
            return None;
        }
        let promised = self.values[0];
        let now = self.values[self.horizon];
        let mut discount = 1.0;
        let mut realized = 0.0;
        for &r in &self.rewards {
            realized += discount * r;
            discount *= self.gamma;
        }
        Some(promised - realized - self.gamma_k * now)
    }

    pub fn reset(&mut self) {
        self.values.clear();
        self.rewards.clear();
        self.steps_seen = 0;
    }
}
