//! Tabular Q-learning.

use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

pub const DEFAULT_DISCOUNT: f64 = 0.99;
pub const DEFAULT_LEARNING_RATE: f64 = 0.1;

/// Dense zero-initialized action-value table.
#[derive(Debug, Clone, PartialEq)]
pub struct QTable {
    states: usize,
    actions: usize,
    learning_rate: f64,
    discount: f64,
    values: Vec<f64>,
}

impl QTable {
    pub fn new(states: usize, actions: usize, learning_rate: f64, discount: f64) -> Result<Self> {
        if states == 0 || actions == 0 {
            return Err(Error::InvalidParameter("Q-table needs at least one state and one action".into()));
        }
        if !(learning_rate > 0.0 && learning_rate <= 1.0) {
            return Err(Error::InvalidParameter(format!("learning rate {learning_rate} is outside (0, 1]")));
        }
        if !(discount > 0.0 && discount <= 1.0) {
            return Err(Error::InvalidParameter(format!("discount {discount} is outside (0, 1]")));
        }
        Ok(Self { states, actions, learning_rate, discount, values: vec![0.0; states * actions] })
    }

    pub fn state_count(&self) -> usize {
        self.states
    }

    pub fn action_count(&self) -> usize {
        self.actions
    }

    pub fn discount(&self) -> f64 {
        self.discount
    }

    fn check_state(&self, s: usize) -> Result<()> {
        if s >= self.states {
            return Err(Error::IndexOutOfRange { what: "state", index: s, size: self.states });
        }
        Ok(())
    }

    fn check_action(&self, a: usize) -> Result<()> {
        if a >= self.actions {
            return Err(Error::IndexOutOfRange { what: "action", index: a, size: self.actions });
        }
        Ok(())
    }

    pub fn q_values(&self, s: usize) -> Result<&[f64]> {
        self.check_state(s)?;
        Ok(&self.values[s * self.actions..(s + 1) * self.actions])
    }

    pub fn get(&self, s: usize, a: usize) -> Result<f64> {
        self.check_action(a)?;
        Ok(self.q_values(s)?[a])
    }

    pub fn set(&mut self, s: usize, a: usize, value: f64) -> Result<()> {
        self.check_state(s)?;
        self.check_action(a)?;
        self.values[s * self.actions + a] = value;
        Ok(())
    }

    /// `V(s) = max_a Q(s, a)`.
    pub fn state_value(&self, s: usize) -> Result<f64> {
        Ok(self.q_values(s)?.iter().copied().fold(f64::NEG_INFINITY, f64::max))
    }

    /// One Q-learning backup. Returns the TD error.
    pub fn update(&mut self, s: usize, a: usize, reward: f64, s_next: usize, terminal: bool) -> Result<f64> {
        self.check_state(s)?;
        self.check_action(a)?;
        self.check_state(s_next)?;
        let bootstrap = if terminal { 0.0 } else { self.discount * self.state_value(s_next)? };
        let idx = s * self.actions + a;
        let td = reward + bootstrap - self.values[idx];
        self.values[idx] += self.learning_rate * td;
        Ok(td)
    }

    /// Writes one `state action value` line per entry.
    pub fn write_dump<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for s in 0..self.states {
            for a in 0..self.actions {
                writeln!(out, "{s} {a} {}", self.values[s * self.actions + a])?;
            }
        }
        Ok(())
    }

    pub fn dump_to_file(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_dump(std::io::BufWriter::new(file)).map_err(|e| Error::io(path, e))
    }
}

/// Index of the largest entry; ties go to the lowest index.
pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}
