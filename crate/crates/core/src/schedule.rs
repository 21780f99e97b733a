use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Linear interpolation from `initial` to `final_value` over `decay_steps`
/// agent steps, constant afterwards.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecaySchedule {
    pub initial: f64,
    pub final_value: f64,
    pub decay_steps: u64,
}

impl DecaySchedule {
    pub fn new(initial: f64, final_value: f64, decay_steps: u64) -> Result<Self> {
        if decay_steps == 0 {
            return Err(Error::InvalidParameter("decay_steps must be positive".into()));
        }
        if !initial.is_finite() || !final_value.is_finite() {
            return Err(Error::InvalidParameter("schedule endpoints must be finite".into()));
        }
        Ok(Self { initial, final_value, decay_steps })
    }

    pub fn constant(value: f64) -> Self {
        Self { initial: value, final_value: value, decay_steps: 1 }
    }

    pub fn value(&self, step: u64) -> f64 {
        if step >= self.decay_steps {
            return self.final_value;
        }
        let frac = (step as f64 / self.decay_steps as f64).min(1.0);
        self.initial + (self.final_value - self.initial) * frac
    }
}
