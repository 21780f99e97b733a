//! Unified homeostasis: turns trigger streams into explore/exploit decisions.
//!
//! Each channel keeps exponential running statistics of its signal with weight
//! `alpha = 1 / min(t, 5 / rho)`. A sample is standardized against those
//! statistics, exponentiated, and compared to the running mean of the
//! exponentiated values, which gives a per-channel probability
//! `p_i = min(1, rho * x+ / mean(x+))`. The channel probabilities are averaged
//! and a Bernoulli draw decides whether this step explores. Over time the
//! fraction of exploring steps settles near `rho`, while the individual
//! decisions concentrate on steps where the signals are unusually high.
//!
//! A target rate of exactly 1 explores on every step; the ratio rule alone
//! would undershoot it whenever a signal dips below its running mean.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seeding::StreamRng;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TriggerKind {
    Vpd,
    CountBonus,
    Custom(String),
}

impl fmt::Display for TriggerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TriggerKind::Vpd => f.write_str("vpd"),
            TriggerKind::CountBonus => f.write_str("count_bonus"),
            TriggerKind::Custom(name) => f.write_str(name),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HomeostatParams {
    /// Guard added to the running second moment before the square root.
    pub variance_epsilon: f64,
    /// Standardized values are clamped to `[-c, c]` before `exp`. Large
    /// clamps let one rare spike inflate the transformed mean for many time
    /// scales, during which every other step has near-zero probability and the
    /// realized rate falls far below `rho`.
    pub exponent_clamp: f64,
    /// Horizon multiplier in `tau = min(t, horizon / rho)`.
    pub time_scale: f64,
}

impl Default for HomeostatParams {
    fn default() -> Self {
        Self { variance_epsilon: 1e-8, exponent_clamp: 5.0, time_scale: 5.0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TriggerChannel {
    pub kind: TriggerKind,
    pub mean: f64,
    pub second_moment: f64,
    pub transformed_mean: f64,
    pub updates: u64,
}

impl TriggerChannel {
    fn new(kind: TriggerKind) -> Self {
        Self { kind, mean: 0.0, second_moment: 0.0, transformed_mean: 0.0, updates: 0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ChannelId(usize);

impl ChannelId {
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HomeostatDecision {
    pub explore: bool,
    /// Averaged probability; 0 when no channel was sampled.
    pub p_bar: f64,
    /// One entry per registered channel, `None` for channels skipped this step.
    pub channel_p: Vec<Option<f64>>,
}

#[derive(Debug, Clone)]
pub struct Homeostat {
    channels: Vec<TriggerChannel>,
    params: HomeostatParams,
    step: u64,
    rng: StreamRng,
}

impl Homeostat {
    pub fn new(params: HomeostatParams, rng: StreamRng) -> Self {
        Self { channels: Vec::new(), params, step: 1, rng }
    }

    pub fn register_channel(&mut self, kind: TriggerKind) -> Result<ChannelId> {
        if self.channels.iter().any(|c| c.kind == kind) {
            return Err(Error::DuplicateChannel(kind.to_string()));
        }
        self.channels.push(TriggerChannel::new(kind));
        Ok(ChannelId(self.channels.len() - 1))
    }

    pub fn channels(&self) -> &[TriggerChannel] {
        &self.channels
    }

    /// The step index `t` of the next call to [`step`](Self::step), starting at 1.
    pub fn time(&self) -> u64 {
        self.step
    }

    pub fn params(&self) -> &HomeostatParams {
        &self.params
    }

    /// Feeds one sample per channel (`None` skips the channel this step) and
    /// draws the decision. With no samples at all the step exploits and no
    /// random number is consumed.
    pub fn step(&mut self, samples: &[Option<f64>], rho: f64) -> Result<HomeostatDecision> {
        if !(rho > 0.0 && rho <= 1.0) {
            return Err(Error::InvalidRate(rho));
        }
        if samples.len() != self.channels.len() {
            return Err(Error::SampleCount { expected: self.channels.len(), actual: samples.len() });
        }
        if let Some((ch, &Some(x))) =
            self.channels.iter().zip(samples).find(|(_, s)| s.is_some_and(|x| !x.is_finite()))
        {
            return Err(Error::NonFiniteSample { channel: ch.kind.to_string(), value: x });
        }

        let tau = (self.step as f64).min(self.params.time_scale / rho);
        let alpha = 1.0 / tau;
        let eps = self.params.variance_epsilon;
        let clamp = self.params.exponent_clamp;

        let mut channel_p = Vec::with_capacity(samples.len());
        let mut sum = 0.0;
        let mut sampled = 0usize;
        for (ch, sample) in self.channels.iter_mut().zip(samples) {
            let Some(x) = *sample else {
                channel_p.push(None);
                continue;
            };
            ch.mean = (1.0 - alpha) * ch.mean + alpha * x;
            let dev = x - ch.mean;
            ch.second_moment = (1.0 - alpha) * ch.second_moment + alpha * dev * dev;
            let z = (dev / (ch.second_moment + eps).sqrt()).clamp(-clamp, clamp);
            let transformed = z.exp();
            ch.transformed_mean = (1.0 - alpha) * ch.transformed_mean + alpha * transformed;
            ch.updates += 1;
            let p = if rho >= 1.0 {
                1.0
            } else if ch.transformed_mean < eps {
                rho.min(1.0)
            } else {
                (rho * transformed / ch.transformed_mean).min(1.0)
            };
            channel_p.push(Some(p));
            sum += p;
            sampled += 1;
        }
        self.step += 1;

        if sampled == 0 {
            return Ok(HomeostatDecision { explore: false, p_bar: 0.0, channel_p });
        }
        let p_bar = sum / sampled as f64;
        let explore = self.rng.random::<f64>() < p_bar;
        Ok(HomeostatDecision { explore, p_bar, channel_p })
    }
}
