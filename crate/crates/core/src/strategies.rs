//! When-to-explore strategies.
//!
//! All strategies see the same per-step [`StrategyContext`] and return a
//! [`StepDecision`]. The blind baselines (epsilon-greedy, Boltzmann) flip a coin
//! or sample a softmax. VDSC and its two ablations feed internal signals (value
//! promise discrepancy and hashed-count novelty) to a homeostat, which decides
//! when to take a uniformly random action.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::agent::argmax;
use crate::error::{Error, Result};
use crate::hashing::{HashCountTable, Preprocessor, SimHashEncoder};
use crate::homeostasis::{ChannelId, Homeostat, HomeostatParams, TriggerKind};
use crate::schedule::DecaySchedule;
use crate::seeding::StreamRng;
use crate::vpd::VpdTracker;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StrategyKind {
    EpsilonGreedy,
    Boltzmann,
    Vdsc,
    VpdOnly,
    CountsOnly,
}

impl StrategyKind {
    pub const ALL: [StrategyKind; 5] = [
        StrategyKind::EpsilonGreedy,
        StrategyKind::Boltzmann,
        StrategyKind::Vdsc,
        StrategyKind::VpdOnly,
        StrategyKind::CountsOnly,
    ];

    pub fn name(self) -> &'static str {
        match self {
            StrategyKind::EpsilonGreedy => "epsilon_greedy",
            StrategyKind::Boltzmann => "boltzmann",
            StrategyKind::Vdsc => "vdsc",
            StrategyKind::VpdOnly => "vpd_only",
            StrategyKind::CountsOnly => "counts_only",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == name)
    }

    pub fn uses_triggers(self) -> bool {
        matches!(self, StrategyKind::Vdsc | StrategyKind::VpdOnly | StrategyKind::CountsOnly)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct StrategyContext<'a> {
    pub q_values: &'a [f64],
    /// `max(q_values)`.
    pub state_value: f64,
    pub observation: &'a [f64],
    /// Reward received on the transition into the current state; 0 at episode start.
    pub reward_prev: f64,
    pub episode_step: u64,
    pub global_step: u64,
}

impl<'a> StrategyContext<'a> {
    pub fn new(
        q_values: &'a [f64],
        observation: &'a [f64],
        reward_prev: f64,
        episode_step: u64,
        global_step: u64,
    ) -> Self {
        let state_value = q_values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Self { q_values, state_value, observation, reward_prev, episode_step, global_step }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepDecision {
    pub action: usize,
    /// Whether the switching mechanism chose to explore this step.
    pub explore: bool,
    /// Probability of exploring at this step.
    pub p_bar: f64,
    pub vpd: Option<f64>,
    pub bonus: Option<f64>,
}

impl StepDecision {
    fn blind(action: usize, explore: bool, p_bar: f64) -> Self {
        Self { action, explore, p_bar, vpd: None, bonus: None }
    }
}

pub fn epsilon_greedy_act<R: Rng + ?Sized>(
    ctx: &StrategyContext<'_>,
    schedule: &DecaySchedule,
    rng: &mut R,
) -> StepDecision {
    let epsilon = schedule.value(ctx.global_step).clamp(0.0, 1.0);
    let explore = rng.random::<f64>() < epsilon;
    let action = if explore { rng.random_range(0..ctx.q_values.len()) } else { argmax(ctx.q_values) };
    StepDecision::blind(action, explore, epsilon)
}

/// Softmax probabilities of `q / temperature`, stabilized by subtracting the max.
pub fn softmax(q_values: &[f64], temperature: f64) -> Vec<f64> {
    let max = q_values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut probs: Vec<f64> = q_values.iter().map(|&q| ((q - max) / temperature).exp()).collect();
    let total: f64 = probs.iter().sum();
    probs.iter_mut().for_each(|p| *p /= total);
    probs
}

/// Samples from the softmax at the scheduled temperature. The step counts as
/// exploratory when the sampled action is not the greedy one.
pub fn boltzmann_act<R: Rng + ?Sized>(
    ctx: &StrategyContext<'_>,
    schedule: &DecaySchedule,
    rng: &mut R,
) -> Result<StepDecision> {
    let temperature = schedule.value(ctx.global_step);
    if temperature.is_nan() || temperature <= 0.0 {
        return Err(Error::InvalidParameter(format!("Boltzmann temperature {temperature} must be positive")));
    }
    let probs = softmax(ctx.q_values, temperature);
    let u: f64 = rng.random();
    let mut acc = 0.0;
    let mut action = probs.len() - 1;
    for (i, p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            action = i;
            break;
        }
    }
    let greedy = argmax(ctx.q_values);
    Ok(StepDecision::blind(action, action != greedy, 1.0 - probs[greedy]))
}

/// Channels a VDSC-style strategy feeds to its homeostat.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct TriggerChannels {
    pub vpd: Option<ChannelId>,
    pub bonus: Option<ChannelId>,
}

/// Count-based novelty components.
#[derive(Debug, Clone)]
pub struct StateNovelty {
    pub encoder: SimHashEncoder,
    pub counts: HashCountTable,
    scratch: Vec<f64>,
}

impl StateNovelty {
    pub fn new(encoder: SimHashEncoder) -> Self {
        Self { encoder, counts: HashCountTable::new(), scratch: Vec::new() }
    }

    pub fn observe(&mut self, observation: &[f64]) -> Result<f64> {
        let code = self.encoder.encode_with(observation, &mut self.scratch)?;
        Ok(self.counts.record_and_bonus(code))
    }
}

/// One VDSC step: hash and count the state, push the value and reward into the
/// discrepancy window, hand the available signals (|VPD| once the window is
/// full, the count bonus always) to the homeostat, and explore uniformly at
/// random if it says so. Both signals are computed for diagnostics even when
/// only one channel is registered.
#[allow(clippy::too_many_arguments)]
pub fn vdsc_act<R: Rng + ?Sized>(
    ctx: &StrategyContext<'_>,
    vpd: &mut VpdTracker,
    novelty: &mut StateNovelty,
    homeostat: &mut Homeostat,
    channels: TriggerChannels,
    rho_schedule: &DecaySchedule,
    rng: &mut R,
) -> Result<StepDecision> {
    let bonus = novelty.observe(ctx.observation)?;
    let discrepancy = vpd.push(ctx.state_value, ctx.reward_prev);

    let mut samples = [None; 2];
    let mut n = 0;
    for (kind, value) in [(channels.vpd, discrepancy.map(f64::abs)), (channels.bonus, Some(bonus))] {
        if let Some(id) = kind {
            samples[id.index()] = value;
            n = n.max(id.index() + 1);
        }
    }
    let rho = rho_schedule.value(ctx.global_step);
    let decision = homeostat.step(&samples[..n], rho)?;
    let action = if decision.explore { rng.random_range(0..ctx.q_values.len()) } else { argmax(ctx.q_values) };
    Ok(StepDecision { action, explore: decision.explore, p_bar: decision.p_bar, vpd: discrepancy, bonus: Some(bonus) })
}

/// A strategy instance owned by one run.
pub trait ExplorationStrategy: Send {
    fn kind(&self) -> StrategyKind;

    /// Called before the first step of every episode.
    fn begin_episode(&mut self) {}

    fn act(&mut self, ctx: &StrategyContext<'_>) -> Result<StepDecision>;

    /// The visit-count table, for strategies that hash states.
    fn hash_counts(&self) -> Option<&HashCountTable> {
        None
    }
}

#[derive(Debug, Clone)]
pub struct EpsilonGreedy {
    pub schedule: DecaySchedule,
    rng: StreamRng,
}

impl EpsilonGreedy {
    pub fn new(schedule: DecaySchedule, rng: StreamRng) -> Self {
        Self { schedule, rng }
    }
}

impl ExplorationStrategy for EpsilonGreedy {
    fn kind(&self) -> StrategyKind {
        StrategyKind::EpsilonGreedy
    }

    fn act(&mut self, ctx: &StrategyContext<'_>) -> Result<StepDecision> {
        Ok(epsilon_greedy_act(ctx, &self.schedule, &mut self.rng))
    }
}

#[derive(Debug, Clone)]
pub struct Boltzmann {
    pub schedule: DecaySchedule,
    rng: StreamRng,
}

impl Boltzmann {
    pub fn new(schedule: DecaySchedule, rng: StreamRng) -> Self {
        Self { schedule, rng }
    }
}

impl ExplorationStrategy for Boltzmann {
    fn kind(&self) -> StrategyKind {
        StrategyKind::Boltzmann
    }

    fn act(&mut self, ctx: &StrategyContext<'_>) -> Result<StepDecision> {
        boltzmann_act(ctx, &self.schedule, &mut self.rng)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VdscParams {
    pub horizon: usize,
    pub discount: f64,
    pub bits: usize,
    pub preprocessor: Preprocessor,
    pub homeostat: HomeostatParams,
    pub rho: DecaySchedule,
}

/// Random streams for a trigger-driven strategy.
pub struct VdscStreams {
    pub projection: StreamRng,
    pub homeostat: StreamRng,
    pub actions: StreamRng,
}

#[derive(Debug, Clone)]
pub struct Vdsc {
    kind: StrategyKind,
    vpd: VpdTracker,
    novelty: StateNovelty,
    homeostat: Homeostat,
    channels: TriggerChannels,
    rho: DecaySchedule,
    rng: StreamRng,
}

impl Vdsc {
    /// `kind` selects the registered channels: both for [`StrategyKind::Vdsc`],
    /// one for the ablations.
    pub fn new(kind: StrategyKind, params: &VdscParams, obs_dim: usize, mut streams: VdscStreams) -> Result<Self> {
        let (use_vpd, use_bonus) = match kind {
            StrategyKind::Vdsc => (true, true),
            StrategyKind::VpdOnly => (true, false),
            StrategyKind::CountsOnly => (false, true),
            other => {
                return Err(Error::InvalidParameter(format!("{} is not a trigger-driven strategy", other.name())))
            }
        };
        let vpd = VpdTracker::new(params.horizon, params.discount)?;
        let encoder = SimHashEncoder::new(params.bits, obs_dim, params.preprocessor, &mut streams.projection)?;
        let mut homeostat = Homeostat::new(params.homeostat, streams.homeostat);
        let mut channels = TriggerChannels::default();
        if use_vpd {
            channels.vpd = Some(homeostat.register_channel(TriggerKind::Vpd)?);
        }
        if use_bonus {
            channels.bonus = Some(homeostat.register_channel(TriggerKind::CountBonus)?);
        }
        Ok(Self {
            kind,
            vpd,
            novelty: StateNovelty::new(encoder),
            homeostat,
            channels,
            rho: params.rho,
            rng: streams.actions,
        })
    }

    pub fn counts(&self) -> &HashCountTable {
        &self.novelty.counts
    }

    pub fn homeostat(&self) -> &Homeostat {
        &self.homeostat
    }

    pub fn vpd_tracker(&self) -> &VpdTracker {
        &self.vpd
    }
}

impl ExplorationStrategy for Vdsc {
    fn kind(&self) -> StrategyKind {
        self.kind
    }

    /// Discrepancy windows are per episode; homeostat statistics and counts persist.
    fn begin_episode(&mut self) {
        self.vpd.reset();
    }

    fn hash_counts(&self) -> Option<&HashCountTable> {
        Some(&self.novelty.counts)
    }

    fn act(&mut self, ctx: &StrategyContext<'_>) -> Result<StepDecision> {
        vdsc_act(ctx, &mut self.vpd, &mut self.novelty, &mut self.homeostat, self.channels, &self.rho, &mut self.rng)
    }
}
