//! Test-side oracles, written independently of the library code they check.
#![allow(dead_code)]

use std::path::Path;

use vdsc::env::{Outcome, TabularModel};
use vdsc::ExperimentConfig;

/// Optimal action values by synchronous value iteration, iterated until the
/// largest change drops below `tol`.
pub fn value_iteration(
    states: usize,
    actions: usize,
    gamma: f64,
    tol: f64,
    outcomes: impl Fn(usize, usize) -> Vec<Outcome>,
) -> Vec<Vec<f64>> {
    let table: Vec<Vec<Vec<Outcome>>> =
        (0..states).map(|s| (0..actions).map(|a| outcomes(s, a)).collect()).collect();
    let mut v = vec![0.0; states];
    loop {
        let q = backup(&table, &v, gamma);
        let next: Vec<f64> = q.iter().map(|row| row.iter().cloned().fold(f64::NEG_INFINITY, f64::max)).collect();
        let delta = next.iter().zip(&v).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        v = next;
        if delta < tol {
            return backup(&table, &v, gamma);
        }
    }
}

fn backup(table: &[Vec<Vec<Outcome>>], v: &[f64], gamma: f64) -> Vec<Vec<f64>> {
    table
        .iter()
        .map(|per_action| {
            per_action
                .iter()
                .map(|outs| {
                    outs.iter()
                        .map(|o| o.probability * (o.reward + if o.terminal { 0.0 } else { gamma * v[o.next_state] }))
                        .sum()
                })
                .collect()
        })
        .collect()
}

pub fn model_values<M: TabularModel>(model: &M, states: usize, actions: usize, gamma: f64) -> Vec<Vec<f64>> {
    value_iteration(states, actions, gamma, 1e-12, |s, a| model.outcomes(s, a))
}

pub fn max(row: &[f64]) -> f64 {
    row.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
}

/// Deterministic 5-state chain: action 1 moves right (the last state loops on
/// itself), action 0 moves back to state 0. Entering state `s` pays `s / 4`.
pub fn chain_outcome(s: usize, a: usize) -> Outcome {
    let next = if a == 1 { (s + 1).min(4) } else { 0 };
    Outcome { probability: 1.0, next_state: next, reward: next as f64 / 4.0, terminal: false }
}

pub fn config(text: &str, out: &Path) -> ExperimentConfig {
    let dir = format!("\"{}\"", out.display());
    ExperimentConfig::parse(text, &[("run.output_dir".into(), dir)]).expect("test config parses")
}

pub const DEEP_SEA: &str = r#"
[environment]
name = "deep_sea"
size = 10

[strategy]
name = "vdsc"
k = 5
bits = 256
rho_initial = 1.0
rho_final = 0.01
decay_steps = 25000

[agent]
learning_rate = 0.1
discount = 0.99

[run]
seeds = [1, 2, 3, 4, 5, 6, 7, 8, 9, 10]
total_steps = 50000
eval_interval = 1000
"#;

pub const SPARSE_GRID: &str = r#"
[environment]
name = "sparse_grid"
width = 8
height = 8

[strategy]
name = "vdsc"
rho_initial = 1.0
rho_final = 0.01
decay_steps = 25000

[run]
seeds = [1]
total_steps = 225000
eval_interval = 5000
"#;
