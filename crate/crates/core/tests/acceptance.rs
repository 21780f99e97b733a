//! Acceptance suite. Runs every criterion, prints one `PASS`/`FAIL` line per
//! criterion and exits nonzero if any failed.
//!
//! `cargo test -p vdsc-core --test acceptance`

mod common;

use std::fs;
use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use vdsc::harness::{self, run_experiment, run_trace, RunSummary};
use vdsc::seeding::{component, stream};
use vdsc::{HashCode, HashCountTable, Homeostat, HomeostatParams, Preprocessor, SimHashEncoder, TriggerKind, VpdTracker};

type Check<'a> = Box<dyn FnOnce() -> Verdict + 'a>;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

fn timed(f: impl FnOnce() -> Verdict) -> (Verdict, Duration) {
    let start = Instant::now();
    let v = f();
    (v, start.elapsed())
}

// Timing budgets assume an optimized test profile; the workspace builds tests at opt-level 2.
fn homeostasis_calibration() -> Verdict {
    let (rate, elapsed) = {
        let start = Instant::now();
        let mut h = Homeostat::new(HomeostatParams::default(), stream(7, component::HOMEOSTAT));
        h.register_channel(TriggerKind::Custom("constant".into())).unwrap();
        let mut explores = 0u32;
        for _ in 0..100_000 {
            explores += u32::from(h.step(&[Some(3.0)], 0.01).unwrap().explore);
        }
        (f64::from(explores) / 100_000.0, start.elapsed())
    };
    verdict(
        (0.007..=0.013).contains(&rate) && elapsed < Duration::from_secs(1),
        format!("rate {rate:.5} (want [0.007, 0.013]), {:.0} ms (want < 1 s)", elapsed.as_secs_f64() * 1e3),
    )
}

/// Hand-executed trace for inputs 1, 2, 3 at rho = 0.5: tau = min(t, 10) = t,
/// so alpha is 1, 1/2, 1/3.
fn golden_oracle() -> [f64; 3] {
    let eps = 1e-8;
    // t = 1: mean 1, m2 0, z 0, x+ = 1, mean(x+) = 1, p = 0.5.
    let p1 = 0.5_f64;
    // t = 2: mean 1.5, m2 = 0.5 * 0.25 = 0.125.
    let z2 = 0.5 / (0.125_f64 + eps).sqrt();
    let x2 = z2.exp();
    let xbar2 = 0.5 * 1.0 + 0.5 * x2;
    let p2 = (0.5 * x2 / xbar2).min(1.0);
    // t = 3: mean 2, m2 = 2/3 * 0.125 + 1/3 * 1 = 5/12.
    let z3 = 1.0 / (5.0 / 12.0_f64 + eps).sqrt();
    let x3 = z3.exp();
    let xbar3 = (2.0 / 3.0) * xbar2 + x3 / 3.0;
    let p3 = (0.5 * x3 / xbar3).min(1.0);
    [p1, p2, p3]
}

fn homeostasis_golden() -> Verdict {
    let oracle = golden_oracle();
    let params = HomeostatParams { variance_epsilon: 1e-8, ..HomeostatParams::default() };
    let mut h = Homeostat::new(params, stream(1, component::HOMEOSTAT));
    h.register_channel(TriggerKind::Custom("golden".into())).unwrap();
    let mut worst = 0.0_f64;
    let mut got = Vec::new();
    for (x, want) in [1.0, 2.0, 3.0].into_iter().zip(oracle) {
        let p = h.step(&[Some(x)], 0.5).unwrap().p_bar;
        worst = worst.max((p - want).abs());
        got.push(p);
    }
    verdict(worst <= 1e-12, format!("p_bar {got:?} vs oracle {oracle:?}, max error {worst:.1e}"))
}

/// A random unit vector `u` and a unit vector at angle `theta` from it.
fn pair_at_angle(rng: &mut ChaCha8Rng, dim: usize, theta: f64) -> (Vec<f64>, Vec<f64>) {
    let normal = |rng: &mut ChaCha8Rng| -> Vec<f64> {
        let v: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v.into_iter().map(|x| x / n).collect()
    };
    let u = normal(rng);
    let w = normal(rng);
    let dot: f64 = u.iter().zip(&w).map(|(a, b)| a * b).sum();
    let ortho: Vec<f64> = w.iter().zip(&u).map(|(w, u)| w - dot * u).collect();
    let n = ortho.iter().map(|x| x * x).sum::<f64>().sqrt();
    let v = u.iter().zip(&ortho).map(|(u, o)| theta.cos() * u + theta.sin() * o / n).collect();
    (u, v)
}

fn simhash_geometry() -> Verdict {
    const BINS: usize = 10;
    const PAIRS_PER_BIN: usize = 200;
    const DIM: usize = 8;
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let encoder = SimHashEncoder::new(256, DIM, Preprocessor::Identity, &mut rng).unwrap();
    let mut worst = 0.0_f64;
    let mut oracle_worst = 0.0_f64;
    for b in 0..BINS {
        let theta = (b as f64 + 0.5) * std::f64::consts::PI / BINS as f64;
        let expected = theta / std::f64::consts::PI;
        let mut total = 0.0;
        let mut mc_disagree = 0u32;
        for _ in 0..PAIRS_PER_BIN {
            let (u, v) = pair_at_angle(&mut rng, DIM, theta);
            let (cu, cv) = (encoder.encode(&u).unwrap(), encoder.encode(&v).unwrap());
            total += f64::from(cu.hamming_distance(&cv)) / 256.0;
            // Monte-Carlo oracle: fresh Gaussian hyperplanes, no encoder involved.
            for _ in 0..50 {
                let a: Vec<f64> = (0..DIM).map(|_| rng.sample(StandardNormal)).collect();
                let su = a.iter().zip(&u).map(|(a, x)| a * x).sum::<f64>() >= 0.0;
                let sv = a.iter().zip(&v).map(|(a, x)| a * x).sum::<f64>() >= 0.0;
                mc_disagree += u32::from(su != sv);
            }
        }
        worst = worst.max((total / PAIRS_PER_BIN as f64 - expected).abs());
        oracle_worst = oracle_worst.max((f64::from(mc_disagree) / (50 * PAIRS_PER_BIN) as f64 - expected).abs());
    }
    let elapsed = start.elapsed();
    verdict(
        worst <= 0.02 && oracle_worst <= 0.02 && elapsed < Duration::from_secs(5),
        format!(
            "max |mean d/256 - theta/pi| {worst:.4} (Monte-Carlo oracle {oracle_worst:.4}), want <= 0.02; {:.0} ms",
            elapsed.as_secs_f64() * 1e3
        ),
    )
}

fn vpd_consistency() -> Verdict {
    let gamma = 0.9;
    let q = common::value_iteration(5, 2, gamma, 1e-10, |s, a| vec![common::chain_outcome(s, a)]);
    let v: Vec<f64> = q.iter().map(|row| common::max(row)).collect();
    let mut worst = 0.0_f64;
    for k in 1..=5 {
        let mut tracker = VpdTracker::new(k, gamma).unwrap();
        let mut s = 0;
        tracker.push(v[s], 0.0);
        for _ in 0..40 {
            let a = if q[s][1] >= q[s][0] { 1 } else { 0 };
            let o = common::chain_outcome(s, a);
            s = o.next_state;
            if let Some(d) = tracker.push(v[s], o.reward) {
                worst = worst.max(d.abs());
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut lin_worst = 0.0_f64;
    for _ in 0..1000 {
        let k = rng.random_range(1..=8);
        let g: f64 = rng.random_range(0.0..1.0);
        let c: f64 = rng.random_range(-5.0..5.0);
        let draw = |rng: &mut ChaCha8Rng| -> Vec<(f64, f64)> {
            (0..=k).map(|_| (rng.random_range(-10.0..10.0), rng.random_range(-1.0..1.0))).collect()
        };
        let (a, b) = (draw(&mut rng), draw(&mut rng));
        let run = |xs: &[(f64, f64)]| {
            let mut t = VpdTracker::new(k, g).unwrap();
            xs.iter().filter_map(|&(v, r)| t.push(v, r)).last().unwrap()
        };
        let combined: Vec<(f64, f64)> = a.iter().zip(&b).map(|(x, y)| (x.0 + c * y.0, x.1 + c * y.1)).collect();
        lin_worst = lin_worst.max((run(&combined) - (run(&a) + c * run(&b))).abs());
    }
    verdict(
        worst < 1e-6 && lin_worst <= 1e-9,
        format!("max |VPD| on greedy rollout {worst:.2e} (want < 1e-6); linearity error {lin_worst:.2e} (want <= 1e-9)"),
    )
}

fn bonus_law() -> Verdict {
    let code = HashCode::from_bits(&[true, false, true, true]);
    let mut table = HashCountTable::new();
    let mut at = Vec::new();
    let mut prev = f64::INFINITY;
    let mut monotone = true;
    for n in 1..=10_000u32 {
        let b = table.record_and_bonus(code.clone());
        monotone &= b < prev;
        prev = b;
        if matches!(n, 1 | 4 | 100) {
            at.push(b);
        }
    }
    verdict(
        at == [1.0, 0.5, 0.1] && monotone,
        format!("bonuses at n=1,4,100: {at:?}; strictly decreasing over 10^4 visits: {monotone}"),
    )
}

fn determinism(scratch: &Path) -> Verdict {
    let text = format!("{}\n", common::DEEP_SEA.replace("total_steps = 50000", "total_steps = 8000"));
    let mut outputs = Vec::new();
    for name in ["a", "b"] {
        let mut config = common::config(&text, &scratch.join(name));
        config.run.seeds = vec![1, 2, 3];
        config.run.trace = true;
        run_experiment(&config).unwrap();
        let read = |f: &str| fs::read(scratch.join(name).join(f)).unwrap();
        outputs.push((read("episodes.csv"), read("trace.csv")));
    }
    let same = outputs[0] == outputs[1];
    verdict(
        same,
        format!("episodes.csv {} bytes, trace.csv {} bytes, identical: {same}", outputs[0].0.len(), outputs[0].1.len()),
    )
}

fn post_decay_fraction(run: &RunSummary) -> f64 {
    let (explores, steps) = run
        .seeds
        .iter()
        .flat_map(|s| &s.trace)
        .fold((0u64, 0u64), |(e, n), r| (e + u64::from(r.explore), n + 1));
    explores as f64 / steps as f64
}

fn budget_parity(scratch: &Path) -> Verdict {
    let mut fractions = Vec::new();
    for strategy in ["epsilon_greedy", "vdsc"] {
        let mut config = common::config(common::SPARSE_GRID, &scratch.join(strategy));
        config.strategy.name = strategy.into();
        config.run.trace = true;
        config.run.trace_start = config.strategy.decay_steps;
        config.run.seeds = vec![1, 2, 3];
        fractions.push(post_decay_fraction(&harness::execute(&config).unwrap()));
    }
    let relative = (fractions[1] - fractions[0]).abs() / fractions[0];
    verdict(
        relative <= 0.2,
        format!(
            "post-decay explore fraction epsilon-greedy {:.5}, vdsc {:.5}, relative gap {:.3} (want <= 0.2)",
            fractions[0], fractions[1], relative
        ),
    )
}

fn headline(scratch: &Path) -> Verdict {
    let start = Instant::now();
    let mut rows = Vec::new();
    for strategy in ["vdsc", "epsilon_greedy"] {
        let mut config = common::config(common::DEEP_SEA, &scratch.join(strategy));
        config.strategy.name = strategy.into();
        let run = harness::execute(&config).unwrap();
        let hits: Vec<u64> =
            run.seeds.iter().filter(|s| s.max_return().is_some_and(|r| r > 0.5)).map(|s| s.seed).collect();
        rows.push((strategy, hits, run.explore_fraction()));
    }
    let elapsed = start.elapsed();
    println!("    strategy        seeds reaching goal   explore fraction");
    for (name, hits, fraction) in &rows {
        println!("    {name:<15} {:>2}/10 {:<14} {fraction:.4}", hits.len(), format!("{hits:?}"));
    }
    let (vdsc, eps) = (rows[0].1.len(), rows[1].1.len());
    verdict(
        vdsc >= 7 && eps < vdsc && elapsed < Duration::from_secs(120),
        format!("vdsc {vdsc}/10 (want >= 7), epsilon-greedy {eps}/10 (want fewer), {:.1} s", elapsed.as_secs_f64()),
    )
}

fn trace_shape(scratch: &Path) -> Verdict {
    let rho = 0.1;
    let text = common::SPARSE_GRID
        .replace("rho_initial = 1.0", &format!("rho_initial = {rho}"))
        .replace("rho_final = 0.01", &format!("rho_final = {rho}"))
        .replace("total_steps = 225000", "total_steps = 40000");
    let config = common::config(&text, scratch);
    let report = run_trace(&config, 20, 20_000).unwrap();
    let seed = &report.run.seeds[0];

    let traced: Vec<u64> = {
        let mut e: Vec<u64> = seed.trace.iter().map(|r| r.episode).collect();
        e.dedup();
        e
    };
    let mut identity = traced.len() == 20;
    let mut fractions = Vec::new();
    for &ep in &traced {
        let rows: Vec<_> = seed.trace.iter().filter(|r| r.episode == ep).collect();
        let record = &seed.episodes[ep as usize];
        let y = rows.iter().filter(|r| r.explore).count() as u64;
        identity &= y == record.explore_steps && rows.len() as u64 == record.steps;
        fractions.push(y as f64 / rows.len() as f64);
    }
    let raster = fs::read_to_string(&report.raster_path).unwrap();
    let trace_csv = fs::read_to_string(&report.trace_path).unwrap();
    let marks = raster.lines().skip(1).filter(|l| l.ends_with(",1")).count();
    let y_rows = trace_csv.lines().skip(1).filter(|l| l.split(',').nth(4) == Some("1")).count();
    identity &= marks == y_rows;

    let mean = fractions.iter().sum::<f64>() / fractions.len().max(1) as f64;
    verdict(
        identity && mean >= rho / 3.0 && mean <= 3.0 * rho,
        format!(
            "{} episodes traced, mean per-episode explore fraction {mean:.4} (want within 3x of {rho}), \
             raster marks {marks} = trace y rows {y_rows}, per-episode identity holds: {identity}",
            traced.len()
        ),
    )
}

fn main() -> ExitCode {
    let scratch = tempfile::tempdir().unwrap();
    let dir = |name: &str| scratch.path().join(name);
    let criteria: Vec<(&str, Check)> = vec![
        ("homeostasis calibration", Box::new(homeostasis_calibration)),
        ("homeostasis golden trace", Box::new(homeostasis_golden)),
        ("simhash geometry", Box::new(simhash_geometry)),
        ("vpd consistency", Box::new(vpd_consistency)),
        ("bonus law", Box::new(bonus_law)),
        ("determinism", Box::new(|| determinism(&dir("determinism")))),
        ("budget parity", Box::new(|| budget_parity(&dir("parity")))),
        ("deep sea headline", Box::new(|| headline(&dir("headline")))),
        ("trace raster shape", Box::new(|| trace_shape(&dir("trace")))),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.into_iter().enumerate() {
        let (v, elapsed) = timed(check);
        let status = if v.pass { "PASS" } else { "FAIL" };
        println!("criterion {} [{status}] {name}: {} ({:.2} s)", i + 1, v.detail, elapsed.as_secs_f64());
        failed += usize::from(!v.pass);
    }
    println!("acceptance: {} passed, {failed} failed", 9 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
