use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vdsc::harness::run_seed;
use vdsc::seeding::{component, stream};
use vdsc::{ExperimentConfig, HashCountTable, Homeostat, HomeostatParams, Preprocessor, SimHashEncoder, TriggerKind, VpdTracker};

fn homeostat_step(c: &mut Criterion) {
    let mut h = Homeostat::new(HomeostatParams::default(), stream(1, component::HOMEOSTAT));
    h.register_channel(TriggerKind::Vpd).unwrap();
    h.register_channel(TriggerKind::CountBonus).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    c.bench_function("homeostat_step_2ch", |b| {
        b.iter(|| {
            let x: f64 = rng.random();
            h.step(black_box(&[Some(x), Some(1.0 - x)]), 0.01).unwrap()
        })
    });
}

fn simhash(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let encoder = SimHashEncoder::new(256, 2, Preprocessor::CenteredWithBias, &mut rng).unwrap();
    let mut scratch = Vec::new();
    let obs = [0.3, 0.7];
    c.bench_function("simhash_encode_256", |b| b.iter(|| encoder.encode_with(black_box(&obs), &mut scratch).unwrap()));

    let mut table = HashCountTable::new();
    let code = encoder.encode(&obs).unwrap();
    c.bench_function("hash_count_record", |b| {
        b.iter_batched(|| code.clone(), |code| table.record_and_bonus(code), BatchSize::SmallInput)
    });
}

fn vpd(c: &mut Criterion) {
    let mut tracker = VpdTracker::new(5, 0.99).unwrap();
    let mut v = 0.0;
    c.bench_function("vpd_push_k5", |b| {
        b.iter(|| {
            v += 0.001;
            tracker.push(black_box(v), 0.01)
        })
    });
}

fn deep_sea_run(c: &mut Criterion) {
    let text = r#"
[environment]
name = "deep_sea"
size = 10
[strategy]
name = "vdsc"
[run]
seeds = [1]
total_steps = 10000
"#;
    let mut group = c.benchmark_group("deep_sea_10k_steps");
    group.sample_size(20);
    for strategy in ["vdsc", "epsilon_greedy"] {
        let config = ExperimentConfig::parse(text, &[("strategy.name".into(), format!("\"{strategy}\""))]).unwrap();
        group.bench_function(strategy, |b| b.iter(|| run_seed(&config, 1).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, homeostat_step, simhash, vpd, deep_sea_run);
criterion_main!(benches);
