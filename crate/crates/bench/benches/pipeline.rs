use criterion::{criterion_group, criterion_main, Criterion};
use cvqec_core::error_channel::{DisplacementLaw, ErrorConfig};
use cvqec_core::network::{compose, NetworkSpec};
use cvqec_core::qec::{closed_form_output, substream, Channel, CodeConfig, RoundOptions, RoundRunner, ShotSampler};
use cvqec_core::witness::optimize_gains;
use std::hint::black_box;

fn bench(c: &mut Criterion) {
    let spec = NetworkSpec::five_mode_encoder();
    c.bench_function("compose encoder", |b| b.iter(|| compose(black_box(&spec)).unwrap()));

    let cfg = CodeConfig::with_squeezing_db(-3.5).squeezed_input();
    let ch3 = Channel::new(3).unwrap();
    c.bench_function("closed-form output", |b| b.iter(|| closed_form_output(black_box(&cfg), Some(ch3)).unwrap()));

    let err = ErrorConfig::certain(ch3, DisplacementLaw::General, 5.0);
    let runner = RoundRunner::new(&cfg, &err, RoundOptions::default()).unwrap();
    let mut rng = substream(1, 0);
    c.bench_function("round, 256-sample window", |b| b.iter(|| runner.run(&mut rng).unwrap()));

    let sampler = ShotSampler::new(&cfg, &err, true).unwrap();
    c.bench_function("single corrected shot", |b| b.iter(|| sampler.shot(&mut rng).unwrap()));

    let witness_cfg = CodeConfig::with_squeezing_db(-3.5);
    c.bench_function("witness gain optimisation", |b| b.iter(|| optimize_gains(black_box(&witness_cfg)).unwrap()));
}

criterion_group!(benches, bench);
criterion_main!(benches);
