use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion, Throughput};
use gprace_bench::split_primes;
use gprace_core::pipeline::for_each_prime_event;
use gprace_core::sieve::stream_primes;
use gprace_core::{angle_prime, RaceConfig, RaceRunner, SieveConfig};

fn sieve(c: &mut Criterion) {
    let mut g = c.benchmark_group("sieve");
    g.sample_size(10);
    for limit in [1_000_000u64, 10_000_000] {
        g.throughput(Throughput::Elements(limit));
        g.bench_function(format!("stream_primes/{limit}"), |b| {
            let config = SieveConfig::new(limit).unwrap();
            b.iter(|| {
                let mut last = 0;
                stream_primes(&config, |p| last = p).unwrap();
                black_box(last)
            })
        });
    }
    g.finish();
}

fn decomposition(c: &mut Criterion) {
    let primes = split_primes(1_000_000);
    let mut g = c.benchmark_group("decomposition");
    g.throughput(Throughput::Elements(primes.len() as u64));
    g.bench_function("angle_prime/below_1e6", |b| {
        b.iter(|| primes.iter().map(|&p| angle_prime(p).unwrap().a).sum::<i64>())
    });
    g.finish();
}

fn race(c: &mut Criterion) {
    let mut g = c.benchmark_group("race");
    g.sample_size(10);
    let limit = 10_000_000u64;
    g.throughput(Throughput::Elements(limit));
    g.bench_function("pipeline_and_runner/1e7", |b| {
        let config = SieveConfig::new(limit).unwrap();
        b.iter(|| {
            let mut runner = RaceRunner::new(RaceConfig::default()).unwrap();
            for_each_prime_event(&config, |e| Ok(runner.update(e)?)).unwrap();
            black_box(runner.finish(limit).unwrap().d1.value())
        })
    });
    g.finish();
}

criterion_group!(benches, sieve, decomposition, race);
criterion_main!(benches);
