//! Shared fixtures for the benchmarks.

use gprace_core::numerics::van_der_corput;
use gprace_core::zdist::AggregatedOrders;

/// `n` unit-order ordinates spread over `(0, height)` by a van der Corput sequence.
pub fn synthetic_orders(n: usize, height: f64) -> AggregatedOrders {
    AggregatedOrders::from_pairs((1..=n as u64).map(|k| (height * van_der_corput(k), 1.0)).collect())
}

/// Split primes `≤ limit`, for benchmarking decomposition alone.
pub fn split_primes(limit: u64) -> Vec<u64> {
    let config = gprace_core::SieveConfig::new(limit).expect("valid limit");
    let mut out = Vec::new();
    gprace_core::sieve::stream_primes(&config, |p| {
        if p % 4 == 1 {
            out.push(p)
        }
    })
    .expect("sieve");
    out
}
