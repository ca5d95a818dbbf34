//! Segmented sieve of Eratosthenes over odd numbers.
//!
//! Each segment `[lo, lo + segment_size)` is a bitset over its odd members,
//! crossed off by the base primes up to `√limit`. Segments are independent,
//! so callers may sieve them in parallel and emit in index order.

use thiserror::Error;

pub const DEFAULT_SEGMENT_SIZE: u64 = 1 << 22;
pub const MIN_SEGMENT_SIZE: u64 = 1 << 10;
pub const MAX_LIMIT: u64 = 1 << 63;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SieveError {
    #[error("limit must be in [2, 2^63], got {0}")]
    Limit(u64),
    #[error("segment size must be at least {MIN_SEGMENT_SIZE}, got {0}")]
    SegmentSize(u64),
    #[error("cannot allocate a segment of {0} numbers")]
    Allocation(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SieveConfig {
    pub limit: u64,
    pub segment_size: u64,
}

impl SieveConfig {
    pub fn new(limit: u64) -> Result<Self, SieveError> {
        Self::with_segment_size(limit, DEFAULT_SEGMENT_SIZE)
    }

    pub fn with_segment_size(limit: u64, segment_size: u64) -> Result<Self, SieveError> {
        let config = SieveConfig { limit, segment_size };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), SieveError> {
        if !(2..=MAX_LIMIT).contains(&self.limit) {
            return Err(SieveError::Limit(self.limit));
        }
        if self.segment_size < MIN_SEGMENT_SIZE {
            return Err(SieveError::SegmentSize(self.segment_size));
        }
        Ok(())
    }
}

/// Base primes plus segment geometry for one sieve run.
#[derive(Debug, Clone)]
pub struct SegmentedSieve {
    limit: u64,
    // Even, so every segment starts at an even number.
    segment_size: u64,
    base_primes: Vec<u64>,
}

impl SegmentedSieve {
    pub fn new(config: &SieveConfig) -> Result<Self, SieveError> {
        config.validate()?;
        let segment_size = config.segment_size + (config.segment_size & 1);
        let base_primes = small_odd_primes(config.limit.isqrt())?;
        Ok(SegmentedSieve { limit: config.limit, segment_size, base_primes })
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn segment_count(&self) -> u64 {
        self.limit / self.segment_size + 1
    }

    /// Appends the primes of segment `index` to `out`, ascending.
    pub fn segment_primes(&self, index: u64, out: &mut Vec<u64>) -> Result<(), SieveError> {
        let lo = index * self.segment_size;
        if lo > self.limit {
            return Ok(());
        }
        // Inclusive upper end of this segment.
        let hi = (lo + (self.segment_size - 1)).min(self.limit);
        if index == 0 && self.limit >= 2 {
            out.push(2);
        }
        // Bit j stands for lo + 2j + 1.
        let odd_count = (hi - lo).div_ceil(2);
        let words = odd_count.div_ceil(64) as usize;
        let mut composite: Vec<u64> = Vec::new();
        composite.try_reserve_exact(words).map_err(|_| SieveError::Allocation(self.segment_size))?;
        composite.resize(words, 0);

        for &q in &self.base_primes {
            let q2 = q * q;
            if q2 > hi {
                break;
            }
            let mut start = if q2 >= lo { q2 } else { lo.div_ceil(q) * q };
            if start % 2 == 0 {
                start += q;
            }
            let mut j = (start - lo - 1) / 2;
            while j < odd_count {
                composite[(j / 64) as usize] |= 1 << (j % 64);
                j += q;
            }
        }
        for (w, &word) in composite.iter().enumerate() {
            let mut free = !word;
            while free != 0 {
                let bit = free.trailing_zeros() as u64;
                free &= free - 1;
                let j = w as u64 * 64 + bit;
                if j >= odd_count {
                    break;
                }
                let n = lo + 2 * j + 1;
                if n > 1 {
                    out.push(n);
                }
            }
        }
        Ok(())
    }
}

/// Odd primes up to `n` by a plain sieve.
fn small_odd_primes(n: u64) -> Result<Vec<u64>, SieveError> {
    let n = n as usize;
    let mut is_composite = Vec::new();
    is_composite.try_reserve_exact(n + 1).map_err(|_| SieveError::Allocation(n as u64))?;
    is_composite.resize(n + 1, false);
    let mut primes = Vec::new();
    let mut i = 3;
    while i <= n {
        if !is_composite[i] {
            primes.push(i as u64);
            let mut k = i * i;
            while k <= n {
                is_composite[k] = true;
                k += 2 * i;
            }
        }
        i += 2;
    }
    Ok(primes)
}

/// Emits every prime `≤ limit` in ascending order; returns how many.
pub fn stream_primes<F: FnMut(u64)>(config: &SieveConfig, mut consumer: F) -> Result<u64, SieveError> {
    let sieve = SegmentedSieve::new(config)?;
    let mut buf = Vec::new();
    let mut count = 0;
    for index in 0..sieve.segment_count() {
        buf.clear();
        sieve.segment_primes(index, &mut buf)?;
        count += buf.len() as u64;
        buf.iter().copied().for_each(&mut consumer);
    }
    Ok(count)
}
