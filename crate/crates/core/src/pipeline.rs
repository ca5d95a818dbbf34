//! Sieve and decompose in parallel, consume in ascending order.

use rayon::prelude::*;

use crate::decomp::{angle_prime, AnglePrime};
use crate::error::Error;
use crate::sieve::{SegmentedSieve, SieveConfig};

/// One prime of the stream, decomposed when it splits in `Z[i]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PrimeEvent {
    Split(AnglePrime),
    /// `2` or a prime `≡ 3 mod 4`.
    Other(u64),
}

impl PrimeEvent {
    pub fn p(&self) -> u64 {
        match self {
            PrimeEvent::Split(ap) => ap.p,
            PrimeEvent::Other(p) => *p,
        }
    }

    pub fn split(&self) -> Option<&AnglePrime> {
        match self {
            PrimeEvent::Split(ap) => Some(ap),
            PrimeEvent::Other(_) => None,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PipelineStats {
    pub primes: u64,
    pub split_primes: u64,
}

fn decompose_segment(sieve: &SegmentedSieve, index: u64) -> Result<Vec<PrimeEvent>, Error> {
    let mut primes = Vec::new();
    sieve.segment_primes(index, &mut primes)?;
    primes
        .into_iter()
        .map(|p| if p % 4 == 1 { Ok(PrimeEvent::Split(angle_prime(p)?)) } else { Ok(PrimeEvent::Other(p)) })
        .collect()
}

/// Runs the whole stream up to `config.limit`.
///
/// Segments are sieved and decomposed on the rayon pool, a batch of one
/// segment per worker at a time; `consumer` sees every event exactly once,
/// from this thread, in ascending order of `p`.
pub fn for_each_prime_event<F>(config: &SieveConfig, mut consumer: F) -> Result<PipelineStats, Error>
where
    F: FnMut(&PrimeEvent) -> Result<(), Error>,
{
    let sieve = SegmentedSieve::new(config)?;
    let batch = rayon::current_num_threads().max(1) as u64;
    let total = sieve.segment_count();
    let mut stats = PipelineStats::default();
    let mut start = 0;
    while start < total {
        let end = (start + batch).min(total);
        let decoded: Vec<Result<Vec<PrimeEvent>, Error>> =
            (start..end).into_par_iter().map(|i| decompose_segment(&sieve, i)).collect();
        for events in decoded {
            for event in events? {
                stats.primes += 1;
                if matches!(event, PrimeEvent::Split(_)) {
                    stats.split_primes += 1;
                }
                consumer(&event)?;
            }
        }
        start = end;
    }
    Ok(stats)
}

/// [`for_each_prime_event`] restricted to split primes.
pub fn for_each_angle_prime<F>(config: &SieveConfig, mut consumer: F) -> Result<PipelineStats, Error>
where
    F: FnMut(&AnglePrime) -> Result<(), Error>,
{
    for_each_prime_event(config, |event| match event {
        PrimeEvent::Split(ap) => consumer(ap),
        PrimeEvent::Other(_) => Ok(()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sieve::stream_primes;

    #[test]
    fn ordered_and_complete() {
        let config = SieveConfig::with_segment_size(300_000, 4096).unwrap();
        let mut expected = Vec::new();
        stream_primes(&config, |p| expected.push(p)).unwrap();

        let mut seen = Vec::new();
        let stats = for_each_prime_event(&config, |e| {
            seen.push(e.p());
            Ok(())
        })
        .unwrap();
        assert_eq!(seen, expected);
        assert_eq!(stats.primes as usize, expected.len());
        assert_eq!(stats.split_primes as usize, expected.iter().filter(|p| *p % 4 == 1).count());
    }

    #[test]
    fn consumer_error_stops_the_stream() {
        let config = SieveConfig::with_segment_size(100_000, 1024).unwrap();
        let mut n = 0;
        let r = for_each_prime_event(&config, |_| {
            n += 1;
            if n == 10 {
                Err(std::io::Error::other("stop").into())
            } else {
                Ok(())
            }
        });
        assert!(r.is_err());
        assert_eq!(n, 10);
    }
}
