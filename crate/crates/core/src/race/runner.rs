use std::io::Write;

use super::{e_phi, f_phi, normalizer, Predicate, RaceError, RaceSeries};
use crate::decomp::AnglePrime;
use crate::fmt::sig9;
use crate::fourier::FourierSpec;
use crate::numerics::KahanSum;
use crate::pipeline::PrimeEvent;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RaceConfig {
    /// First geometric checkpoint `x₀`; also where log-densities start.
    pub checkpoint_start: f64,
    /// Checkpoints sit at `⌈x₀·rᵏ⌉`.
    pub checkpoint_ratio: f64,
    /// Left end of the logarithmic average of `E_φ₁(e^y)` and `F_φ₂(e^y)`.
    pub average_from: f64,
}

impl Default for RaceConfig {
    fn default() -> Self {
        RaceConfig { checkpoint_start: 100.0, checkpoint_ratio: 1.01, average_from: 1e3 }
    }
}

impl RaceConfig {
    pub fn validate(&self) -> Result<(), RaceError> {
        if self.checkpoint_ratio.is_nan() || self.checkpoint_ratio <= 1.0 {
            return Err(RaceError::Config(format!("checkpoint ratio must exceed 1, got {}", self.checkpoint_ratio)));
        }
        if self.checkpoint_start.is_nan() || self.checkpoint_start < 2.0 {
            return Err(RaceError::Config(format!("checkpoint start must be >= 2, got {}", self.checkpoint_start)));
        }
        if self.average_from.is_nan() || self.average_from < 2.0 {
            return Err(RaceError::Config(format!("average start must be >= 2, got {}", self.average_from)));
        }
        Ok(())
    }
}

/// One row of `race.csv`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Checkpoint {
    pub x: u64,
    pub d1: i64,
    pub d2: i64,
    pub e_phi1: f64,
    pub f_phi2: f64,
}

/// Geometric checkpoint positions, strictly increasing.
#[derive(Debug, Clone)]
struct CheckpointGrid {
    start: f64,
    ratio: f64,
    k: i32,
    next: u64,
}

impl CheckpointGrid {
    fn new(start: f64, ratio: f64) -> Self {
        CheckpointGrid { start, ratio, k: 0, next: start.ceil() as u64 }
    }

    fn peek(&self) -> u64 {
        self.next
    }

    fn bump(&mut self) {
        let prev = self.next;
        while self.next <= prev {
            self.k += 1;
            self.next = (self.start * self.ratio.powi(self.k)).ceil() as u64;
        }
    }
}

/// Accumulates `D₁`, `D₂`, `Σφ₁(θ_p)` and `Σ±φ₂(θ_p)` along an ascending stream.
#[derive(Debug, Clone)]
pub struct RaceRunner {
    config: RaceConfig,
    phi1: FourierSpec,
    phi2: FourierSpec,
    d1: RaceSeries,
    d2: RaceSeries,
    last_p: u64,
    primes: u64,
    split_primes: u64,
    sum_phi1: KahanSum,
    sum_phi2_1mod8: KahanSum,
    sum_phi2_5mod8: KahanSum,
    grid: CheckpointGrid,
    checkpoints: Vec<Checkpoint>,
    avg_x: f64,
    avg_e: KahanSum,
    avg_f: KahanSum,
}

/// `∫_{u0}^{u1} u·e^{−u/2} du`, the weight of `(log x/√x)` in `d(log x)`.
fn normalized_weight(u0: f64, u1: f64) -> f64 {
    let antiderivative = |u: f64| -2.0 * (u + 2.0) * (-0.5 * u).exp();
    antiderivative(u1) - antiderivative(u0)
}

impl RaceRunner {
    pub fn new(config: RaceConfig) -> Result<Self, RaceError> {
        config.validate()?;
        Ok(RaceRunner {
            config,
            phi1: FourierSpec::phi1(0),
            phi2: FourierSpec::phi2(0),
            d1: RaceSeries::new(2.0, 0, config.checkpoint_start),
            d2: RaceSeries::new(2.0, 0, config.checkpoint_start),
            last_p: 0,
            primes: 0,
            split_primes: 0,
            sum_phi1: KahanSum::new(),
            sum_phi2_1mod8: KahanSum::new(),
            sum_phi2_5mod8: KahanSum::new(),
            grid: CheckpointGrid::new(config.checkpoint_start, config.checkpoint_ratio),
            checkpoints: Vec::new(),
            avg_x: config.average_from,
            avg_e: KahanSum::new(),
            avg_f: KahanSum::new(),
        })
    }

    pub fn d1(&self) -> i64 {
        self.d1.value()
    }

    pub fn d2(&self) -> i64 {
        self.d2.value()
    }

    pub fn checkpoints(&self) -> &[Checkpoint] {
        &self.checkpoints
    }

    fn accumulate_average(&mut self, x: f64) {
        if x > self.avg_x {
            let w = normalized_weight(self.avg_x.ln(), x.ln());
            self.avg_e.add(self.d1.value() as f64 * w);
            self.avg_f.add(self.d2.value() as f64 * w);
            self.avg_x = x;
        }
    }

    /// Emits every checkpoint strictly below `x`.
    fn checkpoints_below(&mut self, x: u64) -> Result<(), RaceError> {
        while self.grid.peek() < x {
            let cx = self.grid.peek();
            self.record_checkpoint(cx)?;
            self.grid.bump();
        }
        Ok(())
    }

    fn record_checkpoint(&mut self, x: u64) -> Result<(), RaceError> {
        let xf = x as f64;
        self.d1.checkpoint(xf)?;
        self.d2.checkpoint(xf)?;
        let e = e_phi(xf, self.sum_phi1.value(), &self.phi1)?;
        let f = f_phi(xf, self.sum_phi2_1mod8.value(), self.sum_phi2_5mod8.value());
        self.checkpoints.push(Checkpoint { x, d1: self.d1.value(), d2: self.d2.value(), e_phi1: e, f_phi2: f });
        Ok(())
    }

    fn admit(&mut self, p: u64) -> Result<(), RaceError> {
        if p <= self.last_p {
            return Err(RaceError::OutOfOrder { prev: self.last_p as f64, got: p as f64 });
        }
        self.checkpoints_below(p)?;
        self.accumulate_average(p as f64);
        self.last_p = p;
        self.primes += 1;
        Ok(())
    }

    /// Adds one split prime.
    pub fn update_races(&mut self, ap: &AnglePrime) -> Result<(), RaceError> {
        self.admit(ap.p)?;
        self.split_primes += 1;
        let x = ap.p as f64;
        self.d1.add(x, ap.d1_weight())?;
        self.d2.add(x, ap.d2_weight())?;
        self.sum_phi1.add(self.phi1.eval_exact(ap.theta));
        let v = self.phi2.eval_exact(ap.theta);
        if ap.class8 == 1 {
            self.sum_phi2_1mod8.add(v);
        } else {
            self.sum_phi2_5mod8.add(v);
        }
        Ok(())
    }

    /// Adds a prime that does not split (`2` or `≡ 3 mod 4`); the races do not move.
    pub fn observe_inert(&mut self, p: u64) -> Result<(), RaceError> {
        self.admit(p)
    }

    pub fn update(&mut self, event: &PrimeEvent) -> Result<(), RaceError> {
        match event {
            PrimeEvent::Split(ap) => self.update_races(ap),
            PrimeEvent::Other(p) => self.observe_inert(*p),
        }
    }

    /// Closes the run at `limit` (no later prime may exist below it).
    pub fn finish(mut self, limit: u64) -> Result<RaceReport, RaceError> {
        if limit < self.last_p {
            return Err(RaceError::OutOfOrder { prev: self.last_p as f64, got: limit as f64 });
        }
        self.checkpoints_below(limit + 1)?;
        let x = limit as f64;
        self.d1.advance(x)?;
        self.d2.advance(x)?;
        self.accumulate_average(x);
        let span = x.ln() - self.config.average_from.ln();
        let (avg_e, avg_f) = if span > 0.0 {
            (Some(self.avg_e.value() / span), Some(self.avg_f.value() / span))
        } else {
            (None, None)
        };
        Ok(RaceReport {
            config: self.config,
            limit,
            primes: self.primes,
            split_primes: self.split_primes,
            final_e_phi1: normalizer(x) * self.sum_phi1.value(),
            final_f_phi2: f_phi(x, self.sum_phi2_1mod8.value(), self.sum_phi2_5mod8.value()),
            d1: self.d1,
            d2: self.d2,
            checkpoints: self.checkpoints,
            log_average_e_phi1: avg_e,
            log_average_f_phi2: avg_f,
        })
    }
}

#[derive(Debug, Clone)]
pub struct RaceReport {
    pub config: RaceConfig,
    pub limit: u64,
    pub primes: u64,
    pub split_primes: u64,
    pub d1: RaceSeries,
    pub d2: RaceSeries,
    pub checkpoints: Vec<Checkpoint>,
    pub final_e_phi1: f64,
    pub final_f_phi2: f64,
    /// `(1/Y)∫ E_φ₁(e^y) dy` over `[log average_from, log limit]`.
    pub log_average_e_phi1: Option<f64>,
    pub log_average_f_phi2: Option<f64>,
}

impl RaceReport {
    pub fn density(&self, which: Which, predicate: Predicate) -> Result<(f64, f64), RaceError> {
        match which {
            Which::D1 => self.d1.log_density(predicate),
            Which::D2 => self.d2.log_density(predicate),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Which {
    D1,
    D2,
}

pub const RACE_CSV_HEADER: &str = "x,D1,D2,E_phi1,F_phi2";
pub const SIGNCHANGES_CSV_HEADER: &str = "function,x";

pub fn write_race_csv<W: Write>(w: &mut W, checkpoints: &[Checkpoint]) -> std::io::Result<()> {
    writeln!(w, "{RACE_CSV_HEADER}")?;
    for c in checkpoints {
        writeln!(w, "{},{},{},{},{}", c.x, c.d1, c.d2, sig9(c.e_phi1), sig9(c.f_phi2))?;
    }
    Ok(())
}

pub fn write_signchanges_csv<W: Write>(w: &mut W, d1: &RaceSeries, d2: &RaceSeries) -> std::io::Result<()> {
    writeln!(w, "{SIGNCHANGES_CSV_HEADER}")?;
    for (name, series) in [("D1", d1), ("D2", d2)] {
        for x in series.sign_changes() {
            writeln!(w, "{name},{}", *x as u64)?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomp::angle_prime;
    use crate::decomp::is_prime;

    fn run(primes: &[u64], limit: u64) -> RaceReport {
        let mut r = RaceRunner::new(RaceConfig::default()).unwrap();
        for &p in primes {
            if p % 4 == 1 {
                r.update_races(&angle_prime(p).unwrap()).unwrap();
            } else {
                r.observe_inert(p).unwrap();
            }
        }
        r.finish(limit).unwrap()
    }

    #[test]
    fn hand_enumerated_races() {
        let r = run(&[2, 3, 5, 7, 11, 13], 13);
        assert_eq!(r.d1.value(), 0);
        let r = run(&[2, 3, 5, 7, 11, 13, 17], 17);
        assert_eq!(r.d1.value(), -1);
        let r = run(&[5, 13, 17, 29, 37, 41], 41);
        assert_eq!(r.d2.value(), 4);
    }

    #[test]
    fn rejects_out_of_order() {
        let mut r = RaceRunner::new(RaceConfig::default()).unwrap();
        r.update_races(&angle_prime(13).unwrap()).unwrap();
        assert!(matches!(r.update_races(&angle_prime(5).unwrap()), Err(RaceError::OutOfOrder { .. })));
        assert!(matches!(r.observe_inert(13), Err(RaceError::OutOfOrder { .. })));
    }

    #[test]
    fn inert_primes_leave_races_unchanged() {
        let mut r = RaceRunner::new(RaceConfig::default()).unwrap();
        r.update_races(&angle_prime(5).unwrap()).unwrap();
        let (d1, d2) = (r.d1(), r.d2());
        r.observe_inert(7).unwrap();
        r.observe_inert(11).unwrap();
        assert_eq!((r.d1(), r.d2()), (d1, d2));
    }

    #[test]
    fn checkpoints_are_geometric_and_identities_hold() {
        let primes: Vec<u64> = (2..200_000).filter(|&n| is_prime(n)).collect();
        let r = run(&primes, 200_000);
        let xs: Vec<u64> = r.checkpoints.iter().map(|c| c.x).collect();
        assert_eq!(&xs[..4], &[100, 101, 103, 104]);
        assert!(xs.windows(2).all(|w| w[0] < w[1]));
        assert!(*xs.last().unwrap() <= 200_000);
        for c in &r.checkpoints {
            let n = normalizer(c.x as f64);
            assert!((c.e_phi1 - n * c.d1 as f64).abs() <= 1e-12 * (n * c.d1 as f64).abs());
            assert!((c.f_phi2 - n * c.d2 as f64).abs() <= 1e-12 * (n * c.d2 as f64).abs());
        }
    }

    #[test]
    fn empty_config_rejected() {
        let bad = RaceConfig { checkpoint_ratio: 1.0, ..RaceConfig::default() };
        assert!(RaceRunner::new(bad).is_err());
    }

    #[test]
    fn weight_integral_matches_quadrature() {
        let q = crate::quad::integrate_default(|u: f64| u * (-0.5 * u).exp(), 3.0, 9.0).unwrap().value;
        assert!((normalized_weight(3.0, 9.0) - q).abs() < 1e-13);
    }
}
