//! Race functions along the prime stream.
//!
//! [`RaceSeries`] is a right-continuous integer step function of `x` that
//! tracks its sign changes and the logarithmic measure of `{x : value > 0}`
//! and `{x : value < 0}`. [`RaceRunner`] drives `D₁` and `D₂` from a stream of
//! [`PrimeEvent`](crate::PrimeEvent)s and samples `E_φ₁`, `F_φ₂` at
//! geometric checkpoints.

mod hist;
mod li;
mod runner;

pub use hist::{AngleHistogram, AngleKind, HistRow, HistogramSpec, HIST_CSV_HEADER};
pub use li::{li, li_offset, li_two};
pub use runner::{
    write_race_csv, write_signchanges_csv, Checkpoint, RaceConfig, RaceReport, RaceRunner, Which, RACE_CSV_HEADER,
    SIGNCHANGES_CSV_HEADER,
};

use thiserror::Error;

use crate::fourier::FourierSpec;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RaceError {
    #[error("prime {got} arrived after {prev}; the stream must be ascending")]
    OutOfOrder { prev: f64, got: f64 },
    #[error("series has no positive log-measure to average over")]
    EmptySeries,
    #[error("li(x) requires x >= 2, got {0}")]
    LiDomain(f64),
    #[error("invalid race configuration: {0}")]
    Config(String),
    #[error("invalid histogram: {0}")]
    Histogram(String),
}

/// Which set a logarithmic density is taken of.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Predicate {
    Positive,
    NonNegative,
    Negative,
}

/// An integer step function of `x`, observed from left to right.
#[derive(Debug, Clone, PartialEq)]
pub struct RaceSeries {
    origin: f64,
    first_x: f64,
    current_x: f64,
    current_value: i64,
    last_sign: i64,
    min_value: i64,
    max_value: i64,
    log_pos: f64,
    log_neg: f64,
    sign_changes: Vec<f64>,
    checkpoints: Vec<(f64, i64)>,
}

impl RaceSeries {
    /// A series equal to `value` from `first_x` on, whose log-measures are
    /// integrated over `[origin, ∞)`.
    pub fn new(first_x: f64, value: i64, origin: f64) -> Self {
        RaceSeries {
            origin,
            first_x,
            current_x: first_x,
            current_value: value,
            last_sign: value.signum(),
            min_value: value,
            max_value: value,
            log_pos: 0.0,
            log_neg: 0.0,
            sign_changes: Vec::new(),
            checkpoints: Vec::new(),
        }
    }

    /// Integrate the current value up to `x` without changing it.
    pub fn advance(&mut self, x: f64) -> Result<(), RaceError> {
        if x < self.current_x {
            return Err(RaceError::OutOfOrder { prev: self.current_x, got: x });
        }
        let lo = self.current_x.max(self.origin);
        if x > lo {
            let dlog = x.ln() - lo.ln();
            match self.current_value.signum() {
                1 => self.log_pos += dlog,
                -1 => self.log_neg += dlog,
                _ => {}
            }
        }
        self.current_x = x;
        Ok(())
    }

    /// The value becomes `value` at `x` (inclusive).
    pub fn step(&mut self, x: f64, value: i64) -> Result<(), RaceError> {
        self.advance(x)?;
        self.current_value = value;
        self.min_value = self.min_value.min(value);
        self.max_value = self.max_value.max(value);
        let s = value.signum();
        if s != 0 {
            if self.last_sign != 0 && s != self.last_sign {
                self.sign_changes.push(x);
            }
            self.last_sign = s;
        }
        Ok(())
    }

    pub fn add(&mut self, x: f64, delta: i64) -> Result<(), RaceError> {
        self.step(x, self.current_value + delta)
    }

    /// Records `(x, value(x))` after advancing to `x`.
    pub fn checkpoint(&mut self, x: f64) -> Result<(), RaceError> {
        self.advance(x)?;
        if self.checkpoints.last().is_none_or(|&(last, _)| x > last) {
            self.checkpoints.push((x, self.current_value));
        }
        Ok(())
    }

    pub fn value(&self) -> i64 {
        self.current_value
    }

    pub fn current_x(&self) -> f64 {
        self.current_x
    }

    pub fn first_x(&self) -> f64 {
        self.first_x
    }

    pub fn origin(&self) -> f64 {
        self.origin
    }

    pub fn min_value(&self) -> i64 {
        self.min_value
    }

    pub fn max_value(&self) -> i64 {
        self.max_value
    }

    pub fn sign_changes(&self) -> &[f64] {
        &self.sign_changes
    }

    pub fn checkpoints(&self) -> &[(f64, i64)] {
        &self.checkpoints
    }

    pub fn logpos_measure(&self) -> f64 {
        self.log_pos
    }

    pub fn logneg_measure(&self) -> f64 {
        self.log_neg
    }

    /// Total log-length integrated so far.
    pub fn log_span(&self) -> f64 {
        let lo = self.first_x.max(self.origin);
        if self.current_x > lo {
            self.current_x.ln() - lo.ln()
        } else {
            0.0
        }
    }

    /// Fraction of `[log x₀, log X]` on which the predicate holds, as
    /// `(lower, upper)`. Stretches where the value is exactly zero count
    /// only towards `upper` for strict predicates.
    pub fn log_density(&self, predicate: Predicate) -> Result<(f64, f64), RaceError> {
        let span = self.log_span();
        if span <= 0.0 {
            return Err(RaceError::EmptySeries);
        }
        let zero = (span - self.log_pos - self.log_neg).max(0.0);
        let (lower, upper) = match predicate {
            Predicate::Positive => (self.log_pos, self.log_pos + zero),
            Predicate::NonNegative => (self.log_pos + zero, self.log_pos + zero),
            Predicate::Negative => (self.log_neg, self.log_neg + zero),
        };
        Ok(((lower / span).clamp(0.0, 1.0), (upper / span).clamp(0.0, 1.0)))
    }
}

/// `(log x/√x)·(Σ_{p≤x, p≡1(4)} φ(θ_p) − c₀(φ)·Li(x)/2)`.
pub fn e_phi(x: f64, partial_sum: f64, phi: &FourierSpec) -> Result<f64, RaceError> {
    if x < 2.0 {
        return Err(RaceError::LiDomain(x));
    }
    let c0 = phi.coeff(0);
    let main = if c0 == 0.0 { 0.0 } else { 0.5 * c0 * li(x)? };
    Ok(normalizer(x) * (partial_sum - main))
}

/// `(log x/√x)·(Σ_{p≡1(8)} φ(θ_p) − Σ_{p≡5(8)} φ(θ_p))`.
pub fn f_phi(x: f64, partial_sum_1mod8: f64, partial_sum_5mod8: f64) -> f64 {
    normalizer(x) * (partial_sum_1mod8 - partial_sum_5mod8)
}

/// `log x / √x`.
pub fn normalizer(x: f64) -> f64 {
    x.ln() / x.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    #[test]
    fn constant_series_has_full_density() {
        let mut s = RaceSeries::new(1.0, 1, 1.0);
        s.advance(1e6).unwrap();
        assert_eq!(s.log_density(Predicate::Positive).unwrap(), (1.0, 1.0));
        assert_eq!(s.log_density(Predicate::Negative).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn interval_density() {
        let mut s = RaceSeries::new(1.0, -1, 1.0);
        s.step(E, 1).unwrap();
        s.step(E * E, -1).unwrap();
        s.advance(E.powi(4)).unwrap();
        let (lo, hi) = s.log_density(Predicate::Positive).unwrap();
        assert!((lo - 0.25).abs() < 1e-12 && (hi - 0.25).abs() < 1e-12);
        assert_eq!(s.sign_changes(), &[E, E * E]);
    }

    #[test]
    fn zero_stretches_split_lower_and_upper() {
        let mut s = RaceSeries::new(1.0, 0, 1.0);
        s.step(E, 1).unwrap();
        s.advance(E * E).unwrap();
        let (lo, hi) = s.log_density(Predicate::Positive).unwrap();
        assert!((lo - 0.5).abs() < 1e-12 && (hi - 1.0).abs() < 1e-12);
        let (lo, hi) = s.log_density(Predicate::NonNegative).unwrap();
        assert!((lo - 1.0).abs() < 1e-12 && (hi - 1.0).abs() < 1e-12);
        assert!(s.logpos_measure() + s.logneg_measure() <= s.log_span() + 1e-15);
    }

    #[test]
    fn zero_does_not_count_as_sign_change() {
        let mut s = RaceSeries::new(2.0, -1, 2.0);
        for (x, v) in [(3.0, 0), (4.0, -1), (5.0, 0), (6.0, 1), (7.0, 0), (8.0, 1)] {
            s.step(x, v).unwrap();
        }
        assert_eq!(s.sign_changes(), &[6.0]);
        assert_eq!((s.min_value(), s.max_value()), (-1, 1));
    }

    #[test]
    fn origin_clips_measure() {
        let mut s = RaceSeries::new(2.0, -1, 100.0);
        s.step(50.0, 1).unwrap();
        s.advance(1000.0).unwrap();
        assert_eq!(s.logneg_measure(), 0.0);
        assert!((s.logpos_measure() - 10f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn out_of_order_is_an_error() {
        let mut s = RaceSeries::new(2.0, 0, 2.0);
        s.step(10.0, 1).unwrap();
        assert!(matches!(s.step(5.0, 2), Err(RaceError::OutOfOrder { .. })));
    }

    #[test]
    fn empty_series() {
        let s = RaceSeries::new(100.0, 1, 100.0);
        assert_eq!(s.log_density(Predicate::Positive), Err(RaceError::EmptySeries));
    }

    #[test]
    fn e_phi_special_cases() {
        let zero = FourierSpec::from_coefficients(vec![0.0; 4]);
        assert_eq!(e_phi(1e5, 0.0, &zero).unwrap(), 0.0);
        let one = FourierSpec::from_coefficients(vec![1.0]);
        let x = 1e4;
        let split = 609.0; // π(10⁴; 4, 1)
        let expected = normalizer(x) * (split - li(x).unwrap() / 2.0);
        assert!((e_phi(x, split, &one).unwrap() - expected).abs() < 1e-12);
        assert!(e_phi(1.5, 0.0, &one).is_err());
        assert_eq!(f_phi(100.0, 0.0, 0.0), 0.0);
    }
}
