//! Cosine expansions of even `2π`-periodic test functions, the closed form
//! of the block exponential sum, and principal-value integrals against the
//! two secondary-term kernels.
//!
//! Convention: `φ(θ) = Σ_{m≥0} c_m cos(mθ)` with `c₀ = (1/π)∫₀^π φ` and
//! `c_m = (2/π)∫₀^π φ(t) cos(mt) dt` for `m ≥ 1`.

mod lemma;
mod pv;

pub use lemma::dirichlet_block_sum;
pub use pv::{pv_secondary_integral, pv_secondary_integral_with, Kernel, PvOptions, PvValue};

use std::f64::consts::PI;
use std::io::Read;

use thiserror::Error;

use crate::quad::{integrate_pieces, QuadError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FourierError {
    #[error("t = {t} is a pole of the block sum for q = {q}")]
    Pole { q: u64, t: f64 },
    #[error(transparent)]
    Quadrature(#[from] QuadError),
    #[error("principal value diverges (direction {direction:+}); last excision estimate {last_estimate}")]
    Divergent { direction: f64, last_estimate: f64 },
    #[error("invalid coefficient file: {0}")]
    Parse(String),
}

/// `num / (den·π)`, exact until it is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PiRational {
    pub num: i64,
    pub den: i64,
}

impl PiRational {
    pub const ZERO: PiRational = PiRational { num: 0, den: 1 };

    pub fn value(self) -> f64 {
        self.num as f64 / (self.den as f64 * PI)
    }
}

/// `c_m(φ₁)` for `φ₁ = 1_{[0,π/4]∪[3π/4,π]} − 1_{(π/4,3π/4)}`.
pub fn coeff_phi1(m: u64) -> PiRational {
    match m % 8 {
        2 => PiRational { num: 8, den: m as i64 },
        6 => PiRational { num: -8, den: m as i64 },
        _ => PiRational::ZERO,
    }
}

/// `c_m(φ₂)` for `φ₂ = 1_{[0,π/2]} − 1_{(π/2,π]}`.
pub fn coeff_phi2(m: u64) -> PiRational {
    match m % 4 {
        1 => PiRational { num: 4, den: m as i64 },
        3 => PiRational { num: -4, den: m as i64 },
        _ => PiRational::ZERO,
    }
}

/// Numerical cosine coefficient of an even function given on `[0, π]`.
/// `jumps` lists the discontinuities inside `(0, π)`.
pub fn coeff_numeric<F: Fn(f64) -> f64>(phi: F, m: u64, jumps: &[f64]) -> Result<f64, FourierError> {
    let mut points = vec![0.0];
    let mut inner: Vec<f64> = jumps.iter().copied().filter(|&t| t > 0.0 && t < PI).collect();
    inner.sort_by(f64::total_cmp);
    points.extend(inner);
    points.push(PI);
    let mf = m as f64;
    let integral = integrate_pieces(|t| phi(t) * (mf * t).cos(), &points, 1e-12)?;
    let scale = if m == 0 { 1.0 / PI } else { 2.0 / PI };
    Ok(scale * integral.value)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FourierKind {
    Phi1,
    Phi2,
    Custom,
}

/// An even `2π`-periodic test function through its cosine coefficients,
/// truncated at `m ≤ N`.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierSpec {
    kind: FourierKind,
    truncation: u64,
    custom: Vec<f64>,
}

impl FourierSpec {
    pub fn phi1(truncation: u64) -> Self {
        FourierSpec { kind: FourierKind::Phi1, truncation, custom: Vec::new() }
    }

    pub fn phi2(truncation: u64) -> Self {
        FourierSpec { kind: FourierKind::Phi2, truncation, custom: Vec::new() }
    }

    /// `coeffs[m] = c_m`; the truncation is the last index.
    pub fn from_coefficients(coeffs: Vec<f64>) -> Self {
        let truncation = coeffs.len().saturating_sub(1) as u64;
        FourierSpec { kind: FourierKind::Custom, truncation, custom: coeffs }
    }

    /// Parses `m,c_m` rows (header optional). Unlisted `m` are zero.
    pub fn from_csv<R: Read>(reader: R) -> Result<Self, FourierError> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_reader(reader);
        let mut pairs = Vec::new();
        for (line, record) in rdr.records().enumerate() {
            let record = record.map_err(|e| FourierError::Parse(e.to_string()))?;
            if record.len() != 2 {
                return Err(FourierError::Parse(format!("row {}: expected 2 fields", line + 1)));
            }
            let (m, c) = (&record[0], &record[1]);
            if line == 0 && m.parse::<u64>().is_err() {
                continue; // header
            }
            let m: u64 = m.parse().map_err(|_| FourierError::Parse(format!("row {}: bad index {m:?}", line + 1)))?;
            let c: f64 = c.parse().map_err(|_| FourierError::Parse(format!("row {}: bad value {c:?}", line + 1)))?;
            if !c.is_finite() {
                return Err(FourierError::Parse(format!("row {}: coefficient is not finite", line + 1)));
            }
            pairs.push((m, c));
        }
        let max_m = pairs.iter().map(|p| p.0).max().unwrap_or(0);
        if max_m > 1 << 26 {
            return Err(FourierError::Parse(format!("index {max_m} too large")));
        }
        let mut coeffs = vec![0.0; max_m as usize + 1];
        for (m, c) in pairs {
            coeffs[m as usize] += c;
        }
        Ok(Self::from_coefficients(coeffs))
    }

    pub fn kind(&self) -> FourierKind {
        self.kind
    }

    pub fn truncation(&self) -> u64 {
        self.truncation
    }

    /// Same function with a different truncation (custom coefficients are
    /// cut or zero-padded).
    pub fn truncated(&self, n: u64) -> Self {
        let mut s = self.clone();
        s.truncation = n;
        if s.kind == FourierKind::Custom {
            s.custom.resize(n as usize + 1, 0.0);
        }
        s
    }

    /// Closed form of `c_m`, when there is one (independent of truncation).
    pub fn exact_coeff(&self, m: u64) -> Option<PiRational> {
        match self.kind {
            FourierKind::Phi1 => Some(coeff_phi1(m)),
            FourierKind::Phi2 => Some(coeff_phi2(m)),
            FourierKind::Custom => None,
        }
    }

    /// Stored `c_m`; zero beyond the truncation.
    pub fn coeff(&self, m: u64) -> f64 {
        if m > self.truncation {
            return 0.0;
        }
        match self.kind {
            FourierKind::Phi1 => coeff_phi1(m).value(),
            FourierKind::Phi2 => coeff_phi2(m).value(),
            FourierKind::Custom => self.custom.get(m as usize).copied().unwrap_or(0.0),
        }
    }

    /// `Σ_{m≤N} c_m cos(mt)`.
    pub fn eval(&self, t: f64) -> f64 {
        // cos((m+1)t) = 2cos t·cos(mt) − cos((m−1)t)
        let two_c = 2.0 * t.cos();
        let (mut prev, mut cur) = (t.cos(), 1.0); // cos(−t), cos(0)
        let mut sum = 0.0;
        for m in 0..=self.truncation {
            let c = self.coeff(m);
            if c != 0.0 {
                sum += c * cur;
            }
            let next = two_c * cur - prev;
            prev = cur;
            cur = next;
            // Re-anchor now and then so the recurrence error stays bounded.
            if m % 1024 == 1023 {
                prev = ((m as f64) * t).cos();
                cur = ((m as f64 + 1.0) * t).cos();
            }
        }
        sum
    }

    /// The function itself: the step function for the built-ins, the
    /// truncated series otherwise.
    pub fn eval_exact(&self, t: f64) -> f64 {
        let t = fold_angle(t);
        match self.kind {
            FourierKind::Phi1 => {
                if t <= PI / 4.0 || t >= 3.0 * PI / 4.0 {
                    1.0
                } else {
                    -1.0
                }
            }
            FourierKind::Phi2 => {
                if t <= PI / 2.0 {
                    1.0
                } else {
                    -1.0
                }
            }
            FourierKind::Custom => self.eval(t),
        }
    }

    /// Discontinuities in `(0, π)`.
    pub fn jumps(&self) -> &'static [f64] {
        match self.kind {
            FourierKind::Phi1 => &[PI / 4.0, 3.0 * PI / 4.0],
            FourierKind::Phi2 => &[PI / 2.0],
            FourierKind::Custom => &[],
        }
    }

    /// `Σ_{m≤N} c_m`, `Σ_{m≤N} (−1)^m c_m`.
    pub fn series_at_endpoints(&self) -> (f64, f64) {
        let mut at_zero = crate::numerics::KahanSum::new();
        let mut at_pi = crate::numerics::KahanSum::new();
        for m in 0..=self.truncation {
            let c = self.coeff(m);
            at_zero.add(c);
            at_pi.add(if m % 2 == 0 { c } else { -c });
        }
        (at_zero.value(), at_pi.value())
    }
}

/// Reduces `t` to `[0, π]` using evenness and `2π`-periodicity.
pub fn fold_angle(t: f64) -> f64 {
    let r = t.rem_euclid(2.0 * PI);
    if r > PI {
        2.0 * PI - r
    } else {
        r
    }
}
