//! Zero data and the truncated limiting logarithmic distribution
//! `G(x) = m − Σ_γ 2 Re(ord(γ) x^{iγ}/(½ + iγ))`.
//!
//! Zeros are supplied externally (`m,gamma,mult` rows). Ordinates closer than
//! a merge tolerance are treated as one point of the zero set; multiplicities
//! only enter through the aggregated orders.

use std::collections::HashMap;
use std::io::{Read, Write};
use std::path::Path;

use rayon::prelude::*;
use thiserror::Error;

use crate::fmt::sig9;
use crate::numerics::{van_der_corput, KahanSum};

pub const DEFAULT_MERGE_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum ZdistError {
    #[error("zeros file line {line}: {detail}")]
    Parse { line: usize, detail: String },
    #[error("zeros file line {line}: gamma = {gamma} is not positive")]
    NonPositiveGamma { line: usize, gamma: f64 },
    #[error("duplicate zero m = {m}, gamma = {gamma}")]
    Duplicate { m: u64, gamma: f64 },
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZeroDatum {
    pub m: u64,
    pub gamma: f64,
    pub mult: u32,
}

/// Parses `m,gamma,mult` rows; the result is sorted by `gamma` (then `m`).
pub fn parse_zeros<R: Read>(reader: R, merge_tol: f64) -> Result<Vec<ZeroDatum>, ZdistError> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_reader(reader);
    let mut zeros = Vec::new();
    for (idx, record) in rdr.records().enumerate() {
        let line = idx + 1;
        let record = record.map_err(|e| ZdistError::Parse { line, detail: e.to_string() })?;
        if idx == 0 {
            if record.iter().collect::<Vec<_>>() != ["m", "gamma", "mult"] {
                return Err(ZdistError::Parse { line, detail: "header must be m,gamma,mult".into() });
            }
            continue;
        }
        if record.len() != 3 {
            return Err(ZdistError::Parse { line, detail: format!("expected 3 fields, got {}", record.len()) });
        }
        let field = |i: usize, what: &str| ZdistError::Parse { line, detail: format!("bad {what} {:?}", &record[i]) };
        let m: u64 = record[0].parse().map_err(|_| field(0, "m"))?;
        let gamma: f64 = record[1].parse().map_err(|_| field(1, "gamma"))?;
        let mult: u32 = record[2].parse().map_err(|_| field(2, "mult"))?;
        if !gamma.is_finite() {
            return Err(field(1, "gamma"));
        }
        if gamma <= 0.0 {
            return Err(ZdistError::NonPositiveGamma { line, gamma });
        }
        if mult == 0 {
            return Err(field(2, "mult"));
        }
        zeros.push(ZeroDatum { m, gamma, mult });
    }
    zeros.sort_by(|a, b| a.m.cmp(&b.m).then(a.gamma.total_cmp(&b.gamma)));
    for w in zeros.windows(2) {
        if w[0].m == w[1].m && w[1].gamma - w[0].gamma <= merge_tol {
            return Err(ZdistError::Duplicate { m: w[1].m, gamma: w[1].gamma });
        }
    }
    zeros.sort_by(|a, b| a.gamma.total_cmp(&b.gamma).then(a.m.cmp(&b.m)));
    Ok(zeros)
}

pub fn load_zeros(path: &Path) -> Result<Vec<ZeroDatum>, ZdistError> {
    parse_zeros(std::fs::File::open(path)?, DEFAULT_MERGE_TOL)
}

/// `γ ↦ ord_{S,c}(γ)`, ascending in `γ`, zero entries removed.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct AggregatedOrders {
    entries: Vec<(f64, f64)>,
}

impl AggregatedOrders {
    /// From `(γ, ord)` pairs that are already distinct.
    pub fn from_pairs(mut entries: Vec<(f64, f64)>) -> Self {
        entries.retain(|e| e.1.abs() >= 1e-12);
        entries.sort_by(|a, b| a.0.total_cmp(&b.0));
        AggregatedOrders { entries }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[(f64, f64)] {
        &self.entries
    }

    /// Restriction to `γ ≤ t`.
    pub fn truncate(&self, t: f64) -> Self {
        AggregatedOrders { entries: self.entries.iter().copied().filter(|e| e.0 <= t).collect() }
    }
}

/// `ord_{S,c}(γ) = Σ_m c_m mult(γ, m)`, clustering ordinates within `merge_tol`
/// of the smallest one in the cluster.
pub fn aggregate_ord_with<C: Fn(u64) -> f64>(zeros: &[ZeroDatum], coeff: C, merge_tol: f64) -> AggregatedOrders {
    let mut sorted = zeros.to_vec();
    sorted.sort_by(|a, b| a.gamma.total_cmp(&b.gamma));
    let mut entries: Vec<(f64, f64)> = Vec::new();
    let mut current: Option<(f64, KahanSum)> = None;
    for z in &sorted {
        let w = coeff(z.m) * z.mult as f64;
        match &mut current {
            Some((rep, sum)) if z.gamma - *rep <= merge_tol => sum.add(w),
            _ => {
                if let Some((rep, sum)) = current.take() {
                    entries.push((rep, sum.value()));
                }
                let mut sum = KahanSum::new();
                sum.add(w);
                current = Some((z.gamma, sum));
            }
        }
    }
    if let Some((rep, sum)) = current {
        entries.push((rep, sum.value()));
    }
    AggregatedOrders::from_pairs(entries)
}

pub fn aggregate_ord(zeros: &[ZeroDatum], coeffs: &HashMap<u64, f64>, merge_tol: f64) -> AggregatedOrders {
    aggregate_ord_with(zeros, |m| coeffs.get(&m).copied().unwrap_or(0.0), merge_tol)
}

/// `G` at `x = e^y`. Working in `y` keeps large arguments representable.
pub fn g_eval_log(y: f64, agg: &AggregatedOrders, mean: f64) -> f64 {
    let mut sum = KahanSum::new();
    for &(gamma, ord) in &agg.entries {
        let (s, c) = (gamma * y).sin_cos();
        // Re(e^{iγy}/(½+iγ)) = (½cos γy + γ sin γy)/(¼+γ²)
        sum.add(2.0 * ord * (0.5 * c + gamma * s) / (0.25 + gamma * gamma));
    }
    mean - sum.value()
}

pub fn g_eval(x: f64, agg: &AggregatedOrders, mean: f64) -> Result<f64, ZdistError> {
    if x.is_nan() || x <= 0.0 {
        return Err(ZdistError::Config(format!("x must be positive, got {x}")));
    }
    Ok(g_eval_log(x.ln(), agg, mean))
}

/// `2 Σ_γ ord(γ)²/(¼+γ²)`.
pub fn variance_formula(agg: &AggregatedOrders) -> f64 {
    2.0 * agg.entries.iter().map(|&(g, o)| o * o / (0.25 + g * g)).collect::<KahanSum>().value()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistBin {
    pub lo: f64,
    pub hi: f64,
    pub mass: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailMass {
    /// Distance from the sample mean, in units of the sample standard deviation.
    pub sigmas: u32,
    pub mass: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistSummary {
    pub samples: usize,
    pub mean: f64,
    pub variance: f64,
    /// Mass of `[0, ∞)`.
    pub bias: f64,
    pub histogram: Vec<DistBin>,
    pub tails: Vec<TailMass>,
}

/// Samples `G(e^y)` at `y_k = Y·vdc(k)`, `k = 1..=samples`.
pub fn simulate_distribution(
    agg: &AggregatedOrders,
    mean: f64,
    y_max: f64,
    samples: usize,
    bins: usize,
) -> Result<DistSummary, ZdistError> {
    if samples < 1000 {
        return Err(ZdistError::Config(format!("need at least 1000 samples, got {samples}")));
    }
    if !(y_max > 0.0 && y_max.is_finite()) {
        return Err(ZdistError::Config(format!("Y must be positive and finite, got {y_max}")));
    }
    if bins == 0 {
        return Err(ZdistError::Config("need at least one histogram bin".into()));
    }
    let values: Vec<f64> =
        (1..=samples as u64).into_par_iter().map(|k| g_eval_log(y_max * van_der_corput(k), agg, mean)).collect();

    let n = values.len() as f64;
    let sample_mean = values.iter().copied().collect::<KahanSum>().value() / n;
    let variance = values.iter().map(|v| (v - sample_mean).powi(2)).collect::<KahanSum>().value() / n;
    let bias = values.iter().filter(|&&v| v >= 0.0).count() as f64 / n;

    let (mut lo, mut hi) = values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    if hi - lo < 1e-12 * lo.abs().max(1.0) {
        lo -= 0.5;
        hi += 0.5;
    }
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0u64; bins];
    for &v in &values {
        let b = (((v - lo) / width) as usize).min(bins - 1);
        counts[b] += 1;
    }
    let histogram = counts
        .iter()
        .enumerate()
        .map(|(i, &c)| DistBin { lo: lo + i as f64 * width, hi: lo + (i + 1) as f64 * width, mass: c as f64 / n })
        .collect();

    let sigma = variance.sqrt();
    let tails = (1..=4)
        .map(|k| {
            let r = k as f64 * sigma;
            let beyond = if sigma > 0.0 { values.iter().filter(|&&v| (v - sample_mean).abs() > r).count() } else { 0 };
            TailMass { sigmas: k, mass: beyond as f64 / n }
        })
        .collect();

    Ok(DistSummary { samples, mean: sample_mean, variance, bias, histogram, tails })
}

pub const DIST_CSV_HEADER: &str = "bin_lo,bin_hi,mass";

pub fn write_dist_csv<W: Write>(out: &mut W, summary: &DistSummary) -> std::io::Result<()> {
    writeln!(out, "{DIST_CSV_HEADER}")?;
    for b in &summary.histogram {
        writeln!(out, "{},{},{}", sig9(b.lo), sig9(b.hi), sig9(b.mass))?;
    }
    Ok(())
}

/// `key=value` lines.
pub fn write_summary<W: Write>(out: &mut W, summary: &DistSummary) -> std::io::Result<()> {
    writeln!(out, "samples={}", summary.samples)?;
    writeln!(out, "mean={}", sig9(summary.mean))?;
    writeln!(out, "variance={}", sig9(summary.variance))?;
    writeln!(out, "bias={}", sig9(summary.bias))?;
    for t in &summary.tails {
        writeln!(out, "tail_{}sigma={}", t.sigmas, sig9(t.mass))?;
    }
    Ok(())
}
