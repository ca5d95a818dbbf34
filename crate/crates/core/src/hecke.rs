//! The two Hecke character families behind the angle races.
//!
//! `ξ_m` (frequency `m`, conductor dividing `(2+2i)`) expands the race over
//! all split primes; `ψ_m` (conductor `(4)`) separates `p ≡ 1` from
//! `p ≡ 5 mod 8`. For both we provide conductors, root numbers (closed form
//! and the finite Gauss sum they come from), orders at `s = ½` under an
//! explicit rank model, orders at `s = 1` of the second-moment L-functions,
//! and the resulting mean value of the limiting distribution.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use num_complex::Complex64;
use thiserror::Error;

use crate::fourier::{pv_secondary_integral, FourierError, FourierKind, FourierSpec, Kernel};
use crate::numerics::KahanSum;

#[derive(Debug, Error)]
pub enum HeckeError {
    #[error("invalid rank file: {0}")]
    Parse(String),
    #[error("Gauss sum for {family} m = {m} is {value}, closed form says {closed}")]
    SignMismatch { family: Family, m: u64, value: Complex64, closed: i8 },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    Xi,
    Psi,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Xi => "xi",
            Family::Psi => "psi",
        }
    }

    /// Smallest frequency with a meaningful sign.
    pub fn first_m(self) -> u64 {
        match self {
            Family::Xi => 1,
            Family::Psi => 0,
        }
    }

    /// Secondary-term kernel of the mean-value formula.
    pub fn kernel(self) -> Kernel {
        match self {
            Family::Xi => Kernel::CosOverCos2,
            Family::Psi => Kernel::HalfSec,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "xi" => Ok(Family::Xi),
            "psi" => Ok(Family::Psi),
            other => Err(format!("unknown family {other:?} (expected xi or psi)")),
        }
    }
}

/// `W(ξ_m)`: −1 exactly when `m ≡ 5, 7 mod 8`.
pub fn sign_xi(m: u64) -> i8 {
    if matches!(m % 8, 5 | 7) {
        -1
    } else {
        1
    }
}

/// `W(ψ_m)`: −1 exactly when `m ≡ 3 mod 4`.
pub fn sign_psi(m: u64) -> i8 {
    if m % 4 == 3 {
        -1
    } else {
        1
    }
}

pub fn sign(family: Family, m: u64) -> i8 {
    match family {
        Family::Xi => sign_xi(m),
        Family::Psi => sign_psi(m),
    }
}

/// Norm of the conductor `𝔣_m`.
pub fn conductor_norm(family: Family, m: u64) -> u64 {
    match family {
        Family::Xi if m % 2 == 1 => 8,
        Family::Xi if m % 4 == 2 => 4,
        Family::Xi => 1,
        Family::Psi => 16,
    }
}

/// `e^{2πi·tr(z)}` with `tr(z) = z + z̄`.
fn e_trace(z: Complex64) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * (2.0 * z.re))
}

fn ipow(z: Complex64, m: i64) -> Complex64 {
    // Exact for unit-modulus Gaussian units; powi keeps the others accurate.
    z.powi(m as i32)
}

/// The root number as the finite Gauss sum
/// `i^{−m} N(𝔣)^{−½} (γ/|γ|)^m Σ_x χ_fin(x) e^{2πi tr(x/γ)}`, `(γ) = 2𝔣`,
/// evaluated in floating point over explicit residue representatives.
pub fn gauss_sum_sign(family: Family, m: u64) -> Complex64 {
    let i = Complex64::i();
    let one = Complex64::new(1.0, 0.0);
    let mi = (m % 8) as i64;
    let units = [one, -one, i, -i];
    let (gamma, terms): (Complex64, Vec<(Complex64, Complex64)>) = match family {
        Family::Xi if m % 2 == 1 => (Complex64::new(4.0, 4.0), units.iter().map(|&x| (x, ipow(x, -mi))).collect()),
        Family::Xi if m % 4 == 2 => (Complex64::new(4.0, 0.0), [one, i].iter().map(|&x| (x, ipow(x, -mi))).collect()),
        Family::Xi => (Complex64::new(2.0, 0.0), vec![(one, one)]),
        Family::Psi => {
            let g = Complex64::new(3.0, 2.0);
            let mut reps: Vec<(Complex64, Complex64)> = units.iter().map(|&u| (u, ipow(u, -mi))).collect();
            for u in [g, -g, Complex64::new(-2.0, 3.0), Complex64::new(2.0, -3.0)] {
                // u/(3+2i) is a unit, so the quotient is exact in doubles.
                let q = u / g;
                let q = Complex64::new(q.re.round(), q.im.round());
                reps.push((u, -ipow(q, -mi)));
            }
            (Complex64::new(8.0, 0.0), reps)
        }
    };
    let norm = conductor_norm(family, m) as f64;
    let sum: Complex64 = terms.iter().map(|&(x, chi)| chi * e_trace(x / gamma)).sum();
    let infinite = ipow(gamma / gamma.norm(), mi);
    ipow(i, -mi) * infinite * sum / norm.sqrt()
}

/// Checks the closed form against the Gauss sum (tolerance 1e−10).
pub fn verified_sign(family: Family, m: u64) -> Result<i8, HeckeError> {
    let closed = sign(family, m);
    let value = gauss_sum_sign(family, m);
    if (value.re - closed as f64).abs() > 1e-10 || value.im.abs() > 1e-10 {
        return Err(HeckeError::SignMismatch { family, m, value, closed });
    }
    Ok(closed)
}

/// `ord_{s=1} L(s, χ_m^{(2)})`, zeros positive, poles negative. Same for both families.
pub fn ord_one_second_moment(_family: Family, m: u64) -> i32 {
    if m == 0 {
        -2
    } else if m % 2 == 0 {
        -1
    } else {
        1
    }
}

/// How `ord_{s=½}` is obtained.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum RankModel {
    /// `ord_{s=½} = (1 − W)/2`.
    #[default]
    Hypothesis,
    /// Explicit orders; frequencies not listed fall back to the hypothesis.
    Override(HashMap<(Family, u64), u32>),
}

impl RankModel {
    /// Reads `family,m,ord_half` rows (header required).
    pub fn from_csv<R: Read>(reader: R) -> Result<Self, HeckeError> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers = rdr.headers().map_err(|e| HeckeError::Parse(e.to_string()))?.clone();
        let expected = ["family", "m", "ord_half"];
        if headers.len() != 3 || headers.iter().zip(expected).any(|(h, e)| h != e) {
            return Err(HeckeError::Parse(format!("header must be family,m,ord_half, got {:?}", headers)));
        }
        let mut table = HashMap::new();
        for (row, record) in rdr.records().enumerate() {
            let record = record.map_err(|e| HeckeError::Parse(e.to_string()))?;
            let bad = |what: &str| HeckeError::Parse(format!("row {}: bad {what}", row + 2));
            let family: Family = record[0].parse().map_err(|_| bad("family"))?;
            let m: u64 = record[1].parse().map_err(|_| bad("m"))?;
            let ord: u32 = record[2].parse().map_err(|_| bad("ord_half"))?;
            if table.insert((family, m), ord).is_some() {
                return Err(HeckeError::Parse(format!("row {}: duplicate entry {family},{m}", row + 2)));
            }
        }
        Ok(RankModel::Override(table))
    }

    pub fn is_hypothesis(&self) -> bool {
        matches!(self, RankModel::Hypothesis)
    }

    pub fn ord_half(&self, family: Family, m: u64) -> u32 {
        let hypothesis = if sign(family, m) < 0 { 1 } else { 0 };
        match self {
            RankModel::Hypothesis => hypothesis,
            RankModel::Override(table) => table.get(&(family, m)).copied().unwrap_or(hypothesis),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CharacterInfo {
    pub family: Family,
    pub m: u64,
    pub conductor_norm: u64,
    pub w: i8,
    pub ord_half: u32,
    pub ord_one_second_moment: i32,
}

pub fn character_info(family: Family, m: u64, model: &RankModel) -> CharacterInfo {
    CharacterInfo {
        family,
        m,
        conductor_norm: conductor_norm(family, m),
        w: sign(family, m),
        ord_half: model.ord_half(family, m),
        ord_one_second_moment: ord_one_second_moment(family, m),
    }
}

pub const SIGNS_CSV_HEADER: &str = "family,m,conductor_norm,W,ord_half,ord_one_second_moment";

/// One row per frequency `first_m..=max_m`; every sign is checked against its Gauss sum.
pub fn write_signs_csv<W: Write>(out: &mut W, family: Family, max_m: u64, model: &RankModel) -> Result<(), HeckeError> {
    writeln!(out, "{SIGNS_CSV_HEADER}")?;
    for m in family.first_m()..=max_m {
        verified_sign(family, m)?;
        let c = character_info(family, m, model);
        writeln!(out, "{},{},{},{},{},{}", family, m, c.conductor_norm, c.w, c.ord_half, c.ord_one_second_moment)?;
    }
    Ok(())
}

/// Mean of the limiting distribution of `E_φ` (family `xi`) or `F_φ` (family `psi`).
#[derive(Debug, Clone, PartialEq)]
pub struct MeanValue {
    /// `−(c₀ + φ(π))/2 − Σ_{m≤N} c_m ord_{s=½}`: the `s = 1` contribution
    /// summed in closed form, the `s = ½` contribution truncated at `N`.
    pub value: f64,
    /// `½ Σ_{m≤N} c_m (ord_{s=1} − 2 ord_{s=½})`, both parts truncated.
    pub partial_sum: f64,
    /// `−c₀/2 − (φ(0)+φ(π))/4 + (1/π) PV∫₀^π φ K`: computed under the rank
    /// hypothesis only; an error when the principal value diverges.
    pub theorem: Option<Result<f64, FourierError>>,
}

/// `φ(0)` and `φ(π)` of the function itself (the truncated series for custom input).
fn endpoint_values(phi: &FourierSpec) -> (f64, f64) {
    match phi.kind() {
        FourierKind::Custom => phi.series_at_endpoints(),
        _ => (phi.eval_exact(0.0), phi.eval_exact(PI)),
    }
}

pub fn mean_value(family: Family, phi: &FourierSpec, model: &RankModel) -> MeanValue {
    let n = phi.truncation();
    let mut partial = KahanSum::new();
    let mut half = KahanSum::new();
    for m in 0..=n {
        let c = phi.coeff(m);
        if c == 0.0 {
            continue;
        }
        let ord_half = model.ord_half(family, m) as f64;
        partial.add(0.5 * c * (ord_one_second_moment(family, m) as f64 - 2.0 * ord_half));
        half.add(c * ord_half);
    }
    let c0 = phi.coeff(0);
    let (at_zero, at_pi) = endpoint_values(phi);
    let value = -(c0 + at_pi) / 2.0 - half.value();

    let theorem = model.is_hypothesis().then(|| {
        let f = |t: f64| phi.eval_exact(t);
        pv_secondary_integral(&f, phi.jumps(), family.kernel()).map(|pv| -c0 / 2.0 - (at_zero + at_pi) / 4.0 + pv.value)
    });
    MeanValue { value, partial_sum: partial.value(), theorem }
}

/// `Σ_γ |ord(γ, m)|²/(¼+γ²)` per frequency.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum ZeroSums {
    /// `(log max(𝔮_m, 3))³` with unit constant.
    #[default]
    ConductorBound,
    /// Supplied values; unlisted frequencies contribute zero.
    Table(HashMap<u64, f64>),
}

/// Analytic conductor used by the bound: `4 N(𝔣_m) (m/2 + 3)(m/2 + 4)`.
pub fn analytic_conductor(family: Family, m: u64) -> f64 {
    let k = m as f64 / 2.0;
    4.0 * conductor_norm(family, m) as f64 * (k + 3.0) * (k + 4.0)
}

/// `B² Σ_{m≤N} c_m² S_m`.
pub fn variance_upper_heuristic(family: Family, phi: &FourierSpec, sums: &ZeroSums, b: f64) -> f64 {
    let mut total = KahanSum::new();
    for m in 0..=phi.truncation() {
        let c = phi.coeff(m);
        if c == 0.0 {
            continue;
        }
        let s = match sums {
            ZeroSums::ConductorBound => analytic_conductor(family, m).max(3.0).ln().powi(3),
            ZeroSums::Table(t) => t.get(&m).copied().unwrap_or(0.0),
        };
        total.add(c * c * s);
    }
    b * b * total.value()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sign_tables() {
        assert_eq!(sign_xi(5), -1);
        assert_eq!(sign_xi(2), 1);
        assert_eq!(sign_xi(13), -1);
        assert_eq!(sign_psi(3), -1);
        assert_eq!(sign_psi(4), 1);
        assert_eq!(sign_psi(1), 1);
        let neg: Vec<u64> = (1..=16).filter(|&m| sign_xi(m) < 0).collect();
        assert_eq!(neg, vec![5, 7, 13, 15]);
    }

    #[test]
    fn gauss_sums_agree_with_closed_forms() {
        for m in 1..=200 {
            verified_sign(Family::Xi, m).unwrap();
        }
        for m in 0..=200 {
            verified_sign(Family::Psi, m).unwrap();
        }
        assert!((gauss_sum_sign(Family::Xi, 1) - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        assert!((gauss_sum_sign(Family::Xi, 7) + Complex64::new(1.0, 0.0)).norm() < 1e-12);
        assert!((gauss_sum_sign(Family::Psi, 2) - Complex64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn odd_xi_sum_matches_displayed_simplification() {
        // e^{−iπm/4}(2i − 2i^{m+1})/(2√2)
        for m in (1..40u64).step_by(2) {
            let i = Complex64::i();
            let expect = Complex64::from_polar(1.0, -PI * m as f64 / 4.0) * (2.0 * i - 2.0 * i.powi(m as i32 + 1))
                / (2.0 * 2f64.sqrt());
            assert!((gauss_sum_sign(Family::Xi, m) - expect).norm() < 1e-12, "m = {m}");
        }
    }

    #[test]
    fn conductors_and_orders() {
        assert_eq!(conductor_norm(Family::Xi, 3), 8);
        assert_eq!(conductor_norm(Family::Xi, 6), 4);
        assert_eq!(conductor_norm(Family::Xi, 8), 1);
        assert_eq!(conductor_norm(Family::Psi, 0), 16);
        assert_eq!(ord_one_second_moment(Family::Xi, 0), -2);
        assert_eq!(ord_one_second_moment(Family::Xi, 3), 1);
        assert_eq!(ord_one_second_moment(Family::Psi, 6), -1);
        for m in 0..64 {
            let c = character_info(Family::Xi, m, &RankModel::Hypothesis);
            assert_eq!(c.ord_half as i32, (1 - c.w as i32) / 2);
        }
    }

    #[test]
    fn rank_overrides() {
        let model = RankModel::from_csv("family,m,ord_half\nxi,2,2\npsi,3,0\n".as_bytes()).unwrap();
        assert_eq!(model.ord_half(Family::Xi, 2), 2);
        assert_eq!(model.ord_half(Family::Psi, 3), 0);
        assert_eq!(model.ord_half(Family::Xi, 5), 1);
        assert!(RankModel::from_csv("m,ord_half\n1,0\n".as_bytes()).is_err());
        assert!(RankModel::from_csv("family,m,ord_half\nzeta,1,0\n".as_bytes()).is_err());
        assert!(RankModel::from_csv("family,m,ord_half\nxi,1,0\nxi,1,1\n".as_bytes()).is_err());
    }

    #[test]
    fn phi1_mean_is_minus_half() {
        for n in [8u64, 100, 1000, 12345] {
            let mv = mean_value(Family::Xi, &FourierSpec::phi1(n), &RankModel::Hypothesis);
            assert!((mv.value + 0.5).abs() <= 8.0 / (PI * n as f64));
            assert!((mv.partial_sum + 0.5).abs() <= 8.0 / (PI * n as f64), "N = {n}: {}", mv.partial_sum);
            let th = mv.theorem.unwrap().unwrap();
            assert!((th + 0.5).abs() < 1e-8, "{th}");
        }
    }

    #[test]
    fn phi2_mean_grows() {
        let closed = |n: u64| 0.5 + 4.0 / PI * (3..=n).step_by(4).map(|m| 1.0 / m as f64).sum::<f64>();
        let mut prev = f64::NEG_INFINITY;
        for n in [8u64, 16, 64, 1000] {
            let mv = mean_value(Family::Psi, &FourierSpec::phi2(n), &RankModel::Hypothesis);
            assert!((mv.value - closed(n)).abs() < 1e-12);
            assert!(mv.value > prev);
            prev = mv.value;
            assert!(matches!(mv.theorem, Some(Err(FourierError::Divergent { .. }))));
        }
    }

    #[test]
    fn single_cosines() {
        // cos 2θ: c₂ = 1, W(ξ₂) = +1.
        let mv = mean_value(Family::Xi, &FourierSpec::from_coefficients(vec![0.0, 0.0, 1.0]), &RankModel::Hypothesis);
        assert!((mv.value + 0.5).abs() < 1e-15);
        assert!((mv.partial_sum + 0.5).abs() < 1e-15);
        assert!((mv.theorem.unwrap().unwrap() + 0.5).abs() < 1e-8);
        // cos 5θ: W(ξ₅) = −1.
        let mut c = vec![0.0; 6];
        c[5] = 1.0;
        let mv = mean_value(Family::Xi, &FourierSpec::from_coefficients(c), &RankModel::Hypothesis);
        assert!((mv.value + 0.5).abs() < 1e-15);
        assert!((mv.theorem.unwrap().unwrap() + 0.5).abs() < 1e-8);
        // cos 3θ against ψ: W(ψ₃) = −1.
        let mv = mean_value(Family::Psi, &FourierSpec::from_coefficients(vec![0.0, 0.0, 0.0, 1.0]), &RankModel::Hypothesis);
        assert!((mv.value + 0.5).abs() < 1e-15);
        assert!((mv.theorem.unwrap().unwrap() + 0.5).abs() < 1e-8);
    }

    #[test]
    fn overrides_disable_theorem_form() {
        let model = RankModel::Override(HashMap::from([((Family::Xi, 2), 1)]));
        let mv = mean_value(Family::Xi, &FourierSpec::from_coefficients(vec![0.0, 0.0, 1.0]), &model);
        assert!(mv.theorem.is_none());
        assert!((mv.value + 1.5).abs() < 1e-15);
    }

    #[test]
    fn variance_bound() {
        assert_eq!(variance_upper_heuristic(Family::Xi, &FourierSpec::from_coefficients(vec![0.0; 5]), &ZeroSums::ConductorBound, 1.0), 0.0);
        let sums = ZeroSums::Table(HashMap::from([(3, 1.6)]));
        let v = variance_upper_heuristic(Family::Xi, &FourierSpec::from_coefficients(vec![0.0, 0.0, 0.0, 1.0]), &sums, 1.0);
        assert!((v - 1.6).abs() < 1e-15);
        let a = variance_upper_heuristic(Family::Xi, &FourierSpec::phi1(1000), &ZeroSums::ConductorBound, 1.0);
        let b = variance_upper_heuristic(Family::Xi, &FourierSpec::phi1(100_000), &ZeroSums::ConductorBound, 1.0);
        assert!(a.is_finite() && b > a && b - a < 0.05 * a);
    }

    #[test]
    fn signs_csv() {
        let mut out = Vec::new();
        write_signs_csv(&mut out, Family::Xi, 16, &RankModel::Hypothesis).unwrap();
        let text = String::from_utf8(out).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], SIGNS_CSV_HEADER);
        assert_eq!(lines.len(), 17);
        assert_eq!(lines[5], "xi,5,8,-1,1,1");
        assert_eq!(lines[2], "xi,2,4,1,0,-1");
    }
}
