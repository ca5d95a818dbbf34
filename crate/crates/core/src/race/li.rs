use std::sync::OnceLock;

use super::RaceError;
use crate::quad::integrate;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_606_512_090_082_402_431;

/// `li(2)` from Ramanujan's series, evaluated once.
pub fn li_two() -> f64 {
    static VALUE: OnceLock<f64> = OnceLock::new();
    *VALUE.get_or_init(|| ramanujan_li(2.0))
}

/// `li(x) = γ + ln ln x + √x Σ_{n≥1} (−1)^{n−1}(ln x)^n/(n!·2^{n−1}) Σ_{k<⌈n/2⌉} 1/(2k+1)`.
fn ramanujan_li(x: f64) -> f64 {
    let l = x.ln();
    let mut sum = 0.0;
    let mut term = 1.0; // (ln x)^n / (n! 2^{n-1}) with sign
    let mut inner = 0.0;
    for n in 1..200u32 {
        term *= if n == 1 { l } else { -l / (2.0 * n as f64) };
        if n % 2 == 1 {
            inner += 1.0 / n as f64;
        }
        let contribution = term * inner;
        sum += contribution;
        if contribution.abs() < 1e-18 * sum.abs() {
            break;
        }
    }
    EULER_GAMMA + l.ln() + x.sqrt() * sum
}

/// `∫₂^x dt / log t`, integrated in `u = log t` to tame the range.
pub fn li_offset(x: f64) -> Result<f64, RaceError> {
    if x.is_nan() || x < 2.0 {
        return Err(RaceError::LiDomain(x));
    }
    let (a, b) = (std::f64::consts::LN_2, x.ln());
    integrate(|u: f64| u.exp() / u, a, b, 0.0, 1e-13, 4000)
        .map(|r| r.value)
        .map_err(|_| RaceError::LiDomain(x))
}

/// Logarithmic integral `li(x)` for `x ≥ 2`.
pub fn li(x: f64) -> Result<f64, RaceError> {
    Ok(li_two() + li_offset(x)?)
}
