//! Globally adaptive Gauss–Kronrod (7, 15) quadrature.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadError {
    #[error("quadrature did not converge on [{a}, {b}]: estimate {value}, error {error}")]
    NoConvergence { a: f64, b: f64, value: f64, error: f64 },
    #[error("integrand is not finite at {0}")]
    NonFinite(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
}

#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
// Gauss weights for the odd-indexed Kronrod nodes 1, 3, 5, 7.
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<(f64, f64), QuadError> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let eval = |x: f64| {
        let y = f(x);
        if y.is_finite() {
            Ok(y)
        } else {
            Err(QuadError::NonFinite(x))
        }
    };
    let fc = eval(center)?;
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = eval(center - dx)? + eval(center + dx)?;
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    Ok((kronrod * half, ((kronrod - gauss) * half).abs()))
}

/// `∫_a^b f` to within `max(abs_tol, rel_tol·|∫f|)`, bisecting the interval
/// with the largest error estimate up to `max_intervals` times.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_intervals: usize,
) -> Result<Integral, QuadError> {
    if a == b {
        return Ok(Integral { value: 0.0, error: 0.0 });
    }
    let (v, e) = gk15(&f, a, b)?;
    let mut intervals = vec![(a, b, v, e)];
    let mut value = v;
    let mut error = e;
    loop {
        if error <= abs_tol.max(rel_tol * value.abs()) {
            return Ok(Integral { value, error });
        }
        if intervals.len() >= max_intervals {
            return Err(QuadError::NoConvergence { a, b, value, error });
        }
        let worst = intervals
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .map(|(i, _)| i)
            .expect("non-empty");
        let (lo, hi, v0, e0) = intervals.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            // Cannot bisect further in floating point.
            return Err(QuadError::NoConvergence { a, b, value, error });
        }
        let (v1, e1) = gk15(&f, lo, mid)?;
        let (v2, e2) = gk15(&f, mid, hi)?;
        value += v1 + v2 - v0;
        error += e1 + e2 - e0;
        intervals.push((lo, mid, v1, e1));
        intervals.push((mid, hi, v2, e2));
        // Refresh the running sums now and then to shed accumulated rounding.
        if intervals.len() % 64 == 0 {
            value = intervals.iter().map(|t| t.2).sum();
            error = intervals.iter().map(|t| t.3).sum();
        }
    }
}

/// Default settings used across the crate: 1e-12 absolute and relative, 4000 intervals.
pub fn integrate_default<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> Result<Integral, QuadError> {
    integrate(f, a, b, 1e-12, 1e-12, 4000)
}

/// Integrates over consecutive pieces `[points[i], points[i+1]]`.
pub fn integrate_pieces<F: Fn(f64) -> f64>(f: F, points: &[f64], abs_tol: f64) -> Result<Integral, QuadError> {
    let mut total = Integral { value: 0.0, error: 0.0 };
    let pieces = points.len().saturating_sub(1).max(1) as f64;
    for w in points.windows(2) {
        let r = integrate(&f, w[0], w[1], abs_tol / pieces, 1e-13, 4000)?;
        total.value += r.value;
        total.error += r.error;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn polynomials_are_exact() {
        let r = integrate_default(|x| x.powi(5) - 3.0 * x * x + 1.0, -1.0, 2.0).unwrap();
        assert!((r.value - (64.0 / 6.0 - 1.0 / 6.0 - 9.0 + 3.0)).abs() < 1e-13);
    }

    #[test]
    fn smooth_integrals() {
        let r = integrate_default(f64::sin, 0.0, PI).unwrap();
        assert!((r.value - 2.0).abs() < 1e-13);
        let r = integrate_default(|x| 1.0 / x, 1.0, 1e6).unwrap();
        assert!((r.value - 1e6f64.ln()).abs() < 1e-10);
        let r = integrate_default(|x| (-x * x).exp(), -10.0, 10.0).unwrap();
        assert!((r.value - PI.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn endpoint_singularity_converges() {
        let r = integrate(|x: f64| x.sqrt().recip(), 0.0, 1.0, 1e-10, 1e-10, 4000).unwrap();
        assert!((r.value - 2.0).abs() < 1e-8);
    }

    #[test]
    fn budget_exhaustion_and_bad_values_are_errors() {
        let r = integrate(|x: f64| (1000.0 * x).sin(), 0.0, 10.0, 1e-12, 1e-12, 4);
        assert!(matches!(r, Err(QuadError::NoConvergence { .. })));
        let r = integrate(|x: f64| if x > 0.3 { f64::NAN } else { 1.0 }, 0.0, 1.0, 1e-12, 1e-12, 100);
        assert!(matches!(r, Err(QuadError::NonFinite(_))));
    }
}
