//! Decomposition of split primes `p = a² + 4b²` and their normalized angles.

use std::f64::consts::PI;
use std::io::Write;

use thiserror::Error;

use crate::fmt::sig9;
use crate::gint::{normalize_generator, GintError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecompError {
    #[error("{p} is not congruent to 1 mod 4")]
    NotSplit { p: u64 },
    #[error("{p} is not prime")]
    NotPrime { p: u64 },
    #[error("decomposition of {p} failed verification: {detail}")]
    Verification { p: u64, detail: String },
    #[error(transparent)]
    Gint(#[from] GintError),
}

impl DecompError {
    pub fn is_internal(&self) -> bool {
        matches!(self, DecompError::Verification { .. } | DecompError::Gint(GintError::Malformed { .. }))
    }
}

/// A split prime with the coordinates of its normalized generator `a + 2bi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnglePrime {
    pub p: u64,
    /// Real part of the normalized generator (odd, signed).
    pub a: i64,
    /// Imaginary part of the normalized generator (even, positive).
    pub two_b: i64,
    /// `arg(a + 2bi)` in `(0, π)`.
    pub theta: f64,
    /// `theta` for `p ≡ 1 mod 8`, `π − theta` for `p ≡ 5 mod 8`.
    pub theta_tilde: f64,
    /// `p mod 8`, either 1 or 5.
    pub class8: u8,
}

impl AnglePrime {
    /// Sign of `|a| − |2b|`; never zero because `a` is odd and `2b` even.
    pub fn d1_weight(&self) -> i64 {
        if self.a.unsigned_abs() > self.two_b.unsigned_abs() {
            1
        } else {
            -1
        }
    }

    /// `+1` when `|a| ≡ 1 mod 4`, `−1` when `|a| ≡ 3 mod 4`.
    pub fn d2_weight(&self) -> i64 {
        if self.a.unsigned_abs() % 4 == 1 {
            1
        } else {
            -1
        }
    }
}

#[inline]
pub(crate) fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub(crate) fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Jacobi symbol `(a/n)` for odd `n`.
pub(crate) fn jacobi(mut a: u64, mut n: u64) -> i32 {
    debug_assert!(n % 2 == 1);
    a %= n;
    let mut result = 1;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            if matches!(n % 8, 3 | 5) {
                result = -result;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            result = -result;
        }
        a %= n;
    }
    if n == 1 {
        result
    } else {
        0
    }
}

/// Deterministic Miller–Rabin for all 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &q in &BASES {
        if n % q == 0 {
            return n == q;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Rejects anything that is not a prime `≡ 1 mod 4`.
pub fn validate_split_prime(p: u64) -> Result<(), DecompError> {
    if p % 4 != 1 {
        return Err(DecompError::NotSplit { p });
    }
    if !is_prime(p) {
        return Err(DecompError::NotPrime { p });
    }
    Ok(())
}

/// The smaller square root of `−1` modulo a prime `p ≡ 1 mod 4`.
///
/// Raises the least quadratic non-residue `g` to `(p − 1)/4`. Primality is
/// not tested here; a composite input is caught when the root fails to
/// square to `−1` (or no non-residue turns up), see [`validate_split_prime`]
/// for an explicit check.
pub fn sqrt_minus_one(p: u64) -> Result<u64, DecompError> {
    if p % 4 != 1 || p < 5 {
        return Err(DecompError::NotSplit { p });
    }
    let mut g = 2u64;
    loop {
        match jacobi(g, p) {
            -1 => break,
            0 => return Err(DecompError::NotPrime { p }),
            _ => {}
        }
        g += 1;
        if g >= p || g > 1 << 20 {
            return Err(DecompError::NotPrime { p });
        }
    }
    let r = pow_mod(g, (p - 1) / 4, p);
    if mul_mod(r, r, p) != p - 1 {
        return Err(DecompError::NotPrime { p });
    }
    Ok(r.min(p - r))
}

/// `p = a0² + 4·b0²` with `a0, b0 > 0`, by the Euclidean descent on `(p, √−1 mod p)`.
pub fn two_squares(p: u64) -> Result<(u64, u64), DecompError> {
    let r = sqrt_minus_one(p)?;
    let (mut x, mut y) = (p, r);
    while (y as u128) * (y as u128) > p as u128 {
        (x, y) = (y, x % y);
    }
    let _ = x;
    let u = y;
    let rest = p - u * u;
    let v = rest.isqrt();
    if v * v != rest {
        return Err(DecompError::Verification { p, detail: format!("{p} - {u}^2 is not a square") });
    }
    let (odd, even) = if u % 2 == 1 { (u, v) } else { (v, u) };
    if odd % 2 != 1 || even % 2 != 0 || even == 0 {
        return Err(DecompError::Verification { p, detail: format!("{u}^2 + {v}^2 has wrong parity") });
    }
    let (a0, b0) = (odd, even / 2);
    if (a0 as u128) * (a0 as u128) + 4 * (b0 as u128) * (b0 as u128) != p as u128 {
        return Err(DecompError::Verification { p, detail: format!("{a0}^2 + 4*{b0}^2 != {p}") });
    }
    Ok((a0, b0))
}

/// Full angle data for a split prime.
pub fn angle_prime(p: u64) -> Result<AnglePrime, DecompError> {
    let (a0, b0) = two_squares(p)?;
    let g = normalize_generator(a0 as i64, b0 as i64)?;
    let (a, two_b) = (g.re, g.im);
    let class8 = (p % 8) as u8;

    let class_ok = match class8 {
        1 => a.rem_euclid(4) == 1,
        5 => a.rem_euclid(4) == 3,
        _ => false,
    };
    if !class_ok || two_b <= 0 || g.norm() != p as u128 {
        return Err(DecompError::Verification {
            p,
            detail: format!("generator {g} inconsistent with p mod 8 = {class8}"),
        });
    }
    let theta = (two_b as f64).atan2(a as f64);
    let theta_tilde = if class8 == 1 { theta } else { PI - theta };
    Ok(AnglePrime { p, a, two_b, theta, theta_tilde, class8 })
}

pub const ANGLE_CSV_HEADER: &str = "p,a,two_b,theta,theta_tilde,class8";

pub fn write_angle_row<W: Write>(w: &mut W, ap: &AnglePrime) -> std::io::Result<()> {
    writeln!(w, "{},{},{},{},{},{}", ap.p, ap.a, ap.two_b, sig9(ap.theta), sig9(ap.theta_tilde), ap.class8)
}
