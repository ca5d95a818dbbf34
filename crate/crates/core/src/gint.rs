//! Exact Gaussian integers with 64-bit components.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GintError {
    #[error("Gaussian product overflows 64-bit components")]
    Overflow,
    #[error("cannot normalize generator for (a, b) = ({a}, {b}): {reason}")]
    Malformed { a: i64, b: i64, reason: String },
}

/// `re + im·i` in `Z[i]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct GaussInt {
    pub re: i64,
    pub im: i64,
}

impl GaussInt {
    pub const ZERO: GaussInt = GaussInt::new(0, 0);
    pub const ONE: GaussInt = GaussInt::new(1, 0);
    pub const I: GaussInt = GaussInt::new(0, 1);
    /// The modulus `(2+2i)` defining the normalization of generators.
    pub const TWO_PLUS_TWO_I: GaussInt = GaussInt::new(2, 2);
    /// `1, i, -1, -i`.
    pub const UNITS: [GaussInt; 4] = [
        GaussInt::new(1, 0),
        GaussInt::new(0, 1),
        GaussInt::new(-1, 0),
        GaussInt::new(0, -1),
    ];

    pub const fn new(re: i64, im: i64) -> Self {
        GaussInt { re, im }
    }

    /// `re² + im²`, exact for all 64-bit components.
    pub fn norm(self) -> u128 {
        let r = self.re.unsigned_abs() as u128;
        let i = self.im.unsigned_abs() as u128;
        r * r + i * i
    }

    pub fn conj(self) -> Self {
        GaussInt::new(self.re, -self.im)
    }

    pub fn checked_mul(self, rhs: Self) -> Result<Self, GintError> {
        let (a, b, c, d) = (self.re as i128, self.im as i128, rhs.re as i128, rhs.im as i128);
        let re = a * c - b * d;
        let im = a * d + b * c;
        match (i64::try_from(re), i64::try_from(im)) {
            (Ok(re), Ok(im)) => Ok(GaussInt::new(re, im)),
            _ => Err(GintError::Overflow),
        }
    }

    /// `(2+2i) | z`. Since `(2+2i) = (1+i)³`, this holds iff both parts are
    /// even and `re ≡ im (mod 4)`.
    pub fn divisible_by_two_plus_two_i(self) -> bool {
        self.re % 2 == 0 && self.im % 2 == 0 && (self.re - self.im).rem_euclid(4) == 0
    }

    /// `z ≡ 1 (mod 2+2i)`.
    pub fn is_primary(self) -> bool {
        GaussInt::new(self.re.wrapping_sub(1), self.im).divisible_by_two_plus_two_i()
    }
}

impl fmt::Display for GaussInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re, self.im) {
            (re, 0) => write!(f, "{re}"),
            (0, im) => write!(f, "{im}i"),
            (re, im) if im < 0 => write!(f, "{re}{im}i"),
            (re, im) => write!(f, "{re}+{im}i"),
        }
    }
}

/// Exact product, failing on component overflow.
pub fn gauss_mul(x: GaussInt, y: GaussInt) -> Result<GaussInt, GintError> {
    x.checked_mul(y)
}

pub fn divisible_by_two_plus_two_i(z: GaussInt) -> bool {
    z.divisible_by_two_plus_two_i()
}

/// The generator of the prime ideal above `a² + 4b²` that is `≡ 1 mod (2+2i)`
/// and has positive imaginary part.
///
/// All eight associates and conjugates `u·(a ± 2bi)` are tested; exactly two
/// (a conjugate pair) satisfy the congruence, and the one in the upper half
/// plane is returned.
pub fn normalize_generator(a: i64, b: i64) -> Result<GaussInt, GintError> {
    let malformed = |reason: &str| GintError::Malformed { a, b, reason: reason.to_string() };
    if a <= 0 || a % 2 == 0 {
        return Err(malformed("a must be a positive odd integer"));
    }
    if b < 1 {
        return Err(malformed("b must be at least 1"));
    }
    let two_b = b.checked_mul(2).ok_or(GintError::Overflow)?;
    let base = [GaussInt::new(a, two_b), GaussInt::new(a, -two_b)];

    let mut found: [Option<GaussInt>; 2] = [None, None];
    let mut count = 0usize;
    for z in base {
        for u in GaussInt::UNITS {
            let g = u.checked_mul(z)?;
            if g.is_primary() {
                if count < 2 {
                    found[count] = Some(g);
                }
                count += 1;
            }
        }
    }
    match (count, found) {
        (2, [Some(g), Some(h)]) if g.conj() == h => {
            if g.im > 0 {
                Ok(g)
            } else if h.im > 0 {
                Ok(h)
            } else {
                Err(malformed("normalized generator is real"))
            }
        }
        (0, _) => Err(malformed("no candidate is 1 mod (2+2i)")),
        (n, _) => Err(malformed(&format!("{n} candidates are 1 mod (2+2i), expected a conjugate pair"))),
    }
}
