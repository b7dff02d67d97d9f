//! Exact integer and rational primitives shared by every other module.
//!
//! Integers are [`num_bigint::BigInt`] and rationals are
//! [`num_rational::BigRational`], which is normalized on every construction
//! (`gcd(|num|, den) = 1`, `den > 0`), so equality across independently
//! computed values is plain structural equality.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub use num_bigint::BigInt as Int;
pub use num_rational::BigRational as Rational;

/// `C(n, k)`, total: zero whenever `k < 0` or `k > n`.
pub fn binomial(n: u64, k: i64) -> BigInt {
    if k < 0 || k as u64 > n {
        return BigInt::zero();
    }
    let k = (k as u64).min(n - k as u64);
    let mut acc = BigInt::one();
    for i in 0..k {
        // acc * (n - i) is always divisible by (i + 1) at this point
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// `2^e` exactly.
pub fn pow2(e: u64) -> BigInt {
    BigInt::one() << e
}

/// `2^e` as a rational; negative exponents give `1 / 2^-e`.
pub fn pow2_rational(e: i64) -> BigRational {
    if e >= 0 {
        BigRational::from_integer(pow2(e as u64))
    } else {
        BigRational::new(BigInt::one(), pow2(e.unsigned_abs()))
    }
}

/// `4^e = 2^(2e)`.
pub fn pow4(e: u64) -> BigInt {
    pow2(2 * e)
}

/// `⌈log2 k⌉` for `k ≥ 1`.
pub fn ceil_log2(k: u64) -> u32 {
    assert!(k >= 1, "ceil_log2 of zero");
    if k == 1 {
        0
    } else {
        64 - (k - 1).leading_zeros()
    }
}

/// Parity indicator on the naturals: 1 for even, 0 for odd.
pub fn even_indicator(k: u64) -> u32 {
    if k.is_even() {
        1
    } else {
        0
    }
}

/// Renders a rational as `"p/q"`, always with an explicit denominator.
pub fn format_rational(q: &BigRational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

pub fn format_int(z: &BigInt) -> String {
    z.to_str_radix(10)
}

/// Parses a decimal integer string. No exponent notation, optional sign.
pub fn parse_int(s: &str) -> Result<BigInt> {
    let t = s.trim();
    let digits = t.strip_prefix(['-', '+']).unwrap_or(t);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(Error::Parse(format!("not a decimal integer: {s:?}")));
    }
    t.parse::<BigInt>().map_err(|e| Error::Parse(format!("{s:?}: {e}")))
}

/// Parses `"p/q"` or a bare integer `"p"`, normalizing the result.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    match s.split_once('/') {
        Some((p, q)) => {
            let p = parse_int(p)?;
            let q = parse_int(q)?;
            if q.is_zero() {
                return Err(Error::Parse(format!("zero denominator in {s:?}")));
            }
            Ok(BigRational::new(p, q))
        }
        None => Ok(BigRational::from_integer(parse_int(s)?)),
    }
}

/// Returns the integer value of `q`, or `None` if `q` has a nontrivial
/// denominator.
pub fn as_integer(q: &BigRational) -> Option<BigInt> {
    if q.is_integer() {
        Some(q.numer().clone())
    } else {
        None
    }
}

/// Sign of an integer as -1, 0 or 1.
pub fn signum(z: &BigInt) -> i8 {
    if z.is_positive() {
        1
    } else if z.is_negative() {
        -1
    } else {
        0
    }
}

/// Sign of a rational as -1, 0 or 1.
pub fn signum_rational(q: &BigRational) -> i8 {
    signum(q.numer())
}
