//! Binary fixed-point reals for numeric certification.
//!
//! A [`Real`] is `mantissa / 2^bits`. Arithmetic truncates toward negative
//! infinity at the working precision, so every operation carries at most one
//! ulp of error. Nothing in the exact core depends on this module; it exists
//! only to evaluate residuals such as `|p_n(2 cos θ) − 2 cos(2^(n+1) θ)|`.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

#[derive(Clone, PartialEq, Eq)]
pub struct Real {
    mantissa: BigInt,
    bits: u32,
}

impl Real {
    pub fn zero(bits: u32) -> Self {
        Real { mantissa: BigInt::zero(), bits }
    }

    pub fn from_int(z: impl Into<BigInt>, bits: u32) -> Self {
        Real { mantissa: z.into() << bits, bits }
    }

    /// Nearest-below dyadic approximation of `q`.
    pub fn from_rational(q: &BigRational, bits: u32) -> Self {
        let scaled = q.numer() << bits;
        Real { mantissa: scaled.div_floor(q.denom()), bits }
    }

    pub fn from_f64(x: f64, bits: u32) -> Self {
        let q = BigRational::from_float(x).expect("finite f64");
        Real::from_rational(&q, bits)
    }

    /// Exact `mantissa · 2^-bits`; used for values given as dyadics.
    pub fn from_parts(mantissa: BigInt, bits: u32) -> Self {
        Real { mantissa, bits }
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mantissa
    }

    /// Re-expresses at a new precision (exact when widening).
    pub fn with_bits(&self, bits: u32) -> Self {
        let mantissa = match bits.cmp(&self.bits) {
            Ordering::Equal => self.mantissa.clone(),
            Ordering::Greater => &self.mantissa << (bits - self.bits),
            Ordering::Less => &self.mantissa >> (self.bits - bits),
        };
        Real { mantissa, bits }
    }

    pub fn abs(&self) -> Self {
        Real { mantissa: self.mantissa.abs(), bits: self.bits }
    }

    pub fn is_negative(&self) -> bool {
        self.mantissa.is_negative()
    }

    pub fn add(&self, other: &Real) -> Real {
        let o = other.with_bits(self.bits);
        Real { mantissa: &self.mantissa + o.mantissa, bits: self.bits }
    }

    pub fn sub(&self, other: &Real) -> Real {
        let o = other.with_bits(self.bits);
        Real { mantissa: &self.mantissa - o.mantissa, bits: self.bits }
    }

    pub fn mul(&self, other: &Real) -> Real {
        let o = other.with_bits(self.bits);
        Real { mantissa: (&self.mantissa * o.mantissa) >> self.bits, bits: self.bits }
    }

    pub fn mul_int(&self, z: &BigInt) -> Real {
        Real { mantissa: &self.mantissa * z, bits: self.bits }
    }

    pub fn div_int(&self, z: &BigInt) -> Real {
        Real { mantissa: self.mantissa.div_floor(z), bits: self.bits }
    }

    pub fn shl(&self, k: u32) -> Real {
        Real { mantissa: &self.mantissa << k, bits: self.bits }
    }

    pub fn shr(&self, k: u32) -> Real {
        Real { mantissa: &self.mantissa >> k, bits: self.bits }
    }

    pub fn neg(&self) -> Real {
        Real { mantissa: -&self.mantissa, bits: self.bits }
    }

    /// True iff `|self| < 2^-e`.
    pub fn abs_below_pow2(&self, e: u32) -> bool {
        // |m| / 2^bits < 2^-e  <=>  |m| < 2^(bits - e)
        if e >= self.bits {
            let scale = BigInt::one() << (e - self.bits);
            return self.mantissa.abs() * scale < BigInt::one();
        }
        self.mantissa.abs() < (BigInt::one() << (self.bits - e))
    }

    /// `log2 |self|` as a float, `-inf` for zero.
    pub fn log2_abs(&self) -> f64 {
        let m = self.mantissa.abs();
        if m.is_zero() {
            return f64::NEG_INFINITY;
        }
        let len = m.bits();
        let shift = len.saturating_sub(53);
        let top = (&m >> shift).to_f64().unwrap_or(f64::MAX);
        top.log2() + shift as f64 - self.bits as f64
    }

    pub fn to_f64(&self) -> f64 {
        let r = BigRational::new(self.mantissa.clone(), BigInt::one() << self.bits);
        r.to_f64().unwrap_or(f64::NAN)
    }

    /// π at `bits` of precision via Machin's formula.
    pub fn pi(bits: u32) -> Real {
        let guard = 16;
        let wp = bits + guard;
        let a = atan_inv(5, wp).mul_int(&BigInt::from(16));
        let b = atan_inv(239, wp).mul_int(&BigInt::from(4));
        a.sub(&b).with_bits(bits)
    }

    /// `(cos x, sin x)` for any real `x`.
    pub fn cos_sin(&self) -> (Real, Real) {
        let bits = self.bits;
        // Range reduction costs up to log2|x| bits; halving costs 2 bits per step.
        let halvings: u32 = 24;
        let magnitude = self.mantissa.bits().saturating_sub(bits as u64) as u32;
        let wp = bits + magnitude + 2 * halvings + 32;
        let ext = wp + magnitude;
        let x = self.with_bits(ext);
        let two_pi = Real::pi(ext).shl(1);
        // x - 2π·round(x / 2π)
        let half: BigInt = &two_pi.mantissa >> 1u32;
        let q: BigInt = (&x.mantissa + half).div_floor(&two_pi.mantissa);
        let r = x.sub(&two_pi.mul_int(&q)).with_bits(wp).shr(halvings);

        let (mut c, mut s) = taylor_cos_sin(&r);
        let one = Real::from_int(1, wp);
        for _ in 0..halvings {
            let s2 = c.mul(&s).shl(1);
            let c2 = c.mul(&c).shl(1).sub(&one);
            c = c2;
            s = s2;
        }
        (c.with_bits(bits), s.with_bits(bits))
    }

    pub fn cos(&self) -> Real {
        self.cos_sin().0
    }

    pub fn sin(&self) -> Real {
        self.cos_sin().1
    }
}

fn taylor_cos_sin(x: &Real) -> (Real, Real) {
    let bits = x.bits;
    let x2 = x.mul(x);
    let mut cos = Real::from_int(1, bits);
    let mut sin = x.clone();
    let mut term_c = Real::from_int(1, bits);
    let mut term_s = x.clone();
    let mut k: u64 = 1;
    loop {
        term_c = term_c.mul(&x2).div_int(&BigInt::from((2 * k - 1) * (2 * k))).neg();
        term_s = term_s.mul(&x2).div_int(&BigInt::from((2 * k) * (2 * k + 1))).neg();
        if term_c.mantissa.is_zero() && term_s.mantissa.is_zero() {
            break;
        }
        cos = cos.add(&term_c);
        sin = sin.add(&term_s);
        k += 1;
    }
    (cos, sin)
}

/// `atan(1/q)` by its alternating series.
fn atan_inv(q: u64, bits: u32) -> Real {
    let q = BigInt::from(q);
    let q2 = &q * &q;
    let mut power = Real::from_int(1, bits).div_int(&q);
    let mut sum = power.clone();
    let mut k: u64 = 1;
    loop {
        power = power.div_int(&q2);
        if power.mantissa.is_zero() {
            break;
        }
        let term = power.div_int(&BigInt::from(2 * k + 1));
        if k % 2 == 1 {
            sum = sum.sub(&term);
        } else {
            sum = sum.add(&term);
        }
        k += 1;
    }
    sum
}

impl fmt::Debug for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Real({:e} @ {} bits)", self.to_f64(), self.bits)
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:e}", self.to_f64())
    }
}
