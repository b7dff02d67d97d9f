//! The polynomial tower `p_0 = x^2 - 2`, `p_n = p_{n-1}^2 - 2`.
//!
//! Every `p_n` is even, so polynomials are stored densely in the variable
//! `y = x^2`: `coeffs[k]` is the coefficient of `x^(2k)`. The composition
//! tower `q_n(x) = q_{n-1}(x^2 - 2)` is generated by a separate route and
//! must agree with `p_n` coefficient for coefficient.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::Result;
use crate::guard::Limits;
use crate::numeric::signum;
use crate::real::Real;

/// Dense even polynomial with integer coefficients, little-endian in `x^2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvenPoly {
    coeffs: Vec<BigInt>,
}

impl EvenPoly {
    /// Builds from coefficients of `x^0, x^2, x^4, ...`; trailing zeros are dropped.
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.len() > 1 && coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(BigInt::zero());
        }
        EvenPoly { coeffs }
    }

    pub fn constant(c: impl Into<BigInt>) -> Self {
        EvenPoly { coeffs: vec![c.into()] }
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<BigInt> {
        self.coeffs
    }

    /// Degree in `y = x^2` (half the degree in `x`).
    pub fn half_degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn degree(&self) -> usize {
        2 * self.half_degree()
    }

    /// `self^2 - 2`.
    fn square_minus_two(&self) -> EvenPoly {
        let a = &self.coeffs;
        let len = a.len();
        let mut out = vec![BigInt::zero(); 2 * len - 1];
        for i in 0..len {
            if a[i].is_zero() {
                continue;
            }
            out[2 * i] += &a[i] * &a[i];
            let twice = &a[i] << 1u32;
            for j in (i + 1)..len {
                out[i + j] += &twice * &a[j];
            }
        }
        out[0] -= 2;
        EvenPoly::new(out)
    }

    /// `self(x^2 + shift)` as an even polynomial, i.e. substitute
    /// `y -> (y + shift)^2` in the `y = x^2` representation.
    fn compose_square_shift(&self, shift: i64) -> EvenPoly {
        // Horner in the quadratic (y + shift)^2 = y^2 + 2·shift·y + shift^2
        let quad = [BigInt::from(shift * shift), BigInt::from(2 * shift), BigInt::one()];
        let mut acc: Vec<BigInt> = vec![BigInt::zero()];
        for c in self.coeffs.iter().rev() {
            let mut next = vec![BigInt::zero(); acc.len() + 2];
            for (i, a) in acc.iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                for (j, q) in quad.iter().enumerate() {
                    next[i + j] += a * q;
                }
            }
            next[0] += c;
            acc = next;
        }
        EvenPoly::new(acc)
    }

    /// Exact value at a rational point, Horner in `x^2`.
    pub fn eval_exact(&self, x: &BigRational) -> BigRational {
        let y = x * x;
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * &y + BigRational::from_integer(c.clone());
        }
        acc
    }

    /// Value at `x^2 = y` in fixed point, with enough guard bits that the
    /// result carries `bits` correct fractional bits for `|y| <= 4`.
    pub fn eval_at_square(&self, y: &Real, bits: u32) -> Real {
        let wp = bits + self.guard_bits();
        let y = y.with_bits(wp);
        let mut acc = Real::zero(wp);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(&y).add(&Real::from_int(c.clone(), wp));
        }
        acc.with_bits(bits)
    }

    /// Bits lost by Horner at `|y| <= 4`: `log2 Σ (k+1) |c_k| 4^k` plus slack.
    fn guard_bits(&self) -> u32 {
        let bound: BigInt =
            self.coeffs.iter().enumerate().map(|(k, c)| (c.abs() * BigInt::from(k + 1)) << (2 * k)).sum();
        bound.bits() as u32 + 32
    }
}

/// `p_n` by repeated dense squaring.
pub fn gen_p(n: u32, limits: &Limits) -> Result<EvenPoly> {
    limits.check_level(n)?;
    let mut p = EvenPoly::new(vec![BigInt::from(-2), BigInt::one()]);
    for _ in 0..n {
        p = p.square_minus_two();
    }
    Ok(p)
}

/// All of `p_0 ..= p_n`, sharing the squaring chain.
pub fn gen_p_all(n: u32, limits: &Limits) -> Result<Vec<EvenPoly>> {
    limits.check_level(n)?;
    let mut out = Vec::with_capacity(n as usize + 1);
    out.push(EvenPoly::new(vec![BigInt::from(-2), BigInt::one()]));
    for i in 0..n as usize {
        let next = out[i].square_minus_two();
        out.push(next);
    }
    Ok(out)
}

/// `q_n` by repeated inner composition with `x^2 - 2`.
pub fn gen_q(n: u32, limits: &Limits) -> Result<EvenPoly> {
    limits.check_level(n)?;
    let mut q = EvenPoly::new(vec![BigInt::from(-2), BigInt::one()]);
    for _ in 0..n {
        q = q.compose_square_shift(-2);
    }
    Ok(q)
}

pub fn eval_exact(p: &EvenPoly, x: &BigRational) -> BigRational {
    p.eval_exact(x)
}

/// `p(x^2 + 2)`; doubles the degree.
pub fn compose_shift(p: &EvenPoly, limits: &Limits) -> Result<EvenPoly> {
    let doubled = 2 * p.degree();
    if doubled > 1 {
        let log2 = usize::BITS - (doubled - 1).leading_zeros();
        limits.check_degree_log2(log2)?;
    }
    Ok(p.compose_square_shift(2))
}

/// Sign pattern and normalization facts of a generated `p_n`.
///
/// Returns the first violated property, if any: monic, `p_n(0) = ±2`, and for
/// `n ≥ 1` strictly alternating nonzero coefficients `sign(c_{n,2k}) = (-1)^(2^n - k)`.
pub fn structural_violation(n: u32, p: &EvenPoly) -> Option<String> {
    let c = p.coeffs();
    let top = 1usize << n;
    if c.len() != top + 1 {
        return Some(format!("p_{n}: half-degree {} != 2^{n}", c.len() - 1));
    }
    if !c[top].is_one() {
        return Some(format!("p_{n}: not monic"));
    }
    let expected_const = if n == 0 { -2 } else { 2 };
    if c[0] != BigInt::from(expected_const) {
        return Some(format!("p_{n}(0) = {} != {expected_const}", c[0]));
    }
    if n >= 1 {
        for (k, ck) in c.iter().enumerate() {
            let want = if (top - k).is_multiple_of(2) { 1 } else { -1 };
            if signum(ck) != want {
                return Some(format!("p_{n}: coefficient of x^{} has sign {}", 2 * k, signum(ck)));
            }
        }
    }
    None
}

/// Laurent polynomial with integer coefficients; zero terms are never stored.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LaurentPoly {
    terms: BTreeMap<i64, BigInt>,
}

impl LaurentPoly {
    pub fn monomial(exp: i64, c: impl Into<BigInt>) -> Self {
        let mut l = LaurentPoly::default();
        l.add_term(exp, c.into());
        l
    }

    pub fn terms(&self) -> &BTreeMap<i64, BigInt> {
        &self.terms
    }

    pub fn add_term(&mut self, exp: i64, c: BigInt) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(exp).or_insert_with(BigInt::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&exp);
        }
    }

    pub fn mul(&self, other: &LaurentPoly) -> LaurentPoly {
        let mut out = LaurentPoly::default();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                out.add_term(ea + eb, ca * cb);
            }
        }
        out
    }

    pub fn shift(&self, by: i64) -> LaurentPoly {
        LaurentPoly { terms: self.terms.iter().map(|(e, c)| (e + by, c.clone())).collect() }
    }
}

/// `x^(2^(n+1)) · p(x + 1/x)` as a Laurent polynomial, where `p = p_n`.
pub fn cyclotomic_laurent(p: &EvenPoly, n: u32) -> LaurentPoly {
    // (x + 1/x)^2 = x^2 + 2 + x^-2
    let mut s = LaurentPoly::monomial(2, 1);
    s.add_term(0, BigInt::from(2));
    s.add_term(-2, BigInt::one());
    let mut acc = LaurentPoly::default();
    for c in p.coeffs().iter().rev() {
        acc = acc.mul(&s);
        acc.add_term(0, c.clone());
    }
    acc.shift(1i64 << (n + 1))
}

/// True iff `x^(2^(n+1)) p_n(x + 1/x) = x^(2^(n+2)) + 1` exactly.
pub fn cyclotomic_identity_check(n: u32, limits: &Limits) -> Result<bool> {
    let p = gen_p(n, limits)?;
    Ok(cyclotomic_identity_holds(&p, n))
}

pub fn cyclotomic_identity_holds(p: &EvenPoly, n: u32) -> bool {
    let mut target = LaurentPoly::monomial(1i64 << (n + 2), 1);
    target.add_term(0, BigInt::one());
    cyclotomic_laurent(p, n) == target
}

/// `|p_n(2 cos θ) − 2 cos(2^(n+1) θ)|` at `precision_bits`.
pub fn trig_residual(n: u32, theta: &Real, precision_bits: u32, limits: &Limits) -> Result<Real> {
    let p = gen_p(n, limits)?;
    Ok(trig_residual_with(&p, n, theta, precision_bits))
}

/// As [`trig_residual`] with `p_n` supplied by the caller.
pub fn trig_residual_with(p: &EvenPoly, n: u32, theta: &Real, precision_bits: u32) -> Real {
    let wp = precision_bits + 2 * n + 64;
    let theta = theta.with_bits(wp);
    let x = theta.cos().shl(1);
    let lhs = p.eval_at_square(&x.mul(&x), wp);
    let rhs = theta.shl(n + 1).cos().shl(1);
    lhs.sub(&rhs).abs().with_bits(precision_bits)
}

/// `|p_n(2 cos(π / 2^(n+2)))|`; vanishes because the argument is
/// `ζ + ζ^-1` for a primitive `2^(n+3)`-th root of unity `ζ`.
pub fn root_residual(n: u32, precision_bits: u32, limits: &Limits) -> Result<Real> {
    let p = gen_p(n, limits)?;
    Ok(root_residual_with(&p, n, precision_bits))
}

pub fn root_residual_with(p: &EvenPoly, n: u32, precision_bits: u32) -> Real {
    let wp = precision_bits + 64;
    let x = Real::pi(wp).shr(n + 2).cos().shl(1);
    p.eval_at_square(&x.mul(&x), wp).abs().with_bits(precision_bits)
}

/// Outcome of testing which tower index annihilates `ζ_{2^e} − ζ_{2^e}^-1`
/// after composition with `x^2 + 2`.
#[derive(Debug, Clone)]
pub struct ShiftProbe {
    pub e: u32,
    /// `(index, |p_index((ζ − ζ^-1)^2 + 2)|)` for each candidate index.
    pub residuals: Vec<(u32, Real)>,
    /// Candidate indices whose residual is below `2^-threshold_bits`.
    pub vanishing: Vec<u32>,
}

/// Evaluates `p_index(x^2 + 2)` at `x = ζ_{2^e} − ζ_{2^e}^-1` for both
/// candidate indices `e − 3` and `e − 4` (when nonnegative).
///
/// `x = 2i·sin(2π/2^e)` is purely imaginary, so `x^2 = −4 sin^2(2π/2^e)` is
/// real and the even composed polynomial is evaluated at that `x^2`.
pub fn shift_probe(e: u32, precision_bits: u32, threshold_bits: u32, limits: &Limits) -> Result<ShiftProbe> {
    let wp = precision_bits + 64;
    let angle = Real::pi(wp).shl(1).shr(e);
    let s = angle.sin();
    let x_squared = s.mul(&s).shl(2).neg();
    let mut residuals = Vec::new();
    let mut vanishing = Vec::new();
    for back in [3u32, 4] {
        let Some(index) = e.checked_sub(back) else { continue };
        let composed = compose_shift(&gen_p(index, limits)?, limits)?;
        let r = composed.eval_at_square(&x_squared, wp).abs().with_bits(precision_bits);
        if r.abs_below_pow2(threshold_bits) {
            vanishing.push(index);
        }
        residuals.push((index, r));
    }
    Ok(ShiftProbe { e, residuals, vanishing })
}
