//! Coefficient rows `c_{n,2k}` of `p_n` by routes that never square a
//! polynomial: echelon back-substitution on the binomial system coming from
//! `x^(2^(n+1)) p_n(x + 1/x) = x^(2^(n+2)) + 1`, the level recursion from
//! `p_{n-1}` to `p_n` (optionally truncated), and closed forms.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::guard::Limits;
use crate::invariants::InvariantTable;
use crate::numeric::{as_integer, binomial, format_rational, pow2, pow4};

/// The row `c_{n,0}, c_{n,2}, ..., c_{n,2·kmax}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoeffVector {
    pub n: u32,
    pub kmax: u64,
    pub values: Vec<BigInt>,
}

impl CoeffVector {
    pub fn is_complete(&self) -> bool {
        self.kmax == span(self.n)
    }

    pub fn get(&self, k: u64) -> Option<&BigInt> {
        self.values.get(k as usize)
    }

    /// True iff `self.values` is a prefix of `other.values` at the same `n`.
    pub fn is_prefix_of(&self, other: &CoeffVector) -> bool {
        self.n == other.n
            && self.values.len() <= other.values.len()
            && self.values.iter().zip(&other.values).all(|(a, b)| a == b)
    }
}

/// Levels beyond this are refused; the coefficients have about `2kn` bits.
pub const MAX_LEVEL: u32 = 4096;

fn check_n(n: u32) -> Result<()> {
    if n > MAX_LEVEL {
        return Err(Error::domain(format!("level n = {n} exceeds {MAX_LEVEL}")));
    }
    Ok(())
}

/// `2^n` as an index bound, saturating at `u64::MAX`.
pub fn span(n: u32) -> u64 {
    1u64.checked_shl(n).unwrap_or(u64::MAX)
}

/// Complete row by back-substitution from the top coefficient down.
///
/// Once `c_{n,2i}` is known it contributes `C(2i, i - t) · c_{n,2i}` to the
/// equation for every lower index `t`; those contributions are pushed into an
/// accumulator so each binomial row `C(2i, ·)` is built once.
pub fn coeffs_backsub(n: u32, limits: &Limits) -> Result<CoeffVector> {
    limits.check_level(n)?;
    let m = 1usize << n;
    let mut c = vec![BigInt::zero(); m + 1];
    let mut acc = vec![BigInt::zero(); m + 1];
    for i in (0..=m).rev() {
        c[i] = if i == m { BigInt::one() } else { -&acc[i] };
        if c[i].is_zero() {
            continue;
        }
        // C(2i, d) for d = 1..=i, applied to t = i - d
        let mut binom = BigInt::one();
        for d in 1..=i {
            binom = binom * (2 * i - d + 1) / d;
            acc[i - d] += &binom * &c[i];
        }
    }
    Ok(CoeffVector { n, kmax: m as u64, values: c })
}

/// The literal echelon formula, one coefficient at a time:
/// `c_{n,2(m-j)} = -Σ_{i=m-j+1}^{m} C(2i, j+i-m) c_{n,2i}` with `m = 2^n`.
///
/// Quadratic in binomial evaluations; kept as the reference for
/// [`coeffs_backsub`] at small `n`.
pub fn coeffs_backsub_literal(n: u32, limits: &Limits) -> Result<CoeffVector> {
    limits.check_level(n)?;
    let m = 1i64 << n;
    let mut c = vec![BigInt::zero(); m as usize + 1];
    c[m as usize] = BigInt::one();
    for j in 1..=m {
        let mut sum = BigInt::zero();
        for i in (m - j + 1)..=m {
            sum += binomial(2 * i as u64, j + i - m) * &c[i as usize];
        }
        c[(m - j) as usize] = -sum;
    }
    Ok(CoeffVector { n, kmax: m as u64, values: c })
}

/// `2 = -Σ_{i=1}^{2^n} C(2i, i) c_{n,2i}` for a complete row with `n ≥ 1`.
pub fn central_binomial_identity_holds(row: &CoeffVector) -> bool {
    if row.n == 0 || !row.is_complete() {
        return false;
    }
    let s: BigInt = row.values.iter().enumerate().skip(1).map(|(i, c)| binomial(2 * i as u64, i as i64) * c).sum();
    s == BigInt::from(-2)
}

/// One step of the level recursion: row `n` up to `kmax` from row `n - 1`.
///
/// `prev` must hold `c_{n-1,2s}` for all `s ≤ min(kmax, 2^(n-1))`.
fn level_step(prev: &[BigInt], n: u32, kmax: usize) -> Vec<BigInt> {
    let half = span(n - 1) as usize;
    let mut row = Vec::with_capacity(kmax + 1);
    row.push(&prev[0] * &prev[0] - 2);
    for k in 1..=kmax {
        let mut v = BigInt::zero();
        // ε(k)·(c_{n-1,k})^2, where c_{n-1,k} is the x^k coefficient
        if k % 2 == 0 && k / 2 <= half {
            v += &prev[k / 2] * &prev[k / 2];
        }
        let lo = k.saturating_sub(half);
        let hi = ((k - 1) / 2).min(half - 1);
        let mut cross = BigInt::zero();
        if lo <= hi {
            for s in lo..=hi {
                cross += &prev[s] * &prev[k - s];
            }
        }
        v += cross << 1u32;
        row.push(v);
    }
    row
}

/// Rows `0..=n` built iteratively, each truncated at `min(kmax, 2^level)`.
///
/// Row `n` at index `k` reads only indices `≤ k` of row `n - 1`, so the
/// truncation is exact and `n` is not limited by the degree guard.
pub fn coeffs_level_recursion(n: u32, kmax: u64) -> Result<CoeffVector> {
    check_n(n)?;
    let full = span(n);
    if kmax > full {
        return Err(Error::domain(format!("kmax = {kmax} exceeds 2^{n} = {full}")));
    }
    let rows = level_rows(n, kmax);
    let values = rows.into_iter().next_back().expect("at least row 0");
    Ok(CoeffVector { n, kmax, values })
}

/// All truncated rows `0..=n`; row `m` has `min(kmax, 2^m) + 1` entries.
pub fn level_rows(n: u32, kmax: u64) -> Vec<Vec<BigInt>> {
    let mut rows = Vec::with_capacity(n as usize + 1);
    let mut row = vec![BigInt::from(-2), BigInt::one()];
    row.truncate(kmax.min(1) as usize + 1);
    rows.push(row);
    for level in 1..=n {
        let cap = kmax.min(span(level)) as usize;
        let next = level_step(&rows[level as usize - 1], level, cap);
        rows.push(next);
    }
    rows
}

/// Memoized source of `c_{n,2k}` for fixed `kmax` and growing `n`.
#[derive(Debug, Clone)]
pub struct LevelTable {
    kmax: u64,
    rows: Vec<Vec<BigInt>>,
}

impl LevelTable {
    pub fn new(kmax: u64) -> Self {
        LevelTable { kmax, rows: level_rows(0, kmax) }
    }

    pub fn kmax(&self) -> u64 {
        self.kmax
    }

    /// `c_{n,2k}`; zero when `k > 2^n`.
    pub fn coeff(&mut self, n: u32, k: u64) -> Result<BigInt> {
        check_n(n)?;
        if k > self.kmax {
            return Err(Error::domain(format!("k = {k} beyond table cutoff {}", self.kmax)));
        }
        while self.rows.len() <= n as usize {
            let level = self.rows.len() as u32;
            let cap = self.kmax.min(span(level)) as usize;
            let next = level_step(self.rows.last().expect("row 0"), level, cap);
            self.rows.push(next);
        }
        Ok(self.rows[n as usize].get(k as usize).cloned().unwrap_or_default())
    }
}

/// Closed forms for the four highest non-leading coefficients
/// `c_{n,2(2^n - j)}`, `j = 1..=4`.
pub fn closed_form_top(n: u32, j: u32) -> Result<BigInt> {
    check_n(n)?;
    let min_n = match j {
        1 => 0,
        2 => 1,
        3 => 2,
        4 => 3,
        _ => return Err(Error::domain(format!("closed_form_top: j = {j} not in 1..=4"))),
    };
    if n < min_n {
        return Err(Error::domain(format!("closed_form_top: j = {j} needs n >= {min_n}, got {n}")));
    }
    let p = |e: u32| pow2(e as u64);
    let m = p(n);
    let m2 = p(n + 1);
    let three = BigInt::from(3);
    let value = match j {
        1 => -&m2,
        2 => &m * (&m2 - 3),
        3 => {
            let t: BigInt = &m * (&m2 - 1) * (&m2 - 2);
            debug_assert!((&t % &three).is_zero());
            &m2 * (&m2 - 3) - t / &three
        }
        _ => {
            let t: BigInt = BigInt::from(4) * (&m2 - 1) * (&m2 - 2);
            debug_assert!((&t % &three).is_zero());
            let inner: BigInt = t / &three - (p(2 * (n + 1)) - 9);
            p(n - 1) * (&m - 3) * inner
        }
    };
    Ok(value)
}

/// Closed forms for `c_{n,2}`, `c_{n,4}`, `c_{n,6}` as polynomials in `4^n`.
pub fn closed_form_low(n: u32, k: u32) -> Result<BigRational> {
    if n < 1 {
        return Err(Error::domain("closed_form_low needs n >= 1"));
    }
    check_n(n)?;
    let r = |a: i64, b: i64| BigRational::new(a.into(), b.into());
    let w = |e: u64| BigRational::from_integer(pow4(e * n as u64));
    let value = match k {
        1 => -w(1),
        2 => r(-1, 12) * w(1) + r(1, 12) * w(2),
        3 => r(-1, 90) * w(1) + r(1, 72) * w(2) - r(1, 360) * w(3),
        _ => return Err(Error::domain(format!("closed_form_low: k = {k} not in 1..=3"))),
    };
    Ok(value)
}

/// `c_{n,2k}` from the invariant table: 2 for `k = 0`, otherwise
/// `Σ_j a_{j,k} 4^(jn)`, which must be an integer.
pub fn coeff_from_invariants(n: u32, k: u64, table: &InvariantTable) -> Result<BigInt> {
    if n < 1 {
        return Err(Error::domain("coeff_from_invariants needs n >= 1"));
    }
    check_n(n)?;
    if k > span(n) {
        return Err(Error::domain(format!("k = {k} exceeds 2^{n}")));
    }
    if k == 0 {
        return Ok(BigInt::from(2));
    }
    if k > table.kmax() {
        return Err(Error::domain(format!("k = {k} beyond table kmax {}", table.kmax())));
    }
    let mut sum = BigRational::zero();
    for j in 1..=k {
        sum += table.get(j, k) * BigRational::from_integer(pow4(j * n as u64));
    }
    as_integer(&sum).ok_or_else(|| {
        Error::Inconsistent(format!("invariant sum for (n={n}, k={k}) is not an integer: {}", format_rational(&sum)))
    })
}
