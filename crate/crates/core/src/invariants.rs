//! The `n`-independent invariants `a_{j,k}` with
//! `c_{n,2k} = Σ_{j=1}^{k} a_{j,k} 4^(jn)` for `n ≥ max(1, ⌈log2 k⌉)`.
//!
//! Two independent routes fill the same table:
//!
//! * [`invariants_recursive`]: the column recursion over earlier columns
//!   (`a_{j,k} = b_j w_0(j,k)` for `j ≥ 2`, then `a_{1,k}` from the boundary
//!   row `n = η_k`).
//! * [`invariants_vandermonde`]: solve the `k × k` Vandermonde system with
//!   geometric nodes `4^ℓ` by progressive divided differences followed by the
//!   Newton-to-monomial back-conversion, fed with exact coefficients.
//!
//! The diagonal `a_{k,k}` has its own short recursion, [`diagonal_recursive`].

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::numeric::{ceil_log2, even_indicator, pow2_rational, pow4, signum_rational};

/// Lower-triangular table of `a_{j,k}`, `1 ≤ j ≤ k ≤ kmax`.
///
/// Stored by column: `columns[k - 1][j - 1] = a_{j,k}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvariantTable {
    columns: Vec<Vec<BigRational>>,
}

impl InvariantTable {
    /// Builds from columns; column `k` (1-based) must have exactly `k` entries.
    pub fn from_columns(columns: Vec<Vec<BigRational>>) -> Result<Self> {
        if columns.is_empty() {
            return Err(Error::domain("invariant table needs kmax >= 1"));
        }
        for (i, col) in columns.iter().enumerate() {
            if col.len() != i + 1 {
                return Err(Error::Parse(format!("column k={} has {} entries, expected {}", i + 1, col.len(), i + 1)));
            }
        }
        Ok(InvariantTable { columns })
    }

    pub fn kmax(&self) -> u64 {
        self.columns.len() as u64
    }

    /// `a_{j,k}`; panics outside `1 ≤ j ≤ k ≤ kmax`.
    pub fn get(&self, j: u64, k: u64) -> &BigRational {
        &self.columns[k as usize - 1][j as usize - 1]
    }

    pub fn try_get(&self, j: u64, k: u64) -> Option<&BigRational> {
        if j == 0 || k == 0 || j > k {
            return None;
        }
        self.columns.get(k as usize - 1)?.get(j as usize - 1)
    }

    pub fn column(&self, k: u64) -> &[BigRational] {
        &self.columns[k as usize - 1]
    }

    pub fn columns(&self) -> &[Vec<BigRational>] {
        &self.columns
    }

    pub fn diagonal(&self) -> Vec<BigRational> {
        self.columns.iter().map(|c| c.last().expect("nonempty column").clone()).collect()
    }

    /// First `(j, k)` where the two tables differ, comparing up to the
    /// smaller `kmax`.
    pub fn first_difference(&self, other: &InvariantTable) -> Option<(u64, u64)> {
        for (ki, (a, b)) in self.columns.iter().zip(&other.columns).enumerate() {
            for (ji, (x, y)) in a.iter().zip(b).enumerate() {
                if x != y {
                    return Some((ji as u64 + 1, ki as u64 + 1));
                }
            }
        }
        None
    }
}

/// `⌈log2 k⌉`.
pub fn eta(k: u64) -> u32 {
    ceil_log2(k)
}

/// First level at which column `k` is valid: `max(1, η_k)`.
pub fn first_valid_level(k: u64) -> u32 {
    eta(k).max(1)
}

/// `b_j = 1 / (4 (4^(j-1) - 1))` for `j ≥ 2`.
pub fn b_weight(j: u64) -> Result<BigRational> {
    if j <= 1 {
        return Err(Error::domain(format!("b_weight is defined for j >= 2, got {j}")));
    }
    let denom = (pow4(j - 1) - 1u32) << 2u32;
    Ok(BigRational::new(BigInt::one(), denom))
}

/// Which lower summation limit `v_l(j, k)` uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VMode {
    /// `l_k = 0`: sum from `s = 0` (generic levels `n > η_k`).
    OffResonance,
    /// `l_k = k`: sum from `s = k - 2^(η_k - 1)` (the boundary level `n = η_k`).
    Resonance,
}

/// Columns `1..k` of a table under construction.
struct Partial<'a> {
    columns: &'a [Vec<BigRational>],
}

impl Partial<'_> {
    fn a(&self, j: u64, k: u64) -> Result<&BigRational> {
        if j == 0 || j > k {
            return Err(Error::Inconsistent(format!("a_({j},{k}) outside the triangle")));
        }
        self.columns
            .get(k as usize - 1)
            .and_then(|c| c.get(j as usize - 1))
            .ok_or_else(|| Error::Inconsistent(format!("a_({j},{k}) not yet computed")))
    }
}

fn u_term_in(p: &Partial<'_>, j: u64, k: u64) -> Result<BigRational> {
    if !(3..k).contains(&j) || k % 2 == 1 {
        return Ok(BigRational::zero());
    }
    let h = k / 2;
    let lo = 1.max(j.saturating_sub(h));
    let hi = ((j - 1) / 2).min(h - 1);
    let mut sum = BigRational::zero();
    for l in lo..=hi {
        sum += p.a(l, h)? * p.a(j - l, h)?;
    }
    Ok(sum * BigRational::from_integer(2.into()))
}

fn v_term_in(p: &Partial<'_>, mode: VMode, j: u64, k: u64) -> Result<BigRational> {
    let s_lo = match mode {
        VMode::OffResonance => 0,
        VMode::Resonance => k - (1u64 << (eta(k).max(1) - 1)),
    };
    let s_hi = (k - 1) / 2;
    let mut sum = BigRational::zero();
    for s in s_lo..=s_hi {
        let r_lo = 1.max((j + s).saturating_sub(k));
        let r_hi = (j - 1).min(s);
        for r in r_lo..=r_hi {
            sum += p.a(r, s)? * p.a(j - r, k - s)?;
        }
    }
    Ok(sum)
}

fn w_term_in(p: &Partial<'_>, mode: VMode, j: u64, k: u64) -> Result<BigRational> {
    let mut w = BigRational::zero();
    if even_indicator(k) == 1 && even_indicator(j) == 1 {
        let a = p.a(j / 2, k / 2)?;
        w += a * a;
    }
    w += u_term_in(p, j, k)?;
    w += v_term_in(p, mode, j, k)? * BigRational::from_integer(2.into());
    Ok(w)
}

/// Cross terms from squaring column `k/2`; zero unless `3 ≤ j ≤ k - 1` and `k` is even.
pub fn u_term(j: u64, k: u64, table: &InvariantTable) -> Result<BigRational> {
    u_term_in(&Partial { columns: &table.columns }, j, k)
}

/// Products of columns `s` and `k - s`, `s` from the mode's lower limit to `⌊(k-1)/2⌋`.
pub fn v_term(mode: VMode, j: u64, k: u64, table: &InvariantTable) -> Result<BigRational> {
    v_term_in(&Partial { columns: &table.columns }, mode, j, k)
}

pub fn w_term(mode: VMode, j: u64, k: u64, table: &InvariantTable) -> Result<BigRational> {
    w_term_in(&Partial { columns: &table.columns }, mode, j, k)
}

/// Table for `k = 1..=kmax` by the column recursion.
pub fn invariants_recursive(kmax: u64) -> Result<InvariantTable> {
    if kmax == 0 {
        return Err(Error::domain("kmax must be >= 1"));
    }
    let mut columns: Vec<Vec<BigRational>> = vec![vec![-BigRational::one()]];
    for k in 2..=kmax {
        let p = Partial { columns: &columns };
        let mut col = vec![BigRational::zero(); k as usize];
        for j in (2..=k).rev() {
            col[j as usize - 1] = b_weight(j)? * w_term_in(&p, VMode::OffResonance, j, k)?;
        }
        let eta_k = eta(k) as i64;
        let mut a1 = BigRational::zero();
        for l in 2..=k {
            let w = w_term_in(&p, VMode::Resonance, l, k)?;
            let inner = w * pow2_rational(-2 * l as i64) - &col[l as usize - 1];
            a1 += inner * pow2_rational(2 * eta_k * (l as i64 - 1));
        }
        col[0] = a1;
        columns.push(col);
    }
    Ok(InvariantTable { columns })
}

/// `a_{k,k}` for `k = 1..=kmax` from earlier diagonal entries only.
pub fn diagonal_recursive(kmax: u64) -> Result<Vec<BigRational>> {
    if kmax == 0 {
        return Err(Error::domain("kmax must be >= 1"));
    }
    let mut d: Vec<BigRational> = vec![-BigRational::one()];
    for k in 2..=kmax as usize {
        let mut s = BigRational::zero();
        if k % 2 == 0 {
            let h = &d[k / 2 - 1];
            s += h * h;
        }
        let mut cross = BigRational::zero();
        for i in 1..=(k - 1) / 2 {
            cross += &d[i - 1] * &d[k - i - 1];
        }
        s += cross * BigRational::from_integer(2.into());
        d.push(b_weight(k as u64)? * s);
    }
    Ok(d)
}

/// State of the two-phase Vandermonde solve for one column `k`.
///
/// `nu` starts as `ν^(1)` and is updated in place: after `i` difference
/// stages it equals `ν^(i+1)`; after the back-conversion stages it holds
/// `a^(k-1), a^(k-2), ..., a^(1)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BpWorkspace {
    pub k: u64,
    pub nu: Vec<BigRational>,
    pub stage: u64,
    first_level: u32,
}

impl BpWorkspace {
    /// Loads `ν^(1)_j = c_{ℓ(j),2k} / 4^ℓ(j)` with `ℓ(j) = j - 1 + max(1, η_k)`.
    pub fn new<F>(k: u64, mut coeff_source: F) -> Result<Self>
    where
        F: FnMut(u32) -> Result<BigInt>,
    {
        if k == 0 {
            return Err(Error::domain("k must be >= 1"));
        }
        let first_level = first_valid_level(k);
        let mut nu = Vec::with_capacity(k as usize);
        for j in 1..=k {
            let level = first_level + (j - 1) as u32;
            let c = coeff_source(level)?;
            nu.push(BigRational::new(c, pow4(level as u64)));
        }
        Ok(BpWorkspace { k, nu, stage: 1, first_level })
    }

    /// Node exponent `ℓ(j)` (1-based `j`).
    pub fn level(&self, j: u64) -> u32 {
        self.first_level + (j - 1) as u32
    }

    fn node(&self, j: u64) -> BigInt {
        pow4(self.level(j) as u64)
    }

    /// Difference stage `i → i + 1`, for `i` in `1..k`.
    fn difference_stage(&mut self, i: u64) {
        for j in ((i + 1)..=self.k).rev() {
            let l = self.level(j) as u64;
            let gap = pow4(l) - pow4(l - i);
            let diff = &self.nu[j as usize - 1] - &self.nu[j as usize - 2];
            self.nu[j as usize - 1] = diff / BigRational::from_integer(gap);
        }
    }

    /// Back-conversion `a^(i+1) → a^(i)`.
    fn conversion_stage(&mut self, i: u64) {
        let x = BigRational::from_integer(self.node(i));
        for j in i..self.k {
            let next = &self.nu[j as usize] * &x;
            self.nu[j as usize - 1] -= next;
        }
    }

    /// Runs both phases, returning every intermediate vector:
    /// `ν^(1), ..., ν^(k)` then `a^(k-1), ..., a^(1)`.
    pub fn run_traced(mut self) -> BpTrace {
        let mut nu_stages = vec![self.nu.clone()];
        for i in 1..self.k {
            self.difference_stage(i);
            self.stage += 1;
            nu_stages.push(self.nu.clone());
        }
        let mut a_stages = Vec::new();
        for i in (1..self.k).rev() {
            self.conversion_stage(i);
            self.stage += 1;
            a_stages.push(self.nu.clone());
        }
        BpTrace { nu: nu_stages, a: a_stages, result: self.nu }
    }

    pub fn run(self) -> Vec<BigRational> {
        self.run_traced().result
    }
}

/// Intermediate vectors of a Vandermonde solve.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BpTrace {
    /// `nu[i - 1] = ν^(i)` for `i = 1..=k`; `ν^(k) = a^(k)`.
    pub nu: Vec<Vec<BigRational>>,
    /// `a[t] = a^(k-1-t)`, i.e. `a^(k-1)` first and `a^(1)` last.
    pub a: Vec<Vec<BigRational>>,
    /// `a^(1) = (a_{1,k}, ..., a_{k,k})`.
    pub result: Vec<BigRational>,
}

impl BpTrace {
    /// `a^(i)` for `1 ≤ i ≤ k`.
    pub fn a_stage(&self, i: usize) -> &[BigRational] {
        let k = self.nu.len();
        if i == k {
            &self.nu[k - 1]
        } else {
            &self.a[k - 1 - i]
        }
    }
}

/// Column `k` of the invariant table by the Vandermonde route.
pub fn invariants_vandermonde<F>(k: u64, coeff_source: F) -> Result<Vec<BigRational>>
where
    F: FnMut(u32) -> Result<BigInt>,
{
    Ok(BpWorkspace::new(k, coeff_source)?.run())
}

/// Full table `1..=kmax` by the Vandermonde route, fed by a truncated level
/// recursion.
pub fn invariants_vandermonde_table(kmax: u64) -> Result<InvariantTable> {
    if kmax == 0 {
        return Err(Error::domain("kmax must be >= 1"));
    }
    let mut source = crate::coeffs::LevelTable::new(kmax);
    let mut columns = Vec::with_capacity(kmax as usize);
    for k in 1..=kmax {
        columns.push(invariants_vandermonde(k, |n| source.coeff(n, k))?);
    }
    Ok(InvariantTable { columns })
}

/// First `(j, k)` where `sign(a_{j,k}) != (-1)^j`, if any. An observation
/// over the computed range, not a claimed property.
pub fn alternating_sign_exception(table: &InvariantTable) -> Option<(u64, u64)> {
    for (ki, col) in table.columns.iter().enumerate() {
        for (ji, a) in col.iter().enumerate() {
            let want = if (ji + 1) % 2 == 0 { 1 } else { -1 };
            if signum_rational(a) != want {
                return Some((ji as u64 + 1, ki as u64 + 1));
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffs::{coeffs_level_recursion, LevelTable};
    use crate::numeric::parse_rational;

    fn q(s: &str) -> BigRational {
        parse_rational(s).unwrap()
    }

    fn qs(v: &[&str]) -> Vec<BigRational> {
        v.iter().map(|s| q(s)).collect()
    }

    #[test]
    fn eta_examples() {
        assert_eq!(eta(1), 0);
        assert_eq!(eta(3), 2);
        assert_eq!(eta(4), 2);
        assert_eq!(eta(5), 3);
    }

    #[test]
    fn b_weight_examples() {
        // 2^-2 (2^(2(j-1)) - 1)^-1 evaluated directly
        for j in 2..=10u64 {
            let direct = BigRational::new(1.into(), 4.into())
                / BigRational::from_integer(BigInt::from(2).pow(2 * (j as u32 - 1)) - 1);
            assert_eq!(b_weight(j).unwrap(), direct);
        }
        assert_eq!(b_weight(2).unwrap(), q("1/12"));
        assert_eq!(b_weight(3).unwrap(), q("1/60"));
        assert_eq!(b_weight(4).unwrap(), q("1/252"));
        assert!(b_weight(1).is_err());
        assert!(b_weight(0).is_err());
    }

    #[test]
    fn recursive_small_tables() {
        let t = invariants_recursive(4).unwrap();
        assert_eq!(t.column(1), qs(&["-1"]).as_slice());
        assert_eq!(t.column(2), qs(&["-1/12", "1/12"]).as_slice());
        assert_eq!(t.column(3), qs(&["-1/90", "1/72", "-1/360"]).as_slice());
        assert_eq!(t.column(4), qs(&["-1/560", "7/2880", "-1/1440", "1/20160"]).as_slice());
        assert!(invariants_recursive(0).is_err());
    }

    #[test]
    fn u_v_terms() {
        let t = invariants_recursive(4).unwrap();
        assert_eq!(u_term(2, 4, &t).unwrap(), BigRational::zero());
        assert_eq!(u_term(3, 4, &t).unwrap(), q("-1/72"));
        assert_eq!(u_term(3, 4, &t).unwrap(), q("2") * t.get(1, 2) * t.get(2, 2));
        assert_eq!(u_term(3, 3, &t).unwrap(), BigRational::zero());
        assert_eq!(v_term(VMode::OffResonance, 3, 3, &t).unwrap(), q("-1/12"));
        assert_eq!(v_term(VMode::Resonance, 3, 3, &t).unwrap(), t.get(1, 1) * t.get(2, 2));
        assert_eq!(v_term(VMode::OffResonance, 2, 4, &t).unwrap(), q("1/90"));
    }

    #[test]
    fn u_term_missing_column() {
        let t = invariants_recursive(2).unwrap();
        assert!(matches!(u_term(5, 8, &t), Err(Error::Inconsistent(_))));
    }

    fn source(k: u64) -> impl FnMut(u32) -> Result<BigInt> {
        let mut table = LevelTable::new(k);
        move |n| table.coeff(n, k)
    }

    #[test]
    fn vandermonde_k3_trace() {
        let trace = BpWorkspace::new(3, source(3)).unwrap().run_traced();
        assert_eq!(trace.nu[0], qs(&["-1/2", "-21/2", "-357/2"]));
        assert_eq!(trace.nu[1], qs(&["-1/2", "-5/24", "-7/8"]));
        assert_eq!(trace.nu[2], qs(&["-1/2", "-5/24", "-1/360"]));
        assert_eq!(trace.a_stage(2), qs(&["-1/2", "-11/360", "-1/360"]).as_slice());
        assert_eq!(trace.a_stage(1), qs(&["-1/90", "1/72", "-1/360"]).as_slice());
    }

    #[test]
    fn vandermonde_k4_trace() {
        let trace = BpWorkspace::new(4, source(4)).unwrap().run_traced();
        assert_eq!(trace.nu[0], qs(&["1/16", "165/16", "12597/16", "840565/16"]));
        assert_eq!(trace.nu[1], qs(&["1/16", "41/192", "259/64", "12937/192"]));
        assert_eq!(trace.nu[2], qs(&["1/16", "41/192", "23/1440", "19/288"]));
        assert_eq!(trace.nu[3], qs(&["1/16", "41/192", "23/1440", "1/20160"]));
        assert_eq!(trace.a_stage(3), qs(&["1/16", "41/192", "11/3360", "1/20160"]).as_slice());
        assert_eq!(trace.a_stage(2), qs(&["1/16", "9/2240", "1/10080", "1/20160"]).as_slice());
        assert_eq!(trace.result, qs(&["-1/560", "7/2880", "-1/1440", "1/20160"]));
    }

    #[test]
    fn vandermonde_k1_uses_level_one() {
        let col = invariants_vandermonde(1, source(1)).unwrap();
        assert_eq!(col, qs(&["-1"]));
        // the n = 0 row would give +1
        assert_eq!(coeffs_level_recursion(0, 1).unwrap().values[1], BigInt::one());
    }

    #[test]
    fn vandermonde_propagates_source_errors() {
        let r = invariants_vandermonde(3, |_| Err(Error::Inconsistent("boom".into())));
        assert!(r.is_err());
    }

    #[test]
    fn routes_agree_to_ten() {
        let rec = invariants_recursive(10).unwrap();
        let van = invariants_vandermonde_table(10).unwrap();
        assert_eq!(rec.first_difference(&van), None);
        assert_eq!(rec, van);
    }

    #[test]
    fn diagonal_examples() {
        let d = diagonal_recursive(5).unwrap();
        assert_eq!(d[..2], qs(&["-1", "1/12"])[..]);
        assert_eq!(d[3], q("1/20160"));
        let t = invariants_recursive(8).unwrap();
        assert_eq!(diagonal_recursive(8).unwrap(), t.diagonal());
    }

    #[test]
    fn diagonal_sign() {
        for (i, a) in diagonal_recursive(40).unwrap().iter().enumerate() {
            let want = if (i + 1) % 2 == 0 { 1 } else { -1 };
            assert_eq!(signum_rational(a), want);
        }
    }

    #[test]
    fn table_shape_checked() {
        assert!(InvariantTable::from_columns(vec![]).is_err());
        assert!(InvariantTable::from_columns(vec![qs(&["-1"]), qs(&["1"])]).is_err());
        let t = InvariantTable::from_columns(vec![qs(&["-1"])]).unwrap();
        assert_eq!(t.try_get(1, 2), None);
        assert_eq!(t.try_get(2, 1), None);
    }
}
