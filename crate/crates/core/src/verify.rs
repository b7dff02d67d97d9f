//! The cross-validation suite: every route against every other, collected
//! into a [`VerificationReport`].

use std::fmt;
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::coeffs::{
    central_binomial_identity_holds, closed_form_low, closed_form_top, coeff_from_invariants, coeffs_backsub,
    coeffs_level_recursion, LevelTable,
};
use crate::error::{Error, Result};
use crate::guard::Limits;
use crate::invariants::{
    alternating_sign_exception, diagonal_recursive, first_valid_level, invariants_recursive, invariants_vandermonde,
    BpWorkspace, InvariantTable,
};
use crate::numeric::{format_rational, parse_rational};
use crate::polyseq::{
    cyclotomic_identity_holds, gen_p_all, gen_q, root_residual_with, shift_probe, structural_violation,
    trig_residual_with, EvenPoly,
};
use crate::real::Real;
use crate::trees::{count, grouped_weights, weighted_catalan, weighted_catalan_dp, CatalanMethod, WeightMonomial};

/// `p_1 ..= p_4`, little-endian in `x^2`.
pub const GOLDEN_P: [&[i64]; 4] = [
    &[2, -4, 1],
    &[2, -16, 20, -8, 1],
    &[2, -64, 336, -672, 660, -352, 104, -16, 1],
    &[
        2, -256, 5440, -45696, 201552, -537472, 940576, -1136960, 980628, -615296, 283360, -95680, 23400, -4032, 464,
        -32, 1,
    ],
];

/// Columns `k = 1..=4` of the invariant table.
pub const GOLDEN_A: [&[&str]; 4] =
    [&["-1"], &["-1/12", "1/12"], &["-1/90", "1/72", "-1/360"], &["-1/560", "7/2880", "-1/1440", "1/20160"]];

/// Intermediate vectors of the `k = 3` solve: `ν^(1), ν^(2), ν^(3) = a^(3), a^(2), a^(1)`.
pub const GOLDEN_BP_K3: [&[&str]; 5] = [
    &["-1/2", "-21/2", "-357/2"],
    &["-1/2", "-5/24", "-7/8"],
    &["-1/2", "-5/24", "-1/360"],
    &["-1/2", "-11/360", "-1/360"],
    &["-1/90", "1/72", "-1/360"],
];

/// `ν^(1..4)` then `a^(3), a^(2), a^(1)` for `k = 4`.
pub const GOLDEN_BP_K4: [&[&str]; 7] = [
    &["1/16", "165/16", "12597/16", "840565/16"],
    &["1/16", "41/192", "259/64", "12937/192"],
    &["1/16", "41/192", "23/1440", "19/288"],
    &["1/16", "41/192", "23/1440", "1/20160"],
    &["1/16", "41/192", "11/3360", "1/20160"],
    &["1/16", "9/2240", "1/10080", "1/20160"],
    &["-1/560", "7/2880", "-1/1440", "1/20160"],
];

/// `(monomial as (label, exponent) pairs, multiplicity)` for `k = 3, 4, 5`.
pub fn golden_groups(k: u64) -> Vec<(Vec<(u64, u32)>, u64)> {
    match k {
        3 => vec![(vec![(1, 3), (2, 1), (3, 1)], 2)],
        4 => vec![(vec![(1, 4), (2, 2), (4, 1)], 1), (vec![(1, 4), (2, 1), (3, 1), (4, 1)], 4)],
        5 => vec![
            (vec![(1, 5), (2, 2), (4, 1), (5, 1)], 2),
            (vec![(1, 5), (2, 1), (3, 1), (4, 1), (5, 1)], 8),
            (vec![(1, 5), (2, 2), (3, 1), (5, 1)], 4),
        ],
        _ => Vec::new(),
    }
}

fn rationals(v: &[&str]) -> Vec<BigRational> {
    v.iter().map(|s| parse_rational(s).expect("golden literal")).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Skipped => "skipped",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub params: String,
    pub status: Status,
    pub detail: String,
    pub elapsed_ms: u64,
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.params.is_empty() {
            write!(f, "{}: {}", self.name, self.status)?;
        } else {
            write!(f, "{} {}: {}", self.name, self.params, self.status)?;
        }
        if !self.detail.is_empty() {
            write!(f, " ({})", self.detail)?;
        }
        write!(f, " [{} ms]", self.elapsed_ms)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub checks: Vec<Check>,
    /// Patterns seen over the computed range that are reported, not asserted.
    pub observations: Vec<String>,
}

impl VerificationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != Status::Fail)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.status == Status::Fail)
    }

    pub fn find(&self, name: &str, params: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name && c.params == params)
    }

    /// Runs `f`, timing it. `Ok(Ok(detail))` passes, `Ok(Err(detail))` fails,
    /// a guard error skips and any other error fails.
    pub fn run<F>(&mut self, name: &str, params: impl Into<String>, f: F)
    where
        F: FnOnce() -> Result<std::result::Result<String, String>>,
    {
        let start = Instant::now();
        let outcome = f();
        let elapsed_ms = start.elapsed().as_millis() as u64;
        let (status, detail) = match outcome {
            Ok(Ok(d)) => (Status::Pass, d),
            Ok(Err(d)) => (Status::Fail, d),
            Err(e @ (Error::DegreeGuard { .. } | Error::EnumerationGuard { .. })) => (Status::Skipped, e.to_string()),
            Err(e) => (Status::Fail, e.to_string()),
        };
        self.checks.push(Check { name: name.to_string(), params: params.into(), status, detail, elapsed_ms });
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{c}")?;
        }
        for o in &self.observations {
            writeln!(f, "observation: {o}")?;
        }
        let failed = self.failures().count();
        let skipped = self.checks.iter().filter(|c| c.status == Status::Skipped).count();
        write!(
            f,
            "summary: {} checks, {} failed, {} skipped: {}",
            self.checks.len(),
            failed,
            skipped,
            if failed == 0 { "PASS" } else { "FAIL" }
        )
    }
}

#[derive(Debug, Clone)]
pub struct VerifyConfig {
    pub n_max: u32,
    pub k_max: u64,
    pub precision_bits: u32,
    /// Random angles per level for the trigonometric residual.
    pub angles: usize,
    pub seed: u64,
    pub limits: Limits,
}

impl VerifyConfig {
    pub fn new(n_max: u32, k_max: u64, precision_bits: u32) -> Self {
        VerifyConfig { n_max, k_max, precision_bits, angles: 8, seed: 0x5eed, limits: Limits::default() }
    }

    /// Residual threshold `2^-(precision_bits / 2)`, never looser than `2^-32`.
    pub fn residual_bits(&self) -> u32 {
        (self.precision_bits / 2).max(32)
    }
}

fn ok(detail: impl Into<String>) -> Result<std::result::Result<String, String>> {
    Ok(Ok(detail.into()))
}

fn fail(detail: impl Into<String>) -> Result<std::result::Result<String, String>> {
    Ok(Err(detail.into()))
}

/// Uniform dyadic angle in `(0, π)` at `bits` of precision.
pub fn random_angle(rng: &mut impl Rng, bits: u32) -> Real {
    let pi = Real::pi(bits + 8);
    loop {
        let mut m = BigInt::from(0u8);
        for _ in 0..bits.div_ceil(64) {
            m = (m << 64u32) + rng.random::<u64>();
        }
        let frac = Real::from_parts(m, bits.div_ceil(64) * 64).with_bits(bits + 8);
        let theta = frac.mul(&pi).with_bits(bits);
        if !theta.mantissa().eq(&BigInt::from(0u8)) {
            return theta;
        }
    }
}

pub fn run(cfg: &VerifyConfig) -> VerificationReport {
    let mut report = VerificationReport::default();
    if cfg.precision_bits < 64 {
        report.run("config", "", || fail("precision_bits must be >= 64"));
        return report;
    }
    let polys: Vec<EvenPoly> = match gen_p_all(cfg.n_max, &cfg.limits) {
        Ok(p) => p,
        Err(e) => {
            report.run("generate", format!("n<={}", cfg.n_max), || Err(e));
            return report;
        }
    };
    polynomial_checks(cfg, &polys, &mut report);
    coefficient_checks(cfg, &polys, &mut report);
    invariant_checks(cfg, &mut report);
    tree_checks(cfg, &mut report);
    numeric_checks(cfg, &polys, &mut report);
    report
}

fn polynomial_checks(cfg: &VerifyConfig, polys: &[EvenPoly], report: &mut VerificationReport) {
    for (i, golden) in GOLDEN_P.iter().enumerate() {
        let n = i + 1;
        if n > cfg.n_max as usize {
            break;
        }
        report.run("golden_polynomial", format!("n={n}"), || {
            let want: Vec<BigInt> = golden.iter().map(|&c| BigInt::from(c)).collect();
            if polys[n].coeffs() == want.as_slice() {
                ok("")
            } else {
                fail("coefficients differ from the reference list")
            }
        });
    }
    for (n, p) in polys.iter().enumerate() {
        let n32 = n as u32;
        report.run("p_equals_q", format!("n={n}"), || {
            let q = gen_q(n32, &cfg.limits)?;
            if &q == p {
                ok("")
            } else {
                fail("composition tower differs from squaring tower")
            }
        });
        report.run("structure", format!("n={n}"), || match structural_violation(n32, p) {
            None => ok(""),
            Some(v) => fail(v),
        });
        report.run("cyclotomic_identity", format!("n={n}"), || {
            if cyclotomic_identity_holds(p, n32) {
                ok("")
            } else {
                fail("Laurent expansion differs from x^(2^(n+2)) + 1")
            }
        });
    }
}

fn coefficient_checks(cfg: &VerifyConfig, polys: &[EvenPoly], report: &mut VerificationReport) {
    for (n, p) in polys.iter().enumerate() {
        let n32 = n as u32;
        report.run("backsub_equals_square", format!("n={n}"), || {
            let row = coeffs_backsub(n32, &cfg.limits)?;
            if row.values.as_slice() == p.coeffs() {
                ok("")
            } else {
                fail("back-substitution row differs")
            }
        });
        if n >= 1 {
            report.run("central_binomial_sum", format!("n={n}"), || {
                let row = coeffs_backsub(n32, &cfg.limits)?;
                if central_binomial_identity_holds(&row) {
                    ok("")
                } else {
                    fail("sum C(2i,i) c_{n,2i} != -2")
                }
            });
        }
        report.run("truncated_prefix", format!("n={n}"), || {
            let full = 1u64 << n;
            let mut cuts = vec![0, 1, full / 2, full];
            cuts.dedup();
            for kmax in cuts {
                let row = coeffs_level_recursion(n32, kmax)?;
                if row.values.as_slice() != &p.coeffs()[..=kmax as usize] {
                    return fail(format!("truncated row kmax={kmax} is not a prefix"));
                }
            }
            ok("")
        });
        report.run("closed_forms", format!("n={n}"), || {
            let m = 1usize << n;
            let mut used = 0;
            for j in 1..=4u32 {
                if let Ok(v) = closed_form_top(n32, j) {
                    used += 1;
                    if v != p.coeffs()[m - j as usize] {
                        return fail(format!("top item j={j}"));
                    }
                }
            }
            if n32 >= 1 {
                for k in 1..=3u32 {
                    let v = closed_form_low(n32, k)?;
                    used += 1;
                    let want = p.coeffs().get(k as usize).cloned().unwrap_or_default();
                    if v != BigRational::from_integer(want) {
                        return fail(format!("low c_(n,{}) form", 2 * k));
                    }
                }
            }
            ok(format!("{used} forms"))
        });
    }
}

fn invariant_checks(cfg: &VerifyConfig, report: &mut VerificationReport) {
    let k_max = cfg.k_max.max(1);
    let mut table: Option<InvariantTable> = None;
    report.run("invariants_recursive", format!("kmax={k_max}"), || {
        let t = invariants_recursive(k_max)?;
        for (i, golden) in GOLDEN_A.iter().enumerate() {
            if i as u64 >= k_max {
                break;
            }
            if t.column(i as u64 + 1) != rationals(golden).as_slice() {
                return fail(format!("column k={} differs from reference values", i + 1));
            }
        }
        table = Some(t);
        ok("")
    });
    let Some(table) = table else { return };

    let mut source = LevelTable::new(k_max);
    for k in 1..=k_max {
        report.run("vandermonde_equals_recursive", format!("k={k}"), || {
            let col = invariants_vandermonde(k, |n| source.coeff(n, k))?;
            if col.as_slice() == table.column(k) {
                ok("")
            } else {
                fail("columns differ")
            }
        });
        report.run("invariant_sum", format!("k={k}"), || {
            let n0 = first_valid_level(k);
            let levels: Vec<u32> = (n0..n0 + k as u32 + 2).collect();
            for &n in &levels {
                let via_table = coeff_from_invariants(n, k, &table)?;
                if via_table != source.coeff(n, k)? {
                    return fail(format!("n={n}"));
                }
            }
            ok(format!("levels {}..={}", n0, n0 + k as u32 + 1))
        });
    }
    for (k, golden) in [(3u64, &GOLDEN_BP_K3[..]), (4, &GOLDEN_BP_K4[..])] {
        report.run("bp_golden_vectors", format!("k={k}"), || {
            let mut src = LevelTable::new(k);
            let trace = BpWorkspace::new(k, |n| src.coeff(n, k))?.run_traced();
            let mut got: Vec<Vec<BigRational>> = trace.nu.clone();
            got.extend(trace.a.iter().cloned());
            let want: Vec<Vec<BigRational>> = golden.iter().map(|g| rationals(g)).collect();
            if got == want {
                ok(format!("{} vectors", want.len()))
            } else {
                fail("intermediate vectors differ")
            }
        });
    }
    report.run("diagonal_recursion", format!("kmax={k_max}"), || {
        let d = diagonal_recursive(k_max)?;
        if d == table.diagonal() {
            ok("")
        } else {
            fail("diagonal recursion differs from table diagonal")
        }
    });
    report.run("diagonal_sign", format!("kmax={k_max}"), || {
        for (i, a) in table.diagonal().iter().enumerate() {
            let want = if (i + 1) % 2 == 0 { 1 } else { -1 };
            if crate::numeric::signum_rational(a) != want {
                return fail(format!("a_({0},{0}) = {1}", i + 1, format_rational(a)));
            }
        }
        ok("")
    });
    report.observations.push(match alternating_sign_exception(&table) {
        None => format!("sign(a_(j,k)) = (-1)^j for all 1 <= j <= k <= {k_max}"),
        Some((j, k)) => format!("sign(a_(j,k)) = (-1)^j fails first at (j,k) = ({j},{k})"),
    });
}

fn tree_checks(cfg: &VerifyConfig, report: &mut VerificationReport) {
    let k_max = cfg.k_max.max(1);
    let Ok(diag) = diagonal_recursive(k_max) else { return };
    report.run("tree_count", format!("kmax={k_max}"), || {
        for k in 1..=k_max {
            let n = k - 1;
            let catalan = crate::numeric::binomial(2 * n, n as i64) / BigInt::from(n + 1);
            if count(k)? != catalan {
                return fail(format!("k={k}"));
            }
        }
        ok("")
    });
    for k in 1..=k_max {
        report.run("weighted_catalan", format!("k={k}"), || {
            let dp = weighted_catalan(k, CatalanMethod::Convolution, &cfg.limits)?;
            if dp != diag[k as usize - 1] {
                return fail("convolution differs from diagonal recursion");
            }
            match weighted_catalan(k, CatalanMethod::Enumerate, &cfg.limits) {
                Ok(en) if en == dp => ok("enumeration and convolution"),
                Ok(_) => fail("enumeration differs"),
                Err(Error::EnumerationGuard { .. }) => ok("convolution only (enumeration guard)"),
                Err(e) => Err(e),
            }
        });
    }
    for k in 3..=5u64 {
        report.run("grouped_multiplicities", format!("k={k}"), || {
            let groups = grouped_weights(k, &cfg.limits)?;
            let want = golden_groups(k);
            if groups.len() != want.len() {
                return fail(format!("{} groups, expected {}", groups.len(), want.len()));
            }
            for (pairs, mult) in want {
                let m = WeightMonomial::from_pairs(&pairs);
                if groups.get(&m) != Some(&BigInt::from(mult)) {
                    return fail(format!("{m}"));
                }
            }
            ok("")
        });
    }
    report.run("weighted_catalan_dp_extended", "kmax=64", || {
        let dp = weighted_catalan_dp(64)?;
        if dp == diagonal_recursive(64)? {
            ok("")
        } else {
            fail("convolution differs from diagonal recursion")
        }
    });
}

fn numeric_checks(cfg: &VerifyConfig, polys: &[EvenPoly], report: &mut VerificationReport) {
    let bits = cfg.precision_bits;
    let thr = cfg.residual_bits();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for (n, p) in polys.iter().enumerate() {
        let n32 = n as u32;
        report.run("root_residual", format!("n={n}"), || {
            let r = root_residual_with(p, n32, bits);
            let d = format!("log2 residual {:.1}", r.log2_abs());
            if r.abs_below_pow2(thr) {
                ok(d)
            } else {
                fail(d)
            }
        });
        let angles: Vec<Real> = (0..cfg.angles).map(|_| random_angle(&mut rng, bits)).collect();
        report.run("trig_residual", format!("n={n}"), || {
            let mut worst = f64::NEG_INFINITY;
            for theta in &angles {
                let r = trig_residual_with(p, n32, theta, bits);
                worst = worst.max(r.log2_abs());
                if !r.abs_below_pow2(thr) {
                    return fail(format!("theta={theta}: log2 residual {:.1}", r.log2_abs()));
                }
            }
            ok(format!("{} angles, worst log2 residual {worst:.1}", angles.len()))
        });
    }
    let e_max = (cfg.n_max + 3).max(4);
    for e in 4..=e_max {
        report.run("shift_probe", format!("e={e}"), || {
            let probe = shift_probe(e, bits, thr, &cfg.limits)?;
            let residuals: Vec<String> =
                probe.residuals.iter().map(|(i, r)| format!("index {i}: log2 {:.1}", r.log2_abs())).collect();
            let detail = format!("{}; vanishing {:?}", residuals.join(", "), probe.vanishing);
            match probe.vanishing.as_slice() {
                [only] if *only == e - 4 => ok(format!("{detail}; index e-4 vanishes, e-3 does not")),
                [only] => ok(format!("{detail}; index {only} vanishes")),
                _ => fail(detail),
            }
        });
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_suite_passes() {
        let report = run(&VerifyConfig::new(1, 1, 64));
        assert!(report.all_passed(), "{report}");
    }

    #[test]
    fn small_suite_passes() {
        let report = run(&VerifyConfig::new(4, 4, 128));
        assert!(report.all_passed(), "{report}");
        let c = report.find("cyclotomic_identity", "n=4").unwrap();
        assert_eq!(c.status, Status::Pass);
        assert!(c.to_string().starts_with("cyclotomic_identity n=4: pass"));
        assert!(report.find("bp_golden_vectors", "k=4").is_some());
    }

    #[test]
    fn low_precision_rejected() {
        let report = run(&VerifyConfig::new(1, 1, 32));
        assert!(!report.all_passed());
    }

    #[test]
    fn guard_errors_skip() {
        let mut r = VerificationReport::default();
        r.run("x", "", || Err(Error::DegreeGuard { requested_log2: 20, limit_log2: 14 }));
        assert_eq!(r.checks[0].status, Status::Skipped);
        assert!(r.all_passed());
        r.run("y", "", || fail("nope"));
        assert!(!r.all_passed());
    }

    #[test]
    fn report_json_is_stable() {
        let a = serde_json::to_value(run(&VerifyConfig::new(2, 2, 64))).unwrap();
        let b = serde_json::to_value(run(&VerifyConfig::new(2, 2, 64))).unwrap();
        let strip = |v: &serde_json::Value| {
            v["checks"]
                .as_array()
                .unwrap()
                .iter()
                .map(|c| (c["name"].clone(), c["params"].clone(), c["status"].clone()))
                .collect::<Vec<_>>()
        };
        assert_eq!(strip(&a), strip(&b));
    }
}
