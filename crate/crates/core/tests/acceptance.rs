//! Acceptance run: one line per criterion, nonzero exit if any fails.

use std::time::{Duration, Instant};

use chebytower::coeffs::{
    central_binomial_identity_holds, closed_form_low, closed_form_top, coeff_from_invariants, coeffs_backsub,
    coeffs_level_recursion, LevelTable,
};
use chebytower::invariants::{
    diagonal_recursive, first_valid_level, invariants_recursive, invariants_vandermonde, invariants_vandermonde_table,
    BpWorkspace,
};
use chebytower::numeric::parse_rational;
use chebytower::polyseq::{
    cyclotomic_identity_holds, gen_p, gen_p_all, gen_q, root_residual_with, shift_probe, trig_residual_with,
};
use chebytower::trees::{count, grouped_weights, weighted_catalan, weighted_catalan_dp, CatalanMethod};
use chebytower::verify::random_angle;
use chebytower::Limits;
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Stages<'a> = Vec<Vec<&'a str>>;
type Criterion = (&'static str, u64, fn() -> Outcome);

fn q(s: &str) -> BigRational {
    parse_rational(s).unwrap()
}

fn qs(v: &[&str]) -> Vec<BigRational> {
    v.iter().map(|s| q(s)).collect()
}

fn ints(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&c| BigInt::from(c)).collect()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e<E: std::fmt::Display>(err: E) -> String {
    err.to_string()
}

fn golden_polynomials() -> Outcome {
    let lim = Limits::default();
    let want: [Vec<BigInt>; 4] = [
        ints(&[2, -4, 1]),
        ints(&[2, -16, 20, -8, 1]),
        ints(&[2, -64, 336, -672, 660, -352, 104, -16, 1]),
        ints(&[
            2, -256, 5440, -45696, 201552, -537472, 940576, -1136960, 980628, -615296, 283360, -95680, 23400, -4032,
            464, -32, 1,
        ]),
    ];
    for (i, w) in want.iter().enumerate() {
        let n = i as u32 + 1;
        ensure(gen_p(n, &lim).map_err(e)?.coeffs() == w.as_slice(), || format!("p_{n} differs"))?;
    }
    Ok("n = 1..4".into())
}

fn q_equals_p() -> Outcome {
    let lim = Limits::default();
    let ps = gen_p_all(10, &lim).map_err(e)?;
    for (n, p) in ps.iter().enumerate() {
        ensure(&gen_q(n as u32, &lim).map_err(e)? == p, || format!("n = {n}"))?;
    }
    Ok("n = 0..10".into())
}

fn cyclotomic() -> Outcome {
    let ps = gen_p_all(10, &Limits::default()).map_err(e)?;
    for (n, p) in ps.iter().enumerate() {
        ensure(cyclotomic_identity_holds(p, n as u32), || format!("n = {n}"))?;
    }
    Ok("n = 0..10".into())
}

fn backsub() -> Outcome {
    let lim = Limits::default();
    for n in 0..=8u32 {
        let row = coeffs_backsub(n, &lim).map_err(e)?;
        ensure(row.values.as_slice() == gen_p(n, &lim).map_err(e)?.coeffs(), || format!("row n = {n}"))?;
        if n >= 1 {
            ensure(central_binomial_identity_holds(&row), || format!("central binomial sum n = {n}"))?;
        }
    }
    Ok("n = 0..8".into())
}

fn level_recursion() -> Outcome {
    let lim = Limits::default();
    for n in 0..=10u32 {
        let row = coeffs_level_recursion(n, 1 << n).map_err(e)?;
        ensure(row.values.as_slice() == gen_p(n, &lim).map_err(e)?.coeffs(), || format!("full row n = {n}"))?;
    }
    let (n, kmax) = (40u32, 24u64);
    let row = coeffs_level_recursion(n, kmax).map_err(e)?;
    let table = invariants_recursive(kmax).map_err(e)?;
    for k in 0..=kmax {
        // an error here means a non-integral invariant sum
        let v = coeff_from_invariants(n, k, &table).map_err(e)?;
        ensure(v == row.values[k as usize], || format!("n = 40, k = {k}"))?;
    }
    let two = BigInt::from(2);
    let oracle = (two.pow(160) - two.pow(80)) / 12;
    ensure(row.values[2] == oracle, || "c_(40,4) closed value".into())?;
    let mut checked = 0;
    for k in 1..=12u64 {
        let n0 = first_valid_level(k);
        for n in n0..n0 + 12 {
            coeff_from_invariants(n, k, &table).map_err(e)?;
            checked += 1;
        }
    }
    Ok(format!("n = 0..10 full, n = 40 kmax = 24 truncated, {checked} further sums integral"))
}

fn invariant_table() -> Outcome {
    let t = invariants_recursive(16).map_err(e)?;
    let mut src = LevelTable::new(16);
    for k in 1..=16u64 {
        let col = invariants_vandermonde(k, |n| src.coeff(n, k)).map_err(e)?;
        ensure(col.as_slice() == t.column(k), || format!("column k = {k}"))?;
    }
    ensure(t.column(1) == qs(&["-1"]).as_slice(), || "a_(1,1)".into())?;
    ensure(t.column(3) == qs(&["-1/90", "1/72", "-1/360"]).as_slice(), || "k = 3".into())?;
    ensure(t.column(4) == qs(&["-1/560", "7/2880", "-1/1440", "1/20160"]).as_slice(), || "k = 4".into())?;
    Ok("kmax = 16".into())
}

fn bp_vectors() -> Outcome {
    let cases: [(u64, Stages, Stages); 2] = [
        (
            3,
            vec![vec!["-1/2", "-21/2", "-357/2"], vec!["-1/2", "-5/24", "-7/8"], vec!["-1/2", "-5/24", "-1/360"]],
            vec![vec!["-1/2", "-11/360", "-1/360"], vec!["-1/90", "1/72", "-1/360"]],
        ),
        (
            4,
            vec![
                vec!["1/16", "165/16", "12597/16", "840565/16"],
                vec!["1/16", "41/192", "259/64", "12937/192"],
                vec!["1/16", "41/192", "23/1440", "19/288"],
                vec!["1/16", "41/192", "23/1440", "1/20160"],
            ],
            vec![
                vec!["1/16", "41/192", "11/3360", "1/20160"],
                vec!["1/16", "9/2240", "1/10080", "1/20160"],
                vec!["-1/560", "7/2880", "-1/1440", "1/20160"],
            ],
        ),
    ];
    for (k, nu, a) in cases {
        let mut src = LevelTable::new(k);
        let trace = BpWorkspace::new(k, |n| src.coeff(n, k)).map_err(e)?.run_traced();
        for (i, want) in nu.iter().enumerate() {
            ensure(trace.nu[i] == qs(want), || format!("k = {k}, nu^({})", i + 1))?;
        }
        for (t, want) in a.iter().enumerate() {
            let stage = k as usize - 1 - t;
            ensure(trace.a_stage(stage) == qs(want).as_slice(), || format!("k = {k}, a^({stage})"))?;
        }
        ensure(trace.result == qs(a.last().unwrap()), || format!("k = {k}, result"))?;
    }
    Ok("k = 3, 4".into())
}

fn catalan_oracle(m: u64) -> BigInt {
    // C(2m, m) / (m + 1) by the product formula
    let mut c = BigInt::from(1);
    for i in 0..m {
        c = c * BigInt::from(2 * (2 * i + 1)) / BigInt::from(i + 2);
    }
    c
}

fn weighted_catalan_check() -> Outcome {
    let lim = Limits::default();
    for k in 1..=16u64 {
        ensure(count(k).map_err(e)? == catalan_oracle(k - 1), || format!("count k = {k}"))?;
    }
    let diag12 = diagonal_recursive(12).map_err(e)?;
    let table12 = invariants_recursive(12).map_err(e)?;
    for k in 1..=12u64 {
        let w = weighted_catalan(k, CatalanMethod::Enumerate, &lim).map_err(e)?;
        ensure(w == diag12[k as usize - 1], || format!("enumeration vs diagonal k = {k}"))?;
        ensure(&w == table12.get(k, k), || format!("enumeration vs table k = {k}"))?;
    }
    let dp = weighted_catalan_dp(64).map_err(e)?;
    let diag64 = diagonal_recursive(64).map_err(e)?;
    let table64 = invariants_vandermonde_table(64).map_err(e)?;
    for k in 1..=64u64 {
        let i = k as usize - 1;
        ensure(dp[i] == diag64[i], || format!("convolution vs diagonal k = {k}"))?;
        ensure(&dp[i] == table64.get(k, k), || format!("convolution vs table k = {k}"))?;
    }
    let want: [(u64, Vec<u64>); 3] = [(3, vec![2]), (4, vec![1, 4]), (5, vec![2, 4, 8])];
    for (k, mults) in want {
        let mut got: Vec<u64> =
            grouped_weights(k, &lim).map_err(e)?.values().map(|c| u64::try_from(c).unwrap()).collect();
        got.sort();
        ensure(got == mults, || format!("grouped k = {k}: {got:?}"))?;
    }
    Ok("count k <= 16, enumeration k <= 12, convolution k <= 64, groups k = 3,4,5".into())
}

fn closed_forms() -> Outcome {
    let ps = gen_p_all(10, &Limits::default()).map_err(e)?;
    let mut used = 0;
    for (n, p) in ps.iter().enumerate() {
        let n32 = n as u32;
        let c = p.coeffs();
        let m = 1usize << n;
        if n >= 1 {
            let four_n = BigInt::from(4).pow(n32);
            ensure(c[1] == -&four_n, || format!("c_({n},2) = -2^(2n)"))?;
            for k in 1..=3u32 {
                let want = c.get(k as usize).cloned().unwrap_or_default();
                ensure(closed_form_low(n32, k).map_err(e)? == BigRational::from_integer(want), || {
                    format!("c_({n},{})", 2 * k)
                })?;
                used += 1;
            }
        }
        for j in 1..=4u32 {
            if m < j as usize {
                continue;
            }
            if let Ok(v) = closed_form_top(n32, j) {
                ensure(v == c[m - j as usize], || format!("top j = {j}, n = {n}"))?;
                used += 1;
            }
        }
    }
    Ok(format!("{used} evaluations, n <= 10"))
}

fn numeric() -> Outcome {
    let ps = gen_p_all(10, &Limits::default()).map_err(e)?;
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let angles: Vec<_> = (0..100).map(|_| random_angle(&mut rng, 256)).collect();
    let mut worst = f64::NEG_INFINITY;
    for (n, p) in ps.iter().enumerate() {
        let r = root_residual_with(p, n as u32, 256);
        worst = worst.max(r.log2_abs());
        ensure(r.abs_below_pow2(100), || format!("root residual n = {n}: 2^{:.1}", r.log2_abs()))?;
        for theta in &angles {
            let r = trig_residual_with(p, n as u32, theta, 256);
            worst = worst.max(r.log2_abs());
            ensure(r.abs_below_pow2(100), || format!("trig residual n = {n}: 2^{:.1}", r.log2_abs()))?;
        }
    }
    let worst = if worst.is_finite() { format!("2^{worst:.1}") } else { "0 at 256-bit resolution".into() };
    Ok(format!("n <= 10, 100 angles, worst residual {worst}"))
}

fn shift_probe_check() -> Outcome {
    let mut notes = Vec::new();
    for e_ in 4..=8u32 {
        let probe = shift_probe(e_, 256, 100, &Limits::default()).map_err(e)?;
        ensure(probe.vanishing.len() == 1, || format!("e = {e_}: vanishing {:?}", probe.vanishing))?;
        let idx = probe.vanishing[0];
        notes.push(format!("e={e_}: index {idx} (e-{})", e_ - idx));
    }
    Ok(notes.join(", "))
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("golden polynomials", 100, golden_polynomials),
        ("q equals p", 5_000, q_equals_p),
        ("cyclotomic identity", 10_000, cyclotomic),
        ("back-substitution", 5_000, backsub),
        ("level recursion", 10_000, level_recursion),
        ("invariant table", 10_000, invariant_table),
        ("BP golden vectors", 1_000, bp_vectors),
        ("weighted Catalan", 20_000, weighted_catalan_check),
        ("closed forms", 1_000, closed_forms),
        ("numeric certification", 10_000, numeric),
        ("shift probe", 10_000, shift_probe_check),
    ];
    let mut failed = 0;
    for (i, (name, budget_ms, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = f();
        let elapsed = start.elapsed();
        let over = elapsed > Duration::from_millis(*budget_ms);
        let (status, detail) = match (&outcome, over) {
            (Ok(d), false) => ("PASS", d.clone()),
            (Ok(d), true) => ("FAIL", format!("{d}; over time budget")),
            (Err(d), _) => ("FAIL", d.clone()),
        };
        if status == "FAIL" {
            failed += 1;
        }
        println!(
            "criterion {:>2} {:<22} {status}  [{} ms / {} ms]  {detail}",
            i + 1,
            name,
            elapsed.as_millis(),
            budget_ms
        );
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
