use std::path::Path;
use std::process::{Command, Output};

fn bin(args: &[&str], cache: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_chebytower"));
    cmd.args(args)
        .env_remove("CHEBYTOWER_MAX_DEGREE_LOG2")
        .env_remove("CHEBYTOWER_MAX_TREES")
        .env_remove("CHEBYTOWER_PRECISION");
    match cache {
        Some(dir) => cmd.env("CHEBYTOWER_CACHE_DIR", dir),
        None => cmd.env_remove("CHEBYTOWER_CACHE_DIR"),
    };
    cmd.output().expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = bin(args, None);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn code(args: &[&str]) -> i32 {
    bin(args, None).status.code().unwrap()
}

#[test]
fn poly_formats() {
    assert_eq!(ok(&["poly", "1"]).trim(), "x^4 - 4x^2 + 2");
    assert_eq!(ok(&["poly", "0", "--format", "json"]).trim(), r#"{"n":0,"coeffs":["-2","1"]}"#);
    assert_eq!(ok(&["poly", "2", "--format", "csv"]), "0,2\n1,-16\n2,20\n3,-8\n4,1\n");
    assert!(ok(&["poly", "2", "--format", "csv", "--header"]).starts_with("k,c\n"));
}

#[test]
fn coeff_methods() {
    assert!(ok(&["coeff", "4", "8", "--method", "backsub"]).contains("= 980628"));
    assert!(ok(&["coeff", "3", "0", "--method", "lemma"]).contains("= 2 "));
    let big = ok(&["coeff", "40", "2", "--method", "invariant", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&big).unwrap();
    let two = num_bigint::BigInt::from(2);
    let want: num_bigint::BigInt = (two.pow(160) - two.pow(80)) / 12;
    assert_eq!(v["value"], want.to_string());
}

#[test]
fn coeff_all_methods_agree() {
    let out = ok(&["coeff", "6", "5", "--all-methods"]);
    assert!(out.contains("agree: true"), "{out}");
    assert_eq!(out.lines().count(), 5);
    // square is skipped by the degree guard at n = 40, the rest agree
    let out = ok(&["coeff", "40", "3", "--all-methods"]);
    assert!(out.contains("square: skipped"), "{out}");
    assert!(out.contains("agree: true"));
}

#[test]
fn invariants_table() {
    let out = ok(&["invariants", "4"]);
    assert!(out.contains("k=4: -1/560, 7/2880, -1/1440, 1/20160"), "{out}");
    assert!(ok(&["invariants", "1"]).contains("k=1: -1/1"));
    assert_eq!(ok(&["invariants", "3", "--method", "both"]), ok(&["invariants", "3"]));
    assert_eq!(ok(&["invariants", "5", "--method", "vandermonde"]), ok(&["invariants", "5"]));
    assert!(ok(&["invariants", "2", "--format", "csv", "--header"]).starts_with("j,k,a\n1,1,-1/1\n"));
}

#[test]
fn trees_modes() {
    assert_eq!(ok(&["trees", "4"]).trim(), "5");
    assert_eq!(ok(&["trees", "3", "list"]), "3(2(1,1),1)\n3(1,2(1,1))\n");
    let grouped = ok(&["trees", "5", "grouped"]);
    let mut mults: Vec<u32> = grouped.lines().map(|l| l.rsplit(": ").next().unwrap().parse().unwrap()).collect();
    mults.sort();
    assert_eq!(mults, vec![2, 4, 8]);
    let json: serde_json::Value = serde_json::from_str(&ok(&["trees", "3", "grouped", "--format", "json"])).unwrap();
    assert_eq!(json[0]["count"], "2");
    assert!(ok(&["trees", "3", "weights"]).lines().all(|l| l.ends_with("-1/720")));
}

#[test]
fn exit_codes() {
    assert_eq!(code(&["coeff", "3", "9"]), 2);
    assert_eq!(code(&["coeff", "0", "1", "--method", "invariant"]), 2);
    assert_eq!(code(&["invariants", "0"]), 2);
    assert_eq!(code(&["poly", "20"]), 4);
    assert_eq!(code(&["poly", "3", "--max-degree-log2", "3"]), 4);
    assert_eq!(code(&["trees", "14", "list", "--max-trees", "100"]), 4);
    assert_eq!(code(&["frobnicate"]), 2);
}

#[test]
fn degree_guard_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_chebytower"))
        .args(["poly", "4"])
        .env("CHEBYTOWER_MAX_DEGREE_LOG2", "4")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn json_is_stable() {
    for args in [&["invariants", "6", "--format", "json"][..], &["trees", "5", "list", "--format", "json"]] {
        assert_eq!(ok(args), ok(args));
    }
}

#[test]
fn verify_small_scales() {
    assert!(ok(&["verify", "--n-max", "1", "--k-max", "1", "--precision", "64"]).contains("PASS"));
    let out = ok(&["verify", "--n-max", "4", "--k-max", "4", "--precision", "128"]);
    assert!(out.lines().any(|l| l.starts_with("cyclotomic_identity n=4: pass")), "{out}");
    let json: serde_json::Value =
        serde_json::from_str(&ok(&["verify", "--n-max", "2", "--k-max", "2", "--precision", "64", "--format", "json"]))
            .unwrap();
    assert!(json["checks"].as_array().unwrap().iter().all(|c| c["status"] != "fail"));
}

#[test]
fn verify_failure_exits_three() {
    assert_eq!(code(&["verify", "--n-max", "1", "--k-max", "1", "--precision", "32"]), 3);
}

#[test]
fn cache_lifecycle() {
    let dir = tempfile::tempdir().unwrap();
    let d = Some(dir.path());
    let run = |args: &[&str]| bin(args, d);
    assert_eq!(String::from_utf8(run(&["cache", "path"]).stdout).unwrap().trim(), dir.path().display().to_string());
    assert!(run(&["cache", "save", "5"]).status.success());
    let loaded = run(&["cache", "load", "5"]);
    assert!(loaded.status.success());
    assert_eq!(String::from_utf8(loaded.stdout).unwrap(), ok(&["invariants", "5"]));

    let file = dir.path().join("invariants-k5.json");
    let text = std::fs::read_to_string(&file).unwrap().replace("1/20160", "1/20161");
    std::fs::write(&file, text).unwrap();
    assert_eq!(run(&["cache", "load", "5"]).status.code(), Some(3));
    let healed = run(&["invariants", "5", "--cache", "on"]);
    assert!(healed.status.success());
    assert!(String::from_utf8_lossy(&healed.stderr).contains("recomputed"));
    assert!(run(&["cache", "load", "5"]).status.success());

    assert!(String::from_utf8(run(&["cache", "clear"]).stdout).unwrap().contains("removed 1"));
    assert_eq!(run(&["cache", "load", "5"]).status.code(), Some(2));
}
