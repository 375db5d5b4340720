use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn cochain(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cochain")).args(args).output().expect("binary runs")
}

fn code(args: &[&str]) -> i32 {
    let out = cochain(args);
    out.status.code().expect("exit code")
}

fn json(args: &[&str]) -> Value {
    let mut all = args.to_vec();
    all.push("--json");
    let out = cochain(&all);
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn fixture(name: &str, text: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("cochain-cli-tests-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

const LAMBDA: &str = "algebra L over Q window 0..4\nbasis 0: 1\nbasis 1: t\nunit 1\n";

#[test]
fn success_per_subcommand() {
    let lambda = fixture("lambda.txt", LAMBDA);
    let l = lambda.to_str().unwrap();
    for args in [
        vec!["validate", "--input", l],
        vec!["cohomology", "--input", l],
        vec!["resolve", "--input", l, "--module", "k", "--stages", "6"],
        vec!["extreg", "--family", "polynomial", "--param", "1"],
        vec!["koszul", "--input", l],
        vec!["cmreg", "--family", "polynomial", "--param", "2", "--regime", "poly"],
        vec!["cmreg", "--family", "square-zero", "--regime", "finite", "--module", "free"],
        vec!["gamma", "--family", "polynomial", "--param", "1"],
        vec!["dualizing", "--family", "polynomial", "--param", "1"],
        vec!["duality-check", "--family", "square-zero"],
        vec!["local-duality", "--family", "polynomial", "--param", "3", "--module", "k"],
        vec!["e2", "--family", "polynomial", "--param", "2", "--params", "t"],
        vec!["check-regularity", "--family", "polynomial", "--param", "1", "--module", "k", "--truncation", "0"],
        vec!["check-regularity", "--field", "F7"],
        vec!["catalog", "--family", "exterior-on-one", "--param", "3"],
    ] {
        assert_eq!(code(&args), 0, "{args:?}");
    }
}

#[test]
fn resolving_k_over_lambda() {
    let lambda = fixture("lambda-resolve.txt", LAMBDA);
    let r = json(&["resolve", "--input", lambda.to_str().unwrap(), "--module", "k", "--stages", "6"]);
    let gens = r["result"]["generators"].as_array().unwrap();
    assert_eq!(gens.len(), 6);
    assert!(gens.iter().all(|g| g["degree"] == 0));
    assert_eq!(r["exit_code"], 0);
}

#[test]
fn dualizing_table_shows_the_twist() {
    let r = json(&["dualizing", "--family", "polynomial", "--param", "1"]);
    let right: Vec<&str> = r["result"]["right_action"].as_array().unwrap().iter().map(|v| v.as_str().unwrap()).collect();
    assert!(right.contains(&"e0.t = -e1"), "{right:?}");
    let left: Vec<&str> = r["result"]["left_action"].as_array().unwrap().iter().map(|v| v.as_str().unwrap()).collect();
    assert!(left.contains(&"t.e0 = e1"), "{left:?}");
    assert_eq!(r["result"]["twist_nontrivial"], true);
}

#[test]
fn extreg_of_zero_is_minus_infinity() {
    let r = json(&["extreg", "--family", "square-zero", "--module", "zero"]);
    assert_eq!(r["result"]["extreg"]["kind"], "neg-infinity");
    assert_eq!(r["result"]["extreg"]["display"], "-inf");
}

#[test]
fn certified_violation_exits_one() {
    let bad = fixture("disconnected.txt", "algebra A over Q window 0..2\nbasis 0: 1, z\nunit 1\n");
    let r = json(&["validate", "--input", bad.to_str().unwrap()]);
    assert_eq!(r["exit_code"], 1);
    assert_eq!(r["result"]["algebra"]["violations"][0]["axiom"], "connected");
    assert_eq!(code(&["validate", "--input", bad.to_str().unwrap()]), 1);
    let leibniz = fixture(
        "leibniz.txt",
        "algebra B over Q window 0..3\nbasis 0: 1\nbasis 1: x\nbasis 2: y\nunit 1\ndiff x = y\nmul x x = 0\nmodule M over B side left window 0..3\nbasis 0: m\nbasis 1: n\nbasis 2: p\nact x m = n\nact y m = p\n",
    );
    assert_eq!(code(&["validate", "--input", leibniz.to_str().unwrap()]), 1);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(code(&["frobnicate"]), 2);
    assert_eq!(code(&["extreg"]), 2);
    assert_eq!(code(&["resolve", "--family", "nonsense"]), 2);
    assert_eq!(code(&["resolve", "--family", "polynomial", "--module", "bogus"]), 2);
    assert_eq!(code(&["cohomology", "--family", "polynomial", "--window", "3..1"]), 2);
    let broken = fixture("broken.txt", "algebra A over Q window 0..4\nbasis 0: 1\nbasis 1: x\nbasis 3: y\nunit 1\ndiff x = y\n");
    let r = json(&["validate", "--input", broken.to_str().unwrap()]);
    assert_eq!(r["exit_code"], 2);
    assert!(r["result"]["error"].as_str().unwrap().starts_with("line 6, column 10"), "{r}");
}

#[test]
fn unsupported_and_indeterminate_exit_three() {
    assert_eq!(code(&["cmreg", "--family", "hybrid"]), 3);
    assert_eq!(code(&["cmreg", "--family", "polynomial", "--regime", "finite"]), 3);
    assert_eq!(code(&["dualizing", "--family", "hybrid"]), 3);
    assert_eq!(code(&["local-duality", "--family", "hybrid"]), 3);
    // Periodic resolution: Extreg is only claimed infinite.
    assert_eq!(code(&["extreg", "--family", "exterior-on-one", "--param", "3"]), 3);
}

#[test]
fn reports_are_deterministic_and_written_to_out() {
    let out = std::env::temp_dir().join(format!("cochain-report-{}.json", std::process::id()));
    let args = ["check-regularity", "--family", "square-zero", "--json"];
    let first = cochain(&args).stdout;
    let second = cochain(&args).stdout;
    assert_eq!(first, second);
    let mut with_out = args.to_vec();
    let path = out.to_str().unwrap().to_string();
    with_out.extend(["--out", &path]);
    let third = cochain(&with_out).stdout;
    assert_eq!(std::fs::read(&out).unwrap(), third);
    std::fs::remove_file(out).ok();
}

#[test]
fn catalog_output_parses_back() {
    let out = cochain(&["catalog", "--family", "polynomial", "--param", "2", "--field", "F3"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let doc = cochain_cli::document::parse(&text).unwrap();
    let a = doc.algebra(None).unwrap();
    assert_eq!(a.field().characteristic(), 3);
    let path = fixture("catalog.txt", &text);
    assert_eq!(code(&["validate", "--input", path.to_str().unwrap()]), 0);
    assert_eq!(code(&["cmreg", "--input", path.to_str().unwrap(), "--module", "A"]), 0);
}
