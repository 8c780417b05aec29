use std::fs;
use std::path::{Path, PathBuf};

use subalg::abelian::decide_additivity;
use subalg::clone::{find_maltsev_witnesses, find_subtraction_witnesses, Verdict, DEFAULT_CAP};
use subalg::corpus;
use subalg_cli::report::{AnalysisReport, VerdictDoc};
use subalg_cli::{analyze, run, Outcome, EXIT_NO, EXIT_UNKNOWN, EXIT_USAGE, EXIT_YES};

fn cli(args: &[&str]) -> Outcome {
    run(std::iter::once("subalg").chain(args.iter().copied()))
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn code_of(v: Verdict) -> i32 {
    match v {
        Verdict::Yes => EXIT_YES,
        Verdict::No => EXIT_NO,
        Verdict::Unknown => EXIT_UNKNOWN,
    }
}

#[test]
fn documented_examples() {
    let dir = tempfile::tempdir().unwrap();
    let z2 = write(
        dir.path(),
        "z2.json",
        r#"{"size":2,"zero":0,"operations":[{"name":"sub","arity":2,"table":[0,1,1,0]}]}"#,
    );
    let p3 = write(dir.path(), "pointedset3.json", r#"{"size":3,"zero":0,"operations":[]}"#);
    let r = write(dir.path(), "r.json", r#"{"arity":2,"tuples":[[0,0],[1,1],[1,0]]}"#);
    let z2 = z2.to_str().unwrap();

    let out = cli(&["subtractive", z2]);
    assert_eq!(out.code, 0);
    assert!(out.stdout.contains("witness: sub(x0,x1)"), "{}", out.stdout);

    let out = cli(&["subtractive", p3.to_str().unwrap()]);
    assert_eq!(out.code, 1);
    assert!(
        out.stdout.contains("clone = {0, x0, x1}; search complete"),
        "{}",
        out.stdout
    );

    let out = cli(&["closed", z2, "--relation", r.to_str().unwrap(), "--matrix", "diag"]);
    assert_eq!(out.code, 1);
    assert!(out.stdout.contains("counterexample: x=1"), "{}", out.stdout);
    assert!(out.stdout.contains("missing: (0,1)"), "{}", out.stdout);
}

#[test]
fn exit_codes_match_verdicts_on_corpus() {
    for alg in corpus::all() {
        let name = alg.name();
        let sub = find_subtraction_witnesses(&alg, DEFAULT_CAP).unwrap().verdict();
        assert_eq!(cli(&["subtractive", name]).code, code_of(sub), "{name}");
        let mal = find_maltsev_witnesses(&alg, DEFAULT_CAP).unwrap().verdict();
        assert_eq!(cli(&["maltsev", name]).code, code_of(mal), "{name}");
        let add = decide_additivity(&alg, DEFAULT_CAP).unwrap().verdict();
        assert_eq!(cli(&["additive", name]).code, code_of(add), "{name}");
        let replay = cli(&["replay", name]).code;
        assert_eq!(replay, if sub == Verdict::Yes { EXIT_YES } else { EXIT_NO }, "{name}");
    }
}

#[test]
fn caps_turn_answers_unknown() {
    let out = cli(&["subtractive", "s3", "--cap", "5"]);
    assert_eq!(out.code, EXIT_UNKNOWN);
    assert!(
        out.stdout.contains("search incomplete (cap 5 reached)"),
        "{}",
        out.stdout
    );
    assert_eq!(cli(&["maltsev", "s3", "--cap", "10"]).code, EXIT_UNKNOWN);
    // the table search still refutes additivity
    assert_eq!(cli(&["additive", "s3", "--cap", "5"]).code, EXIT_NO);
    assert_eq!(cli(&["subtractive", "s3", "--cap", "0"]).code, EXIT_YES);
    let out = cli(&["sweep", "s3", "--matrix", "proof3"]);
    assert_eq!(out.code, EXIT_UNKNOWN, "{}", out.stderr);
    assert!(out.stderr.contains("exceeds the limit"), "{}", out.stderr);
}

#[test]
fn usage_and_input_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(cli(&[]).code, EXIT_USAGE);
    assert_eq!(cli(&["frobnicate", "z2"]).code, EXIT_USAGE);
    assert_eq!(cli(&["subtractive", "no-such-algebra"]).code, EXIT_USAGE);
    assert_eq!(
        cli(&["closed", "z2", "--relation", "r.json", "--matrix", "bogus"]).code,
        EXIT_USAGE
    );

    let bad = write(dir.path(), "bad.json", r#"{"size":2,"zero":2,"operations":[]}"#);
    let out = cli(&["subtractive", bad.to_str().unwrap()]);
    assert_eq!(out.code, EXIT_USAGE);
    assert!(out.stderr.contains("zero out of range"), "{}", out.stderr);

    let short = write(
        dir.path(),
        "short.json",
        r#"{"size":2,"zero":0,"operations":[{"name":"sub","arity":2,"table":[0,1,1]}]}"#,
    );
    let out = cli(&["maltsev", short.to_str().unwrap()]);
    assert_eq!(out.code, EXIT_USAGE);
    assert!(out.stderr.contains("expected 4 entries"), "{}", out.stderr);

    let syntax = write(dir.path(), "syntax.json", "{\"size\": 2,\n \"zero\": }");
    let out = cli(&["additive", syntax.to_str().unwrap()]);
    assert_eq!(out.code, EXIT_USAGE);
    assert!(out.stderr.contains("syntax.json:2:"), "{}", out.stderr);

    let wide = write(dir.path(), "wide.json", r#"{"arity":2,"tuples":[[0,5]]}"#);
    let out = cli(&["closed", "z2", "--relation", wide.to_str().unwrap(), "--matrix", "diag"]);
    assert_eq!(out.code, EXIT_USAGE);
    assert!(out.stderr.contains("out of range"), "{}", out.stderr);

    let ternary = write(dir.path(), "t.json", r#"{"arity":3,"tuples":[[0,0,0]]}"#);
    let out = cli(&[
        "closed",
        "z2",
        "--relation",
        ternary.to_str().unwrap(),
        "--matrix",
        "diag",
    ]);
    assert_eq!(out.code, EXIT_USAGE);
    assert!(out.stderr.contains("arity 3"), "{}", out.stderr);
}

#[test]
fn duplicate_tuples_warn() {
    let dir = tempfile::tempdir().unwrap();
    let r = write(dir.path(), "dup.json", r#"{"arity":2,"tuples":[[0,0],[0,0]]}"#);
    let out = cli(&["closed", "z2", "--relation", r.to_str().unwrap(), "--matrix", "vars"]);
    assert_eq!(out.code, EXIT_YES);
    assert!(out.stderr.contains("1 duplicate tuple(s) removed"), "{}", out.stderr);
}

#[test]
fn closure_and_extensions() {
    let dir = tempfile::tempdir().unwrap();
    let r = write(dir.path(), "r.json", r#"{"arity":2,"tuples":[[1,1],[1,0]]}"#);
    let out = cli(&[
        "closure",
        "pointed2",
        "--relation",
        r.to_str().unwrap(),
        "--matrix",
        "diag",
    ]);
    assert_eq!(out.code, EXIT_YES);
    assert!(out.stdout.contains("closure: {(0,1), (1,0), (1,1)}"), "{}", out.stdout);
    assert!(out.stdout.contains("added: 1"));

    let r3 = write(
        dir.path(),
        "r3.json",
        r#"{"arity":3,"tuples":[[0,0,0],[1,1,0],[1,0,0]]}"#,
    );
    let out = cli(&[
        "closed",
        "pointed2",
        "--relation",
        r3.to_str().unwrap(),
        "--matrix",
        "vars",
        "--extend",
        "uu0",
        "--format",
        "json",
    ]);
    assert_eq!(out.code, EXIT_NO);
    let v: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(v["result"]["matrix"], "vars+uu0");
    assert_eq!(v["result"]["counterexample"]["missing"], serde_json::json!([0, 1, 0]));
}

#[test]
fn corpus_listing() {
    let out = cli(&["--corpus"]);
    assert_eq!(out.code, 0);
    for name in corpus::NAMES {
        assert!(out.stdout.contains(name));
    }
}

#[test]
fn reports_round_trip() {
    for name in ["z3", "pointed2", "implication2", "semilattice2"] {
        let out = cli(&["report", name, "--format", "json"]);
        assert_eq!(out.code, 0);
        let report: AnalysisReport = serde_json::from_str(&out.stdout).unwrap();
        let alg = report.algebra.to_algebra("x").unwrap();
        assert_eq!(alg, corpus::by_name(name).unwrap());
        let again = analyze(&alg, report.cap).unwrap();
        assert_eq!(again.subtractive, report.subtractive);
        assert_eq!(again.maltsev, report.maltsev);
        assert_eq!(again.additive, report.additive);
        assert_eq!(again.proof, report.proof);
        assert_eq!(again.sweeps, report.sweeps);
    }
}

#[test]
fn unknown_verdicts_carry_the_cap() {
    let report = analyze(&corpus::s3(), 5).unwrap();
    assert_eq!(report.subtractive.verdict, VerdictDoc::Unknown);
    assert_eq!(report.subtractive.cap, 5);
    assert!(!report.subtractive.complete);
    assert_eq!(report.maltsev.verdict, VerdictDoc::Unknown);
    assert_eq!(report.maltsev.cap, 5);
}
