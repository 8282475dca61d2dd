use std::fs;
use std::path::PathBuf;

use dtac_cli::commands::{apply, check, parse, stdlib_list, ApplyArgs};

fn corpus(case: &str, file: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/corpus").join(case).join(file)
}

fn args(case: &str) -> ApplyArgs {
    ApplyArgs {
        program: corpus(case, "program.mdfy"),
        script: corpus(case, "script.dtac"),
        errors: Some(corpus(case, "fixture.errs")),
        out: None,
        library: None,
        diff: false,
        trace: false,
    }
}

#[test]
fn apply_writes_the_final_program() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out.mdfy");
    let o = apply(&ApplyArgs { out: Some(out.clone()), ..args("safer-null") }).unwrap();
    assert_eq!(o.code, 0, "{}", o.stderr);
    assert!(o.stderr.contains("11 open verifier error(s)"), "{}", o.stderr);
    let text = fs::read_to_string(out).unwrap();
    assert!(text.contains("requires comb != null"));
}

#[test]
fn apply_shows_trace_and_diff() {
    let o = apply(&ApplyArgs { diff: true, trace: true, ..args("lemma") }).unwrap();
    assert_eq!(o.code, 0);
    assert!(o.stdout.contains("== case-I(n == 0)[?meth := LemmaLength]"), "{}", o.stdout);
    assert!(o.stdout.contains("+    LemmaLength(n - 1);"), "{}", o.stdout);
}

#[test]
fn failing_step_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let script = dir.path().join("bad.dtac");
    fs::write(&script, "assert-I(n > 0)[?meth := LemmaLength]; assert-comb1()").unwrap();
    let o = apply(&ApplyArgs { script, errors: None, ..args("lemma") }).unwrap();
    assert_eq!(o.code, 2);
    assert!(o.stderr.starts_with("step 2 failed:"), "{}", o.stderr);
}

#[test]
fn extra_library_is_loaded() {
    let o = apply(&ApplyArgs { library: Some(corpus("conj", "library.dtac")), ..args("conj") }).unwrap();
    assert_eq!(o.code, 0, "{}", o.stderr);
    assert!(o.stdout.contains("/*generated*/ ghost method SubGoalA()"));
}

#[test]
fn check_accepts_spec_edits_and_rejects_code_edits() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b, c) = (dir.path().join("a"), dir.path().join("b"), dir.path().join("c"));
    fs::write(&a, "method f(x: int) returns (y: int) { y := x; }").unwrap();
    fs::write(&b, "method f(x: int) returns (y: int) ensures y == x { y := x; }").unwrap();
    fs::write(&c, "method f(x: int) returns (y: int) { y := x + 1; }").unwrap();
    assert_eq!(check(&a, &b).unwrap().code, 0);
    let o = check(&a, &c).unwrap();
    assert_eq!(o.code, 1);
    assert!(o.stdout.contains("CodeChanged"), "{}", o.stdout);
}

#[test]
fn parse_prints_canonical_text_and_type_errors() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("p");
    fs::write(&p, "method  f ( x:int ) { assert x>0 ; }").unwrap();
    let o = parse(&p).unwrap();
    assert_eq!(o.code, 0);
    assert_eq!(o.stdout, "private method f(x: int)\n{\n  assert x > 0;\n}\n");
    fs::write(&p, "method f(x: int) { assert y > 0; }").unwrap();
    assert_eq!(parse(&p).unwrap().code, 1);
}

#[test]
fn stdlib_listing_names_every_tactic() {
    let o = stdlib_list().unwrap();
    assert_eq!(o.stdout.lines().count(), 27);
    assert!(o.stdout.contains("assert-I/1"));
}
