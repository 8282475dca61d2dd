use dtac_core::engine::{Engine, NoErrors};
use dtac_core::parser::parse_program;
use dtac_core::printer::print_program;
use dtac_core::stdlib::load_stdlib;
use dtac_core::tactic::{parse_invocation, parse_script};

fn run(src: &str, script: &str) -> String {
    let lib = load_stdlib().unwrap().library;
    let engine = Engine::new(&lib);
    let mut p = parse_program(src).unwrap();
    for t in parse_script(script).unwrap() {
        p = engine.run(&p, &t, &NoErrors).unwrap_or_else(|e| panic!("{t:?}: {e}")).program;
    }
    print_program(&p)
}

#[test]
fn lemma_length_replay() {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/corpus/lemma/");
    let src = std::fs::read_to_string(format!("{dir}program.mdfy")).unwrap();
    let script = std::fs::read_to_string(format!("{dir}script.dtac")).unwrap();
    let want = parse_program(&std::fs::read_to_string(format!("{dir}expected.mdfy")).unwrap()).unwrap();
    let got = parse_program(&run(&src, &script)).unwrap();
    assert_eq!(print_program(&got.without_markers()), print_program(&want.without_markers()));
}

#[test]
fn assert_moves_up_through_assignment() {
    let out = run("method f(x: int) returns (y: int) { y := x + 1; assert y > 1; }", "assert-up()");
    let (a, y) = (out.find("assert x + 1 > 1;").unwrap(), out.find("y := x + 1;").unwrap());
    assert!(a < y, "{out}");
}

#[test]
fn conjunction_split_and_recombine() {
    let out = run("method f(x: int) { assert x > 0 && x < 9; }", "assert-conj-I()");
    assert!(out.contains("assert x > 0;\n  assert x < 9;"), "{out}");
    let out = run("method f(a: bool, b: bool, c: bool) { assert a ==> b; assert a ==> c; }", "assert-comb1()");
    assert!(out.contains("assert b ==> c;"), "{out}");
}

#[test]
fn public_precondition_is_refused() {
    let lib = load_stdlib().unwrap().library;
    let p = parse_program("public method f(x: int) { }").unwrap();
    let t = parse_invocation("pre-I(x > 0)").unwrap();
    assert!(Engine::new(&lib).run(&p, &t, &NoErrors).is_err());
    let p = parse_program("method f(x: int) { }").unwrap();
    let out = Engine::new(&lib).run(&p, &t, &NoErrors).unwrap();
    assert_eq!(out.program.method("f").unwrap().requires.len(), 1);
}
