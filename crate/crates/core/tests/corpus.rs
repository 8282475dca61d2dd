use dtac_core::corpus::{case, cases, replay};
use dtac_core::guard::check_guard;
use dtac_core::parser::parse_program;
use dtac_core::printer::print_program;
use dtac_core::typecheck::typecheck;

/// Set DTAC_BLESS=1 to rewrite the stored step summaries.
fn bless() -> bool {
    std::env::var_os("DTAC_BLESS").is_some()
}

#[test]
fn every_case_replays_to_its_expected_program() {
    for c in cases() {
        let r = replay(&c).unwrap_or_else(|e| panic!("{}: {e}", c.name));
        let want = parse_program(c.expected).unwrap();
        assert!(r.matches(&want), "{}:\n{}", c.name, print_program(&r.program));
        assert!(typecheck(&r.program).is_empty(), "{}: {:?}", c.name, typecheck(&r.program));
        let g = check_guard(&r.initial, &r.program);
        assert!(g.ok(), "{}: {g}", c.name);
        if bless() {
            let path = format!("{}/corpus/{}/summary.txt", env!("CARGO_MANIFEST_DIR"), c.name);
            std::fs::write(path, r.summary()).unwrap();
        } else {
            assert_eq!(r.summary(), c.summary, "{}", c.name);
        }
    }
}

#[test]
fn safer_null_strategy_discharges_the_null_errors() {
    let c = case("safer-null").unwrap();
    let r = replay(&c).unwrap();
    let text = print_program(&r.program);
    let sel = &text[text.find("method selected_thrusters").unwrap()..];
    assert!(sel[..sel.find('{').unwrap()].contains("requires comb != null"));
    let ic = &text[text.find("method integrated_cmds").unwrap()..];
    assert!(ic[..ic.find('{').unwrap()].contains("ensures comb != null"));
    let before = dtac_core::oracle::Fixture::load(c.fixture, &r.initial).unwrap().get_errors(&r.initial).len();
    assert!(r.open_errors < before, "{} -> {}", before, r.open_errors);
}

#[test]
fn failing_step_is_reported_with_its_index() {
    let mut c = case("lemma").unwrap();
    c.script = "case-I(n == 0)[?meth := LemmaLength]; assert-up-ctxt()";
    let e = replay(&c).unwrap_err().to_string();
    assert!(e.starts_with("step 2 `assert-up-ctxt()` failed"), "{e}");
}
