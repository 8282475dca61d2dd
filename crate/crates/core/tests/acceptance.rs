//! One pass/fail line per acceptance criterion. Run with `--nocapture` to
//! see the report; the test fails if any line fails.

mod common;

use std::time::{Duration, Instant};

use dtac_core::ast::{Program, Stmt, Visibility};
use dtac_core::corpus::{case, replay, Replay};
use dtac_core::guard::check_guard;
use dtac_core::oracle::Fixture;
use dtac_core::parser::{parse_expr, parse_program};
use dtac_core::printer::print_expr;

const REPLAY_LIMIT: Duration = Duration::from_secs(1);
const SEARCH_TRIALS: usize = 1000;
const SEARCH_LIMIT: Duration = Duration::from_secs(60);
const MUTATIONS_EACH: usize = 500;
const ROUND_TRIPS: u64 = 10_000;
const STDLIB_SIZE: usize = 27;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn run_case(name: &str) -> Result<Replay, String> {
    let c = case(name).ok_or_else(|| format!("no corpus case {name}"))?;
    replay(&c).map_err(|e| e.to_string())
}

fn has_clause(p: &Program, method: &str, requires: bool, text: &str) -> bool {
    let want = parse_expr(text).unwrap();
    p.method(method).is_some_and(|m| if requires { &m.requires } else { &m.ensures }.contains(&want))
}

fn lemma_replay() -> Outcome {
    let c = case("lemma").ok_or("no lemma case")?;
    let start = Instant::now();
    let r = replay(&c).map_err(|e| e.to_string())?;
    let took = start.elapsed();
    ensure(r.matches(&parse_program(c.expected).unwrap()), || "final program differs from the expected one".into())?;
    ensure(took < REPLAY_LIMIT, || format!("took {took:?}"))?;
    Ok(format!("{} steps, {took:?}", r.steps.len()))
}

fn conj_split() -> Outcome {
    let r = run_case("conj")?;
    for g in ["SubGoalA", "SubGoalB"] {
        let m = r.program.method(g).ok_or(format!("{g} missing"))?;
        ensure(m.is_ghost && m.visibility == Visibility::Generated, || format!("{g} is not a generated ghost method"))?;
    }
    let body = r.program.method("MainGoal").and_then(|m| m.body.clone()).unwrap_or_default();
    let calls: Vec<String> = body
        .iter()
        .filter_map(|s| match s {
            Stmt::Call { callee, .. } => Some(callee.to_string()),
            _ => None,
        })
        .collect();
    ensure(calls == ["SubGoalA", "SubGoalB"], || format!("MainGoal calls {calls:?}"))?;
    ensure(has_clause(&r.program, "SubGoalA", false, "A()"), || "SubGoalA does not ensure A()".into())?;
    ensure(has_clause(&r.program, "SubGoalB", false, "B()"), || "SubGoalB does not ensure B()".into())?;
    let g = check_guard(&r.initial, &r.program);
    ensure(g.ok(), || g.to_string())?;
    Ok("SubGoalA, SubGoalB generated and called; guard ok".into())
}

fn safer_null() -> Outcome {
    let c = case("safer-null").ok_or("no case")?;
    let r = replay(&c).map_err(|e| e.to_string())?;
    ensure(has_clause(&r.program, "selected_thrusters", true, "comb != null"), || "requires missing".into())?;
    ensure(has_clause(&r.program, "integrated_cmds", false, "comb != null"), || "ensures missing".into())?;
    let before = Fixture::load(c.fixture, &r.initial).map_err(|e| e.to_string())?.get_errors(&r.initial).len();
    ensure(r.open_errors < before, || format!("{before} -> {} errors", r.open_errors))?;
    Ok(format!("open errors {before} -> {}", r.open_errors))
}

/// Assertions in the innermost else branch of selected_thrusters.
fn last_branch_asserts(p: &Program) -> Vec<String> {
    let body = p.method("selected_thrusters").and_then(|m| m.body.clone()).unwrap_or_default();
    let inner = body.iter().find_map(|s| match s {
        Stmt::If { else_block: Some(e), .. } => e.iter().find_map(|s| match s {
            Stmt::If { else_block: Some(e), .. } => Some(e.clone()),
            _ => None,
        }),
        _ => None,
    });
    let mut out: Vec<String> = inner
        .unwrap_or_default()
        .iter()
        .filter_map(|s| match s {
            Stmt::Assert(e) => Some(print_expr(e)),
            _ => None,
        })
        .collect();
    out.sort();
    out
}

fn four_thruster() -> Outcome {
    let c = case("safer-four").ok_or("no case")?;
    for t in ["assert-conj-I", "assert-up-ctxt", "assert-strengthen", "assert-comb1", "pre-I", "assert-to-post"] {
        ensure(c.script.contains(t), || format!("script does not use {t}"))?;
    }
    for eq in ["|?x| <= ?n / 2 && |?y| <= ?n / 2", "|?x| <= ?n && |?y| == 0", "|?x| == 0 && |?y| <= ?n"] {
        ensure(c.script.contains(eq), || format!("script does not rewrite with `{eq}`"))?;
    }
    let r = replay(&c).map_err(|e| e.to_string())?;
    let k = r.steps.iter().position(|h| h.invocation == "assert-conj-I()").ok_or("no assert-conj-I step")?;
    let mut want: Vec<String> =
        ["|lrud_main| <= 4/2", "|bf_main| <= 4/2"].iter().map(|s| print_expr(&parse_expr(s).unwrap())).collect();
    want.sort();
    let mid = last_branch_asserts(&r.steps[k].program);
    ensure(mid == want, || format!("midpoint assertions {mid:?}"))?;
    let p = &r.program;
    let contracts = [
        ("BF", false, "|man| <= 4/2"),
        ("LRUD", false, "|man| <= 4/2"),
        ("LRUD", false, "|opt| <= 4/2"),
        ("BF", false, "A == ZERO && B == ZERO && C == ZERO ==> |opt| == 0"),
        ("BF", false, "A == ZERO && B == ZERO && C == ZERO ==> |man| == 0"),
        ("BF", false, "A == ZERO && !(B == ZERO && C == ZERO) ==> |opt| == 0"),
        ("LRUD", false, "A == ZERO && B == ZERO ==> |opt| == 0"),
        ("selected_thrusters", true, "comb.tran.X != ZERO ==> comb.tran.Y == ZERO && comb.tran.Z == ZERO"),
    ];
    for (m, req, text) in contracts {
        ensure(has_clause(p, m, req, text), || format!("{m} lacks `{text}`"))?;
    }
    let g = check_guard(&r.initial, p);
    ensure(g.ok(), || g.to_string())?;
    ensure(r.open_errors == 0, || format!("{} errors remain open", r.open_errors))?;
    Ok(format!("{} steps; midpoint {{{}}}; contracts present", r.steps.len(), mid.join(", ")))
}

fn property_suite() -> Outcome {
    let s = common::search::random_sequences(SEARCH_TRIALS, 2024)?;
    ensure(s.elapsed < SEARCH_LIMIT, || format!("took {:?}", s.elapsed))?;
    Ok(format!(
        "{} trials, {} accepted steps ({} before the engine's guard filter), 0 counterexamples, {:?}",
        s.trials, s.accepted, s.raw_accepted, s.elapsed
    ))
}

fn mutation_suite() -> Outcome {
    let t = common::mutation::mutation_suite(MUTATIONS_EACH, 99)?;
    Ok(format!("{} legal accepted, {} illegal rejected with the right kind", t.legal_accepted, t.illegal_rejected))
}

fn stdlib_load() -> Outcome {
    let n = common::stdlib::manifest()?;
    ensure(n == STDLIB_SIZE, || format!("{n} definitions"))?;
    let g = common::stdlib::when_guards()?;
    Ok(format!("{n} definitions, acyclic, {g} when-guard checks"))
}

fn round_trip() -> Outcome {
    let n = common::roundtrip::programs(ROUND_TRIPS, 7)?;
    let d = common::roundtrip::stdlib_source()?;
    Ok(format!("{n} programs, {d} stdlib definitions"))
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("LemmaLength replay", lemma_replay),
        ("conj-I composite", conj_split),
        ("SAFER null strategy", safer_null),
        ("four-thruster strategy", four_thruster),
        ("random tactic sequences", property_suite),
        ("guard mutation suite", mutation_suite),
        ("stdlib load and when-guards", stdlib_load),
        ("parse/print round trip", round_trip),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("criterion {}: PASS {name}: {detail}", i + 1),
            Err(e) => {
                failed += 1;
                println!("criterion {}: FAIL {name}: {e}", i + 1);
            }
        }
    }
    assert_eq!(failed, 0, "{failed} criteria failed");
}
