use dtac_core::engine::Engine;
use dtac_core::oracle::{Fixture, NULL_ERROR, PRECONDITION_ERROR};
use dtac_core::parser::parse_program;
use dtac_core::printer::print_program;
use dtac_core::stdlib::load_stdlib;
use dtac_core::tactic::parse_script;

pub const NAMES: [&str; 27] = [
    "assert-I", "post-I", "pre-I", "assert-E", "pre-E", "post-E", "post-to-assert", "assert-to-pre",
    "assert-to-post", "assert-rewr", "assert-up1", "assert-up2", "assert-up3", "assert-up", "post-to-post",
    "pre-to-assert", "null-to-assert", "pred-var-I", "ex-E", "case-I", "call-I", "IH-I", "assert-down",
    "assert-conj-I", "assert-up-ctxt", "assert-strengthen", "assert-comb1",
];

/// Runs `script` on `src` under `fixture`; the final program text or the
/// first failure.
pub fn run(src: &str, fixture: &str, script: &str) -> Result<String, String> {
    run_with("", src, fixture, script)
}

/// As `run`, with extra tactic definitions.
pub fn run_with(defs: &str, src: &str, fixture: &str, script: &str) -> Result<String, String> {
    let lib = load_stdlib().map_err(|e| e.to_string())?.library;
    let lib = if defs.is_empty() { lib } else { lib.extend(defs).map_err(|e| e.to_string())? };
    let engine = Engine::new(&lib);
    let mut p = parse_program(src).map_err(|e| e.to_string())?;
    let fx = Fixture::load(fixture, &p).map_err(|e| e.to_string())?;
    for t in parse_script(script).map_err(|e| e.to_string())? {
        p = engine.run(&p, &t, &fx).map_err(|e| e.to_string())?.program;
    }
    Ok(print_program(&p.without_markers()))
}

fn fires(name: &str, src: &str, fixture: &str, script: &str, needle: &str) -> Result<(), String> {
    let out = run(src, fixture, script).map_err(|e| format!("{name}: expected to fire, got {e}"))?;
    if out.contains(needle) {
        Ok(())
    } else {
        Err(format!("{name}: fired but `{needle}` is missing:\n{out}"))
    }
}

fn blocks(name: &str, src: &str, fixture: &str, script: &str) -> Result<(), String> {
    match run(src, fixture, script) {
        Ok(out) => Err(format!("{name}: expected to be blocked, got\n{out}")),
        Err(_) => Ok(()),
    }
}

const ERRS: &str = "class K { var k: int; }
method g(c: K) requires c != null { }
method f(c: K) { var x := c.k; g(c); }";

fn fixture(kind: &str, offset: usize, property: &str) -> String {
    format!("kind=\"{kind}\" selector=\"method:f {offset}\" property=\"{property}\"")
}

/// Every documented when-guard, fired and blocked; returns how many
/// checks ran.
pub fn when_guards() -> Result<usize, String> {
    let mut n = 0;
    let mut check = |r: Result<(), String>| r.map(|_| n += 1);

    let null = fixture(NULL_ERROR, 2, "c");
    let pre = fixture(PRECONDITION_ERROR, 3, "c != null");
    let near = fixture("target object may be null.", 2, "c");
    check(fires("null-to-assert", ERRS, &null, "null-to-assert()", "assert c != null;\n  var x := c.k;"))?;
    check(blocks("null-to-assert on a precondition error", ERRS, &pre, "null-to-assert()"))?;
    check(blocks("null-to-assert on a near-miss message", ERRS, &near, "null-to-assert()"))?;
    check(fires("pre-to-assert", ERRS, &pre, "pre-to-assert()", "assert c != null;\n  g(c);"))?;
    check(blocks("pre-to-assert on a null error", ERRS, &null, "pre-to-assert()"))?;
    check(blocks("pre-to-assert without errors", ERRS, "", "pre-to-assert()"))?;

    let vis = "public method p(x: int) ensures x > 0 { } method q(x: int) ensures x > 0 { }";
    check(blocks("pre-I on public", vis, "", "pre-I(x > 1)[?m := p]"))?;
    check(fires("pre-I on private", vis, "", "pre-I(x > 1)[?m := q]", "requires x > 1"))?;
    check(blocks("post-E on public", vis, "", "post-E()[?m := p]"))?;
    check(fires("post-E on private", vis, "", "post-E()[?m := q]", "method q(x: int)\n{"))?;

    let gen = "/*generated*/ ghost method L(n: int) { } method u(n: int) { }";
    check(fires("case-I on generated", gen, "", "case-I(n == 0)[?meth := L]", "if n == 0 {"))?;
    check(blocks("case-I on user code", gen, "", "case-I(n == 0)[?meth := u]"))?;
    check(fires("call-I of a ghost", gen, "", "call-I(L, 3)[?meth := u]", "L(3);"))?;
    check(blocks("call-I of compiled code", gen, "", "call-I(u, 3)[?meth := L]"))?;
    check(fires("IH-I", gen, "", "case-I(n == 0)[?meth := L]; IH-I()", "L(n - 1);"))?;
    check(blocks("IH-I without a case split", gen, "", "IH-I()"))?;
    Ok(n)
}

/// The shipped library: exact names, and cycles are refused on extension.
pub fn manifest() -> Result<usize, String> {
    let m = load_stdlib().map_err(|e| e.to_string())?;
    let mut got: Vec<&str> = m.library.defs().iter().map(|d| d.name.as_str()).collect();
    let mut want = NAMES.to_vec();
    got.sort_unstable();
    want.sort_unstable();
    if got != want {
        return Err(format!("stdlib names differ: {got:?}"));
    }
    match m.library.extend("loop-a() := loop-b().\nloop-b() := loop-a().") {
        Err(dtac_core::error::TacticError::RecursionCycle(_)) => {}
        other => return Err(format!("cyclic extension not refused: {other:?}")),
    }
    Ok(got.len())
}
