//! The batch commands, written to return their output so they can be tested
//! without spawning the binary.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use dtac_core::guard::check_guard;
use dtac_core::oracle::Fixture;
use dtac_core::parser::parse_program;
use dtac_core::printer::print_program;
use dtac_core::session::{extend_library, Session};
use dtac_core::stdlib::load_stdlib;

pub struct Output {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

impl Output {
    fn ok(stdout: String) -> Self {
        Output { stdout, stderr: String::new(), code: 0 }
    }
}

fn read(p: &Path) -> Result<String> {
    fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))
}

pub struct ApplyArgs {
    pub program: PathBuf,
    pub script: PathBuf,
    pub errors: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub library: Option<PathBuf>,
    pub diff: bool,
    pub trace: bool,
}

/// Exit code 0 when every step applies, 2 when a tactic fails.
pub fn apply(a: &ApplyArgs) -> Result<Output> {
    let src = read(&a.program)?;
    let program = parse_program(&src).with_context(|| format!("parsing {}", a.program.display()))?;
    let fixture = match &a.errors {
        Some(f) => Fixture::load(&read(f)?, &program).with_context(|| format!("loading {}", f.display()))?,
        None => Fixture::default(),
    };
    let mut library = load_stdlib()?.library;
    if let Some(l) = &a.library {
        library = extend_library(&library, &read(l)?).with_context(|| format!("loading {}", l.display()))?;
    }
    let script = read(&a.script)?;
    let mut session = Session::new(program, fixture, library);
    let mut stdout = String::new();
    let (result, code) = match session.run_script(&script) {
        Ok(_) => (None, 0),
        Err((i, e)) => (Some(format!("step {} failed: {e}\n", i + 1)), 2),
    };
    let mut prev = print_program(&session.initial);
    for h in &session.history {
        if a.trace || a.diff {
            stdout.push_str(&format!("== {}\n", h.invocation));
        }
        if a.trace {
            for t in &h.trace {
                stdout.push_str(&format!("  {t}\n"));
            }
        }
        let next = print_program(&h.program);
        if a.diff {
            stdout.push_str(&dtac_core::diff::render_diff(&prev, &next));
        }
        prev = next;
    }
    let text = print_program(session.program());
    match &a.out {
        Some(o) => fs::write(o, &text).with_context(|| format!("writing {}", o.display()))?,
        None if !a.diff => stdout.push_str(&text),
        None => {}
    }
    let errs = session.errors();
    let mut stderr = result.unwrap_or_default();
    stderr.push_str(&format!("{} open verifier error(s)\n", errs.len()));
    Ok(Output { stdout, stderr, code })
}

/// Exit code 0 when the guard accepts, 1 otherwise.
pub fn check(before: &Path, after: &Path) -> Result<Output> {
    let a = parse_program(&read(before)?).with_context(|| format!("parsing {}", before.display()))?;
    let b = parse_program(&read(after)?).with_context(|| format!("parsing {}", after.display()))?;
    let r = check_guard(&a, &b);
    Ok(Output { stdout: r.to_string(), stderr: String::new(), code: if r.ok() { 0 } else { 1 } })
}

pub fn parse(p: &Path) -> Result<Output> {
    let prog = parse_program(&read(p)?).with_context(|| format!("parsing {}", p.display()))?;
    let errs = dtac_core::typecheck::typecheck(&prog);
    let stderr: String = errs.iter().map(|e| format!("type error {e}\n")).collect();
    Ok(Output { stdout: print_program(&prog), stderr, code: if errs.is_empty() { 0 } else { 1 } })
}

pub fn stdlib_list() -> Result<Output> {
    let m = load_stdlib()?;
    let mut s = String::new();
    for i in &m.info {
        s.push_str(&format!("{}/{}  {}\n", i.name, i.arity, i.doc));
    }
    Ok(Output::ok(s))
}
