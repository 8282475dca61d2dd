//! A proof session: a program, its verifier fixture, and the history of
//! tactic applications with undo.

use crate::ast::Program;
use crate::diff::render_diff;
use crate::engine::{Engine, TraceStep};
use crate::error::{EngineError, TacticError};
use crate::guard::{check_guard, GuardReport};
use crate::oracle::{ErrorReport, Fixture};
use crate::printer::print_program;
use crate::tactic::{parse_invocation, parse_script, Library, Trans};

#[derive(Debug, Clone)]
pub struct HistoryEntry {
    pub invocation: String,
    pub program: Program,
    pub trace: Vec<TraceStep>,
}

#[derive(Debug, Clone)]
pub struct Applied {
    pub program: Program,
    pub guard: GuardReport,
    pub diff: String,
    pub trace: Vec<TraceStep>,
}

#[derive(Debug, Clone)]
pub struct Session {
    pub initial: Program,
    pub fixture: Fixture,
    pub library: Library,
    pub history: Vec<HistoryEntry>,
}

impl Session {
    pub fn new(program: Program, fixture: Fixture, library: Library) -> Self {
        Session { initial: program, fixture, library, history: Vec::new() }
    }

    pub fn program(&self) -> &Program {
        self.history.last().map(|h| &h.program).unwrap_or(&self.initial)
    }

    pub fn errors(&self) -> Vec<ErrorReport> {
        self.fixture.get_errors(self.program()).into_iter().map(|(r, _)| r).collect()
    }

    /// Runs one transformation on the current program and records it.
    pub fn apply_trans(&mut self, t: &Trans, text: &str) -> Result<Applied, EngineError> {
        let before = self.program().clone();
        let out = Engine::new(&self.library).run(&before, t, &self.fixture)?;
        let guard = check_guard(&before, &out.program);
        let diff = render_diff(&print_program(&before), &print_program(&out.program));
        self.history.push(HistoryEntry {
            invocation: text.to_string(),
            program: out.program.clone(),
            trace: out.trace.clone(),
        });
        Ok(Applied { program: out.program, guard, diff, trace: out.trace })
    }

    pub fn apply(&mut self, invocation: &str) -> Result<Applied, EngineError> {
        let t = parse_invocation(invocation)?;
        self.apply_trans(&t, invocation.trim())
    }

    /// Applies each step of a script; stops at the first failure.
    pub fn run_script(&mut self, script: &str) -> Result<Vec<Applied>, (usize, EngineError)> {
        let steps = parse_script(script).map_err(|e| (0, e.into()))?;
        let texts = script_texts(script);
        let mut out = Vec::new();
        for (i, t) in steps.iter().enumerate() {
            let text = texts.get(i).cloned().unwrap_or_default();
            out.push(self.apply_trans(t, &text).map_err(|e| (i, e))?);
        }
        Ok(out)
    }

    pub fn undo(&mut self) -> bool {
        self.history.pop().is_some()
    }
}

/// The source text of each top-level step of a script.
pub fn script_texts(script: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    let mut in_str = false;
    let mut chars = script.chars().peekable();
    while let Some(c) = chars.next() {
        match c {
            '"' => in_str = !in_str,
            '(' | '[' | '{' if !in_str => depth += 1,
            ')' | ']' | '}' if !in_str => depth -= 1,
            '/' if !in_str && chars.peek() == Some(&'/') => {
                for c in chars.by_ref() {
                    if c == '\n' {
                        break;
                    }
                }
                cur.push(' ');
                continue;
            }
            ';' if !in_str && depth == 0 => {
                out.push(cur.split_whitespace().collect::<Vec<_>>().join(" "));
                cur.clear();
                continue;
            }
            _ => {}
        }
        cur.push(c);
    }
    if !cur.trim().is_empty() {
        out.push(cur.split_whitespace().collect::<Vec<_>>().join(" "));
    }
    out
}

/// Loads a library of extra definitions on top of `base`.
pub fn extend_library(base: &Library, text: &str) -> Result<Library, TacticError> {
    if text.trim().is_empty() {
        return Ok(base.clone());
    }
    base.extend(text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn script_steps_split_at_top_level() {
        let s = "a(x; y);\n// note; here\nb()[?P := f(1, 2)]; c(\"p;q\")";
        assert_eq!(script_texts(s), vec!["a(x; y)", "b()[?P := f(1, 2)]", "c(\"p;q\")"]);
    }
}
