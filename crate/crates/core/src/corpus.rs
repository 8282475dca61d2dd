//! Worked examples: programs, verifier fixtures and tactic scripts, replayed
//! end to end against their expected final programs.

use thiserror::Error;

use crate::ast::Program;
use crate::error::{EngineError, FixtureError, ParseError, TacticError};
use crate::oracle::Fixture;
use crate::parser::parse_program;
use crate::printer::print_program;
use crate::session::{extend_library, HistoryEntry, Session};
use crate::stdlib::load_stdlib;

#[derive(Debug, Clone)]
pub struct CorpusCase {
    pub name: &'static str,
    pub program: &'static str,
    pub fixture: &'static str,
    pub script: &'static str,
    /// Extra tactic definitions loaded on top of the stdlib.
    pub library: &'static str,
    pub expected: &'static str,
    /// One line per step: the invocation and its number of primitive steps.
    pub summary: &'static str,
}

macro_rules! case {
    ($name:literal, $lib:expr) => {
        CorpusCase {
            name: $name,
            program: include_str!(concat!("../corpus/", $name, "/program.mdfy")),
            fixture: include_str!(concat!("../corpus/", $name, "/fixture.errs")),
            script: include_str!(concat!("../corpus/", $name, "/script.dtac")),
            library: $lib,
            expected: include_str!(concat!("../corpus/", $name, "/expected.mdfy")),
            summary: include_str!(concat!("../corpus/", $name, "/summary.txt")),
        }
    };
}

pub fn cases() -> Vec<CorpusCase> {
    vec![
        case!("lemma", ""),
        case!("conj", include_str!("../corpus/conj/library.dtac")),
        case!("safer-null", ""),
        case!("safer-four", ""),
    ]
}

pub fn case(name: &str) -> Option<CorpusCase> {
    cases().into_iter().find(|c| c.name == name)
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("{0}")]
    Parse(#[from] ParseError),
    #[error("{0}")]
    Fixture(#[from] FixtureError),
    #[error("{0}")]
    Library(#[from] TacticError),
    #[error("step {} `{invocation}` failed: {source}", .index + 1)]
    Step { index: usize, invocation: String, source: EngineError },
}

#[derive(Debug, Clone)]
pub struct Replay {
    pub initial: Program,
    pub steps: Vec<HistoryEntry>,
    pub program: Program,
    pub open_errors: usize,
}

impl Replay {
    pub fn summary(&self) -> String {
        self.steps.iter().map(|h| format!("{}  [{}]\n", h.invocation, h.trace.len())).collect()
    }

    /// Structural comparison with the expected program, ignoring markers.
    pub fn matches(&self, expected: &Program) -> bool {
        print_program(&self.program.without_markers()) == print_program(&expected.without_markers())
    }
}

/// Runs the script of `case` step by step, stopping at the first failure.
pub fn replay(case: &CorpusCase) -> Result<Replay, CorpusError> {
    let initial = parse_program(case.program)?;
    let fixture = Fixture::load(case.fixture, &initial)?;
    let library = extend_library(&load_stdlib()?.library, case.library)?;
    let mut session = Session::new(initial.clone(), fixture, library);
    session.run_script(case.script).map_err(|(index, source)| CorpusError::Step {
        index,
        invocation: crate::session::script_texts(case.script).get(index).cloned().unwrap_or_default(),
        source,
    })?;
    let open_errors = session.errors().len();
    let program = session.program().clone();
    Ok(Replay { initial, steps: session.history, program, open_errors })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_case_parses() {
        for c in cases() {
            parse_program(c.program).unwrap_or_else(|e| panic!("{}: {e}", c.name));
            parse_program(c.expected).unwrap_or_else(|e| panic!("{}: {e}", c.name));
        }
    }
}
