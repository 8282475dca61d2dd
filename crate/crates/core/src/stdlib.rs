//! The standard tactic library, shipped as `stdlib.dtac`.

use crate::error::TacticError;
use crate::tactic::Library;

pub const STDLIB_SOURCE: &str = include_str!("../stdlib.dtac");

/// Tactics that come with a full definition in the DTac examples; the
/// remainder are the case-study tactics whose bodies are ours.
const EXAMPLE_TACTICS: &[&str] = &[
    "assert-I", "post-I", "pre-I", "assert-E", "pre-E", "post-E", "post-to-assert", "assert-to-pre",
    "assert-to-post", "assert-rewr", "assert-up1", "assert-up2", "assert-up3", "assert-up", "post-to-post",
    "pre-to-assert", "null-to-assert", "pred-var-I", "ex-E", "case-I", "call-I", "IH-I",
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TacticInfo {
    pub name: String,
    pub arity: usize,
    pub doc: String,
    pub paper_ref: String,
}

#[derive(Debug, Clone)]
pub struct Manifest {
    pub library: Library,
    pub info: Vec<TacticInfo>,
}

impl Manifest {
    pub fn info(&self, name: &str) -> Option<&TacticInfo> {
        self.info.iter().find(|i| i.name == name)
    }
}

/// `// text` lines directly above a definition document it.
fn docs(src: &str) -> Vec<(String, String)> {
    let mut out = Vec::new();
    let mut doc = Vec::new();
    for line in src.lines() {
        let t = line.trim();
        if let Some(c) = t.strip_prefix("//") {
            doc.push(c.trim().to_string());
        } else if let Some((name, _)) = t.split_once('(') {
            if !t.is_empty() && !name.contains(' ') {
                out.push((name.to_string(), doc.join(" ")));
            }
            doc.clear();
        } else {
            doc.clear();
        }
    }
    out
}

pub fn load_stdlib() -> Result<Manifest, TacticError> {
    let library = Library::parse(STDLIB_SOURCE)?;
    let docs = docs(STDLIB_SOURCE);
    let info = library
        .defs()
        .iter()
        .map(|d| {
            let doc = docs.iter().find(|(n, _)| *n == d.name).map(|(_, t)| t.clone()).unwrap_or_default();
            let paper_ref =
                if EXAMPLE_TACTICS.contains(&d.name.as_str()) { "DTac examples" } else { "case study tactics" };
            TacticInfo { name: d.name.clone(), arity: d.formals.len(), doc, paper_ref: paper_ref.into() }
        })
        .collect();
    Ok(Manifest { library, info })
}
