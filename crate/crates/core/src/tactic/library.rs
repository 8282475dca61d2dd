use std::collections::{BTreeMap, HashMap};

use super::{parse_tactic_defs, TacticDef, Trans};
use crate::error::TacticError;

/// Metavariables supplied by the environment rather than by a pattern.
pub const RESERVED_VARS: &[&str] = &["error", "err_arg", "pre", "post", "meth", "arg"];

/// A checked set of definitions: unique names, every call resolves with the
/// right arity, and the call graph is acyclic.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Library {
    defs: Vec<TacticDef>,
    index: HashMap<String, usize>,
}

impl Library {
    pub fn new(defs: Vec<TacticDef>) -> Result<Self, TacticError> {
        let mut index = HashMap::new();
        for (i, d) in defs.iter().enumerate() {
            if index.insert(d.name.clone(), i).is_some() {
                return Err(TacticError::DuplicateDefinition(d.name.clone()));
            }
        }
        let lib = Library { defs, index };
        for d in &lib.defs {
            lib.check_trans(d.body.trans())?;
        }
        if let Some(cycle) = find_cycle(&lib.defs) {
            return Err(TacticError::RecursionCycle(cycle));
        }
        Ok(lib)
    }

    pub fn parse(text: &str) -> Result<Self, TacticError> {
        Library::new(parse_tactic_defs(text)?)
    }

    /// A new library with the definitions of `text` added; they may call
    /// existing tactics but not redefine them.
    pub fn extend(&self, text: &str) -> Result<Self, TacticError> {
        let mut defs = self.defs.clone();
        defs.extend(parse_tactic_defs(text)?);
        Library::new(defs)
    }

    pub fn get(&self, name: &str) -> Option<&TacticDef> {
        self.index.get(name).map(|&i| &self.defs[i])
    }

    pub fn defs(&self) -> &[TacticDef] {
        &self.defs
    }

    pub fn len(&self) -> usize {
        self.defs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.defs.is_empty()
    }

    /// Checks that every call in `t` names a definition with matching arity.
    pub fn check_trans(&self, t: &Trans) -> Result<(), TacticError> {
        match t {
            Trans::Seq(a, b) | Trans::Or(a, b) => {
                self.check_trans(a)?;
                self.check_trans(b)
            }
            Trans::Call { name, args, .. } => {
                let d = self.get(name).ok_or_else(|| TacticError::UndefinedTactic(name.clone()))?;
                if d.formals.len() != args.len() {
                    return Err(TacticError::Arity {
                        name: name.clone(),
                        expected: d.formals.len(),
                        got: args.len(),
                    });
                }
                Ok(())
            }
            Trans::Rule { .. } | Trans::Match { .. } => Ok(()),
        }
    }
}

/// First cycle in the call graph of `defs`, as a closed path
/// (`[a, b, a]`). Calls to names outside `defs` are ignored.
pub(crate) fn find_cycle(defs: &[TacticDef]) -> Option<Vec<String>> {
    let graph: BTreeMap<&str, Vec<String>> = defs
        .iter()
        .map(|d| {
            let mut cs = Vec::new();
            d.body.trans().callees(&mut cs);
            (d.name.as_str(), cs)
        })
        .collect();
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        Active,
        Done,
    }
    fn visit<'a>(
        n: &'a str,
        graph: &'a BTreeMap<&'a str, Vec<String>>,
        marks: &mut HashMap<&'a str, Mark>,
        stack: &mut Vec<&'a str>,
    ) -> Option<Vec<String>> {
        match marks.get(n) {
            Some(Mark::Done) => return None,
            Some(Mark::Active) => {
                let from = stack.iter().position(|s| *s == n).unwrap_or(0);
                let mut cycle: Vec<String> = stack[from..].iter().map(|s| s.to_string()).collect();
                cycle.push(n.to_string());
                return Some(cycle);
            }
            None => {}
        }
        marks.insert(n, Mark::Active);
        stack.push(n);
        for c in graph.get(n).into_iter().flatten() {
            if let Some((k, _)) = graph.get_key_value(c.as_str()) {
                if let Some(cy) = visit(k, graph, marks, stack) {
                    return Some(cy);
                }
            }
        }
        stack.pop();
        marks.insert(n, Mark::Done);
        None
    }
    let mut marks = HashMap::new();
    for d in defs {
        if let Some(c) = visit(d.name.as_str(), &graph, &mut marks, &mut Vec::new()) {
            return Some(c);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mutual_recursion_reported_as_cycle() {
        let e = Library::parse("a() := b(). b() := c(). c() := a().").unwrap_err();
        assert_eq!(e, TacticError::RecursionCycle(vec!["a".into(), "b".into(), "c".into(), "a".into()]));
    }

    #[test]
    fn undefined_and_arity() {
        assert_eq!(Library::parse("a() := zz().").unwrap_err(), TacticError::UndefinedTactic("zz".into()));
        let e = Library::parse("a(P) := {| |} =>> {| assert P; |}. b() := a().").unwrap_err();
        assert!(matches!(e, TacticError::Arity { expected: 1, got: 0, .. }));
    }

    #[test]
    fn extension_sees_base_names() {
        let base = Library::parse("a() := {| |} =>> {| |}.").unwrap();
        let ext = base.extend("b() := a(); a().").unwrap();
        assert_eq!(ext.len(), 2);
        assert!(matches!(base.extend("a() := a()."), Err(TacticError::RecursionCycle(_) | TacticError::DuplicateDefinition(_))));
    }
}
