//! The refactoring guard: a transformation may not change compiled code,
//! may only weaken public preconditions and strengthen public
//! postconditions, and may not touch signatures of user-written methods.

use std::fmt;

use crate::ast::*;
use crate::printer::print_expr;
use crate::projection::compiled_projection;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ViolationKind {
    CodeChanged,
    PublicPreStrengthened,
    PublicPostWeakened,
    PublicRemoved,
    SignatureChanged,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub kind: ViolationKind,
    pub method: String,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GuardReport {
    pub violations: Vec<Violation>,
}

impl GuardReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn kinds(&self) -> Vec<ViolationKind> {
        self.violations.iter().map(|v| v.kind).collect()
    }

    fn push(&mut self, kind: ViolationKind, method: &str, detail: impl Into<String>) {
        self.violations.push(Violation { kind, method: method.to_string(), detail: detail.into() });
    }
}

impl fmt::Display for GuardReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ok() {
            return writeln!(f, "guard: ok");
        }
        writeln!(f, "guard: {} violation(s)", self.violations.len())?;
        for v in &self.violations {
            writeln!(f, "  {:?} in {}: {}", v.kind, v.method, v.detail)?;
        }
        Ok(())
    }
}

fn user_written(m: &MethodDecl) -> bool {
    m.visibility != Visibility::Generated
}

/// Top-level conjuncts of all clauses, as printed text (sorted multiset).
fn conjunct_multiset(clauses: &[Expr]) -> Vec<String> {
    let mut out: Vec<String> = clauses.iter().flat_map(|c| c.conjuncts()).map(print_expr).collect();
    out.sort();
    out
}

/// Multiset inclusion `small ⊆ big`; returns the first element missing.
fn missing_from(small: &[String], big: &[String]) -> Option<String> {
    let mut pool = big.to_vec();
    for s in small {
        match pool.iter().position(|b| b == s) {
            Some(i) => {
                pool.swap_remove(i);
            }
            None => return Some(s.clone()),
        }
    }
    None
}

fn without_markers(d: &Decl) -> Decl {
    Program { decls: vec![d.clone()] }.without_markers().decls.remove(0)
}

pub fn check_guard(before: &Program, after: &Program) -> GuardReport {
    use ViolationKind::*;
    let mut r = GuardReport::default();
    let (pb, pa) = (compiled_projection(before), compiled_projection(after));

    for m in before.methods().filter(|m| user_written(m)) {
        let Some(n) = after.method(&m.name) else {
            r.push(PublicRemoved, &m.name, "method no longer exists");
            continue;
        };
        if n.params != m.params || n.returns != m.returns || n.is_ghost != m.is_ghost {
            r.push(SignatureChanged, &m.name, "parameters, results or ghost flag differ");
        }
        if n.visibility != m.visibility {
            r.push(SignatureChanged, &m.name, format!("visibility {:?} became {:?}", m.visibility, n.visibility));
        }
        if n.modifies != m.modifies {
            r.push(SignatureChanged, &m.name, "modifies clause differs");
        }
        if let (Some(x), Some(y)) = (pb.method(&m.name), pa.method(&m.name)) {
            if without_markers(&Decl::Method(x.clone())) != without_markers(&Decl::Method(y.clone())) {
                r.push(CodeChanged, &m.name, "compiled body differs");
            }
        }
        if m.visibility == Visibility::Public {
            let (rb, ra) = (conjunct_multiset(&m.requires), conjunct_multiset(&n.requires));
            if let Some(c) = missing_from(&ra, &rb) {
                r.push(PublicPreStrengthened, &m.name, format!("new precondition conjunct `{c}`"));
            }
            let (eb, ea) = (conjunct_multiset(&m.ensures), conjunct_multiset(&n.ensures));
            if let Some(c) = missing_from(&eb, &ea) {
                r.push(PublicPostWeakened, &m.name, format!("postcondition conjunct `{c}` dropped"));
            }
        }
    }

    for n in after.methods() {
        let Some(m) = before.method(&n.name) else {
            if user_written(n) {
                r.push(CodeChanged, &n.name, "new non-generated method");
            } else if !n.is_ghost {
                r.push(CodeChanged, &n.name, "generated method is not ghost");
            }
            continue;
        };
        if !user_written(m) && user_written(n) {
            r.push(SignatureChanged, &n.name, "generated method became user-visible");
        }
    }

    // Everything compiled that is not a method: datatypes, classes and
    // function methods must be untouched (and none may appear or vanish).
    let others = |p: &Program| -> Vec<Decl> {
        p.decls.iter().filter(|d| !matches!(d, Decl::Method(_))).cloned().collect()
    };
    let (ob, oa) = (others(&pb), others(&pa));
    for d in &ob {
        match oa.iter().find(|x| x.name() == d.name()) {
            Some(x) if x == d => {}
            Some(_) => r.push(CodeChanged, d.name(), "compiled declaration differs"),
            None => r.push(CodeChanged, d.name(), "compiled declaration removed"),
        }
    }
    for d in oa.iter().filter(|d| !ob.iter().any(|x| x.name() == d.name())) {
        r.push(CodeChanged, d.name(), "compiled declaration added");
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_program;

    fn guard(a: &str, b: &str) -> GuardReport {
        check_guard(&parse_program(a).unwrap(), &parse_program(b).unwrap())
    }

    #[test]
    fn reflexive() {
        let s = "public method f(x: int) returns (y: int) requires x > 0 ensures y > 0 { y := x; }";
        assert!(guard(s, s).ok());
    }

    #[test]
    fn public_contracts_move_one_way() {
        let a = "public method f(x: int) requires x > 0 && x < 9 ensures x > 0 { }";
        assert!(guard(a, "public method f(x: int) requires x > 0 ensures x > 0 ensures x < 9 { }").ok());
        let r = guard(a, "public method f(x: int) requires x > 0 && x < 9 requires x > 1 ensures x > 0 { }");
        assert_eq!(r.kinds(), vec![ViolationKind::PublicPreStrengthened]);
        let r = guard(a, "public method f(x: int) requires x > 0 && x < 9 { }");
        assert_eq!(r.kinds(), vec![ViolationKind::PublicPostWeakened]);
    }

    #[test]
    fn private_contracts_are_free_but_code_is_not() {
        let a = "method f(x: int) returns (y: int) { y := x; }";
        assert!(guard(a, "method f(x: int) returns (y: int) requires x > 2 { assert x > 2; y := x; }").ok());
        let r = guard(a, "method f(x: int) returns (y: int) { y := x + 1; }");
        assert_eq!(r.kinds(), vec![ViolationKind::CodeChanged]);
    }

    #[test]
    fn generated_ghosts_may_be_added() {
        let a = "method f() { }";
        assert!(guard(a, "/*generated*/ ghost method g() { } method f() { g(); }").ok());
        assert_eq!(guard(a, "method g() { } method f() { }").kinds(), vec![ViolationKind::CodeChanged]);
        assert_eq!(guard(a, "method h() { }").kinds()[0], ViolationKind::PublicRemoved);
    }
}
