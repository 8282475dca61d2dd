//! Application phase: replacing a matched site by an instantiated template.

use std::collections::BTreeSet;

use super::env::{Capture, Clause, Container, Env, Site};
use super::instantiate::Instantiator;
use super::tree::{at_path_mut, stmt_expr_mut};
use crate::ast::*;
use crate::error::KernelError;
use crate::pattern::{ClausePattern, MethodPattern, ParamsPattern, Pattern};
use crate::position::{block_of_mut, raw_index, stmt_count, Position};

/// A transformed program and the positions of the rewritten code.
#[derive(Debug, Clone, PartialEq)]
pub struct Applied {
    pub program: Program,
    /// The new code (a gap when it is empty).
    pub pos: Position,
    pub start: Position,
    pub end: Position,
}

const TMP: &str = "\u{1}";

fn rename_markers(b: &mut [Stmt], f: &dyn Fn(&str) -> Option<String>) {
    for s in b {
        match s {
            Stmt::Marker(n) => {
                if let Some(m) = f(n) {
                    *n = m;
                }
            }
            Stmt::If { then_block, else_block, .. } => {
                rename_markers(then_block, f);
                if let Some(e) = else_block {
                    rename_markers(e, f);
                }
            }
            _ => {}
        }
    }
}

fn drop_markers(b: &mut Block, names: &BTreeSet<String>) {
    b.retain(|s| !matches!(s, Stmt::Marker(n) if names.contains(n)));
    for s in b {
        if let Stmt::If { then_block, else_block, .. } = s {
            drop_markers(then_block, names);
            if let Some(e) = else_block {
                drop_markers(e, names);
            }
        }
    }
}

fn marker_names(b: &[Stmt], out: &mut BTreeSet<String>) {
    for s in b {
        match s {
            Stmt::Marker(n) => {
                out.insert(n.clone());
            }
            Stmt::If { then_block, else_block, .. } => {
                marker_names(then_block, out);
                if let Some(e) = else_block {
                    marker_names(e, out);
                }
            }
            _ => {}
        }
    }
}

/// Renames the anchors written in a template so they survive the removal
/// of their old occurrences; returns the renamed names.
fn tag_template(ss: &mut [Stmt]) -> BTreeSet<String> {
    let mut names = BTreeSet::new();
    marker_names(ss, &mut names);
    rename_markers(ss, &|n| Some(format!("{TMP}{n}")));
    names
}

/// Anchors are unique: a template anchor moves, its old copy goes away.
fn settle_markers(p: &mut Program, names: &BTreeSet<String>) {
    for d in &mut p.decls {
        if let Decl::Method(m) = d {
            if let Some(b) = &mut m.body {
                drop_markers(b, names);
                rename_markers(b, &|n| n.strip_prefix(TMP).map(str::to_string));
            }
        }
    }
}

fn body_len(m: &MethodDecl) -> usize {
    m.body.as_deref().map(stmt_count).unwrap_or(0)
}

fn whole_body(m: &MethodDecl) -> Applied {
    let n = body_len(m);
    Applied {
        program: Program::default(),
        pos: Position::region(m.name.clone(), vec![], 0, n),
        start: Position::gap(m.name.clone(), vec![], 0),
        end: Position::gap(m.name.clone(), vec![], n),
    }
}

/// Replaces the site recorded in `env` (from `pmatch`) with `rhs`
/// instantiated under `env`'s bindings and captures.
pub fn apply(env: &Env, p: &Program, rhs: &Pattern) -> Result<Applied, KernelError> {
    let mut a = apply_site(env, p, rhs)?;
    a.program.normalize();
    Ok(a)
}

fn apply_site(env: &Env, p: &Program, rhs: &Pattern) -> Result<Applied, KernelError> {
    let site = env.site.as_ref().ok_or_else(|| KernelError::MalformedPattern("no match site to apply at".into()))?;
    let mut inst = Instantiator::full(&env.vars, &env.captures);
    let mut out = p.clone();
    match (site, rhs) {
        (Site::Stmts { method, block, start, end, raw }, Pattern::Stmts(ss)) => {
            let mut ss = ss.clone();
            let names = tag_template(&mut ss);
            let new = inst.stmts(&ss)?;
            let k = stmt_count(&new);
            let m = out.method_mut(method).ok_or(KernelError::NoApplicableSite)?;
            let b = block_of_mut(m, block).ok_or(KernelError::NoApplicableSite)?;
            if raw.end > b.len() {
                return Err(KernelError::NoApplicableSite);
            }
            b.splice(raw.clone(), new);
            settle_markers(&mut out, &names);
            let _ = end;
            Ok(Applied {
                program: out,
                pos: Position::region(method.clone(), block.clone(), *start, start + k),
                start: Position::gap(method.clone(), block.clone(), *start),
                end: Position::gap(method.clone(), block.clone(), start + k),
            })
        }
        (Site::Expr { method, container, path }, Pattern::Expr(e)) => {
            let new = inst.expr(e)?;
            let m = out.method_mut(method).ok_or(KernelError::NoApplicableSite)?;
            let target = match container {
                Container::Requires(i) => m.requires.get_mut(*i),
                Container::Ensures(i) => m.ensures.get_mut(*i),
                Container::Stmt { block, index, slot } => block_of_mut(m, block)
                    .and_then(|b| raw_index(b, *index).and_then(move |r| b.get_mut(r)))
                    .and_then(|s| stmt_expr_mut(s, *slot)),
            }
            .and_then(|e| at_path_mut(e, path))
            .ok_or(KernelError::NoApplicableSite)?;
            *target = new;
            let region = match container {
                Container::Stmt { block, index, .. } => {
                    Position::region(method.clone(), block.clone(), *index, index + 1)
                }
                _ => whole_body(m).pos,
            };
            Ok(Applied {
                program: out,
                start: Position::gap(method.clone(), region.block.clone(), region.start),
                end: Position::gap(method.clone(), region.block.clone(), region.end),
                pos: region,
            })
        }
        (Site::Method { method }, Pattern::Methods(mps)) => apply_methods(&mut inst, out, method, mps),
        _ => Err(KernelError::MalformedPattern("right-hand side is of a different kind than the match".into())),
    }
}

fn split_clauses(cs: Vec<Clause>, m: &mut MethodDecl) {
    m.requires.clear();
    m.ensures.clear();
    m.modifies = None;
    for c in cs {
        match c {
            Clause::Requires(e) => m.requires.push(e),
            Clause::Ensures(e) => m.ensures.push(e),
            Clause::Modifies(t) => {
                m.modifies.get_or_insert(t);
            }
        }
    }
}

/// Builds a method from a template; `base` supplies whatever the template
/// leaves out.
fn build_method(
    inst: &mut Instantiator,
    mp: &MethodPattern,
    base: MethodDecl,
    names: &mut BTreeSet<String>,
) -> Result<MethodDecl, KernelError> {
    let mut m = base;
    match &mp.params {
        ParamsPattern::Any => match inst.next_capture()? {
            Capture::Params { params, returns } => {
                m.params = params;
                m.returns = returns;
            }
            _ => return Err(KernelError::MalformedPattern("`(..)` on the right needs `(..)` on the left".into())),
        },
        ParamsPattern::Meta(_) => {}
        ParamsPattern::Exact(ps) => m.params = ps.clone(),
    }
    let mut clauses = Vec::new();
    let mut tail_body = None;
    for c in &mp.clauses {
        match c {
            ClausePattern::Requires(e) => clauses.push(Clause::Requires(inst.expr(e)?)),
            ClausePattern::Ensures(e) => clauses.push(Clause::Ensures(inst.expr(e)?)),
            ClausePattern::Modifies(t) => clauses.push(Clause::Modifies(t.clone())),
            ClausePattern::Ellipsis => match inst.next_capture()? {
                Capture::Clauses(cs) => clauses.extend(cs),
                Capture::Tail { clauses: cs, body } => {
                    clauses.extend(cs);
                    tail_body = Some(body);
                }
                _ => return Err(KernelError::MalformedPattern("clause `...` without a clause capture".into())),
            },
        }
    }
    split_clauses(clauses, &mut m);
    match &mp.body {
        Some(pb) => {
            let mut pb = pb.clone();
            names.extend(tag_template(&mut pb));
            m.body = Some(inst.stmts(&pb)?);
        }
        None => {
            if let Some(b) = tail_body {
                m.body = b;
            }
        }
    }
    Ok(m)
}

fn apply_methods(
    inst: &mut Instantiator,
    mut out: Program,
    method: &str,
    mps: &[MethodPattern],
) -> Result<Applied, KernelError> {
    let idx = out
        .decls
        .iter()
        .position(|d| matches!(d, Decl::Method(m) if m.name == method))
        .ok_or(KernelError::NoApplicableSite)?;
    let Decl::Method(old) = out.decls[idx].clone() else { unreachable!() };
    let mut names = BTreeSet::new();
    let mut before = Vec::new();
    let mut after = Vec::new();
    let mut replaced = None;
    for mp in mps {
        let name = inst.name(&mp.name)?;
        let name = name.as_id().unwrap_or_default().to_string();
        if name == method {
            if replaced.is_some() {
                return Err(KernelError::MalformedPattern(format!("method `{name}` written twice")));
            }
            let mut m = build_method(inst, mp, old.clone(), &mut names)?;
            m.is_ghost = old.is_ghost || mp.ghost;
            replaced = Some(m);
        } else {
            if out.decls.iter().any(|d| d.name() == name) {
                return Err(KernelError::MalformedPattern(format!("`{name}` already exists")));
            }
            let mut base = MethodDecl::new(name);
            base.body = Some(Vec::new());
            let mut m = build_method(inst, mp, base, &mut names)?;
            m.is_ghost = true;
            m.visibility = Visibility::Generated;
            if replaced.is_some() { after.push(m) } else { before.push(m) }
        }
    }
    let m = replaced.ok_or_else(|| {
        KernelError::MalformedPattern(format!("right-hand side must keep method `{method}`"))
    })?;
    let mut applied = whole_body(&m);
    let mut decls: Vec<Decl> = before.into_iter().map(Decl::Method).collect();
    decls.push(Decl::Method(m));
    decls.extend(after.into_iter().map(Decl::Method));
    out.decls.splice(idx..idx + 1, decls);
    settle_markers(&mut out, &names);
    applied.program = out;
    Ok(applied)
}

/// Keeps `env`'s positions pointing at the same code after `[s, e)` of a
/// block was replaced by `k` statements.
pub fn shift_positions(env: &mut Env, site: &Site, k: usize) {
    let Site::Stmts { method, block, start: s, end: e, .. } = site else { return };
    let (s, e) = (*s, *e);
    let delta = k as isize - (e - s) as isize;
    let moved = |i: usize| (i as isize + delta) as usize;
    for q in env.positions.values_mut() {
        if q.method != *method || q.block.len() < block.len() || q.block[..block.len()] != block[..] {
            continue;
        }
        if q.block.len() == block.len() {
            let f_start = |i: usize| if i <= s { i } else if i >= e { moved(i) } else { s };
            let f_end = |i: usize| if i <= s { i } else if i >= e { moved(i) } else { s + k };
            if q.is_gap() {
                q.start = f_start(q.start);
                q.end = q.start;
            } else {
                q.start = f_start(q.start);
                q.end = f_end(q.end);
            }
        } else {
            let idx = &mut q.block[block.len()].0;
            if *idx >= e {
                *idx = moved(*idx);
            }
        }
    }
}

/// Every way of rewriting one site matching `lhs` into `rhs`, in site
/// order. A bound `@pos` restricts the candidate sites.
pub fn apply_rule(env: &Env, lhs: &Pattern, rhs: &Pattern, p: &Program) -> Result<Vec<Program>, KernelError> {
    let sites = super::pmatch(env, p, lhs)?;
    let mut out = Vec::new();
    for m in sites {
        if let Some(pos) = env.positions.get("pos") {
            if !pos.admits(&m.positions["m"]) {
                continue;
            }
        }
        out.push(apply(&m, p, rhs)?.program);
    }
    if out.is_empty() {
        return Err(KernelError::NoApplicableSite);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{parse_pattern, parse_program};
    use crate::printer::print_program;

    fn pat(s: &str) -> Pattern {
        parse_pattern(s).unwrap()
    }

    #[test]
    fn assert_elimination_leaves_anchor() {
        let p = parse_program("method f(x: int) { assert x > 0; x := 1; }").unwrap();
        let rs = apply_rule(&Env::new(), &pat("assert ?P;"), &pat("/*@ass*/"), &p).unwrap();
        assert_eq!(rs.len(), 1);
        let want = parse_program("method f(x: int) { /*@ass*/ x := 1; }").unwrap();
        assert_eq!(rs[0], want);
    }

    #[test]
    fn anchors_move_rather_than_duplicate() {
        let p = parse_program("method f(x: int) { /*@ass*/ x := 1; }").unwrap();
        let env = Env::new();
        let sites = super::super::pmatch(&env, &p, &Pattern::empty()).unwrap();
        let a = apply(&sites[1], &p, &pat("assert x == 1; /*@ass*/")).unwrap();
        let want = parse_program("method f(x: int) { x := 1; assert x == 1; /*@ass*/ }").unwrap();
        assert_eq!(a.program, want);
        assert_eq!(a.pos, Position::region("f", vec![], 1, 2));
    }

    #[test]
    fn identity_rule_changes_nothing() {
        let p = parse_program("method f(x: int) requires x > 0 { x := x + 1; }").unwrap();
        for r in apply_rule(&Env::new(), &pat("?x"), &pat("?x"), &p).unwrap() {
            assert_eq!(r, p);
        }
    }

    #[test]
    fn precondition_introduction_via_method_rule() {
        let p = parse_program("method g(a: int) requires a > 1 ensures a > 0 { }").unwrap();
        let env = Env::new().with_var("P", super::super::Binding::Expr(crate::parser::parse_expr("a > 2").unwrap()));
        let rs = apply_rule(&env, &pat("method ?m(..) ..."), &pat("method ?m(..) requires ?P ..."), &p).unwrap();
        let text = print_program(&rs[0]);
        assert!(text.contains("requires a > 2\n  requires a > 1"), "{text}");
    }

    #[test]
    fn new_methods_are_generated_ghosts() {
        let p = parse_program("predicate A() predicate B() method Main() ensures A() && B() { }").unwrap();
        let lhs = pat("method ?m() ... ensures ?A && ?B ... { ... }");
        let rhs = pat(
            "ghost method SubGoalA() ensures ?A { } ghost method SubGoalB() ensures ?B { }
             method ?m() ... ensures ?A && ?B ... { ... SubGoalA(); SubGoalB(); }",
        );
        let rs = apply_rule(&Env::new(), &lhs, &rhs, &p).unwrap();
        let sub = rs[0].method("SubGoalA").unwrap();
        assert_eq!(sub.visibility, Visibility::Generated);
        assert!(sub.is_ghost);
        assert_eq!(rs[0].method("Main").unwrap().body.as_ref().unwrap().len(), 2);
    }

    #[test]
    fn positions_shift_after_splice() {
        let mut env = Env::new()
            .with_position("a", Position::gap("f", vec![], 3))
            .with_position("b", Position::region("f", vec![(4, crate::position::Branch::Then)], 0, 1));
        let site = Site::Stmts { method: "f".into(), block: vec![], start: 1, end: 2, raw: 1..2 };
        shift_positions(&mut env, &site, 3);
        assert_eq!(env.positions["a"], Position::gap("f", vec![], 5));
        assert_eq!(env.positions["b"].block[0].0, 6);
    }
}
