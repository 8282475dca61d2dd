//! Matching and rewriting kernel: `pmatch`, `apply`, `rewrite`, `flush`.

mod apply;
mod env;
mod instantiate;
mod matching;
mod rewrite;
mod tree;

pub use apply::{apply, apply_rule, shift_positions, Applied};
pub use env::{Binding, Capture, Clause, Container, Env, Site, CONTEXT_POSITIONS, CONTEXT_VARS};
pub use instantiate::instantiate_partial;
pub use rewrite::{rewrite_pairs, rewrite_rule, substitute, DEFAULT_STEP_LIMIT};

pub(crate) use matching::match_expr;
pub(crate) use matching::MState;

use crate::ast::{Block, Expr, MethodDecl, Program, Stmt};
use crate::error::KernelError;
use crate::pattern::Pattern;
use crate::position::{raw_index, stmt_count, BlockPath, Branch, Position};
use matching::{match_method, match_run};

/// Context bindings describing the method a site lives in.
fn context(m: &MethodDecl) -> Vec<(&'static str, Binding)> {
    let mut out = vec![("meth", Binding::Name(m.name.clone()))];
    if let Some(p) = m.params.first() {
        out.push(("arg", Binding::Expr(Expr::var(p.name.clone()))));
    }
    if let Some(e) = Expr::conjoin(m.requires.clone()) {
        out.push(("pre", Binding::Expr(e)));
    }
    if let Some(e) = Expr::conjoin(m.ensures.clone()) {
        out.push(("post", Binding::Expr(e)));
    }
    out
}

/// Turns a raw match into an environment, or rejects it when a pre-bound
/// context variable disagrees with the site's method.
fn finish(env: &Env, m: &MethodDecl, st: MState, site: Site, region: Position) -> Option<Env> {
    let mut out = env.clone();
    out.vars = st.vars;
    let ctx = context(m);
    for name in CONTEXT_VARS {
        let here = ctx.iter().find(|(k, _)| k == name).map(|(_, b)| b);
        match (out.vars.get(*name), here) {
            (Some(old), Some(new)) if !old.same(new) => return None,
            (Some(_), None) => return None,
            (None, Some(new)) => {
                out.vars.insert(name.to_string(), new.clone());
            }
            _ => {}
        }
    }
    let s = Position::gap(region.method.clone(), region.block.clone(), region.start);
    let e = Position::gap(region.method.clone(), region.block.clone(), region.end);
    out.positions.insert("m".into(), region);
    out.positions.insert("s".into(), s);
    out.positions.insert("e".into(), e);
    out.captures = st.caps;
    out.site = Some(site);
    Some(out)
}

/// Methods a match may look at: just `?meth` when it is bound.
fn candidate_methods<'a>(env: &Env, p: &'a Program) -> Vec<&'a MethodDecl> {
    let only = env.vars.get("meth").and_then(Binding::as_name);
    p.methods().filter(|m| only.as_ref().is_none_or(|n| *n == m.name)).collect()
}

/// All sites where `pat` matches, in document order. Variables bound in
/// `env` constrain the match; each result extends `env` with the pattern's
/// bindings, the method context and the positions `@m`, `@s`, `@e`.
pub fn pmatch(env: &Env, p: &Program, pat: &Pattern) -> Result<Vec<Env>, KernelError> {
    let st0 = MState::with_vars(env.vars.clone());
    let mut out = Vec::new();
    match pat {
        Pattern::Methods(mps) => {
            let [mp] = mps.as_slice() else {
                return Err(KernelError::MalformedPattern("a left-hand side may mention only one method".into()));
            };
            for m in candidate_methods(env, p) {
                let n = m.body.as_deref().map(stmt_count).unwrap_or(0);
                for st in match_method(mp, m, st0.clone()) {
                    let region = Position::region(m.name.clone(), vec![], 0, n);
                    out.extend(finish(env, m, st, Site::Method { method: m.name.clone() }, region));
                }
            }
        }
        Pattern::Stmts(ps) => {
            for m in candidate_methods(env, p) {
                if let Some(b) = &m.body {
                    stmt_sites(env, m, b, &mut Vec::new(), ps, &st0, &mut out);
                }
            }
        }
        Pattern::Expr(pe) => {
            for m in candidate_methods(env, p) {
                expr_sites(env, m, pe, &st0, &mut out);
            }
        }
    }
    Ok(out)
}

fn gap_start(b: &[Stmt], s: usize) -> usize {
    if s == 0 {
        0
    } else {
        raw_index(b, s - 1).map_or(b.len(), |r| r + 1)
    }
}

fn stmt_sites(
    env: &Env,
    m: &MethodDecl,
    b: &Block,
    path: &mut BlockPath,
    ps: &[Stmt],
    st0: &MState,
    out: &mut Vec<Env>,
) {
    let n = stmt_count(b);
    for s in 0..=n {
        let gs = gap_start(b, s);
        let from = match ps.first() {
            Some(Stmt::Ellipsis) | Some(Stmt::Marker(_)) => gs,
            _ => raw_index(b, s).unwrap_or(b.len()),
        };
        for (st, end) in match_run(ps, b, from, st0.clone(), false) {
            // A leading anchor pattern starts at that anchor, not at the gap.
            let start = match ps.first() {
                Some(Stmt::Marker(name)) => {
                    gs + b[gs..].iter().position(|x| matches!(x, Stmt::Marker(n) if n == name)).unwrap_or(0)
                }
                _ => from,
            };
            let e = stmt_count(&b[..end]);
            let site = Site::Stmts { method: m.name.clone(), block: path.clone(), start: s, end: e, raw: start..end };
            let region = Position::region(m.name.clone(), path.clone(), s, e);
            out.extend(finish(env, m, st, site, region));
        }
        if s < n {
            if let Some(Stmt::If { then_block, else_block, .. }) = raw_index(b, s).map(|r| &b[r]) {
                path.push((s, Branch::Then));
                stmt_sites(env, m, then_block, path, ps, st0, out);
                path.pop();
                if let Some(eb) = else_block {
                    path.push((s, Branch::Else));
                    stmt_sites(env, m, eb, path, ps, st0, out);
                    path.pop();
                }
            }
        }
    }
}

fn expr_sites(env: &Env, m: &MethodDecl, pe: &Expr, st0: &MState, out: &mut Vec<Env>) {
    let n = m.body.as_deref().map(stmt_count).unwrap_or(0);
    let whole = Position::region(m.name.clone(), vec![], 0, n);
    let clauses = m
        .requires
        .iter()
        .enumerate()
        .map(|(i, e)| (Container::Requires(i), e))
        .chain(m.ensures.iter().enumerate().map(|(i, e)| (Container::Ensures(i), e)));
    for (container, e) in clauses {
        scan_expr(env, m, pe, e, container, whole.clone(), st0, out);
    }
    if let Some(b) = &m.body {
        body_expr_sites(env, m, pe, b, &mut Vec::new(), st0, out);
    }
}

fn body_expr_sites(
    env: &Env,
    m: &MethodDecl,
    pe: &Expr,
    b: &Block,
    path: &mut BlockPath,
    st0: &MState,
    out: &mut Vec<Env>,
) {
    let mut index = 0;
    for s in b {
        if s.is_marker() {
            continue;
        }
        let region = Position::region(m.name.clone(), path.clone(), index, index + 1);
        for (slot, e) in s.exprs().into_iter().enumerate() {
            let container = Container::Stmt { block: path.clone(), index, slot };
            scan_expr(env, m, pe, e, container, region.clone(), st0, out);
        }
        if let Stmt::If { then_block, else_block, .. } = s {
            path.push((index, Branch::Then));
            body_expr_sites(env, m, pe, then_block, path, st0, out);
            path.pop();
            if let Some(eb) = else_block {
                path.push((index, Branch::Else));
                body_expr_sites(env, m, pe, eb, path, st0, out);
                path.pop();
            }
        }
        index += 1;
    }
}

#[allow(clippy::too_many_arguments)]
fn scan_expr(
    env: &Env,
    m: &MethodDecl,
    pe: &Expr,
    e: &Expr,
    container: Container,
    region: Position,
    st0: &MState,
    out: &mut Vec<Env>,
) {
    for (path, sub) in tree::preorder(e) {
        for st in match_expr(pe, sub, st0.clone()) {
            let site = Site::Expr { method: m.name.clone(), container: container.clone(), path: path.clone() };
            out.extend(finish(env, m, st, site, region.clone()));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{parse_pattern, parse_program};

    const SRC: &str = "
        method f(x: int) requires x > 0 ensures x > 0 {
          assert x > 0;
          if x == 1 { assert x == 1; } else { g(x); }
          /*@a*/
        }
        method g(y: int) { assert y == y; }";

    #[test]
    fn assert_sites_in_document_order() {
        let p = parse_program(SRC).unwrap();
        let rs = pmatch(&Env::new(), &p, &parse_pattern("assert ?P;").unwrap()).unwrap();
        let ps: Vec<String> = rs.iter().map(|e| e.vars["P"].to_string()).collect();
        assert_eq!(ps, vec!["x > 0", "x == 1", "y == y"]);
        assert_eq!(rs[1].positions["m"], Position::region("f", vec![(1, Branch::Then)], 0, 1));
        assert_eq!(rs[2].vars["meth"], Binding::Name("g".into()));
        assert_eq!(rs[0].vars["pre"], Binding::Expr(crate::parser::parse_expr("x > 0").unwrap()));
    }

    #[test]
    fn bound_meth_restricts_methods() {
        let p = parse_program(SRC).unwrap();
        let env = Env::new().with_var("meth", Binding::Name("g".into()));
        let rs = pmatch(&env, &p, &parse_pattern("assert ?P;").unwrap()).unwrap();
        assert_eq!(rs.len(), 1);
    }

    #[test]
    fn empty_pattern_matches_every_gap() {
        let p = parse_program(SRC).unwrap();
        let rs = pmatch(&Env::new(), &p, &Pattern::empty()).unwrap();
        // f: 3 top gaps + 2 + 2 in branches; g: 2.
        assert_eq!(rs.len(), 9);
    }

    #[test]
    fn expression_sites_cover_clauses_and_body() {
        let p = parse_program(SRC).unwrap();
        let rs = pmatch(&Env::new(), &p, &parse_pattern("x > 0").unwrap()).unwrap();
        assert_eq!(rs.len(), 3);
    }

    #[test]
    fn method_pattern_binds_postcondition() {
        let p = parse_program(SRC).unwrap();
        let pat = parse_pattern("method ?m(..) ... ensures ?P ...").unwrap();
        let rs = pmatch(&Env::new(), &p, &pat).unwrap();
        assert_eq!(rs.len(), 1);
        assert_eq!(rs[0].vars["m"], Binding::Name("f".into()));
        assert_eq!(rs[0].positions["m"], Position::region("f", vec![], 0, 2));
    }
}
