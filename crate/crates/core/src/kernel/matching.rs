//! Syntactic matching of templates against code.
//!
//! Every matcher returns all ways the template fits, in a fixed order, so
//! callers can backtrack over them.

use std::collections::BTreeMap;

use super::env::{Binding, Capture, Clause};
use crate::ast::*;
use crate::pattern::{ClausePattern, MethodPattern, ParamsPattern};

#[derive(Debug, Clone, Default, PartialEq)]
pub(crate) struct MState {
    pub vars: BTreeMap<String, Binding>,
    pub caps: Vec<Capture>,
}

impl MState {
    pub fn with_vars(vars: BTreeMap<String, Binding>) -> Self {
        MState { vars, caps: Vec::new() }
    }

    fn bind(mut self, v: &str, b: Binding) -> Option<Self> {
        match self.vars.get(v) {
            Some(old) => old.same(&b).then_some(self),
            None => {
                self.vars.insert(v.to_string(), b);
                Some(self)
            }
        }
    }

    fn capture(mut self, c: Capture) -> Self {
        self.caps.push(c);
        self
    }
}

fn one(st: Option<MState>) -> Vec<MState> {
    st.into_iter().collect()
}

pub(crate) fn match_name(p: &Name, code: &str, st: MState) -> Option<MState> {
    match p {
        Name::Id(n) => (n == code).then_some(st),
        Name::Meta(v) => st.bind(v, Binding::Name(code.to_string())),
    }
}

fn match_type(p: &Option<Type>, c: &Option<Type>) -> bool {
    p.is_none() || p == c
}

/// `f(?xs)`: a lone metavariable argument stands for the whole list.
fn list_slot(args: &[Expr]) -> Option<&str> {
    match args {
        [Expr::Meta(v)] => Some(v),
        _ => None,
    }
}

fn has_chain_ellipsis(p: &Expr) -> bool {
    p.conjuncts().iter().any(|c| matches!(c, Expr::Ellipsis))
}

pub(crate) fn match_expr(p: &Expr, c: &Expr, st: MState) -> Vec<MState> {
    match (p, c) {
        (Expr::Meta(v), _) => one(st.bind(v, Binding::Expr(c.clone()))),
        (Expr::Ellipsis, _) => vec![st.capture(Capture::Exprs(vec![c.clone()]))],
        (Expr::Binary(BinOp::And, ..), _) if has_chain_ellipsis(p) => {
            match_chain(&p.conjuncts(), &c.conjuncts(), st)
        }
        (Expr::Int(a), Expr::Int(b)) if a == b => vec![st],
        (Expr::Bool(a), Expr::Bool(b)) if a == b => vec![st],
        (Expr::Null, Expr::Null) => vec![st],
        (Expr::Str(a), Expr::Str(b)) if a == b => vec![st],
        (Expr::Var(a), Expr::Var(b)) if a == b => vec![st],
        (Expr::Unary(o1, x), Expr::Unary(o2, y)) if o1 == o2 => match_expr(x, y, st),
        (Expr::Binary(o1, l1, r1), Expr::Binary(o2, l2, r2)) if o1 == o2 => match_expr(l1, l2, st)
            .into_iter()
            .flat_map(|s| match_expr(r1, r2, s))
            .collect(),
        (Expr::Quant { q: q1, vars: v1, body: b1 }, Expr::Quant { q: q2, vars: v2, body: b2 })
            if q1 == q2 && v1.len() == v2.len() =>
        {
            let mut st = Some(st);
            for (a, b) in v1.iter().zip(v2) {
                let Name::Id(cn) = &b.name else { return vec![] };
                if !match_type(&a.ty, &b.ty) {
                    return vec![];
                }
                st = st.and_then(|s| match_name(&a.name, cn, s));
            }
            st.map(|s| match_expr(b1, b2, s)).unwrap_or_default()
        }
        (Expr::Len(x), Expr::Len(y)) => match_expr(x, y, st),
        (Expr::Field(x, f), Expr::Field(y, g)) if f == g => match_expr(x, y, st),
        (Expr::Call { callee: pc, args: pa }, Expr::Call { callee: Name::Id(cc), args: ca }) => {
            let Some(st) = match_name(pc, cc, st) else { return vec![] };
            match list_slot(pa) {
                Some(v) => one(st.bind(v, Binding::List(ca.clone()))),
                None => match_exprs(pa, ca, st),
            }
        }
        (Expr::SeqDisplay(xs), Expr::SeqDisplay(ys)) => match_exprs(xs, ys, st),
        (Expr::Match { scrutinee: s1, cases: c1 }, Expr::Match { scrutinee: s2, cases: c2 })
            if c1.len() == c2.len() =>
        {
            let mut states = match_expr(s1, s2, st);
            for (a, b) in c1.iter().zip(c2) {
                if a.ctor != b.ctor || a.binders != b.binders {
                    return vec![];
                }
                states = states.into_iter().flat_map(|s| match_expr(&a.body, &b.body, s)).collect();
            }
            states
        }
        _ => vec![],
    }
}

pub(crate) fn match_exprs(ps: &[Expr], cs: &[Expr], st: MState) -> Vec<MState> {
    if ps.len() != cs.len() {
        return vec![];
    }
    let mut states = vec![st];
    for (p, c) in ps.iter().zip(cs) {
        states = states.into_iter().flat_map(|s| match_expr(p, c, s)).collect();
    }
    states
}

/// Conjunct-level matching: each `...` takes a (possibly empty) run.
fn match_chain(ps: &[&Expr], cs: &[&Expr], st: MState) -> Vec<MState> {
    let Some((first, rest)) = ps.split_first() else {
        return if cs.is_empty() { vec![st] } else { vec![] };
    };
    if matches!(first, Expr::Ellipsis) {
        (0..=cs.len())
            .flat_map(|k| {
                let run = cs[..k].iter().map(|e| (*e).clone()).collect();
                match_chain(rest, &cs[k..], st.clone().capture(Capture::Exprs(run)))
            })
            .collect()
    } else {
        let Some((c, crest)) = cs.split_first() else { return vec![] };
        match_expr(first, c, st).into_iter().flat_map(|s| match_chain(rest, crest, s)).collect()
    }
}

fn call_parts(s: &Stmt) -> Option<(&str, Vec<Expr>)> {
    fn outs<'a>(names: Vec<Expr>, callee: &'a Name, args: &[Expr]) -> Option<(&'a str, Vec<Expr>)> {
        let mut all = args.to_vec();
        all.extend(names);
        callee.as_id().map(|c| (c, all))
    }
    match s {
        Stmt::Call { callee, args } => callee.as_id().map(|c| (c, args.clone())),
        Stmt::VarDecl { vars, init: Some(VarInit::Expr(Expr::Call { callee, args })), .. } => {
            let names = vars.iter().map(|v| Expr::Var(v.name.to_string())).collect();
            outs(names, callee, args)
        }
        Stmt::Assign { lhs, rhs: Expr::Call { callee, args } } => outs(lhs.clone(), callee, args),
        _ => None,
    }
}

pub(crate) fn match_stmt(p: &Stmt, c: &Stmt, st: MState) -> Vec<MState> {
    match (p, c) {
        (Stmt::Call { callee, args }, _) if list_slot(args).is_some() => {
            let Some((cc, all)) = call_parts(c) else { return vec![] };
            let Some(st) = match_name(callee, cc, st) else { return vec![] };
            one(st.bind(list_slot(args).unwrap(), Binding::List(all)))
        }
        (Stmt::Call { callee: pc, args: pa }, Stmt::Call { callee: Name::Id(cc), args: ca }) => {
            match match_name(pc, cc, st) {
                Some(st) => match_exprs(pa, ca, st),
                None => vec![],
            }
        }
        (Stmt::Assert(a), Stmt::Assert(b)) => match_expr(a, b, st),
        (Stmt::Assign { lhs: pl, rhs: pr }, Stmt::Assign { lhs: cl, rhs: cr }) => match_exprs(pl, cl, st)
            .into_iter()
            .flat_map(|s| match_expr(pr, cr, s))
            .collect(),
        // `?x := ?e` also covers an initialising declaration.
        (
            Stmt::Assign { lhs: pl, rhs: pr },
            Stmt::VarDecl { vars, init: Some(VarInit::Expr(ce)), .. },
        ) if pl.len() == 1 && vars.len() == 1 => {
            let Name::Id(n) = &vars[0].name else { return vec![] };
            match_expr(&pl[0], &Expr::Var(n.clone()), st)
                .into_iter()
                .flat_map(|s| match_expr(pr, ce, s))
                .collect()
        }
        (
            Stmt::VarDecl { ghost: pg, vars: pv, init: pi },
            Stmt::VarDecl { ghost: cg, vars: cv, init: ci },
        ) if pv.len() == cv.len() && (!pg || *cg) => {
            let mut st = Some(st);
            for (a, b) in pv.iter().zip(cv) {
                let Name::Id(cn) = &b.name else { return vec![] };
                if !match_type(&a.ty, &b.ty) {
                    return vec![];
                }
                st = st.and_then(|s| match_name(&a.name, cn, s));
            }
            let Some(st) = st else { return vec![] };
            match (pi, ci) {
                (None, None) => vec![st],
                (Some(VarInit::Expr(a)), Some(VarInit::Expr(b)))
                | (Some(VarInit::SuchThat(a)), Some(VarInit::SuchThat(b))) => match_expr(a, b, st),
                _ => vec![],
            }
        }
        (
            Stmt::If { cond: pc, then_block: pt, else_block: pe },
            Stmt::If { cond: cc, then_block: ct, else_block: ce },
        ) => {
            let states: Vec<MState> = match_expr(pc, cc, st)
                .into_iter()
                .flat_map(|s| match_block(pt, ct, s))
                .collect();
            match (pe, ce) {
                (None, None) => states,
                (Some(pe), Some(ce)) => states.into_iter().flat_map(|s| match_block(pe, ce, s)).collect(),
                _ => vec![],
            }
        }
        (Stmt::Marker(a), Stmt::Marker(b)) if a == b => vec![st],
        _ => vec![],
    }
}

/// Matches a whole block; trailing anchors are tolerated.
pub(crate) fn match_block(ps: &[Stmt], cs: &[Stmt], st: MState) -> Vec<MState> {
    match_run(ps, cs, 0, st, true)
        .into_iter()
        .filter(|(_, end)| cs[*end..].iter().all(Stmt::is_marker))
        .map(|(s, _)| s)
        .collect()
}

/// Matches `ps` against statements starting at raw index `j`; yields each
/// way it fits together with the raw index just past the matched run. In
/// `full` mode a trailing ellipsis takes everything up to the block end.
pub(crate) fn match_run(ps: &[Stmt], cs: &[Stmt], j: usize, st: MState, full: bool) -> Vec<(MState, usize)> {
    let Some((first, rest)) = ps.split_first() else {
        return vec![(st, j)];
    };
    match first {
        Stmt::Ellipsis => {
            let mut out = Vec::new();
            for k in j..=cs.len() {
                let stops_before_stmt = k == cs.len() || !cs[k].is_marker();
                if !stops_before_stmt || (rest.is_empty() && full && k != cs.len()) {
                    continue;
                }
                let st = st.clone().capture(Capture::Stmts(cs[j..k].to_vec()));
                out.extend(match_run(rest, cs, k, st, full));
            }
            out
        }
        Stmt::Marker(n) => {
            let mut k = j;
            while k < cs.len() && cs[k].is_marker() {
                if matches!(&cs[k], Stmt::Marker(m) if m == n) {
                    return match_run(rest, cs, k + 1, st, full);
                }
                k += 1;
            }
            vec![]
        }
        p => {
            let mut k = j;
            while k < cs.len() && cs[k].is_marker() {
                k += 1;
            }
            if k == cs.len() {
                return vec![];
            }
            match_stmt(p, &cs[k], st)
                .into_iter()
                .flat_map(|s| match_run(rest, cs, k + 1, s, full))
                .collect()
        }
    }
}

pub(crate) fn method_clauses(m: &MethodDecl) -> Vec<Clause> {
    let mut out: Vec<Clause> = m.requires.iter().cloned().map(Clause::Requires).collect();
    out.extend(m.modifies.iter().cloned().map(Clause::Modifies));
    out.extend(m.ensures.iter().cloned().map(Clause::Ensures));
    out
}

pub(crate) fn match_method(mp: &MethodPattern, m: &MethodDecl, st: MState) -> Vec<MState> {
    if mp.ghost && !m.is_ghost {
        return vec![];
    }
    let Some(st) = match_name(&mp.name, &m.name, st) else { return vec![] };
    let st = match &mp.params {
        ParamsPattern::Any => {
            st.capture(Capture::Params { params: m.params.clone(), returns: m.returns.clone() })
        }
        ParamsPattern::Meta(v) => {
            let names = m.params.iter().chain(&m.returns).map(|p| Expr::Var(p.name.clone())).collect();
            match st.bind(v, Binding::List(names)) {
                Some(s) => s,
                None => return vec![],
            }
        }
        ParamsPattern::Exact(ps) => {
            if *ps != m.params || !m.returns.is_empty() {
                return vec![];
            }
            st
        }
    };
    let clauses = method_clauses(m);
    let states = match_clauses(&mp.clauses, &clauses, 0, st, mp.has_tail(), m);
    match &mp.body {
        None => states,
        Some(pb) => match &m.body {
            Some(cb) => states.into_iter().flat_map(|s| match_block(pb, cb, s)).collect(),
            None => vec![],
        },
    }
}

fn match_clauses(
    ps: &[ClausePattern],
    cs: &[Clause],
    j: usize,
    st: MState,
    tail: bool,
    m: &MethodDecl,
) -> Vec<MState> {
    let Some((first, rest)) = ps.split_first() else {
        return if j == cs.len() { vec![st] } else { vec![] };
    };
    match first {
        ClausePattern::Ellipsis if tail && rest.is_empty() => {
            vec![st.capture(Capture::Tail { clauses: cs[j..].to_vec(), body: m.body.clone() })]
        }
        ClausePattern::Ellipsis => (j..=cs.len())
            .flat_map(|k| {
                let st = st.clone().capture(Capture::Clauses(cs[j..k].to_vec()));
                match_clauses(rest, cs, k, st, tail, m)
            })
            .collect(),
        ClausePattern::Requires(p) => match cs.get(j) {
            Some(Clause::Requires(c)) => match_expr(p, c, st)
                .into_iter()
                .flat_map(|s| match_clauses(rest, cs, j + 1, s, tail, m))
                .collect(),
            _ => vec![],
        },
        ClausePattern::Ensures(p) => match cs.get(j) {
            Some(Clause::Ensures(c)) => match_expr(p, c, st)
                .into_iter()
                .flat_map(|s| match_clauses(rest, cs, j + 1, s, tail, m))
                .collect(),
            _ => vec![],
        },
        ClausePattern::Modifies(t) => match cs.get(j) {
            Some(Clause::Modifies(c)) if c == t => match_clauses(rest, cs, j + 1, st, tail, m),
            _ => vec![],
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{parse_expr, parse_pattern, parse_program};
    use crate::pattern::Pattern;

    fn stmts(src: &str) -> Vec<Stmt> {
        match parse_pattern(src).unwrap() {
            Pattern::Stmts(s) => s,
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn conjunct_runs() {
        let p = parse_expr("... && ?C && ...").unwrap();
        let c = parse_expr("a && b && c").unwrap();
        let rs = match_expr(&p, &c, MState::default());
        let picked: Vec<_> = rs.iter().map(|s| s.vars["C"].clone()).collect();
        assert_eq!(picked.len(), 3);
        assert_eq!(picked[1], Binding::Expr(Expr::var("b")));
    }

    #[test]
    fn right_nested_split() {
        let p = parse_expr("?A && ?B").unwrap();
        let c = parse_expr("a && b && c").unwrap();
        let rs = match_expr(&p, &c, MState::default());
        assert_eq!(rs.len(), 1);
        assert_eq!(rs[0].vars["B"], Binding::Expr(parse_expr("b && c").unwrap()));
    }

    #[test]
    fn call_like_statements_bind_outputs() {
        let p = &stmts("?m(?xs);")[0];
        let c = &stmts("var r := f(a, b);")[0];
        let rs = match_stmt(p, c, MState::default());
        assert_eq!(rs[0].vars["xs"], Binding::List(vec![Expr::var("a"), Expr::var("b"), Expr::var("r")]));
        assert_eq!(rs[0].vars["m"], Binding::Name("f".into()));
    }

    #[test]
    fn prebound_variables_constrain() {
        let p = &stmts("?m(?xs);")[0];
        let c = &stmts("g(x);")[0];
        let mut vars = BTreeMap::new();
        vars.insert("m".to_string(), Binding::Expr(Expr::var("f")));
        assert!(match_stmt(p, c, MState::with_vars(vars)).is_empty());
    }

    #[test]
    fn ellipsis_runs_and_anchors() {
        let ps = stmts("... assert ?P;");
        let cs = stmts("x := 1; /*@a*/ assert y; assert z;");
        let rs = match_run(&ps, &cs, 0, MState::default(), false);
        assert_eq!(rs.len(), 2);
        assert_eq!(rs[0].1, 3);
        assert_eq!(rs[0].0.caps, vec![Capture::Stmts(cs[..2].to_vec())]);
    }

    #[test]
    fn method_clause_sequences() {
        let p = parse_program("method f(x: int) requires a requires b ensures c { }").unwrap();
        let m = p.method("f").unwrap();
        let Pattern::Methods(mp) = parse_pattern("method ?m(..) ... requires ?P ...").unwrap() else { panic!() };
        let rs = match_method(&mp[0], m, MState::default());
        assert_eq!(rs.len(), 2);
        assert!(matches!(rs[1].caps.last(), Some(Capture::Tail { clauses, .. }) if clauses.len() == 1));
    }
}
