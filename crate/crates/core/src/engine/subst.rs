//! Replacing a tactic's formals by its (already instantiated) arguments.

use std::collections::BTreeMap;

use crate::ast::*;
use crate::pattern::{ClausePattern, Pattern};
use crate::tactic::{Body, InstItem, Prop, Trans};

pub(crate) struct Subst<'a> {
    pub map: &'a BTreeMap<String, Expr>,
}

impl Subst<'_> {
    fn name(&self, n: &mut Name) {
        if let Name::Id(x) = n {
            match self.map.get(x.as_str()) {
                Some(Expr::Var(v)) => *n = Name::Id(v.clone()),
                Some(Expr::Meta(v)) => *n = Name::Meta(v.clone()),
                _ => {}
            }
        }
    }

    pub fn expr(&self, e: &mut Expr) {
        match e {
            Expr::Var(x) => {
                if let Some(a) = self.map.get(x.as_str()) {
                    *e = a.clone();
                }
            }
            Expr::Quant { vars, body, .. } => {
                let shadowed = vars.iter().any(|v| matches!(&v.name, Name::Id(x) if self.map.contains_key(x)));
                for v in vars.iter_mut() {
                    self.name(&mut v.name);
                }
                if !shadowed {
                    self.expr(body);
                }
            }
            Expr::Call { callee, args } => {
                self.name(callee);
                args.iter_mut().for_each(|a| self.expr(a));
            }
            Expr::Unary(_, x) | Expr::Len(x) | Expr::Field(x, _) => self.expr(x),
            Expr::Binary(_, l, r) | Expr::Rule(l, r) => {
                self.expr(l);
                self.expr(r);
            }
            Expr::SeqDisplay(xs) => xs.iter_mut().for_each(|x| self.expr(x)),
            Expr::Match { scrutinee, cases } => {
                self.expr(scrutinee);
                cases.iter_mut().for_each(|c| self.expr(&mut c.body));
            }
            Expr::Int(_) | Expr::Bool(_) | Expr::Null | Expr::Str(_) | Expr::Meta(_) | Expr::Ellipsis => {}
        }
    }

    fn stmts(&self, ss: &mut [Stmt]) {
        for s in ss {
            match s {
                Stmt::VarDecl { vars, init, .. } => {
                    vars.iter_mut().for_each(|v| self.name(&mut v.name));
                    if let Some(VarInit::Expr(e) | VarInit::SuchThat(e)) = init {
                        self.expr(e);
                    }
                }
                Stmt::Assign { lhs, rhs } => {
                    lhs.iter_mut().for_each(|l| self.expr(l));
                    self.expr(rhs);
                }
                Stmt::Call { callee, args } => {
                    self.name(callee);
                    args.iter_mut().for_each(|a| self.expr(a));
                }
                Stmt::Assert(e) => self.expr(e),
                Stmt::If { cond, then_block, else_block } => {
                    self.expr(cond);
                    self.stmts(then_block);
                    if let Some(b) = else_block {
                        self.stmts(b);
                    }
                }
                Stmt::Marker(_) | Stmt::Ellipsis => {}
            }
        }
    }

    pub fn pattern(&self, p: &mut Pattern) {
        match p {
            Pattern::Stmts(ss) => self.stmts(ss),
            Pattern::Expr(e) => self.expr(e),
            Pattern::Methods(ms) => {
                for m in ms {
                    self.name(&mut m.name);
                    for c in &mut m.clauses {
                        if let ClausePattern::Requires(e) | ClausePattern::Ensures(e) = c {
                            self.expr(e);
                        }
                    }
                    if let Some(b) = &mut m.body {
                        self.stmts(b);
                    }
                }
            }
        }
    }

    fn inst(&self, items: &mut [InstItem]) {
        for i in items {
            if let InstItem::Bind(_, e) = i {
                self.expr(e);
            }
        }
    }

    pub fn trans(&self, t: &mut Trans) {
        match t {
            Trans::Rule { lhs, rhs, inst } => {
                self.pattern(lhs);
                self.pattern(rhs);
                self.inst(&mut inst.items);
            }
            Trans::Match { pat, inst } => {
                self.pattern(pat);
                self.inst(&mut inst.items);
            }
            Trans::Seq(a, b) | Trans::Or(a, b) => {
                self.trans(a);
                self.trans(b);
            }
            Trans::Call { args, inst, .. } => {
                args.iter_mut().for_each(|a| self.expr(a));
                self.inst(&mut inst.items);
            }
        }
    }

    pub fn prop(&self, p: &mut Prop) {
        match p {
            Prop::IsPublic(e) | Prop::IsPrivate(e) | Prop::IsGenerated(e) | Prop::IsGhost(e) => self.expr(e),
            Prop::Not(q) => self.prop(q),
            Prop::ErrorEquals(_) => {}
            Prop::PatternEquals(e, pat) => {
                self.expr(e);
                self.pattern(pat);
            }
        }
    }

    pub fn body(&self, b: &mut Body) {
        match b {
            Body::When(p, t) => {
                self.prop(p);
                self.trans(t);
            }
            Body::Plain(t) => self.trans(t),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_expr;
    use crate::tactic::parse_tactic_defs;

    #[test]
    fn formals_fill_names_and_expressions() {
        let defs = parse_tactic_defs("call-I(m, args) := when m is ghost then {| |} =>> {| m(args); /*@call*/ |}.")
            .unwrap();
        let mut body = defs[0].body.clone();
        let map: BTreeMap<String, Expr> = [
            ("m".to_string(), Expr::var("LemmaLength")),
            ("args".to_string(), parse_expr("n - 1").unwrap()),
        ]
        .into_iter()
        .collect();
        Subst { map: &map }.body(&mut body);
        let want = parse_tactic_defs(
            "x() := when LemmaLength is ghost then {| |} =>> {| LemmaLength(n - 1); /*@call*/ |}.",
        )
        .unwrap();
        assert_eq!(body, want[0].body);
    }
}
