//! Code templates used by rewrite rules and `match` tactics.

use std::collections::BTreeSet;

use crate::ast::{Expr, Name, Param, Stmt, VarInit};

/// A code template. Its category is fixed by the concrete syntax: method
/// headers, statement sequences, or a bare expression.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Pattern {
    Stmts(Vec<Stmt>),
    Expr(Expr),
    Methods(Vec<MethodPattern>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ParamsPattern {
    /// `(..)`
    Any,
    /// `(?xs)`: binds the parameter list followed by the return names.
    Meta(String),
    Exact(Vec<Param>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ClausePattern {
    Requires(Expr),
    Ensures(Expr),
    Modifies(String),
    Ellipsis,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MethodPattern {
    /// `ghost` keyword written in the template.
    pub ghost: bool,
    pub name: Name,
    pub params: ParamsPattern,
    pub clauses: Vec<ClausePattern>,
    /// `None` when the template does not mention a body.
    pub body: Option<Vec<Stmt>>,
}

impl MethodPattern {
    /// A trailing clause ellipsis without a body template stands for the
    /// remaining clauses together with the body.
    pub fn has_tail(&self) -> bool {
        self.body.is_none() && matches!(self.clauses.last(), Some(ClausePattern::Ellipsis))
    }
}

impl Pattern {
    pub fn empty() -> Self {
        Pattern::Stmts(Vec::new())
    }

    /// Metavariables occurring in the template (excluding those local to
    /// embedded rule literals).
    pub fn metavars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        match self {
            Pattern::Stmts(ss) => ss.iter().for_each(|s| stmt_vars(s, &mut out)),
            Pattern::Expr(e) => expr_vars(e, &mut out),
            Pattern::Methods(ms) => {
                for m in ms {
                    name_var(&m.name, &mut out);
                    if let ParamsPattern::Meta(v) = &m.params {
                        out.insert(v.clone());
                    }
                    for c in &m.clauses {
                        if let ClausePattern::Requires(e) | ClausePattern::Ensures(e) = c {
                            expr_vars(e, &mut out);
                        }
                    }
                    if let Some(b) = &m.body {
                        b.iter().for_each(|s| stmt_vars(s, &mut out));
                    }
                }
            }
        }
        out
    }
}

fn name_var(n: &Name, out: &mut BTreeSet<String>) {
    if let Name::Meta(v) = n {
        out.insert(v.clone());
    }
}

pub(crate) fn expr_vars(e: &Expr, out: &mut BTreeSet<String>) {
    match e {
        Expr::Meta(v) => {
            out.insert(v.clone());
        }
        // Rule literals bind their own metavariables.
        Expr::Rule(..) => {}
        Expr::Unary(_, x) | Expr::Len(x) | Expr::Field(x, _) => expr_vars(x, out),
        Expr::Binary(_, l, r) => {
            expr_vars(l, out);
            expr_vars(r, out);
        }
        Expr::Quant { vars, body, .. } => {
            for v in vars {
                name_var(&v.name, out);
            }
            expr_vars(body, out);
        }
        Expr::Call { callee, args } => {
            name_var(callee, out);
            args.iter().for_each(|a| expr_vars(a, out));
        }
        Expr::SeqDisplay(xs) => xs.iter().for_each(|a| expr_vars(a, out)),
        Expr::Match { scrutinee, cases } => {
            expr_vars(scrutinee, out);
            cases.iter().for_each(|c| expr_vars(&c.body, out));
        }
        _ => {}
    }
}

pub(crate) fn stmt_vars(s: &Stmt, out: &mut BTreeSet<String>) {
    match s {
        Stmt::VarDecl { vars, init, .. } => {
            for v in vars {
                name_var(&v.name, out);
            }
            if let Some(VarInit::Expr(e) | VarInit::SuchThat(e)) = init {
                expr_vars(e, out);
            }
        }
        Stmt::Assign { lhs, rhs } => {
            lhs.iter().for_each(|e| expr_vars(e, out));
            expr_vars(rhs, out);
        }
        Stmt::Call { callee, args } => {
            name_var(callee, out);
            args.iter().for_each(|a| expr_vars(a, out));
        }
        Stmt::Assert(e) => expr_vars(e, out),
        Stmt::If { cond, then_block, else_block } => {
            expr_vars(cond, out);
            then_block.iter().for_each(|s| stmt_vars(s, out));
            if let Some(b) = else_block {
                b.iter().for_each(|s| stmt_vars(s, out));
            }
        }
        Stmt::Marker(_) | Stmt::Ellipsis => {}
    }
}
