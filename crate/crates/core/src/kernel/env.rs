//! Binding store threaded through tactic evaluation.

use std::collections::BTreeMap;
use std::fmt;

use crate::ast::{Block, Expr, Param, Stmt};
use crate::position::{BlockPath, Position};
use crate::printer::{print_expr, print_stmt};

/// Value of a `?` metavariable. Its shape follows the slot it was bound in.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Binding {
    Expr(Expr),
    /// Identifier slot: method name, local name, bound variable.
    Name(String),
    /// Argument-list slot: `?xs` in `?m(?xs)` or `method ?m(?ys)`.
    List(Vec<Expr>),
}

impl Binding {
    /// Expression view; a name reads as a variable, a one-element list as
    /// its element.
    pub fn as_expr(&self) -> Option<Expr> {
        match self {
            Binding::Expr(e) => Some(e.clone()),
            Binding::Name(n) => Some(Expr::Var(n.clone())),
            Binding::List(xs) if xs.len() == 1 => Some(xs[0].clone()),
            Binding::List(_) => None,
        }
    }

    pub fn as_name(&self) -> Option<String> {
        match self {
            Binding::Name(n) => Some(n.clone()),
            Binding::Expr(Expr::Var(n)) => Some(n.clone()),
            Binding::List(xs) if xs.len() == 1 => match &xs[0] {
                Expr::Var(n) => Some(n.clone()),
                _ => None,
            },
            _ => None,
        }
    }

    pub fn as_list(&self) -> Vec<Expr> {
        match self {
            Binding::List(xs) => xs.clone(),
            other => other.as_expr().into_iter().collect(),
        }
    }

    /// Equality across slot shapes (`Name(x)` equals `Expr(x)`).
    pub fn same(&self, other: &Binding) -> bool {
        if self == other {
            return true;
        }
        match (self, other) {
            (Binding::List(a), b) | (b, Binding::List(a)) => *a == b.as_list(),
            (a, b) => a.as_expr().is_some() && a.as_expr() == b.as_expr(),
        }
    }
}

impl fmt::Display for Binding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Binding::Expr(e) => f.write_str(&print_expr(e)),
            Binding::Name(n) => f.write_str(n),
            Binding::List(xs) => {
                let parts: Vec<String> = xs.iter().map(print_expr).collect();
                write!(f, "[{}]", parts.join(", "))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Clause {
    Requires(Expr),
    Modifies(String),
    Ensures(Expr),
}

/// Text matched by one `...` of a rule's left-hand side.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Capture {
    Stmts(Vec<Stmt>),
    Exprs(Vec<Expr>),
    Clauses(Vec<Clause>),
    Params { params: Vec<Param>, returns: Vec<Param> },
    /// Remaining clauses together with the body.
    Tail { clauses: Vec<Clause>, body: Option<Block> },
}

impl fmt::Display for Capture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Capture::Stmts(ss) => {
                let parts: Vec<String> = ss.iter().map(print_stmt).collect();
                write!(f, "{{{}}}", parts.join(" "))
            }
            Capture::Exprs(es) => {
                let parts: Vec<String> = es.iter().map(print_expr).collect();
                write!(f, "<{}>", parts.join(" && "))
            }
            Capture::Clauses(cs) => write!(f, "<{} clauses>", cs.len()),
            Capture::Params { params, returns } => write!(f, "<{}+{} params>", params.len(), returns.len()),
            Capture::Tail { clauses, .. } => write!(f, "<{} clauses + body>", clauses.len()),
        }
    }
}

/// Which part of a method holds a matched expression.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Container {
    Requires(usize),
    Ensures(usize),
    /// The `slot`-th expression (see `Stmt::exprs`) of a body statement.
    Stmt { block: BlockPath, index: usize, slot: usize },
}

/// Exact location of a match, used by the application phase.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Site {
    Stmts {
        method: String,
        block: BlockPath,
        start: usize,
        end: usize,
        raw: std::ops::Range<usize>,
    },
    Expr {
        method: String,
        container: Container,
        /// Child indices from the container expression down.
        path: Vec<usize>,
    },
    Method {
        method: String,
    },
}

impl Site {
    pub fn method(&self) -> &str {
        match self {
            Site::Stmts { method, .. } | Site::Expr { method, .. } | Site::Method { method } => method,
        }
    }
}

pub const CONTEXT_VARS: &[&str] = &["pre", "post", "meth", "arg"];
pub const CONTEXT_POSITIONS: &[&str] = &["s", "e", "m"];
const KEPT_VARS: &[&str] = &["error", "err_arg", "pre", "post", "meth", "arg"];
const KEPT_POSITIONS: &[&str] = &["err_pos", "pos", "start", "end"];

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Env {
    pub vars: BTreeMap<String, Binding>,
    pub positions: BTreeMap<String, Position>,
    /// Captures of the match that produced this environment, in order.
    pub captures: Vec<Capture>,
    pub site: Option<Site>,
}

impl Env {
    pub fn new() -> Self {
        Env::default()
    }

    pub fn var(&self, name: &str) -> Option<&Binding> {
        self.vars.get(name)
    }

    pub fn with_var(mut self, name: &str, b: Binding) -> Self {
        self.vars.insert(name.to_string(), b);
        self
    }

    pub fn with_position(mut self, name: &str, p: Position) -> Self {
        self.positions.insert(name.to_string(), p);
        self
    }

    /// Drops bindings created by patterns; reserved entries survive.
    pub fn flush(&self) -> Env {
        Env {
            vars: self
                .vars
                .iter()
                .filter(|(k, _)| KEPT_VARS.contains(&k.as_str()))
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
            positions: self
                .positions
                .iter()
                .filter(|(k, _)| KEPT_POSITIONS.contains(&k.as_str()))
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
            captures: Vec::new(),
            site: None,
        }
    }

    /// Adds `other`'s bindings; fails on a conflicting variable.
    pub fn merge(&self, other: &Env) -> Option<Env> {
        let mut out = self.clone();
        for (k, v) in &other.vars {
            match out.vars.get(k) {
                Some(old) if !old.same(v) => return None,
                Some(_) => {}
                None => {
                    out.vars.insert(k.clone(), v.clone());
                }
            }
        }
        for (k, v) in &other.positions {
            out.positions.insert(k.clone(), v.clone());
        }
        Some(out)
    }
}

impl fmt::Display for Env {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, v) in &self.vars {
            if !first {
                f.write_str(", ")?;
            }
            first = false;
            write!(f, "?{k} := {v}")?;
        }
        for (k, v) in &self.positions {
            if !first {
                f.write_str(", ")?;
            }
            first = false;
            write!(f, "@{k} = {v}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flush_keeps_reserved_entries() {
        let e = Env::new()
            .with_var("x", Binding::Expr(Expr::Int(1)))
            .with_var("error", Binding::Expr(Expr::Str("target object may be null".into())))
            .with_position("pos", Position::gap("m", vec![], 0))
            .with_position("s", Position::gap("m", vec![], 0));
        let f = e.flush();
        assert_eq!(f.vars.keys().collect::<Vec<_>>(), vec!["error"]);
        assert_eq!(f.positions.keys().collect::<Vec<_>>(), vec!["pos"]);
        assert_eq!(f.flush(), f);
        assert_eq!(Env::new().flush(), Env::new());
    }

    #[test]
    fn bindings_compare_across_shapes() {
        assert!(Binding::Name("x".into()).same(&Binding::Expr(Expr::var("x"))));
        assert!(Binding::List(vec![Expr::Int(1)]).same(&Binding::Expr(Expr::Int(1))));
        assert!(!Binding::List(vec![]).same(&Binding::Expr(Expr::Int(1))));
    }
}
