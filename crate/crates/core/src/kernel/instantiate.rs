//! Filling templates from bindings and captures.

use std::collections::{BTreeMap, BTreeSet};

use super::env::{Binding, Capture};
use super::rewrite::{rewrite_pairs, rewrite_rule, DEFAULT_STEP_LIMIT};
use crate::ast::*;
use crate::error::KernelError;
use crate::pattern::expr_vars;

pub(crate) struct Instantiator<'a> {
    vars: &'a BTreeMap<String, Binding>,
    caps: &'a [Capture],
    next: usize,
    /// Leave unbound metavariables (and rewrites over them) in place.
    partial: bool,
}

/// Template nodes built by a right-hand side are tidied: conjunctions are
/// flattened to the right and `!` is pushed into (in)equalities.
fn negate(e: Expr) -> Expr {
    match e {
        Expr::Unary(UnOp::Not, x) => *x,
        Expr::Binary(BinOp::Eq, l, r) => Expr::Binary(BinOp::Ne, l, r),
        Expr::Binary(BinOp::Ne, l, r) => Expr::Binary(BinOp::Eq, l, r),
        other => Expr::not(other),
    }
}

fn is_ground(e: &Expr) -> bool {
    let mut vs = BTreeSet::new();
    expr_vars(e, &mut vs);
    let mut ellipsis = false;
    e.walk(&mut |x| ellipsis |= matches!(x, Expr::Ellipsis));
    vs.is_empty() && !ellipsis
}

impl<'a> Instantiator<'a> {
    pub fn full(vars: &'a BTreeMap<String, Binding>, caps: &'a [Capture]) -> Self {
        Instantiator { vars, caps, next: 0, partial: false }
    }

    pub fn partial(vars: &'a BTreeMap<String, Binding>) -> Self {
        Instantiator { vars, caps: &[], next: 0, partial: true }
    }

    pub fn next_capture(&mut self) -> Result<Capture, KernelError> {
        let c = self
            .caps
            .get(self.next)
            .cloned()
            .ok_or_else(|| KernelError::MalformedPattern("right-hand side has more `...` than the left".into()))?;
        self.next += 1;
        Ok(c)
    }

    fn mismatch(what: &str) -> KernelError {
        KernelError::MalformedPattern(format!("`...` used where a {what} was captured"))
    }

    pub fn name(&mut self, n: &Name) -> Result<Name, KernelError> {
        match n {
            Name::Id(_) => Ok(n.clone()),
            Name::Meta(v) => match self.vars.get(v) {
                Some(b) => b
                    .as_name()
                    .map(Name::Id)
                    .ok_or_else(|| KernelError::MalformedPattern(format!("?{v} is not a name"))),
                None if self.partial => Ok(n.clone()),
                None => Err(KernelError::UnboundVariable(v.clone())),
            },
        }
    }

    pub fn expr(&mut self, e: &Expr) -> Result<Expr, KernelError> {
        Ok(match e {
            Expr::Meta(v) => match self.vars.get(v) {
                Some(b) => b
                    .as_expr()
                    .ok_or_else(|| KernelError::MalformedPattern(format!("list ?{v} used as an expression")))?,
                None if self.partial => e.clone(),
                None => return Err(KernelError::UnboundVariable(v.clone())),
            },
            Expr::Ellipsis if self.partial => e.clone(),
            Expr::Ellipsis => match self.next_capture()? {
                Capture::Exprs(xs) => Expr::conjoin(xs)
                    .ok_or_else(|| KernelError::MalformedPattern("empty `...` in expression".into()))?,
                _ => return Err(Self::mismatch("expression")),
            },
            Expr::Binary(BinOp::And, ..) => {
                let mut parts = Vec::new();
                for c in e.conjuncts() {
                    match c {
                        Expr::Ellipsis if !self.partial => match self.next_capture()? {
                            Capture::Exprs(xs) => parts.extend(xs),
                            _ => return Err(Self::mismatch("conjunct run")),
                        },
                        other => {
                            let x = self.expr(other)?;
                            parts.extend(x.conjuncts().into_iter().cloned());
                        }
                    }
                }
                Expr::conjoin(parts)
                    .ok_or_else(|| KernelError::MalformedPattern("conjunction became empty".into()))?
            }
            Expr::Unary(UnOp::Not, x) => negate(self.expr(x)?),
            Expr::Unary(op, x) => Expr::Unary(*op, Box::new(self.expr(x)?)),
            Expr::Binary(op, l, r) => Expr::bin(*op, self.expr(l)?, self.expr(r)?),
            Expr::Quant { q, vars, body } => {
                let mut vs = Vec::new();
                for v in vars {
                    vs.push(BoundVar { name: self.name(&v.name)?, ty: v.ty.clone() });
                }
                Expr::Quant { q: *q, vars: vs, body: Box::new(self.expr(body)?) }
            }
            Expr::Len(x) => Expr::Len(Box::new(self.expr(x)?)),
            Expr::Field(x, f) => Expr::Field(Box::new(self.expr(x)?), f.clone()),
            Expr::Call { callee: Name::Id(f), args } if f == "rewrite" || f == "rewrite1" => {
                return self.rewrite(f == "rewrite1", args);
            }
            Expr::Call { callee, args } => Expr::Call { callee: self.name(callee)?, args: self.args(args)? },
            Expr::SeqDisplay(xs) => Expr::SeqDisplay(xs.iter().map(|x| self.expr(x)).collect::<Result<_, _>>()?),
            Expr::Match { scrutinee, cases } => Expr::Match {
                scrutinee: Box::new(self.expr(scrutinee)?),
                cases: cases
                    .iter()
                    .map(|c| {
                        Ok(MatchCase { ctor: c.ctor.clone(), binders: c.binders.clone(), body: self.expr(&c.body)? })
                    })
                    .collect::<Result<_, KernelError>>()?,
            },
            // Rule literals keep their own metavariables.
            Expr::Rule(..) | Expr::Int(_) | Expr::Bool(_) | Expr::Null | Expr::Str(_) | Expr::Var(_) => e.clone(),
        })
    }

    /// Argument lists: a lone list-bound metavariable expands in place.
    pub fn args(&mut self, args: &[Expr]) -> Result<Vec<Expr>, KernelError> {
        if let [Expr::Meta(v)] = args {
            if let Some(Binding::List(xs)) = self.vars.get(v) {
                return Ok(xs.clone());
            }
        }
        args.iter().map(|a| self.expr(a)).collect()
    }

    fn list_arg(&mut self, e: &Expr) -> Result<Option<Vec<Expr>>, KernelError> {
        match e {
            Expr::Meta(v) => match self.vars.get(v) {
                Some(Binding::List(xs)) if xs.len() != 1 => Ok(Some(xs.clone())),
                _ => Ok(None),
            },
            Expr::SeqDisplay(xs) => Ok(Some(xs.iter().map(|x| self.expr(x)).collect::<Result<_, _>>()?)),
            _ => Ok(None),
        }
    }

    fn rewrite(&mut self, once: bool, args: &[Expr]) -> Result<Expr, KernelError> {
        let deferred = |inst: &mut Self, args: &[Expr]| -> Result<Expr, KernelError> {
            let args = args.iter().map(|a| inst.expr(a)).collect::<Result<_, _>>()?;
            let callee = Name::id(if once { "rewrite1" } else { "rewrite" });
            Ok(Expr::Call { callee, args })
        };
        match args {
            [rule, target] => {
                let rule = self.expr(rule)?;
                let target = self.expr(target)?;
                if !is_ground(&target) {
                    return deferred(self, &[rule, target]);
                }
                let Expr::Rule(l, r) = rule else {
                    return Err(KernelError::MalformedPattern("two-argument rewrite needs a rule `l =>> r`".into()));
                };
                rewrite_rule(&l, &r, &target, once, DEFAULT_STEP_LIMIT)
            }
            [from, to, target] => {
                let lists = match (from, to) {
                    (Expr::SeqDisplay(_), Expr::SeqDisplay(_)) | (Expr::Meta(_), Expr::Meta(_)) => {
                        match (self.list_arg(from)?, self.list_arg(to)?) {
                            (Some(a), Some(b)) => Some((a, b)),
                            _ => None,
                        }
                    }
                    _ => None,
                };
                let (froms, tos) = match lists {
                    Some(ab) => ab,
                    None => (vec![self.expr(from)?], vec![self.expr(to)?]),
                };
                let target = self.expr(target)?;
                if !froms.iter().chain(&tos).chain(std::iter::once(&target)).all(is_ground) {
                    return deferred(self, args);
                }
                rewrite_pairs(&froms, &tos, &target)
            }
            _ => Err(KernelError::MalformedPattern(format!("rewrite takes 2 or 3 arguments, got {}", args.len()))),
        }
    }

    pub fn stmts(&mut self, ss: &[Stmt]) -> Result<Vec<Stmt>, KernelError> {
        let mut out = Vec::new();
        for s in ss {
            match s {
                Stmt::Ellipsis if !self.partial => match self.next_capture()? {
                    Capture::Stmts(xs) => out.extend(xs),
                    _ => return Err(Self::mismatch("statement run")),
                },
                other => out.push(self.stmt(other)?),
            }
        }
        Ok(out)
    }

    fn stmt(&mut self, s: &Stmt) -> Result<Stmt, KernelError> {
        Ok(match s {
            Stmt::VarDecl { ghost, vars, init } => Stmt::VarDecl {
                ghost: *ghost,
                vars: vars
                    .iter()
                    .map(|v| Ok(LocalVar { name: self.name(&v.name)?, ty: v.ty.clone() }))
                    .collect::<Result<_, KernelError>>()?,
                init: match init {
                    None => None,
                    Some(VarInit::Expr(e)) => Some(VarInit::Expr(self.expr(e)?)),
                    Some(VarInit::SuchThat(e)) => Some(VarInit::SuchThat(self.expr(e)?)),
                },
            },
            Stmt::Assign { lhs, rhs } => Stmt::Assign {
                lhs: lhs.iter().map(|l| self.expr(l)).collect::<Result<_, _>>()?,
                rhs: self.expr(rhs)?,
            },
            Stmt::Call { callee, args } => Stmt::Call { callee: self.name(callee)?, args: self.args(args)? },
            Stmt::Assert(e) => Stmt::Assert(self.expr(e)?),
            Stmt::If { cond, then_block, else_block } => Stmt::If {
                cond: self.expr(cond)?,
                then_block: self.stmts(then_block)?,
                else_block: match else_block {
                    Some(b) => Some(self.stmts(b)?),
                    None => None,
                },
            },
            Stmt::Marker(_) | Stmt::Ellipsis => s.clone(),
        })
    }
}

/// Partially instantiates `e`: bound metavariables are replaced, unbound
/// ones stay, and rewrites are evaluated once their inputs are ground.
pub fn instantiate_partial(e: &Expr, vars: &BTreeMap<String, Binding>) -> Result<Expr, KernelError> {
    Instantiator::partial(vars).expr(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_expr;

    fn ex(s: &str) -> Expr {
        parse_expr(s).unwrap()
    }

    fn vars(items: &[(&str, Binding)]) -> BTreeMap<String, Binding> {
        items.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
    }

    #[test]
    fn list_rewrite_maps_arguments_to_parameters() {
        let vs = vars(&[
            ("xs", Binding::List(vec![ex("g"), ex("a"), ex("cmds")])),
            ("ys", Binding::List(vec![ex("grip"), ex("aah"), ex("comb")])),
            ("P", Binding::Expr(ex("cmds != null"))),
        ]);
        let e = Instantiator::full(&vs, &[]).expr(&ex("rewrite(?xs, ?ys, ?P)")).unwrap();
        assert_eq!(e, ex("comb != null"));
    }

    #[test]
    fn unbound_rewrite_is_deferred_in_partial_mode() {
        let e = instantiate_partial(&ex("rewrite(?y, x, ?Q)"), &BTreeMap::new()).unwrap();
        assert_eq!(e, ex("rewrite(?y, x, ?Q)"));
        let e = instantiate_partial(&ex("rewrite(?y, x, ?Q)"), &vars(&[
            ("y", Binding::Name("xs".into())),
            ("Q", Binding::Expr(ex("length(xs) == n"))),
        ]))
        .unwrap();
        assert_eq!(e, ex("length(x) == n"));
    }

    #[test]
    fn built_nodes_are_normalised() {
        let vs = vars(&[("C", Binding::Expr(ex("x == 0"))), ("A", Binding::Expr(ex("a && b")))]);
        let e = Instantiator::full(&vs, &[]).expr(&ex("!?C ==> ?A && c")).unwrap();
        assert_eq!(e, ex("x != 0 ==> a && b && c"));
    }

    #[test]
    fn empty_conjunct_run_fails() {
        let caps = [Capture::Exprs(vec![])];
        assert!(Instantiator::full(&BTreeMap::new(), &caps).expr(&ex("...")).is_err());
        let caps = [Capture::Exprs(vec![]), Capture::Exprs(vec![ex("q")])];
        let e = Instantiator::full(&BTreeMap::new(), &caps).expr(&ex("... && p && ...")).unwrap();
        assert_eq!(e, ex("p && q"));
    }

    #[test]
    fn unbound_is_an_error_in_full_mode() {
        let err = Instantiator::full(&BTreeMap::new(), &[]).expr(&ex("?z")).unwrap_err();
        assert_eq!(err, KernelError::UnboundVariable("z".into()));
    }
}
