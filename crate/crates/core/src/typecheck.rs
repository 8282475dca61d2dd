//! Well-formedness check run on every candidate program.
//!
//! Types are inferred loosely: anything the checker cannot see through
//! is `Any` and compatible with everything, so only definite mistakes are
//! reported.

use std::collections::BTreeMap;
use std::fmt;

use crate::ast::*;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeError {
    /// Declaration the problem was found in.
    pub decl: String,
    pub message: String,
}

impl fmt::Display for TypeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "in `{}`: {}", self.decl, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Ty {
    Int,
    Bool,
    Seq(Box<Ty>),
    Named(String),
    Null,
    Any,
}

impl Ty {
    fn of(t: &Type) -> Ty {
        match (t.name.as_str(), t.args.as_slice()) {
            ("int" | "nat", _) => Ty::Int,
            ("bool", _) => Ty::Bool,
            ("seq", [e]) => Ty::Seq(Box::new(Ty::of(e))),
            (n, _) => Ty::Named(n.to_string()),
        }
    }

    fn compatible(&self, o: &Ty) -> bool {
        match (self, o) {
            (Ty::Any, _) | (_, Ty::Any) => true,
            (Ty::Null, Ty::Named(_)) | (Ty::Named(_), Ty::Null) | (Ty::Null, Ty::Null) => true,
            (Ty::Seq(a), Ty::Seq(b)) => a.compatible(b),
            (a, b) => a == b,
        }
    }
}

#[derive(Clone)]
struct Local {
    ty: Ty,
    ghost: bool,
}

struct Checker<'a> {
    p: &'a Program,
    errors: Vec<TypeError>,
    decl: String,
}

type Scope = BTreeMap<String, Local>;

impl<'a> Checker<'a> {
    fn err(&mut self, msg: impl Into<String>) {
        self.errors.push(TypeError { decl: self.decl.clone(), message: msg.into() });
    }

    fn ctor(&self, name: &str) -> Option<(&'a str, &'a Ctor)> {
        self.p.decls.iter().find_map(|d| match d {
            Decl::Datatype { name: dt, ctors } => ctors.iter().find(|c| c.name == name).map(|c| (dt.as_str(), c)),
            _ => None,
        })
    }

    fn field(&self, class: &str, f: &str) -> Option<Ty> {
        self.p.decls.iter().find_map(|d| match d {
            Decl::Class { name, fields } if name == class => {
                fields.iter().find(|x| x.name == f).map(|x| Ty::of(&x.ty))
            }
            Decl::Datatype { name, ctors } if name == class => ctors
                .iter()
                .flat_map(|c| &c.fields)
                .find(|x| x.name == f)
                .map(|x| Ty::of(&x.ty)),
            _ => None,
        })
    }

    fn name_of<'n>(&mut self, n: &'n Name) -> Option<&'n str> {
        match n {
            Name::Id(s) => Some(s),
            Name::Meta(v) => {
                self.err(format!("residual metavariable ?{v}"));
                None
            }
        }
    }

    fn expect(&mut self, e: &Expr, scope: &Scope, want: Ty, what: &str) {
        let t = self.expr(e, scope);
        if !t.compatible(&want) {
            self.err(format!("{what} is not {want:?}-typed"));
        }
    }

    fn expr(&mut self, e: &Expr, scope: &Scope) -> Ty {
        match e {
            Expr::Int(_) => Ty::Int,
            Expr::Bool(_) => Ty::Bool,
            Expr::Null => Ty::Null,
            Expr::Str(_) => Ty::Any,
            Expr::Var(v) => {
                if let Some(l) = scope.get(v) {
                    return l.ty.clone();
                }
                match self.ctor(v) {
                    Some((dt, c)) if c.fields.is_empty() => Ty::Named(dt.to_string()),
                    Some(_) => {
                        self.err(format!("constructor `{v}` needs arguments"));
                        Ty::Any
                    }
                    None => {
                        self.err(format!("unknown name `{v}`"));
                        Ty::Any
                    }
                }
            }
            Expr::Meta(v) => {
                self.err(format!("residual metavariable ?{v}"));
                Ty::Any
            }
            Expr::Ellipsis => {
                self.err("residual `...`");
                Ty::Any
            }
            Expr::Rule(..) => {
                self.err("rewrite rule in program text");
                Ty::Any
            }
            Expr::Unary(UnOp::Not, x) => {
                self.expect(x, scope, Ty::Bool, "operand of `!`");
                Ty::Bool
            }
            Expr::Unary(UnOp::Neg, x) => {
                self.expect(x, scope, Ty::Int, "operand of `-`");
                Ty::Int
            }
            Expr::Binary(op, l, r) => self.binary(*op, l, r, scope),
            Expr::Quant { vars, body, .. } => {
                let mut inner = scope.clone();
                for v in vars {
                    if let Some(n) = self.name_of(&v.name) {
                        let ty = v.ty.as_ref().map(Ty::of).unwrap_or(Ty::Any);
                        inner.insert(n.to_string(), Local { ty, ghost: true });
                    }
                }
                self.expect(body, &inner, Ty::Bool, "quantifier body");
                Ty::Bool
            }
            Expr::Len(x) => {
                if !matches!(self.expr(x, scope), Ty::Seq(_) | Ty::Any) {
                    self.err("`|..|` applied to a non-sequence");
                }
                Ty::Int
            }
            Expr::Call { callee, args } => self.call(callee, args, scope),
            Expr::Field(x, f) => match self.expr(x, scope) {
                Ty::Named(c) => self.field(&c, f).unwrap_or_else(|| {
                    self.err(format!("`{c}` has no field `{f}`"));
                    Ty::Any
                }),
                Ty::Any => Ty::Any,
                _ => {
                    self.err(format!("field `{f}` of a non-object"));
                    Ty::Any
                }
            },
            Expr::SeqDisplay(xs) => {
                let mut elem = Ty::Any;
                for x in xs {
                    let t = self.expr(x, scope);
                    if elem == Ty::Any {
                        elem = t;
                    } else if !t.compatible(&elem) {
                        self.err("sequence elements of different types");
                    }
                }
                Ty::Seq(Box::new(elem))
            }
            Expr::Match { scrutinee, cases } => {
                self.expr(scrutinee, scope);
                let mut result = Ty::Any;
                for c in cases {
                    let mut inner = scope.clone();
                    match self.ctor(&c.ctor) {
                        Some((_, ctor)) if ctor.fields.len() == c.binders.len() => {
                            for (b, f) in c.binders.iter().zip(&ctor.fields) {
                                inner.insert(b.clone(), Local { ty: Ty::of(&f.ty), ghost: false });
                            }
                        }
                        Some(_) => self.err(format!("case `{}` has the wrong number of binders", c.ctor)),
                        None => self.err(format!("unknown constructor `{}`", c.ctor)),
                    }
                    let t = self.expr(&c.body, &inner);
                    if result == Ty::Any {
                        result = t;
                    }
                }
                result
            }
        }
    }

    fn binary(&mut self, op: BinOp, l: &Expr, r: &Expr, scope: &Scope) -> Ty {
        match op {
            BinOp::Implies | BinOp::Or | BinOp::And => {
                self.expect(l, scope, Ty::Bool, "operand of a connective");
                self.expect(r, scope, Ty::Bool, "operand of a connective");
                Ty::Bool
            }
            BinOp::Eq | BinOp::Ne => {
                let (a, b) = (self.expr(l, scope), self.expr(r, scope));
                if !a.compatible(&b) {
                    self.err("comparison of unrelated types");
                }
                Ty::Bool
            }
            BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => {
                self.expect(l, scope, Ty::Int, "operand of an ordering");
                self.expect(r, scope, Ty::Int, "operand of an ordering");
                Ty::Bool
            }
            BinOp::Add => {
                let (a, b) = (self.expr(l, scope), self.expr(r, scope));
                match (&a, &b) {
                    (Ty::Seq(_), _) | (_, Ty::Seq(_)) if a.compatible(&b) => {
                        if matches!(a, Ty::Seq(_)) { a } else { b }
                    }
                    (Ty::Int | Ty::Any, Ty::Int | Ty::Any) => Ty::Int,
                    _ => {
                        self.err("`+` on incompatible operands");
                        Ty::Any
                    }
                }
            }
            BinOp::Sub | BinOp::Mul | BinOp::Div | BinOp::Mod => {
                self.expect(l, scope, Ty::Int, "arithmetic operand");
                self.expect(r, scope, Ty::Int, "arithmetic operand");
                Ty::Int
            }
        }
    }

    fn args(&mut self, name: &str, params: &[Param], args: &[Expr], scope: &Scope) {
        if params.len() != args.len() {
            self.err(format!("`{name}` takes {} argument(s), got {}", params.len(), args.len()));
        }
        for (a, p) in args.iter().zip(params) {
            let t = self.expr(a, scope);
            if !t.compatible(&Ty::of(&p.ty)) {
                self.err(format!("argument `{}` of `{name}` has the wrong type", p.name));
            }
        }
    }

    fn call(&mut self, callee: &Name, args: &[Expr], scope: &Scope) -> Ty {
        let Some(name) = self.name_of(callee) else { return Ty::Any };
        if let Some(f) = self.p.function(name) {
            self.args(name, &f.params, args, scope);
            return Ty::of(&f.result);
        }
        if let Some((dt, c)) = self.ctor(name) {
            self.args(name, &c.fields, args, scope);
            return Ty::Named(dt.to_string());
        }
        if self.p.method(name).is_some() {
            self.err(format!("method `{name}` called inside an expression"));
        } else {
            self.err(format!("unknown function `{name}`"));
        }
        args.iter().for_each(|a| {
            self.expr(a, scope);
        });
        Ty::Any
    }

    /// Output types of a call-like initializer, if it calls a method.
    fn method_call(&mut self, e: &Expr, scope: &Scope) -> Option<(bool, Vec<Ty>)> {
        let Expr::Call { callee: Name::Id(n), args } = e else { return None };
        let m = self.p.method(n)?;
        self.args(n, &m.params, args, scope);
        Some((m.is_ghost, m.returns.iter().map(|r| Ty::of(&r.ty)).collect()))
    }

    fn block(&mut self, b: &Block, scope: &mut Scope, ghost_ctx: bool) {
        for s in b {
            self.stmt(s, scope, ghost_ctx);
        }
    }

    fn stmt(&mut self, s: &Stmt, scope: &mut Scope, ghost_ctx: bool) {
        match s {
            Stmt::VarDecl { ghost, vars, init } => {
                let ghost = *ghost || ghost_ctx;
                let mut tys: Vec<Ty> = vars.iter().map(|v| v.ty.as_ref().map(Ty::of).unwrap_or(Ty::Any)).collect();
                match init {
                    None => {}
                    Some(VarInit::SuchThat(e)) => {
                        if !ghost {
                            self.err("`:|` declares a non-ghost variable");
                        }
                        let mut inner = scope.clone();
                        for (v, t) in vars.iter().zip(&tys) {
                            if let Some(n) = self.name_of(&v.name) {
                                inner.insert(n.to_string(), Local { ty: t.clone(), ghost });
                            }
                        }
                        self.expect(e, &inner, Ty::Bool, "`:|` predicate");
                    }
                    Some(VarInit::Expr(e)) => {
                        if let Some((callee_ghost, outs)) = self.method_call(e, scope) {
                            if outs.len() != vars.len() {
                                self.err(format!("call returns {} value(s), {} declared", outs.len(), vars.len()));
                            }
                            if callee_ghost && !ghost {
                                self.err("result of a ghost method stored in a non-ghost variable");
                            }
                            for (t, o) in tys.iter_mut().zip(outs) {
                                if *t == Ty::Any {
                                    *t = o;
                                }
                            }
                        } else if vars.len() != 1 {
                            self.err("several variables initialised from one expression");
                        } else {
                            let t = self.expr(e, scope);
                            if !t.compatible(&tys[0]) {
                                self.err("initialiser has the wrong type");
                            }
                            if tys[0] == Ty::Any {
                                tys[0] = t;
                            }
                        }
                    }
                }
                for (v, ty) in vars.iter().zip(tys) {
                    if let Some(n) = self.name_of(&v.name) {
                        scope.insert(n.to_string(), Local { ty, ghost });
                    }
                }
            }
            Stmt::Assign { lhs, rhs } => {
                let mut targets = Vec::new();
                for l in lhs {
                    let t = self.expr(l, scope);
                    let ghost = match l {
                        Expr::Var(v) => scope.get(v).is_some_and(|x| x.ghost),
                        _ => false,
                    };
                    if ghost_ctx && !ghost {
                        self.err("non-ghost variable assigned in ghost code");
                    }
                    targets.push((t, ghost));
                }
                if let Some((callee_ghost, outs)) = self.method_call(rhs, scope) {
                    if outs.len() != lhs.len() {
                        self.err(format!("call returns {} value(s), {} assigned", outs.len(), lhs.len()));
                    }
                    if callee_ghost && targets.iter().any(|(_, g)| !g) {
                        self.err("result of a ghost method stored in a non-ghost variable");
                    }
                } else if lhs.len() != 1 {
                    self.err("several targets assigned from one expression");
                } else {
                    let t = self.expr(rhs, scope);
                    if !t.compatible(&targets[0].0) {
                        self.err("assigned value has the wrong type");
                    }
                }
            }
            Stmt::Call { callee, args } => {
                let Some(n) = self.name_of(callee) else { return };
                match self.p.method(n) {
                    Some(m) => {
                        let m = m.clone();
                        self.args(n, &m.params, args, scope);
                        if !m.returns.is_empty() {
                            self.err(format!("results of `{n}` are discarded"));
                        }
                        if ghost_ctx && !m.is_ghost {
                            self.err(format!("compiled method `{n}` called from ghost code"));
                        }
                    }
                    None => self.err(format!("unknown method `{n}`")),
                }
            }
            Stmt::Assert(e) => self.expect(e, scope, Ty::Bool, "assertion"),
            Stmt::If { cond, then_block, else_block } => {
                self.expect(cond, scope, Ty::Bool, "condition");
                let mut mentions_ghost = false;
                cond.walk(&mut |x| {
                    if let Expr::Var(v) = x {
                        mentions_ghost |= scope.get(v).is_some_and(|l| l.ghost);
                    }
                });
                let inner_ghost = ghost_ctx || mentions_ghost;
                self.block(then_block, &mut scope.clone(), inner_ghost);
                if let Some(b) = else_block {
                    self.block(b, &mut scope.clone(), inner_ghost);
                }
            }
            Stmt::Marker(_) => {}
            Stmt::Ellipsis => self.err("residual `...`"),
        }
    }

    fn method(&mut self, m: &MethodDecl) {
        self.decl = m.name.clone();
        if m.visibility == Visibility::Generated && !m.is_ghost {
            self.err("generated methods must be ghost");
        }
        let mut scope = Scope::new();
        for p in &m.params {
            scope.insert(p.name.clone(), Local { ty: Ty::of(&p.ty), ghost: m.is_ghost });
        }
        for e in &m.requires {
            self.expect(e, &scope, Ty::Bool, "precondition");
        }
        for r in &m.returns {
            scope.insert(r.name.clone(), Local { ty: Ty::of(&r.ty), ghost: m.is_ghost });
        }
        for e in &m.ensures {
            self.expect(e, &scope, Ty::Bool, "postcondition");
        }
        if let Some(b) = &m.body {
            self.block(b, &mut scope, m.is_ghost);
        }
    }

    fn function(&mut self, f: &FunctionDecl) {
        self.decl = f.name.clone();
        let scope: Scope =
            f.params.iter().map(|p| (p.name.clone(), Local { ty: Ty::of(&p.ty), ghost: false })).collect();
        for e in f.requires.iter().chain(&f.ensures) {
            self.expect(e, &scope, Ty::Bool, "contract");
        }
        if let Some(b) = &f.body {
            self.expect(b, &scope, Ty::of(&f.result), "function body");
        }
    }
}

/// All problems found; empty means the program is well formed.
pub fn typecheck(p: &Program) -> Vec<TypeError> {
    let mut c = Checker { p, errors: Vec::new(), decl: String::new() };
    for d in &p.decls {
        match d {
            Decl::Method(m) => c.method(m),
            Decl::Function(f) => c.function(f),
            _ => {}
        }
    }
    c.errors
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_program;

    #[test]
    fn lemma_listing_is_well_typed() {
        let p = parse_program(
            "datatype List = Nil | Cons(head: int, tail: List)
             function length(xs: List): int { match xs case Nil => 0 case Cons(h, t) => 1 + length(t) }
             ghost method LemmaLength(n: int) requires n >= 0 ensures exists xs :: length(xs) == n {
               if n == 0 { assert length(Nil) == 0; } else {
                 LemmaLength(n - 1);
                 var xs :| length(xs) == n - 1;
                 assert length(Cons(1, xs)) == n;
               }
             }",
        )
        .unwrap();
        assert_eq!(typecheck(&p), vec![]);
    }

    #[test]
    fn residual_metavariable_reported() {
        let p = parse_program("method f(x: int) { assert x > 0; }").unwrap();
        let mut q = p.clone();
        if let Decl::Method(m) = &mut q.decls[0] {
            m.body = Some(vec![Stmt::Assert(Expr::Meta("P".into()))]);
        }
        assert_eq!(typecheck(&p), vec![]);
        let errs = typecheck(&q);
        assert_eq!(errs.len(), 1);
        assert!(errs[0].message.contains("?P"));
    }

    #[test]
    fn ghost_results_stay_ghost() {
        let p = parse_program("ghost method g() returns (r: int) { } method f() { var x := g(); }").unwrap();
        assert_eq!(typecheck(&p).len(), 1);
        let p = parse_program("ghost method g() returns (r: int) { } method f() { ghost var x := g(); }").unwrap();
        assert_eq!(typecheck(&p), vec![]);
    }

    #[test]
    fn arity_and_names() {
        let p = parse_program("method g(a: int) { } method f() { g(1, 2); h(); assert y; }").unwrap();
        assert_eq!(typecheck(&p).len(), 3);
    }
}
