//! Seeded random generation of well-typed programs, tactic invocations and
//! program edits, for round-trip, search and guard testing.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ast::*;
use crate::printer::print_expr;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Ty {
    Int,
    Bool,
    Seq,
    Data,
}

impl Ty {
    fn ast(self) -> Type {
        match self {
            Ty::Int => Type::simple("int"),
            Ty::Bool => Type::simple("bool"),
            Ty::Seq => Type::seq(Type::simple("int")),
            Ty::Data => Type::simple("D"),
        }
    }
}

#[derive(Debug, Clone)]
struct Var {
    name: String,
    ty: Ty,
    ghost: bool,
}

#[derive(Debug, Clone)]
struct Sig {
    name: String,
    params: Vec<Ty>,
    ghost: bool,
    returns: bool,
}

pub struct Gen {
    rng: ChaCha8Rng,
    fresh: usize,
    functions: Vec<(String, bool, bool)>,
    methods: Vec<Sig>,
}

impl Gen {
    pub fn new(seed: u64) -> Self {
        Gen { rng: ChaCha8Rng::seed_from_u64(seed), fresh: 0, functions: Vec::new(), methods: Vec::new() }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    fn chance(&mut self, p: f64) -> bool {
        self.rng.gen_bool(p)
    }

    fn name(&mut self, prefix: &str) -> String {
        self.fresh += 1;
        format!("{prefix}{}", self.fresh)
    }

    /// A well-typed program: a datatype, a class, a few functions and
    /// methods of every visibility.
    pub fn program(&mut self) -> Program {
        self.fresh = 0;
        self.functions.clear();
        self.methods.clear();
        let mut decls = vec![
            Decl::Datatype {
                name: "D".into(),
                ctors: vec![
                    Ctor { name: "C0".into(), fields: vec![] },
                    Ctor { name: "C1".into(), fields: vec![Param::new("v", Type::simple("int"))] },
                ],
            },
            Decl::Class { name: "K".into(), fields: vec![Param::new("k", Type::simple("int"))] },
        ];
        for _ in 0..self.rng.gen_range(0..=2) {
            decls.push(Decl::Function(self.function()));
        }
        for _ in 0..self.rng.gen_range(1..=4) {
            decls.push(Decl::Method(self.method()));
        }
        Program { decls }
    }

    fn function(&mut self) -> FunctionDecl {
        let kind = *[FunctionKind::Function, FunctionKind::FunctionMethod, FunctionKind::Predicate, FunctionKind::PredicateMethod]
            .choose(&mut self.rng)
            .unwrap();
        let name = self.name(if kind.is_predicate() { "p" } else { "f" });
        let scope = vec![Var { name: "x".into(), ty: Ty::Int, ghost: false }];
        let (result, body) = if kind.is_predicate() {
            (Type::simple("bool"), self.expr(Ty::Bool, &scope, 2, true))
        } else {
            (Type::simple("int"), self.expr(Ty::Int, &scope, 2, true))
        };
        let vis = if self.chance(0.3) { Visibility::Public } else { Visibility::Private };
        let f = FunctionDecl {
            name: name.clone(),
            visibility: vis,
            kind,
            params: vec![Param::new("x", Type::simple("int"))],
            result,
            requires: vec![],
            ensures: vec![],
            body: Some(body),
        };
        self.functions.push((name, kind.is_predicate(), kind.is_compiled()));
        f
    }

    fn method(&mut self) -> MethodDecl {
        let vis = *[Visibility::Public, Visibility::Private, Visibility::Private, Visibility::Generated]
            .choose(&mut self.rng)
            .unwrap();
        let ghost = vis == Visibility::Generated || self.chance(0.15);
        let name = self.name("m");
        let mut m = MethodDecl::new(name.clone());
        m.visibility = vis;
        m.is_ghost = ghost;
        let mut scope = Vec::new();
        let mut ptys = Vec::new();
        for i in 0..self.rng.gen_range(0..=3) {
            let ty = *[Ty::Int, Ty::Int, Ty::Bool, Ty::Seq, Ty::Data].choose(&mut self.rng).unwrap();
            let n = format!("a{i}");
            m.params.push(Param::new(n.clone(), ty.ast()));
            scope.push(Var { name: n, ty, ghost: false });
            ptys.push(ty);
        }
        for _ in 0..self.rng.gen_range(0..=2) {
            let e = self.expr(Ty::Bool, &scope, 2, false);
            m.requires.push(e);
        }
        let returns = !ghost && self.chance(0.6);
        if returns {
            m.returns.push(Param::new("r", Type::simple("int")));
        }
        let mut post_scope = scope.clone();
        if returns {
            post_scope.push(Var { name: "r".into(), ty: Ty::Int, ghost: false });
        }
        for _ in 0..self.rng.gen_range(0..=2) {
            let e = self.expr(Ty::Bool, &post_scope, 2, false);
            m.ensures.push(e);
        }
        let n = self.rng.gen_range(0..=5);
        m.body = Some(self.block(&mut post_scope, ghost, n, 2));
        self.methods.push(Sig { name, params: ptys, ghost, returns });
        m
    }

    fn block(&mut self, scope: &mut Vec<Var>, in_ghost: bool, n: usize, depth: usize) -> Block {
        let mark = scope.len();
        let mut out = Vec::new();
        for _ in 0..n {
            if let Some(s) = self.stmt(scope, in_ghost, depth) {
                out.push(s);
            }
        }
        scope.truncate(mark);
        out
    }

    fn stmt(&mut self, scope: &mut Vec<Var>, in_ghost: bool, depth: usize) -> Option<Stmt> {
        let compiled = !in_ghost;
        match self.rng.gen_range(0..10) {
            0..=2 => {
                let ghost = compiled && self.chance(0.25);
                let name = self.name("v");
                let ty = if self.chance(0.8) { Ty::Int } else { Ty::Bool };
                let init = if ghost && self.chance(0.3) {
                    let mut inner = scope.clone();
                    inner.push(Var { name: name.clone(), ty, ghost: true });
                    let cond = self.expr(Ty::Bool, &inner, 1, false);
                    VarInit::SuchThat(cond)
                } else if let Some(call) = self.call_expr(scope, in_ghost || ghost).filter(|_| ty == Ty::Int) {
                    VarInit::Expr(call)
                } else {
                    VarInit::Expr(self.expr(ty, &visible(scope, compiled && !ghost), 2, compiled && !ghost))
                };
                let annotated = matches!(init, VarInit::SuchThat(_)) || self.chance(0.3);
                scope.push(Var { name: name.clone(), ty, ghost: ghost || in_ghost });
                Some(Stmt::VarDecl {
                    ghost,
                    vars: vec![LocalVar { name: Name::id(name), ty: annotated.then(|| ty.ast()) }],
                    init: Some(init),
                })
            }
            3 => {
                let targets: Vec<Var> =
                    scope.iter().filter(|v| v.ty == Ty::Int && (in_ghost || !v.ghost) && !v.name.starts_with('a')).cloned().collect();
                let t = targets.choose(&mut self.rng)?.clone();
                let rhs = self.expr(Ty::Int, &visible(scope, compiled && !t.ghost), 2, compiled && !t.ghost);
                Some(Stmt::Assign { lhs: vec![Expr::var(t.name)], rhs })
            }
            4..=5 => Some(Stmt::Assert(self.expr(Ty::Bool, scope, 2, false))),
            6..=7 if depth > 0 => {
                let cond = self.expr(Ty::Bool, &visible(scope, compiled), 2, compiled);
                let n = self.rng.gen_range(0..=3);
                let then_block = self.block(scope, in_ghost, n, depth - 1);
                let else_block = if self.chance(0.6) {
                    let n = self.rng.gen_range(0..=3);
                    Some(self.block(scope, in_ghost, n, depth - 1))
                } else {
                    None
                };
                Some(Stmt::If { cond, then_block, else_block })
            }
            8 => {
                let ghosts: Vec<Sig> = self.methods.iter().filter(|s| s.ghost).cloned().collect();
                let g = ghosts.choose(&mut self.rng)?.clone();
                let args = g.params.iter().map(|t| self.expr(*t, scope, 1, false)).collect();
                Some(Stmt::Call { callee: Name::id(g.name), args })
            }
            _ if self.chance(0.3) => Some(Stmt::Marker(self.name("k"))),
            _ => None,
        }
    }

    /// A call to an earlier method with a result, usable as an initializer.
    fn call_expr(&mut self, scope: &[Var], ghost_ctx: bool) -> Option<Expr> {
        // ghost code may not call compiled methods
        if ghost_ctx || !self.chance(0.3) {
            return None;
        }
        let cands: Vec<Sig> = self.methods.iter().filter(|s| s.returns && !s.ghost).cloned().collect();
        let s = cands.choose(&mut self.rng)?.clone();
        let vis = visible(scope, !ghost_ctx);
        let args = s.params.iter().map(|t| self.expr(*t, &vis, 1, !ghost_ctx)).collect();
        Some(Expr::Call { callee: Name::id(s.name), args })
    }

    /// An expression of type `ty`; `compiled` excludes ghost-only functions.
    fn expr(&mut self, ty: Ty, scope: &[Var], depth: usize, compiled: bool) -> Expr {
        let vars: Vec<&Var> = scope.iter().filter(|v| v.ty == ty).collect();
        let leaf = depth == 0 || self.chance(0.3);
        if leaf {
            if !vars.is_empty() && self.chance(0.7) {
                return Expr::var(vars.choose(&mut self.rng).unwrap().name.clone());
            }
            return match ty {
                Ty::Int => Expr::Int(self.rng.gen_range(0..10)),
                Ty::Bool => Expr::Bool(self.chance(0.5)),
                Ty::Seq => Expr::SeqDisplay((0..self.rng.gen_range(0..3)).map(|_| Expr::Int(self.rng.gen_range(0..5))).collect()),
                Ty::Data => {
                    if self.chance(0.5) {
                        Expr::var("C0")
                    } else {
                        Expr::Call { callee: Name::id("C1"), args: vec![Expr::Int(self.rng.gen_range(0..5))] }
                    }
                }
            };
        }
        let d = depth - 1;
        match ty {
            Ty::Int => match self.rng.gen_range(0..7) {
                0..=2 => {
                    let op = *[BinOp::Add, BinOp::Sub, BinOp::Mul, BinOp::Div, BinOp::Mod].choose(&mut self.rng).unwrap();
                    Expr::bin(op, self.expr(Ty::Int, scope, d, compiled), self.expr(Ty::Int, scope, d, compiled))
                }
                3 => Expr::Len(Box::new(self.expr(Ty::Seq, scope, d, compiled))),
                4 => match self.pick_function(false, compiled) {
                    Some(f) => Expr::Call { callee: Name::id(f), args: vec![self.expr(Ty::Int, scope, d, compiled)] },
                    None => self.expr(Ty::Int, scope, 0, compiled),
                },
                5 if !vars.is_empty() => {
                    Expr::Unary(UnOp::Neg, Box::new(Expr::var(vars.choose(&mut self.rng).unwrap().name.clone())))
                }
                _ => {
                    let sc = self.expr(Ty::Data, scope, 0, compiled);
                    let b = self.name("b");
                    let inner: Vec<Var> =
                        scope.iter().cloned().chain([Var { name: b.clone(), ty: Ty::Int, ghost: false }]).collect();
                    Expr::Match {
                        scrutinee: Box::new(sc),
                        cases: vec![
                            MatchCase { ctor: "C0".into(), binders: vec![], body: self.expr(Ty::Int, scope, d, compiled) },
                            MatchCase { ctor: "C1".into(), binders: vec![b], body: self.expr(Ty::Int, &inner, d, compiled) },
                        ],
                    }
                }
            },
            Ty::Bool => match self.rng.gen_range(0..8) {
                0..=2 => {
                    let op = *[BinOp::Eq, BinOp::Ne, BinOp::Lt, BinOp::Le, BinOp::Gt, BinOp::Ge].choose(&mut self.rng).unwrap();
                    Expr::bin(op, self.expr(Ty::Int, scope, d, compiled), self.expr(Ty::Int, scope, d, compiled))
                }
                3..=4 => {
                    let op = *[BinOp::And, BinOp::Or, BinOp::Implies, BinOp::And].choose(&mut self.rng).unwrap();
                    Expr::bin(op, self.expr(Ty::Bool, scope, d, compiled), self.expr(Ty::Bool, scope, d, compiled))
                }
                5 => Expr::not(self.expr(Ty::Bool, scope, d, compiled)),
                6 if !compiled => {
                    let q = if self.chance(0.5) { Quantifier::Forall } else { Quantifier::Exists };
                    let i = self.name("i");
                    let inner: Vec<Var> =
                        scope.iter().cloned().chain([Var { name: i.clone(), ty: Ty::Int, ghost: true }]).collect();
                    Expr::Quant {
                        q,
                        vars: vec![BoundVar { name: Name::id(i), ty: Some(Type::simple("int")) }],
                        body: Box::new(self.expr(Ty::Bool, &inner, d, compiled)),
                    }
                }
                _ => match self.pick_function(true, compiled) {
                    Some(p) => Expr::Call { callee: Name::id(p), args: vec![self.expr(Ty::Int, scope, d, compiled)] },
                    None => self.expr(Ty::Bool, scope, 0, compiled),
                },
            },
            Ty::Seq => {
                let n = self.rng.gen_range(1..3);
                Expr::SeqDisplay((0..n).map(|_| self.expr(Ty::Int, scope, d, compiled)).collect())
            }
            Ty::Data => self.expr(Ty::Data, scope, 0, compiled),
        }
    }

    fn pick_function(&mut self, predicate: bool, compiled: bool) -> Option<String> {
        let c: Vec<String> = self
            .functions
            .iter()
            .filter(|(_, p, c)| *p == predicate && (*c || !compiled))
            .map(|(n, _, _)| n.clone())
            .collect();
        c.choose(&mut self.rng).cloned()
    }

    /// A random boolean expression over the parameters (and results) of `m`.
    pub fn condition(&mut self, m: &MethodDecl, with_returns: bool) -> Expr {
        let mut scope: Vec<Var> = Vec::new();
        let ps = m.params.iter().chain(if with_returns { m.returns.iter() } else { [].iter() });
        for p in ps {
            let ty = match p.ty.name.as_str() {
                "int" => Ty::Int,
                "bool" => Ty::Bool,
                "seq" => Ty::Seq,
                _ => Ty::Data,
            };
            scope.push(Var { name: p.name.clone(), ty, ghost: false });
        }
        self.expr(Ty::Bool, &scope, 2, false)
    }
}

fn visible(scope: &[Var], compiled: bool) -> Vec<Var> {
    scope.iter().filter(|v| !compiled || !v.ghost).cloned().collect()
}

/// A random stdlib invocation suited to `p`.
pub fn invocation(g: &mut Gen, p: &Program) -> String {
    let methods: Vec<&MethodDecl> = p.methods().collect();
    let m = (*methods.choose(g.rng()).unwrap()).clone();
    let cond = |g: &mut Gen, ret: bool| print_expr(&g.condition(&m, ret));
    match g.rng().gen_range(0..22) {
        0 => format!("assert-I({})[?meth := {}]", cond(g, false), m.name),
        1 => format!("post-I({})[?m := {}]", cond(g, true), m.name),
        2 => format!("pre-I({})[?m := {}]", cond(g, false), m.name),
        3 => "assert-E()".into(),
        4 => "pre-E()".into(),
        5 => "post-E()".into(),
        6 => "post-to-assert()".into(),
        7 => "assert-to-pre()".into(),
        8 => "assert-to-post()".into(),
        9 | 10 => "assert-up()".into(),
        11 => "assert-down()".into(),
        12 => "assert-conj-I()".into(),
        13 => "assert-up-ctxt()".into(),
        14 => "assert-strengthen()".into(),
        15 => "assert-comb1()".into(),
        16 => "post-to-post()".into(),
        17 => format!("case-I({})[?meth := {}]", cond(g, false), m.name),
        18 => "assert-rewr({| ?x + 0 =>> ?x |})".into(),
        19 => "assert-rewr({| ?a && ?b =>> ?b && ?a |})".into(),
        20 => "pred-var-I(w, w > 0)".into(),
        _ => "assert-up3()".into(),
    }
}

/// What an edit is expected to do to the guard verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EditKind {
    Legal,
    CodeChanged,
    PublicPreStrengthened,
    PublicPostWeakened,
    SignatureChanged,
    PublicRemoved,
}

fn body_mut(m: &mut MethodDecl) -> &mut Block {
    m.body.get_or_insert_with(Vec::new)
}

fn compiled_index(b: &Block) -> Vec<usize> {
    b.iter()
        .enumerate()
        .filter(|(_, s)| matches!(s, Stmt::Assign { .. } | Stmt::If { .. } | Stmt::VarDecl { ghost: false, .. }))
        .map(|(i, _)| i)
        .collect()
}

/// Applies one random edit of the requested kind; `None` when `p` offers no
/// place for it.
pub fn mutate(g: &mut Gen, p: &Program, kind: EditKind) -> Option<Program> {
    let mut q = p.clone();
    let names: Vec<String> = p.methods().filter(|m| m.visibility != Visibility::Generated).map(|m| m.name.clone()).collect();
    let all: Vec<String> = p.methods().map(|m| m.name.clone()).collect();
    match kind {
        EditKind::Legal => {
            let name = all.choose(g.rng())?.clone();
            let m = p.method(&name)?.clone();
            let public = m.visibility == Visibility::Public;
            let c = g.condition(&m, false);
            let mm = q.method_mut(&name)?;
            match g.rng().gen_range(0..7) {
                0 => {
                    let b = body_mut(mm);
                    let at = g.rng().gen_range(0..=b.len());
                    b.insert(at, Stmt::Assert(c));
                }
                1 => {
                    let b = body_mut(mm);
                    let asserts: Vec<usize> =
                        b.iter().enumerate().filter(|(_, s)| matches!(s, Stmt::Assert(_))).map(|(i, _)| i).collect();
                    let i = *asserts.choose(g.rng())?;
                    b.remove(i);
                }
                2 => {
                    let r = g.condition(&m, true);
                    mm.ensures.push(r);
                }
                3 if !public => mm.requires.push(c),
                3 | 4 if !mm.requires.is_empty() => {
                    let i = g.rng().gen_range(0..mm.requires.len());
                    mm.requires.remove(i);
                }
                5 if !public && !mm.ensures.is_empty() => {
                    let i = g.rng().gen_range(0..mm.ensures.len());
                    mm.ensures.remove(i);
                }
                6 => {
                    let b = body_mut(mm);
                    let at = g.rng().gen_range(0..=b.len());
                    let n = g.name("anchor");
                    b.insert(at, Stmt::Marker(n));
                }
                _ => {
                    let n = g.name("Lemma");
                    let mut l = MethodDecl::new(n);
                    l.visibility = Visibility::Generated;
                    l.is_ghost = true;
                    l.ensures.push(Expr::Bool(true));
                    l.body = Some(vec![]);
                    q.decls.push(Decl::Method(l));
                }
            }
        }
        EditKind::CodeChanged => {
            let compiled: Vec<String> = p
                .methods()
                .filter(|m| !m.is_ghost && m.visibility != Visibility::Generated)
                .filter(|m| m.body.as_ref().is_some_and(|b| !compiled_index(b).is_empty()))
                .map(|m| m.name.clone())
                .collect();
            let name = compiled.choose(g.rng())?.clone();
            let b = body_mut(q.method_mut(&name)?);
            let i = *compiled_index(b).choose(g.rng())?;
            match &mut b[i] {
                Stmt::Assign { rhs, .. } => *rhs = Expr::bin(BinOp::Add, rhs.clone(), Expr::Int(1)),
                Stmt::If { cond, .. } => *cond = Expr::not(cond.clone()),
                Stmt::VarDecl { init: Some(VarInit::Expr(e)), .. } if !matches!(e, Expr::Call { .. }) => {
                    *e = Expr::bin(BinOp::Add, e.clone(), Expr::Int(1))
                }
                _ => {
                    b.remove(i);
                }
            }
        }
        EditKind::PublicPreStrengthened => {
            let name = public(p).choose(g.rng())?.clone();
            let m = p.method(&name)?.clone();
            let c = fresh_condition(g, &m, &m.requires, false)?;
            q.method_mut(&name)?.requires.push(c);
        }
        EditKind::PublicPostWeakened => {
            let name = public(p).into_iter().filter(|n| !p.method(n).unwrap().ensures.is_empty()).collect::<Vec<_>>().choose(g.rng())?.clone();
            let mm = q.method_mut(&name)?;
            let i = g.rng().gen_range(0..mm.ensures.len());
            mm.ensures.remove(i);
        }
        EditKind::SignatureChanged => {
            let name = names.choose(g.rng())?.clone();
            let mm = q.method_mut(&name)?;
            match g.rng().gen_range(0..3) {
                0 => mm.params.push(Param::new("extra", Type::simple("int"))),
                1 => mm.visibility = if mm.visibility == Visibility::Public { Visibility::Private } else { Visibility::Public },
                _ => mm.modifies = Some("this".into()),
            }
        }
        EditKind::PublicRemoved => {
            let name = names.choose(g.rng())?.clone();
            q.decls.retain(|d| d.name() != name);
        }
    }
    (q != *p).then_some(q)
}

fn public(p: &Program) -> Vec<String> {
    p.methods().filter(|m| m.visibility == Visibility::Public).map(|m| m.name.clone()).collect()
}

/// A condition whose conjuncts are not all among `existing` already.
fn fresh_condition(g: &mut Gen, m: &MethodDecl, existing: &[Expr], ret: bool) -> Option<Expr> {
    let have: Vec<String> = existing.iter().flat_map(|e| e.conjuncts()).map(print_expr).collect();
    for _ in 0..8 {
        let c = g.condition(m, ret);
        if c.conjuncts().iter().any(|x| !have.contains(&print_expr(x))) {
            return Some(c);
        }
    }
    None
}
