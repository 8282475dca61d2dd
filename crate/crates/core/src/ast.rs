//! Abstract syntax for the contract-annotated imperative language.
//!
//! The same tree shapes are used for programs and for code patterns: a
//! pattern is a fragment that may additionally contain metavariables
//! (`?x`), ellipses (`...`) and rewrite invocations. A well-formed program
//! contains none of these; `typecheck` reports any that remain.

use std::fmt;

/// An identifier slot that may hold a metavariable inside patterns.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Name {
    Id(String),
    Meta(String),
}

impl Name {
    pub fn id(s: impl Into<String>) -> Self {
        Name::Id(s.into())
    }

    pub fn as_id(&self) -> Option<&str> {
        match self {
            Name::Id(s) => Some(s),
            Name::Meta(_) => None,
        }
    }
}

impl fmt::Display for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Name::Id(s) => f.write_str(s),
            Name::Meta(s) => write!(f, "?{s}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Type {
    pub name: String,
    pub args: Vec<Type>,
}

impl Type {
    pub fn simple(name: impl Into<String>) -> Self {
        Type { name: name.into(), args: Vec::new() }
    }

    pub fn seq(elem: Type) -> Self {
        Type { name: "seq".into(), args: vec![elem] }
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)?;
        if !self.args.is_empty() {
            f.write_str("<")?;
            for (i, a) in self.args.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{a}")?;
            }
            f.write_str(">")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Implies,
    Or,
    And,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    Add,
    Sub,
    Mul,
    Div,
    Mod,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Implies => "==>",
            BinOp::Or => "||",
            BinOp::And => "&&",
            BinOp::Eq => "==",
            BinOp::Ne => "!=",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Mod => "%",
        }
    }

    /// Binding strength; larger binds tighter.
    pub fn precedence(self) -> u8 {
        match self {
            BinOp::Implies => 1,
            BinOp::Or => 2,
            BinOp::And => 3,
            BinOp::Eq | BinOp::Ne | BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => 4,
            BinOp::Add | BinOp::Sub => 5,
            BinOp::Mul | BinOp::Div | BinOp::Mod => 6,
        }
    }

    pub fn right_assoc(self) -> bool {
        matches!(self, BinOp::Implies | BinOp::Or | BinOp::And)
    }

    pub fn is_comparison(self) -> bool {
        self.precedence() == 4
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnOp {
    Not,
    Neg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Quantifier {
    Exists,
    Forall,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BoundVar {
    pub name: Name,
    pub ty: Option<Type>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MatchCase {
    pub ctor: String,
    pub binders: Vec<String>,
    pub body: Expr,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    Int(i64),
    Bool(bool),
    Null,
    Str(String),
    Var(String),
    /// Metavariable `?name` (patterns only).
    Meta(String),
    /// Ellipsis `...` in expression position (patterns only).
    Ellipsis,
    Unary(UnOp, Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Quant {
        q: Quantifier,
        vars: Vec<BoundVar>,
        body: Box<Expr>,
    },
    /// Sequence length `|e|`.
    Len(Box<Expr>),
    Call {
        callee: Name,
        args: Vec<Expr>,
    },
    Field(Box<Expr>, String),
    SeqDisplay(Vec<Expr>),
    Match {
        scrutinee: Box<Expr>,
        cases: Vec<MatchCase>,
    },
    /// Rewrite rule literal `lhs =>> rhs` (tactic arguments only).
    Rule(Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn var(s: impl Into<String>) -> Self {
        Expr::Var(s.into())
    }

    pub fn bin(op: BinOp, l: Expr, r: Expr) -> Self {
        Expr::Binary(op, Box::new(l), Box::new(r))
    }

    pub fn not(e: Expr) -> Self {
        Expr::Unary(UnOp::Not, Box::new(e))
    }

    /// Splits a right-nested `&&` chain into its conjuncts.
    pub fn conjuncts(&self) -> Vec<&Expr> {
        let mut out = Vec::new();
        let mut cur = self;
        loop {
            match cur {
                Expr::Binary(BinOp::And, l, r) => {
                    out.extend(l.conjuncts());
                    cur = r;
                }
                other => {
                    out.push(other);
                    return out;
                }
            }
        }
    }

    /// Builds a right-nested conjunction; `None` for an empty list.
    pub fn conjoin(mut items: Vec<Expr>) -> Option<Expr> {
        let mut acc = items.pop()?;
        while let Some(e) = items.pop() {
            acc = Expr::bin(BinOp::And, e, acc);
        }
        Some(acc)
    }

    /// Pre-order traversal over this expression and all sub-expressions.
    pub fn walk<'a>(&'a self, f: &mut dyn FnMut(&'a Expr)) {
        f(self);
        match self {
            Expr::Unary(_, e) | Expr::Len(e) | Expr::Field(e, _) => e.walk(f),
            Expr::Binary(_, l, r) | Expr::Rule(l, r) => {
                l.walk(f);
                r.walk(f);
            }
            Expr::Quant { body, .. } => body.walk(f),
            Expr::Call { args, .. } | Expr::SeqDisplay(args) => {
                for a in args {
                    a.walk(f);
                }
            }
            Expr::Match { scrutinee, cases } => {
                scrutinee.walk(f);
                for c in cases {
                    c.body.walk(f);
                }
            }
            _ => {}
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum VarInit {
    Expr(Expr),
    /// `:| predicate`
    SuchThat(Expr),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LocalVar {
    pub name: Name,
    pub ty: Option<Type>,
}

pub type Block = Vec<Stmt>;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Stmt {
    VarDecl {
        ghost: bool,
        vars: Vec<LocalVar>,
        init: Option<VarInit>,
    },
    Assign {
        lhs: Vec<Expr>,
        rhs: Expr,
    },
    /// Call statement without outputs.
    Call {
        callee: Name,
        args: Vec<Expr>,
    },
    Assert(Expr),
    If {
        cond: Expr,
        then_block: Block,
        else_block: Option<Block>,
    },
    /// Anchor comment `/*@name*/`.
    Marker(String),
    /// Ellipsis `...` in statement position (patterns only).
    Ellipsis,
}

impl Stmt {
    pub fn is_marker(&self) -> bool {
        matches!(self, Stmt::Marker(_))
    }

    /// Expressions directly held by this statement (not nested blocks).
    pub fn exprs(&self) -> Vec<&Expr> {
        match self {
            Stmt::VarDecl { init, .. } => match init {
                Some(VarInit::Expr(e)) | Some(VarInit::SuchThat(e)) => vec![e],
                None => vec![],
            },
            Stmt::Assign { lhs, rhs } => lhs.iter().chain(std::iter::once(rhs)).collect(),
            Stmt::Call { args, .. } => args.iter().collect(),
            Stmt::Assert(e) => vec![e],
            Stmt::If { cond, .. } => vec![cond],
            Stmt::Marker(_) | Stmt::Ellipsis => vec![],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Visibility {
    Public,
    Private,
    /// Created by a tactic during a proof; never written by the user.
    Generated,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Param {
    pub name: String,
    pub ty: Type,
}

impl Param {
    pub fn new(name: impl Into<String>, ty: Type) -> Self {
        Param { name: name.into(), ty }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MethodDecl {
    pub name: String,
    pub visibility: Visibility,
    pub is_ghost: bool,
    pub params: Vec<Param>,
    pub returns: Vec<Param>,
    pub requires: Vec<Expr>,
    /// Opaque `modifies` clause text.
    pub modifies: Option<String>,
    pub ensures: Vec<Expr>,
    pub body: Option<Block>,
}

impl MethodDecl {
    pub fn new(name: impl Into<String>) -> Self {
        MethodDecl {
            name: name.into(),
            visibility: Visibility::Private,
            is_ghost: false,
            params: Vec::new(),
            returns: Vec::new(),
            requires: Vec::new(),
            modifies: None,
            ensures: Vec::new(),
            body: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FunctionKind {
    Function,
    FunctionMethod,
    Predicate,
    PredicateMethod,
}

impl FunctionKind {
    /// Function methods are compiled; plain functions are specification only.
    pub fn is_compiled(self) -> bool {
        matches!(self, FunctionKind::FunctionMethod | FunctionKind::PredicateMethod)
    }

    pub fn is_predicate(self) -> bool {
        matches!(self, FunctionKind::Predicate | FunctionKind::PredicateMethod)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FunctionDecl {
    pub name: String,
    pub visibility: Visibility,
    pub kind: FunctionKind,
    pub params: Vec<Param>,
    /// Result type; predicates are `bool`.
    pub result: Type,
    pub requires: Vec<Expr>,
    pub ensures: Vec<Expr>,
    pub body: Option<Expr>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Ctor {
    pub name: String,
    pub fields: Vec<Param>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Decl {
    Datatype { name: String, ctors: Vec<Ctor> },
    Class { name: String, fields: Vec<Param> },
    Function(FunctionDecl),
    Method(MethodDecl),
}

impl Decl {
    pub fn name(&self) -> &str {
        match self {
            Decl::Datatype { name, .. } | Decl::Class { name, .. } => name,
            Decl::Function(f) => &f.name,
            Decl::Method(m) => &m.name,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Program {
    pub decls: Vec<Decl>,
}

impl Program {
    pub fn methods(&self) -> impl Iterator<Item = &MethodDecl> {
        self.decls.iter().filter_map(|d| match d {
            Decl::Method(m) => Some(m),
            _ => None,
        })
    }

    pub fn method(&self, name: &str) -> Option<&MethodDecl> {
        self.methods().find(|m| m.name == name)
    }

    pub fn method_mut(&mut self, name: &str) -> Option<&mut MethodDecl> {
        self.decls.iter_mut().find_map(|d| match d {
            Decl::Method(m) if m.name == name => Some(m),
            _ => None,
        })
    }

    pub fn function(&self, name: &str) -> Option<&FunctionDecl> {
        self.decls.iter().find_map(|d| match d {
            Decl::Function(f) if f.name == name => Some(f),
            _ => None,
        })
    }

    /// Drops every marker statement; used for comparisons modulo anchors.
    pub fn without_markers(&self) -> Program {
        let mut p = self.clone();
        for d in &mut p.decls {
            if let Decl::Method(m) = d {
                if let Some(b) = &mut m.body {
                    strip_markers(b);
                }
            }
        }
        p
    }

    /// Canonical form: variables declared inside ghost methods are implicitly
    /// ghost, so their explicit flag is dropped.
    pub fn normalize(&mut self) {
        for d in &mut self.decls {
            if let Decl::Method(m) = d {
                if m.is_ghost {
                    if let Some(b) = &mut m.body {
                        clear_ghost_flags(b);
                    }
                }
            }
        }
    }

    /// All anchors in document order, with their method.
    pub fn anchors(&self) -> Vec<(String, String)> {
        let mut out = Vec::new();
        for m in self.methods() {
            if let Some(b) = &m.body {
                collect_markers(b, &m.name, &mut out);
            }
        }
        out
    }
}

fn strip_markers(b: &mut Block) {
    b.retain(|s| !s.is_marker());
    for s in b {
        if let Stmt::If { then_block, else_block, .. } = s {
            strip_markers(then_block);
            if let Some(e) = else_block {
                strip_markers(e);
            }
        }
    }
}

fn clear_ghost_flags(b: &mut Block) {
    for s in b {
        match s {
            Stmt::VarDecl { ghost, .. } => *ghost = false,
            Stmt::If { then_block, else_block, .. } => {
                clear_ghost_flags(then_block);
                if let Some(e) = else_block {
                    clear_ghost_flags(e);
                }
            }
            _ => {}
        }
    }
}

fn collect_markers(b: &Block, method: &str, out: &mut Vec<(String, String)>) {
    for s in b {
        match s {
            Stmt::Marker(n) => out.push((n.clone(), method.to_string())),
            Stmt::If { then_block, else_block, .. } => {
                collect_markers(then_block, method, out);
                if let Some(e) = else_block {
                    collect_markers(e, method, out);
                }
            }
            _ => {}
        }
    }
}
