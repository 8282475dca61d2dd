//! The tactic language: definitions, transformations and their concrete syntax.

mod library;
mod parser;

use std::fmt;

use crate::ast::Expr;
use crate::pattern::Pattern;
use crate::position::PosRef;
use crate::printer::{print_expr, print_pattern};

pub use library::{Library, RESERVED_VARS};
pub use parser::{parse_invocation, parse_script, parse_tactic_defs};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TacticDef {
    pub name: String,
    pub formals: Vec<String>,
    pub body: Body,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Body {
    When(Prop, Trans),
    Plain(Trans),
}

impl Body {
    pub fn trans(&self) -> &Trans {
        match self {
            Body::When(_, t) | Body::Plain(t) => t,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Trans {
    Rule { lhs: Pattern, rhs: Pattern, inst: Inst },
    Match { pat: Pattern, inst: Inst },
    Seq(Box<Trans>, Box<Trans>),
    Or(Box<Trans>, Box<Trans>),
    Call { name: String, args: Vec<Expr>, inst: Inst },
}

impl Trans {
    /// Tactic names called anywhere inside.
    pub fn callees(&self, out: &mut Vec<String>) {
        match self {
            Trans::Seq(a, b) | Trans::Or(a, b) => {
                a.callees(out);
                b.callees(out);
            }
            Trans::Call { name, .. } => out.push(name.clone()),
            Trans::Rule { .. } | Trans::Match { .. } => {}
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Inst {
    pub items: Vec<InstItem>,
}

impl Inst {
    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn positions(&self) -> impl Iterator<Item = &PosRef> {
        self.items.iter().filter_map(|i| match i {
            InstItem::Pos(p) => Some(p),
            InstItem::Bind(..) => None,
        })
    }

    pub fn bindings(&self) -> impl Iterator<Item = (&String, &Expr)> {
        self.items.iter().filter_map(|i| match i {
            InstItem::Bind(v, e) => Some((v, e)),
            InstItem::Pos(_) => None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InstItem {
    Pos(PosRef),
    Bind(String, Expr),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Prop {
    IsPublic(Expr),
    IsPrivate(Expr),
    IsGenerated(Expr),
    IsGhost(Expr),
    Not(Box<Prop>),
    ErrorEquals(String),
    PatternEquals(Expr, Pattern),
}

fn code(p: &Pattern) -> String {
    let inner = print_pattern(p);
    if inner.is_empty() {
        "{| |}".into()
    } else {
        format!("{{| {inner} |}}")
    }
}

impl fmt::Display for Inst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.items.is_empty() {
            return Ok(());
        }
        f.write_str("[")?;
        for (i, item) in self.items.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            match item {
                InstItem::Pos(p) => write!(f, "{p}")?,
                InstItem::Bind(v, e) => write!(f, "?{v} := {{| {} |}}", print_expr(e))?,
            }
        }
        f.write_str("]")
    }
}

impl fmt::Display for Trans {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Trans::Rule { lhs, rhs, inst } => write!(f, "{} =>> {}{inst}", code(lhs), code(rhs)),
            Trans::Match { pat, inst } => write!(f, "match {}{inst}", code(pat)),
            Trans::Seq(a, b) => {
                // Seq nests to the right; a left-nested Seq needs brackets.
                if matches!(**a, Trans::Seq(..)) {
                    write!(f, "({a}); {b}")
                } else {
                    write!(f, "{a}; {b}")
                }
            }
            Trans::Or(a, b) => write!(f, "or({a}, {b})"),
            Trans::Call { name, args, inst } => {
                write!(f, "{name}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{{| {} |}}", print_expr(a))?;
                }
                write!(f, "){inst}")
            }
        }
    }
}

impl fmt::Display for Prop {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let is = |f: &mut fmt::Formatter<'_>, t: &Expr, neg: bool, what: &str| {
            let not = if neg { "not " } else { "" };
            write!(f, "{} is {not}{what}", print_expr(t))
        };
        match self {
            Prop::IsPublic(t) => is(f, t, false, "public"),
            Prop::IsPrivate(t) => is(f, t, false, "private"),
            Prop::IsGenerated(t) => is(f, t, false, "generated"),
            Prop::IsGhost(t) => is(f, t, false, "ghost"),
            Prop::Not(inner) => match &**inner {
                Prop::IsPublic(t) => is(f, t, true, "public"),
                Prop::IsPrivate(t) => is(f, t, true, "private"),
                Prop::IsGenerated(t) => is(f, t, true, "generated"),
                Prop::IsGhost(t) => is(f, t, true, "ghost"),
                other => write!(f, "not ({other})"),
            },
            Prop::ErrorEquals(s) => write!(f, "?error = {s:?}"),
            Prop::PatternEquals(t, p) => write!(f, "{} = {}", print_expr(t), code(p)),
        }
    }
}

impl fmt::Display for TacticDef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({}) :=", self.name, self.formals.join(", "))?;
        match &self.body {
            Body::When(p, t) => write!(f, "\n  when {p}\n  then {t}."),
            Body::Plain(t) => write!(f, "\n  {t}."),
        }
    }
}

/// Renders definitions in the concrete syntax accepted by `parse_tactic_defs`.
pub fn print_defs(defs: &[TacticDef]) -> String {
    defs.iter().map(|d| format!("{d}\n\n")).collect()
}
