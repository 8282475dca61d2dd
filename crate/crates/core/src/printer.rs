//! Deterministic pretty-printer. `parse_program(print_program(p)) == p`.

use std::fmt::Write as _;

use crate::ast::*;
use crate::pattern::{ClausePattern, MethodPattern, ParamsPattern, Pattern};
use crate::position::{BlockPath, Branch};

/// Where a statement (or marker) ended up in the printed text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LineEntry {
    pub method: String,
    pub block: BlockPath,
    /// Index among the non-marker statements of the block. For markers this
    /// is the gap the marker sits in.
    pub index: usize,
    pub is_marker: bool,
    pub first_line: usize,
    pub last_line: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MethodSpan {
    pub method: String,
    pub first_line: usize,
    pub last_line: usize,
    /// Line of the opening brace, if there is a body.
    pub body_line: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LineMap {
    pub stmts: Vec<LineEntry>,
    pub methods: Vec<MethodSpan>,
}

pub fn print_program(p: &Program) -> String {
    print_with_lines(p).0
}

pub fn print_with_lines(p: &Program) -> (String, LineMap) {
    let mut w = Writer::default();
    for (i, d) in p.decls.iter().enumerate() {
        if i > 0 {
            w.line(String::new());
        }
        w.decl(d);
    }
    let text = w.lines.iter().map(|l| format!("{l}\n")).collect();
    (text, w.map)
}

pub fn print_method(m: &MethodDecl) -> String {
    let mut w = Writer::default();
    w.method(m);
    w.lines.join("\n")
}

pub fn print_stmt(s: &Stmt) -> String {
    let mut w = Writer { inline: true, ..Default::default() };
    w.stmt(s, None);
    w.lines.join(" ")
}

pub fn print_expr(e: &Expr) -> String {
    let mut s = String::new();
    expr(&mut s, e, 0);
    s
}

/// Single-line rendering of a code template.
pub fn print_pattern(p: &Pattern) -> String {
    match p {
        Pattern::Expr(e) => print_expr(e),
        Pattern::Stmts(ss) => ss.iter().map(print_stmt).collect::<Vec<_>>().join(" "),
        Pattern::Methods(ms) => ms.iter().map(method_pattern).collect::<Vec<_>>().join(" "),
    }
}

fn params(ps: &[Param]) -> String {
    ps.iter().map(|p| format!("{}: {}", p.name, p.ty)).collect::<Vec<_>>().join(", ")
}

fn method_pattern(m: &MethodPattern) -> String {
    let mut s = String::new();
    if m.ghost {
        s.push_str("ghost ");
    }
    let ps = match &m.params {
        ParamsPattern::Any => "...".to_string(),
        ParamsPattern::Meta(v) => format!("?{v}"),
        ParamsPattern::Exact(ps) => params(ps),
    };
    let _ = write!(s, "method {}({ps})", m.name);
    for c in &m.clauses {
        match c {
            ClausePattern::Requires(e) => {
                let _ = write!(s, " requires {}", print_expr(e));
            }
            ClausePattern::Ensures(e) => {
                let _ = write!(s, " ensures {}", print_expr(e));
            }
            ClausePattern::Modifies(t) => {
                let _ = write!(s, " modifies {t}");
            }
            ClausePattern::Ellipsis => s.push_str(" ..."),
        }
    }
    if let Some(b) = &m.body {
        s.push_str(" {");
        for st in b {
            s.push(' ');
            s.push_str(&print_stmt(st));
        }
        s.push_str(" }");
    }
    s
}

#[derive(Default)]
struct Writer {
    lines: Vec<String>,
    indent: usize,
    inline: bool,
    map: LineMap,
}

struct Ctx<'a> {
    method: &'a str,
    block: BlockPath,
}

impl Writer {
    fn line(&mut self, s: String) {
        if s.is_empty() || self.inline {
            self.lines.push(s);
        } else {
            self.lines.push(format!("{}{s}", "  ".repeat(self.indent)));
        }
    }

    /// 1-based number of the next line to be written.
    fn next_line(&self) -> usize {
        self.lines.len() + 1
    }

    fn decl(&mut self, d: &Decl) {
        match d {
            Decl::Datatype { name, ctors } => {
                let cs: Vec<String> = ctors
                    .iter()
                    .map(|c| {
                        if c.fields.is_empty() {
                            c.name.clone()
                        } else {
                            format!("{}({})", c.name, params(&c.fields))
                        }
                    })
                    .collect();
                self.line(format!("datatype {name} = {}", cs.join(" | ")));
            }
            Decl::Class { name, fields } => {
                self.line(format!("class {name} {{"));
                for f in fields {
                    self.line(format!("  var {}: {};", f.name, f.ty));
                }
                self.line("}".into());
            }
            Decl::Function(f) => self.function(f),
            Decl::Method(m) => self.method(m),
        }
    }

    fn function(&mut self, f: &FunctionDecl) {
        let vis = if f.visibility == Visibility::Public { "public " } else { "" };
        let kw = match f.kind {
            FunctionKind::Function => "function",
            FunctionKind::FunctionMethod => "function method",
            FunctionKind::Predicate => "predicate",
            FunctionKind::PredicateMethod => "predicate method",
        };
        let result = if f.kind.is_predicate() { String::new() } else { format!(": {}", f.result) };
        self.line(format!("{vis}{kw} {}({}){result}", f.name, params(&f.params)));
        for r in &f.requires {
            self.line(format!("  requires {}", print_expr(r)));
        }
        for e in &f.ensures {
            self.line(format!("  ensures {}", print_expr(e)));
        }
        if let Some(b) = &f.body {
            self.line("{".into());
            self.line(format!("  {}", print_expr(b)));
            self.line("}".into());
        }
    }

    fn method(&mut self, m: &MethodDecl) {
        let first_line = self.next_line();
        let vis = match m.visibility {
            Visibility::Public => "public",
            Visibility::Private => "private",
            Visibility::Generated => "/*generated*/",
        };
        let ghost = if m.is_ghost { "ghost " } else { "" };
        let mut head = format!("{vis} {ghost}method {}({})", m.name, params(&m.params));
        if !m.returns.is_empty() {
            let _ = write!(head, " returns ({})", params(&m.returns));
        }
        self.line(head);
        for r in &m.requires {
            self.line(format!("  requires {}", print_expr(r)));
        }
        if let Some(t) = &m.modifies {
            self.line(format!("  modifies {t}"));
        }
        for e in &m.ensures {
            self.line(format!("  ensures {}", print_expr(e)));
        }
        let mut body_line = None;
        if let Some(b) = &m.body {
            body_line = Some(self.next_line());
            self.line("{".into());
            self.indent += 1;
            let ctx = Ctx { method: &m.name, block: Vec::new() };
            self.block(b, &ctx);
            self.indent -= 1;
            self.line("}".into());
        }
        self.map.methods.push(MethodSpan {
            method: m.name.clone(),
            first_line,
            last_line: self.lines.len(),
            body_line,
        });
    }

    fn block(&mut self, b: &[Stmt], ctx: &Ctx) {
        let mut idx = 0;
        for s in b {
            self.stmt(s, Some((ctx, idx)));
            if !s.is_marker() {
                idx += 1;
            }
        }
    }

    fn stmt(&mut self, s: &Stmt, loc: Option<(&Ctx, usize)>) {
        let first_line = self.next_line();
        match s {
            Stmt::VarDecl { ghost, vars, init } => {
                let vs: Vec<String> = vars
                    .iter()
                    .map(|v| match &v.ty {
                        Some(t) => format!("{}: {t}", v.name),
                        None => v.name.to_string(),
                    })
                    .collect();
                let g = if *ghost { "ghost " } else { "" };
                let init = match init {
                    Some(VarInit::Expr(e)) => format!(" := {}", print_expr(e)),
                    Some(VarInit::SuchThat(e)) => format!(" :| {}", print_expr(e)),
                    None => String::new(),
                };
                self.line(format!("{g}var {}{init};", vs.join(", ")));
            }
            Stmt::Assign { lhs, rhs } => {
                let ls: Vec<String> = lhs.iter().map(print_expr).collect();
                self.line(format!("{} := {};", ls.join(", "), print_expr(rhs)));
            }
            Stmt::Call { callee, args } => {
                let a: Vec<String> = args.iter().map(print_expr).collect();
                self.line(format!("{callee}({});", a.join(", ")));
            }
            Stmt::Assert(e) => self.line(format!("assert {};", print_expr(e))),
            Stmt::Marker(n) => self.line(format!("/*@{n}*/")),
            Stmt::Ellipsis => self.line("...".into()),
            Stmt::If { cond, then_block, else_block } => {
                self.line(format!("if {} {{", print_expr(cond)));
                self.sub_block(then_block, loc, Branch::Then);
                if let Some(e) = else_block {
                    self.line("} else {".into());
                    self.sub_block(e, loc, Branch::Else);
                }
                self.line("}".into());
            }
        }
        if let Some((ctx, index)) = loc {
            self.map.stmts.push(LineEntry {
                method: ctx.method.to_string(),
                block: ctx.block.clone(),
                index,
                is_marker: s.is_marker(),
                first_line,
                last_line: self.lines.len(),
            });
        }
    }

    fn sub_block(&mut self, b: &[Stmt], loc: Option<(&Ctx, usize)>, br: Branch) {
        self.indent += 1;
        match loc {
            Some((ctx, idx)) => {
                let mut block = ctx.block.clone();
                block.push((idx, br));
                let inner = Ctx { method: ctx.method, block };
                self.block(b, &inner);
            }
            None => {
                for s in b {
                    self.stmt(s, None);
                }
            }
        }
        self.indent -= 1;
    }
}

const PREC_UNARY: u8 = 7;
const PREC_POSTFIX: u8 = 8;

fn needs_parens_as_operand(e: &Expr) -> bool {
    matches!(e, Expr::Quant { .. } | Expr::Match { .. } | Expr::Rule(..))
}

/// Writes `e` in a context that binds at least as tightly as `min`.
fn expr(out: &mut String, e: &Expr, min: u8) {
    let (prec, open) = match e {
        Expr::Binary(op, ..) => (op.precedence(), false),
        Expr::Unary(..) => (PREC_UNARY, false),
        Expr::Rule(..) => (0, false),
        Expr::Quant { .. } | Expr::Match { .. } => (1, true),
        _ => (PREC_POSTFIX, false),
    };
    let wrap = prec < min || (open && min > 0);
    if wrap {
        out.push('(');
    }
    match e {
        Expr::Int(i) => {
            let _ = write!(out, "{i}");
        }
        Expr::Bool(b) => {
            let _ = write!(out, "{b}");
        }
        Expr::Null => out.push_str("null"),
        Expr::Str(s) => {
            out.push('"');
            for c in s.chars() {
                match c {
                    '"' => out.push_str("\\\""),
                    '\\' => out.push_str("\\\\"),
                    '\n' => out.push_str("\\n"),
                    '\t' => out.push_str("\\t"),
                    c => out.push(c),
                }
            }
            out.push('"');
        }
        Expr::Var(v) => out.push_str(v),
        Expr::Meta(v) => {
            let _ = write!(out, "?{v}");
        }
        Expr::Ellipsis => out.push_str("..."),
        Expr::Unary(op, x) => {
            out.push_str(match op {
                UnOp::Not => "!",
                UnOp::Neg => "-",
            });
            expr(out, x, PREC_UNARY);
        }
        Expr::Binary(op, l, r) => {
            let p = op.precedence();
            let (lmin, rmin) = if op.is_comparison() {
                (p + 1, p + 1)
            } else if op.right_assoc() {
                (p + 1, p)
            } else {
                (p, p + 1)
            };
            operand(out, l, lmin);
            let _ = write!(out, " {} ", op.symbol());
            operand(out, r, rmin);
        }
        Expr::Quant { q, vars, body } => {
            out.push_str(match q {
                Quantifier::Exists => "exists ",
                Quantifier::Forall => "forall ",
            });
            for (i, v) in vars.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                let _ = write!(out, "{}", v.name);
                if let Some(t) = &v.ty {
                    let _ = write!(out, ": {t}");
                }
            }
            out.push_str(" :: ");
            expr(out, body, 0);
        }
        Expr::Len(x) => {
            // Keep nested bars from fusing into `||`.
            let mut inner = String::new();
            expr(&mut inner, x, 0);
            let pad_l = if inner.starts_with('|') { " " } else { "" };
            let pad_r = if inner.ends_with('|') { " " } else { "" };
            let _ = write!(out, "|{pad_l}{inner}{pad_r}|");
        }
        Expr::Call { callee, args } => {
            let _ = write!(out, "{callee}(");
            list(out, args);
            out.push(')');
        }
        Expr::Field(x, f) => {
            expr(out, x, PREC_POSTFIX);
            let _ = write!(out, ".{f}");
        }
        Expr::SeqDisplay(xs) => {
            out.push('[');
            list(out, xs);
            out.push(']');
        }
        Expr::Match { scrutinee, cases } => {
            out.push_str("match ");
            expr(out, scrutinee, PREC_POSTFIX);
            for c in cases {
                let _ = write!(out, " case {}", c.ctor);
                if !c.binders.is_empty() {
                    let _ = write!(out, "({})", c.binders.join(", "));
                }
                out.push_str(" => ");
                // A nested match would swallow the following cases.
                let m = if matches!(c.body, Expr::Match { .. }) { 1 } else { 0 };
                expr(out, &c.body, m);
            }
        }
        Expr::Rule(l, r) => {
            expr(out, l, 1);
            out.push_str(" =>> ");
            expr(out, r, 1);
        }
    }
    if wrap {
        out.push(')');
    }
}

fn operand(out: &mut String, e: &Expr, min: u8) {
    if needs_parens_as_operand(e) {
        out.push('(');
        expr(out, e, 0);
        out.push(')');
    } else {
        expr(out, e, min);
    }
}

fn list(out: &mut String, xs: &[Expr]) {
    for (i, x) in xs.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        expr(out, x, 1);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{parse_expr, parse_program};

    #[test]
    fn empty_program_prints_empty() {
        assert_eq!(print_program(&Program::default()), "");
    }

    #[test]
    fn minimal_parentheses() {
        for src in [
            "(a ==> b) ==> c",
            "a ==> b ==> c",
            "a - (b - c)",
            "(a + b) * c",
            "!(a && b)",
            "(exists x :: p(x)) && q",
            "(a == b) == c",
            "f((x =>> y))",
            "(match x case A => 1 case B => 2) + 1",
            "(-x).f",
            "| |a| + |b| |",
        ] {
            let e = parse_expr(src).unwrap();
            let printed = print_expr(&e);
            assert_eq!(parse_expr(&printed).unwrap(), e, "{src} -> {printed}");
        }
        assert_eq!(print_expr(&parse_expr("a ==> (b ==> c)").unwrap()), "a ==> b ==> c");
    }

    #[test]
    fn fixed_point_on_listing() {
        let src = "ghost method L(n: int) requires n >= 0 ensures exists xs :: length(xs) == n {
            if n == 0 { } else { L(n - 1); var xs :| length(xs) == n - 1; /*@gv*/ } }";
        let p = parse_program(src).unwrap();
        let once = print_program(&p);
        assert_eq!(parse_program(&once).unwrap(), p);
        assert_eq!(print_program(&parse_program(&once).unwrap()), once);
        assert!(once.contains("/*@gv*/"));
    }

    #[test]
    fn line_map_tracks_nested_statements() {
        let src = "method m(x: int) {\n  assert true;\n  if x == 0 {\n    /*@a*/\n    assert x == 0;\n  }\n}";
        let (text, map) = print_with_lines(&parse_program(src).unwrap());
        let inner = map.stmts.iter().find(|e| !e.block.is_empty() && !e.is_marker).unwrap();
        assert_eq!(inner.block, vec![(1, Branch::Then)]);
        assert_eq!(inner.index, 0);
        let line = text.lines().nth(inner.first_line - 1).unwrap();
        assert_eq!(line.trim(), "assert x == 0;");
        assert_eq!(map.methods[0].first_line, 1);
        assert_eq!(map.methods[0].last_line, text.lines().count());
    }

    #[test]
    fn generated_visibility_round_trips() {
        let mut p = parse_program("ghost method g() { }").unwrap();
        if let Decl::Method(m) = &mut p.decls[0] {
            m.visibility = Visibility::Generated;
        }
        let text = print_program(&p);
        assert!(text.starts_with("/*generated*/ ghost method g()"));
        assert_eq!(parse_program(&text).unwrap(), p);
    }
}
