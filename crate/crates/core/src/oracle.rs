//! Verifier stand-in. A fixture lists the errors a verifier would report on
//! the initial program; each entry follows its statement through later
//! edits and disappears once its discharge condition holds.

use std::fmt;

use crate::ast::*;
use crate::engine::ErrorSource;
use crate::error::FixtureError;
use crate::kernel::{Binding, Env};
use crate::parser::parse_expr;
use crate::position::{anchor_position, line_position, Branch, Position};
use crate::printer::{print_expr, print_stmt, print_with_lines};

pub const NULL_ERROR: &str = "target object may be null";
pub const PRECONDITION_ERROR: &str = "A precondition for this call might not hold";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ErrorReport {
    pub kind: String,
    pub property: Expr,
    pub line: usize,
    pub col: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Selector {
    /// The statement right after anchor `name`.
    Anchor(String),
    /// The statement printed `offset` lines below the method's first line.
    Line { method: String, offset: usize },
}

/// When a reported error is considered fixed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Discharge {
    Requires { method: String, expr: Expr },
    Ensures { method: String, expr: Expr },
}

impl Discharge {
    fn holds(&self, p: &Program) -> bool {
        let has = |cs: &[Expr], e: &Expr| cs.iter().flat_map(|c| c.conjuncts()).any(|c| c == e);
        match self {
            Discharge::Requires { method, expr } => p.method(method).is_some_and(|m| has(&m.requires, expr)),
            Discharge::Ensures { method, expr } => p.method(method).is_some_and(|m| has(&m.ensures, expr)),
        }
    }
}

/// A statement identified by its text and how many identical statements
/// precede it in the method, so it survives insertions elsewhere.
#[derive(Debug, Clone, PartialEq, Eq)]
struct StmtKey {
    method: String,
    text: String,
    occurrence: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixtureEntry {
    pub kind: String,
    pub selector: Selector,
    pub property: Expr,
    pub discharge: Vec<Discharge>,
    /// Discharged when all of these hold together (if any are given).
    pub discharge_all: Vec<Discharge>,
    /// Conditions under which the error is reported at all (all must hold);
    /// models errors that a contract added during the proof brings about.
    pub trigger: Vec<Discharge>,
    target: StmtKey,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Fixture {
    pub entries: Vec<FixtureEntry>,
}

/// Non-marker statements of `m` in document order, with their regions.
fn statements(m: &MethodDecl) -> Vec<(Position, &Stmt)> {
    fn go<'a>(b: &'a Block, m: &str, path: &mut Vec<(usize, Branch)>, out: &mut Vec<(Position, &'a Stmt)>) {
        let mut i = 0;
        for s in b.iter().filter(|s| !s.is_marker()) {
            out.push((Position::region(m, path.clone(), i, i + 1), s));
            if let Stmt::If { then_block, else_block, .. } = s {
                path.push((i, Branch::Then));
                go(then_block, m, path, out);
                path.pop();
                if let Some(e) = else_block {
                    path.push((i, Branch::Else));
                    go(e, m, path, out);
                    path.pop();
                }
            }
            i += 1;
        }
    }
    let mut out = Vec::new();
    if let Some(b) = &m.body {
        go(b, &m.name, &mut Vec::new(), &mut out);
    }
    out
}

fn stmt_text(s: &Stmt) -> String {
    let mut m = MethodDecl::new("_");
    m.body = Some(vec![s.clone()]);
    let p = Program { decls: vec![Decl::Method(m)] }.without_markers();
    p.method("_").and_then(|m| m.body.as_ref()).map(|b| print_stmt(&b[0])).unwrap_or_default()
}

fn key_at(p: &Program, pos: &Position) -> Option<StmtKey> {
    let m = p.method(&pos.method)?;
    let stmts = statements(m);
    let (i, (_, s)) = stmts
        .iter()
        .enumerate()
        .find(|(_, (q, _))| q.block == pos.block && q.start == pos.start)?;
    let text = stmt_text(s);
    let occurrence = stmts[..i].iter().filter(|(_, t)| stmt_text(t) == text).count();
    Some(StmtKey { method: m.name.clone(), text, occurrence })
}

fn locate(p: &Program, k: &StmtKey) -> Option<Position> {
    let m = p.method(&k.method)?;
    statements(m).into_iter().filter(|(_, s)| stmt_text(s) == k.text).nth(k.occurrence).map(|(q, _)| q)
}

/// `key="value"` pairs; values may escape `"` and `\` with a backslash.
fn fields(line: &str) -> Result<Vec<(String, String)>, String> {
    let mut out = Vec::new();
    let mut it = line.chars().peekable();
    loop {
        while it.peek().is_some_and(|c| c.is_whitespace()) {
            it.next();
        }
        if it.peek().is_none() {
            return Ok(out);
        }
        let key: String = std::iter::from_fn(|| it.next_if(|c| c.is_alphanumeric() || *c == '_')).collect();
        if key.is_empty() || it.next() != Some('=') || it.next() != Some('"') {
            return Err("expected key=\"value\"".into());
        }
        let mut val = String::new();
        loop {
            match it.next() {
                Some('"') => break,
                Some('\\') => val.push(it.next().ok_or("unterminated escape")?),
                Some(c) => val.push(c),
                None => return Err(format!("unterminated value for `{key}`")),
            }
        }
        out.push((key, val));
    }
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

fn parse_discharge(s: &str) -> Result<Discharge, String> {
    let mut parts = s.trim().splitn(3, ' ');
    let (Some(kind), Some(method), Some(expr)) = (parts.next(), parts.next(), parts.next()) else {
        return Err("discharge must read `requires|ensures METHOD EXPR`".into());
    };
    let expr = parse_expr(expr).map_err(|e| format!("discharge expression: {e}"))?;
    let method = method.to_string();
    match kind {
        "requires" => Ok(Discharge::Requires { method, expr }),
        "ensures" => Ok(Discharge::Ensures { method, expr }),
        other => Err(format!("unknown discharge kind `{other}`")),
    }
}

impl fmt::Display for Discharge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Discharge::Requires { method, expr } => write!(f, "requires {method} {}", print_expr(expr)),
            Discharge::Ensures { method, expr } => write!(f, "ensures {method} {}", print_expr(expr)),
        }
    }
}

impl fmt::Display for Selector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Selector::Anchor(a) => write!(f, "@{a}"),
            Selector::Line { method, offset } => write!(f, "method:{method} {offset}"),
        }
    }
}

fn parse_selector(s: &str) -> Result<Selector, String> {
    let s = s.trim();
    if let Some(a) = s.strip_prefix('@') {
        return Ok(Selector::Anchor(a.to_string()));
    }
    let rest = s.strip_prefix("method:").ok_or("selector must be `@anchor` or `method:NAME OFFSET`")?;
    let (method, off) = rest.split_once(' ').ok_or("missing line offset")?;
    let offset = off.trim().parse().map_err(|_| format!("bad line offset `{off}`"))?;
    Ok(Selector::Line { method: method.to_string(), offset })
}

fn resolve_selector(p: &Program, sel: &Selector) -> Result<Position, String> {
    match sel {
        Selector::Anchor(a) => {
            let g = anchor_position(p, a).map_err(|e| e.to_string())?;
            Ok(Position::region(g.method, g.block, g.start, g.start + 1))
        }
        Selector::Line { method, offset } => {
            let (_, map) = print_with_lines(p);
            let span = map.methods.iter().find(|s| s.method == *method).ok_or("no such method")?;
            let pos = line_position(p, span.first_line + offset).map_err(|e| e.to_string())?;
            if pos.method != *method || pos.is_gap() {
                return Err("does not name a statement of that method".into());
            }
            Ok(pos)
        }
    }
}

impl Fixture {
    /// Parses fixture text and ties each entry to its statement in `p`.
    pub fn load(text: &str, p: &Program) -> Result<Fixture, FixtureError> {
        let mut entries = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let t = raw.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            let err = |message: String| FixtureError::Parse { line, message };
            let fs = fields(t).map_err(err)?;
            let get = |k: &str| fs.iter().find(|(n, _)| n == k).map(|(_, v)| v.clone());
            let kind = get("kind").filter(|k| !k.is_empty()).ok_or_else(|| err("missing kind".into()))?;
            let sel_text = get("selector").ok_or_else(|| err("missing selector".into()))?;
            let selector = parse_selector(&sel_text).map_err(err)?;
            let prop = get("property").ok_or_else(|| err("missing property".into()))?;
            let property = parse_expr(&prop).map_err(|e| err(format!("property: {e}")))?;
            let conds = |key: &str| {
                fs.iter().filter(|(n, _)| n == key).map(|(_, v)| parse_discharge(v)).collect::<Result<Vec<_>, _>>()
            };
            let discharge = conds("discharge").map_err(err)?;
            let discharge_all = conds("discharge_all").map_err(err)?;
            let trigger = conds("trigger").map_err(err)?;
            let known = ["kind", "selector", "property", "discharge", "discharge_all", "trigger"];
            if let Some((k, _)) = fs.iter().find(|(n, _)| !known.contains(&n.as_str())) {
                return Err(err(format!("unknown field `{k}`")));
            }
            let sel_err = |problem: String| FixtureError::Selector { line, selector: sel_text.clone(), problem };
            let pos = resolve_selector(p, &selector).map_err(sel_err)?;
            let target = key_at(p, &pos).ok_or_else(|| sel_err("does not name a statement".into()))?;
            entries.push(FixtureEntry { kind, selector, property, discharge, discharge_all, trigger, target });
        }
        Ok(Fixture { entries })
    }

    pub fn serialize(&self) -> String {
        let mut out = String::new();
        for e in &self.entries {
            out.push_str(&format!(
                "kind={} selector={} property={}",
                quote(&e.kind),
                quote(&e.selector.to_string()),
                quote(&print_expr(&e.property))
            ));
            for d in &e.discharge {
                out.push_str(&format!(" discharge={}", quote(&d.to_string())));
            }
            for d in &e.discharge_all {
                out.push_str(&format!(" discharge_all={}", quote(&d.to_string())));
            }
            for d in &e.trigger {
                out.push_str(&format!(" trigger={}", quote(&d.to_string())));
            }
            out.push('\n');
        }
        out
    }

    /// Reports still open on `p`, in document order.
    pub fn get_errors(&self, p: &Program) -> Vec<(ErrorReport, Env)> {
        let (text, map) = print_with_lines(p);
        let lines: Vec<&str> = text.lines().collect();
        let mut out = Vec::new();
        for e in &self.entries {
            let all = !e.discharge_all.is_empty() && e.discharge_all.iter().all(|d| d.holds(p));
            if all || e.discharge.iter().any(|d| d.holds(p)) || !e.trigger.iter().all(|d| d.holds(p)) {
                continue;
            }
            let Some(pos) = locate(p, &e.target) else { continue };
            let Some(entry) = map
                .stmts
                .iter()
                .find(|x| !x.is_marker && x.method == pos.method && x.block == pos.block && x.index == pos.start)
            else {
                continue;
            };
            let line = entry.first_line;
            let col = lines.get(line - 1).map(|l| l.len() - l.trim_start().len() + 1).unwrap_or(1);
            let report = ErrorReport { kind: e.kind.clone(), property: e.property.clone(), line, col };
            let env = Env::new()
                .with_var("error", Binding::Expr(Expr::Str(e.kind.clone())))
                .with_var("err_arg", Binding::Expr(e.property.clone()))
                .with_position("err_pos", pos);
            out.push((report, env));
        }
        out.sort_by_key(|(r, _)| (r.line, r.col));
        out
    }
}

impl ErrorSource for Fixture {
    fn error_envs(&self, p: &Program) -> Vec<Env> {
        self.get_errors(p).into_iter().map(|(_, e)| e).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_program;

    const SRC: &str = "method f(c: C) { g(c); c.x := 1; }\nmethod g(c: C) { }";

    #[test]
    fn entries_follow_their_statement() {
        let p = parse_program(SRC).unwrap();
        let text = format!("kind={} selector=\"method:f 3\" property=\"c\" discharge=\"requires f c != null\"", quote(NULL_ERROR));
        let fx = Fixture::load(&text, &p).unwrap();
        let errs = fx.get_errors(&p);
        assert_eq!(errs.len(), 1);
        assert_eq!(errs[0].1.var("err_arg"), Some(&Binding::Expr(Expr::var("c"))));
        assert_eq!(errs[0].1.positions["err_pos"].start, 1);
        let q = parse_program("method f(c: C) { assert c != null; g(c); c.x := 1; }\nmethod g(c: C) { }").unwrap();
        assert_eq!(fx.get_errors(&q)[0].1.positions["err_pos"].start, 2);
        let r = parse_program("method f(c: C) requires c != null { g(c); c.x := 1; }\nmethod g(c: C) { }").unwrap();
        assert!(fx.get_errors(&r).is_empty());
        let t = format!("kind=\"k\" selector=\"method:f 3\" property=\"c\" trigger=\"requires f c != null\"");
        let fx2 = Fixture::load(&t, &p).unwrap();
        assert!(fx2.get_errors(&p).is_empty());
        assert_eq!(fx2.get_errors(&r).len(), 1);
        assert_eq!(Fixture::load(&fx2.serialize(), &p).unwrap(), fx2);
        assert_eq!(Fixture::load(&fx.serialize(), &p).unwrap(), fx);
    }

    #[test]
    fn bad_selectors_are_reported() {
        let p = parse_program(SRC).unwrap();
        let e = Fixture::load("kind=\"k\" selector=\"method:h 1\" property=\"c\"", &p).unwrap_err();
        assert!(matches!(e, FixtureError::Selector { line: 1, .. }));
        assert!(Fixture::load("", &p).unwrap().entries.is_empty());
    }
}
