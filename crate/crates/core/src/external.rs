//! Adapter for a real verifier run as a subprocess. Not used by the
//! reference workflow, which replays fixtures instead.
//!
//! Diagnostics are read one per line as `FILE(LINE,COL): Error: MESSAGE`.
//! The message becomes `?error`, the statement on LINE becomes `@err_pos`,
//! and `?err_arg` is derived from the statement: the receiver of the first
//! field access for null errors, the callee's instantiated precondition for
//! call-precondition errors, and `true` otherwise.

use std::process::Command;

use crate::ast::*;
use crate::engine::ErrorSource;
use crate::kernel::{rewrite_pairs, Binding, Env};
use crate::oracle::{NULL_ERROR, PRECONDITION_ERROR};
use crate::position::{block_of, line_position, raw_index, Position};
use crate::printer::print_program;

pub struct ExternalVerifier {
    /// Program and leading arguments; the source file path is appended.
    pub command: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

pub fn parse_diagnostics(out: &str) -> Vec<Diagnostic> {
    out.lines()
        .filter_map(|l| {
            let open = l.find('(')?;
            let close = open + l[open..].find(')')?;
            let (line, col) = l[open + 1..close].split_once(',')?;
            let message = l[close + 1..].trim_start_matches(':').trim().strip_prefix("Error:")?.trim();
            Some(Diagnostic { line: line.trim().parse().ok()?, col: col.trim().parse().ok()?, message: message.into() })
        })
        .collect()
}

fn first_receiver(e: &Expr) -> Option<Expr> {
    match e {
        Expr::Field(x, _) => first_receiver(x).or_else(|| Some((**x).clone())),
        Expr::Unary(_, x) | Expr::Len(x) => first_receiver(x),
        Expr::Binary(_, l, r) => first_receiver(l).or_else(|| first_receiver(r)),
        Expr::Call { args, .. } => args.iter().find_map(first_receiver),
        Expr::SeqDisplay(xs) => xs.iter().find_map(first_receiver),
        _ => None,
    }
}

fn stmt_exprs(s: &Stmt) -> Vec<&Expr> {
    match s {
        Stmt::VarDecl { init: Some(VarInit::Expr(e) | VarInit::SuchThat(e)), .. } => vec![e],
        Stmt::Assign { lhs, rhs } => lhs.iter().chain(std::iter::once(rhs)).collect(),
        Stmt::Call { args, .. } => args.iter().collect(),
        Stmt::Assert(e) => vec![e],
        Stmt::If { cond, .. } => vec![cond],
        _ => vec![],
    }
}

fn call_of(s: &Stmt) -> Option<(&str, &[Expr])> {
    fn as_call(e: &Expr) -> Option<(&str, &[Expr])> {
        match e {
            Expr::Call { callee: Name::Id(n), args } => Some((n.as_str(), args.as_slice())),
            _ => None,
        }
    }
    match s {
        Stmt::Call { callee: Name::Id(n), args } => Some((n, args)),
        Stmt::Assign { rhs, .. } => as_call(rhs),
        Stmt::VarDecl { init: Some(VarInit::Expr(e)), .. } => as_call(e),
        _ => None,
    }
}

fn err_arg(p: &Program, s: &Stmt, kind: &str) -> Expr {
    if kind == NULL_ERROR {
        if let Some(r) = stmt_exprs(s).into_iter().find_map(first_receiver) {
            return r;
        }
    }
    if kind == PRECONDITION_ERROR {
        if let Some((name, args)) = call_of(s) {
            if let Some(m) = p.method(name) {
                if let Some(pre) = Expr::conjoin(m.requires.clone()) {
                    let formals: Vec<Expr> = m.params.iter().map(|x| Expr::var(&x.name)).collect();
                    if let Ok(e) = rewrite_pairs(&formals, args, &pre) {
                        return e;
                    }
                }
            }
        }
    }
    Expr::Bool(true)
}

/// Environments for diagnostics of `p`, as the fixture oracle would build.
pub fn diagnostics_to_envs(p: &Program, diags: &[Diagnostic]) -> Vec<Env> {
    let mut out = Vec::new();
    for d in diags {
        let Ok(pos) = line_position(p, d.line) else { continue };
        let stmt = p
            .method(&pos.method)
            .and_then(|m| block_of(m, &pos.block))
            .and_then(|b| raw_index(b, pos.start).and_then(|i| b.get(i)));
        let arg = stmt.map(|s| err_arg(p, s, &d.message)).unwrap_or(Expr::Bool(true));
        let region = if pos.is_gap() { Position::region(pos.method.clone(), pos.block.clone(), pos.start, pos.start + 1) } else { pos };
        out.push(
            Env::new()
                .with_var("error", Binding::Expr(Expr::Str(d.message.clone())))
                .with_var("err_arg", Binding::Expr(arg))
                .with_position("err_pos", region),
        );
    }
    out
}

impl ErrorSource for ExternalVerifier {
    fn error_envs(&self, p: &Program) -> Vec<Env> {
        let path = std::env::temp_dir().join(format!("dtac-{}.dfy", std::process::id()));
        if std::fs::write(&path, print_program(p)).is_err() {
            return Vec::new();
        }
        let Some((prog, args)) = self.command.split_first() else { return Vec::new() };
        let out = Command::new(prog).args(args).arg(&path).output();
        let _ = std::fs::remove_file(&path);
        match out {
            Ok(o) => diagnostics_to_envs(p, &parse_diagnostics(&String::from_utf8_lossy(&o.stdout))),
            Err(_) => Vec::new(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_program;

    #[test]
    fn diagnostics_map_to_environments() {
        let d = parse_diagnostics("a.dfy(3,5): Error: target object may be null\nnoise\n");
        assert_eq!(d, vec![Diagnostic { line: 3, col: 5, message: NULL_ERROR.into() }]);
        let p = parse_program("method f(c: C) {\n  c.x := 1;\n}").unwrap();
        let envs = diagnostics_to_envs(&p, &[Diagnostic { line: 3, col: 3, message: NULL_ERROR.into() }]);
        assert_eq!(envs[0].var("err_arg"), Some(&Binding::Expr(Expr::var("c"))));
    }
}
