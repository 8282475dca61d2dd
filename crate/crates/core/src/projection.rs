//! Compiled projection: the program with every specification element erased.

use std::collections::HashSet;

use crate::ast::*;

pub fn compiled_projection(p: &Program) -> Program {
    let ghost_methods: HashSet<&str> =
        p.methods().filter(|m| m.is_ghost).map(|m| m.name.as_str()).collect();
    let mut decls = Vec::new();
    for d in &p.decls {
        match d {
            Decl::Datatype { .. } | Decl::Class { .. } => decls.push(d.clone()),
            Decl::Function(f) if f.kind.is_compiled() => {
                let mut f = f.clone();
                f.requires.clear();
                f.ensures.clear();
                decls.push(Decl::Function(f));
            }
            Decl::Function(_) => {}
            Decl::Method(m) if m.is_ghost => {}
            Decl::Method(m) => {
                let mut m = m.clone();
                m.requires.clear();
                m.ensures.clear();
                m.modifies = None;
                if let Some(b) = m.body.take() {
                    let mut ghosts = HashSet::new();
                    m.body = Some(project_block(b, &ghost_methods, &mut ghosts));
                }
                decls.push(Decl::Method(m));
            }
        }
    }
    Program { decls }
}

fn project_block(b: Block, ghost_methods: &HashSet<&str>, ghost_vars: &mut HashSet<String>) -> Block {
    let mut out = Vec::new();
    for s in b {
        match s {
            Stmt::Assert(_) | Stmt::Marker(_) | Stmt::Ellipsis => {}
            Stmt::VarDecl { ghost: true, vars, .. } => {
                ghost_vars.extend(vars.iter().map(|v| v.name.to_string()));
            }
            Stmt::VarDecl { init: Some(VarInit::Expr(Expr::Call { callee, .. })), vars, .. }
                if callee.as_id().is_some_and(|c| ghost_methods.contains(c)) =>
            {
                ghost_vars.extend(vars.iter().map(|v| v.name.to_string()));
            }
            Stmt::Call { callee, .. } if callee.as_id().is_some_and(|c| ghost_methods.contains(c)) => {}
            Stmt::Assign { lhs, .. }
                if lhs.iter().all(|l| matches!(l, Expr::Var(v) if ghost_vars.contains(v))) => {}
            Stmt::If { cond, then_block, else_block } => {
                // Branch-local ghosts go out of scope with the branch.
                let mut inner = ghost_vars.clone();
                let then_block = project_block(then_block, ghost_methods, &mut inner);
                let else_block = else_block.map(|e| {
                    let mut inner = ghost_vars.clone();
                    project_block(e, ghost_methods, &mut inner)
                });
                out.push(Stmt::If { cond, then_block, else_block });
            }
            other => out.push(other),
        }
    }
    out
}
