//! Child access for expressions by index path.

use crate::ast::{Expr, Stmt, VarInit};

pub(crate) fn children(e: &Expr) -> Vec<&Expr> {
    match e {
        Expr::Unary(_, x) | Expr::Len(x) | Expr::Field(x, _) => vec![x],
        Expr::Binary(_, l, r) | Expr::Rule(l, r) => vec![l, r],
        Expr::Quant { body, .. } => vec![body],
        Expr::Call { args, .. } | Expr::SeqDisplay(args) => args.iter().collect(),
        Expr::Match { scrutinee, cases } => {
            std::iter::once(&**scrutinee).chain(cases.iter().map(|c| &c.body)).collect()
        }
        _ => vec![],
    }
}

pub(crate) fn child_mut(e: &mut Expr, i: usize) -> Option<&mut Expr> {
    match e {
        Expr::Unary(_, x) | Expr::Len(x) | Expr::Field(x, _) if i == 0 => Some(x),
        Expr::Binary(_, l, r) | Expr::Rule(l, r) => match i {
            0 => Some(l),
            1 => Some(r),
            _ => None,
        },
        Expr::Quant { body, .. } if i == 0 => Some(body),
        Expr::Call { args, .. } | Expr::SeqDisplay(args) => args.get_mut(i),
        Expr::Match { scrutinee, cases } => {
            if i == 0 {
                Some(scrutinee)
            } else {
                cases.get_mut(i - 1).map(|c| &mut c.body)
            }
        }
        _ => None,
    }
}

pub(crate) fn at_path_mut<'a>(e: &'a mut Expr, path: &[usize]) -> Option<&'a mut Expr> {
    let mut cur = e;
    for &i in path {
        cur = child_mut(cur, i)?;
    }
    Some(cur)
}

/// Every sub-expression with its path, outermost first, left to right.
/// Rule literals are opaque.
pub(crate) fn preorder(e: &Expr) -> Vec<(Vec<usize>, &Expr)> {
    fn go<'a>(e: &'a Expr, path: &mut Vec<usize>, out: &mut Vec<(Vec<usize>, &'a Expr)>) {
        out.push((path.clone(), e));
        if matches!(e, Expr::Rule(..)) {
            return;
        }
        for (i, c) in children(e).into_iter().enumerate() {
            path.push(i);
            go(c, path, out);
            path.pop();
        }
    }
    let mut out = Vec::new();
    go(e, &mut Vec::new(), &mut out);
    out
}

/// The `slot`-th expression of a statement, in `Stmt::exprs` order.
pub(crate) fn stmt_expr_mut(s: &mut Stmt, slot: usize) -> Option<&mut Expr> {
    match s {
        Stmt::VarDecl { init: Some(VarInit::Expr(e) | VarInit::SuchThat(e)), .. } if slot == 0 => Some(e),
        Stmt::Assign { lhs, rhs } => {
            if slot < lhs.len() {
                lhs.get_mut(slot)
            } else if slot == lhs.len() {
                Some(rhs)
            } else {
                None
            }
        }
        Stmt::Call { args, .. } => args.get_mut(slot),
        Stmt::Assert(e) | Stmt::If { cond: e, .. } if slot == 0 => Some(e),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_expr;

    #[test]
    fn paths_reach_what_preorder_reports() {
        let e = parse_expr("f(a + b, |c|) && !d").unwrap();
        let all = preorder(&e);
        assert_eq!(all.len(), 9);
        for (path, sub) in &all {
            let mut copy = e.clone();
            assert_eq!(at_path_mut(&mut copy, path).unwrap(), *sub);
        }
    }
}
