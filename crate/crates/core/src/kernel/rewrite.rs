//! The three forms of `rewrite`.

use super::instantiate::Instantiator;
use super::matching::{match_expr, MState};
use super::tree::{at_path_mut, preorder};
use crate::ast::{Expr, Name};
use crate::error::KernelError;

pub const DEFAULT_STEP_LIMIT: usize = 10_000;

/// Replaces every occurrence of `from` by `to` in one top-down pass.
/// Quantifiers that bind a variable being replaced are left alone.
pub fn substitute(e: &Expr, from: &Expr, to: &Expr) -> Expr {
    if e == from {
        return to.clone();
    }
    if let (Expr::Quant { vars, .. }, Expr::Var(x)) = (e, from) {
        if vars.iter().any(|v| v.name == Name::Id(x.clone())) {
            return e.clone();
        }
    }
    let mut out = e.clone();
    let n = super::tree::children(e).len();
    for i in 0..n {
        let child = super::tree::child_mut(&mut out, i).unwrap();
        *child = substitute(child, from, to);
    }
    out
}

/// Pairwise form: pair `i` is applied to the result of pairs `0..i`.
pub fn rewrite_pairs(froms: &[Expr], tos: &[Expr], e: &Expr) -> Result<Expr, KernelError> {
    if froms.len() != tos.len() {
        return Err(KernelError::MalformedPattern(format!(
            "rewrite lists differ in length ({} vs {})",
            froms.len(),
            tos.len()
        )));
    }
    Ok(froms.iter().zip(tos).fold(e.clone(), |acc, (f, t)| substitute(&acc, f, t)))
}

/// Rule form: rewrites the leftmost-outermost redex, repeatedly unless
/// `once`, giving up after `limit` steps.
pub fn rewrite_rule(lhs: &Expr, rhs: &Expr, e: &Expr, once: bool, limit: usize) -> Result<Expr, KernelError> {
    let mut cur = e.clone();
    let mut steps = 0;
    loop {
        let found = preorder(&cur).into_iter().find_map(|(path, sub)| {
            match_expr(lhs, sub, MState::default()).into_iter().next().map(|st| (path, st))
        });
        let Some((path, st)) = found else {
            // a single rewrite that changes nothing is a failed step
            return if once && steps == 0 { Err(KernelError::NoApplicableSite) } else { Ok(cur) };
        };
        if steps == limit {
            return Err(KernelError::Divergence(limit));
        }
        let replacement = Instantiator::full(&st.vars, &st.caps).expr(rhs)?;
        *at_path_mut(&mut cur, &path).unwrap() = replacement;
        steps += 1;
        if once {
            return Ok(cur);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_expr;

    fn ex(s: &str) -> Expr {
        parse_expr(s).unwrap()
    }

    #[test]
    fn pairwise_lists() {
        let r = rewrite_pairs(&[ex("x + 1"), ex("y")], &[ex("a"), ex("b")], &ex("x + 1 < y")).unwrap();
        assert_eq!(r, ex("a < b"));
    }

    #[test]
    fn identity_substitution() {
        let e = ex("f(v) + v");
        assert_eq!(substitute(&e, &ex("v"), &ex("v")), e);
    }

    #[test]
    fn bound_occurrences_untouched() {
        let e = ex("x > 0 && (exists x :: x == 1)");
        assert_eq!(substitute(&e, &ex("x"), &ex("y + 1")), ex("y + 1 > 0 && (exists x :: x == 1)"));
    }

    #[test]
    fn rule_form_exhaustive_and_once() {
        let (l, r) = (ex("?a + 0"), ex("?a"));
        let e = ex("(x + 0) + 0 < 1");
        assert_eq!(rewrite_rule(&l, &r, &e, false, 100).unwrap(), ex("x < 1"));
        assert_eq!(rewrite_rule(&l, &r, &e, true, 100).unwrap(), ex("x + 0 < 1"));
        assert_eq!(rewrite_rule(&l, &r, &ex("y"), false, 100).unwrap(), ex("y"));
    }

    #[test]
    fn divergence_is_reported() {
        let err = rewrite_rule(&ex("?a"), &ex("?a + 1"), &ex("x"), false, 50).unwrap_err();
        assert_eq!(err, KernelError::Divergence(50));
    }
}
