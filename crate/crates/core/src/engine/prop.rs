//! Side conditions of `when ... then` tactics.

use crate::ast::{Expr, Program, Visibility};
use crate::kernel::{instantiate_partial, match_expr, Binding, Env, MState};
use crate::pattern::Pattern;
use crate::tactic::Prop;

/// The method or function a property talks about.
fn subject(env: &Env, t: &Expr) -> Option<String> {
    match t {
        Expr::Meta(v) => env.var(v).and_then(Binding::as_name),
        Expr::Var(n) => Some(n.clone()),
        _ => None,
    }
}

fn visibility_and_ghost(p: &Program, name: &str) -> Option<(Visibility, bool)> {
    if let Some(m) = p.method(name) {
        return Some((m.visibility, m.is_ghost));
    }
    p.function(name).map(|f| (f.visibility, !f.kind.is_compiled()))
}

/// All extensions of `env` under which `prop` holds; empty when it fails.
pub fn prop_holds(env: &Env, p: &Program, prop: &Prop) -> Vec<Env> {
    let keep = |b: bool| if b { vec![env.clone()] } else { Vec::new() };
    let about = |t: &Expr| subject(env, t).and_then(|n| visibility_and_ghost(p, &n));
    match prop {
        Prop::IsPublic(t) => keep(about(t).is_some_and(|(v, _)| v == Visibility::Public)),
        Prop::IsPrivate(t) => keep(about(t).is_some_and(|(v, _)| v == Visibility::Private)),
        Prop::IsGenerated(t) => keep(about(t).is_some_and(|(v, _)| v == Visibility::Generated)),
        Prop::IsGhost(t) => keep(about(t).is_some_and(|(_, g)| g)),
        Prop::Not(q) => keep(prop_holds(env, p, q).is_empty()),
        Prop::ErrorEquals(s) => keep(env.var("error").and_then(Binding::as_expr) == Some(Expr::Str(s.clone()))),
        Prop::PatternEquals(e, pat) => {
            let Pattern::Expr(pe) = pat else { return Vec::new() };
            let Ok(value) = instantiate_partial(e, &env.vars) else { return Vec::new() };
            match_expr(pe, &value, MState::with_vars(env.vars.clone()))
                .into_iter()
                .map(|st| {
                    let mut out = env.clone();
                    out.vars = st.vars;
                    out
                })
                .collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_program;
    use crate::tactic::parse_tactic_defs;
    use crate::tactic::Body;

    fn prop(src: &str) -> Prop {
        let defs = parse_tactic_defs(&format!("t() := when {src} then {{| |}} =>> {{| |}}.")).unwrap();
        match &defs[0].body {
            Body::When(p, _) => p.clone(),
            _ => panic!("no condition"),
        }
    }

    #[test]
    fn visibility_and_patterns() {
        let p = parse_program("public method f() { } /*generated*/ ghost method g() { }").unwrap();
        let env = Env::new().with_var("meth", Binding::Name("g".into()));
        assert_eq!(prop_holds(&env, &p, &prop("?meth is generated")).len(), 1);
        assert!(prop_holds(&env, &p, &prop("?meth is public")).is_empty());
        assert_eq!(prop_holds(&env, &p, &prop("f is not private")).len(), 1);
        let env = env.with_var("P", Binding::Expr(crate::parser::parse_expr("exists x :: x > 0").unwrap()));
        let got = prop_holds(&env, &p, &prop("?P = exists ?y :: ?Q"));
        assert_eq!(got.len(), 1);
        assert_eq!(got[0].var("y"), Some(&Binding::Name("x".into())));
    }
}
