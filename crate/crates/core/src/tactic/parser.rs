use std::collections::BTreeSet;

use super::library::{find_cycle, RESERVED_VARS};
use super::{Body, Inst, InstItem, Prop, TacticDef, Trans};
use crate::ast::Expr;
use crate::error::{ParseError, TacticError};
use crate::lexer::{tokenize_tactics, Tok, Token};
use crate::parser::Parser;
use crate::pattern::Pattern;
use crate::position::PosRef;

/// Parses a tactic library. Besides syntax this checks formals, the
/// rhs-variable rule, and recursion among the definitions in `text`.
pub fn parse_tactic_defs(text: &str) -> Result<Vec<TacticDef>, TacticError> {
    let toks = tokenize_tactics(text)?;
    let mut p = TParser { p: Parser::new(text, &toks), toks: &toks };
    let mut defs = Vec::new();
    while !p.p.at_eof() {
        defs.push(p.def()?);
    }
    for d in &defs {
        check_def(d)?;
    }
    if let Some(cycle) = find_cycle(&defs) {
        return Err(TacticError::RecursionCycle(cycle));
    }
    Ok(defs)
}

/// Parses one transformation, e.g. `case-I()[?meth := LemmaLength]`.
pub fn parse_invocation(text: &str) -> Result<Trans, TacticError> {
    let toks = tokenize_tactics(text)?;
    let mut p = TParser { p: Parser::new(text, &toks), toks: &toks };
    let t = p.trans()?;
    p.p.expect_eof()?;
    check_rules("<invocation>", &t, &BTreeSet::new())?;
    Ok(t)
}

/// Parses a `;`-separated list of invocations. A sequence that should run
/// as a single step must be parenthesised.
pub fn parse_script(text: &str) -> Result<Vec<Trans>, TacticError> {
    let toks = tokenize_tactics(text)?;
    let mut p = TParser { p: Parser::new(text, &toks), toks: &toks };
    let mut out = Vec::new();
    while !p.p.at_eof() {
        let t = p.prim()?;
        check_rules("<script>", &t, &BTreeSet::new())?;
        out.push(t);
        if !p.p.eat_sym(";") {
            p.p.expect_eof()?;
        }
    }
    Ok(out)
}

fn check_def(d: &TacticDef) -> Result<(), TacticError> {
    let mut seen = BTreeSet::new();
    for f in &d.formals {
        if !seen.insert(f) {
            return Err(TacticError::DuplicateFormal { name: d.name.clone(), formal: f.clone() });
        }
    }
    let mut bound = BTreeSet::new();
    if let Body::When(prop, _) = &d.body {
        prop_binds(prop, &mut bound);
    }
    check_rules(&d.name, d.body.trans(), &bound)
}

fn prop_binds(p: &Prop, out: &mut BTreeSet<String>) {
    match p {
        Prop::PatternEquals(_, pat) => out.extend(pat.metavars()),
        Prop::Not(inner) => prop_binds(inner, out),
        _ => {}
    }
}

fn check_rules(def: &str, t: &Trans, bound: &BTreeSet<String>) -> Result<(), TacticError> {
    match t {
        Trans::Rule { lhs, rhs, inst } => {
            let mut ok = lhs.metavars();
            ok.extend(bound.iter().cloned());
            ok.extend(RESERVED_VARS.iter().map(|s| s.to_string()));
            ok.extend(inst.bindings().map(|(v, _)| v.clone()));
            for v in rhs.metavars() {
                if !ok.contains(&v) {
                    return Err(TacticError::UnboundRhsVariable { def: def.to_string(), var: v });
                }
            }
            Ok(())
        }
        Trans::Seq(a, b) | Trans::Or(a, b) => {
            check_rules(def, a, bound)?;
            check_rules(def, b, bound)
        }
        Trans::Match { .. } | Trans::Call { .. } => Ok(()),
    }
}

struct TParser<'a> {
    p: Parser<'a>,
    toks: &'a [Token],
}

impl<'a> TParser<'a> {
    fn is_ident_at(&self, n: usize, kw: &str) -> bool {
        matches!(self.p.peek_at(n), Tok::Ident(s) if s == kw)
    }

    /// Tactic names may contain hyphens: `assert-up3`, `IH-I`.
    fn tactic_name(&mut self) -> Result<String, ParseError> {
        let mut name = self.p.ident()?;
        loop {
            let dash = self.p.token_at(0);
            let next = self.p.token_at(1);
            let prev_end = self.toks[self.p.position() - 1].end;
            let joins = matches!(dash.tok, Tok::Sym("-"))
                && dash.start == prev_end
                && next.start == dash.end
                && matches!(next.tok, Tok::Ident(_) | Tok::Int(_));
            if !joins {
                return Ok(name);
            }
            self.p.advance();
            match self.p.advance() {
                Tok::Ident(s) => name = format!("{name}-{s}"),
                Tok::Int(i) => name = format!("{name}-{i}"),
                _ => unreachable!(),
            }
        }
    }

    fn def(&mut self) -> Result<TacticDef, TacticError> {
        let name = self.tactic_name()?;
        self.p.expect_sym("(")?;
        let mut formals = Vec::new();
        if !self.p.eat_sym(")") {
            loop {
                formals.push(self.p.ident()?);
                if self.p.eat_sym(")") {
                    break;
                }
                self.p.expect_sym(",")?;
            }
        }
        self.p.expect_sym(":=")?;
        let body = if self.p.eat_kw("when") {
            let prop = self.prop()?;
            if !self.p.eat_kw("then") {
                return Err(self.p.err("expected `then`").into());
            }
            Body::When(prop, self.trans()?)
        } else {
            Body::Plain(self.trans()?)
        };
        self.p.expect_sym(".")?;
        Ok(TacticDef { name, formals, body })
    }

    fn trans(&mut self) -> Result<Trans, ParseError> {
        let first = self.prim()?;
        if self.p.eat_sym(";") {
            let rest = self.trans()?;
            return Ok(Trans::Seq(Box::new(first), Box::new(rest)));
        }
        Ok(first)
    }

    fn prim(&mut self) -> Result<Trans, ParseError> {
        if self.is_ident_at(0, "or") && matches!(self.p.peek_at(1), Tok::Sym("(")) {
            self.p.advance();
            self.p.advance();
            let a = self.trans()?;
            self.p.expect_sym(",")?;
            let b = self.trans()?;
            self.p.expect_sym(")")?;
            return Ok(Trans::Or(Box::new(a), Box::new(b)));
        }
        if self.p.eat_kw("match") {
            let pat = self.code()?;
            let inst = self.inst()?;
            return Ok(Trans::Match { pat, inst });
        }
        if self.p.is_sym("(") {
            let save = self.p.position();
            self.p.advance();
            if let Ok(t) = self.trans() {
                if self.p.eat_sym(")") {
                    return Ok(t);
                }
            }
            self.p.reset(save);
        }
        if matches!(self.p.peek(), Tok::Ident(_)) && self.starts_call() {
            let name = self.tactic_name()?;
            let args = self.args()?;
            let inst = self.inst()?;
            return Ok(Trans::Call { name, args, inst });
        }
        let lhs = self.code()?;
        self.p.expect_sym("=>>")?;
        let rhs = self.code()?;
        let inst = self.inst()?;
        Ok(Trans::Rule { lhs, rhs, inst })
    }

    /// Identifier (possibly hyphenated) followed by `(`.
    fn starts_call(&self) -> bool {
        let mut i = 1;
        loop {
            match self.p.peek_at(i) {
                Tok::Sym("(") => return true,
                Tok::Sym("-") if matches!(self.p.peek_at(i + 1), Tok::Ident(_) | Tok::Int(_)) => {
                    let dash = self.p.token_at(i);
                    let prev = self.p.token_at(i - 1);
                    if dash.start != prev.end || self.p.token_at(i + 1).start != dash.end {
                        return false;
                    }
                    i += 2;
                }
                _ => return false,
            }
        }
    }

    fn args(&mut self) -> Result<Vec<Expr>, ParseError> {
        self.p.expect_sym("(")?;
        let mut out = Vec::new();
        if self.p.eat_sym(")") {
            return Ok(out);
        }
        loop {
            out.push(self.code_expr()?);
            if self.p.eat_sym(")") {
                return Ok(out);
            }
            self.p.expect_sym(",")?;
        }
    }

    /// Index of the `|}` closing the bracket at the current position.
    fn bracket_end(&self) -> Result<usize, ParseError> {
        let start = self.p.position();
        (start + 1..self.toks.len())
            .find(|&i| matches!(self.toks[i].tok, Tok::Sym("|}")))
            .ok_or_else(|| self.p.err("unterminated code bracket"))
    }

    fn bracketed<T>(&mut self, f: impl FnOnce(&mut Parser<'a>) -> Result<T, ParseError>) -> Result<T, ParseError> {
        let end = self.bracket_end()?;
        let start = self.p.position() + 1;
        let mut inner = Parser::new(self.p.src(), &self.toks[start..end]);
        let v = f(&mut inner)?;
        inner.expect_eof()?;
        self.p.reset(end + 1);
        Ok(v)
    }

    fn code(&mut self) -> Result<Pattern, ParseError> {
        if self.p.is_sym("{|") {
            return self.bracketed(|p| p.pattern());
        }
        Ok(Pattern::Expr(self.p.expr()?))
    }

    fn code_expr(&mut self) -> Result<Expr, ParseError> {
        if self.p.is_sym("{|") {
            return self.bracketed(|p| p.expr_or_rule());
        }
        self.p.expr_or_rule()
    }

    fn inst(&mut self) -> Result<Inst, ParseError> {
        let mut inst = Inst::default();
        if !self.p.eat_sym("[") {
            return Ok(inst);
        }
        if self.p.eat_sym("]") {
            return Ok(inst);
        }
        loop {
            if let Tok::Meta(v) = self.p.peek().clone() {
                self.p.advance();
                self.p.expect_sym(":=")?;
                inst.items.push(InstItem::Bind(v, self.code_expr()?));
            } else {
                inst.items.push(InstItem::Pos(self.pos_ref()?));
            }
            if self.p.eat_sym("]") {
                return Ok(inst);
            }
            self.p.expect_sym(",")?;
        }
    }

    fn pos_ref(&mut self) -> Result<PosRef, ParseError> {
        if self.p.eat_sym("@") {
            return Ok(PosRef::Named(self.p.ident()?));
        }
        for (kw, dir) in [("up", true), ("down", false)] {
            if self.p.eat_kw(kw) {
                self.p.expect_sym("(")?;
                let inner = Box::new(self.pos_ref()?);
                self.p.expect_sym(")")?;
                return Ok(if dir { PosRef::Up(inner) } else { PosRef::Down(inner) });
            }
        }
        if self.p.eat_kw("line") {
            self.p.expect_sym("(")?;
            let Tok::Int(n) = self.p.advance() else {
                return Err(self.p.err("expected a line number"));
            };
            self.p.expect_sym(")")?;
            return Ok(PosRef::Line(n as usize));
        }
        Err(self.p.err("expected a position or a `?x := code` binding"))
    }

    fn prop(&mut self) -> Result<Prop, ParseError> {
        if self.p.eat_kw("not") {
            return Ok(Prop::Not(Box::new(self.prop()?)));
        }
        if self.p.eat_sym("(") {
            let p = self.prop()?;
            self.p.expect_sym(")")?;
            return Ok(p);
        }
        let term = match self.p.advance() {
            Tok::Meta(m) => Expr::Meta(m),
            Tok::Ident(i) => Expr::Var(i),
            _ => return Err(self.p.err("expected a metavariable or name in condition")),
        };
        if self.p.eat_kw("is") {
            let neg = self.p.eat_kw("not");
            let attr = self.p.ident()?;
            let prop = match attr.as_str() {
                "public" => Prop::IsPublic(term),
                "private" => Prop::IsPrivate(term),
                "generated" => Prop::IsGenerated(term),
                "ghost" => Prop::IsGhost(term),
                other => return Err(self.p.err(format!("unknown property `{other}`"))),
            };
            return Ok(if neg { Prop::Not(Box::new(prop)) } else { prop });
        }
        self.p.expect_sym("=")?;
        if let Tok::Str(s) = self.p.peek().clone() {
            if term != Expr::Meta("error".into()) {
                return Err(self.p.err("only ?error can be compared with a string"));
            }
            self.p.advance();
            return Ok(Prop::ErrorEquals(s));
        }
        Ok(Prop::PatternEquals(term, self.code()?))
    }
}
