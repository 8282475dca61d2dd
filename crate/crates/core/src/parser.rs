//! Recursive-descent parser for programs and code templates.

use std::collections::HashSet;

use crate::ast::*;
use crate::error::ParseError;
use crate::lexer::{tokenize, Tok, Token};
use crate::pattern::{ClausePattern, MethodPattern, ParamsPattern, Pattern};

/// Parses a compilation unit.
pub fn parse_program(text: &str) -> Result<Program, ParseError> {
    let tokens = tokenize(text)?;
    let mut p = Parser::new(text, &tokens);
    let mut decls = Vec::new();
    let mut names = HashSet::new();
    while !p.at_eof() {
        let (line, col) = p.loc();
        let d = p.decl()?;
        if !names.insert(d.name().to_string()) {
            return Err(ParseError::new(line, col, format!("duplicate declaration `{}`", d.name())));
        }
        decls.push(d);
    }
    let mut prog = Program { decls };
    let mut seen = HashSet::new();
    for (anchor, _) in prog.anchors() {
        if !seen.insert(anchor.clone()) {
            return Err(ParseError::new(1, 1, format!("duplicate anchor `@{anchor}`")));
        }
    }
    prog.normalize();
    Ok(prog)
}

/// Parses a standalone expression.
pub fn parse_expr(text: &str) -> Result<Expr, ParseError> {
    let tokens = tokenize(text)?;
    let mut p = Parser::new(text, &tokens);
    let e = p.expr()?;
    p.expect_eof()?;
    Ok(e)
}

/// Parses a code template: method headers, a statement sequence or an
/// expression, in that order of preference.
pub fn parse_pattern(text: &str) -> Result<Pattern, ParseError> {
    let tokens = tokenize(text)?;
    Parser::new(text, &tokens).pattern()
}

pub(crate) struct Parser<'a> {
    src: &'a str,
    toks: &'a [Token],
    pos: usize,
    eof: Token,
}

const STMT_KEYWORDS: &[&str] = &["var", "ghost", "assert", "if"];

impl<'a> Parser<'a> {
    pub(crate) fn new(src: &'a str, toks: &'a [Token]) -> Self {
        let eof = toks
            .last()
            .filter(|t| t.tok == Tok::Eof)
            .cloned()
            .unwrap_or(Token { tok: Tok::Eof, line: 1, col: 1, start: src.len(), end: src.len() });
        Parser { src, toks, pos: 0, eof }
    }

    pub(crate) fn peek(&self) -> &Tok {
        self.peek_at(0)
    }

    pub(crate) fn peek_at(&self, n: usize) -> &Tok {
        self.toks.get(self.pos + n).map(|t| &t.tok).unwrap_or(&Tok::Eof)
    }

    pub(crate) fn src(&self) -> &'a str {
        self.src
    }

    pub(crate) fn token_at(&self, n: usize) -> &Token {
        self.toks.get(self.pos + n).unwrap_or(&self.eof)
    }

    /// Whether the current token and the next one touch in the source.
    pub(crate) fn adjacent_next(&self) -> bool {
        self.token_at(0).end == self.token_at(1).start && !matches!(self.peek_at(1), Tok::Eof)
    }

    pub(crate) fn token(&self) -> &Token {
        self.toks.get(self.pos).unwrap_or(&self.eof)
    }

    pub(crate) fn loc(&self) -> (usize, usize) {
        let t = self.token();
        (t.line, t.col)
    }

    pub(crate) fn position(&self) -> usize {
        self.pos
    }

    pub(crate) fn reset(&mut self, pos: usize) {
        self.pos = pos;
    }

    pub(crate) fn at_eof(&self) -> bool {
        matches!(self.peek(), Tok::Eof)
    }

    pub(crate) fn advance(&mut self) -> Tok {
        let t = self.peek().clone();
        if self.pos < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    pub(crate) fn err(&self, msg: impl Into<String>) -> ParseError {
        let (l, c) = self.loc();
        ParseError::new(l, c, msg)
    }

    fn describe(&self) -> String {
        match self.peek() {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Meta(s) => format!("`?{s}`"),
            Tok::Int(i) => format!("`{i}`"),
            Tok::Str(s) => format!("\"{s}\""),
            Tok::Marker(s) => format!("anchor `@{s}`"),
            Tok::Generated => "`/*generated*/`".into(),
            Tok::Ellipsis => "`...`".into(),
            Tok::Sym(s) => format!("`{s}`"),
            Tok::Eof => "end of input".into(),
        }
    }

    pub(crate) fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(x) if *x == s)
    }

    pub(crate) fn is_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(x) if x == kw)
    }

    pub(crate) fn eat_sym(&mut self, s: &str) -> bool {
        if self.is_sym(s) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    pub(crate) fn eat_kw(&mut self, kw: &str) -> bool {
        if self.is_kw(kw) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    pub(crate) fn expect_sym(&mut self, s: &str) -> Result<(), ParseError> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            Err(self.err(format!("expected `{s}`, found {}", self.describe())))
        }
    }

    fn expect_kw(&mut self, kw: &str) -> Result<(), ParseError> {
        if self.eat_kw(kw) {
            Ok(())
        } else {
            Err(self.err(format!("expected `{kw}`, found {}", self.describe())))
        }
    }

    pub(crate) fn expect_eof(&self) -> Result<(), ParseError> {
        if self.at_eof() {
            Ok(())
        } else {
            Err(self.err(format!("unexpected {}", self.describe())))
        }
    }

    pub(crate) fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.pos += 1;
                Ok(s)
            }
            _ => Err(self.err(format!("expected identifier, found {}", self.describe()))),
        }
    }

    fn name(&mut self) -> Result<Name, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.pos += 1;
                Ok(Name::Id(s))
            }
            Tok::Meta(s) => {
                self.pos += 1;
                Ok(Name::Meta(s))
            }
            _ => Err(self.err(format!("expected name, found {}", self.describe()))),
        }
    }

    // ---- declarations ------------------------------------------------------

    fn visibility(&mut self) -> Option<Visibility> {
        match self.peek() {
            Tok::Generated => {
                self.pos += 1;
                Some(Visibility::Generated)
            }
            Tok::Ident(s) if s == "public" => {
                self.pos += 1;
                Some(Visibility::Public)
            }
            Tok::Ident(s) if s == "private" => {
                self.pos += 1;
                Some(Visibility::Private)
            }
            _ => None,
        }
    }

    fn decl(&mut self) -> Result<Decl, ParseError> {
        if self.eat_kw("datatype") {
            return self.datatype();
        }
        if self.eat_kw("class") {
            return self.class();
        }
        let vis = self.visibility().unwrap_or(Visibility::Private);
        if self.is_kw("function") || self.is_kw("predicate") {
            return self.function(vis).map(Decl::Function);
        }
        let ghost = self.eat_kw("ghost");
        if self.is_kw("function") || self.is_kw("predicate") {
            // `ghost function` is the same as `function`.
            return self.function(vis).map(Decl::Function);
        }
        self.expect_kw("method")?;
        let name = self.ident()?;
        let params = self.params()?;
        let returns = if self.eat_kw("returns") { self.params()? } else { Vec::new() };
        let mut m = MethodDecl::new(name);
        m.visibility = vis;
        m.is_ghost = ghost;
        m.params = params;
        m.returns = returns;
        loop {
            if self.eat_kw("requires") {
                m.requires.push(self.expr()?);
            } else if self.eat_kw("ensures") {
                m.ensures.push(self.expr()?);
            } else if self.eat_kw("modifies") {
                m.modifies = Some(self.opaque_clause()?);
            } else {
                break;
            }
            self.eat_sym(";");
        }
        if self.is_sym("{") {
            m.body = Some(self.block()?);
        }
        Ok(Decl::Method(m))
    }

    fn opaque_clause(&mut self) -> Result<String, ParseError> {
        let start = self.token().start;
        let mut end = start;
        while !(self.at_eof()
            || self.is_sym(";")
            || self.is_sym("{")
            || self.is_kw("requires")
            || self.is_kw("ensures")
            || self.is_kw("modifies"))
        {
            end = self.token().end;
            self.pos += 1;
        }
        if end == start {
            return Err(self.err("empty modifies clause"));
        }
        Ok(self.src[start..end].split_whitespace().collect::<Vec<_>>().join(" "))
    }

    fn datatype(&mut self) -> Result<Decl, ParseError> {
        let name = self.ident()?;
        self.expect_sym("=")?;
        let mut ctors = Vec::new();
        loop {
            let cname = self.ident()?;
            let fields = if self.is_sym("(") { self.params()? } else { Vec::new() };
            ctors.push(Ctor { name: cname, fields });
            if !self.eat_sym("|") {
                break;
            }
        }
        self.eat_sym(";");
        Ok(Decl::Datatype { name, ctors })
    }

    fn class(&mut self) -> Result<Decl, ParseError> {
        let name = self.ident()?;
        self.expect_sym("{")?;
        let mut fields = Vec::new();
        while !self.eat_sym("}") {
            self.expect_kw("var")?;
            let f = self.ident()?;
            self.expect_sym(":")?;
            let ty = self.ty()?;
            self.eat_sym(";");
            fields.push(Param::new(f, ty));
        }
        Ok(Decl::Class { name, fields })
    }

    fn function(&mut self, visibility: Visibility) -> Result<FunctionDecl, ParseError> {
        let predicate = if self.eat_kw("predicate") {
            true
        } else {
            self.expect_kw("function")?;
            false
        };
        let compiled = self.eat_kw("method");
        let kind = match (predicate, compiled) {
            (false, false) => FunctionKind::Function,
            (false, true) => FunctionKind::FunctionMethod,
            (true, false) => FunctionKind::Predicate,
            (true, true) => FunctionKind::PredicateMethod,
        };
        let name = self.ident()?;
        let params = self.params()?;
        let result = if predicate {
            Type::simple("bool")
        } else {
            self.expect_sym(":")?;
            self.ty()?
        };
        let mut f = FunctionDecl {
            name,
            visibility,
            kind,
            params,
            result,
            requires: Vec::new(),
            ensures: Vec::new(),
            body: None,
        };
        loop {
            if self.eat_kw("requires") {
                f.requires.push(self.expr()?);
            } else if self.eat_kw("ensures") {
                f.ensures.push(self.expr()?);
            } else {
                break;
            }
            self.eat_sym(";");
        }
        if self.eat_sym("{") {
            f.body = Some(self.expr()?);
            self.expect_sym("}")?;
        }
        Ok(f)
    }

    fn params(&mut self) -> Result<Vec<Param>, ParseError> {
        self.expect_sym("(")?;
        let mut out = Vec::new();
        if self.eat_sym(")") {
            return Ok(out);
        }
        loop {
            let n = self.ident()?;
            self.expect_sym(":")?;
            out.push(Param::new(n, self.ty()?));
            if self.eat_sym(")") {
                return Ok(out);
            }
            self.expect_sym(",")?;
        }
    }

    pub(crate) fn ty(&mut self) -> Result<Type, ParseError> {
        let name = self.ident()?;
        let mut args = Vec::new();
        if self.eat_sym("<") {
            loop {
                args.push(self.ty()?);
                if self.eat_sym(">") {
                    break;
                }
                self.expect_sym(",")?;
            }
        }
        Ok(Type { name, args })
    }

    // ---- statements --------------------------------------------------------

    fn block(&mut self) -> Result<Block, ParseError> {
        self.expect_sym("{")?;
        let mut out = Vec::new();
        while !self.eat_sym("}") {
            if self.at_eof() {
                return Err(self.err("unterminated block"));
            }
            out.push(self.stmt()?);
        }
        Ok(out)
    }

    pub(crate) fn stmt(&mut self) -> Result<Stmt, ParseError> {
        match self.peek().clone() {
            Tok::Marker(n) => {
                self.pos += 1;
                return Ok(Stmt::Marker(n));
            }
            Tok::Ellipsis => {
                self.pos += 1;
                self.eat_sym(";");
                return Ok(Stmt::Ellipsis);
            }
            _ => {}
        }
        if self.eat_kw("assert") {
            let e = self.expr()?;
            self.expect_sym(";")?;
            return Ok(Stmt::Assert(e));
        }
        if self.eat_kw("if") {
            let cond = self.expr()?;
            let then_block = self.block()?;
            let else_block = if self.eat_kw("else") {
                if self.is_kw("if") {
                    Some(vec![self.stmt()?])
                } else {
                    Some(self.block()?)
                }
            } else {
                None
            };
            return Ok(Stmt::If { cond, then_block, else_block });
        }
        let ghost = self.is_kw("ghost") && matches!(self.peek_at(1), Tok::Ident(s) if s == "var");
        if ghost {
            self.pos += 1;
        }
        if self.eat_kw("var") {
            let mut vars = Vec::new();
            loop {
                let name = self.name()?;
                let ty = if self.eat_sym(":") { Some(self.ty()?) } else { None };
                vars.push(LocalVar { name, ty });
                if !self.eat_sym(",") {
                    break;
                }
            }
            let init = if self.eat_sym(":=") {
                Some(VarInit::Expr(self.expr()?))
            } else if self.eat_sym(":|") {
                Some(VarInit::SuchThat(self.expr()?))
            } else {
                None
            };
            self.expect_sym(";")?;
            return Ok(Stmt::VarDecl { ghost, vars, init });
        }
        let first = self.expr()?;
        if self.eat_sym(";") {
            return match first {
                Expr::Call { callee, args } => Ok(Stmt::Call { callee, args }),
                _ => Err(self.err("expected a call or assignment statement")),
            };
        }
        let mut lhs = vec![first];
        while self.eat_sym(",") {
            lhs.push(self.expr()?);
        }
        self.expect_sym(":=")?;
        let rhs = self.expr()?;
        self.expect_sym(";")?;
        for l in &lhs {
            if !matches!(l, Expr::Var(_) | Expr::Meta(_) | Expr::Field(..)) {
                return Err(self.err("invalid assignment target"));
            }
        }
        Ok(Stmt::Assign { lhs, rhs })
    }

    // ---- expressions -------------------------------------------------------

    pub(crate) fn expr(&mut self) -> Result<Expr, ParseError> {
        self.binary(1)
    }

    /// Expression optionally followed by `=>> rhs`, forming a rule literal.
    pub(crate) fn expr_or_rule(&mut self) -> Result<Expr, ParseError> {
        let l = self.expr()?;
        if self.eat_sym("=>>") {
            let r = self.expr()?;
            return Ok(Expr::Rule(Box::new(l), Box::new(r)));
        }
        Ok(l)
    }

    fn binop(&self) -> Option<BinOp> {
        let Tok::Sym(s) = self.peek() else { return None };
        Some(match *s {
            "==>" => BinOp::Implies,
            "||" => BinOp::Or,
            "&&" => BinOp::And,
            "==" => BinOp::Eq,
            "!=" => BinOp::Ne,
            "<" => BinOp::Lt,
            "<=" => BinOp::Le,
            ">" => BinOp::Gt,
            ">=" => BinOp::Ge,
            "+" => BinOp::Add,
            "-" => BinOp::Sub,
            "*" => BinOp::Mul,
            "/" => BinOp::Div,
            "%" => BinOp::Mod,
            _ => return None,
        })
    }

    fn binary(&mut self, min_prec: u8) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        while let Some(op) = self.binop() {
            let prec = op.precedence();
            if prec < min_prec {
                break;
            }
            self.pos += 1;
            let next = if op.right_assoc() { prec } else { prec + 1 };
            let rhs = self.binary(next)?;
            if op.is_comparison() && self.binop().is_some_and(|o| o.is_comparison()) {
                return Err(self.err("comparison operators do not chain"));
            }
            lhs = Expr::bin(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.eat_sym("!") {
            return Ok(Expr::Unary(UnOp::Not, Box::new(self.unary()?)));
        }
        if self.eat_sym("-") {
            return Ok(Expr::Unary(UnOp::Neg, Box::new(self.unary()?)));
        }
        self.postfix()
    }

    fn postfix(&mut self) -> Result<Expr, ParseError> {
        let mut e = self.primary()?;
        // Field access is written without spaces; a detached `.` ends a
        // tactic definition.
        while self.is_sym(".") && self.adjacent_next() {
            self.pos += 1;
            let f = self.ident()?;
            e = Expr::Field(Box::new(e), f);
        }
        Ok(e)
    }

    fn args(&mut self) -> Result<Vec<Expr>, ParseError> {
        self.expect_sym("(")?;
        let mut out = Vec::new();
        if self.eat_sym(")") {
            return Ok(out);
        }
        loop {
            out.push(self.expr()?);
            if self.eat_sym(")") {
                return Ok(out);
            }
            self.expect_sym(",")?;
        }
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        match self.peek().clone() {
            Tok::Int(i) => {
                self.pos += 1;
                Ok(Expr::Int(i))
            }
            Tok::Str(s) => {
                self.pos += 1;
                Ok(Expr::Str(s))
            }
            Tok::Ellipsis => {
                self.pos += 1;
                Ok(Expr::Ellipsis)
            }
            Tok::Meta(m) => {
                self.pos += 1;
                if self.is_sym("(") {
                    let args = self.args()?;
                    return Ok(Expr::Call { callee: Name::Meta(m), args });
                }
                Ok(Expr::Meta(m))
            }
            Tok::Ident(id) => match id.as_str() {
                "true" | "false" => {
                    self.pos += 1;
                    Ok(Expr::Bool(id == "true"))
                }
                "null" => {
                    self.pos += 1;
                    Ok(Expr::Null)
                }
                "exists" | "forall" => {
                    self.pos += 1;
                    self.quantifier(if id == "exists" { Quantifier::Exists } else { Quantifier::Forall })
                }
                "match" => {
                    self.pos += 1;
                    self.match_expr()
                }
                _ => {
                    self.pos += 1;
                    if self.is_sym("(") {
                        let args = self.args()?;
                        return Ok(Expr::Call { callee: Name::Id(id), args });
                    }
                    Ok(Expr::Var(id))
                }
            },
            Tok::Sym("(") => {
                self.pos += 1;
                let e = self.expr_or_rule()?;
                self.expect_sym(")")?;
                Ok(e)
            }
            Tok::Sym("|") => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect_sym("|")?;
                Ok(Expr::Len(Box::new(e)))
            }
            Tok::Sym("[") => {
                self.pos += 1;
                let mut items = Vec::new();
                if !self.eat_sym("]") {
                    loop {
                        items.push(self.expr_or_rule()?);
                        if self.eat_sym("]") {
                            break;
                        }
                        self.expect_sym(",")?;
                    }
                }
                Ok(Expr::SeqDisplay(items))
            }
            _ => Err(self.err(format!("expected expression, found {}", self.describe()))),
        }
    }

    fn quantifier(&mut self, q: Quantifier) -> Result<Expr, ParseError> {
        let mut vars = Vec::new();
        loop {
            let name = self.name()?;
            let ty = if self.eat_sym(":") { Some(self.ty()?) } else { None };
            vars.push(BoundVar { name, ty });
            if !self.eat_sym(",") {
                break;
            }
        }
        self.expect_sym("::")?;
        let body = self.expr()?;
        Ok(Expr::Quant { q, vars, body: Box::new(body) })
    }

    fn match_expr(&mut self) -> Result<Expr, ParseError> {
        let scrutinee = self.postfix()?;
        let mut cases = Vec::new();
        while self.eat_kw("case") {
            let ctor = self.ident()?;
            let mut binders = Vec::new();
            if self.eat_sym("(") {
                loop {
                    binders.push(self.ident()?);
                    if self.eat_sym(")") {
                        break;
                    }
                    self.expect_sym(",")?;
                }
            }
            self.expect_sym("=>")?;
            let body = self.expr()?;
            cases.push(MatchCase { ctor, binders, body });
        }
        if cases.is_empty() {
            return Err(self.err("match expression needs at least one case"));
        }
        Ok(Expr::Match { scrutinee: Box::new(scrutinee), cases })
    }

    // ---- templates ---------------------------------------------------------

    fn starts_method_pattern(&self) -> bool {
        let mut i = 0;
        loop {
            match self.peek_at(i) {
                Tok::Generated => i += 1,
                Tok::Ident(s) if s == "public" || s == "private" || s == "ghost" => i += 1,
                Tok::Ident(s) if s == "method" => return true,
                _ => return false,
            }
        }
    }

    /// Parses a template spanning the remaining tokens.
    pub(crate) fn pattern(&mut self) -> Result<Pattern, ParseError> {
        if self.starts_method_pattern() {
            let mut ms = Vec::new();
            while !self.at_eof() {
                ms.push(self.method_pattern()?);
            }
            return Ok(Pattern::Methods(ms));
        }
        let start = self.pos;
        let stmt_attempt = (|| {
            let mut ss = Vec::new();
            while !self.at_eof() {
                ss.push(self.stmt()?);
            }
            Ok::<_, ParseError>(ss)
        })();
        match stmt_attempt {
            Ok(ss) => Ok(Pattern::Stmts(ss)),
            Err(stmt_err) => {
                let starts_stmt = matches!(self.toks.get(start).map(|t| &t.tok),
                    Some(Tok::Ident(k)) if STMT_KEYWORDS.contains(&k.as_str()));
                self.pos = start;
                match self.expr_or_rule().and_then(|e| self.expect_eof().map(|_| e)) {
                    Ok(e) if !starts_stmt => Ok(Pattern::Expr(e)),
                    _ => Err(stmt_err),
                }
            }
        }
    }

    fn method_pattern(&mut self) -> Result<MethodPattern, ParseError> {
        self.visibility();
        let ghost = self.eat_kw("ghost");
        self.expect_kw("method")?;
        let name = self.name()?;
        self.expect_sym("(")?;
        let params = if self.is_sym(")") {
            self.pos += 1;
            ParamsPattern::Exact(Vec::new())
        } else if matches!(self.peek(), Tok::Ellipsis) {
            self.pos += 1;
            self.expect_sym(")")?;
            ParamsPattern::Any
        } else if let (Tok::Meta(m), Tok::Sym(")")) = (self.peek().clone(), self.peek_at(1).clone()) {
            self.pos += 2;
            ParamsPattern::Meta(m)
        } else {
            self.pos -= 1;
            ParamsPattern::Exact(self.params()?)
        };
        let mut clauses = Vec::new();
        loop {
            if self.eat_kw("requires") {
                clauses.push(ClausePattern::Requires(self.expr()?));
            } else if self.eat_kw("ensures") {
                clauses.push(ClausePattern::Ensures(self.expr()?));
            } else if self.eat_kw("modifies") {
                clauses.push(ClausePattern::Modifies(self.opaque_clause()?));
            } else if matches!(self.peek(), Tok::Ellipsis) {
                self.pos += 1;
                clauses.push(ClausePattern::Ellipsis);
            } else {
                break;
            }
            self.eat_sym(";");
        }
        let body = if self.is_sym("{") { Some(self.block()?) } else { None };
        Ok(MethodPattern { ghost, name, params, clauses, body })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const LEMMA_SRC: &str = "ghost method LemmaLength4(n : int)
   requires n >= 0;
   ensures exists xs :: length(xs) == n;{
     if (n == 0){ }else{
       LemmaLength4(n-1);
       var xs :| length(xs) == n-1; }}";

    #[test]
    fn parses_lemma_listing() {
        let p = parse_program(LEMMA_SRC).unwrap();
        assert_eq!(p.decls.len(), 1);
        let m = p.method("LemmaLength4").unwrap();
        assert!(m.is_ghost);
        assert_eq!(m.requires.len(), 1);
        assert_eq!(m.ensures.len(), 1);
        let body = m.body.as_ref().unwrap();
        assert!(matches!(&body[0], Stmt::If { else_block: Some(e), .. } if e.len() == 2));
    }

    #[test]
    fn empty_unit() {
        assert_eq!(parse_program("").unwrap(), Program::default());
    }

    #[test]
    fn anchors_become_markers_and_must_be_unique() {
        let p = parse_program("method m() { /*@a*/ assert true; }").unwrap();
        assert_eq!(p.method("m").unwrap().body.as_ref().unwrap()[0], Stmt::Marker("a".into()));
        let e = parse_program("method m() { /*@a*/ /*@a*/ }").unwrap_err();
        assert!(e.message.contains("duplicate anchor"));
    }

    #[test]
    fn syntax_errors_carry_location() {
        let e = parse_program("method m() {\n  assert ;\n}").unwrap_err();
        assert_eq!((e.line, e.col), (2, 10));
    }

    #[test]
    fn duplicate_declarations_rejected() {
        assert!(parse_program("method a() {} method a() {}").is_err());
    }

    #[test]
    fn conjunction_and_implication_nest_to_the_right() {
        let e = parse_expr("a && b && c ==> d ==> e").unwrap();
        let Expr::Binary(BinOp::Implies, l, r) = e else { panic!() };
        assert_eq!(l.conjuncts().len(), 3);
        assert!(matches!(*r, Expr::Binary(BinOp::Implies, ..)));
        let e = parse_expr("a - b - c").unwrap();
        assert!(matches!(e, Expr::Binary(BinOp::Sub, l, _) if matches!(*l, Expr::Binary(BinOp::Sub, ..))));
    }

    #[test]
    fn ghost_locals_in_ghost_methods_are_normalized() {
        let p = parse_program("ghost method m() { ghost var x :| x == 1; }").unwrap();
        let b = p.method("m").unwrap().body.clone().unwrap();
        assert!(matches!(b[0], Stmt::VarDecl { ghost: false, .. }));
    }

    #[test]
    fn template_categories() {
        assert!(matches!(parse_pattern("method ?m(..) ... { ... }").unwrap(), Pattern::Methods(_)));
        assert!(matches!(parse_pattern("?m(?xs); assert ?P;").unwrap(), Pattern::Stmts(s) if s.len() == 2));
        assert!(matches!(parse_pattern("|?x + ?y| <= ?n").unwrap(), Pattern::Expr(_)));
        assert_eq!(parse_pattern("").unwrap(), Pattern::Stmts(vec![]));
        assert!(parse_pattern("assert ;").is_err());
    }
}
