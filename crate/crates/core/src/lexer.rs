//! Tokenizer shared by the program parser and the tactic parser.

use crate::error::ParseError;

#[derive(Debug, Clone, PartialEq)]
pub enum Tok {
    Ident(String),
    Meta(String),
    Int(i64),
    Str(String),
    /// `/*@name*/`
    Marker(String),
    /// `/*generated*/`
    Generated,
    /// `..` or `...`
    Ellipsis,
    Sym(&'static str),
    Eof,
}

#[derive(Debug, Clone)]
pub struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
    pub start: usize,
    pub end: usize,
}

// Longest symbols first so that prefix matching picks the right one.
const SYMBOLS: &[&str] = &[
    "==>", "=>>", ":=", ":|", "::", "=>", "==", "!=", "<=", ">=", "&&", "||", "<", ">", "!", "+",
    "-", "*", "/", "%", "|", "(", ")", "{", "}", "[", "]", ",", ";", ":", ".", "=", "@",
];

const TACTIC_SYMBOLS: &[&str] = &["{|", "|}"];

pub fn tokenize(src: &str) -> Result<Vec<Token>, ParseError> {
    Lexer::new(src, false).run()
}

/// Tokenizes tactic source, which additionally recognises `{|` and `|}`.
pub fn tokenize_tactics(src: &str) -> Result<Vec<Token>, ParseError> {
    Lexer::new(src, true).run()
}

struct Lexer<'a> {
    src: &'a str,
    bytes: &'a [u8],
    pos: usize,
    line: usize,
    col: usize,
    tactic: bool,
}

fn is_ident_start(c: u8) -> bool {
    c.is_ascii_alphabetic() || c == b'_'
}

fn is_ident_char(c: u8) -> bool {
    c.is_ascii_alphanumeric() || c == b'_'
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str, tactic: bool) -> Self {
        Lexer { src, bytes: src.as_bytes(), pos: 0, line: 1, col: 1, tactic }
    }

    fn peek(&self, off: usize) -> Option<u8> {
        self.bytes.get(self.pos + off).copied()
    }

    fn bump(&mut self, n: usize) {
        for _ in 0..n {
            if let Some(&c) = self.bytes.get(self.pos) {
                self.pos += 1;
                if c == b'\n' {
                    self.line += 1;
                    self.col = 1;
                } else if (c & 0xC0) != 0x80 {
                    self.col += 1;
                }
            }
        }
    }

    fn err(&self, msg: impl Into<String>) -> ParseError {
        ParseError::new(self.line, self.col, msg)
    }

    fn run(mut self) -> Result<Vec<Token>, ParseError> {
        let mut out = Vec::new();
        loop {
            self.skip_ws();
            let (line, col, start) = (self.line, self.col, self.pos);
            let Some(c) = self.peek(0) else {
                out.push(Token { tok: Tok::Eof, line, col, start, end: start });
                return Ok(out);
            };
            let tok = if c == b'/' && self.peek(1) == Some(b'/') {
                while let Some(c) = self.peek(0) {
                    if c == b'\n' {
                        break;
                    }
                    self.bump(1);
                }
                continue;
            } else if c == b'/' && self.peek(1) == Some(b'*') {
                match self.block_comment()? {
                    Some(t) => t,
                    None => continue,
                }
            } else if is_ident_start(c) {
                let s = self.take_while(is_ident_char);
                Tok::Ident(s)
            } else if c == b'?' {
                self.bump(1);
                if !self.peek(0).is_some_and(is_ident_start) {
                    return Err(self.err("expected metavariable name after `?`"));
                }
                let s = self.take_while(|c| is_ident_char(c) || c == b'\'');
                Tok::Meta(s)
            } else if c.is_ascii_digit() {
                let s = self.take_while(|c| c.is_ascii_digit());
                Tok::Int(s.parse().map_err(|_| self.err("integer literal out of range"))?)
            } else if c == b'"' {
                self.string()?
            } else if c == b'.' && self.peek(1) == Some(b'.') {
                let n = if self.peek(2) == Some(b'.') { 3 } else { 2 };
                self.bump(n);
                Tok::Ellipsis
            } else if let Some(sym) = self.symbol() {
                self.bump(sym.len());
                Tok::Sym(sym)
            } else {
                let ch = self.src[self.pos..].chars().next().unwrap_or('?');
                return Err(self.err(format!("unexpected character `{ch}`")));
            };
            out.push(Token { tok, line, col, start, end: self.pos });
        }
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek(0) {
            if c.is_ascii_whitespace() {
                self.bump(1);
            } else if c >= 0x80 {
                // Non-ASCII whitespace such as NBSP is tolerated.
                let ch = self.src[self.pos..].chars().next().unwrap();
                if ch.is_whitespace() {
                    self.bump(ch.len_utf8());
                } else {
                    break;
                }
            } else {
                break;
            }
        }
    }

    fn take_while(&mut self, f: impl Fn(u8) -> bool) -> String {
        let start = self.pos;
        while self.peek(0).is_some_and(&f) {
            self.bump(1);
        }
        self.src[start..self.pos].to_string()
    }

    fn symbol(&self) -> Option<&'static str> {
        let rest = &self.src[self.pos..];
        if self.tactic {
            if let Some(s) = TACTIC_SYMBOLS.iter().find(|s| rest.starts_with(**s)) {
                return Some(s);
            }
        }
        SYMBOLS.iter().find(|s| rest.starts_with(**s)).copied()
    }

    fn string(&mut self) -> Result<Tok, ParseError> {
        self.bump(1);
        let mut s = String::new();
        loop {
            match self.peek(0) {
                None | Some(b'\n') => return Err(self.err("unterminated string literal")),
                Some(b'"') => {
                    self.bump(1);
                    return Ok(Tok::Str(s));
                }
                Some(b'\\') => {
                    let esc = self.peek(1).ok_or_else(|| self.err("bad escape"))?;
                    s.push(match esc {
                        b'n' => '\n',
                        b't' => '\t',
                        other => other as char,
                    });
                    self.bump(2);
                }
                Some(_) => {
                    let ch = self.src[self.pos..].chars().next().unwrap();
                    s.push(ch);
                    self.bump(ch.len_utf8());
                }
            }
        }
    }

    /// Consumes a `/* ... */` comment. Anchors and the generated marker are
    /// returned as tokens; every other comment is discarded.
    fn block_comment(&mut self) -> Result<Option<Tok>, ParseError> {
        let rest = &self.src[self.pos..];
        let Some(close) = rest[2..].find("*/") else {
            return Err(self.err("unterminated comment"));
        };
        let inner = rest[2..2 + close].trim();
        let tok = if let Some(name) = inner.strip_prefix('@') {
            let name = name.trim();
            if name.is_empty() || !name.bytes().all(is_ident_char) || !is_ident_start(name.as_bytes()[0]) {
                return Err(self.err(format!("malformed anchor comment `/*{inner}*/`")));
            }
            Some(Tok::Marker(name.to_string()))
        } else if inner == "generated" {
            Some(Tok::Generated)
        } else {
            None
        };
        self.bump(close + 4);
        Ok(tok)
    }
}
