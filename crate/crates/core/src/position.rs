//! Positions inside method bodies.
//!
//! Anchors are ordinary statements in the tree but are invisible to
//! positions: every index below counts non-marker statements only. A
//! position is either a gap between statements (`start == end`) or a run of
//! whole statements `[start, end)` of one block.

use std::collections::BTreeMap;
use std::fmt;

use crate::ast::{Block, MethodDecl, Program, Stmt};
use crate::error::PositionError;
use crate::printer::print_with_lines;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Branch {
    Then,
    Else,
}

/// Route from a method body to a nested block: `(if-statement index, branch)`
/// per level.
pub type BlockPath = Vec<(usize, Branch)>;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Position {
    pub method: String,
    pub block: BlockPath,
    pub start: usize,
    pub end: usize,
}

impl Position {
    pub fn gap(method: impl Into<String>, block: BlockPath, at: usize) -> Self {
        Position { method: method.into(), block, start: at, end: at }
    }

    pub fn region(method: impl Into<String>, block: BlockPath, start: usize, end: usize) -> Self {
        Position { method: method.into(), block, start, end }
    }

    pub fn is_gap(&self) -> bool {
        self.start == self.end
    }

    /// Whether `other` lies inside this region. A gap admits only sites that
    /// begin exactly at it.
    pub fn admits(&self, other: &Position) -> bool {
        if self.method != other.method {
            return false;
        }
        if self.is_gap() {
            return other.block == self.block && other.start == self.start;
        }
        if other.block == self.block {
            return self.start <= other.start && other.end <= self.end;
        }
        // Nested inside one of the region's if-statements.
        other.block.len() > self.block.len()
            && other.block[..self.block.len()] == self.block[..]
            && (self.start..self.end).contains(&other.block[self.block.len()].0)
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.method)?;
        for (i, b) in &self.block {
            let tag = match b {
                Branch::Then => "then",
                Branch::Else => "else",
            };
            write!(f, "/{i}.{tag}")?;
        }
        if self.is_gap() {
            write!(f, ":{}", self.start)
        } else {
            write!(f, ":{}..{}", self.start, self.end)
        }
    }
}

/// Unresolved position reference as written in an inst list.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum PosRef {
    Named(String),
    Line(usize),
    Up(Box<PosRef>),
    Down(Box<PosRef>),
}

impl fmt::Display for PosRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PosRef::Named(n) => write!(f, "@{n}"),
            PosRef::Line(n) => write!(f, "line({n})"),
            PosRef::Up(r) => write!(f, "up({r})"),
            PosRef::Down(r) => write!(f, "down({r})"),
        }
    }
}

pub fn block_of<'a>(m: &'a MethodDecl, path: &[(usize, Branch)]) -> Option<&'a Block> {
    let mut b = m.body.as_ref()?;
    for &(i, br) in path {
        let raw = raw_index(b, i)?;
        match (b.get(raw)?, br) {
            (Stmt::If { then_block, .. }, Branch::Then) => b = then_block,
            (Stmt::If { else_block: Some(e), .. }, Branch::Else) => b = e,
            _ => return None,
        }
    }
    Some(b)
}

pub fn block_of_mut<'a>(m: &'a mut MethodDecl, path: &[(usize, Branch)]) -> Option<&'a mut Block> {
    let mut b = m.body.as_mut()?;
    for &(i, br) in path {
        let raw = raw_index(b, i)?;
        match (b.get_mut(raw)?, br) {
            (Stmt::If { then_block, .. }, Branch::Then) => b = then_block,
            (Stmt::If { else_block: Some(e), .. }, Branch::Else) => b = e,
            _ => return None,
        }
    }
    Some(b)
}

/// Number of non-marker statements.
pub fn stmt_count(b: &[Stmt]) -> usize {
    b.iter().filter(|s| !s.is_marker()).count()
}

/// Raw index of the `i`-th non-marker statement; `i == count` maps to the
/// end of the block. Inserting at this index places new code after any
/// markers already sitting in gap `i`.
pub fn raw_index(b: &[Stmt], i: usize) -> Option<usize> {
    let mut seen = 0;
    for (raw, s) in b.iter().enumerate() {
        if s.is_marker() {
            continue;
        }
        if seen == i {
            return Some(raw);
        }
        seen += 1;
    }
    (seen == i).then_some(b.len())
}

/// Raw index range covered by the statements `[start, end)`, including
/// markers strictly between them.
pub fn raw_range(b: &[Stmt], start: usize, end: usize) -> Option<std::ops::Range<usize>> {
    if start == end {
        let r = raw_index(b, start)?;
        return Some(r..r);
    }
    let first = raw_index(b, start)?;
    let last = raw_index(b, end - 1)?;
    (last < b.len()).then_some(first..last + 1)
}

pub fn resolves(p: &Program, pos: &Position) -> bool {
    p.method(&pos.method)
        .and_then(|m| block_of(m, &pos.block))
        .is_some_and(|b| pos.start <= pos.end && pos.end <= stmt_count(b))
}

/// Gap holding anchor `name`.
pub fn anchor_position(p: &Program, name: &str) -> Result<Position, PositionError> {
    for m in p.methods() {
        if let Some(b) = &m.body {
            if let Some(pos) = find_marker(b, name, &m.name, &mut Vec::new()) {
                return Ok(pos);
            }
        }
    }
    Err(PositionError::UnknownAnchor(name.to_string()))
}

fn find_marker(b: &Block, name: &str, method: &str, path: &mut BlockPath) -> Option<Position> {
    let mut idx = 0;
    for s in b {
        match s {
            Stmt::Marker(n) if n == name => return Some(Position::gap(method, path.clone(), idx)),
            Stmt::Marker(_) => continue,
            Stmt::If { then_block, else_block, .. } => {
                path.push((idx, Branch::Then));
                let r = find_marker(then_block, name, method, path);
                path.pop();
                if r.is_some() {
                    return r;
                }
                if let Some(e) = else_block {
                    path.push((idx, Branch::Else));
                    let r = find_marker(e, name, method, path);
                    path.pop();
                    if r.is_some() {
                        return r;
                    }
                }
            }
            _ => {}
        }
        idx += 1;
    }
    None
}

pub fn method_start(p: &Program, method: &str) -> Result<Position, PositionError> {
    p.method(method).ok_or_else(|| PositionError::UnknownMethod(method.to_string()))?;
    Ok(Position::gap(method, Vec::new(), 0))
}

pub fn method_end(p: &Program, method: &str) -> Result<Position, PositionError> {
    let m = p.method(method).ok_or_else(|| PositionError::UnknownMethod(method.to_string()))?;
    let n = m.body.as_deref().map(stmt_count).unwrap_or(0);
    Ok(Position::gap(method, Vec::new(), n))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dir {
    Up,
    Down,
}

/// One step up or down. From a gap this crosses one statement; from a
/// statement run it lands on the gap directly above or below it.
pub fn move_pos(p: &Program, pos: &Position, dir: Dir) -> Result<Position, PositionError> {
    let len = p
        .method(&pos.method)
        .and_then(|m| block_of(m, &pos.block))
        .map(|b| stmt_count(b))
        .ok_or(PositionError::Dangling)?;
    let at = match (dir, pos.is_gap()) {
        (Dir::Up, true) if pos.start == 0 => {
            return Err(PositionError::Navigation { dir: "up", slot: pos.start, len })
        }
        (Dir::Up, true) => pos.start - 1,
        (Dir::Down, true) if pos.start >= len => {
            return Err(PositionError::Navigation { dir: "down", slot: pos.start, len })
        }
        (Dir::Down, true) => pos.start + 1,
        (Dir::Up, false) => pos.start,
        (Dir::Down, false) => pos.end,
    };
    Ok(Position::gap(pos.method.clone(), pos.block.clone(), at))
}

/// Statement (or anchor gap) printed on `line` of `print_program(p)`.
pub fn line_position(p: &Program, line: usize) -> Result<Position, PositionError> {
    let (_, map) = print_with_lines(p);
    let best = map
        .stmts
        .iter()
        .filter(|e| e.first_line <= line && line <= e.last_line)
        .min_by_key(|e| (e.last_line - e.first_line, usize::MAX - e.first_line));
    if let Some(e) = best {
        return Ok(if e.is_marker {
            Position::gap(e.method.clone(), e.block.clone(), e.index)
        } else {
            Position::region(e.method.clone(), e.block.clone(), e.index, e.index + 1)
        });
    }
    // Blank body lines (braces of an empty body, say) select a top-level gap.
    for span in &map.methods {
        let Some(open) = span.body_line else { continue };
        if open <= line && line <= span.last_line {
            let before = map
                .stmts
                .iter()
                .filter(|e| e.method == span.method && e.block.is_empty() && !e.is_marker && e.last_line < line)
                .count();
            return Ok(Position::gap(span.method.clone(), Vec::new(), before));
        }
    }
    Err(PositionError::LineOutside(line))
}

/// Resolves a reference. Names bound in `bound` take precedence over
/// anchors; unbound `@start`/`@end` need the method of the site at hand.
pub fn resolve(
    p: &Program,
    bound: &BTreeMap<String, Position>,
    r: &PosRef,
    site_method: Option<&str>,
) -> Result<Position, PositionError> {
    match r {
        PosRef::Named(n) => {
            if let Some(pos) = bound.get(n) {
                return if resolves(p, pos) { Ok(pos.clone()) } else { Err(PositionError::Dangling) };
            }
            match (n.as_str(), site_method) {
                ("start", Some(m)) => method_start(p, m),
                ("end", Some(m)) => method_end(p, m),
                ("start" | "end", None) => Err(PositionError::NoContext(n.clone())),
                _ => anchor_position(p, n),
            }
        }
        PosRef::Line(n) => line_position(p, *n),
        PosRef::Up(inner) => move_pos(p, &resolve(p, bound, inner, site_method)?, Dir::Up),
        PosRef::Down(inner) => move_pos(p, &resolve(p, bound, inner, site_method)?, Dir::Down),
    }
}

/// Whether `r` needs a site to resolve (mentions an unbound `@start`/`@end`).
pub fn needs_site(bound: &BTreeMap<String, Position>, r: &PosRef) -> bool {
    match r {
        PosRef::Named(n) => (n == "start" || n == "end") && !bound.contains_key(n),
        PosRef::Line(_) => false,
        PosRef::Up(i) | PosRef::Down(i) => needs_site(bound, i),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_program;

    fn prog() -> Program {
        parse_program(
            "method m(x: int) {
               assert x == x;
               /*@a*/
               if x == 0 { assert true; /*@b*/ } else { }
               assert true;
             }",
        )
        .unwrap()
    }

    #[test]
    fn anchors_resolve_to_gaps() {
        let p = prog();
        assert_eq!(anchor_position(&p, "a").unwrap(), Position::gap("m", vec![], 1));
        assert_eq!(anchor_position(&p, "b").unwrap(), Position::gap("m", vec![(1, Branch::Then)], 1));
        assert!(matches!(anchor_position(&p, "zz"), Err(PositionError::UnknownAnchor(_))));
    }

    #[test]
    fn counting_up_from_end() {
        let p = prog();
        let mut pos = method_end(&p, "m").unwrap();
        for _ in 0..3 {
            pos = move_pos(&p, &pos, Dir::Up).unwrap();
        }
        assert_eq!(pos, method_start(&p, "m").unwrap());
        assert!(move_pos(&p, &pos, Dir::Up).is_err());
    }

    #[test]
    fn statement_runs_step_to_adjacent_gaps() {
        let p = prog();
        let r = Position::region("m", vec![], 1, 2);
        assert_eq!(move_pos(&p, &r, Dir::Up).unwrap(), Position::gap("m", vec![], 1));
        assert_eq!(move_pos(&p, &r, Dir::Down).unwrap(), Position::gap("m", vec![], 2));
    }

    #[test]
    fn admits_nested_sites() {
        let r = Position::region("m", vec![], 1, 2);
        assert!(r.admits(&Position::region("m", vec![(1, Branch::Then)], 0, 1)));
        assert!(!r.admits(&Position::region("m", vec![], 0, 1)));
        assert!(Position::gap("m", vec![], 2).admits(&Position::region("m", vec![], 2, 3)));
    }

    #[test]
    fn raw_indices_skip_markers() {
        let p = prog();
        let b = p.method("m").unwrap().body.as_ref().unwrap();
        assert_eq!(raw_index(b, 1), Some(2));
        assert_eq!(raw_index(b, 3), Some(4));
        assert_eq!(raw_index(b, 4), None);
        assert_eq!(raw_range(b, 0, 2), Some(0..3));
    }

    #[test]
    fn lines_select_innermost_statement() {
        let p = prog();
        let text = crate::printer::print_program(&p);
        let n = text.lines().position(|l| l.trim() == "assert true;").unwrap() + 1;
        assert_eq!(line_position(&p, n).unwrap(), Position::region("m", vec![(1, Branch::Then)], 0, 1));
        assert!(matches!(line_position(&p, 999), Err(PositionError::LineOutside(999))));
    }
}
