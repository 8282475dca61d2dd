//! Tactic engine for a small contract-annotated imperative language.

pub mod ast;
pub mod corpus;
pub mod diff;
pub mod engine;
pub mod error;
pub mod external;
pub mod gen;
pub mod guard;
pub mod kernel;
pub mod lexer;
pub mod oracle;
pub mod parser;
pub mod pattern;
pub mod position;
pub mod printer;
pub mod projection;
pub mod session;
pub mod stdlib;
pub mod tactic;
pub mod typecheck;
