//! Command-line and HTTP front ends for the tactic engine.

pub mod commands;
pub mod server;
