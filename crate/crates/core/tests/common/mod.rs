//! Checks shared by the per-area tests and the acceptance report.
#![allow(dead_code)]

pub mod mutation;
pub mod roundtrip;
pub mod search;
pub mod stdlib;
