//! Compiler problems.

pub mod egraph;
pub mod iop;
