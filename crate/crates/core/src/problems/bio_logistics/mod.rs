//! Computational biology and logistics problems.

pub mod crew;
pub mod mendelian;
pub mod pdptw;
pub mod protein;
