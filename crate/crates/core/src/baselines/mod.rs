//! Reference solvers producing the expert costs that quality is measured against.
//!
//! All solvers are deterministic and break ties towards the lowest index.

pub mod extraction;
pub mod iop;
pub mod mendelian;
pub mod pairings;
pub mod pdptw;
pub mod protein;
pub mod route;
pub mod scheduling;
pub mod techmap;
