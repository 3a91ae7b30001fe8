//! Electronic design automation problems.

pub mod blif;
pub mod mapping;
pub mod routing;
pub mod scheduling;
