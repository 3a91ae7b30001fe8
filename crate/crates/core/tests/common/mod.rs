#![allow(dead_code)]

pub mod criteria;
pub mod logs;
pub mod oracles;
