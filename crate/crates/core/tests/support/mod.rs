#![allow(dead_code)]

pub mod equivalence;
pub mod oracle;
