//! Shared by the core integration tests and the CLI acceptance suite.
#![allow(dead_code)]

pub mod criteria;
pub mod laws;
pub mod oracle;
pub mod sims;
