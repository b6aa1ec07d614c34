//! Library side of the figure-reproduction CLI, exposed for integration
//! tests.

pub mod commands;
pub mod config;
