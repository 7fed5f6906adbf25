//! Library side of the `specdet` command: configuration, commands and the
//! validation suite.

pub mod commands;
pub mod config;
pub use specdet::validate;
