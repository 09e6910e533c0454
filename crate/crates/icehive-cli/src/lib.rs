//! Command implementations and the HTTP session server behind the `icehive`
//! binary.

pub mod commands;
pub mod server;
pub mod suites;

pub use commands::Output;
