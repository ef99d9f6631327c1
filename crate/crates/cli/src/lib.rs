//! Library surface of the experiment runner: configuration resolution,
//! command implementations, and result serialization. The `mislearn` binary
//! is a thin wrapper over these modules.

pub mod commands;
pub mod config;
pub mod output;
