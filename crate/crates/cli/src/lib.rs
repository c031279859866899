//! Command implementations behind the `grrhdr` binary, plus the run
//! manifest format.

pub mod commands;
pub mod error;
pub mod files;
pub mod manifest;
