//! IO and batch execution around `srir-core`: WAV, CSV and JSON files,
//! HRIR directories, checksummed manifests, a deterministic thread pool and
//! the `srir` command-line front end.

pub mod cli;
pub mod commands;
pub mod config;
pub mod error;
pub mod hrir_dir;
pub mod manifest;
pub mod runner;
pub mod tables;
pub mod wav;

pub use error::{Result, ToolError};
