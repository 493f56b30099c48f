//! Command-line interface and HTTP service for evaluation projects.

pub mod cli;
pub mod http;
pub mod ops;

pub use ops::{Workbench, WorkbenchError};
