//! Benchmark execution through external command adapters.
//!
//! An adapter is a shell command template plus rules for pulling numeric
//! measurements out of its standard output. Runs execute one at a time in
//! plan order.

mod adapter;
mod env;
mod exec;
mod extract;

use std::collections::BTreeMap;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::doe::{Level, RunPlan};

pub use adapter::{AdapterDef, ExtractionRule, Extractor, Placeholder};
pub use env::{capture_environment, EnvironmentSnapshot, UNAVAILABLE};
pub use exec::{execute_plan, execute_plan_with, ExecutionOptions, RunOutput, DEFAULT_FAILURE_BUDGET};
pub use extract::{parse_output, ExtractionError, Extraction};

#[derive(Debug, Error)]
pub enum RunnerError {
    #[error("plan has no runs")]
    EmptyPlan,
    #[error("adapter placeholder `{{factor:{0}}}` names no factor of the design")]
    UnknownPlaceholder(String),
    #[error("response metric `{0}` has no extraction rule")]
    MissingRule(String),
    #[error("response metric `{0}` has more than one extraction rule")]
    DuplicateRule(String),
    #[error("extraction rule for `{metric}` is invalid: {reason}")]
    BadRule { metric: String, reason: String },
    #[error("failure budget exceeded: {failed} of {total} runs failed (at most {allowed} allowed)")]
    BudgetExceeded { failed: usize, allowed: usize, total: usize, partial: Box<Execution> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RunStatus {
    Ok,
    Failed,
    Timeout,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Measurement {
    pub value: f64,
    pub unit: String,
}

/// Outcome of one executed run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub run: usize,
    pub combination: BTreeMap<String, Level>,
    pub replicate: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub block: Option<String>,
    pub started_at: DateTime<Utc>,
    pub finished_at: DateTime<Utc>,
    pub host: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exit_code: Option<i32>,
    /// SHA-256 of the captured standard output.
    pub raw_output_digest: String,
    pub measurements: BTreeMap<String, Measurement>,
    pub status: RunStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
}

/// Records of one plan execution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Execution {
    pub plan: RunPlan,
    pub adapter: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub environment: Option<EnvironmentSnapshot>,
    pub records: Vec<RunRecord>,
}

impl Execution {
    pub fn failed(&self) -> usize {
        self.records.iter().filter(|r| r.status != RunStatus::Ok).count()
    }
}
