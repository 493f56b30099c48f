//! Requirement-question answers, evaluation reports and replayable
//! evaluation templates.

mod answers;
mod render;
mod template;

use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::EngineError;

pub use answers::{answer_questions, resolve_evidence, EvidenceKind, EvidenceRef, QuestionAnswer};
pub use render::{generate_report, ReportOptions};
pub use template::{generate_template, instantiate_template, EvaluationTemplate, Instantiation, PreExperimental, Provenance};

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("project has no completed step")]
    NoSteps,
    #[error("experimental analysis of iteration {0} is not complete")]
    AnalysisIncomplete(u32),
    #[error("feature `{0}` was not evaluated in this project")]
    FeatureNotEvaluated(String),
    #[error("unsupported report format `{0}` (use text or markdown)")]
    UnsupportedFormat(String),
    #[error("template targets domain `{template}` but the bundle is `{bundle}`")]
    DomainMismatch { template: String, bundle: String },
    #[error(transparent)]
    Engine(#[from] EngineError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReportFormat {
    #[default]
    Text,
    Markdown,
}

impl FromStr for ReportFormat {
    type Err = ReportError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "text" | "txt" => Ok(ReportFormat::Text),
            "markdown" | "md" => Ok(ReportFormat::Markdown),
            other => Err(ReportError::UnsupportedFormat(other.to_string())),
        }
    }
}
