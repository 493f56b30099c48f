//! Gated evaluation workflow.
//!
//! A [`Project`] moves through ten ordered steps. Steps one to six are
//! recorded once; design, implementation and analysis repeat per iteration,
//! and conclusion closes the project. Every state change is an [`Event`];
//! the project state is the fold of its events, which makes the append-only
//! journal kept by [`ProjectStore`] the source of truth.

mod compare;
mod payload;
mod project;
mod store;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use compare::{compare_runs, RepeatabilityReport, StepAgreement, DEFAULT_TOLERANCE};
pub use payload::{
    BoostingMetric, CandidateMetric, ConclusionPayload, FactorListingPayload, ImplementationPayload, ListingPayload,
    QuestionStatus, RequirementQuestion, SelectionPayload, StepPayload,
};
pub use project::{Event, JournalEntry, LogEntry, Project, StepRecord};
pub use store::{ProjectStore, StoreError, JOURNAL_FILE, SNAPSHOT_FILE};

/// Builds the analysis step output for `iteration` from its recorded runs.
pub fn analysis_payload(
    project: &Project,
    iteration: u32,
    recipe: &crate::analysis::AnalysisRecipe,
) -> Result<StepPayload, EngineError> {
    let implementation = project
        .implementation(iteration)
        .ok_or_else(|| EngineError::Incomplete(format!("no experimental implementation for iteration {iteration}")))?;
    let execution = &implementation.execution;
    let results = crate::analysis::analyze_execution(&execution.plan, &execution.records, recipe)
        .map_err(|e| EngineError::Contract { step: StepId::ExperimentalAnalysis, reason: e.to_string() })?;
    Ok(StepPayload::ExperimentalAnalysis { recipe: recipe.clone(), results: Box::new(results) })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StepId {
    RequirementRecognition,
    FeatureIdentification,
    MetricsBenchmarksListing,
    MetricsBenchmarksSelection,
    FactorsListing,
    FactorsSelection,
    ExperimentalDesign,
    ExperimentalImplementation,
    ExperimentalAnalysis,
    ConclusionDocumentation,
}

impl StepId {
    pub const ALL: [StepId; 10] = [
        StepId::RequirementRecognition,
        StepId::FeatureIdentification,
        StepId::MetricsBenchmarksListing,
        StepId::MetricsBenchmarksSelection,
        StepId::FactorsListing,
        StepId::FactorsSelection,
        StepId::ExperimentalDesign,
        StepId::ExperimentalImplementation,
        StepId::ExperimentalAnalysis,
        StepId::ConclusionDocumentation,
    ];

    /// 1-based position in the procedure.
    pub fn number(self) -> usize {
        self as usize + 1
    }

    pub fn slug(self) -> &'static str {
        match self {
            StepId::RequirementRecognition => "requirement-recognition",
            StepId::FeatureIdentification => "feature-identification",
            StepId::MetricsBenchmarksListing => "metrics-benchmarks-listing",
            StepId::MetricsBenchmarksSelection => "metrics-benchmarks-selection",
            StepId::FactorsListing => "factors-listing",
            StepId::FactorsSelection => "factors-selection",
            StepId::ExperimentalDesign => "experimental-design",
            StepId::ExperimentalImplementation => "experimental-implementation",
            StepId::ExperimentalAnalysis => "experimental-analysis",
            StepId::ConclusionDocumentation => "conclusion-documentation",
        }
    }

    pub fn title(self) -> &'static str {
        match self {
            StepId::RequirementRecognition => "Requirement Recognition",
            StepId::FeatureIdentification => "Performance Feature Identification",
            StepId::MetricsBenchmarksListing => "Metrics and Benchmarks Listing",
            StepId::MetricsBenchmarksSelection => "Metrics and Benchmarks Selection",
            StepId::FactorsListing => "Experimental Factors Listing",
            StepId::FactorsSelection => "Experimental Factors Selection",
            StepId::ExperimentalDesign => "Experimental Design",
            StepId::ExperimentalImplementation => "Experimental Implementation",
            StepId::ExperimentalAnalysis => "Experimental Analysis",
            StepId::ConclusionDocumentation => "Conclusion and Documentation",
        }
    }

    /// Design, implementation and analysis repeat per iteration.
    pub fn is_iterated(self) -> bool {
        matches!(self, StepId::ExperimentalDesign | StepId::ExperimentalImplementation | StepId::ExperimentalAnalysis)
    }

    pub fn previous(self) -> Option<StepId> {
        (self as usize).checked_sub(1).map(|i| StepId::ALL[i])
    }
}

impl fmt::Display for StepId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.slug())
    }
}

impl FromStr for StepId {
    type Err = EngineError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = s.trim().to_lowercase().replace(['_', ' '], "-");
        if let Ok(n) = key.parse::<usize>() {
            if (1..=10).contains(&n) {
                return Ok(StepId::ALL[n - 1]);
            }
        }
        StepId::ALL.into_iter().find(|st| st.slug() == key).ok_or_else(|| EngineError::UnknownStep(s.to_string()))
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EngineError {
    #[error("unknown step `{0}`")]
    UnknownStep(String),
    #[error("problem statement is empty")]
    EmptyProblem,
    #[error("{step} cannot be submitted before {missing}")]
    Gating { step: StepId, missing: StepId },
    #[error("{step} was already submitted for iteration {iteration}")]
    Duplicate { step: StepId, iteration: u32 },
    #[error("{step} expects iteration {expected}, got {given}")]
    IterationMismatch { step: StepId, expected: u32, given: u32 },
    #[error("payload of type {found} cannot be submitted as {step}")]
    PayloadMismatch { step: StepId, found: StepId },
    #[error("{step} payload violates its contract: {reason}")]
    Contract { step: StepId, reason: String },
    #[error("project is concluded")]
    Concluded,
    #[error("cannot begin a new iteration: {0}")]
    IterationPrecondition(String),
    #[error("project is not complete: {0}")]
    Incomplete(String),
    #[error("projects target different bundle domains `{0}` and `{1}`")]
    DomainMismatch(String, String),
    #[error("bundle domain `{expected}` required, got `{found}`")]
    WrongBundle { expected: String, found: String },
    #[error("no campaign in progress for iteration {0}")]
    NoCampaign(u32),
}
