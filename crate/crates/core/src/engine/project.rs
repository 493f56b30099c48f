use std::collections::BTreeSet;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use super::payload::check_contract;
use super::{
    ConclusionPayload, EngineError, FactorListingPayload, ImplementationPayload, ListingPayload, RequirementQuestion,
    SelectionPayload, StepId, StepPayload,
};
use crate::analysis::{AnalysisRecipe, AnalysisResults};
use crate::artefact::{BundleRef, KnowledgeBundle};
use crate::digest::{content_digest, sha256_hex};
use crate::doe::{DesignSpec, Factor};
use crate::runner::RunRecord;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub step: StepId,
    pub iteration: u32,
    /// Digest of the payload this step consumed.
    pub input_digest: String,
    pub payload: StepPayload,
    pub completed_at: DateTime<Utc>,
    #[serde(default)]
    pub operator: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogEntry {
    pub at: DateTime<Utc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step: Option<StepId>,
    pub iteration: u32,
    pub action: String,
    #[serde(default)]
    pub detail: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub attachments: Vec<String>,
}

/// Runs recorded while an implementation step is in progress.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Campaign {
    pub iteration: u32,
    pub runs: usize,
    pub completed: Vec<RunRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "kebab-case")]
pub enum Event {
    Created {
        id: String,
        bundle: BundleRef,
        problem: String,
        seed: u64,
        #[serde(default)]
        operator: String,
        at: DateTime<Utc>,
    },
    StepSubmitted {
        record: StepRecord,
    },
    IterationBegun {
        iteration: u32,
        #[serde(default)]
        operator: String,
        at: DateTime<Utc>,
    },
    LogNoted {
        entry: LogEntry,
    },
    CampaignStarted {
        iteration: u32,
        runs: usize,
        at: DateTime<Utc>,
    },
    RunCompleted {
        iteration: u32,
        record: RunRecord,
        at: DateTime<Utc>,
    },
}

/// One journal line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JournalEntry {
    pub seq: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub request_id: Option<String>,
    pub event: Event,
}

/// One evaluation study. Only ever changed by applying events.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Project {
    pub schema_version: u32,
    pub id: String,
    pub bundle: BundleRef,
    pub problem: String,
    pub seed: u64,
    pub operator: String,
    pub created_at: DateTime<Utc>,
    pub iteration: u32,
    pub records: Vec<StepRecord>,
    pub log: Vec<LogEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub campaign: Option<Campaign>,
    /// Request ids already applied, for idempotent retries.
    #[serde(default)]
    pub requests: BTreeSet<String>,
    /// Number of journal entries folded into this state.
    pub events: u64,
}

impl Project {
    /// Starts a project awaiting requirement recognition.
    pub fn create(
        bundle: &KnowledgeBundle,
        problem: &str,
        seed: u64,
        operator: &str,
        request_id: Option<String>,
    ) -> Result<(Project, JournalEntry), EngineError> {
        if problem.trim().is_empty() {
            return Err(EngineError::EmptyProblem);
        }
        let entry = JournalEntry {
            seq: 0,
            request_id,
            event: Event::Created {
                id: uuid::Uuid::new_v4().to_string(),
                bundle: bundle.reference(),
                problem: problem.to_string(),
                seed,
                operator: operator.to_string(),
                at: Utc::now(),
            },
        };
        let project = Project::replay(std::slice::from_ref(&entry)).expect("creation event is well formed");
        Ok((project, entry))
    }

    /// Folds a journal into a project. The first entry must be a creation.
    pub fn replay(entries: &[JournalEntry]) -> Result<Project, String> {
        let (first, rest) = entries.split_first().ok_or("journal is empty")?;
        let Event::Created { id, bundle, problem, seed, operator, at } = &first.event else {
            return Err("journal does not start with a creation event".into());
        };
        let mut project = Project {
            schema_version: crate::SCHEMA_VERSION,
            id: id.clone(),
            bundle: bundle.clone(),
            problem: problem.clone(),
            seed: *seed,
            operator: operator.clone(),
            created_at: *at,
            iteration: 0,
            records: Vec::new(),
            log: vec![LogEntry {
                at: *at,
                step: None,
                iteration: 0,
                action: "created".into(),
                detail: format!("project created for {} {}", bundle.domain, bundle.version),
                attachments: vec![sha256_hex(problem)],
            }],
            campaign: None,
            requests: BTreeSet::new(),
            events: 1,
        };
        project.requests.extend(first.request_id.clone());
        for entry in rest {
            if entry.seq != project.events {
                return Err(format!("journal entry {} out of sequence (expected {})", entry.seq, project.events));
            }
            project.apply(entry);
        }
        Ok(project)
    }

    fn apply(&mut self, entry: &JournalEntry) {
        match &entry.event {
            Event::Created { .. } => {}
            Event::StepSubmitted { record } => {
                self.log.push(LogEntry {
                    at: record.completed_at,
                    step: Some(record.step),
                    iteration: record.iteration,
                    action: "submitted".into(),
                    detail: format!("{} completed by {}", record.step.title(), if record.operator.is_empty() { "unnamed operator" } else { &record.operator }),
                    attachments: vec![content_digest(&record.payload)],
                });
                if record.step == StepId::ExperimentalImplementation {
                    self.campaign = None;
                }
                self.records.push(record.clone());
            }
            Event::IterationBegun { iteration, operator, at } => {
                self.iteration = *iteration;
                self.log.push(LogEntry {
                    at: *at,
                    step: Some(StepId::ExperimentalDesign),
                    iteration: *iteration,
                    action: "iteration".into(),
                    detail: format!("iteration {iteration} begun by {}", if operator.is_empty() { "unnamed operator" } else { operator }),
                    attachments: Vec::new(),
                });
            }
            Event::LogNoted { entry } => self.log.push(entry.clone()),
            Event::CampaignStarted { iteration, runs, at } => {
                self.campaign = Some(Campaign { iteration: *iteration, runs: *runs, completed: Vec::new() });
                self.log.push(LogEntry {
                    at: *at,
                    step: Some(StepId::ExperimentalImplementation),
                    iteration: *iteration,
                    action: "campaign".into(),
                    detail: format!("execution of {runs} runs started"),
                    attachments: Vec::new(),
                });
            }
            Event::RunCompleted { iteration, record, at } => {
                self.log.push(LogEntry {
                    at: *at,
                    step: Some(StepId::ExperimentalImplementation),
                    iteration: *iteration,
                    action: "run".into(),
                    detail: format!("run {} finished: {:?}", record.run, record.status).to_lowercase(),
                    attachments: vec![record.raw_output_digest.clone()],
                });
                if let Some(c) = self.campaign.as_mut() {
                    c.completed.push(record.clone());
                }
            }
        }
        self.requests.extend(entry.request_id.clone());
        self.events += 1;
    }

    fn push(&mut self, request_id: Option<String>, event: Event) -> JournalEntry {
        let entry = JournalEntry { seq: self.events, request_id, event };
        self.apply(&entry);
        entry
    }

    /// Current time, clamped so log timestamps never decrease.
    fn now(&self) -> DateTime<Utc> {
        let last = self.log.last().map(|l| l.at).unwrap_or(self.created_at);
        Utc::now().max(last)
    }

    fn seen(&self, request_id: &Option<String>) -> bool {
        request_id.as_ref().is_some_and(|r| self.requests.contains(r))
    }

    pub fn record(&self, step: StepId, iteration: u32) -> Option<&StepRecord> {
        self.records.iter().find(|r| r.step == step && r.iteration == iteration)
    }

    pub fn payload(&self, step: StepId, iteration: u32) -> Option<&StepPayload> {
        self.record(step, iteration).map(|r| &r.payload)
    }

    pub fn is_concluded(&self) -> bool {
        self.records.iter().any(|r| r.step == StepId::ConclusionDocumentation)
    }

    pub fn questions(&self) -> &[RequirementQuestion] {
        match self.payload(StepId::RequirementRecognition, 0) {
            Some(StepPayload::RequirementRecognition { questions }) => questions,
            _ => &[],
        }
    }

    pub fn features(&self) -> &[String] {
        match self.payload(StepId::FeatureIdentification, 0) {
            Some(StepPayload::FeatureIdentification { features }) => features,
            _ => &[],
        }
    }

    pub fn listing(&self) -> Option<&ListingPayload> {
        match self.payload(StepId::MetricsBenchmarksListing, 0) {
            Some(StepPayload::MetricsBenchmarksListing(l)) => Some(l),
            _ => None,
        }
    }

    pub fn selection(&self) -> Option<&SelectionPayload> {
        match self.payload(StepId::MetricsBenchmarksSelection, 0) {
            Some(StepPayload::MetricsBenchmarksSelection(s)) => Some(s),
            _ => None,
        }
    }

    pub fn factor_listing(&self) -> Option<&FactorListingPayload> {
        match self.payload(StepId::FactorsListing, 0) {
            Some(StepPayload::FactorsListing(l)) => Some(l),
            _ => None,
        }
    }

    pub fn selected_factors(&self) -> &[Factor] {
        match self.payload(StepId::FactorsSelection, 0) {
            Some(StepPayload::FactorsSelection { factors }) => factors,
            _ => &[],
        }
    }

    pub fn design(&self, iteration: u32) -> Option<&DesignSpec> {
        match self.payload(StepId::ExperimentalDesign, iteration) {
            Some(StepPayload::ExperimentalDesign { design }) => Some(design),
            _ => None,
        }
    }

    pub fn implementation(&self, iteration: u32) -> Option<&ImplementationPayload> {
        match self.payload(StepId::ExperimentalImplementation, iteration) {
            Some(StepPayload::ExperimentalImplementation(i)) => Some(i),
            _ => None,
        }
    }

    pub fn analysis(&self, iteration: u32) -> Option<(&AnalysisRecipe, &AnalysisResults)> {
        match self.payload(StepId::ExperimentalAnalysis, iteration) {
            Some(StepPayload::ExperimentalAnalysis { recipe, results }) => Some((recipe, results)),
            _ => None,
        }
    }

    pub fn conclusion(&self) -> Option<&ConclusionPayload> {
        self.records.iter().find_map(|r| match &r.payload {
            StepPayload::ConclusionDocumentation(c) => Some(c),
            _ => None,
        })
    }

    /// Latest iteration whose analysis is recorded.
    pub fn last_analysed_iteration(&self) -> Option<u32> {
        self.records.iter().filter(|r| r.step == StepId::ExperimentalAnalysis).map(|r| r.iteration).max()
    }

    /// Iteration a submission of `step` must carry.
    pub fn expected_iteration(&self, step: StepId) -> u32 {
        if step.is_iterated() || step == StepId::ConclusionDocumentation {
            self.iteration
        } else {
            0
        }
    }

    /// Steps that must be recorded before `step` at `iteration`, in order.
    fn prerequisites(step: StepId, iteration: u32) -> Vec<(StepId, u32)> {
        let shared_until = (step as usize).min(StepId::ExperimentalDesign as usize);
        let mut needed: Vec<(StepId, u32)> = StepId::ALL[..shared_until].iter().map(|s| (*s, 0)).collect();
        let loop_start = StepId::ExperimentalDesign as usize;
        if step as usize > loop_start {
            needed.extend(StepId::ALL[loop_start..step as usize].iter().map(|s| (*s, iteration)));
        }
        needed
    }

    /// Checks everything except the payload contract.
    pub fn check_gate(&self, step: StepId, iteration: u32) -> Result<(), EngineError> {
        if self.is_concluded() {
            return Err(EngineError::Concluded);
        }
        let expected = self.expected_iteration(step);
        if iteration != expected {
            return Err(EngineError::IterationMismatch { step, expected, given: iteration });
        }
        if self.record(step, iteration).is_some() {
            return Err(EngineError::Duplicate { step, iteration });
        }
        if let Some((missing, _)) = Self::prerequisites(step, iteration).into_iter().find(|(s, i)| self.record(*s, *i).is_none()) {
            return Err(EngineError::Gating { step, missing });
        }
        Ok(())
    }

    /// Steps that would pass the gate right now.
    pub fn open_steps(&self) -> Vec<StepId> {
        StepId::ALL.into_iter().filter(|s| self.check_gate(*s, self.expected_iteration(*s)).is_ok()).collect()
    }

    fn input_digest(&self, step: StepId, iteration: u32) -> String {
        let previous = match step {
            StepId::RequirementRecognition => return sha256_hex(&self.problem),
            StepId::ExperimentalDesign if iteration > 0 => self.payload(StepId::ExperimentalAnalysis, iteration - 1),
            _ => {
                let prev = step.previous().expect("not the first step");
                self.payload(prev, self.expected_iteration(prev).min(iteration))
            }
        };
        previous.map(content_digest).unwrap_or_default()
    }

    /// Records a step output after gating and contract checks.
    ///
    /// A retried request id is a no-op and returns no new entries.
    pub fn submit(
        &mut self,
        bundle: &KnowledgeBundle,
        step: StepId,
        iteration: u32,
        payload: StepPayload,
        operator: &str,
        request_id: Option<String>,
    ) -> Result<Vec<JournalEntry>, EngineError> {
        if self.seen(&request_id) {
            return Ok(Vec::new());
        }
        if bundle.domain != self.bundle.domain {
            return Err(EngineError::WrongBundle { expected: self.bundle.domain.clone(), found: bundle.domain.clone() });
        }
        self.check_gate(step, iteration)?;
        if payload.step() != step {
            return Err(EngineError::PayloadMismatch { step, found: payload.step() });
        }
        check_contract(self, bundle, iteration, &payload)?;
        let record = StepRecord {
            step,
            iteration,
            input_digest: self.input_digest(step, iteration),
            payload,
            completed_at: self.now(),
            operator: operator.to_string(),
        };
        Ok(vec![self.push(request_id, Event::StepSubmitted { record })])
    }

    /// Reopens design, implementation and analysis for the next iteration.
    pub fn begin_iteration(&mut self, operator: &str, request_id: Option<String>) -> Result<Vec<JournalEntry>, EngineError> {
        if self.seen(&request_id) {
            return Ok(Vec::new());
        }
        if self.is_concluded() {
            return Err(EngineError::Concluded);
        }
        if self.analysis(self.iteration).is_none() {
            return Err(EngineError::IterationPrecondition(format!(
                "{} of iteration {} is not complete",
                StepId::ExperimentalAnalysis,
                self.iteration
            )));
        }
        let event = Event::IterationBegun { iteration: self.iteration + 1, operator: operator.to_string(), at: self.now() };
        Ok(vec![self.push(request_id, event)])
    }

    /// Appends a free-form log entry.
    pub fn note(
        &mut self,
        step: Option<StepId>,
        action: &str,
        detail: &str,
        attachments: Vec<String>,
        request_id: Option<String>,
    ) -> Result<Vec<JournalEntry>, EngineError> {
        if self.seen(&request_id) {
            return Ok(Vec::new());
        }
        let entry = LogEntry {
            at: self.now(),
            step,
            iteration: self.iteration,
            action: action.to_string(),
            detail: detail.to_string(),
            attachments,
        };
        Ok(vec![self.push(request_id, Event::LogNoted { entry })])
    }

    /// Marks the start of plan execution for the current iteration.
    pub fn start_campaign(&mut self, runs: usize) -> Result<JournalEntry, EngineError> {
        self.check_gate(StepId::ExperimentalImplementation, self.iteration)?;
        let event = Event::CampaignStarted { iteration: self.iteration, runs, at: self.now() };
        Ok(self.push(None, event))
    }

    /// Journals one finished run of the active campaign.
    pub fn complete_run(&mut self, record: RunRecord) -> Result<JournalEntry, EngineError> {
        match &self.campaign {
            Some(c) if c.iteration == self.iteration => {}
            _ => return Err(EngineError::NoCampaign(self.iteration)),
        }
        let event = Event::RunCompleted { iteration: self.iteration, record, at: self.now() };
        Ok(self.push(None, event))
    }

    /// Content digest of the project state.
    pub fn digest(&self) -> String {
        content_digest(self)
    }
}
