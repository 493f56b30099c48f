//! Step outputs and their contracts.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{EngineError, Project, StepId};
use crate::analysis::{AnalysisRecipe, AnalysisResults};
use crate::artefact::{Direction, ElementKind, KnowledgeBundle};
use crate::doe::{full_factorial, DesignSpec, Factor, FactorKind};
use crate::runner::{AdapterDef, Execution};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QuestionStatus {
    #[default]
    Open,
    Answered,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RequirementQuestion {
    pub id: String,
    pub text: String,
    /// Taxonomy element ids the question is about.
    #[serde(default)]
    pub elements: Vec<String>,
    #[serde(default)]
    pub status: QuestionStatus,
}

/// A candidate metric and the benchmarks able to measure it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateMetric {
    pub name: String,
    #[serde(default)]
    pub unit: String,
    pub direction: Direction,
    #[serde(default)]
    pub benchmarks: Vec<String>,
    /// Taxonomy elements the metric reflects; at least one is an identified feature.
    pub reflects: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ListingPayload {
    pub candidates: Vec<CandidateMetric>,
}

/// A secondary criterion combining several selected metrics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoostingMetric {
    pub name: String,
    pub components: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<BTreeMap<String, f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionPayload {
    pub metrics: Vec<String>,
    #[serde(default)]
    pub benchmarks: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub boosting: Vec<BoostingMetric>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct FactorListingPayload {
    #[serde(default)]
    pub resource: Vec<String>,
    #[serde(default)]
    pub workload: Vec<String>,
    /// Must equal the selected metrics.
    #[serde(default)]
    pub quality: Vec<String>,
}

impl FactorListingPayload {
    pub fn of_kind(&self, kind: FactorKind) -> &[String] {
        match kind {
            FactorKind::Resource => &self.resource,
            FactorKind::Workload => &self.workload,
            FactorKind::Quality => &self.quality,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImplementationPayload {
    pub adapter: AdapterDef,
    pub execution: Execution,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ConclusionPayload {
    #[serde(default)]
    pub findings: Vec<String>,
}

/// Output of one workflow step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum StepPayload {
    RequirementRecognition { questions: Vec<RequirementQuestion> },
    FeatureIdentification { features: Vec<String> },
    MetricsBenchmarksListing(ListingPayload),
    MetricsBenchmarksSelection(SelectionPayload),
    FactorsListing(FactorListingPayload),
    FactorsSelection { factors: Vec<Factor> },
    ExperimentalDesign { design: DesignSpec },
    ExperimentalImplementation(Box<ImplementationPayload>),
    ExperimentalAnalysis { recipe: AnalysisRecipe, results: Box<AnalysisResults> },
    ConclusionDocumentation(ConclusionPayload),
}

impl StepPayload {
    pub fn step(&self) -> StepId {
        match self {
            StepPayload::RequirementRecognition { .. } => StepId::RequirementRecognition,
            StepPayload::FeatureIdentification { .. } => StepId::FeatureIdentification,
            StepPayload::MetricsBenchmarksListing(_) => StepId::MetricsBenchmarksListing,
            StepPayload::MetricsBenchmarksSelection(_) => StepId::MetricsBenchmarksSelection,
            StepPayload::FactorsListing(_) => StepId::FactorsListing,
            StepPayload::FactorsSelection { .. } => StepId::FactorsSelection,
            StepPayload::ExperimentalDesign { .. } => StepId::ExperimentalDesign,
            StepPayload::ExperimentalImplementation(_) => StepId::ExperimentalImplementation,
            StepPayload::ExperimentalAnalysis { .. } => StepId::ExperimentalAnalysis,
            StepPayload::ConclusionDocumentation(_) => StepId::ConclusionDocumentation,
        }
    }
}

fn unique<'a>(step: StepId, what: &str, items: impl IntoIterator<Item = &'a str>) -> Result<BTreeSet<&'a str>, EngineError> {
    let mut seen = BTreeSet::new();
    for item in items {
        if item.trim().is_empty() {
            return Err(contract(step, format!("empty {what}")));
        }
        if !seen.insert(item) {
            return Err(contract(step, format!("{what} `{item}` is listed twice")));
        }
    }
    Ok(seen)
}

fn contract(step: StepId, reason: impl Into<String>) -> EngineError {
    EngineError::Contract { step, reason: reason.into() }
}

/// Checks `payload` against the bundle and the project's earlier outputs.
/// Gating has already passed, so every predecessor payload exists.
pub(crate) fn check_contract(project: &Project, bundle: &KnowledgeBundle, iteration: u32, payload: &StepPayload) -> Result<(), EngineError> {
    let step = payload.step();
    match payload {
        StepPayload::RequirementRecognition { questions } => {
            if questions.is_empty() {
                return Err(contract(step, "at least one requirement question is needed"));
            }
            unique(step, "question id", questions.iter().map(|q| q.id.as_str()))?;
            for q in questions {
                if q.text.trim().is_empty() {
                    return Err(contract(step, format!("question `{}` has no text", q.id)));
                }
                if let Some(e) = q.elements.iter().find(|e| bundle.element(e).is_none()) {
                    return Err(contract(step, format!("question `{}` links unknown taxonomy element `{e}`", q.id)));
                }
            }
        }
        StepPayload::FeatureIdentification { features } => {
            if features.is_empty() {
                return Err(contract(step, "at least one performance feature is needed"));
            }
            for f in unique(step, "feature", features.iter().map(String::as_str))? {
                match bundle.element(f) {
                    Some(e) if e.kind == ElementKind::PerformanceFeature => {}
                    _ => {
                        let hint = bundle.resolve_feature(f).map(|e| format!(" (did you mean `{}`?)", e.id)).unwrap_or_default();
                        return Err(contract(step, format!("`{f}` is not a performance feature id{hint}")));
                    }
                }
            }
        }
        StepPayload::MetricsBenchmarksListing(listing) => {
            if listing.candidates.is_empty() {
                return Err(contract(step, "no candidate metrics listed"));
            }
            unique(step, "candidate metric", listing.candidates.iter().map(|c| c.name.as_str()))?;
            let features: BTreeSet<&str> = project.features().iter().map(String::as_str).collect();
            for c in &listing.candidates {
                if let Some(e) = c.reflects.iter().find(|e| bundle.element(e).is_none()) {
                    return Err(contract(step, format!("metric `{}` reflects unknown element `{e}`", c.name)));
                }
                if !c.reflects.iter().any(|e| features.contains(e.as_str())) {
                    return Err(contract(step, format!("metric `{}` reflects none of the identified features", c.name)));
                }
            }
        }
        StepPayload::MetricsBenchmarksSelection(sel) => {
            let listing = project.listing().expect("gated");
            let metrics = unique(step, "metric", sel.metrics.iter().map(String::as_str))?;
            if metrics.is_empty() {
                return Err(contract(step, "at least one metric must be selected"));
            }
            let candidates: BTreeSet<&str> = listing.candidates.iter().map(|c| c.name.as_str()).collect();
            if let Some(m) = metrics.iter().find(|m| !candidates.contains(*m)) {
                return Err(contract(step, format!("metric `{m}` is not among the listed candidates")));
            }
            let benches: BTreeSet<&str> = listing.candidates.iter().flat_map(|c| c.benchmarks.iter().map(String::as_str)).collect();
            for b in unique(step, "benchmark", sel.benchmarks.iter().map(String::as_str))? {
                if !benches.contains(b) {
                    return Err(contract(step, format!("benchmark `{b}` is not among the listed candidates")));
                }
            }
            for boost in &sel.boosting {
                if boost.components.len() < 2 {
                    return Err(contract(step, format!("boosting metric `{}` needs at least two components", boost.name)));
                }
                if let Some(c) = boost.components.iter().find(|c| !metrics.contains(c.as_str())) {
                    return Err(contract(step, format!("boosting component `{c}` is not a selected metric")));
                }
                if let Some(w) = &boost.weights {
                    if w.values().any(|v| !v.is_finite() || *v < 0.0) {
                        return Err(contract(step, format!("boosting metric `{}` has a negative weight", boost.name)));
                    }
                }
            }
        }
        StepPayload::FactorsListing(listing) => {
            let selected: BTreeSet<&str> = project.selection().expect("gated").metrics.iter().map(String::as_str).collect();
            let quality = unique(step, "quality factor", listing.quality.iter().map(String::as_str))?;
            if quality != selected {
                return Err(contract(step, "quality factors must be exactly the selected metrics"));
            }
            unique(step, "resource factor", listing.resource.iter().map(String::as_str))?;
            unique(step, "workload factor", listing.workload.iter().map(String::as_str))?;
        }
        StepPayload::FactorsSelection { factors } => {
            let listing = project.factor_listing().expect("gated");
            if factors.is_empty() {
                return Err(contract(step, "no factors selected"));
            }
            unique(step, "factor", factors.iter().map(|f| f.name.as_str()))?;
            for f in factors {
                f.validate().map_err(|e| contract(step, e.to_string()))?;
                let listed = listing.of_kind(f.kind);
                let found = listed.iter().any(|l| *l == f.name || f.node.as_deref() == Some(l.as_str()));
                if !found {
                    return Err(contract(step, format!("factor `{}` is not a listed {} factor", f.name, f.kind)));
                }
            }
        }
        StepPayload::ExperimentalDesign { design } => {
            design.validate().map_err(|e| contract(step, e.to_string()))?;
            let selected = project.selected_factors();
            for f in design.factors.iter().chain(design.blocking.as_ref()) {
                let Some(sel) = selected.iter().find(|s| s.name == f.name) else {
                    return Err(contract(step, format!("factor `{}` was not selected", f.name)));
                };
                if sel.kind != f.kind {
                    return Err(contract(step, format!("factor `{}` changed kind from {} to {}", f.name, sel.kind, f.kind)));
                }
                if let Some(l) = f.levels.iter().find(|l| sel.level_index(l).is_none()) {
                    return Err(contract(step, format!("level `{l}` is not a selected level of `{}`", f.name)));
                }
            }
            let metrics: BTreeSet<&str> = project.selection().expect("gated").metrics.iter().map(String::as_str).collect();
            if design.responses.is_empty() {
                return Err(contract(step, "the design names no response metric"));
            }
            if let Some(r) = design.responses.iter().find(|r| !metrics.contains(r.as_str())) {
                return Err(contract(step, format!("response `{r}` is not a selected metric")));
            }
        }
        StepPayload::ExperimentalImplementation(imp) => {
            let design = project.design(iteration).expect("gated");
            let plan = full_factorial(design).map_err(|e| contract(step, e.to_string()))?;
            if imp.execution.plan != plan {
                return Err(contract(step, "run plan differs from the plan generated by the design"));
            }
            imp.adapter.check_against(&plan).map_err(|e| contract(step, e.to_string()))?;
            if imp.execution.adapter != imp.adapter.name {
                return Err(contract(step, "execution was produced by a different adapter"));
            }
            let records = &imp.execution.records;
            if records.len() != plan.len() {
                return Err(contract(step, format!("{} run records for a {}-run plan", records.len(), plan.len())));
            }
            for (rec, spec) in records.iter().zip(&plan.runs) {
                if rec.run != spec.run || rec.combination != spec.combination || rec.replicate != spec.replicate || rec.block != spec.block {
                    return Err(contract(step, format!("record {} does not follow the planned run order", rec.run)));
                }
            }
        }
        StepPayload::ExperimentalAnalysis { recipe, results } => {
            let responses: BTreeSet<&str> = project.design(iteration).expect("gated").responses.iter().map(String::as_str).collect();
            if let Some(m) = recipe.metrics.iter().find(|m| !responses.contains(m.as_str())) {
                return Err(contract(step, format!("recipe metric `{m}` is not a design response")));
            }
            let wanted: BTreeSet<&str> = if recipe.metrics.is_empty() { responses.clone() } else { recipe.metrics.iter().map(String::as_str).collect() };
            let analysed: BTreeSet<&str> = results.metrics.iter().map(|m| m.metric.as_str()).collect();
            if analysed != wanted {
                return Err(contract(step, "analysed metrics differ from the recipe's metrics"));
            }
        }
        StepPayload::ConclusionDocumentation(c) => {
            if c.findings.iter().any(|f| f.trim().is_empty()) {
                return Err(contract(step, "empty finding"));
            }
        }
    }
    Ok(())
}
