use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::ReportError;
use crate::analysis::AnalysisRecipe;
use crate::artefact::{BundleRef, KnowledgeBundle};
use crate::digest::content_digest;
use crate::doe::{full_factorial, DesignSpec};
use crate::engine::{JournalEntry, Project, StepId, StepPayload};
use crate::runner::AdapterDef;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreExperimental {
    pub bundle: BundleRef,
    /// Operating system, hardware and adapter versions of the source campaign.
    #[serde(default)]
    pub environment: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub project_id: String,
    pub iteration: u32,
    pub design_digest: String,
    pub plan_digest: String,
    pub records_digest: String,
    pub results_digest: String,
    /// Digests of the archived raw outputs, in run order.
    #[serde(default)]
    pub raw_outputs: Vec<String>,
}

/// Everything needed to repeat one feature's evaluation without the source
/// project. Raw results are referenced by digest only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationTemplate {
    pub schema_version: u32,
    pub id: String,
    pub feature_id: String,
    pub pre_experimental: PreExperimental,
    pub instructions: String,
    pub problem: String,
    /// Outputs of steps one to six, in step order.
    pub selections: Vec<StepPayload>,
    pub design: DesignSpec,
    pub adapter: AdapterDef,
    pub analysis_recipe: AnalysisRecipe,
    pub provenance: Provenance,
}

impl EvaluationTemplate {
    /// Digest over the template content, id excluded.
    pub fn content_digest(&self) -> String {
        let mut copy = self.clone();
        copy.id = String::new();
        content_digest(&copy)
    }
}

/// Captures the latest analysed iteration of `project` as a template for
/// `feature_id`.
pub fn generate_template(project: &Project, feature_id: &str) -> Result<EvaluationTemplate, ReportError> {
    if !project.features().iter().any(|f| f == feature_id) {
        return Err(ReportError::FeatureNotEvaluated(feature_id.to_string()));
    }
    let iteration = project.last_analysed_iteration().ok_or(ReportError::AnalysisIncomplete(project.iteration))?;
    let design = project.design(iteration).expect("analysis implies design").clone();
    let implementation = project.implementation(iteration).expect("analysis implies implementation");
    let (recipe, results) = project.analysis(iteration).expect("analysed");

    let reflects = |metric: &str| {
        project.listing().is_some_and(|l| l.candidates.iter().any(|c| c.name == metric && c.reflects.iter().any(|r| r == feature_id)))
    };
    if !design.responses.iter().any(|r| reflects(r)) {
        return Err(ReportError::FeatureNotEvaluated(feature_id.to_string()));
    }

    let mut environment = BTreeMap::new();
    if let Some(env) = &implementation.execution.environment {
        environment.insert("os".to_string(), env.os.clone());
        environment.extend(env.hardware.iter().map(|(k, v)| (format!("hardware.{k}"), v.clone())));
        environment.extend(env.adapters.iter().map(|(k, v)| (format!("adapter.{k}"), v.clone())));
    }

    let selections: Vec<StepPayload> = StepId::ALL[..6].iter().filter_map(|s| project.payload(*s, 0).cloned()).collect();
    let plan = full_factorial(&design).expect("recorded design is valid");
    let adapter = implementation.adapter.clone();
    let instructions = format!(
        "Execute the {} planned runs strictly in plan order with adapter {} (`{}`), timeout {} s per run. \
         Extract {} from each run's output. Analyse with{} one-way ANOVA per factor and{} two-level effects, charts: {}.",
        plan.len(),
        adapter.name,
        adapter.command,
        adapter.timeout_secs,
        adapter.rules.iter().map(|r| r.metric.as_str()).collect::<Vec<_>>().join(", "),
        if recipe.anova { "" } else { "out" },
        if recipe.effects { "" } else { " without" },
        recipe.charts.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(", ")
    );

    let records = &implementation.execution.records;
    let mut template = EvaluationTemplate {
        schema_version: crate::SCHEMA_VERSION,
        id: String::new(),
        feature_id: feature_id.to_string(),
        pre_experimental: PreExperimental { bundle: project.bundle.clone(), environment },
        instructions,
        problem: project.problem.clone(),
        selections,
        design: design.clone(),
        adapter,
        analysis_recipe: recipe.clone(),
        provenance: Provenance {
            project_id: project.id.clone(),
            iteration,
            design_digest: content_digest(&design),
            plan_digest: content_digest(&plan),
            records_digest: content_digest(records),
            results_digest: content_digest(results),
            raw_outputs: records.iter().map(|r| r.raw_output_digest.clone()).collect(),
        },
    };
    template.id = format!("{feature_id}-{}", &template.content_digest()[..12]);
    Ok(template)
}

/// A project rebuilt from a template, ready for implementation.
#[derive(Debug, Clone)]
pub struct Instantiation {
    pub project: Project,
    /// Journal entries that recreate the project.
    pub entries: Vec<JournalEntry>,
    pub warnings: Vec<String>,
}

/// Creates a project whose steps one to seven replay the template. The
/// bundle domain must match; a different bundle version only warns.
pub fn instantiate_template(
    template: &EvaluationTemplate,
    bundle: &KnowledgeBundle,
    seed: Option<u64>,
    operator: &str,
) -> Result<Instantiation, ReportError> {
    let origin = &template.pre_experimental.bundle;
    if origin.domain != bundle.domain {
        return Err(ReportError::DomainMismatch { template: origin.domain.clone(), bundle: bundle.domain.clone() });
    }
    let mut warnings = Vec::new();
    if origin.version != bundle.version {
        warnings.push(format!("template was built against {} {}, bundle is {}", origin.domain, origin.version, bundle.version));
    }
    let seed = seed.unwrap_or_else(rand::random);
    let (mut project, first) = Project::create(bundle, &template.problem, seed, operator, None)?;
    let mut entries = vec![first];
    for payload in &template.selections {
        entries.extend(project.submit(bundle, payload.step(), 0, payload.clone(), operator, None)?);
    }
    let design = StepPayload::ExperimentalDesign { design: template.design.clone() };
    entries.extend(project.submit(bundle, StepId::ExperimentalDesign, 0, design, operator, None)?);
    entries.extend(project.note(
        Some(StepId::ExperimentalDesign),
        "template",
        &format!("instantiated from template {}", template.id),
        vec![template.content_digest()],
        None,
    )?);
    Ok(Instantiation { project, entries, warnings })
}
