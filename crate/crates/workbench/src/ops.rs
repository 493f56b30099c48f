//! Domain operations shared by the command line and the HTTP service.

use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use evalbench_core::analysis::{
    anova_oneway, boosting_index, chart_data, pareto_ranking, AnalysisError, AnalysisRecipe, AnalysisResults, AnovaTable,
    BoostingResult, ChartInput, ChartKind, ChartSeries, EffectEstimate, ParetoRanking, SampleSet,
};
use evalbench_core::artefact::{
    ArtefactError, CatalogueEntry, Direction, FactorCandidates, KnowledgeBundle, TaxonomyElement, TermMatch,
};
use evalbench_core::doe::{estimate_replicates, full_factorial, simulate_power, DesignSpec, DoeError, PowerQuery, RunPlan};
use evalbench_core::engine::{
    analysis_payload, compare_runs, EngineError, Project, ProjectStore, RepeatabilityReport, StepId, StepPayload,
    StepRecord, StoreError, DEFAULT_TOLERANCE,
};
use evalbench_core::reporting::{
    answer_questions, generate_report, generate_template, instantiate_template, EvaluationTemplate, QuestionAnswer,
    ReportError, ReportFormat, ReportOptions,
};
use evalbench_core::runner::{AdapterDef, ExecutionOptions, RunnerError, DEFAULT_FAILURE_BUDGET};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

pub const TEMPLATES_DIR: &str = "templates";

#[derive(Debug, Error)]
pub enum WorkbenchError {
    #[error("{0}")]
    NotFound(String),
    #[error("{0}")]
    BadRequest(String),
    #[error("{0}")]
    Busy(String),
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error(transparent)]
    Report(#[from] ReportError),
    #[error(transparent)]
    Artefact(#[from] ArtefactError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error(transparent)]
    Doe(#[from] DoeError),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl From<EngineError> for WorkbenchError {
    fn from(e: EngineError) -> Self {
        WorkbenchError::Store(StoreError::Engine(e))
    }
}

impl From<RunnerError> for WorkbenchError {
    fn from(e: RunnerError) -> Self {
        WorkbenchError::Store(StoreError::Runner(e))
    }
}

/// Coarse outcome class; decides the HTTP status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    NotFound,
    BadRequest,
    Conflict,
    Invalid,
    Internal,
}

fn engine_class(e: &EngineError) -> ErrorClass {
    match e {
        EngineError::Gating { .. }
        | EngineError::Duplicate { .. }
        | EngineError::IterationMismatch { .. }
        | EngineError::Concluded
        | EngineError::IterationPrecondition(_)
        | EngineError::Incomplete(_)
        | EngineError::NoCampaign(_) => ErrorClass::Conflict,
        EngineError::UnknownStep(_) => ErrorClass::NotFound,
        _ => ErrorClass::Invalid,
    }
}

impl WorkbenchError {
    pub fn class(&self) -> ErrorClass {
        match self {
            WorkbenchError::NotFound(_) => ErrorClass::NotFound,
            WorkbenchError::BadRequest(_) => ErrorClass::BadRequest,
            WorkbenchError::Busy(_) => ErrorClass::Conflict,
            WorkbenchError::Store(StoreError::NotFound(_)) => ErrorClass::NotFound,
            WorkbenchError::Store(StoreError::Engine(e)) | WorkbenchError::Report(ReportError::Engine(e)) => engine_class(e),
            WorkbenchError::Store(StoreError::Runner(RunnerError::BudgetExceeded { .. })) => ErrorClass::Conflict,
            WorkbenchError::Store(StoreError::Runner(_)) => ErrorClass::Invalid,
            WorkbenchError::Store(_) | WorkbenchError::Io { .. } => ErrorClass::Internal,
            WorkbenchError::Report(ReportError::NoSteps | ReportError::AnalysisIncomplete(_)) => ErrorClass::Conflict,
            WorkbenchError::Report(_) => ErrorClass::Invalid,
            WorkbenchError::Artefact(ArtefactError::UnknownFeature(_)) => ErrorClass::NotFound,
            WorkbenchError::Artefact(_) => ErrorClass::Invalid,
            WorkbenchError::Analysis(_) | WorkbenchError::Doe(_) => ErrorClass::Invalid,
        }
    }

    /// Step the engine reported as missing, for gating violations.
    pub fn missing_step(&self) -> Option<StepId> {
        match self {
            WorkbenchError::Store(StoreError::Engine(EngineError::Gating { missing, .. })) => Some(*missing),
            _ => None,
        }
    }
}

pub type Result<T, E = WorkbenchError> = std::result::Result<T, E>;

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> WorkbenchError + '_ {
    move |source| WorkbenchError::Io { path: path.display().to_string(), source }
}

pub fn parse_json<T: serde::de::DeserializeOwned>(what: &str, value: Value) -> Result<T> {
    serde_json::from_value(value).map_err(|e| WorkbenchError::BadRequest(format!("invalid {what}: {e}")))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BundleSummary {
    pub schema_version: u32,
    pub domain: String,
    pub version: String,
    pub taxonomy: usize,
    pub catalogue: usize,
    pub factors: usize,
    pub blueprints: usize,
    pub templates: usize,
    pub features: Vec<String>,
}

/// A project together with what clients usually need next.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProjectView {
    pub digest: String,
    pub concluded: bool,
    pub open_steps: Vec<StepId>,
    pub project: Project,
}

impl From<Project> for ProjectView {
    fn from(project: Project) -> Self {
        ProjectView { digest: project.digest(), concluded: project.is_concluded(), open_steps: project.open_steps(), project }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NewProject {
    pub problem: String,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub operator: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExecuteRequest {
    pub adapter: AdapterDef,
    #[serde(default)]
    pub failure_budget: Option<f64>,
    #[serde(default)]
    pub capture_environment: Option<bool>,
}

impl ExecuteRequest {
    pub fn options(&self) -> ExecutionOptions {
        ExecutionOptions {
            capture_environment: self.capture_environment.unwrap_or(true),
            failure_budget: self.failure_budget.unwrap_or(DEFAULT_FAILURE_BUDGET),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PowerRequest {
    #[serde(flatten)]
    pub query: PowerQuery,
    /// When set, search for the smallest group size reaching this power.
    #[serde(default)]
    pub target: Option<f64>,
    #[serde(default)]
    pub n_max: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PowerAnswer {
    pub per_group: usize,
    pub power: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoostRequest {
    pub alternatives: BTreeMap<String, BTreeMap<String, f64>>,
    #[serde(default)]
    pub directions: BTreeMap<String, Direction>,
    #[serde(default)]
    pub weights: Option<BTreeMap<String, f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TemplateRequest {
    pub project: String,
    pub feature: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AnalysisView {
    All,
    Anova,
    Effects,
    Pareto,
    Boost,
    Chart,
}

impl std::str::FromStr for AnalysisView {
    type Err = WorkbenchError;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "" | "all" => AnalysisView::All,
            "anova" => AnalysisView::Anova,
            "effects" => AnalysisView::Effects,
            "pareto" => AnalysisView::Pareto,
            "boost" | "boosting" => AnalysisView::Boost,
            "chart" | "charts" => AnalysisView::Chart,
            other => return Err(WorkbenchError::NotFound(format!("unknown analysis view `{other}`"))),
        })
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct AnalysisQuery {
    #[serde(default)]
    pub iteration: Option<u32>,
    #[serde(default)]
    pub metric: Option<String>,
    #[serde(default)]
    pub kind: Option<ChartKind>,
}

/// Raw inputs accepted by the stateless analysis operations.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ChartSource {
    Samples(SampleSet),
    Effects(Vec<EffectEstimate>),
    Boosting(BoostRequest),
}

pub struct Workbench {
    bundle: KnowledgeBundle,
    store: ProjectStore,
    campaigns: Arc<Mutex<HashSet<String>>>,
}

impl Workbench {
    pub fn new(bundle: KnowledgeBundle, store_root: impl Into<PathBuf>) -> Result<Self> {
        Ok(Workbench { bundle, store: ProjectStore::open(store_root)?, campaigns: Arc::default() })
    }

    pub fn bundle(&self) -> &KnowledgeBundle {
        &self.bundle
    }

    pub fn store(&self) -> &ProjectStore {
        &self.store
    }

    pub fn bundle_summary(&self) -> BundleSummary {
        let b = &self.bundle;
        BundleSummary {
            schema_version: b.schema_version,
            domain: b.domain.clone(),
            version: b.version.clone(),
            taxonomy: b.taxonomy.len(),
            catalogue: b.catalogue.len(),
            factors: b.factors.len(),
            blueprints: b.blueprints.len(),
            templates: b.templates.len(),
            features: b
                .taxonomy
                .iter()
                .filter(|e| e.kind == evalbench_core::artefact::ElementKind::PerformanceFeature)
                .map(|e| e.id.clone())
                .collect(),
        }
    }

    pub fn taxonomy(&self) -> &[TaxonomyElement] {
        &self.bundle.taxonomy
    }

    pub fn metrics(&self, feature: &str) -> Result<Vec<CatalogueEntry>> {
        Ok(self.bundle.lookup_metrics(feature)?.into_iter().cloned().collect())
    }

    pub fn factors(&self, features: &[String], benchmarks: &[String], metrics: &[String]) -> Result<FactorCandidates> {
        fn refs(v: &[String]) -> Vec<&str> {
            v.iter().map(String::as_str).collect()
        }
        Ok(self.bundle.lookup_factors(&refs(features), &refs(benchmarks), &refs(metrics))?)
    }

    pub fn match_terms(&self, text: &str) -> Vec<TermMatch> {
        self.bundle.match_taxonomy_terms(text)
    }

    pub fn create_project(&self, req: &NewProject, request_id: Option<String>) -> Result<ProjectView> {
        let seed = req.seed.unwrap_or_else(rand_seed);
        let operator = req.operator.as_deref().unwrap_or(DEFAULT_OPERATOR);
        Ok(self.store.create(&self.bundle, &req.problem, seed, operator, request_id)?.into())
    }

    pub fn list_projects(&self) -> Result<Vec<String>> {
        Ok(self.store.list()?)
    }

    pub fn project(&self, id: &str) -> Result<ProjectView> {
        Ok(self.store.load(id)?.into())
    }

    pub fn steps(&self, id: &str) -> Result<Vec<StepRecord>> {
        Ok(self.store.load(id)?.records)
    }

    pub fn step(&self, id: &str, step: StepId, iteration: Option<u32>) -> Result<StepRecord> {
        let project = self.store.load(id)?;
        let it = iteration.unwrap_or_else(|| project.expected_iteration(step));
        project
            .record(step, it)
            .cloned()
            .ok_or_else(|| WorkbenchError::NotFound(format!("{step} has no record for iteration {it}")))
    }

    /// Submits a step payload. A body without a `type` tag is read as the
    /// payload of `step`. An analysis body without `results` is computed
    /// from the recorded runs; an implementation body without `execution`
    /// runs the campaign first.
    pub fn submit(
        &self,
        id: &str,
        step: StepId,
        iteration: Option<u32>,
        mut body: Value,
        operator: &str,
        request_id: Option<String>,
    ) -> Result<ProjectView> {
        let Value::Object(map) = &mut body else {
            return Err(WorkbenchError::BadRequest("step payload must be a JSON object".into()));
        };
        map.entry("type").or_insert_with(|| Value::String(step.slug().to_string()));
        match step {
            StepId::ExperimentalImplementation if !map.contains_key("execution") => {
                let req: ExecuteRequest = parse_json("execution request", body)?;
                return self.execute(id, &req, operator, request_id);
            }
            StepId::ExperimentalAnalysis if !map.contains_key("results") => {
                let recipe: AnalysisRecipe = match map.remove("recipe") {
                    Some(v) => parse_json("analysis recipe", v)?,
                    None => AnalysisRecipe::default(),
                };
                return self.analyse(id, iteration, &recipe, operator, request_id);
            }
            _ => {}
        }
        let payload: StepPayload = parse_json("step payload", body)?;
        Ok(self.store.submit(&self.bundle, id, step, iteration, payload, operator, request_id)?.into())
    }

    pub fn analyse(
        &self,
        id: &str,
        iteration: Option<u32>,
        recipe: &AnalysisRecipe,
        operator: &str,
        request_id: Option<String>,
    ) -> Result<ProjectView> {
        let project = self.store.update(id, |p| {
            if request_id.as_ref().is_some_and(|r| p.requests.contains(r)) {
                return Ok(Vec::new());
            }
            let it = iteration.unwrap_or_else(|| p.expected_iteration(StepId::ExperimentalAnalysis));
            p.check_gate(StepId::ExperimentalAnalysis, it)?;
            let payload = analysis_payload(p, it, recipe)?;
            p.submit(&self.bundle, StepId::ExperimentalAnalysis, it, payload, operator, request_id)
        })?;
        Ok(project.into())
    }

    pub fn iterate(&self, id: &str, operator: &str, request_id: Option<String>) -> Result<ProjectView> {
        Ok(self.store.begin_iteration(id, operator, request_id)?.into())
    }

    /// Optionally submits `spec` as the current design, then returns the
    /// current design's run plan.
    pub fn project_design(
        &self,
        id: &str,
        spec: Option<DesignSpec>,
        operator: &str,
        request_id: Option<String>,
    ) -> Result<RunPlan> {
        let project = match spec {
            Some(design) => self.store.submit(
                &self.bundle,
                id,
                StepId::ExperimentalDesign,
                None,
                StepPayload::ExperimentalDesign { design },
                operator,
                request_id,
            )?,
            None => self.store.load(id)?,
        };
        let design = project
            .design(project.iteration)
            .ok_or_else(|| WorkbenchError::NotFound(format!("no experimental design for iteration {}", project.iteration)))?;
        Ok(full_factorial(design)?)
    }

    /// Checks that a campaign could start now, returning its run count.
    pub fn prepare_campaign(&self, id: &str, req: &ExecuteRequest) -> Result<usize> {
        let project = self.store.load(id)?;
        project.check_gate(StepId::ExperimentalImplementation, project.iteration)?;
        let design = project.design(project.iteration).expect("design precedes implementation");
        let plan = full_factorial(design)?;
        req.adapter.check_against(&plan)?;
        Ok(plan.len())
    }

    /// Runs the current iteration's campaign to completion.
    pub fn execute(&self, id: &str, req: &ExecuteRequest, operator: &str, request_id: Option<String>) -> Result<ProjectView> {
        let claim = self.claim_campaign(id)?;
        self.execute_claimed(claim, req, operator, request_id)
    }

    /// Runs the campaign reserved by `claim`, releasing it afterwards.
    pub fn execute_claimed(
        &self,
        claim: CampaignClaim,
        req: &ExecuteRequest,
        operator: &str,
        request_id: Option<String>,
    ) -> Result<ProjectView> {
        let project = self.store.run_campaign(&self.bundle, &claim.id, &req.adapter, &req.options(), operator, request_id);
        drop(claim);
        Ok(project?.into())
    }

    /// Reserves the campaign slot of `id` until the claim drops.
    pub fn claim_campaign(&self, id: &str) -> Result<CampaignClaim> {
        let mut running = self.campaigns.lock().expect("campaign set poisoned");
        if !running.insert(id.to_string()) {
            return Err(WorkbenchError::Busy(format!("a campaign for project {id} is already running")));
        }
        Ok(CampaignClaim { running: Arc::clone(&self.campaigns), id: id.to_string() })
    }

    pub fn campaign_running(&self, id: &str) -> bool {
        self.campaigns.lock().expect("campaign set poisoned").contains(id)
    }

    fn results(&self, id: &str, iteration: Option<u32>) -> Result<(u32, AnalysisResults)> {
        let project = self.store.load(id)?;
        let it = match iteration {
            Some(it) => it,
            None => project
                .last_analysed_iteration()
                .ok_or_else(|| WorkbenchError::NotFound(format!("project {id} has no experimental analysis yet")))?,
        };
        let (_, results) = project
            .analysis(it)
            .ok_or_else(|| WorkbenchError::NotFound(format!("no experimental analysis for iteration {it}")))?;
        Ok((it, results.clone()))
    }

    /// A slice of a recorded analysis, optionally restricted to one metric.
    pub fn analysis_view(&self, id: &str, view: AnalysisView, query: &AnalysisQuery) -> Result<Value> {
        let (iteration, results) = self.results(id, query.iteration)?;
        if let Some(m) = &query.metric {
            if results.metric(m).is_none() {
                return Err(WorkbenchError::NotFound(format!("metric `{m}` was not analysed in iteration {iteration}")));
            }
        }
        let wanted = |name: &str| query.metric.as_deref().is_none_or(|m| m == name);
        let per_metric = |f: &dyn Fn(&evalbench_core::analysis::MetricAnalysis) -> Value| -> Value {
            results
                .metrics
                .iter()
                .filter(|m| wanted(&m.metric))
                .map(|m| serde_json::json!({ "metric": m.metric, "result": f(m) }))
                .collect()
        };
        let body = match view {
            AnalysisView::All => serde_json::to_value(&results).expect("results serialise"),
            AnalysisView::Anova => per_metric(&|m| serde_json::to_value(&m.anova).expect("anova serialises")),
            AnalysisView::Effects => per_metric(&|m| serde_json::to_value(&m.effects).expect("effects serialise")),
            AnalysisView::Pareto => per_metric(&|m| serde_json::to_value(&m.pareto).expect("pareto serialises")),
            AnalysisView::Boost => match &results.boosting {
                Some(b) => serde_json::to_value(b).expect("boosting serialises"),
                None => return Err(WorkbenchError::NotFound(format!("iteration {iteration} has no boosting result"))),
            },
            AnalysisView::Chart => {
                let charts: Vec<_> = results
                    .charts
                    .iter()
                    .filter(|c| wanted(&c.metric) && query.kind.is_none_or(|k| c.chart.kind == k))
                    .collect();
                serde_json::to_value(charts).expect("charts serialise")
            }
        };
        Ok(serde_json::json!({ "project": id, "iteration": iteration, "view": body }))
    }

    pub fn answers(&self, id: &str) -> Result<Vec<QuestionAnswer>> {
        Ok(answer_questions(&self.store.load(id)?)?)
    }

    pub fn report(&self, id: &str, format: ReportFormat, content_only: bool) -> Result<String> {
        let project = self.store.load(id)?;
        Ok(generate_report(&project, format, &ReportOptions { content_only })?)
    }

    pub fn raw_output(&self, id: &str, digest: &str) -> Result<String> {
        self.store.load(id)?;
        self.store.raw_output(id, digest).ok_or_else(|| WorkbenchError::NotFound(format!("no raw output {digest}")))
    }

    pub fn compare(&self, a: &str, b: &str, tolerance: Option<f64>) -> Result<RepeatabilityReport> {
        let pa = self.store.load(a)?;
        let pb = self.store.load(b)?;
        Ok(compare_runs(&pa, &pb, tolerance.unwrap_or(DEFAULT_TOLERANCE))?)
    }

    fn templates_dir(&self) -> PathBuf {
        self.store.root().join(TEMPLATES_DIR)
    }

    /// Bundle templates followed by templates generated into the store.
    pub fn templates(&self) -> Result<Vec<EvaluationTemplate>> {
        let mut out = self.bundle.templates.clone();
        let dir = self.templates_dir();
        if dir.is_dir() {
            let mut paths: Vec<PathBuf> = fs::read_dir(&dir)
                .map_err(io_err(&dir))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|x| x == "json"))
                .collect();
            paths.sort();
            for path in paths {
                let template = read_template(&path)?;
                if !out.iter().any(|t| t.id == template.id) {
                    out.push(template);
                }
            }
        }
        Ok(out)
    }

    pub fn template(&self, id: &str) -> Result<EvaluationTemplate> {
        self.templates()?
            .into_iter()
            .find(|t| t.id == id)
            .ok_or_else(|| WorkbenchError::NotFound(format!("unknown template `{id}`")))
    }

    /// Generates a template from `project` and keeps a copy in the store.
    pub fn make_template(&self, req: &TemplateRequest) -> Result<EvaluationTemplate> {
        let project = self.store.load(&req.project)?;
        let template = generate_template(&project, &req.feature)?;
        let dir = self.templates_dir();
        fs::create_dir_all(&dir).map_err(io_err(&dir))?;
        let path = dir.join(format!("{}.json", template.id));
        fs::write(&path, to_pretty(&template)).map_err(io_err(&path))?;
        Ok(template)
    }

    pub fn apply_template(
        &self,
        template: &EvaluationTemplate,
        seed: Option<u64>,
        operator: &str,
        request_id: Option<String>,
    ) -> Result<(ProjectView, Vec<String>)> {
        if let Some(id) = request_id.as_deref().and_then(|r| self.store.recall_request(r)) {
            return Ok((self.project(&id)?, Vec::new()));
        }
        let made = instantiate_template(template, &self.bundle, seed, operator)?;
        let project = self.store.insert(&made.entries)?;
        if let Some(r) = &request_id {
            self.store.remember_request(r, &project.id)?;
        }
        Ok((project.into(), made.warnings))
    }
}

pub struct CampaignClaim {
    running: Arc<Mutex<HashSet<String>>>,
    id: String,
}

impl Drop for CampaignClaim {
    fn drop(&mut self) {
        if let Ok(mut running) = self.running.lock() {
            running.remove(&self.id);
        }
    }
}

pub const DEFAULT_OPERATOR: &str = "anonymous";

fn rand_seed() -> u64 {
    use std::time::{SystemTime, UNIX_EPOCH};
    let nanos = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_nanos()).unwrap_or_default();
    evalbench_core::doe::SplitMix64::new(nanos as u64 ^ std::process::id() as u64).next_u64()
}

pub fn to_pretty<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("domain values serialise");
    text.push('\n');
    text
}

pub fn read_template(path: &Path) -> Result<EvaluationTemplate> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    serde_json::from_str(&text).map_err(|e| WorkbenchError::BadRequest(format!("{}: {e}", path.display())))
}

pub fn read_json_file(path: &Path) -> Result<Value> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    serde_json::from_str(&text).map_err(|e| WorkbenchError::BadRequest(format!("{}: {e}", path.display())))
}

pub fn plan(spec: &DesignSpec) -> Result<RunPlan> {
    Ok(full_factorial(spec)?)
}

pub fn power(req: &PowerRequest) -> Result<PowerAnswer> {
    match req.target {
        Some(target) => {
            let est = estimate_replicates(&req.query, target, req.n_max.unwrap_or(100))?;
            Ok(PowerAnswer { per_group: est.per_group, power: est.power, target: Some(target) })
        }
        None => Ok(PowerAnswer { per_group: req.query.per_group, power: simulate_power(&req.query)?, target: None }),
    }
}

pub fn anova(samples: &SampleSet) -> Result<AnovaTable> {
    Ok(anova_oneway(samples)?)
}

pub fn pareto(effects: &[EffectEstimate]) -> Result<ParetoRanking> {
    Ok(pareto_ranking(effects)?)
}

pub fn boost(req: &BoostRequest) -> Result<BoostingResult> {
    Ok(boosting_index(&req.alternatives, &req.directions, req.weights.as_ref())?)
}

pub fn chart(source: &ChartSource, kind: ChartKind) -> Result<ChartSeries> {
    let input = match source {
        ChartSource::Samples(s) => ChartInput::Samples(s),
        ChartSource::Effects(e) => ChartInput::Effects(e),
        ChartSource::Boosting(req) => return Ok(chart_data(ChartInput::Boosting(&boost(req)?), kind)?),
    };
    Ok(chart_data(input, kind)?)
}
