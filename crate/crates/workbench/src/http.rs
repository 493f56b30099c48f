//! HTTP service over the shared operations.
//!
//! Bodies are JSON mirroring the domain types. Mutations honour an
//! `x-request-id` (or `idempotency-key`) header for safe retries and record
//! the `x-operator` header as the acting operator.

use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::{header, HeaderMap, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use evalbench_core::analysis::ChartKind;
use evalbench_core::engine::StepId;
use evalbench_core::reporting::ReportFormat;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::ops::{self, AnalysisQuery, AnalysisView, ErrorClass, WorkbenchError, DEFAULT_OPERATOR};
use crate::Workbench;

type Shared = Arc<Workbench>;

pub struct ApiError {
    status: StatusCode,
    kind: &'static str,
    message: String,
    missing_step: Option<StepId>,
}

impl From<WorkbenchError> for ApiError {
    fn from(e: WorkbenchError) -> Self {
        let (status, kind) = match e.class() {
            ErrorClass::NotFound => (StatusCode::NOT_FOUND, "not-found"),
            ErrorClass::BadRequest => (StatusCode::BAD_REQUEST, "bad-request"),
            ErrorClass::Conflict if e.missing_step().is_some() => (StatusCode::CONFLICT, "gating"),
            ErrorClass::Conflict => (StatusCode::CONFLICT, "conflict"),
            ErrorClass::Invalid => (StatusCode::UNPROCESSABLE_ENTITY, "contract"),
            ErrorClass::Internal => (StatusCode::INTERNAL_SERVER_ERROR, "internal"),
        };
        ApiError { status, kind, message: e.to_string(), missing_step: e.missing_step() }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let mut error = json!({ "status": self.status.as_u16(), "kind": self.kind, "message": self.message });
        if let Some(step) = self.missing_step {
            error["missing_step"] = json!(step);
        }
        (self.status, Json(json!({ "error": error }))).into_response()
    }
}

type ApiResult<T> = Result<T, ApiError>;

async fn blocking<T, F>(f: F) -> ApiResult<T>
where
    F: FnOnce() -> ops::Result<T> + Send + 'static,
    T: Send + 'static,
{
    match tokio::task::spawn_blocking(f).await {
        Ok(result) => result.map_err(ApiError::from),
        Err(e) => Err(ApiError {
            status: StatusCode::INTERNAL_SERVER_ERROR,
            kind: "internal",
            message: e.to_string(),
            missing_step: None,
        }),
    }
}

fn ok<T: serde::Serialize>(value: T) -> Response {
    Json(value).into_response()
}

fn request_id(headers: &HeaderMap) -> Option<String> {
    ["x-request-id", "idempotency-key"]
        .iter()
        .find_map(|h| headers.get(*h).and_then(|v| v.to_str().ok()))
        .map(str::to_string)
}

fn operator(headers: &HeaderMap) -> String {
    headers.get("x-operator").and_then(|v| v.to_str().ok()).unwrap_or(DEFAULT_OPERATOR).to_string()
}

fn body_json(body: &Bytes) -> ApiResult<Value> {
    if body.iter().all(u8::is_ascii_whitespace) {
        return Ok(Value::Object(Default::default()));
    }
    serde_json::from_slice(body).map_err(|e| WorkbenchError::BadRequest(format!("request body is not JSON: {e}")).into())
}

fn body_as<T: serde::de::DeserializeOwned>(what: &str, body: &Bytes) -> ApiResult<T> {
    Ok(ops::parse_json(what, body_json(body)?)?)
}

fn step_id(s: &str) -> ApiResult<StepId> {
    s.parse::<StepId>().map_err(|e| WorkbenchError::NotFound(e.to_string()).into())
}

pub fn router(bench: Shared) -> Router {
    Router::new()
        .route("/bundle", get(bundle_summary))
        .route("/bundle/taxonomy", get(taxonomy))
        .route("/bundle/metrics", get(metrics))
        .route("/bundle/factors", get(factors))
        .route("/bundle/match", get(match_terms))
        .route("/projects", get(list_projects).post(create_project))
        .route("/projects/{id}", get(project))
        .route("/projects/{id}/steps", get(steps))
        .route("/projects/{id}/steps/{step}", get(step).post(submit))
        .route("/projects/{id}/iterations", post(iterate))
        .route("/projects/{id}/design", get(design).post(design))
        .route("/projects/{id}/execute", post(execute))
        .route("/projects/{id}/analysis", get(analysis_all))
        .route("/projects/{id}/analysis/{view}", get(analysis))
        .route("/projects/{id}/answers", get(answers))
        .route("/projects/{id}/report", get(report))
        .route("/projects/{id}/raw/{digest}", get(raw))
        .route("/projects/{id}/compare/{other}", get(compare))
        .route("/templates", get(templates).post(make_template))
        .route("/templates/{tid}", get(template))
        .route("/templates/{tid}/instantiate", post(instantiate))
        .route("/design/plan", post(plan))
        .route("/design/power", post(power))
        .route("/analysis/anova", post(anova))
        .route("/analysis/pareto", post(pareto))
        .route("/analysis/boost", post(boost))
        .route("/analysis/chart", post(chart))
        .fallback(not_found)
        .with_state(bench)
}

async fn not_found() -> ApiError {
    WorkbenchError::NotFound("no such resource".into()).into()
}

async fn bundle_summary(State(b): State<Shared>) -> Response {
    ok(b.bundle_summary())
}

async fn taxonomy(State(b): State<Shared>) -> Response {
    ok(b.taxonomy())
}

#[derive(Deserialize)]
struct FeatureQuery {
    feature: String,
}

async fn metrics(State(b): State<Shared>, Query(q): Query<FeatureQuery>) -> ApiResult<Response> {
    Ok(ok(b.metrics(&q.feature)?))
}

#[derive(Deserialize, Default)]
struct FactorQuery {
    #[serde(default)]
    feature: Option<String>,
    #[serde(default)]
    benchmark: Option<String>,
    #[serde(default)]
    metric: Option<String>,
}

fn list(param: &Option<String>) -> Vec<String> {
    param.as_deref().map(|s| s.split(',').map(str::trim).filter(|s| !s.is_empty()).map(str::to_string).collect()).unwrap_or_default()
}

async fn factors(State(b): State<Shared>, Query(q): Query<FactorQuery>) -> ApiResult<Response> {
    Ok(ok(b.factors(&list(&q.feature), &list(&q.benchmark), &list(&q.metric))?))
}

#[derive(Deserialize)]
struct TextQuery {
    text: String,
}

async fn match_terms(State(b): State<Shared>, Query(q): Query<TextQuery>) -> Response {
    ok(b.match_terms(&q.text))
}

async fn list_projects(State(b): State<Shared>) -> ApiResult<Response> {
    Ok(ok(blocking(move || b.list_projects()).await?))
}

async fn create_project(State(b): State<Shared>, headers: HeaderMap, body: Bytes) -> ApiResult<Response> {
    let mut req: ops::NewProject = body_as("project", &body)?;
    req.operator.get_or_insert_with(|| operator(&headers));
    let rid = request_id(&headers);
    let view = blocking(move || b.create_project(&req, rid)).await?;
    Ok((StatusCode::CREATED, Json(view)).into_response())
}

async fn project(State(b): State<Shared>, Path(id): Path<String>) -> ApiResult<Response> {
    Ok(ok(blocking(move || b.project(&id)).await?))
}

async fn steps(State(b): State<Shared>, Path(id): Path<String>) -> ApiResult<Response> {
    Ok(ok(blocking(move || b.steps(&id)).await?))
}

#[derive(Deserialize, Default)]
struct IterationQuery {
    #[serde(default)]
    iteration: Option<u32>,
}

async fn step(
    State(b): State<Shared>,
    Path((id, step)): Path<(String, String)>,
    Query(q): Query<IterationQuery>,
) -> ApiResult<Response> {
    let step = step_id(&step)?;
    Ok(ok(blocking(move || b.step(&id, step, q.iteration)).await?))
}

async fn submit(
    State(b): State<Shared>,
    Path((id, step)): Path<(String, String)>,
    Query(q): Query<IterationQuery>,
    headers: HeaderMap,
    body: Bytes,
) -> ApiResult<Response> {
    let step = step_id(&step)?;
    let payload = body_json(&body)?;
    let (op, rid) = (operator(&headers), request_id(&headers));
    Ok(ok(blocking(move || b.submit(&id, step, q.iteration, payload, &op, rid)).await?))
}

async fn iterate(State(b): State<Shared>, Path(id): Path<String>, headers: HeaderMap) -> ApiResult<Response> {
    let (op, rid) = (operator(&headers), request_id(&headers));
    Ok(ok(blocking(move || b.iterate(&id, &op, rid)).await?))
}

async fn design(State(b): State<Shared>, Path(id): Path<String>, headers: HeaderMap, body: Bytes) -> ApiResult<Response> {
    let value = body_json(&body)?;
    let spec = match value {
        Value::Object(ref m) if m.is_empty() => None,
        v => Some(ops::parse_json("design", v)?),
    };
    let (op, rid) = (operator(&headers), request_id(&headers));
    Ok(ok(blocking(move || b.project_design(&id, spec, &op, rid)).await?))
}

#[derive(Deserialize, Default)]
struct ExecuteQuery {
    #[serde(default)]
    wait: bool,
}

/// Starts the campaign in the background and answers 202, or runs it to
/// completion when `wait=true`.
async fn execute(
    State(b): State<Shared>,
    Path(id): Path<String>,
    Query(q): Query<ExecuteQuery>,
    headers: HeaderMap,
    body: Bytes,
) -> ApiResult<Response> {
    let req: ops::ExecuteRequest = body_as("execution request", &body)?;
    let (op, rid) = (operator(&headers), request_id(&headers));
    if let Some(r) = rid.clone() {
        let (b2, id2) = (b.clone(), id.clone());
        let view = blocking(move || b2.project(&id2)).await?;
        if view.project.requests.contains(&r) {
            return Ok(ok(view));
        }
    }
    if q.wait {
        return Ok(ok(blocking(move || b.execute(&id, &req, &op, rid)).await?));
    }
    let (b2, id2, req2) = (b.clone(), id.clone(), req.clone());
    let runs = blocking(move || b2.prepare_campaign(&id2, &req2)).await?;
    let claim = b.claim_campaign(&id)?;
    let reply = json!({ "project": id, "status": "started", "runs": runs });
    tokio::task::spawn_blocking(move || {
        if let Err(e) = b.execute_claimed(claim, &req, &op, rid) {
            eprintln!("campaign for project {id} failed: {e}");
        }
    });
    Ok((StatusCode::ACCEPTED, Json(reply)).into_response())
}

#[derive(Deserialize, Default)]
struct AnalysisParams {
    #[serde(default)]
    iteration: Option<u32>,
    #[serde(default)]
    metric: Option<String>,
    #[serde(default)]
    kind: Option<String>,
}

impl AnalysisParams {
    fn query(self) -> ApiResult<AnalysisQuery> {
        let kind = match self.kind {
            Some(k) => Some(k.parse::<ChartKind>().map_err(|e| WorkbenchError::BadRequest(e.to_string()))?),
            None => None,
        };
        Ok(AnalysisQuery { iteration: self.iteration, metric: self.metric, kind })
    }
}

async fn analysis_all(State(b): State<Shared>, Path(id): Path<String>, Query(p): Query<AnalysisParams>) -> ApiResult<Response> {
    let q = p.query()?;
    Ok(ok(blocking(move || b.analysis_view(&id, AnalysisView::All, &q)).await?))
}

async fn analysis(
    State(b): State<Shared>,
    Path((id, view)): Path<(String, String)>,
    Query(p): Query<AnalysisParams>,
) -> ApiResult<Response> {
    let view: AnalysisView = view.parse()?;
    let q = p.query()?;
    Ok(ok(blocking(move || b.analysis_view(&id, view, &q)).await?))
}

async fn answers(State(b): State<Shared>, Path(id): Path<String>) -> ApiResult<Response> {
    Ok(ok(blocking(move || b.answers(&id)).await?))
}

#[derive(Deserialize, Default)]
struct ReportQuery {
    #[serde(default)]
    format: Option<String>,
    #[serde(default)]
    content_only: bool,
}

async fn report(State(b): State<Shared>, Path(id): Path<String>, Query(q): Query<ReportQuery>) -> ApiResult<Response> {
    let format = match q.format.as_deref() {
        Some(f) => f.parse::<ReportFormat>().map_err(|e| ApiError::from(WorkbenchError::Report(e)))?,
        None => ReportFormat::default(),
    };
    let text = blocking(move || b.report(&id, format, q.content_only)).await?;
    let mime = match format {
        ReportFormat::Text => "text/plain; charset=utf-8",
        ReportFormat::Markdown => "text/markdown; charset=utf-8",
    };
    Ok(([(header::CONTENT_TYPE, mime)], text).into_response())
}

async fn raw(State(b): State<Shared>, Path((id, digest)): Path<(String, String)>) -> ApiResult<Response> {
    let text = blocking(move || b.raw_output(&id, &digest)).await?;
    Ok(([(header::CONTENT_TYPE, "text/plain; charset=utf-8")], text).into_response())
}

#[derive(Deserialize, Default)]
struct CompareQuery {
    #[serde(default)]
    tolerance: Option<f64>,
}

async fn compare(
    State(b): State<Shared>,
    Path((id, other)): Path<(String, String)>,
    Query(q): Query<CompareQuery>,
) -> ApiResult<Response> {
    Ok(ok(blocking(move || b.compare(&id, &other, q.tolerance)).await?))
}

async fn templates(State(b): State<Shared>) -> ApiResult<Response> {
    Ok(ok(blocking(move || b.templates()).await?))
}

async fn template(State(b): State<Shared>, Path(tid): Path<String>) -> ApiResult<Response> {
    Ok(ok(blocking(move || b.template(&tid)).await?))
}

async fn make_template(State(b): State<Shared>, body: Bytes) -> ApiResult<Response> {
    let req: ops::TemplateRequest = body_as("template request", &body)?;
    let made = blocking(move || b.make_template(&req)).await?;
    Ok((StatusCode::CREATED, Json(made)).into_response())
}

#[derive(Deserialize, Default)]
struct InstantiateBody {
    #[serde(default)]
    seed: Option<u64>,
}

async fn instantiate(State(b): State<Shared>, Path(tid): Path<String>, headers: HeaderMap, body: Bytes) -> ApiResult<Response> {
    let req: InstantiateBody = body_as("instantiation request", &body)?;
    let (op, rid) = (operator(&headers), request_id(&headers));
    let (view, warnings) = blocking(move || {
        let template = b.template(&tid)?;
        b.apply_template(&template, req.seed, &op, rid)
    })
    .await?;
    let mut body = serde_json::to_value(view).expect("project view serialises");
    body["warnings"] = json!(warnings);
    Ok((StatusCode::CREATED, Json(body)).into_response())
}

async fn plan(body: Bytes) -> ApiResult<Response> {
    let spec = body_as("design", &body)?;
    Ok(ok(blocking(move || ops::plan(&spec)).await?))
}

async fn power(body: Bytes) -> ApiResult<Response> {
    let req = body_as("power query", &body)?;
    Ok(ok(blocking(move || ops::power(&req)).await?))
}

async fn anova(body: Bytes) -> ApiResult<Response> {
    Ok(ok(ops::anova(&body_as("sample set", &body)?)?))
}

async fn pareto(body: Bytes) -> ApiResult<Response> {
    let effects: Vec<_> = body_as("effects", &body)?;
    Ok(ok(ops::pareto(&effects)?))
}

async fn boost(body: Bytes) -> ApiResult<Response> {
    Ok(ok(ops::boost(&body_as("boosting request", &body)?)?))
}

#[derive(Deserialize)]
struct ChartQuery {
    kind: String,
}

async fn chart(Query(q): Query<ChartQuery>, body: Bytes) -> ApiResult<Response> {
    let kind: ChartKind = q.kind.parse().map_err(|e: <ChartKind as std::str::FromStr>::Err| WorkbenchError::BadRequest(e.to_string()))?;
    Ok(ok(ops::chart(&body_as("chart input", &body)?, kind)?))
}

/// Binds `addr`, announces the bound address on stdout and serves until
/// interrupted.
pub async fn serve(bench: Shared, addr: &str) -> std::io::Result<()> {
    use std::io::Write;
    let listener = tokio::net::TcpListener::bind(addr).await?;
    println!("listening on {}", listener.local_addr()?);
    std::io::stdout().flush()?;
    axum::serve(listener, router(bench))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
