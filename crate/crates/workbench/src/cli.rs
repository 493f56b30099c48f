//! Command-line front end. Every subcommand calls the same operations as
//! the matching HTTP endpoint.

use std::ffi::OsString;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use evalbench_core::analysis::{AnalysisRecipe, ChartKind};
use evalbench_core::artefact::{load_bundle, validate_bundle, ArtefactError, KnowledgeBundle};
use evalbench_core::doe::{write_plan_csv, DesignSpec, PowerQuery, RunPlan};
use evalbench_core::engine::StepId;
use evalbench_core::reporting::ReportFormat;
use evalbench_core::runner::AdapterDef;
use evalbench_core::sample;
use serde::Serialize;
use serde_json::Value;

use crate::ops::{
    self, AnalysisQuery, AnalysisView, BoostRequest, ChartSource, ExecuteRequest, NewProject, PowerRequest, TemplateRequest,
    WorkbenchError, DEFAULT_OPERATOR,
};
use crate::Workbench;

#[derive(Debug, Parser)]
#[command(name = "evalbench", version, about = "Structured performance evaluation workbench")]
pub struct Cli {
    /// Knowledge bundle directory or bundle.json; the built-in cloud-services sample when absent.
    #[arg(long, global = true, env = "EVALBENCH_BUNDLE")]
    pub bundle: Option<PathBuf>,
    /// Project store directory.
    #[arg(long, global = true, env = "EVALBENCH_STORE", default_value = "evalbench-store")]
    pub store: PathBuf,
    #[arg(long, global = true, env = "EVALBENCH_SEED")]
    pub seed: Option<u64>,
    #[arg(long, global = true, env = "EVALBENCH_FORMAT", value_enum)]
    pub format: Option<Format>,
    /// Write the result here instead of stdout.
    #[arg(long, short, global = true, env = "EVALBENCH_OUTPUT")]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, env = "EVALBENCH_OPERATOR")]
    pub operator: Option<String>,
    /// Idempotency key for mutating commands.
    #[arg(long, global = true, env = "EVALBENCH_REQUEST_ID")]
    pub request_id: Option<String>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
    Markdown,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Inspect and validate knowledge bundles.
    #[command(subcommand)]
    Bundle(BundleCmd),
    /// Create, advance and compare evaluation projects.
    #[command(subcommand)]
    Project(ProjectCmd),
    /// Run plans and replicate sizing.
    #[command(subcommand)]
    Design(DesignCmd),
    /// Benchmark campaign execution.
    #[command(subcommand)]
    Run(RunCmd),
    /// Statistical analysis of recorded or supplied data.
    #[command(subcommand)]
    Analyze(AnalyzeCmd),
    /// Reports and evaluation templates.
    #[command(subcommand)]
    Report(ReportCmd),
    /// Serve the HTTP interface.
    Serve {
        #[arg(long, env = "EVALBENCH_ADDR", default_value = "127.0.0.1:8080")]
        addr: String,
    },
}

#[derive(Debug, Subcommand)]
pub enum BundleCmd {
    /// Check a bundle's referential integrity and schema.
    Validate { path: Option<PathBuf> },
    Show,
    Taxonomy,
    /// Catalogue entries for a performance feature.
    Metrics { feature: String },
    /// Factor framework candidates.
    Factors {
        #[arg(long = "feature", value_delimiter = ',')]
        features: Vec<String>,
        #[arg(long = "benchmark", value_delimiter = ',')]
        benchmarks: Vec<String>,
        #[arg(long = "metric", value_delimiter = ',')]
        metrics: Vec<String>,
    },
    /// Taxonomy terms found in free text.
    Match { text: String },
}

#[derive(Debug, Subcommand)]
pub enum ProjectCmd {
    New {
        #[arg(long)]
        problem: String,
    },
    List,
    Status { id: String },
    /// Submit a step payload (JSON file, `-` for stdin).
    Submit {
        id: String,
        step: StepId,
        #[arg(long)]
        payload: PathBuf,
        #[arg(long)]
        iteration: Option<u32>,
    },
    /// Show a recorded step.
    Step {
        id: String,
        step: StepId,
        #[arg(long)]
        iteration: Option<u32>,
    },
    /// Reopen design, implementation and analysis for a new iteration.
    Iterate { id: String },
    Compare {
        id: String,
        other: String,
        #[arg(long)]
        tolerance: Option<f64>,
    },
    /// Answers to the requirement questions.
    Answers { id: String },
}

#[derive(Debug, Subcommand)]
pub enum DesignCmd {
    /// Full factorial run plan from a design file or a project's current design.
    Generate {
        #[arg(long, conflicts_with = "project", required_unless_present = "project")]
        spec: Option<PathBuf>,
        #[arg(long)]
        project: Option<String>,
    },
    /// Simulated ANOVA power, or the replicate count reaching `--target`.
    Power(PowerArgs),
}

#[derive(Debug, Args)]
pub struct PowerArgs {
    /// Power query file; the flags below are ignored when given.
    #[arg(long)]
    query: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', required_unless_present = "query")]
    means: Vec<f64>,
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
    #[arg(long, default_value_t = 5)]
    per_group: usize,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    #[arg(long, default_value_t = 10_000)]
    trials: u64,
    #[arg(long)]
    target: Option<f64>,
    #[arg(long)]
    n_max: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum RunCmd {
    /// Execute the current iteration's plan and record the implementation step.
    Execute {
        id: String,
        #[arg(long)]
        adapter: PathBuf,
        #[arg(long)]
        failure_budget: Option<f64>,
        #[arg(long)]
        no_environment: bool,
    },
}

#[derive(Debug, Args)]
pub struct AnalysisSource {
    /// Project whose recorded analysis to read.
    #[arg(long, conflicts_with = "input", required_unless_present = "input")]
    project: Option<String>,
    /// Data file to analyse directly.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    iteration: Option<u32>,
    #[arg(long)]
    metric: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum AnalyzeCmd {
    /// One-way ANOVA (input: sample set).
    Anova(AnalysisSource),
    /// Factorial effects of a recorded analysis.
    Effects(AnalysisSource),
    /// Pareto ranking (input: effect list).
    Pareto(AnalysisSource),
    /// Boosting index (input: alternatives with metric values).
    Boost(AnalysisSource),
    /// Plot data as a chart series (input: sample set, effect list or boosting request).
    Chart {
        #[command(flatten)]
        source: AnalysisSource,
        #[arg(long)]
        kind: Option<ChartKind>,
    },
    /// Analyse a project's recorded runs and submit the analysis step.
    Submit {
        id: String,
        /// Analysis recipe file; defaults to ANOVA, effects, column and Pareto charts.
        #[arg(long)]
        recipe: Option<PathBuf>,
        #[arg(long)]
        iteration: Option<u32>,
    },
}

#[derive(Debug, Subcommand)]
pub enum ReportCmd {
    Generate {
        id: String,
        /// Omit identifiers, timestamps and environment details.
        #[arg(long)]
        content_only: bool,
    },
    #[command(subcommand)]
    Template(TemplateCmd),
}

#[derive(Debug, Subcommand)]
pub enum TemplateCmd {
    /// Capture a project's evaluation of one feature.
    Make {
        id: String,
        #[arg(long)]
        feature: String,
    },
    /// Start a project from a template file or stored template id.
    Apply { template: String },
    List,
}

/// Parses `args` and runs the command. Returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match dispatch(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

enum Doc {
    Json(Value),
    Text(String),
}

fn json<T: Serialize>(value: &T) -> Doc {
    Doc::Json(serde_json::to_value(value).expect("domain values serialise"))
}

fn emit(cli: &Cli, doc: Doc) -> ops::Result<()> {
    let text = match doc {
        Doc::Json(v) => ops::to_pretty(&v),
        Doc::Text(mut t) => {
            if !t.ends_with('\n') {
                t.push('\n');
            }
            t
        }
    };
    match &cli.output {
        Some(path) => std::fs::write(path, text).map_err(|source| WorkbenchError::Io { path: path.display().to_string(), source }),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).and_then(|_| out.flush()).map_err(|source| WorkbenchError::Io { path: "<stdout>".into(), source })
        }
    }
}

fn read_value(path: &Path) -> ops::Result<Value> {
    if path == Path::new("-") {
        let mut text = String::new();
        std::io::stdin().read_to_string(&mut text).map_err(|source| WorkbenchError::Io { path: "<stdin>".into(), source })?;
        return serde_json::from_str(&text).map_err(|e| WorkbenchError::BadRequest(format!("<stdin>: {e}")));
    }
    ops::read_json_file(path)
}

fn read_as<T: serde::de::DeserializeOwned>(what: &str, path: &Path) -> ops::Result<T> {
    ops::parse_json(what, read_value(path)?).map_err(|e| WorkbenchError::BadRequest(format!("{}: {e}", path.display())))
}

fn bundle(cli: &Cli) -> ops::Result<KnowledgeBundle> {
    match &cli.bundle {
        Some(path) => Ok(load_bundle(path)?),
        None => Ok(sample::cloud_bundle()),
    }
}

fn workbench(cli: &Cli) -> ops::Result<Workbench> {
    Workbench::new(bundle(cli)?, &cli.store)
}

fn operator(cli: &Cli) -> String {
    cli.operator.clone().unwrap_or_else(|| std::env::var("USER").unwrap_or_else(|_| DEFAULT_OPERATOR.to_string()))
}

fn dispatch(cli: &Cli) -> ops::Result<()> {
    let doc = match &cli.command {
        Command::Bundle(cmd) => bundle_cmd(cli, cmd)?,
        Command::Project(cmd) => project_cmd(cli, cmd)?,
        Command::Design(cmd) => design_cmd(cli, cmd)?,
        Command::Run(RunCmd::Execute { id, adapter, failure_budget, no_environment }) => {
            let adapter: AdapterDef = read_as("adapter", adapter)?;
            let req = ExecuteRequest { adapter, failure_budget: *failure_budget, capture_environment: Some(!no_environment) };
            let view = workbench(cli)?.execute(id, &req, &operator(cli), cli.request_id.clone())?;
            status_doc(cli, &view)
        }
        Command::Analyze(cmd) => analyze_cmd(cli, cmd)?,
        Command::Report(cmd) => report_cmd(cli, cmd)?,
        Command::Serve { addr } => return serve(cli, addr),
    };
    emit(cli, doc)
}

fn bundle_cmd(cli: &Cli, cmd: &BundleCmd) -> ops::Result<Doc> {
    if let BundleCmd::Validate { path } = cmd {
        let loaded = match path.as_ref().or(cli.bundle.as_ref()) {
            Some(p) => load_bundle(p),
            None => Ok(sample::cloud_bundle()),
        };
        let report = match loaded {
            Ok(b) => validate_bundle(&b),
            Err(ArtefactError::Invalid(report)) => {
                eprint!("{report}");
                return Err(WorkbenchError::BadRequest(format!("bundle is invalid: {} error(s)", report.errors().count())));
            }
            Err(e) => return Err(e.into()),
        };
        return Ok(match cli.format {
            Some(Format::Json) => json(&report),
            _ => Doc::Text(format!("valid ({} warning(s))\n{report}", report.warnings().count())),
        });
    }
    let bench = workbench(cli)?;
    Ok(match cmd {
        BundleCmd::Validate { .. } => unreachable!("handled above"),
        BundleCmd::Show => json(&bench.bundle_summary()),
        BundleCmd::Taxonomy => json(&bench.taxonomy()),
        BundleCmd::Metrics { feature } => json(&bench.metrics(feature)?),
        BundleCmd::Factors { features, benchmarks, metrics } => json(&bench.factors(features, benchmarks, metrics)?),
        BundleCmd::Match { text } => json(&bench.match_terms(text)),
    })
}

fn status_doc(cli: &Cli, view: &ops::ProjectView) -> Doc {
    if cli.format != Some(Format::Text) {
        return json(view);
    }
    let p = &view.project;
    let mut out = format!("project {}\niteration {}\ndigest {}\n", p.id, p.iteration, view.digest);
    for r in &p.records {
        out.push_str(&format!("done  {:>2} {} (iteration {})\n", r.step.number(), r.step, r.iteration));
    }
    for s in &view.open_steps {
        out.push_str(&format!("open  {:>2} {}\n", s.number(), s));
    }
    if view.concluded {
        out.push_str("concluded\n");
    }
    Doc::Text(out)
}

fn project_cmd(cli: &Cli, cmd: &ProjectCmd) -> ops::Result<Doc> {
    let bench = workbench(cli)?;
    let rid = cli.request_id.clone();
    Ok(match cmd {
        ProjectCmd::New { problem } => {
            let req = NewProject { problem: problem.clone(), seed: cli.seed, operator: Some(operator(cli)) };
            status_doc(cli, &bench.create_project(&req, rid)?)
        }
        ProjectCmd::List => json(&bench.list_projects()?),
        ProjectCmd::Status { id } => status_doc(cli, &bench.project(id)?),
        ProjectCmd::Submit { id, step, payload, iteration } => {
            status_doc(cli, &bench.submit(id, *step, *iteration, read_value(payload)?, &operator(cli), rid)?)
        }
        ProjectCmd::Step { id, step, iteration } => json(&bench.step(id, *step, *iteration)?),
        ProjectCmd::Iterate { id } => status_doc(cli, &bench.iterate(id, &operator(cli), rid)?),
        ProjectCmd::Compare { id, other, tolerance } => {
            let report = bench.compare(id, other, *tolerance)?;
            if cli.format == Some(Format::Text) {
                let mut out = format!("overall {:.4} (tolerance {})\n", report.overall, report.tolerance);
                for s in &report.steps {
                    out.push_str(&format!("{:.4}  {} (iteration {})\n", s.score, s.step, s.iteration));
                }
                Doc::Text(out)
            } else {
                json(&report)
            }
        }
        ProjectCmd::Answers { id } => json(&bench.answers(id)?),
    })
}

fn plan_doc(cli: &Cli, plan: &RunPlan) -> ops::Result<Doc> {
    let csv_wanted = match cli.format {
        Some(Format::Csv | Format::Text) => true,
        Some(_) => false,
        None => cli.output.as_ref().is_none_or(|p| p.extension().is_none_or(|x| x != "json")),
    };
    if !csv_wanted {
        return Ok(json(plan));
    }
    let mut buf = Vec::new();
    write_plan_csv(plan, &mut buf).map_err(|e| WorkbenchError::BadRequest(e.to_string()))?;
    Ok(Doc::Text(String::from_utf8(buf).expect("csv output is utf-8")))
}

fn design_cmd(cli: &Cli, cmd: &DesignCmd) -> ops::Result<Doc> {
    match cmd {
        DesignCmd::Generate { spec: Some(path), .. } => {
            let mut spec: DesignSpec = read_as("design", path)?;
            if let Some(seed) = cli.seed {
                spec.seed = seed;
            }
            plan_doc(cli, &ops::plan(&spec)?)
        }
        DesignCmd::Generate { project: Some(id), .. } => {
            let plan = workbench(cli)?.project_design(id, None, &operator(cli), None)?;
            plan_doc(cli, &plan)
        }
        DesignCmd::Generate { .. } => unreachable!("clap requires --spec or --project"),
        DesignCmd::Power(args) => {
            let req = match &args.query {
                Some(path) => {
                    let mut req: PowerRequest = read_as("power query", path)?;
                    if let Some(seed) = cli.seed {
                        req.query.seed = seed;
                    }
                    req
                }
                None => PowerRequest {
                    query: PowerQuery {
                        levels: args.means.len(),
                        per_group: args.per_group,
                        means: args.means.clone(),
                        sigma: args.sigma,
                        alpha: args.alpha,
                        trials: args.trials,
                        seed: cli.seed.unwrap_or(0),
                    },
                    target: args.target,
                    n_max: args.n_max,
                },
            };
            Ok(json(&ops::power(&req)?))
        }
    }
}

fn recorded(cli: &Cli, src: &AnalysisSource, view: AnalysisView, kind: Option<ChartKind>) -> ops::Result<Doc> {
    let id = src.project.as_deref().expect("clap requires --project or --input");
    let query = AnalysisQuery { iteration: src.iteration, metric: src.metric.clone(), kind };
    Ok(Doc::Json(workbench(cli)?.analysis_view(id, view, &query)?))
}

fn analyze_cmd(cli: &Cli, cmd: &AnalyzeCmd) -> ops::Result<Doc> {
    match cmd {
        AnalyzeCmd::Anova(src) => match &src.input {
            Some(path) => Ok(json(&ops::anova(&read_as("sample set", path)?)?)),
            None => recorded(cli, src, AnalysisView::Anova, None),
        },
        AnalyzeCmd::Effects(src) => match &src.input {
            Some(_) => Err(WorkbenchError::BadRequest("effects are computed from a project's runs; use --project".into())),
            None => recorded(cli, src, AnalysisView::Effects, None),
        },
        AnalyzeCmd::Pareto(src) => match &src.input {
            Some(path) => {
                let effects: Vec<_> = read_as("effects", path)?;
                Ok(json(&ops::pareto(&effects)?))
            }
            None => recorded(cli, src, AnalysisView::Pareto, None),
        },
        AnalyzeCmd::Boost(src) => match &src.input {
            Some(path) => {
                let req: BoostRequest = read_as("boosting request", path)?;
                Ok(json(&ops::boost(&req)?))
            }
            None => recorded(cli, src, AnalysisView::Boost, None),
        },
        AnalyzeCmd::Chart { source, kind } => match &source.input {
            Some(path) => {
                let input: ChartSource = read_as("chart input", path)?;
                let kind = kind.unwrap_or(match input {
                    ChartSource::Samples(_) => ChartKind::Column,
                    ChartSource::Effects(_) => ChartKind::Pareto,
                    ChartSource::Boosting(_) => ChartKind::Radar,
                });
                Ok(json(&ops::chart(&input, kind)?))
            }
            None => recorded(cli, source, AnalysisView::Chart, *kind),
        },
        AnalyzeCmd::Submit { id, recipe, iteration } => {
            let recipe: AnalysisRecipe = match recipe {
                Some(path) => read_as("analysis recipe", path)?,
                None => AnalysisRecipe::default(),
            };
            let view = workbench(cli)?.analyse(id, *iteration, &recipe, &operator(cli), cli.request_id.clone())?;
            Ok(status_doc(cli, &view))
        }
    }
}

fn report_cmd(cli: &Cli, cmd: &ReportCmd) -> ops::Result<Doc> {
    let bench = workbench(cli)?;
    Ok(match cmd {
        ReportCmd::Generate { id, content_only } => {
            let format = match cli.format {
                Some(Format::Markdown) => ReportFormat::Markdown,
                Some(Format::Json) => {
                    let text = bench.report(id, ReportFormat::Text, *content_only)?;
                    return Ok(Doc::Json(serde_json::json!({ "format": "text", "content": text })));
                }
                _ => ReportFormat::Text,
            };
            Doc::Text(bench.report(id, format, *content_only)?)
        }
        ReportCmd::Template(TemplateCmd::Make { id, feature }) => {
            json(&bench.make_template(&TemplateRequest { project: id.clone(), feature: feature.clone() })?)
        }
        ReportCmd::Template(TemplateCmd::Apply { template }) => {
            let path = Path::new(template);
            let template = if path.is_file() { ops::read_template(path)? } else { bench.template(template)? };
            let (view, warnings) = bench.apply_template(&template, cli.seed, &operator(cli), cli.request_id.clone())?;
            for w in warnings {
                eprintln!("warning: {w}");
            }
            status_doc(cli, &view)
        }
        ReportCmd::Template(TemplateCmd::List) => json(&bench.templates()?),
    })
}

fn serve(cli: &Cli, addr: &str) -> ops::Result<()> {
    let bench = Arc::new(workbench(cli)?);
    let runtime = tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()
        .map_err(|source| WorkbenchError::Io { path: "<runtime>".into(), source })?;
    runtime
        .block_on(crate::http::serve(bench, addr))
        .map_err(|source| WorkbenchError::Io { path: addr.to_string(), source })
}
