use serde::{Deserialize, Serialize};

use super::answers::num;
use super::{answer_questions, ReportError, ReportFormat};
use crate::engine::{Project, StepPayload, StepRecord};
use crate::runner::RunStatus;

/// Rendering switches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ReportOptions {
    /// Leave out ids, timestamps, operators, digests, the environment and the
    /// live log, so reports of repeated evaluations can be compared byte for byte.
    #[serde(default)]
    pub content_only: bool,
}

struct Doc {
    format: ReportFormat,
    out: String,
}

impl Doc {
    fn heading(&mut self, level: usize, text: &str) {
        match self.format {
            ReportFormat::Markdown => self.out.push_str(&format!("{} {text}\n\n", "#".repeat(level))),
            ReportFormat::Text => {
                self.out.push_str(text);
                self.out.push('\n');
                if level <= 2 {
                    let rule = if level == 1 { '=' } else { '-' };
                    self.out.push_str(&rule.to_string().repeat(text.chars().count()));
                    self.out.push('\n');
                }
                self.out.push('\n');
            }
        }
    }

    fn para(&mut self, text: &str) {
        self.out.push_str(text);
        self.out.push_str("\n\n");
    }

    fn bullets<I: IntoIterator<Item = String>>(&mut self, items: I) {
        let mut any = false;
        for item in items {
            self.out.push_str("- ");
            self.out.push_str(&item);
            self.out.push('\n');
            any = true;
        }
        if any {
            self.out.push('\n');
        }
    }
}

fn join(items: &[String]) -> String {
    if items.is_empty() { "none".into() } else { items.join(", ") }
}

fn status_label(status: RunStatus) -> &'static str {
    match status {
        RunStatus::Ok => "ok",
        RunStatus::Failed => "failed",
        RunStatus::Timeout => "timeout",
    }
}

fn section_title(record: &StepRecord) -> String {
    let mut title = format!("Step {}: {}", record.step.number(), record.step.title());
    if record.step.is_iterated() || record.iteration > 0 {
        title.push_str(&format!(" (iteration {})", record.iteration));
    }
    title
}

fn render_payload(doc: &mut Doc, record: &StepRecord, opts: &ReportOptions) {
    match &record.payload {
        StepPayload::RequirementRecognition { questions } => doc.bullets(questions.iter().map(|q| {
            let links = if q.elements.is_empty() { String::new() } else { format!(" (about {})", q.elements.join(", ")) };
            format!("[{}] {}{links}", q.id, q.text.trim())
        })),
        StepPayload::FeatureIdentification { features } => doc.bullets(features.iter().cloned()),
        StepPayload::MetricsBenchmarksListing(l) => doc.bullets(l.candidates.iter().map(|c| {
            let unit = if c.unit.is_empty() { String::new() } else { format!(", {}", c.unit) };
            format!("{} [{}{unit}] reflects {}; benchmarks: {}", c.name, c.direction, c.reflects.join(", "), join(&c.benchmarks))
        })),
        StepPayload::MetricsBenchmarksSelection(s) => {
            let mut items = vec![format!("metrics: {}", join(&s.metrics)), format!("benchmarks: {}", join(&s.benchmarks))];
            items.extend(s.boosting.iter().map(|b| format!("boosting metric {} combines {}", b.name, b.components.join(", "))));
            doc.bullets(items);
        }
        StepPayload::FactorsListing(l) => doc.bullets([
            format!("resource factors: {}", join(&l.resource)),
            format!("workload factors: {}", join(&l.workload)),
            format!("quality factors: {}", join(&l.quality)),
        ]),
        StepPayload::FactorsSelection { factors } => doc.bullets(factors.iter().map(|f| {
            let levels: Vec<String> = f.levels.iter().map(|l| l.to_string()).collect();
            format!("{} ({} factor, {}): {}", f.name, f.kind, f.role, levels.join(", "))
        })),
        StepPayload::ExperimentalDesign { design } => {
            let mut items: Vec<String> = design
                .factors
                .iter()
                .map(|f| format!("factor {}: {}", f.name, f.levels.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(", ")))
                .collect();
            if let Some(b) = &design.blocking {
                items.push(format!("blocking on {}: {}", b.name, b.levels.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(", ")));
            }
            items.push(format!("replicates: {}", design.replicates));
            items.push(format!("runs: {}", design.cell_count() * design.replicates as usize));
            items.push(format!("randomisation seed: {}", design.seed));
            items.push(format!("responses: {}", join(&design.responses)));
            doc.bullets(items);
        }
        StepPayload::ExperimentalImplementation(imp) => {
            doc.para(&format!("Adapter {} ran `{}` for each planned run.", imp.adapter.name, imp.adapter.command));
            if !opts.content_only {
                if let Some(env) = &imp.execution.environment {
                    let mut items = vec![format!("host: {}", env.host), format!("os: {}", env.os), format!("captured: {}", env.captured_at.to_rfc3339())];
                    items.extend(env.hardware.iter().map(|(k, v)| format!("{k}: {v}")));
                    items.extend(env.adapters.iter().map(|(k, v)| format!("adapter {k}: {v}")));
                    doc.bullets(items);
                }
            }
            doc.bullets(imp.execution.records.iter().map(|r| {
                let cell: Vec<String> = r.combination.iter().map(|(k, v)| format!("{k}={v}")).collect();
                let block = r.block.as_ref().map(|b| format!(", block {b}")).unwrap_or_default();
                let values: Vec<String> = r.measurements.iter().map(|(k, m)| format!("{k} = {} {}", num(m.value), m.unit).trim_end().to_string()).collect();
                let mut line = format!("run {} [{}] replicate {}{block}: {}", r.run, cell.join(", "), r.replicate, status_label(r.status));
                if !values.is_empty() {
                    line.push_str(&format!("; {}", values.join(", ")));
                }
                if let Some(f) = &r.failure {
                    line.push_str(&format!("; {f}"));
                }
                if !opts.content_only {
                    line.push_str(&format!(" ({} to {}, output {})", r.started_at.to_rfc3339(), r.finished_at.to_rfc3339(), &r.raw_output_digest[..r.raw_output_digest.len().min(12)]));
                }
                line
            }));
        }
        StepPayload::ExperimentalAnalysis { results, .. } => {
            for m in &results.metrics {
                let mut items = Vec::new();
                if let Some(d) = &m.overall {
                    items.push(format!(
                        "overall: n = {}, mean = {}, sd = {}, min = {}, max = {}, 95% CI [{}, {}]",
                        d.n,
                        num(d.mean),
                        num(d.sd),
                        num(d.min),
                        num(d.max),
                        num(d.ci95[0]),
                        num(d.ci95[1])
                    ));
                }
                for c in &m.cells {
                    items.push(format!("cell {}: n = {}, mean = {}{}", c.cell, c.n, num(c.mean), c.sd.map(|s| format!(", sd = {}", num(s))).unwrap_or_default()));
                }
                for a in &m.anova {
                    match (&a.table, &a.note) {
                        (Some(t), _) => items.push(format!(
                            "ANOVA {}: SS between = {}, SS within = {}, df = ({}, {}), F = {}, p = {}",
                            a.factor,
                            num(t.ss_between),
                            num(t.ss_within),
                            t.df_between,
                            t.df_within,
                            num(t.f),
                            num(t.p_value)
                        )),
                        (None, Some(note)) => items.push(format!("ANOVA {}: {note}", a.factor)),
                        (None, None) => {}
                    }
                }
                if let Some(p) = &m.pareto {
                    for e in &p.entries {
                        items.push(format!("effect {}: {} (cumulative {}%)", e.term, num(e.effect), num(e.cumulative_percent)));
                    }
                    if p.no_dominant_factor {
                        items.push("no dominant factor".into());
                    }
                }
                items.extend(m.notes.iter().map(|n| format!("note: {n}")));
                doc.heading(3, &format!("Metric {}", m.metric));
                doc.bullets(items);
            }
            if let Some(b) = &results.boosting {
                doc.heading(3, "Boosting index");
                doc.bullets(b.alternatives.iter().map(|a| format!("{}: {}", a.alternative, num(a.aggregate))));
            }
            if !results.charts.is_empty() {
                doc.para(&format!("Charts: {}.", results.charts.iter().map(|c| c.id.as_str()).collect::<Vec<_>>().join(", ")));
            }
        }
        StepPayload::ConclusionDocumentation(c) => doc.bullets(c.findings.iter().cloned()),
    }
}

/// Renders a project as a structured document. Equal journals render to
/// byte-identical documents.
pub fn generate_report(project: &Project, format: ReportFormat, opts: &ReportOptions) -> Result<String, ReportError> {
    if project.records.is_empty() {
        return Err(ReportError::NoSteps);
    }
    let mut doc = Doc { format, out: String::new() };
    doc.heading(1, "Performance Evaluation Report");
    let mut meta = vec![format!("domain: {} {}", project.bundle.domain, project.bundle.version)];
    if !opts.content_only {
        meta.insert(0, format!("project: {}", project.id));
        meta.push(format!("created: {}", project.created_at.to_rfc3339()));
        meta.push(format!("seed: {}", project.seed));
        if !project.operator.is_empty() {
            meta.push(format!("operator: {}", project.operator));
        }
    }
    meta.push(format!("iterations: {}", project.iteration + 1));
    doc.bullets(meta);
    doc.para(&format!("Problem: {}", project.problem.trim()));
    if !project.is_concluded() {
        let next = project.open_steps().first().map(|s| format!(" Next step: {}.", s.title())).unwrap_or_default();
        doc.para(&format!("INCOMPLETE: the evaluation has not reached conclusion and documentation.{next}"));
    }

    let mut records: Vec<&StepRecord> = project.records.iter().collect();
    records.sort_by_key(|r| (r.step, r.iteration));
    for record in records {
        doc.heading(2, &section_title(record));
        if !opts.content_only {
            let by = if record.operator.is_empty() { String::new() } else { format!(" by {}", record.operator) };
            doc.para(&format!("Completed {}{by}; input {}.", record.completed_at.to_rfc3339(), &record.input_digest[..record.input_digest.len().min(12)]));
        }
        render_payload(&mut doc, record, opts);
    }

    doc.heading(2, "Conclusions");
    match answer_questions(project) {
        Ok(answers) => doc.bullets(answers.iter().map(|a| match &a.reason {
            None => format!("[{}] {} Evidence: {}.", a.question_id, a.answer, a.evidence.iter().map(|e| e.id.as_str()).collect::<Vec<_>>().join(", ")),
            Some(reason) => format!("[{}] open: {reason}.", a.question_id),
        })),
        Err(e) => doc.para(&format!("Questions cannot be answered yet: {e}.")),
    }
    if let Some(c) = project.conclusion() {
        doc.bullets(c.findings.iter().map(|f| format!("finding: {f}")));
    }

    if !opts.content_only {
        doc.heading(2, "Live log");
        doc.bullets(project.log.iter().map(|l| {
            let step = l.step.map(|s| format!(" {s}")).unwrap_or_default();
            format!("{} [{}{step} #{}] {}", l.at.to_rfc3339(), l.action, l.iteration, l.detail)
        }));
    }
    let mut out = doc.out;
    while out.ends_with("\n\n") {
        out.pop();
    }
    Ok(out)
}

