use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::ReportError;
use crate::analysis::MetricAnalysis;
use crate::engine::{Project, QuestionStatus, StepId};
use crate::runner::RunStatus;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EvidenceKind {
    Run,
    Anova,
    Chart,
}

/// Pointer to an artefact of the project: `run/<iteration>/<run>`,
/// `anova/<metric>/<factor>` or `chart/<metric>/<kind>`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EvidenceRef {
    pub kind: EvidenceKind,
    pub id: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuestionAnswer {
    pub question_id: String,
    pub question: String,
    pub status: QuestionStatus,
    pub answer: String,
    pub evidence: Vec<EvidenceRef>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

pub(crate) fn num(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let s = format!("{x:.4}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".into() } else { s.to_string() }
}

fn summarise(m: &MetricAnalysis) -> String {
    let unit = m.unit.as_deref().filter(|u| !u.is_empty()).map(|u| format!(" {u}")).unwrap_or_default();
    let mut text = match &m.overall {
        Some(d) => format!("{} averaged {}{unit} (sd {}, n = {})", m.metric, num(d.mean), num(d.sd), d.n),
        None => format!("{} has too few successful runs for a summary", m.metric),
    };
    if let Some(top) = m.pareto.as_ref().and_then(|p| if p.no_dominant_factor { None } else { p.entries.first() }) {
        text.push_str(&format!("; the largest effect is {} ({}, {}% of the total)", top.term, num(top.effect), num(top.share * 100.0)));
    } else if let Some((factor, f, p)) = m
        .anova
        .iter()
        .filter_map(|a| a.table.as_ref().map(|t| (a.factor.as_str(), t.f, t.p_value)))
        .min_by(|a, b| a.2.total_cmp(&b.2).then(a.0.cmp(b.0)))
    {
        text.push_str(&format!("; the strongest factor is {factor} (F = {}, p = {})", num(f), num(p)));
    }
    text
}

/// Maps each requirement question to the analysed metrics that reflect the
/// taxonomy elements it links, using the current iteration's analysis.
pub fn answer_questions(project: &Project) -> Result<Vec<QuestionAnswer>, ReportError> {
    let iteration = project.iteration;
    let (_, results) = project.analysis(iteration).ok_or(ReportError::AnalysisIncomplete(iteration))?;
    let implementation = project.implementation(iteration).ok_or(ReportError::AnalysisIncomplete(iteration))?;
    let candidates = project.listing().map(|l| l.candidates.as_slice()).unwrap_or_default();

    let ok_runs: Vec<EvidenceRef> = implementation
        .execution
        .records
        .iter()
        .filter(|r| r.status == RunStatus::Ok)
        .map(|r| EvidenceRef { kind: EvidenceKind::Run, id: format!("run/{iteration}/{}", r.run) })
        .collect();

    let answers = project
        .questions()
        .iter()
        .map(|q| {
            let linked: BTreeSet<&str> = q.elements.iter().map(String::as_str).collect();
            let metrics: Vec<&MetricAnalysis> = results
                .metrics
                .iter()
                .filter(|m| {
                    candidates.iter().any(|c| c.name == m.metric && c.reflects.iter().any(|e| linked.contains(e.as_str())))
                })
                .collect();
            if metrics.is_empty() {
                let reason = if linked.is_empty() {
                    "the question links no taxonomy element".to_string()
                } else {
                    format!("no analysed metric reflects {}", linked.iter().copied().collect::<Vec<_>>().join(", "))
                };
                return QuestionAnswer {
                    question_id: q.id.clone(),
                    question: q.text.clone(),
                    status: QuestionStatus::Open,
                    answer: String::new(),
                    evidence: Vec::new(),
                    reason: Some(reason),
                };
            }
            let mut evidence: BTreeSet<EvidenceRef> = BTreeSet::new();
            for m in &metrics {
                evidence.extend(m.anova.iter().filter(|a| a.table.is_some()).map(|a| EvidenceRef { kind: EvidenceKind::Anova, id: a.id.clone() }));
                evidence.extend(
                    results.charts.iter().filter(|c| c.metric == m.metric).map(|c| EvidenceRef { kind: EvidenceKind::Chart, id: c.id.clone() }),
                );
            }
            evidence.extend(ok_runs.iter().cloned());
            let answer = format!(
                "{} In iteration {iteration}, {}.",
                q.text.trim(),
                metrics.iter().map(|m| summarise(m)).collect::<Vec<_>>().join("; ")
            );
            QuestionAnswer {
                question_id: q.id.clone(),
                question: q.text.clone(),
                status: QuestionStatus::Answered,
                answer,
                evidence: evidence.into_iter().collect(),
                reason: None,
            }
        })
        .collect();
    Ok(answers)
}

/// Whether `evidence` names an artefact recorded in `project`.
pub fn resolve_evidence(project: &Project, evidence: &EvidenceRef) -> bool {
    let parts: Vec<&str> = evidence.id.splitn(3, '/').collect();
    match (evidence.kind, parts.as_slice()) {
        (EvidenceKind::Run, ["run", it, run]) => {
            let (Ok(it), Ok(run)) = (it.parse::<u32>(), run.parse::<usize>()) else { return false };
            project.implementation(it).is_some_and(|i| i.execution.records.iter().any(|r| r.run == run))
        }
        (EvidenceKind::Anova, ["anova", ..]) => project.records.iter().any(|r| match &r.payload {
            crate::engine::StepPayload::ExperimentalAnalysis { results, .. } => {
                results.metrics.iter().any(|m| m.anova.iter().any(|a| a.id == evidence.id && a.table.is_some()))
            }
            _ => false,
        }),
        (EvidenceKind::Chart, ["chart", ..]) => project
            .records
            .iter()
            .filter(|r| r.step == StepId::ExperimentalAnalysis)
            .filter_map(|r| project.analysis(r.iteration))
            .any(|(_, results)| results.charts.iter().any(|c| c.id == evidence.id)),
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::num;

    #[test]
    fn number_formatting() {
        assert_eq!(num(2.0), "2");
        assert_eq!(num(72.727272), "72.7273");
        assert_eq!(num(-0.00001), "0");
        assert_eq!(num(0.5), "0.5");
    }
}
