//! Run-to-run repeatability.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{EngineError, Project, StepId, StepPayload};

/// Default relative tolerance for numeric step outputs.
pub const DEFAULT_TOLERANCE: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepAgreement {
    pub step: StepId,
    pub iteration: u32,
    pub score: f64,
    /// Items present in only one of the projects, or values out of tolerance.
    pub details: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepeatabilityReport {
    pub tolerance: f64,
    pub steps: Vec<StepAgreement>,
    pub overall: f64,
}

/// Scores how closely two concluded projects agree, step by step.
///
/// Set-valued outputs score by Jaccard similarity, the design by exact
/// equality, and run records and analyses by a relative tolerance band on
/// every number. The report does not depend on argument order.
pub fn compare_runs(a: &Project, b: &Project, tolerance: f64) -> Result<RepeatabilityReport, EngineError> {
    for p in [a, b] {
        if !p.is_concluded() {
            return Err(EngineError::Incomplete(format!("project {} has no {}", p.id, StepId::ConclusionDocumentation)));
        }
    }
    if a.bundle.domain != b.bundle.domain {
        return Err(EngineError::DomainMismatch(a.bundle.domain.clone(), b.bundle.domain.clone()));
    }
    let keys: BTreeSet<(StepId, u32)> = a.records.iter().chain(&b.records).map(|r| (r.step, r.iteration)).collect();
    let steps: Vec<StepAgreement> = keys
        .into_iter()
        .map(|(step, iteration)| {
            let (score, details) = match (a.payload(step, iteration), b.payload(step, iteration)) {
                (Some(x), Some(y)) => agreement(x, y, tolerance),
                _ => (0.0, vec![format!("recorded by only one project")]),
            };
            StepAgreement { step, iteration, score, details }
        })
        .collect();
    let overall = if steps.is_empty() { 1.0 } else { steps.iter().map(|s| s.score).sum::<f64>() / steps.len() as f64 };
    Ok(RepeatabilityReport { tolerance, steps, overall })
}

fn jaccard(x: BTreeSet<String>, y: BTreeSet<String>) -> (f64, Vec<String>) {
    let union = x.union(&y).count();
    if union == 0 {
        return (1.0, Vec::new());
    }
    let common = x.intersection(&y).count();
    let details = x.symmetric_difference(&y).map(|d| format!("not shared: {d}")).collect();
    (common as f64 / union as f64, details)
}

fn tagged(tag: &str, items: &[String]) -> Vec<String> {
    items.iter().map(|i| format!("{tag}:{i}")).collect()
}

fn set_view(p: &StepPayload) -> Option<BTreeSet<String>> {
    let set = match p {
        StepPayload::RequirementRecognition { questions } => questions.iter().map(|q| q.text.trim().to_string()).collect(),
        StepPayload::FeatureIdentification { features } => features.iter().cloned().collect(),
        StepPayload::MetricsBenchmarksListing(l) => l
            .candidates
            .iter()
            .flat_map(|c| std::iter::once(format!("metric:{}", c.name)).chain(c.benchmarks.iter().map(move |b| format!("benchmark:{}/{b}", c.name))))
            .collect(),
        StepPayload::MetricsBenchmarksSelection(s) => tagged("metric", &s.metrics)
            .into_iter()
            .chain(tagged("benchmark", &s.benchmarks))
            .chain(s.boosting.iter().map(|b| format!("boosting:{}={}", b.name, b.components.join("+"))))
            .collect(),
        StepPayload::FactorsListing(l) => {
            tagged("resource", &l.resource).into_iter().chain(tagged("workload", &l.workload)).chain(tagged("quality", &l.quality)).collect()
        }
        StepPayload::FactorsSelection { factors } => factors
            .iter()
            .map(|f| format!("{}:{}[{}]", f.kind, f.name, f.levels.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(",")))
            .collect(),
        StepPayload::ConclusionDocumentation(c) => c.findings.iter().map(|f| f.trim().to_string()).collect(),
        _ => return None,
    };
    Some(set)
}

/// Projection of run records onto what a repeated campaign must reproduce.
fn runs_view(p: &StepPayload) -> Value {
    match p {
        StepPayload::ExperimentalImplementation(imp) => Value::Array(
            imp.execution
                .records
                .iter()
                .map(|r| {
                    serde_json::json!({
                        "run": r.run,
                        "combination": r.combination,
                        "status": r.status,
                        "measurements": r.measurements,
                    })
                })
                .collect(),
        ),
        other => serde_json::to_value(other).expect("payload serialises"),
    }
}

fn agreement(x: &StepPayload, y: &StepPayload, tolerance: f64) -> (f64, Vec<String>) {
    if let (Some(sx), Some(sy)) = (set_view(x), set_view(y)) {
        return jaccard(sx, sy);
    }
    match x {
        StepPayload::ExperimentalDesign { .. } => {
            if x == y {
                (1.0, Vec::new())
            } else {
                (0.0, vec!["designs differ".to_string()])
            }
        }
        _ => {
            let mut details = Vec::new();
            json_close(&runs_view(x), &runs_view(y), tolerance, "$", &mut details);
            details.truncate(20);
            (if details.is_empty() { 1.0 } else { 0.0 }, details)
        }
    }
}

fn close(a: f64, b: f64, tolerance: f64) -> bool {
    a == b || (a - b).abs() <= tolerance * a.abs().max(b.abs())
}

/// Structural comparison where numbers match within `tolerance`.
fn json_close(a: &Value, b: &Value, tolerance: f64, path: &str, out: &mut Vec<String>) {
    match (a, b) {
        (Value::Number(x), Value::Number(y)) => {
            let (x, y) = (x.as_f64().unwrap_or(f64::NAN), y.as_f64().unwrap_or(f64::NAN));
            if !close(x, y, tolerance) {
                let (lo, hi) = if x <= y { (x, y) } else { (y, x) };
                out.push(format!("{path}: {lo} vs {hi}"));
            }
        }
        (Value::Array(x), Value::Array(y)) => {
            if x.len() != y.len() {
                out.push(format!("{path}: lengths {} and {}", x.len().min(y.len()), x.len().max(y.len())));
                return;
            }
            for (i, (u, v)) in x.iter().zip(y).enumerate() {
                json_close(u, v, tolerance, &format!("{path}[{i}]"), out);
            }
        }
        (Value::Object(x), Value::Object(y)) => {
            let keys: BTreeSet<&String> = x.keys().chain(y.keys()).collect();
            for k in keys {
                match (x.get(k), y.get(k)) {
                    (Some(u), Some(v)) => json_close(u, v, tolerance, &format!("{path}.{k}"), out),
                    _ => out.push(format!("{path}.{k}: present in one project only")),
                }
            }
        }
        _ if a == b => {}
        _ => out.push(format!("{path}: values differ")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(items: &[&str]) -> BTreeSet<String> {
        items.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn jaccard_oracle() {
        let (score, details) = jaccard(set(&["q1", "q2", "q3"]), set(&["q1", "q2", "q4"]));
        assert_eq!(score, 2.0 / 4.0);
        assert_eq!(details, ["not shared: q3", "not shared: q4"]);
        assert_eq!(jaccard(set(&[]), set(&[])).0, 1.0);
    }

    #[test]
    fn tolerance_band_is_symmetric() {
        let a = serde_json::json!({"x": [100.0, 1.0], "s": "k"});
        let b = serde_json::json!({"x": [104.9, 1.0], "s": "k"});
        let c = serde_json::json!({"x": [106.0, 1.0], "s": "k"});
        let run = |u: &Value, v: &Value| {
            let mut out = Vec::new();
            json_close(u, v, DEFAULT_TOLERANCE, "$", &mut out);
            out
        };
        assert!(run(&a, &b).is_empty());
        assert_eq!(run(&a, &c), run(&c, &a));
        assert_eq!(run(&a, &c).len(), 1);
    }
}
