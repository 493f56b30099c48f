use std::collections::BTreeSet;
use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use super::RunnerError;
use crate::doe::{RunPlan, RunSpec};

static PLACEHOLDER: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"\{(factor:[^{}]+|run|replicate|block)\}").expect("static pattern"));

fn default_timeout() -> f64 {
    300.0
}

/// External benchmark command with its output extraction rules.
///
/// The command runs under `sh -c` after placeholder substitution:
/// `{factor:NAME}` becomes the run's level for factor `NAME`, `{run}` the
/// 1-based execution position, `{replicate}` the replicate index and
/// `{block}` the block label (empty when unblocked). Substituted values are
/// inserted verbatim.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdapterDef {
    pub name: String,
    pub command: String,
    #[serde(default = "default_timeout")]
    pub timeout_secs: f64,
    pub rules: Vec<ExtractionRule>,
    /// Optional command whose first output line is recorded as the adapter version.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub version_command: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtractionRule {
    pub metric: String,
    pub extract: Extractor,
    #[serde(default)]
    pub unit: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Extractor {
    /// Regular expression; the first capture group (or the whole match when
    /// there is none) of the first match is parsed as a number.
    Pattern(String),
    /// Zero-based field of the first line that has a numeric field there,
    /// optionally restricted to lines starting with `line_prefix`. Fields
    /// split on `delimiter`, or on runs of whitespace when absent.
    Field {
        index: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        delimiter: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        line_prefix: Option<String>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Placeholder {
    Factor(String),
    Run,
    Replicate,
    Block,
}

impl AdapterDef {
    pub fn placeholders(&self) -> Vec<Placeholder> {
        PLACEHOLDER
            .captures_iter(&self.command)
            .map(|c| match &c[1] {
                "run" => Placeholder::Run,
                "replicate" => Placeholder::Replicate,
                "block" => Placeholder::Block,
                other => Placeholder::Factor(other["factor:".len()..].to_string()),
            })
            .collect()
    }

    /// Pre-execution checks against the plan: placeholders name design or
    /// blocking factors, every response metric has exactly one rule, and all
    /// patterns compile.
    pub fn check_against(&self, plan: &RunPlan) -> Result<(), RunnerError> {
        let mut known: BTreeSet<&str> = plan.spec.factors.iter().map(|f| f.name.as_str()).collect();
        if let Some(b) = &plan.spec.blocking {
            known.insert(b.name.as_str());
        }
        for p in self.placeholders() {
            if let Placeholder::Factor(name) = p {
                if !known.contains(name.as_str()) {
                    return Err(RunnerError::UnknownPlaceholder(name));
                }
            }
        }
        for metric in &plan.spec.responses {
            match self.rules.iter().filter(|r| &r.metric == metric).count() {
                0 => return Err(RunnerError::MissingRule(metric.clone())),
                1 => {}
                _ => return Err(RunnerError::DuplicateRule(metric.clone())),
            }
        }
        for rule in &self.rules {
            if let Extractor::Pattern(p) = &rule.extract {
                Regex::new(p).map_err(|e| RunnerError::BadRule { metric: rule.metric.clone(), reason: e.to_string() })?;
            }
        }
        if !(self.timeout_secs > 0.0 && self.timeout_secs.is_finite()) {
            return Err(RunnerError::BadRule { metric: "*".into(), reason: format!("timeout {} must be positive", self.timeout_secs) });
        }
        Ok(())
    }

    /// Command line for one run.
    pub fn render(&self, run: &RunSpec) -> String {
        PLACEHOLDER
            .replace_all(&self.command, |c: &regex::Captures<'_>| match &c[1] {
                "run" => run.run.to_string(),
                "replicate" => run.replicate.to_string(),
                "block" => run.block.clone().unwrap_or_default(),
                other => {
                    // blocking factors are not in the combination; they resolve to the block label
                    let name = &other["factor:".len()..];
                    run.combination.get(name).map(|l| l.to_string()).or_else(|| run.block.clone()).unwrap_or_default()
                }
            })
            .into_owned()
    }
}
