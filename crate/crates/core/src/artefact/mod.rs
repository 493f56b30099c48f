//! Domain knowledge bundles: taxonomy, metrics catalogue, experimental
//! factor framework, experiment blueprints and evaluation templates.
//!
//! A bundle is a directory:
//!
//! ```text
//! bundle.json        {"schema_version": 1, "domain": "...", "version": "..."}
//! taxonomy.json      [TaxonomyElement, ...]
//! catalogue.json     [CatalogueEntry, ...]
//! factors.json       [FactorNode, ...]
//! blueprints.json    [Blueprint, ...]
//! templates/*.json   one EvaluationTemplate per file, loaded in file-name order
//! ```
//!
//! Missing list files are treated as empty. Bundles are validated on load and
//! immutable afterwards.

mod io;
mod lookup;
mod validate;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::reporting::EvaluationTemplate;

pub use io::{load_bundle, save_bundle, BUNDLE_FILE};
pub use lookup::{FactorCandidates, TermMatch};
pub use validate::{validate_bundle, IssueCode, Severity, ValidationIssue, ValidationReport};

#[derive(Debug, Error)]
pub enum ArtefactError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("cannot parse {path}: {source}")]
    Parse { path: String, source: serde_json::Error },
    #[error("bundle is invalid:\n{0}")]
    Invalid(ValidationReport),
    #[error("unknown performance feature `{0}`")]
    UnknownFeature(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ElementKind {
    PerformanceFeature,
    SetupScene,
    PhysicalProperty,
    Capacity,
}

/// A standardised evaluation concept.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaxonomyElement {
    pub id: String,
    pub kind: ElementKind,
    pub name: String,
    #[serde(default)]
    pub definition: String,
    /// Whole-part parent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parent: Option<String>,
    #[serde(default)]
    pub keywords: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    HigherBetter,
    LowerBetter,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::HigherBetter => "higher-better",
            Direction::LowerBetter => "lower-better",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metric {
    pub name: String,
    #[serde(default)]
    pub unit: String,
    pub direction: Direction,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkDescriptor {
    pub name: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub source: String,
}

/// One metric for a performance feature, with the benchmarks that measure it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CatalogueEntry {
    pub feature_id: String,
    pub metric: Metric,
    #[serde(default)]
    pub benchmarks: Vec<BenchmarkDescriptor>,
    /// Set when no benchmark is known for the metric.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub metric_only: bool,
}

/// Experimental factor kinds, re-used from the design module.
pub use crate::doe::FactorKind;

/// Admissible workload sub-kinds.
pub const WORKLOAD_SUB_KINDS: [&str; 3] = ["terminal", "activity", "object"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "type")]
pub enum ValueDomain {
    Nominal { levels: Vec<String> },
    Ordinal { levels: Vec<String> },
    NumericRange {
        min: f64,
        max: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        unit: Option<String>,
    },
}

/// A node in one of the factor trees.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorNode {
    pub id: String,
    pub kind: FactorKind,
    pub name: String,
    /// For workload nodes: terminal, activity or object.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sub_kind: Option<String>,
    #[serde(default)]
    pub children: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value_domain: Option<ValueDomain>,
    /// Feature ids (resource nodes) or benchmark names (workload nodes) this
    /// node applies to. Empty means unlinked.
    #[serde(default)]
    pub applies_to: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
}

/// Slot-based experiment description: evaluate `[capacity]` of particular
/// `[resources]` with particular `[workload]` driven by `[operations]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Blueprint {
    pub id: String,
    #[serde(default)]
    pub description: String,
    pub capacity_slot: String,
    #[serde(default)]
    pub resource_slots: Vec<String>,
    #[serde(default)]
    pub workload_slots: Vec<String>,
    #[serde(default)]
    pub operation_slots: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
}

/// Domain and version a project or template was built against.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BundleRef {
    pub domain: String,
    pub version: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnowledgeBundle {
    pub schema_version: u32,
    pub domain: String,
    pub version: String,
    #[serde(default)]
    pub taxonomy: Vec<TaxonomyElement>,
    #[serde(default)]
    pub catalogue: Vec<CatalogueEntry>,
    #[serde(default)]
    pub factors: Vec<FactorNode>,
    #[serde(default)]
    pub blueprints: Vec<Blueprint>,
    #[serde(default)]
    pub templates: Vec<EvaluationTemplate>,
}

impl KnowledgeBundle {
    pub fn empty(domain: impl Into<String>, version: impl Into<String>) -> Self {
        KnowledgeBundle {
            schema_version: crate::SCHEMA_VERSION,
            domain: domain.into(),
            version: version.into(),
            taxonomy: Vec::new(),
            catalogue: Vec::new(),
            factors: Vec::new(),
            blueprints: Vec::new(),
            templates: Vec::new(),
        }
    }

    pub fn reference(&self) -> BundleRef {
        BundleRef { domain: self.domain.clone(), version: self.version.clone() }
    }

    pub fn element(&self, id: &str) -> Option<&TaxonomyElement> {
        self.taxonomy.iter().find(|e| e.id == id)
    }

    pub fn factor(&self, id: &str) -> Option<&FactorNode> {
        self.factors.iter().find(|f| f.id == id)
    }

    pub fn blueprint(&self, id: &str) -> Option<&Blueprint> {
        self.blueprints.iter().find(|b| b.id == id)
    }

    pub fn template(&self, id: &str) -> Option<&EvaluationTemplate> {
        self.templates.iter().find(|t| t.id == id)
    }
}
