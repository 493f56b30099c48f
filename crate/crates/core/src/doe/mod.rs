//! Experiment design: full factorial run plans with replication, seeded
//! randomization and blocking, plus replicate sizing by simulated power.

mod factorial;
mod plan_csv;
mod power;
mod rng;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use factorial::{assign_blocks, full_factorial, randomize_order};
pub use plan_csv::{write_plan_csv, PLAN_CSV_FIXED_COLUMNS};
pub use power::{estimate_replicates, simulate_power, simulate_power_with, PowerQuery, ReplicateEstimate};
pub use rng::SplitMix64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DoeError {
    #[error("factor `{factor}` has {count} level(s); at least 2 are required")]
    TooFewLevels { factor: String, count: usize },
    #[error("factor `{factor}` lists level `{level}` more than once")]
    DuplicateLevel { factor: String, level: String },
    #[error("factor `{0}` is declared more than once")]
    DuplicateFactor(String),
    #[error("factor `{factor}` has role {actual} but is used as a {expected} factor")]
    WrongRole { factor: String, expected: FactorRole, actual: FactorRole },
    #[error("design has no design factors")]
    NoFactors,
    #[error("replicate count must be at least 1")]
    NoReplicates,
    #[error("run {run} has no replicate index")]
    MissingReplicate { run: usize },
    #[error("invalid power query: {0}")]
    InvalidPowerQuery(String),
    #[error("target power {target} unreachable with n <= {n_max} (power at n_max = {achieved:.4})")]
    TargetUnreachable { target: f64, n_max: usize, achieved: f64 },
}

/// A factor level: either a label or a numeric setting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Level {
    Number(f64),
    Label(String),
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Level::Number(v) => write!(f, "{v}"),
            Level::Label(s) => f.write_str(s),
        }
    }
}

impl From<&str> for Level {
    fn from(s: &str) -> Self {
        Level::Label(s.to_string())
    }
}

impl From<f64> for Level {
    fn from(v: f64) -> Self {
        Level::Number(v)
    }
}

impl Level {
    /// Parses a command-line level: numeric when it parses as a finite number.
    pub fn parse(text: &str) -> Level {
        match text.trim().parse::<f64>() {
            Ok(v) if v.is_finite() => Level::Number(v),
            _ => Level::Label(text.trim().to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FactorKind {
    Resource,
    Workload,
    Quality,
}

impl fmt::Display for FactorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FactorKind::Resource => "resource",
            FactorKind::Workload => "workload",
            FactorKind::Quality => "quality",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FactorRole {
    Design,
    HeldConstant,
    Blocking,
}

impl fmt::Display for FactorRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FactorRole::Design => "design",
            FactorRole::HeldConstant => "held-constant",
            FactorRole::Blocking => "blocking",
        })
    }
}

/// An experimental factor with its chosen levels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Factor {
    pub name: String,
    pub kind: FactorKind,
    pub levels: Vec<Level>,
    pub role: FactorRole,
    /// Factor-framework node this factor was drawn from, if any.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub node: Option<String>,
}

impl Factor {
    pub fn new(name: impl Into<String>, kind: FactorKind, role: FactorRole, levels: Vec<Level>) -> Self {
        Factor { name: name.into(), kind, levels, role, node: None }
    }

    /// Shorthand for a design factor with label levels.
    pub fn design(name: impl Into<String>, levels: &[&str]) -> Self {
        Factor::new(name, FactorKind::Resource, FactorRole::Design, levels.iter().map(|l| Level::parse(l)).collect())
    }

    /// Shorthand for a blocking factor with label levels.
    pub fn blocking(name: impl Into<String>, levels: &[&str]) -> Self {
        Factor::new(name, FactorKind::Resource, FactorRole::Blocking, levels.iter().map(|l| Level::parse(l)).collect())
    }

    /// Position of `level` in this factor's level list.
    pub fn level_index(&self, level: &Level) -> Option<usize> {
        let wanted = level.to_string();
        self.levels.iter().position(|l| l.to_string() == wanted)
    }

    /// Checks the level-count and uniqueness invariants. Held-constant
    /// factors may have a single level.
    pub fn validate(&self) -> Result<(), DoeError> {
        let min = if self.role == FactorRole::HeldConstant { 1 } else { 2 };
        if self.levels.len() < min {
            return Err(DoeError::TooFewLevels { factor: self.name.clone(), count: self.levels.len() });
        }
        let mut seen = std::collections::BTreeSet::new();
        for level in &self.levels {
            if !seen.insert(level.to_string()) {
                return Err(DoeError::DuplicateLevel { factor: self.name.clone(), level: level.to_string() });
            }
        }
        Ok(())
    }
}

/// Everything needed to generate a run plan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignSpec {
    pub factors: Vec<Factor>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blocking: Option<Factor>,
    pub replicates: u32,
    pub seed: u64,
    #[serde(default)]
    pub responses: Vec<String>,
}

impl DesignSpec {
    pub fn validate(&self) -> Result<(), DoeError> {
        if self.factors.is_empty() {
            return Err(DoeError::NoFactors);
        }
        if self.replicates < 1 {
            return Err(DoeError::NoReplicates);
        }
        let mut names = std::collections::BTreeSet::new();
        for factor in &self.factors {
            if factor.role != FactorRole::Design {
                return Err(DoeError::WrongRole {
                    factor: factor.name.clone(),
                    expected: FactorRole::Design,
                    actual: factor.role,
                });
            }
            factor.validate()?;
            if !names.insert(factor.name.as_str()) {
                return Err(DoeError::DuplicateFactor(factor.name.clone()));
            }
        }
        if let Some(block) = &self.blocking {
            if block.role != FactorRole::Blocking {
                return Err(DoeError::WrongRole {
                    factor: block.name.clone(),
                    expected: FactorRole::Blocking,
                    actual: block.role,
                });
            }
            block.validate()?;
            if names.contains(block.name.as_str()) {
                return Err(DoeError::DuplicateFactor(block.name.clone()));
            }
        }
        Ok(())
    }

    /// Number of distinct level combinations.
    pub fn cell_count(&self) -> usize {
        self.factors.iter().map(|f| f.levels.len()).product()
    }
}

/// One planned run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSpec {
    /// 1-based position in execution order.
    pub run: usize,
    pub combination: BTreeMap<String, Level>,
    /// 1-based replicate index.
    pub replicate: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub block: Option<String>,
}

/// A design together with its ordered runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunPlan {
    pub spec: DesignSpec,
    pub runs: Vec<RunSpec>,
}

impl RunPlan {
    pub fn len(&self) -> usize {
        self.runs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.runs.is_empty()
    }

    /// Design factor names in column order.
    pub fn factor_names(&self) -> Vec<&str> {
        self.spec.factors.iter().map(|f| f.name.as_str()).collect()
    }
}
