//! Statistical analysis of measured runs.

mod anova;
mod boosting;
mod chart;
mod descriptive;
mod effects;
pub mod fdist;
mod pareto;
mod recipe;

use thiserror::Error;

pub use anova::{anova_oneway, oneway_from_slices, AnovaTable, SampleSet};
pub use boosting::{boosting_index, BoostingIndex, BoostingResult};
pub use chart::{chart_data, Axis, ChartInput, ChartKind, ChartPoint, ChartSeries, ChartX, Series};
pub use descriptive::{descriptive_stats, Descriptives};
pub use effects::{effects_from_records, factorial_effects, EffectEstimate, Observation};
pub use pareto::{pareto_ranking, ParetoEntry, ParetoRanking};
pub use recipe::{
    analyze_execution, AnalysisRecipe, AnalysisResults, BoostingRecipe, CellSummary, FactorAnova, MetricAnalysis, NamedChart,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalysisError {
    #[error("need at least {needed} values, got {found}")]
    TooFewValues { needed: usize, found: usize },
    #[error("non-finite observation in `{0}`")]
    NonFinite(String),
    #[error("ANOVA needs at least 2 groups, got {0}")]
    TooFewGroups(usize),
    #[error("group `{group}` has {found} observation(s); at least 2 are required")]
    TooFewObservations { group: String, found: usize },
    #[error("degenerate: infinite F (within-group variation is zero, SS_between = {})", .0.ss_between)]
    Degenerate(Box<AnovaTable>),
    #[error("factor `{factor}` has {levels} levels; effect contrasts need exactly 2")]
    NotTwoLevel { factor: String, levels: usize },
    #[error("incomplete design: {0}")]
    IncompleteDesign(String),
    #[error("no effects to rank")]
    NoEffects,
    #[error("alternative `{alternative}` has no value for metric `{metric}`")]
    MissingMetric { alternative: String, metric: String },
    #[error("metric `{metric}` has negative weight {weight}")]
    NegativeWeight { metric: String, weight: f64 },
    #[error("invalid weights: {0}")]
    InvalidWeights(String),
    #[error("no alternatives to compare")]
    NoAlternatives,
    #[error("chart kind `{kind}` cannot be drawn from {input}")]
    KindMismatch { kind: ChartKind, input: &'static str },
    #[error("unknown factor `{0}`")]
    UnknownFactor(String),
}
