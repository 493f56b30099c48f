//! Analysis of one iteration's runs according to a recorded recipe.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{
    anova_oneway, boosting_index, chart_data, descriptive_stats, effects_from_records, pareto_ranking, AnalysisError,
    AnovaTable, BoostingResult, ChartInput, ChartKind, ChartSeries, Descriptives, EffectEstimate, ParetoRanking,
    SampleSet,
};
use crate::artefact::Direction;
use crate::doe::RunPlan;
use crate::runner::{RunRecord, RunStatus};

fn yes() -> bool {
    true
}

fn default_charts() -> Vec<ChartKind> {
    vec![ChartKind::Column, ChartKind::Pareto]
}

/// Which analyses to run over an iteration's records.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisRecipe {
    /// Response metrics to analyse; empty means all of the design's responses.
    #[serde(default)]
    pub metrics: Vec<String>,
    /// One-way ANOVA per design factor (marginal over the other factors).
    #[serde(default = "yes")]
    pub anova: bool,
    /// Contrast effects and Pareto ranking, when every factor has 2 levels.
    #[serde(default = "yes")]
    pub effects: bool,
    #[serde(default = "default_charts")]
    pub charts: Vec<ChartKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boosting: Option<BoostingRecipe>,
}

impl Default for AnalysisRecipe {
    fn default() -> Self {
        AnalysisRecipe { metrics: Vec::new(), anova: true, effects: true, charts: default_charts(), boosting: None }
    }
}

/// Compares the levels of one factor on a composite of the response metrics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoostingRecipe {
    pub by: String,
    #[serde(default)]
    pub directions: BTreeMap<String, Direction>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<BTreeMap<String, f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellSummary {
    pub cell: String,
    pub n: usize,
    pub mean: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sd: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorAnova {
    /// Stable evidence identifier, `anova/<metric>/<factor>`.
    pub id: String,
    pub factor: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<AnovaTable>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedChart {
    /// Stable evidence identifier, `chart/<metric>/<kind>`.
    pub id: String,
    pub metric: String,
    pub chart: ChartSeries,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricAnalysis {
    pub metric: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unit: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub overall: Option<Descriptives>,
    pub cells: Vec<CellSummary>,
    pub anova: Vec<FactorAnova>,
    pub effects: Vec<EffectEstimate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pareto: Option<ParetoRanking>,
    #[serde(default)]
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisResults {
    pub metrics: Vec<MetricAnalysis>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boosting: Option<BoostingResult>,
    pub charts: Vec<NamedChart>,
}

impl AnalysisResults {
    pub fn metric(&self, name: &str) -> Option<&MetricAnalysis> {
        self.metrics.iter().find(|m| m.metric == name)
    }
}

fn cell_label(run: &RunRecord, plan: &RunPlan) -> String {
    plan.spec
        .factors
        .iter()
        .map(|f| format!("{}={}", f.name, run.combination.get(&f.name).map(|l| l.to_string()).unwrap_or_default()))
        .collect::<Vec<_>>()
        .join(", ")
}

/// Runs `recipe` over the successful records of `plan`.
///
/// Per-factor problems (too few observations, degenerate ANOVA, non-2-level
/// factors) are recorded as notes rather than failing the whole analysis.
pub fn analyze_execution(plan: &RunPlan, records: &[RunRecord], recipe: &AnalysisRecipe) -> Result<AnalysisResults, AnalysisError> {
    let metrics: Vec<String> = if recipe.metrics.is_empty() { plan.spec.responses.clone() } else { recipe.metrics.clone() };
    let ok: Vec<&RunRecord> = records.iter().filter(|r| r.status == RunStatus::Ok).collect();
    let mut out = AnalysisResults { metrics: Vec::new(), boosting: None, charts: Vec::new() };

    for metric in &metrics {
        let measured: Vec<(&RunRecord, f64)> =
            ok.iter().filter_map(|r| r.measurements.get(metric).map(|m| (*r, m.value))).collect();
        let unit = ok.iter().find_map(|r| r.measurements.get(metric).map(|m| m.unit.clone())).filter(|u| !u.is_empty());
        let values: Vec<f64> = measured.iter().map(|(_, v)| *v).collect();
        let mut analysis = MetricAnalysis {
            metric: metric.clone(),
            unit: unit.clone(),
            overall: descriptive_stats(&values).ok(),
            cells: Vec::new(),
            anova: Vec::new(),
            effects: Vec::new(),
            pareto: None,
            notes: Vec::new(),
        };
        if measured.is_empty() {
            analysis.notes.push(format!("no successful measurements of `{metric}`"));
            out.metrics.push(analysis);
            continue;
        }

        let mut cells: BTreeMap<String, Vec<f64>> = BTreeMap::new();
        for (r, v) in &measured {
            cells.entry(cell_label(r, plan)).or_default().push(*v);
        }
        for (cell, vals) in &cells {
            let mean = vals.iter().sum::<f64>() / vals.len() as f64;
            let sd = descriptive_stats(vals).ok().map(|d| d.sd);
            analysis.cells.push(CellSummary { cell: cell.clone(), n: vals.len(), mean, sd });
        }

        if recipe.anova {
            for factor in &plan.spec.factors {
                let mut groups: BTreeMap<String, Vec<f64>> = BTreeMap::new();
                for (r, v) in &measured {
                    if let Some(level) = r.combination.get(&factor.name) {
                        groups.entry(level.to_string()).or_default().push(*v);
                    }
                }
                let samples = SampleSet { metric: Some(metric.clone()), unit: unit.clone(), groups };
                let (table, note) = match anova_oneway(&samples) {
                    Ok(t) => (Some(t), None),
                    Err(e) => (None, Some(e.to_string())),
                };
                analysis.anova.push(FactorAnova { id: format!("anova/{metric}/{}", factor.name), factor: factor.name.clone(), table, note });
            }
        }

        if recipe.effects {
            match effects_from_records(plan, records, metric) {
                Ok(effects) => {
                    analysis.pareto = pareto_ranking(&effects).ok();
                    analysis.effects = effects;
                }
                Err(e) => analysis.notes.push(format!("effects skipped: {e}")),
            }
        }

        for kind in &recipe.charts {
            let chart = match kind {
                ChartKind::Pareto => match &analysis.pareto {
                    Some(p) => chart_data(ChartInput::Pareto(p), ChartKind::Pareto).ok(),
                    None => None,
                },
                ChartKind::Radar => None,
                _ => {
                    let grouping = if plan.spec.factors.len() == 1 {
                        let name = &plan.spec.factors[0].name;
                        let mut g: BTreeMap<String, Vec<f64>> = BTreeMap::new();
                        for (r, v) in &measured {
                            g.entry(r.combination.get(name).map(|l| l.to_string()).unwrap_or_default()).or_default().push(*v);
                        }
                        g
                    } else {
                        cells.clone()
                    };
                    let samples = SampleSet { metric: Some(metric.clone()), unit: unit.clone(), groups: grouping };
                    chart_data(ChartInput::Samples(&samples), *kind).ok()
                }
            };
            if let Some(chart) = chart {
                out.charts.push(NamedChart { id: format!("chart/{metric}/{kind}"), metric: metric.clone(), chart });
            }
        }
        out.metrics.push(analysis);
    }

    if let Some(boost) = &recipe.boosting {
        let factor = plan.spec.factors.iter().find(|f| f.name == boost.by).ok_or_else(|| AnalysisError::UnknownFactor(boost.by.clone()))?;
        let mut alternatives: BTreeMap<String, BTreeMap<String, f64>> = BTreeMap::new();
        for level in &factor.levels {
            let label = level.to_string();
            let mut row = BTreeMap::new();
            for metric in &metrics {
                let vals: Vec<f64> = ok
                    .iter()
                    .filter(|r| r.combination.get(&factor.name).map(|l| l.to_string()) == Some(label.clone()))
                    .filter_map(|r| r.measurements.get(metric).map(|m| m.value))
                    .collect();
                if !vals.is_empty() {
                    row.insert(metric.clone(), vals.iter().sum::<f64>() / vals.len() as f64);
                }
            }
            alternatives.insert(label, row);
        }
        let result = boosting_index(&alternatives, &boost.directions, boost.weights.as_ref())?;
        if recipe.charts.contains(&ChartKind::Radar) {
            out.charts.push(NamedChart { id: "chart/boosting/radar".into(), metric: "boosting".into(), chart: result.radar.clone() });
        }
        out.boosting = Some(result);
    }
    Ok(out)
}
