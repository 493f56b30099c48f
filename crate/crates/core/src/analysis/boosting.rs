//! Composite ("boosting") indices over several primary metrics.
//!
//! Each metric is min–max normalised across alternatives (lower-better
//! metrics flipped); a metric on which all alternatives tie scores 1.0 for
//! everyone. The aggregate is the weighted arithmetic mean of the scores.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::chart::{radar_chart, ChartSeries};
use super::AnalysisError;
use crate::artefact::Direction;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoostingIndex {
    pub alternative: String,
    pub scores: BTreeMap<String, f64>,
    pub aggregate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoostingResult {
    pub metrics: Vec<String>,
    pub weights: BTreeMap<String, f64>,
    pub directions: BTreeMap<String, Direction>,
    pub alternatives: Vec<BoostingIndex>,
    pub radar: ChartSeries,
}

impl BoostingResult {
    /// Alternatives ordered by descending aggregate, ties by name.
    pub fn ranking(&self) -> Vec<&str> {
        let mut order: Vec<&BoostingIndex> = self.alternatives.iter().collect();
        order.sort_by(|a, b| b.aggregate.total_cmp(&a.aggregate).then_with(|| a.alternative.cmp(&b.alternative)));
        order.into_iter().map(|b| b.alternative.as_str()).collect()
    }
}

/// Builds the index. Metrics are the union of all alternatives' keys; missing
/// directions default to higher-better and missing weights to uniform.
pub fn boosting_index(
    alternatives: &BTreeMap<String, BTreeMap<String, f64>>,
    directions: &BTreeMap<String, Direction>,
    weights: Option<&BTreeMap<String, f64>>,
) -> Result<BoostingResult, AnalysisError> {
    if alternatives.is_empty() {
        return Err(AnalysisError::NoAlternatives);
    }
    let metrics: Vec<String> = alternatives
        .values()
        .flat_map(|m| m.keys().cloned())
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .collect();
    for (alt, values) in alternatives {
        for metric in &metrics {
            match values.get(metric) {
                None => return Err(AnalysisError::MissingMetric { alternative: alt.clone(), metric: metric.clone() }),
                Some(v) if !v.is_finite() => return Err(AnalysisError::NonFinite(format!("{alt}/{metric}"))),
                Some(_) => {}
            }
        }
    }
    let weights = normalised_weights(&metrics, weights)?;
    let directions: BTreeMap<String, Direction> = metrics
        .iter()
        .map(|m| (m.clone(), directions.get(m).copied().unwrap_or(Direction::HigherBetter)))
        .collect();

    let mut indices: Vec<BoostingIndex> = alternatives
        .keys()
        .map(|alt| BoostingIndex { alternative: alt.clone(), scores: BTreeMap::new(), aggregate: 0.0 })
        .collect();
    for metric in &metrics {
        let values: Vec<f64> = alternatives.values().map(|m| m[metric]).collect();
        let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        for (index, x) in indices.iter_mut().zip(values) {
            let score = if hi == lo {
                1.0
            } else {
                match directions[metric] {
                    Direction::HigherBetter => (x - lo) / (hi - lo),
                    Direction::LowerBetter => (hi - x) / (hi - lo),
                }
            };
            index.scores.insert(metric.clone(), score.clamp(0.0, 1.0));
        }
    }
    for index in &mut indices {
        let agg: f64 = metrics.iter().map(|m| weights[m] * index.scores[m]).sum();
        index.aggregate = agg.clamp(0.0, 1.0);
    }
    let radar = radar_chart(&metrics, &indices);
    Ok(BoostingResult { metrics, weights, directions, alternatives: indices, radar })
}

fn normalised_weights(metrics: &[String], weights: Option<&BTreeMap<String, f64>>) -> Result<BTreeMap<String, f64>, AnalysisError> {
    let Some(given) = weights else {
        let w = 1.0 / metrics.len().max(1) as f64;
        return Ok(metrics.iter().map(|m| (m.clone(), w)).collect());
    };
    if let Some(extra) = given.keys().find(|k| !metrics.contains(k)) {
        return Err(AnalysisError::InvalidWeights(format!("weight for unknown metric `{extra}`")));
    }
    let mut out = BTreeMap::new();
    for metric in metrics {
        let w = *given.get(metric).ok_or_else(|| AnalysisError::InvalidWeights(format!("no weight for `{metric}`")))?;
        if !w.is_finite() || w < 0.0 {
            return Err(AnalysisError::NegativeWeight { metric: metric.clone(), weight: w });
        }
        out.insert(metric.clone(), w);
    }
    let total: f64 = out.values().sum();
    if total <= 0.0 {
        return Err(AnalysisError::InvalidWeights("weights sum to zero".into()));
    }
    out.values_mut().for_each(|w| *w /= total);
    Ok(out)
}
