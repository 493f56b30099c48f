//! Renderer-independent chart data.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::boosting::{BoostingIndex, BoostingResult};
use super::effects::EffectEstimate;
use super::pareto::{pareto_ranking, ParetoRanking};
use super::{AnalysisError, SampleSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChartKind {
    Column,
    Line,
    Scatter,
    Radar,
    Pareto,
}

impl fmt::Display for ChartKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ChartKind::Column => "column",
            ChartKind::Line => "line",
            ChartKind::Scatter => "scatter",
            ChartKind::Radar => "radar",
            ChartKind::Pareto => "pareto",
        })
    }
}

impl std::str::FromStr for ChartKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "column" => ChartKind::Column,
            "line" => ChartKind::Line,
            "scatter" => ChartKind::Scatter,
            "radar" => ChartKind::Radar,
            "pareto" => ChartKind::Pareto,
            other => return Err(format!("unknown chart kind `{other}`")),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Axis {
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unit: Option<String>,
}

impl Axis {
    fn new(label: &str, unit: Option<&str>) -> Self {
        Axis { label: label.to_string(), unit: unit.map(str::to_string) }
    }
}

/// Category (group, term, spoke) or numeric x coordinate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ChartX {
    Number(f64),
    Category(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChartPoint {
    pub x: ChartX,
    pub y: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub name: String,
    pub points: Vec<ChartPoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChartSeries {
    pub kind: ChartKind,
    pub title: String,
    pub x_axis: Axis,
    pub y_axis: Axis,
    pub series: Vec<Series>,
}

/// Analysis output a chart can be built from.
#[derive(Debug, Clone, Copy)]
pub enum ChartInput<'a> {
    Effects(&'a [EffectEstimate]),
    Pareto(&'a ParetoRanking),
    Boosting(&'a BoostingResult),
    Samples(&'a SampleSet),
}

impl ChartInput<'_> {
    fn name(&self) -> &'static str {
        match self {
            ChartInput::Effects(_) => "effects",
            ChartInput::Pareto(_) => "a pareto ranking",
            ChartInput::Boosting(_) => "a boosting index",
            ChartInput::Samples(_) => "grouped samples",
        }
    }
}

/// Builds chart data: pareto from effects or rankings, radar from boosting
/// results, column/line/scatter from grouped samples.
pub fn chart_data(input: ChartInput<'_>, kind: ChartKind) -> Result<ChartSeries, AnalysisError> {
    match (kind, input) {
        (ChartKind::Pareto, ChartInput::Effects(effects)) => Ok(pareto_chart(&pareto_ranking(effects)?)),
        (ChartKind::Pareto, ChartInput::Pareto(ranking)) => Ok(pareto_chart(ranking)),
        (ChartKind::Radar, ChartInput::Boosting(result)) => Ok(result.radar.clone()),
        (ChartKind::Column | ChartKind::Line | ChartKind::Scatter, ChartInput::Samples(samples)) => {
            Ok(sample_chart(samples, kind))
        }
        (kind, input) => Err(AnalysisError::KindMismatch { kind, input: input.name() }),
    }
}

fn pareto_chart(ranking: &ParetoRanking) -> ChartSeries {
    let category = |t: &str| ChartX::Category(t.to_string());
    ChartSeries {
        kind: ChartKind::Pareto,
        title: "Pareto of effects".into(),
        x_axis: Axis::new("term", None),
        y_axis: Axis::new("|effect|", None),
        series: vec![
            Series {
                name: "magnitude".into(),
                points: ranking.entries.iter().map(|e| ChartPoint { x: category(&e.term), y: e.magnitude }).collect(),
            },
            Series {
                name: "cumulative-percent".into(),
                points: ranking
                    .entries
                    .iter()
                    .map(|e| ChartPoint { x: category(&e.term), y: e.cumulative_percent })
                    .collect(),
            },
        ],
    }
}

pub(crate) fn radar_chart(metrics: &[String], indices: &[BoostingIndex]) -> ChartSeries {
    ChartSeries {
        kind: ChartKind::Radar,
        title: "Boosting index".into(),
        x_axis: Axis::new("metric", None),
        y_axis: Axis::new("normalised score", None),
        series: indices
            .iter()
            .map(|idx| Series {
                name: idx.alternative.clone(),
                points: metrics
                    .iter()
                    .map(|m| ChartPoint { x: ChartX::Category(m.clone()), y: idx.scores[m] })
                    .collect(),
            })
            .collect(),
    }
}

fn sample_chart(samples: &SampleSet, kind: ChartKind) -> ChartSeries {
    let metric = samples.metric.as_deref().unwrap_or("value");
    // numeric group labels sort numerically so line charts read left to right
    let mut groups: Vec<(&String, &Vec<f64>)> = samples.groups.iter().collect();
    let numeric: Option<Vec<f64>> = groups.iter().map(|(k, _)| k.parse::<f64>().ok()).collect();
    if let Some(keys) = &numeric {
        let mut paired: Vec<(f64, (&String, &Vec<f64>))> = keys.iter().copied().zip(groups).collect();
        paired.sort_by(|a, b| a.0.total_cmp(&b.0));
        groups = paired.into_iter().map(|(_, g)| g).collect();
    }
    let x_of = |label: &str| match label.parse::<f64>() {
        Ok(v) if numeric.is_some() => ChartX::Number(v),
        _ => ChartX::Category(label.to_string()),
    };
    let series = match kind {
        ChartKind::Scatter => groups
            .iter()
            .map(|(label, values)| Series {
                name: (*label).clone(),
                points: values.iter().map(|&y| ChartPoint { x: x_of(label), y }).collect(),
            })
            .collect(),
        _ => vec![Series {
            name: format!("mean {metric}"),
            points: groups
                .iter()
                .map(|(label, values)| ChartPoint {
                    x: x_of(label),
                    y: values.iter().sum::<f64>() / values.len().max(1) as f64,
                })
                .collect(),
        }],
    };
    ChartSeries {
        kind,
        title: format!("{metric} by group"),
        x_axis: Axis::new("group", None),
        y_axis: Axis::new(metric, samples.unit.as_deref()),
        series,
    }
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use super::*;
    use crate::analysis::boosting_index;

    #[test]
    fn pareto_from_effects() {
        let effects = vec![EffectEstimate::new("A", 4.0), EffectEstimate::new("B", 1.0), EffectEstimate::new("AB", 0.5)];
        let chart = chart_data(ChartInput::Effects(&effects), ChartKind::Pareto).unwrap();
        assert_eq!(chart.series[0].points.len(), 3);
        assert_eq!(chart.series[1].points.last().unwrap().y, 100.0);
    }

    #[test]
    fn radar_shape() {
        let alts: BTreeMap<String, BTreeMap<String, f64>> = [("X", [1.0, 2.0, 3.0]), ("Y", [3.0, 1.0, 2.0])]
            .into_iter()
            .map(|(a, v)| (a.to_string(), ["m1", "m2", "m3"].iter().map(|m| m.to_string()).zip(v).collect()))
            .collect();
        let result = boosting_index(&alts, &BTreeMap::new(), None).unwrap();
        let chart = chart_data(ChartInput::Boosting(&result), ChartKind::Radar).unwrap();
        assert_eq!(chart.series.len(), 2);
        assert!(chart.series.iter().all(|s| s.points.len() == 3));
    }

    #[test]
    fn mismatch() {
        let samples = SampleSet::new([("a", vec![1.0, 2.0])]);
        assert!(matches!(
            chart_data(ChartInput::Samples(&samples), ChartKind::Radar),
            Err(AnalysisError::KindMismatch { kind: ChartKind::Radar, .. })
        ));
    }

    #[test]
    fn numeric_groups_sorted() {
        let samples = SampleSet::new([("128", vec![3.0, 5.0]), ("64", vec![1.0, 1.0])]);
        let chart = chart_data(ChartInput::Samples(&samples), ChartKind::Line).unwrap();
        assert_eq!(chart.series[0].points[0].x, ChartX::Number(64.0));
        assert_eq!(chart.series[0].points[1].y, 4.0);
        let scatter = chart_data(ChartInput::Samples(&samples), ChartKind::Scatter).unwrap();
        assert_eq!(scatter.series.len(), 2);
    }
}
