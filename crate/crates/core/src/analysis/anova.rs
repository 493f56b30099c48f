use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::fdist::f_survival;
use super::AnalysisError;

/// Observations of one metric grouped by label.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SampleSet {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metric: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unit: Option<String>,
    pub groups: BTreeMap<String, Vec<f64>>,
}

impl SampleSet {
    pub fn new<I, K>(groups: I) -> Self
    where
        I: IntoIterator<Item = (K, Vec<f64>)>,
        K: Into<String>,
    {
        SampleSet { metric: None, unit: None, groups: groups.into_iter().map(|(k, v)| (k.into(), v)).collect() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnovaTable {
    pub ss_between: f64,
    pub ss_within: f64,
    pub ss_total: f64,
    pub df_between: u64,
    pub df_within: u64,
    pub ms_between: f64,
    pub ms_within: f64,
    pub f: f64,
    pub p_value: f64,
}

/// Fixed-effects one-way ANOVA over labelled groups.
pub fn anova_oneway(samples: &SampleSet) -> Result<AnovaTable, AnalysisError> {
    if samples.groups.len() < 2 {
        return Err(AnalysisError::TooFewGroups(samples.groups.len()));
    }
    for (label, values) in &samples.groups {
        if values.len() < 2 {
            return Err(AnalysisError::TooFewObservations { group: label.clone(), found: values.len() });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(AnalysisError::NonFinite(label.clone()));
        }
    }
    let groups: Vec<&[f64]> = samples.groups.values().map(Vec::as_slice).collect();
    oneway_from_slices(&groups)
}

/// ANOVA core over unlabelled groups; callers validate group sizes.
///
/// When every observation is identical (both mean squares zero) the table
/// reports `F = 0` and `p = 1`.
pub fn oneway_from_slices(groups: &[&[f64]]) -> Result<AnovaTable, AnalysisError> {
    if groups.len() < 2 {
        return Err(AnalysisError::TooFewGroups(groups.len()));
    }
    let total_n: usize = groups.iter().map(|g| g.len()).sum();
    let grand = groups.iter().flat_map(|g| g.iter()).sum::<f64>() / total_n as f64;
    let mut ss_between = 0.0;
    let mut ss_within = 0.0;
    let mut ss_total = 0.0;
    for group in groups {
        let mean = group.iter().sum::<f64>() / group.len() as f64;
        ss_between += group.len() as f64 * (mean - grand).powi(2);
        for &x in group.iter() {
            ss_within += (x - mean).powi(2);
            ss_total += (x - grand).powi(2);
        }
    }
    let df_between = (groups.len() - 1) as u64;
    let df_within = (total_n - groups.len()) as u64;
    let ms_between = ss_between / df_between as f64;
    let ms_within = if df_within > 0 { ss_within / df_within as f64 } else { 0.0 };
    let mut table = AnovaTable {
        ss_between,
        ss_within,
        ss_total,
        df_between,
        df_within,
        ms_between,
        ms_within,
        f: 0.0,
        p_value: 1.0,
    };
    if ms_within > 0.0 {
        table.f = ms_between / ms_within;
        table.p_value = f_survival(table.f, df_between as f64, df_within as f64);
    } else if ms_between > 0.0 {
        table.f = f64::INFINITY;
        table.p_value = 0.0;
        return Err(AnalysisError::Degenerate(Box::new(table)));
    }
    Ok(table)
}
