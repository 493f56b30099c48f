//! Two-level factorial effect estimation by contrasts.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::AnalysisError;
use crate::doe::{Factor, Level, RunPlan};
use crate::runner::{RunRecord, RunStatus};

/// Largest factor count accepted for contrast analysis (2^12 cells).
const MAX_FACTORS: usize = 12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EffectEstimate {
    /// Factor names joined with `:` for interactions, e.g. `A:B`.
    pub term: String,
    pub effect: f64,
    /// `|effect|` over the sum of all `|effect|`; equal shares when all are zero.
    pub share: f64,
}

impl EffectEstimate {
    pub fn new(term: impl Into<String>, effect: f64) -> Self {
        EffectEstimate { term: term.into(), effect, share: 0.0 }
    }
}

/// One response observation at a level combination.
#[derive(Debug, Clone, Copy)]
pub struct Observation<'a> {
    pub combination: &'a BTreeMap<String, Level>,
    pub value: f64,
}

/// Main effects and every interaction of a replicated 2^k design.
///
/// The first listed level of each factor is the low (−1) setting. Replicates
/// are averaged per cell, then `effect = mean(+ cells) − mean(− cells)` where
/// a cell's sign for a term is the product of its factors' contrasts.
/// Terms are ordered by interaction order, then by factor declaration order.
pub fn factorial_effects(factors: &[Factor], observations: &[Observation<'_>]) -> Result<Vec<EffectEstimate>, AnalysisError> {
    let k = factors.len();
    if k == 0 {
        return Err(AnalysisError::IncompleteDesign("no factors".into()));
    }
    if k > MAX_FACTORS {
        return Err(AnalysisError::IncompleteDesign(format!("{k} factors exceeds the limit of {MAX_FACTORS}")));
    }
    for f in factors {
        if f.levels.len() != 2 {
            return Err(AnalysisError::NotTwoLevel { factor: f.name.clone(), levels: f.levels.len() });
        }
    }
    let cells = 1usize << k;
    let mut sums = vec![0.0; cells];
    let mut counts = vec![0usize; cells];
    for obs in observations {
        if !obs.value.is_finite() {
            return Err(AnalysisError::NonFinite("response".into()));
        }
        let mut cell = 0usize;
        for (j, f) in factors.iter().enumerate() {
            let level = obs
                .combination
                .get(&f.name)
                .ok_or_else(|| AnalysisError::IncompleteDesign(format!("observation lacks factor `{}`", f.name)))?;
            match f.level_index(level) {
                Some(0) => {}
                Some(_) => cell |= 1 << j,
                None => {
                    return Err(AnalysisError::IncompleteDesign(format!("`{level}` is not a level of `{}`", f.name)))
                }
            }
        }
        sums[cell] += obs.value;
        counts[cell] += 1;
    }
    let per_cell = counts[0];
    if per_cell == 0 || counts.iter().any(|&c| c != per_cell) {
        return Err(AnalysisError::IncompleteDesign(format!(
            "cells must hold equal, non-zero replicate counts (found {counts:?})"
        )));
    }
    let means: Vec<f64> = sums.iter().map(|s| s / per_cell as f64).collect();

    let mut terms: Vec<usize> = (1..cells).collect();
    terms.sort_by_key(|&mask| (mask.count_ones(), reversed_bits(mask, k)));
    let half = (cells / 2) as f64;
    let mut effects: Vec<EffectEstimate> = terms
        .into_iter()
        .map(|mask| {
            let contrast: f64 = means
                .iter()
                .enumerate()
                .map(|(cell, m)| if (cell & mask).count_ones() % 2 == mask.count_ones() % 2 { *m } else { -*m })
                .sum();
            let label = (0..k).filter(|j| mask & (1 << j) != 0).map(|j| factors[j].name.as_str()).collect::<Vec<_>>().join(":");
            EffectEstimate::new(label, contrast / half)
        })
        .collect();
    assign_shares(&mut effects);
    Ok(effects)
}

// Orders masks so lower-indexed factors come first within an interaction order.
fn reversed_bits(mask: usize, k: usize) -> Vec<usize> {
    (0..k).filter(|j| mask & (1 << j) != 0).collect()
}

pub(crate) fn assign_shares(effects: &mut [EffectEstimate]) {
    let total: f64 = effects.iter().map(|e| e.effect.abs()).sum();
    let n = effects.len() as f64;
    for e in effects.iter_mut() {
        e.share = if total > 0.0 { e.effect.abs() / total } else { 1.0 / n };
    }
}

/// Effects of `metric` over the successful runs of a 2-level factorial plan.
pub fn effects_from_records(plan: &RunPlan, records: &[RunRecord], metric: &str) -> Result<Vec<EffectEstimate>, AnalysisError> {
    let observations: Vec<Observation<'_>> = records
        .iter()
        .filter(|r| r.status == RunStatus::Ok)
        .filter_map(|r| r.measurements.get(metric).map(|m| Observation { combination: &r.combination, value: m.value }))
        .collect();
    factorial_effects(&plan.spec.factors, &observations)
}
