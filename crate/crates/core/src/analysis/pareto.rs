use serde::{Deserialize, Serialize};

use super::effects::{assign_shares, EffectEstimate};
use super::AnalysisError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParetoEntry {
    pub term: String,
    pub effect: f64,
    pub magnitude: f64,
    pub share: f64,
    /// Running total of shares, in percent.
    pub cumulative_percent: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParetoRanking {
    pub entries: Vec<ParetoEntry>,
    /// Set when every effect is zero and shares were split equally.
    pub no_dominant_factor: bool,
}

/// Orders effects by descending magnitude (ties by term label) with
/// cumulative percentages of the total magnitude. The last entry is pinned to
/// exactly 100.
pub fn pareto_ranking(effects: &[EffectEstimate]) -> Result<ParetoRanking, AnalysisError> {
    if effects.is_empty() {
        return Err(AnalysisError::NoEffects);
    }
    if let Some(bad) = effects.iter().find(|e| !e.effect.is_finite()) {
        return Err(AnalysisError::NonFinite(bad.term.clone()));
    }
    let mut ranked = effects.to_vec();
    assign_shares(&mut ranked);
    ranked.sort_by(|a, b| b.effect.abs().total_cmp(&a.effect.abs()).then_with(|| a.term.cmp(&b.term)));
    let no_dominant_factor = ranked.iter().all(|e| e.effect == 0.0);
    let last = ranked.len() - 1;
    let mut running = 0.0;
    let entries = ranked
        .into_iter()
        .enumerate()
        .map(|(i, e)| {
            running += e.share;
            ParetoEntry {
                magnitude: e.effect.abs(),
                cumulative_percent: if i == last { 100.0 } else { (running * 100.0).min(100.0) },
                term: e.term,
                effect: e.effect,
                share: e.share,
            }
        })
        .collect();
    Ok(ParetoRanking { entries, no_dominant_factor })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn effects(pairs: &[(&str, f64)]) -> Vec<EffectEstimate> {
        pairs.iter().map(|(t, v)| EffectEstimate::new(*t, *v)).collect()
    }

    #[test]
    fn fixed_case() {
        let r = pareto_ranking(&effects(&[("AB", 0.5), ("A", 4.0), ("B", -1.0)])).unwrap();
        let order: Vec<&str> = r.entries.iter().map(|e| e.term.as_str()).collect();
        assert_eq!(order, ["A", "B", "AB"]);
        // oracle: 4 / 5.5, 5 / 5.5, 5.5 / 5.5
        let expected = [4.0 / 5.5 * 100.0, 5.0 / 5.5 * 100.0, 100.0];
        for (e, x) in r.entries.iter().zip(expected) {
            assert!((e.cumulative_percent - x).abs() < 0.01);
        }
        assert!((r.entries[0].cumulative_percent - 72.72).abs() < 0.01);
        assert!((r.entries[1].cumulative_percent - 90.90).abs() < 0.01);
        assert!(!r.no_dominant_factor);
    }

    #[test]
    fn single_and_ties() {
        let r = pareto_ranking(&effects(&[("A", 2.0)])).unwrap();
        assert_eq!(r.entries[0].cumulative_percent, 100.0);
        let r = pareto_ranking(&effects(&[("B", 1.0), ("A", 1.0)])).unwrap();
        assert_eq!(r.entries[0].term, "A");
        assert_eq!(r.entries[0].cumulative_percent, 50.0);
        assert_eq!(r.entries[1].cumulative_percent, 100.0);
    }

    #[test]
    fn all_zero() {
        let r = pareto_ranking(&effects(&[("A", 0.0), ("B", 0.0)])).unwrap();
        assert!(r.no_dominant_factor);
        assert_eq!(r.entries[0].share, 0.5);
        assert_eq!(pareto_ranking(&[]), Err(AnalysisError::NoEffects));
    }
}
