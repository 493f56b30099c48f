//! Replicate sizing by Monte Carlo power simulation.
//!
//! Each trial draws `per_group` normal observations per group with the given
//! means and a common sigma, runs the one-way ANOVA F test and records whether
//! it rejects at `alpha`. Trial `t` uses a ChaCha8 stream selected by `t` under
//! the query seed, so the estimate is independent of thread scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::DoeError;
use crate::analysis::oneway_from_slices;
use crate::par::{self, Execution};

pub const MIN_TRIALS: u64 = 1000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerQuery {
    /// Number of groups (factor levels).
    pub levels: usize,
    /// Observations per group.
    pub per_group: usize,
    /// Group means; length must equal `levels`.
    pub means: Vec<f64>,
    pub sigma: f64,
    pub alpha: f64,
    pub trials: u64,
    pub seed: u64,
}

impl PowerQuery {
    fn validate(&self) -> Result<(), DoeError> {
        let bad = |m: String| Err(DoeError::InvalidPowerQuery(m));
        if self.levels < 2 {
            return bad(format!("levels = {} (need >= 2)", self.levels));
        }
        if self.means.len() != self.levels {
            return bad(format!("{} means for {} levels", self.means.len(), self.levels));
        }
        if self.means.iter().any(|m| !m.is_finite()) {
            return bad("means must be finite".into());
        }
        if self.per_group < 2 {
            return bad(format!("per-group n = {} (need >= 2)", self.per_group));
        }
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return bad(format!("sigma = {} (need > 0)", self.sigma));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return bad(format!("alpha = {} (need 0 < alpha < 1)", self.alpha));
        }
        if self.trials < MIN_TRIALS {
            return bad(format!("trials = {} (need >= {MIN_TRIALS})", self.trials));
        }
        Ok(())
    }
}

/// Estimated probability that the one-way ANOVA rejects at `alpha`.
pub fn simulate_power(query: &PowerQuery) -> Result<f64, DoeError> {
    simulate_power_with(query, Execution::default())
}

pub fn simulate_power_with(query: &PowerQuery, mode: Execution) -> Result<f64, DoeError> {
    query.validate()?;
    let noise = Normal::new(0.0, query.sigma).map_err(|e| DoeError::InvalidPowerQuery(e.to_string()))?;
    let k = query.levels;
    let n = query.per_group;
    let rejections = par::count_where(query.trials, mode, |trial| {
        let mut rng = ChaCha8Rng::seed_from_u64(query.seed);
        rng.set_stream(trial);
        let mut data = vec![0.0; k * n];
        for (g, chunk) in data.chunks_mut(n).enumerate() {
            for x in chunk.iter_mut() {
                *x = query.means[g] + noise.sample(&mut rng);
            }
        }
        let groups: Vec<&[f64]> = data.chunks(n).collect();
        match oneway_from_slices(&groups) {
            Ok(table) => table.p_value < query.alpha,
            // Continuous draws never tie exactly; count a zero-variance draw as rejecting.
            Err(_) => true,
        }
    });
    Ok(rejections as f64 / query.trials as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicateEstimate {
    pub per_group: usize,
    pub power: f64,
}

/// Smallest per-group `n` in `2..=n_max` whose simulated power reaches
/// `target`. The `per_group` field of `query` is ignored.
pub fn estimate_replicates(query: &PowerQuery, target: f64, n_max: usize) -> Result<ReplicateEstimate, DoeError> {
    if !(target > 0.0 && target < 1.0) {
        return Err(DoeError::InvalidPowerQuery(format!("target power = {target} (need 0 < target < 1)")));
    }
    if n_max < 2 {
        return Err(DoeError::InvalidPowerQuery(format!("n_max = {n_max} (need >= 2)")));
    }
    let mut achieved = 0.0;
    for n in 2..=n_max {
        let q = PowerQuery { per_group: n, ..query.clone() };
        achieved = simulate_power(&q)?;
        if achieved >= target {
            return Ok(ReplicateEstimate { per_group: n, power: achieved });
        }
    }
    Err(DoeError::TargetUnreachable { target, n_max, achieved })
}
