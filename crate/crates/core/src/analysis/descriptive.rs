use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use super::AnalysisError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Descriptives {
    pub n: usize,
    pub mean: f64,
    /// Sample (n - 1) standard deviation.
    pub sd: f64,
    pub min: f64,
    pub max: f64,
    /// 95% Student-t confidence interval of the mean.
    pub ci95: [f64; 2],
}

pub fn descriptive_stats(values: &[f64]) -> Result<Descriptives, AnalysisError> {
    if values.len() < 2 {
        return Err(AnalysisError::TooFewValues { needed: 2, found: values.len() });
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(AnalysisError::NonFinite("observations".into()));
    }
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n as f64;
    let ss: f64 = values.iter().map(|v| (v - mean).powi(2)).sum();
    let sd = (ss / (n - 1) as f64).sqrt();
    let t = StudentsT::new(0.0, 1.0, (n - 1) as f64).expect("df >= 1").inverse_cdf(0.975);
    let half = t * sd / (n as f64).sqrt();
    Ok(Descriptives {
        n,
        mean,
        sd,
        min: values.iter().copied().fold(f64::INFINITY, f64::min),
        max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        ci95: [mean - half, mean + half],
    })
}
