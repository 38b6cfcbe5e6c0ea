//! Aggregate statistics: mean ± population STD and MOS ± 95% CI.

use serde::Serialize;

use super::MetricError;

/// Mean and population standard deviation of a metric column.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricSummary {
    pub mean: f64,
    pub std: f64,
    pub count: usize,
    pub unit: String,
}

/// Mean opinion score with a 95% confidence interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MosSummary {
    pub mean: f64,
    pub ci95: f64,
    pub n: usize,
}

/// Mean and population STD (denominator `n`) of the values.
pub fn summarize(values: &[f64], unit: &str) -> Result<MetricSummary, MetricError> {
    if values.is_empty() {
        return Err(MetricError::Empty);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    Ok(MetricSummary {
        mean,
        std: var.sqrt(),
        count: values.len(),
        unit: unit.to_string(),
    })
}

/// MOS mean and normal-approximation 95% CI: `1.96 * s / sqrt(n)` with
/// the sample STD (denominator `n - 1`).
pub fn mos_summary(ratings: &[f64]) -> Result<MosSummary, MetricError> {
    if ratings.len() < 2 {
        return Err(MetricError::TooFewRatings(ratings.len()));
    }
    if let Some(&bad) = ratings.iter().find(|r| !(1.0..=5.0).contains(*r)) {
        return Err(MetricError::RatingOutOfRange(bad));
    }
    let n = ratings.len() as f64;
    let mean = ratings.iter().sum::<f64>() / n;
    let var = ratings.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    Ok(MosSummary {
        mean,
        ci95: 1.96 * var.sqrt() / n.sqrt(),
        n: ratings.len(),
    })
}
