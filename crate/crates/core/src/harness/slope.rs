use std::collections::HashMap;

use super::experiment::ResultRow;
use crate::error::{Error, Result};

/// Mean scaled error of one (sampler, target, fraction) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesPoint {
    pub sampler: String,
    pub target_index: usize,
    pub sample_fraction: f64,
    pub mean_scaled_err: f64,
    /// Rows averaged; failed trials are excluded.
    pub count: usize,
}

/// Group-by mean of `scaled_err`, cells in order of first appearance.
pub fn aggregate_series(rows: &[ResultRow]) -> Vec<SeriesPoint> {
    let mut index: HashMap<(&str, usize, u64), usize> = HashMap::new();
    let mut sums: Vec<(SeriesPoint, f64)> = Vec::new();
    for r in rows.iter().filter(|r| !r.scaled_err.is_nan()) {
        let key = (r.sampler.as_str(), r.target_index, r.sample_fraction.to_bits());
        let slot = *index.entry(key).or_insert_with(|| {
            sums.push((
                SeriesPoint {
                    sampler: r.sampler.clone(),
                    target_index: r.target_index,
                    sample_fraction: r.sample_fraction,
                    mean_scaled_err: 0.0,
                    count: 0,
                },
                0.0,
            ));
            sums.len() - 1
        });
        sums[slot].0.count += 1;
        sums[slot].1 += r.scaled_err;
    }
    sums.into_iter()
        .map(|(mut p, total)| {
            p.mean_scaled_err = total / p.count as f64;
            p
        })
        .collect()
}

/// Least-squares slope of `ln(mean scaled_err)` against `ln(fraction)` for
/// one sampler and target rank.
pub fn slope_fit(rows: &[ResultRow], sampler: &str, target_index: usize) -> Result<f64> {
    let pts: Vec<(f64, f64)> = aggregate_series(rows)
        .into_iter()
        .filter(|p| p.sampler == sampler && p.target_index == target_index)
        .filter(|p| p.mean_scaled_err > 0.0 && p.mean_scaled_err.is_finite())
        .map(|p| (p.sample_fraction.ln(), p.mean_scaled_err.ln()))
        .collect();
    if pts.len() < 3 {
        return Err(Error::InsufficientPoints(pts.len()));
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = pts.iter().map(|(x, _)| (x - mx).powi(2)).sum();
    Ok(sxy / sxx)
}
