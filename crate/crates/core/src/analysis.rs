//! Cross-wave ratio analysis.
//!
//! For a country whose daily curve decomposes into waves with peak times
//! `Tᵢ` and peak heights `hᵢ = AᵢCᵢ/4`, every later wave is compared to
//! the first through the pair of ratios `Tᵢ/T₁` (time) and `hᵢ/h₁`
//! (amplitude). Across many countries those two ratios track each other;
//! [`pearson`] quantifies the association and [`model_consistency`]
//! flags individual waves whose amplitude ratio strays far from the time
//! ratio.

use serde::Serialize;

use crate::error::{Error, Result};

/// Ratios of one later wave relative to the first wave of its series.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioRow {
    /// 1-based index of the later wave (2 = second wave, …).
    pub wave_index: usize,
    /// Peak-time ratio `Tᵢ/T₁`.
    pub time_ratio: f64,
    /// Peak-height ratio `hᵢ/h₁`.
    pub amplitude_ratio: f64,
}

/// Compute per-wave ratios from `(peak time, peak height)` pairs in wave
/// order. A single wave produces no rows.
pub fn wave_ratios(peaks: &[(f64, f64)]) -> Result<Vec<RatioRow>> {
    for (i, &(t, h)) in peaks.iter().enumerate() {
        if !(t > 0.0) || !t.is_finite() || !(h > 0.0) || !h.is_finite() {
            return Err(Error::InvalidInput(format!(
                "wave {} has non-positive peak time or height ({t}, {h})",
                i + 1
            )));
        }
    }
    if peaks.windows(2).any(|w| w[1].0 <= w[0].0) {
        return Err(Error::InvalidInput(
            "wave peak times must be strictly increasing".into(),
        ));
    }
    let Some(&(t1, h1)) = peaks.first() else {
        return Ok(Vec::new());
    };
    Ok(peaks
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, &(t, h))| RatioRow {
            wave_index: i + 1,
            time_ratio: t / t1,
            amplitude_ratio: h / h1,
        })
        .collect())
}

/// Pearson correlation coefficient of two equal-length samples.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::InvalidInput(format!(
            "sample lengths differ: {} vs {}",
            x.len(),
            y.len()
        )));
    }
    if x.len() < 2 {
        return Err(Error::UndefinedCorrelation(
            "need at least two points".into(),
        ));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput(
            "samples contain non-finite values".into(),
        ));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (&a, &b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::UndefinedCorrelation(
            "a sample has zero variance".into(),
        ));
    }
    Ok(sxy / (sxx * syy).sqrt())
}

/// One labelled row of a consistency report.
#[derive(Debug, Clone, Serialize)]
pub struct ConsistencyRow {
    pub label: String,
    pub wave_index: usize,
    pub time_ratio: f64,
    pub amplitude_ratio: f64,
    /// `|time − amplitude| / time`.
    pub relative_deviation: f64,
    pub flagged: bool,
}

/// Deviation of amplitude ratios from time ratios across labelled rows.
#[derive(Debug, Clone, Serialize)]
pub struct ConsistencyReport {
    pub threshold: f64,
    pub rows: Vec<ConsistencyRow>,
    pub flagged: usize,
}

/// Flag every ratio row whose amplitude ratio deviates from its time
/// ratio by more than `threshold` (relative to the time ratio).
pub fn model_consistency(rows: &[(String, RatioRow)], threshold: f64) -> ConsistencyReport {
    let rows: Vec<ConsistencyRow> = rows
        .iter()
        .map(|(label, r)| {
            let relative_deviation = (r.time_ratio - r.amplitude_ratio).abs() / r.time_ratio;
            ConsistencyRow {
                label: label.clone(),
                wave_index: r.wave_index,
                time_ratio: r.time_ratio,
                amplitude_ratio: r.amplitude_ratio,
                relative_deviation,
                flagged: relative_deviation > threshold,
            }
        })
        .collect();
    let flagged = rows.iter().filter(|r| r.flagged).count();
    ConsistencyReport {
        threshold,
        rows,
        flagged,
    }
}
