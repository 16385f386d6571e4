//! Multi-wave logistic decomposition of cumulative case series.
//!
//! A single wave is the four-parameter logistic curve plus a baseline:
//!
//! ```text
//! F(t) = A / (1 + B·exp(−C(t + Δt))) + d
//! ```
//!
//! whose time derivative is a symmetric pulse peaking at `A·C/4` when
//! `t = ln B / C − Δt`. A full series is modelled as a sum of such waves.
//! Fitting proceeds in three steps:
//!
//! 1. segment the daily (first-difference) series at significant valleys
//!    of its smoothed profile ([`segment_waves`]),
//! 2. fit one wave per segment against the residual cumulative curve,
//! 3. refine all parameters jointly over the whole series.
//!
//! Steps 2–3 use damped Gauss–Newton least squares; `B` and `Δt` act on
//! the model only through `ln B − C·Δt`, so the damping keeps that
//! redundant direction pinned while peak time and height stay fully
//! identified.

mod lm;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::moving_average;

/// Numerically stable logistic function `1/(1+e^{−z})`.
fn sigma(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// One logistic wave `A/(1+B·e^{−C(t+Δt)}) + d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogisticWave {
    /// Plateau height `A` (total weight carried by the wave).
    pub a: f64,
    /// Offset coefficient `B`.
    pub b: f64,
    /// Growth rate `C`.
    pub c: f64,
    /// Time shift `Δt`.
    pub t_shift: f64,
    /// Additive baseline `d`.
    pub d: f64,
}

impl LogisticWave {
    pub fn new(a: f64, b: f64, c: f64, t_shift: f64, d: f64) -> Result<Self> {
        for (name, v, positive) in [
            ("a", a, true),
            ("b", b, true),
            ("c", c, true),
            ("t_shift", t_shift, false),
            ("d", d, false),
        ] {
            if !v.is_finite() || (positive && v <= 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "logistic parameter {name} must be {}finite, got {v}",
                    if positive { "positive and " } else { "" }
                )));
            }
        }
        Ok(Self { a, b, c, t_shift, d })
    }

    /// Cumulative value at `t`.
    ///
    /// Evaluated through `s = ln B − C(t+Δt)` and the stable logistic so
    /// that extreme arguments saturate cleanly instead of overflowing.
    pub fn eval_cumulative(&self, t: f64) -> f64 {
        let s = self.b.ln() - self.c * (t + self.t_shift);
        self.a * sigma(-s) + self.d
    }

    /// Daily value (time derivative of the cumulative curve) at `t`.
    pub fn eval_daily(&self, t: f64) -> f64 {
        let s = self.b.ln() - self.c * (t + self.t_shift);
        self.a * sigma(s) * sigma(-s) * self.c
    }

    /// Time of the daily peak, `ln B / C − Δt`.
    pub fn peak_time(&self) -> f64 {
        self.b.ln() / self.c - self.t_shift
    }

    /// Height of the daily peak, `A·C/4`.
    pub fn peak_height(&self) -> f64 {
        self.a * self.c / 4.0
    }
}

/// Tuning knobs for segmentation and fitting.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FitConfig {
    /// Centred moving-average window used before valley detection (odd).
    pub smoothing_window: usize,
    /// A valley separates two waves only when the smoothed daily series
    /// dips below `valley_ratio` × the smaller adjacent peak height;
    /// shallower dips merge the peaks into one wave.
    pub valley_ratio: f64,
    /// Segments shorter than this are merged into a neighbour.
    pub min_segment_len: usize,
    /// Iteration budget for each least-squares solve.
    pub max_iterations: usize,
    /// Convergence threshold on the relative parameter step.
    pub tolerance: f64,
    /// Re-fit all wave parameters jointly after the per-segment fits.
    pub joint_refinement: bool,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            smoothing_window: 7,
            valley_ratio: 0.95,
            min_segment_len: 21,
            max_iterations: 200,
            tolerance: 1e-8,
            joint_refinement: true,
        }
    }
}

impl FitConfig {
    pub fn validate(&self) -> Result<()> {
        if self.smoothing_window == 0 || self.smoothing_window % 2 == 0 {
            return Err(Error::InvalidParameter(format!(
                "smoothing_window must be odd and positive, got {}",
                self.smoothing_window
            )));
        }
        if !(self.valley_ratio > 0.0 && self.valley_ratio < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "valley_ratio must lie in (0, 1), got {}",
                self.valley_ratio
            )));
        }
        if self.min_segment_len < 2 {
            return Err(Error::InvalidParameter(
                "min_segment_len must be at least 2".into(),
            ));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidParameter(
                "max_iterations must be positive".into(),
            ));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::InvalidParameter(
                "tolerance must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// A fitted sum of logistic waves.
#[derive(Debug, Clone, Serialize)]
pub struct CompositeFit {
    /// Waves ordered by peak time.
    pub waves: Vec<LogisticWave>,
    /// Half-open index ranges of the segments the waves were seeded from.
    pub segments: Vec<(usize, usize)>,
    /// Root-mean-square residual of the cumulative series.
    pub rms_residual: f64,
    /// Total least-squares iterations spent.
    pub iterations: usize,
}

impl CompositeFit {
    pub fn eval_cumulative(&self, t: f64) -> f64 {
        self.waves.iter().map(|w| w.eval_cumulative(t)).sum()
    }

    pub fn eval_daily(&self, t: f64) -> f64 {
        self.waves.iter().map(|w| w.eval_daily(t)).sum()
    }

    /// `(peak time, peak height)` per wave, in wave order.
    pub fn peaks(&self) -> Vec<(f64, f64)> {
        self.waves
            .iter()
            .map(|w| (w.peak_time(), w.peak_height()))
            .collect()
    }
}

/// Split a daily series into per-wave segments.
///
/// The series is smoothed, its local maxima are collected, and adjacent
/// maxima are merged until every remaining pair is separated by a valley
/// dipping below `valley_ratio` × the smaller peak. Cut points sit at the
/// deepest sample between surviving peaks; segments shorter than
/// `min_segment_len` are then merged across their weakest boundary.
/// Returns half-open `(start, end)` ranges covering the whole series.
pub fn segment_waves(daily: &[f64], cfg: &FitConfig) -> Result<Vec<(usize, usize)>> {
    cfg.validate()?;
    let n = daily.len();
    if n == 0 {
        return Err(Error::EmptyInput("daily series is empty".into()));
    }
    if daily.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput(
            "daily series contains non-finite values".into(),
        ));
    }
    if n < 3 {
        return Ok(vec![(0, n)]);
    }

    // Clamp the window to the series length, keeping it odd.
    let window = cfg.smoothing_window.min(if n % 2 == 0 { n - 1 } else { n });
    let smoothed = moving_average(daily, window);

    // Interior local maxima with positive height.
    let mut peaks: Vec<usize> = (1..n - 1)
        .filter(|&i| {
            smoothed[i] > smoothed[i - 1] && smoothed[i] >= smoothed[i + 1] && smoothed[i] > 0.0
        })
        .collect();

    // Merge adjacent peaks whose separating valley is too shallow,
    // always resolving the shallowest separation first.
    while peaks.len() > 1 {
        let mut worst: Option<(usize, f64)> = None;
        for p in 0..peaks.len() - 1 {
            let (l, r) = (peaks[p], peaks[p + 1]);
            let valley = smoothed[l..=r].iter().cloned().fold(f64::MAX, f64::min);
            let ratio = valley / smoothed[l].min(smoothed[r]);
            if worst.map_or(true, |(_, w)| ratio > w) {
                worst = Some((p, ratio));
            }
        }
        let (p, ratio) = worst.unwrap();
        if ratio < cfg.valley_ratio {
            break;
        }
        // Too shallow: drop the smaller of the two peaks.
        if smoothed[peaks[p]] <= smoothed[peaks[p + 1]] {
            peaks.remove(p);
        } else {
            peaks.remove(p + 1);
        }
    }

    // Cut at the deepest sample between surviving peaks.
    let mut cuts: Vec<usize> = Vec::new();
    for p in 0..peaks.len().saturating_sub(1) {
        let (l, r) = (peaks[p], peaks[p + 1]);
        let cut = (l..=r)
            .min_by(|&i, &j| smoothed[i].partial_cmp(&smoothed[j]).unwrap())
            .unwrap();
        cuts.push(cut);
    }

    // Enforce the minimum segment length by removing the weakest boundary
    // (the cut with the highest smoothed value) of each offending segment.
    loop {
        let bounds: Vec<usize> = std::iter::once(0)
            .chain(cuts.iter().cloned())
            .chain(std::iter::once(n))
            .collect();
        let short = (0..bounds.len() - 1)
            .find(|&s| bounds[s + 1] - bounds[s] < cfg.min_segment_len);
        let Some(s) = short else { break };
        if cuts.is_empty() {
            break;
        }
        // Candidate cuts bounding segment s: index s−1 (left) and s (right).
        let left = s.checked_sub(1);
        let right = if s < cuts.len() { Some(s) } else { None };
        let remove = match (left, right) {
            (Some(l), Some(r)) => {
                if smoothed[cuts[l]] >= smoothed[cuts[r]] {
                    l
                } else {
                    r
                }
            }
            (Some(l), None) => l,
            (None, Some(r)) => r,
            (None, None) => break,
        };
        cuts.remove(remove);
    }

    let bounds: Vec<usize> = std::iter::once(0)
        .chain(cuts.iter().cloned())
        .chain(std::iter::once(n))
        .collect();
    Ok(bounds.windows(2).map(|w| (w[0], w[1])).collect())
}

/// Pack a wave into least-squares parameter space: positive parameters as
/// logarithms so the solver can roam freely.
fn pack(w: &LogisticWave) -> [f64; 5] {
    [w.a.ln(), w.b.ln(), w.c.ln(), w.t_shift, w.d]
}

fn unpack(theta: &[f64]) -> LogisticWave {
    LogisticWave {
        a: theta[0].exp(),
        b: theta[1].exp(),
        c: theta[2].exp(),
        t_shift: theta[3],
        d: theta[4],
    }
}

/// Accumulate the residual row and Jacobian block of one wave at time `t`.
/// Jacobian columns are ordered `[ln A, ln B, ln C, Δt, d]`.
fn wave_row(theta: &[f64], t: f64) -> (f64, [f64; 5]) {
    let (ln_a, ln_b, ln_c, t_shift, d) = (theta[0], theta[1], theta[2], theta[3], theta[4]);
    let a = ln_a.exp();
    let c = ln_c.exp();
    let s = ln_b - c * (t + t_shift);
    let sig_pos = sigma(s);
    let sig_neg = sigma(-s);
    let value = a * sig_neg + d;
    let pulse = a * sig_pos * sig_neg; // A·σ(s)·σ(−s)
    (
        value,
        [
            a * sig_neg,             // ∂/∂lnA
            -pulse,                  // ∂/∂lnB
            pulse * c * (t + t_shift), // ∂/∂lnC
            pulse * c,               // ∂/∂Δt
            1.0,                     // ∂/∂d
        ],
    )
}

/// Initial wave guess for one segment of the (residual) cumulative curve.
fn seed_wave(days: &[f64], target: &[f64], seg: (usize, usize)) -> Result<LogisticWave> {
    let (start, end) = seg;
    let rise = target[end - 1] - target[start];
    if !(rise > 0.0) {
        return Err(Error::DegenerateFit(format!(
            "segment [{start}, {end}) has no net rise to fit"
        )));
    }
    // Steepest daily climb inside the segment locates the peak.
    let mut max_daily = 0.0;
    let mut t_peak = days[start];
    for i in start..end - 1 {
        let dt = days[i + 1] - days[i];
        let slope = (target[i + 1] - target[i]) / dt.max(1e-12);
        if slope > max_daily {
            max_daily = slope;
            t_peak = 0.5 * (days[i] + days[i + 1]);
        }
    }
    let a = rise;
    let c = (4.0 * max_daily / rise).clamp(1e-4, 10.0);
    let t_shift = -days[start];
    let b = (c * (t_peak + t_shift)).max(0.0).exp();
    let d = target[start];
    LogisticWave::new(a, b, c, t_shift, d)
}

/// Fit one wave to `target` over the index range `seg`.
fn fit_single(
    days: &[f64],
    target: &[f64],
    seg: (usize, usize),
    cfg: &FitConfig,
) -> Result<(LogisticWave, usize)> {
    let seed = seed_wave(days, target, seg)?;
    let (start, end) = seg;
    let eval = |p: &nalgebra::DVector<f64>,
                r: &mut nalgebra::DVector<f64>,
                j: &mut nalgebra::DMatrix<f64>| {
        let m = end - start;
        if r.len() != m {
            *r = nalgebra::DVector::zeros(m);
            *j = nalgebra::DMatrix::zeros(m, 5);
        }
        let theta = p.as_slice();
        for (row, i) in (start..end).enumerate() {
            let (value, grad) = wave_row(theta, days[i]);
            r[row] = value - target[i];
            for (col, g) in grad.iter().enumerate() {
                j[(row, col)] = *g;
            }
        }
    };
    let sol = lm::minimize(
        eval,
        nalgebra::DVector::from_row_slice(&pack(&seed)),
        &lm::Options {
            max_iterations: cfg.max_iterations,
            tolerance: cfg.tolerance,
        },
    )?;
    Ok((unpack(sol.params.as_slice()), sol.iterations))
}

/// Refine all waves jointly against the full cumulative series.
fn refine_jointly(
    days: &[f64],
    cumulative: &[f64],
    waves: &[LogisticWave],
    cfg: &FitConfig,
) -> Result<(Vec<LogisticWave>, usize)> {
    let n_waves = waves.len();
    let m = days.len();
    if m < 5 * n_waves {
        // Not enough data to refine jointly; keep the per-segment result.
        return Ok((waves.to_vec(), 0));
    }
    let mut init = Vec::with_capacity(5 * n_waves);
    for w in waves {
        init.extend_from_slice(&pack(w));
    }
    let eval = |p: &nalgebra::DVector<f64>,
                r: &mut nalgebra::DVector<f64>,
                j: &mut nalgebra::DMatrix<f64>| {
        if r.len() != m {
            *r = nalgebra::DVector::zeros(m);
            *j = nalgebra::DMatrix::zeros(m, 5 * n_waves);
        }
        for (row, (&t, &y)) in days.iter().zip(cumulative).enumerate() {
            let mut total = 0.0;
            for w in 0..n_waves {
                let theta = &p.as_slice()[5 * w..5 * w + 5];
                let (value, grad) = wave_row(theta, t);
                total += value;
                for (col, g) in grad.iter().enumerate() {
                    j[(row, 5 * w + col)] = *g;
                }
            }
            r[row] = total - y;
        }
    };
    let sol = lm::minimize(
        eval,
        nalgebra::DVector::from_vec(init),
        &lm::Options {
            max_iterations: cfg.max_iterations,
            tolerance: cfg.tolerance,
        },
    )?;
    let waves = sol
        .params
        .as_slice()
        .chunks(5)
        .map(unpack)
        .collect::<Vec<_>>();
    Ok((waves, sol.iterations))
}

/// Decompose a cumulative series sampled at `days` into logistic waves.
///
/// Segments the daily first differences, fits one wave per segment
/// against the residual cumulative curve, then (by default) refines all
/// parameters jointly. The returned waves are ordered by peak time.
pub fn fit_composite(days: &[f64], cumulative: &[f64], cfg: &FitConfig) -> Result<CompositeFit> {
    cfg.validate()?;
    if days.len() != cumulative.len() {
        return Err(Error::InvalidInput(format!(
            "days ({}) and cumulative ({}) lengths differ",
            days.len(),
            cumulative.len()
        )));
    }
    if days.len() < 5 {
        return Err(Error::EmptyInput(
            "need at least five samples to fit a wave".into(),
        ));
    }
    if days.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput(
            "days must be strictly increasing".into(),
        ));
    }
    if cumulative.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput(
            "cumulative series contains non-finite values".into(),
        ));
    }

    // Daily series for segmentation; the first sample keeps its own mass.
    let mut daily = Vec::with_capacity(days.len());
    daily.push(cumulative[0]);
    for i in 1..cumulative.len() {
        daily.push(cumulative[i] - cumulative[i - 1]);
    }
    let segments = segment_waves(&daily, cfg)?;

    let mut waves: Vec<LogisticWave> = Vec::with_capacity(segments.len());
    let mut iterations = 0;
    let mut residual = cumulative.to_vec();
    for &seg in &segments {
        let (wave, iters) = fit_single(days, &residual, seg, cfg)?;
        iterations += iters;
        // Subtract the fitted wave before seeding the next segment.
        for (r, &t) in residual.iter_mut().zip(days) {
            *r -= wave.eval_cumulative(t);
        }
        waves.push(wave);
    }

    if cfg.joint_refinement {
        let (refined, iters) = refine_jointly(days, cumulative, &waves, cfg)?;
        waves = refined;
        iterations += iters;
    }

    waves.sort_by(|x, y| x.peak_time().partial_cmp(&y.peak_time()).unwrap());
    let sse: f64 = days
        .iter()
        .zip(cumulative)
        .map(|(&t, &y)| {
            let m: f64 = waves.iter().map(|w| w.eval_cumulative(t)).sum();
            (m - y) * (m - y)
        })
        .sum();
    Ok(CompositeFit {
        waves,
        segments,
        rms_residual: (sse / days.len() as f64).sqrt(),
        iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn wave(a: f64, b: f64, c: f64) -> LogisticWave {
        LogisticWave::new(a, b, c, 0.0, 0.0).unwrap()
    }

    #[test]
    fn cumulative_matches_the_naive_formula_at_moderate_arguments() {
        let w = LogisticWave::new(0.015, 28.948, 0.054, 3.0, 0.002).unwrap();
        for t in [-20.0, 0.0, 35.7, 120.0] {
            let naive = 0.015 / (1.0 + 28.948 * (-0.054_f64 * (t + 3.0)).exp()) + 0.002;
            assert_abs_diff_eq!(w.eval_cumulative(t), naive, epsilon = 1e-15);
        }
    }

    #[test]
    fn evaluation_saturates_cleanly_at_extreme_arguments() {
        let w = LogisticWave::new(0.015, 28.948, 0.054, 0.0, 0.002).unwrap();
        assert_abs_diff_eq!(w.eval_cumulative(-1e5), 0.002, epsilon = 1e-15);
        assert_abs_diff_eq!(w.eval_cumulative(1e5), 0.017, epsilon = 1e-15);
        assert_eq!(w.eval_daily(-1e5), 0.0);
        assert_eq!(w.eval_daily(1e5), 0.0);
        assert!(w.eval_cumulative(f64::MIN_POSITIVE).is_finite());
    }

    #[test]
    fn daily_value_is_the_derivative_of_the_cumulative_curve() {
        let w = LogisticWave::new(0.08, 22.432, 0.032, -5.0, 0.01).unwrap();
        for t in [0.0, 50.0, w.peak_time(), 200.0] {
            let h = 1e-5;
            let fd = (w.eval_cumulative(t + h) - w.eval_cumulative(t - h)) / (2.0 * h);
            assert_abs_diff_eq!(w.eval_daily(t), fd, epsilon = 1e-9);
        }
    }

    #[test]
    fn peak_time_and_height_follow_the_closed_forms() {
        let w = wave(0.015, 28.948, 0.054);
        assert_abs_diff_eq!(w.peak_time(), 28.948_f64.ln() / 0.054, epsilon = 1e-12);
        assert_abs_diff_eq!(w.peak_height(), 0.015 * 0.054 / 4.0, epsilon = 1e-18);
        // The daily curve really is maximal there.
        let t0 = w.peak_time();
        assert!(w.eval_daily(t0) > w.eval_daily(t0 - 1.0));
        assert!(w.eval_daily(t0) > w.eval_daily(t0 + 1.0));
        assert_abs_diff_eq!(w.eval_daily(t0), w.peak_height(), epsilon = 1e-15);
    }

    #[test]
    fn invalid_parameters_are_rejected() {
        assert!(LogisticWave::new(0.0, 1.0, 0.1, 0.0, 0.0).is_err());
        assert!(LogisticWave::new(0.1, -1.0, 0.1, 0.0, 0.0).is_err());
        assert!(LogisticWave::new(0.1, 1.0, 0.0, 0.0, 0.0).is_err());
        assert!(LogisticWave::new(0.1, 1.0, 0.1, f64::NAN, 0.0).is_err());
    }

    #[test]
    fn config_validation_catches_bad_knobs() {
        let mut cfg = FitConfig::default();
        cfg.smoothing_window = 4;
        assert!(cfg.validate().is_err());
        let mut cfg = FitConfig::default();
        cfg.valley_ratio = 1.5;
        assert!(cfg.validate().is_err());
        let mut cfg = FitConfig::default();
        cfg.min_segment_len = 1;
        assert!(cfg.validate().is_err());
        assert!(FitConfig::default().validate().is_ok());
    }

    /// Daily profile of a sum of waves sampled on integer days.
    fn daily_series(waves: &[LogisticWave], len: usize) -> Vec<f64> {
        (0..len)
            .map(|t| waves.iter().map(|w| w.eval_daily(t as f64)).sum())
            .collect()
    }

    fn cumulative_series(waves: &[LogisticWave], len: usize) -> (Vec<f64>, Vec<f64>) {
        let days: Vec<f64> = (0..len).map(|t| t as f64).collect();
        let cum: Vec<f64> = days
            .iter()
            .map(|&t| waves.iter().map(|w| w.eval_cumulative(t)).sum())
            .collect();
        (days, cum)
    }

    #[test]
    fn well_separated_humps_are_split_at_the_valley() {
        let waves = [
            wave(0.01, (0.08_f64 * 60.0).exp(), 0.08),
            wave(0.03, (0.06_f64 * 160.0).exp(), 0.06),
        ];
        let daily = daily_series(&waves, 260);
        let segs = segment_waves(&daily, &FitConfig::default()).unwrap();
        assert_eq!(segs.len(), 2, "segments: {segs:?}");
        let cut = segs[0].1;
        assert!((90..=135).contains(&cut), "cut at {cut}");
        assert_eq!(segs[0].0, 0);
        assert_eq!(segs[1].1, 260);
    }

    #[test]
    fn a_single_hump_yields_a_single_segment() {
        let daily = daily_series(&[wave(0.02, 150.0, 0.07)], 160);
        let segs = segment_waves(&daily, &FitConfig::default()).unwrap();
        assert_eq!(segs, vec![(0, 160)]);
    }

    #[test]
    fn shallow_ripples_on_one_hump_are_merged() {
        // A deterministic 1% ripple carves several local maxima near the
        // top of the hump; all must merge back into one wave.
        let base = wave(0.02, 150.0, 0.07);
        let daily: Vec<f64> = (0..160)
            .map(|t| {
                let t = t as f64;
                base.eval_daily(t) * (1.0 + 0.01 * (t * 1.3).sin())
            })
            .collect();
        let segs = segment_waves(&daily, &FitConfig::default()).unwrap();
        assert_eq!(segs, vec![(0, 160)]);
    }

    #[test]
    fn short_leading_segments_are_absorbed() {
        // A narrow early blip would leave a 12-day segment; the minimum
        // segment length folds it into the main wave.
        let blip = LogisticWave::new(0.002, (1.2_f64 * 5.0).exp(), 1.2, 0.0, 0.0).unwrap();
        let main = wave(0.03, (0.09_f64 * 60.0).exp(), 0.09);
        let daily: Vec<f64> = (0..140)
            .map(|t| blip.eval_daily(t as f64) + main.eval_daily(t as f64))
            .collect();
        let mut cfg = FitConfig::default();
        cfg.valley_ratio = 0.5; // deep valley between blip and main wave
        let segs = segment_waves(&daily, &cfg).unwrap();
        assert_eq!(segs, vec![(0, 140)], "blip segment must be merged");
    }

    #[test]
    fn fitting_recovers_a_single_exact_wave() {
        let truth = wave(0.02, 100.0, 0.07);
        let (days, cum) = cumulative_series(&[truth], 200);
        let fit = fit_composite(&days, &cum, &FitConfig::default()).unwrap();
        assert_eq!(fit.waves.len(), 1);
        let w = &fit.waves[0];
        assert_abs_diff_eq!(w.a, truth.a, epsilon = 1e-6 * truth.a);
        assert_abs_diff_eq!(w.c, truth.c, epsilon = 1e-6 * truth.c);
        assert_abs_diff_eq!(w.peak_time(), truth.peak_time(), epsilon = 1e-4);
        assert!(fit.rms_residual < 1e-9, "rms {}", fit.rms_residual);
    }

    #[test]
    fn fitting_decomposes_two_exact_waves() {
        let truth = [
            wave(0.01, (0.08_f64 * 60.0).exp(), 0.08),
            wave(0.03, (0.06_f64 * 160.0).exp(), 0.06),
        ];
        let (days, cum) = cumulative_series(&truth, 260);
        let fit = fit_composite(&days, &cum, &FitConfig::default()).unwrap();
        assert_eq!(fit.waves.len(), 2);
        for (w, t) in fit.waves.iter().zip(&truth) {
            assert_abs_diff_eq!(w.peak_time(), t.peak_time(), epsilon = 0.1);
            assert_abs_diff_eq!(
                w.peak_height(),
                t.peak_height(),
                epsilon = 0.005 * t.peak_height()
            );
        }
        assert!(fit.rms_residual < 1e-7, "rms {}", fit.rms_residual);
    }

    #[test]
    fn exhausting_the_iteration_budget_reports_the_last_iterate() {
        let truth = wave(0.02, 100.0, 0.07);
        let (days, cum) = cumulative_series(&[truth], 200);
        let mut cfg = FitConfig::default();
        cfg.max_iterations = 1;
        cfg.tolerance = 1e-15;
        let err = fit_composite(&days, &cum, &cfg).unwrap_err();
        match err {
            Error::NonConvergence { last, .. } => assert_eq!(last.len(), 5),
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }

    #[test]
    fn mismatched_and_degenerate_inputs_are_rejected() {
        let cfg = FitConfig::default();
        assert!(fit_composite(&[0.0, 1.0], &[0.0], &cfg).is_err());
        assert!(fit_composite(&[0.0, 1.0, 1.0, 2.0, 3.0], &[0.0; 5], &cfg).is_err());
        // Flat series: no rise to fit.
        let days: Vec<f64> = (0..30).map(|t| t as f64).collect();
        let flat = vec![0.5; 30];
        assert!(matches!(
            fit_composite(&days, &flat, &cfg),
            Err(Error::DegenerateFit(_))
        ));
    }
}
