//! Susceptible–infectious–recovered compartment model, in population
//! fractions:
//!
//! ```text
//! ds/dt = −β·s·i,   di/dt = β·s·i − γ·i,   dr/dt = γ·i
//! ```
//!
//! The right-hand sides sum to zero, so `s+i+r` is conserved exactly by
//! the flow (and to rounding by the integrator). The cumulative infected
//! fraction `1−s(t)` of a single outbreak closely follows one logistic
//! wave when `β/γ` is modestly above 1; [`logistic_reduction_check`]
//! quantifies that reduction.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::logistic::{fit_composite, FitConfig, LogisticWave};
use crate::rk4;

/// Epidemic parameters, in per-day rates and population fractions.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SirConfig {
    /// Transmission rate β.
    pub beta: f64,
    /// Recovery rate γ.
    pub gamma: f64,
    /// Initial infectious fraction.
    pub i0: f64,
    /// Initially recovered (immune) fraction.
    pub recovered0: f64,
}

impl SirConfig {
    pub fn new(beta: f64, gamma: f64, i0: f64, recovered0: f64) -> Result<Self> {
        if !(beta >= 0.0) || !beta.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "beta must be non-negative, got {beta}"
            )));
        }
        if !(gamma > 0.0) || !gamma.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "gamma must be positive, got {gamma}"
            )));
        }
        if !(i0 > 0.0 && i0 < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "i0 must lie strictly between 0 and 1, got {i0}"
            )));
        }
        if !(recovered0 >= 0.0) || i0 + recovered0 >= 1.0 {
            return Err(Error::InvalidParameter(format!(
                "recovered0 must be non-negative with i0 + recovered0 < 1, got {recovered0}"
            )));
        }
        Ok(Self {
            beta,
            gamma,
            i0,
            recovered0,
        })
    }

    pub fn s0(&self) -> f64 {
        1.0 - self.i0 - self.recovered0
    }

    /// Basic reproduction number `β/γ`.
    pub fn basic_reproduction_number(&self) -> f64 {
        self.beta / self.gamma
    }
}

/// A sampled epidemic trajectory in fractions.
#[derive(Debug, Clone, Serialize)]
pub struct SirTrajectory {
    pub times: Vec<f64>,
    pub s: Vec<f64>,
    pub i: Vec<f64>,
    pub r: Vec<f64>,
}

impl SirTrajectory {
    /// Largest departure of `s+i+r` from 1 along the trajectory.
    pub fn conservation_drift(&self) -> f64 {
        self.s
            .iter()
            .zip(&self.i)
            .zip(&self.r)
            .map(|((s, i), r)| (s + i + r - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// Cumulative infected fraction `1−s(t)`.
    pub fn cumulative_infected(&self) -> Vec<f64> {
        self.s.iter().map(|s| 1.0 - s).collect()
    }

    pub fn final_susceptible(&self) -> f64 {
        *self.s.last().unwrap()
    }
}

/// Integrate the model with fixed-step RK4.
pub fn simulate(cfg: &SirConfig, t_end: f64, dt: f64) -> Result<SirTrajectory> {
    if !(dt > 0.0) || !dt.is_finite() || !(t_end > 0.0) || !t_end.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "t_end and dt must be positive, got t_end={t_end}, dt={dt}"
        )));
    }
    let steps = (t_end / dt).ceil() as usize;
    let (beta, gamma) = (cfg.beta, cfg.gamma);
    let f = move |_t: f64, y: &[f64; 3]| {
        let force = beta * y[0] * y[1];
        [-force, force - gamma * y[1], gamma * y[1]]
    };
    let mut traj = SirTrajectory {
        times: Vec::with_capacity(steps + 1),
        s: Vec::with_capacity(steps + 1),
        i: Vec::with_capacity(steps + 1),
        r: Vec::with_capacity(steps + 1),
    };
    rk4::integrate(
        f,
        [cfg.s0(), cfg.i0, cfg.recovered0],
        0.0,
        dt,
        steps,
        |t, y| {
            traj.times.push(t);
            traj.s.push(y[0]);
            traj.i.push(y[1]);
            traj.r.push(y[2]);
        },
    );
    Ok(traj)
}

/// Final susceptible fraction from the implicit final-size relation
/// `s∞ = s₀·exp(−(β/γ)(1 − s∞ − r₀))`, solved by bisection.
///
/// This is independent of any time stepping, which makes it a useful
/// cross-check for long simulations.
pub fn final_size_susceptible(cfg: &SirConfig) -> f64 {
    let r0 = cfg.basic_reproduction_number();
    let s0 = cfg.s0();
    let f = |x: f64| x - s0 * (-r0 * (1.0 - x - cfg.recovered0)).exp();
    let mut lo = 0.0;
    let mut hi = s0;
    // f(0) < 0 and f(s0) = s0(1 − e^{−R0·i0}) > 0.
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Outcome of fitting one logistic wave to the cumulative infected curve.
#[derive(Debug, Clone, Serialize)]
pub struct ReductionReport {
    /// The fitted wave.
    pub wave: LogisticWave,
    /// RMS residual of the fit on the sampled curve.
    pub rms_residual: f64,
    /// RMS residual relative to the final cumulative value.
    pub relative_rms: f64,
    /// Final cumulative infected fraction.
    pub final_value: f64,
    /// Sign changes of the curve's second difference (1 for a clean
    /// single-inflection sigmoid).
    pub inflection_changes: usize,
    /// End of the fitted window (the epidemic's active span).
    pub window_end: f64,
}

/// Simulate an outbreak and measure how well one logistic wave describes
/// the cumulative infected fraction.
///
/// The fit covers the epidemic's active window — from the start until the
/// infectious fraction falls back below its initial value — so the
/// residual measures shape mismatch rather than the length of the flat
/// plateau after the outbreak. Requires `β > γ`; below that threshold no
/// outbreak develops and the reduction does not apply.
pub fn logistic_reduction_check(cfg: &SirConfig, t_end: f64, dt: f64) -> Result<ReductionReport> {
    if cfg.beta <= cfg.gamma {
        return Err(Error::Unsupported(format!(
            "the logistic reduction applies only to growing outbreaks (beta {} <= gamma {})",
            cfg.beta, cfg.gamma
        )));
    }
    let traj = simulate(cfg, t_end, dt)?;
    let y = traj.cumulative_infected();

    // Trim to the active window: everything past the point where the
    // infectious fraction has fallen back to its seed level is plateau.
    let peak_idx = traj
        .i
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .map(|(i, _)| i)
        .unwrap_or(0);
    let cut = (peak_idx..traj.i.len())
        .find(|&j| traj.i[j] <= cfg.i0)
        .unwrap_or(traj.i.len() - 1);
    let y = &y[..=cut];

    // Subsample for the fit: a few hundred points carry the whole shape.
    let stride = (y.len() / 500).max(1);
    let days: Vec<f64> = traj.times[..=cut].iter().step_by(stride).cloned().collect();
    let sub: Vec<f64> = y.iter().step_by(stride).cloned().collect();

    let mut fit_cfg = FitConfig::default();
    fit_cfg.min_segment_len = fit_cfg.min_segment_len.min(sub.len() / 2);
    let fit = fit_composite(&days, &sub, &fit_cfg)?;
    let wave = fit.waves[0];

    let final_value = *y.last().unwrap();
    let inflection_changes = count_inflections(&sub);
    Ok(ReductionReport {
        wave,
        rms_residual: fit.rms_residual,
        relative_rms: fit.rms_residual / final_value,
        final_value,
        inflection_changes,
        window_end: traj.times[cut],
    })
}

/// Count sign changes of the second difference, ignoring magnitudes in
/// the rounding noise floor.
fn count_inflections(y: &[f64]) -> usize {
    let d2: Vec<f64> = y.windows(3).map(|w| w[2] - 2.0 * w[1] + w[0]).collect();
    let scale = d2.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        return 0;
    }
    let mut count = 0;
    let mut last_sign = 0i8;
    for v in d2 {
        if v.abs() < 1e-6 * scale {
            continue;
        }
        let sign = if v > 0.0 { 1 } else { -1 };
        if last_sign != 0 && sign != last_sign {
            count += 1;
        }
        last_sign = sign;
    }
    count
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn mild() -> SirConfig {
        SirConfig::new(0.15, 0.1, 1e-5, 0.0).unwrap()
    }

    #[test]
    fn config_validation() {
        assert!(SirConfig::new(-0.1, 0.1, 1e-5, 0.0).is_err());
        assert!(SirConfig::new(0.1, 0.0, 1e-5, 0.0).is_err());
        assert!(SirConfig::new(0.1, 0.1, 0.0, 0.0).is_err());
        assert!(SirConfig::new(0.1, 0.1, 0.5, 0.6).is_err());
        assert_abs_diff_eq!(mild().basic_reproduction_number(), 1.5, epsilon = 1e-15);
        assert_abs_diff_eq!(mild().s0(), 1.0 - 1e-5, epsilon = 1e-18);
    }

    #[test]
    fn population_is_conserved_to_rounding() {
        let traj = simulate(&mild(), 400.0, 0.05).unwrap();
        assert!(
            traj.conservation_drift() < 1e-10,
            "drift {}",
            traj.conservation_drift()
        );
    }

    #[test]
    fn compartments_are_monotone_where_expected() {
        let traj = simulate(&mild(), 400.0, 0.05).unwrap();
        assert!(traj.s.windows(2).all(|w| w[1] <= w[0] + 1e-15));
        assert!(traj.r.windows(2).all(|w| w[1] >= w[0] - 1e-15));
        assert!(traj.s.iter().all(|&v| (0.0..=1.0).contains(&v)));
        assert!(traj.i.iter().all(|&v| (0.0..=1.0).contains(&v)));
    }

    #[test]
    fn long_run_matches_the_final_size_relation() {
        let cfg = mild();
        let oracle = final_size_susceptible(&cfg);
        // At β/γ = 1.5 roughly 58% of the population is eventually hit.
        assert!(oracle > 0.40 && oracle < 0.45, "oracle {oracle}");
        let traj = simulate(&cfg, 800.0, 0.05).unwrap();
        assert!(
            (traj.final_susceptible() - oracle).abs() < 1e-4,
            "simulated {} vs implicit relation {}",
            traj.final_susceptible(),
            oracle
        );
    }

    #[test]
    fn final_size_is_consistent_with_prior_immunity() {
        let cfg = SirConfig::new(0.3, 0.1, 1e-4, 0.3).unwrap();
        let oracle = final_size_susceptible(&cfg);
        let traj = simulate(&cfg, 600.0, 0.05).unwrap();
        assert!((traj.final_susceptible() - oracle).abs() < 1e-4);
    }

    #[test]
    fn mild_outbreaks_reduce_to_a_single_logistic_wave() {
        let report = logistic_reduction_check(&mild(), 500.0, 0.05).unwrap();
        assert!(
            report.relative_rms < 0.02,
            "relative rms {}",
            report.relative_rms
        );
        assert_eq!(report.inflection_changes, 1);
        assert!(report.final_value > 0.5);
    }

    #[test]
    fn sharper_outbreaks_fit_worse_than_mild_ones() {
        let mild_report = logistic_reduction_check(&mild(), 500.0, 0.05).unwrap();
        let sharp = SirConfig::new(0.4, 0.1, 1e-5, 0.0).unwrap();
        let sharp_report = logistic_reduction_check(&sharp, 500.0, 0.05).unwrap();
        assert!(
            sharp_report.relative_rms > mild_report.relative_rms,
            "sharp {} vs mild {}",
            sharp_report.relative_rms,
            mild_report.relative_rms
        );
    }

    #[test]
    fn shrinking_outbreaks_are_not_reducible() {
        let cfg = SirConfig::new(0.08, 0.1, 1e-3, 0.0).unwrap();
        assert!(matches!(
            logistic_reduction_check(&cfg, 100.0, 0.05),
            Err(Error::Unsupported(_))
        ));
    }
}
