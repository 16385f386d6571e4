//! Korteweg–de Vries solitary-wave machinery on a periodic domain:
//!
//! ```text
//! u_t + 6·u·u_x + δ·u_xxx = −c₁
//! ```
//!
//! with dispersion coefficient `δ` and a uniform sink `c₁ ≥ 0`. In the
//! conservative canonical form (`δ = 1`, `c₁ = 0`) the single soliton
//!
//! ```text
//! u(x, t) = 2κ²·sech²(κ(x − x₀ − 4κ²t))
//! ```
//!
//! has amplitude `2κ²`, velocity `4κ²` and width `1/κ`, and the
//! reflectionless initial profile `n(n+1)κ²·sech²(κx)` splits into a
//! train of `n` solitons with amplitudes `2j²κ²` and velocities `4j²κ²`.
//!
//! With a sink, the family of translated profiles
//!
//! ```text
//! P(x, t) = n(n+1)κ²·sech²(κ(x − 4κ²t + c₁t²/2)) − c₁·t
//! ```
//!
//! carries its crest along the parabola `x̂(t) = 4κ²t − c₁t²/2`: the
//! crest advances, decelerates, and returns to its starting abscissa at
//! `t = 8κ²/c₁` — so return times of two such profiles scale exactly like
//! their amplitudes, `(κ₂/κ₁)²`. [`measured_return_time`] recovers that
//! time numerically by tracking the crest of the evaluated profile.
//!
//! The spatial cumulative of the single soliton is exactly one logistic
//! sigmoid; [`soliton_to_sigmoid`] returns that correspondence.

mod spectral;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::logistic::LogisticWave;
use spectral::{PseudoSpectral, RK4_IMAG_LIMIT};

/// Discretisation and equation parameters.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct KdvConfig {
    /// Periodic domain length `L`; the grid is `x_j = j·L/N`.
    pub domain_length: f64,
    /// Number of grid points `N` (even; powers of two are fastest).
    pub n_points: usize,
    /// Dispersion coefficient `δ`.
    pub dispersion: f64,
    /// Uniform sink `c₁`.
    pub sink: f64,
    /// Fraction of the pure-dispersion RK4 stability step actually taken.
    pub alpha_stability: f64,
}

impl KdvConfig {
    pub fn new(domain_length: f64, n_points: usize, dispersion: f64, sink: f64) -> Result<Self> {
        let cfg = Self {
            domain_length,
            n_points,
            dispersion,
            sink,
            alpha_stability: 0.25,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Override the stability fraction (must stay in `(0, 0.3]`, the
    /// range where the retained dispersive spectrum fits the RK4
    /// stability region).
    pub fn with_alpha_stability(mut self, alpha: f64) -> Result<Self> {
        self.alpha_stability = alpha;
        self.validate()?;
        Ok(self)
    }

    fn validate(&self) -> Result<()> {
        if !(self.domain_length > 0.0) || !self.domain_length.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "domain_length must be positive, got {}",
                self.domain_length
            )));
        }
        if self.n_points < 16 || self.n_points % 2 != 0 {
            return Err(Error::InvalidParameter(format!(
                "n_points must be even and at least 16, got {}",
                self.n_points
            )));
        }
        if !(self.dispersion > 0.0) || !self.dispersion.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "dispersion must be positive, got {}",
                self.dispersion
            )));
        }
        if !(self.sink >= 0.0) || !self.sink.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "sink must be non-negative, got {}",
                self.sink
            )));
        }
        if !(self.alpha_stability > 0.0 && self.alpha_stability <= 0.3) {
            return Err(Error::InvalidParameter(format!(
                "alpha_stability must lie in (0, 0.3], got {}",
                self.alpha_stability
            )));
        }
        Ok(())
    }

    pub fn dx(&self) -> f64 {
        self.domain_length / self.n_points as f64
    }

    /// Fixed time step `α·Δx³/δ`.
    ///
    /// The retained spectrum after dealiasing reaches `k_keep = (2π/3)/Δx`,
    /// so pure dispersion is RK4-stable for `dt·δ·k_keep³ ≤ 2√2`, i.e.
    /// `dt ≤ 0.3076·Δx³/δ`; the default `α = 0.25` leaves margin for the
    /// advective term.
    pub fn dt(&self) -> f64 {
        self.alpha_stability * self.dx().powi(3) / self.dispersion
    }

    /// Grid abscissae.
    pub fn grid(&self) -> Vec<f64> {
        (0..self.n_points).map(|j| j as f64 * self.dx()).collect()
    }
}

/// A field sampled on the periodic grid at one time.
#[derive(Debug, Clone, Serialize)]
pub struct KdvState {
    pub x: Vec<f64>,
    pub u: Vec<f64>,
    pub t: f64,
}

impl KdvState {
    /// Discrete mass `Δx·Σu`.
    pub fn mass(&self) -> f64 {
        let dx = self.x[1] - self.x[0];
        dx * self.u.iter().sum::<f64>()
    }

    /// Discrete momentum `Δx·Σu²`.
    pub fn momentum(&self) -> f64 {
        let dx = self.x[1] - self.x[0];
        dx * self.u.iter().map(|v| v * v).sum::<f64>()
    }
}

/// Single-soliton parameters.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SolitonSpec {
    /// Shape parameter κ.
    pub kappa: f64,
    /// Initial crest position.
    pub x0: f64,
}

impl SolitonSpec {
    pub fn new(kappa: f64, x0: f64) -> Result<Self> {
        if !(kappa > 0.0) || !kappa.is_finite() || !x0.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "soliton needs positive finite kappa and finite x0, got ({kappa}, {x0})"
            )));
        }
        Ok(Self { kappa, x0 })
    }

    pub fn amplitude(&self) -> f64 {
        2.0 * self.kappa * self.kappa
    }

    pub fn velocity(&self) -> f64 {
        4.0 * self.kappa * self.kappa
    }

    pub fn width(&self) -> f64 {
        1.0 / self.kappa
    }

    /// The travelling-wave solution of the conservative equation.
    pub fn eval(&self, x: f64, t: f64) -> f64 {
        let arg = self.kappa * (x - self.x0 - self.velocity() * t);
        self.amplitude() / arg.cosh().powi(2)
    }
}

/// The `n(n+1)κ²·sech²(κ(x−x₀))` profile on given abscissae — for `n = 1`
/// a travelling soliton, for larger `n` the reflectionless seed of an
/// `n`-soliton train.
pub fn train_profile(n: usize, kappa: f64, x0: f64, xs: &[f64]) -> Result<Vec<f64>> {
    check_train_params(n, kappa)?;
    let amp = (n * (n + 1)) as f64 * kappa * kappa;
    Ok(xs
        .iter()
        .map(|&x| amp / (kappa * (x - x0)).cosh().powi(2))
        .collect())
}

fn check_train_params(n: usize, kappa: f64) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidParameter(
            "train order n must be at least 1".into(),
        ));
    }
    if !(kappa > 0.0) || !kappa.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "kappa must be positive and finite, got {kappa}"
        )));
    }
    Ok(())
}

/// Crest-translated sinking profile
/// `n(n+1)κ²·sech²(κ(x − 4κ²t + c₁t²/2)) − c₁·t` at one point.
pub fn sinking_profile(n: usize, kappa: f64, sink: f64, x: f64, t: f64) -> f64 {
    let amp = (n * (n + 1)) as f64 * kappa * kappa;
    let phase = kappa * (x - 4.0 * kappa * kappa * t + 0.5 * sink * t * t);
    amp / phase.cosh().powi(2) - sink * t
}

/// Closed-form time for the sinking profile's crest to return to its
/// starting abscissa: `8κ²/c₁`.
pub fn crest_return_time(kappa: f64, sink: f64) -> Result<f64> {
    if !(sink > 0.0) || !(kappa > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "crest return needs positive kappa and sink, got ({kappa}, {sink})"
        )));
    }
    Ok(8.0 * kappa * kappa / sink)
}

/// Measure the crest return time numerically: evaluate the sinking
/// profile on a grid, track the crest by parabolic refinement of the
/// maximum, and locate its crossing back through the starting abscissa
/// by linear interpolation in time.
pub fn measured_return_time(n: usize, kappa: f64, sink: f64) -> Result<f64> {
    check_train_params(n, kappa)?;
    let t_exact = crest_return_time(kappa, sink)?;
    // The crest excursion peaks at 8κ⁴/c₁; pad by a few widths.
    let apex = 8.0 * kappa.powi(4) / sink;
    let margin = 4.0 / kappa;
    let dx = 0.02 / kappa;
    let n_pts = ((apex + 2.0 * margin) / dx).ceil() as usize;
    let xs: Vec<f64> = (0..n_pts).map(|j| -margin + j as f64 * dx).collect();

    let dt = t_exact / 2000.0;
    let crest_at = |t: f64| -> f64 {
        let mut best = 0;
        let mut best_v = f64::MIN;
        for (j, &x) in xs.iter().enumerate() {
            let v = sinking_profile(n, kappa, sink, x, t);
            if v > best_v {
                best_v = v;
                best = j;
            }
        }
        let j = best.clamp(1, n_pts - 2);
        let (l, c, r) = (
            sinking_profile(n, kappa, sink, xs[j - 1], t),
            sinking_profile(n, kappa, sink, xs[j], t),
            sinking_profile(n, kappa, sink, xs[j + 1], t),
        );
        let denom = l - 2.0 * c + r;
        let offset = if denom.abs() > 0.0 {
            0.5 * (l - r) / denom
        } else {
            0.0
        };
        xs[j] + offset * dx
    };

    let start = crest_at(0.0);
    let mut prev_t = 0.0;
    let mut prev_x = start;
    let mut past_apex = false;
    let mut t = dt;
    while t <= 1.5 * t_exact {
        let x = crest_at(t);
        if x < prev_x {
            past_apex = true;
        }
        if past_apex && prev_x > start && x <= start {
            // Linear interpolation of the crossing.
            return Ok(prev_t + dt * (prev_x - start) / (prev_x - x));
        }
        prev_t = t;
        prev_x = x;
        t += dt;
    }
    Err(Error::UnresolvedTrain {
        t_end: 1.5 * t_exact,
        message: "crest never returned to its starting abscissa".into(),
    })
}

/// Exact logistic representations of the single soliton.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SigmoidMap {
    pub kappa: f64,
    /// Spatial cumulative `∫₋∞ˣ u dξ = 4κ/(1+e^{−2κx})` — its derivative
    /// is exactly the soliton profile.
    pub cumulative: LogisticWave,
    /// Unit-range shape `tanh(κx)+1 = 2/(1+e^{−2κx})`.
    pub normalized: LogisticWave,
    /// Multiplying `normalized` by this yields a 0→1 probability curve.
    pub scale: f64,
}

/// Map a single soliton (the `n = 1` profile, centred at the origin) onto
/// its exact sigmoid representations. Higher-order profiles do not reduce
/// to one sigmoid and are reported as unsupported.
pub fn soliton_to_sigmoid(n: usize, kappa: f64) -> Result<SigmoidMap> {
    check_train_params(n, kappa)?;
    if n != 1 {
        return Err(Error::Unsupported(format!(
            "only the single-soliton profile integrates to one sigmoid; n = {n} splits into {n} solitons"
        )));
    }
    let cumulative = LogisticWave {
        a: 4.0 * kappa,
        b: 1.0,
        c: 2.0 * kappa,
        t_shift: 0.0,
        d: 0.0,
    };
    let normalized = LogisticWave {
        a: 2.0,
        b: 1.0,
        c: 2.0 * kappa,
        t_shift: 0.0,
        d: 0.0,
    };
    Ok(SigmoidMap {
        kappa,
        cumulative,
        normalized,
        scale: 0.5,
    })
}

/// Sigmoid representations of every soliton that the order-`n` profile
/// releases (shape parameters `j·κ`, `j = 1..n`).
pub fn train_to_sigmoids(n: usize, kappa: f64) -> Result<Vec<SigmoidMap>> {
    check_train_params(n, kappa)?;
    (1..=n)
        .map(|j| soliton_to_sigmoid(1, j as f64 * kappa))
        .collect()
}

/// Integrate `initial` to `t_end` and return the final state.
pub fn evolve(cfg: &KdvConfig, initial: &[f64], t_end: f64) -> Result<KdvState> {
    let states = evolve_snapshots(cfg, initial, &[t_end])?;
    Ok(states.into_iter().next().unwrap())
}

/// Integrate `initial`, returning a state at each requested time
/// (strictly increasing, non-negative). The fixed stability step is
/// shortened at the end of each interval to land exactly on the
/// requested times.
pub fn evolve_snapshots(cfg: &KdvConfig, initial: &[f64], times: &[f64]) -> Result<Vec<KdvState>> {
    cfg.validate()?;
    if initial.len() != cfg.n_points {
        return Err(Error::InvalidInput(format!(
            "initial profile has {} samples, config expects {}",
            initial.len(),
            cfg.n_points
        )));
    }
    if initial.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput(
            "initial profile contains non-finite values".into(),
        ));
    }
    if times.is_empty() {
        return Err(Error::InvalidParameter(
            "at least one snapshot time is required".into(),
        ));
    }
    if times[0] < 0.0 || times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter(
            "snapshot times must be non-negative and strictly increasing".into(),
        ));
    }

    let mut solver = PseudoSpectral::new(cfg.domain_length, cfg.n_points, cfg.dispersion, cfg.sink);
    let mut u = initial.to_vec();
    solver.project(&mut u);
    let x = cfg.grid();
    let dt = cfg.dt();

    let mut states = Vec::with_capacity(times.len());
    let mut t = 0.0;
    for &target in times {
        while t < target - 1e-12 {
            let step = dt.min(target - t);
            solver.step(&mut u, t, step)?;
            t += step;
        }
        t = target;
        states.push(KdvState {
            x: x.clone(),
            u: u.clone(),
            t,
        });
    }
    Ok(states)
}

/// One resolved soliton of a train.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct TrainPeak {
    pub position: f64,
    pub amplitude: f64,
    /// Velocity from a linear fit of the unwrapped crest positions over
    /// the tracked snapshots.
    pub velocity: f64,
}

/// Outcome of evolving an order-`n` reflectionless profile.
#[derive(Debug, Clone, Serialize)]
pub struct TrainReport {
    pub final_state: KdvState,
    /// Resolved solitons, smallest first.
    pub peaks: Vec<TrainPeak>,
    /// `2j²κ²`, smallest first.
    pub expected_amplitudes: Vec<f64>,
    /// `4j²κ²`, smallest first.
    pub expected_velocities: Vec<f64>,
    /// Largest |u| found more than five widths away from every crest —
    /// the radiation shed by the (theoretically reflectionless) seed.
    pub radiation: f64,
}

/// Local maxima of `u` above `threshold`, separated by at least
/// `min_separation` (periodic), each refined with a three-point parabola.
/// Returns `(position, amplitude)` pairs sorted by amplitude, largest
/// first.
pub fn detect_peaks(state: &KdvState, threshold: f64, min_separation: f64) -> Vec<(f64, f64)> {
    let n = state.u.len();
    let dx = state.x[1] - state.x[0];
    let length = dx * n as f64;
    let mut candidates: Vec<(f64, f64)> = Vec::new();
    for i in 0..n {
        let prev = state.u[(i + n - 1) % n];
        let here = state.u[i];
        let next = state.u[(i + 1) % n];
        if here > threshold && here > prev && here >= next {
            let denom = prev - 2.0 * here + next;
            let (offset, amp) = if denom.abs() > 0.0 {
                let off = 0.5 * (prev - next) / denom;
                (off, here - 0.25 * (prev - next) * off)
            } else {
                (0.0, here)
            };
            candidates.push((state.x[i] + offset * dx, amp));
        }
    }
    candidates.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap());
    let mut kept: Vec<(f64, f64)> = Vec::new();
    for c in candidates {
        let far_enough = kept.iter().all(|k| {
            let mut d = (c.0 - k.0).abs() % length;
            if d > length / 2.0 {
                d = length - d;
            }
            d >= min_separation
        });
        if far_enough {
            kept.push(c);
        }
    }
    kept
}

/// Evolve the reflectionless order-`n` profile and resolve the emerging
/// soliton train: amplitudes from the final state, velocities from crest
/// tracking over the final third of the run.
pub fn soliton_train(
    cfg: &KdvConfig,
    n: usize,
    kappa: f64,
    x0: f64,
    t_end: f64,
) -> Result<TrainReport> {
    check_train_params(n, kappa)?;
    if !(t_end > 0.0) || !t_end.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "t_end must be positive, got {t_end}"
        )));
    }
    let initial = train_profile(n, kappa, x0, &cfg.grid())?;

    // Track crests over the final third of the run.
    let n_snaps = 17;
    let t_start = 2.0 * t_end / 3.0;
    let times: Vec<f64> = (0..n_snaps)
        .map(|i| t_start + (t_end - t_start) * i as f64 / (n_snaps - 1) as f64)
        .collect();
    let states = evolve_snapshots(cfg, &initial, &times)?;

    let threshold = 0.1 * kappa * kappa;
    let min_sep = 1.0 / kappa;
    // Per-snapshot crest positions, largest soliton first.
    let mut tracks: Vec<Vec<(f64, f64)>> = vec![Vec::new(); n]; // (t, x) per soliton
    for state in &states {
        let peaks = detect_peaks(state, threshold, min_sep);
        if peaks.len() < n {
            return Err(Error::UnresolvedTrain {
                t_end,
                message: format!(
                    "resolved only {} of {} solitons at t = {} (domain or time too small)",
                    peaks.len(),
                    n,
                    state.t
                ),
            });
        }
        for (j, peak) in peaks.iter().take(n).enumerate() {
            tracks[j].push((state.t, peak.0));
        }
    }

    // Unwrap periodic crossings, then fit x = v·t + b per soliton.
    let length = cfg.domain_length;
    let mut velocities = vec![0.0; n];
    for (j, track) in tracks.iter_mut().enumerate() {
        let mut wraps = 0.0;
        let mut prev = track[0].1;
        for point in track.iter_mut() {
            let mut x = point.1 + wraps;
            while x < prev - length / 2.0 {
                wraps += length;
                x += length;
            }
            point.1 = x;
            prev = x;
        }
        let m = track.len() as f64;
        let tm = track.iter().map(|p| p.0).sum::<f64>() / m;
        let xm = track.iter().map(|p| p.1).sum::<f64>() / m;
        let num: f64 = track.iter().map(|p| (p.0 - tm) * (p.1 - xm)).sum();
        let den: f64 = track.iter().map(|p| (p.0 - tm) * (p.0 - tm)).sum();
        velocities[j] = num / den;
    }

    let final_state = states.into_iter().last().unwrap();
    let final_peaks = detect_peaks(&final_state, threshold, min_sep);
    // Largest-first order → report smallest-first to match 2j²κ².
    let mut peaks: Vec<TrainPeak> = final_peaks
        .iter()
        .take(n)
        .enumerate()
        .map(|(j, &(position, amplitude))| TrainPeak {
            position,
            amplitude,
            velocity: velocities[j],
        })
        .collect();
    peaks.reverse();

    // Radiation: field magnitude far from every crest.
    let crest_positions: Vec<f64> = peaks.iter().map(|p| p.position).collect();
    let exclusion = 5.0 / kappa;
    let mut radiation = 0.0_f64;
    for (j, &x) in final_state.x.iter().enumerate() {
        let near = crest_positions.iter().any(|&c| {
            let mut d = (x - c).abs() % length;
            if d > length / 2.0 {
                d = length - d;
            }
            d < exclusion
        });
        if !near {
            radiation = radiation.max(final_state.u[j].abs());
        }
    }

    let expected_amplitudes: Vec<f64> = (1..=n)
        .map(|j| 2.0 * (j * j) as f64 * kappa * kappa)
        .collect();
    let expected_velocities: Vec<f64> = (1..=n)
        .map(|j| 4.0 * (j * j) as f64 * kappa * kappa)
        .collect();
    Ok(TrainReport {
        final_state,
        peaks,
        expected_amplitudes,
        expected_velocities,
        radiation,
    })
}

/// Stability headroom of a step: `dt·(δ·k³ + 6·|u|∞·k)` must stay below
/// 2√2 for RK4. Exposed for diagnostics.
pub fn stability_number(cfg: &KdvConfig, umax: f64) -> f64 {
    let k_keep = std::f64::consts::TAU / 3.0 / cfg.dx();
    cfg.dt() * (cfg.dispersion * k_keep.powi(3) + 6.0 * umax * k_keep)
}

/// The RK4 imaginary-axis stability radius used by the runtime guard.
pub const STABILITY_LIMIT: f64 = RK4_IMAG_LIMIT;

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn wrap(d: f64, length: f64) -> f64 {
        let mut d = d % length;
        if d > length / 2.0 {
            d -= length;
        }
        if d < -length / 2.0 {
            d += length;
        }
        d
    }

    #[test]
    fn config_validation_and_derived_quantities() {
        let cfg = KdvConfig::new(40.0, 256, 1.0, 0.0).unwrap();
        assert_abs_diff_eq!(cfg.dx(), 0.15625, epsilon = 1e-15);
        assert_abs_diff_eq!(cfg.dt(), 0.25 * 0.15625_f64.powi(3), epsilon = 1e-18);
        assert!(KdvConfig::new(0.0, 256, 1.0, 0.0).is_err());
        assert!(KdvConfig::new(40.0, 255, 1.0, 0.0).is_err());
        assert!(KdvConfig::new(40.0, 8, 1.0, 0.0).is_err());
        assert!(KdvConfig::new(40.0, 256, 0.0, 0.0).is_err());
        assert!(KdvConfig::new(40.0, 256, 1.0, -0.1).is_err());
        assert!(cfg.with_alpha_stability(0.5).is_err());
    }

    #[test]
    fn soliton_spec_reports_its_scales() {
        let s = SolitonSpec::new(0.5, 10.0).unwrap();
        assert_abs_diff_eq!(s.amplitude(), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(s.velocity(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(s.width(), 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(s.eval(10.0, 0.0), 0.5, epsilon = 1e-15);
        // After one time unit the crest has moved by the velocity.
        assert_abs_diff_eq!(s.eval(11.0, 1.0), 0.5, epsilon = 1e-15);
        assert!(SolitonSpec::new(0.0, 0.0).is_err());
    }

    #[test]
    fn single_soliton_translates_at_its_analytic_velocity() {
        let cfg = KdvConfig::new(40.0, 256, 1.0, 0.0).unwrap();
        let spec = SolitonSpec::new(0.5, 10.0).unwrap();
        let xs = cfg.grid();
        let initial: Vec<f64> = xs.iter().map(|&x| spec.eval(x, 0.0)).collect();
        let t_end = 4.0;
        let state = evolve(&cfg, &initial, t_end).unwrap();
        let max_err = xs
            .iter()
            .zip(&state.u)
            .map(|(&x, &u)| {
                // Compare against the analytic soliton wrapped onto the
                // periodic domain.
                let arg = wrap(x - spec.x0 - spec.velocity() * t_end, cfg.domain_length);
                (u - spec.amplitude() / (spec.kappa * arg).cosh().powi(2)).abs()
            })
            .fold(0.0, f64::max);
        assert!(max_err < 5e-4, "profile error {max_err}");
    }

    #[test]
    fn mass_is_conserved_to_rounding_and_momentum_drifts_negligibly() {
        let cfg = KdvConfig::new(40.0, 256, 1.0, 0.0).unwrap();
        let spec = SolitonSpec::new(0.5, 10.0).unwrap();
        let initial: Vec<f64> = cfg.grid().iter().map(|&x| spec.eval(x, 0.0)).collect();
        let states = evolve_snapshots(&cfg, &initial, &[0.0, 2.0, 4.0]).unwrap();
        let mass0 = states[0].mass();
        let mom0 = states[0].momentum();
        for s in &states[1..] {
            assert!(
                (s.mass() - mass0).abs() < 1e-12,
                "mass drift {}",
                (s.mass() - mass0).abs()
            );
            assert!(
                ((s.momentum() - mom0) / mom0).abs() < 1e-7,
                "momentum drift {}",
                ((s.momentum() - mom0) / mom0).abs()
            );
        }
    }

    #[test]
    fn uniform_sink_removes_mass_at_exactly_the_configured_rate() {
        let cfg = KdvConfig::new(40.0, 256, 1.0, 0.02).unwrap();
        let spec = SolitonSpec::new(0.5, 10.0).unwrap();
        let initial: Vec<f64> = cfg.grid().iter().map(|&x| spec.eval(x, 0.0)).collect();
        let states = evolve_snapshots(&cfg, &initial, &[0.0, 1.5, 3.0]).unwrap();
        let mass0 = states[0].mass();
        for s in &states[1..] {
            let expected = mass0 - cfg.sink * cfg.domain_length * s.t;
            assert_abs_diff_eq!(s.mass(), expected, epsilon = 1e-10);
        }
    }

    #[test]
    fn order_two_profile_splits_into_the_predicted_train() {
        let cfg = KdvConfig::new(32.0, 512, 1.0, 0.0).unwrap();
        let report = soliton_train(&cfg, 2, 1.0, 8.0, 1.5).unwrap();
        assert_eq!(report.peaks.len(), 2);
        assert_eq!(report.expected_amplitudes, vec![2.0, 8.0]);
        assert_eq!(report.expected_velocities, vec![4.0, 16.0]);
        for (peak, (&ea, &ev)) in report.peaks.iter().zip(
            report
                .expected_amplitudes
                .iter()
                .zip(&report.expected_velocities),
        ) {
            let amp_err = (peak.amplitude - ea).abs() / ea;
            let vel_err = (peak.velocity - ev).abs() / ev;
            assert!(amp_err < 0.02, "amplitude {} vs {ea}", peak.amplitude);
            assert!(vel_err < 0.02, "velocity {} vs {ev}", peak.velocity);
        }
        assert!(report.radiation < 1e-3, "radiation {}", report.radiation);
    }

    #[test]
    fn unresolvable_trains_are_reported_as_such() {
        // Far too little evolution time for the solitons to separate, on
        // a coarse short domain.
        let cfg = KdvConfig::new(16.0, 128, 1.0, 0.0).unwrap();
        let err = soliton_train(&cfg, 3, 1.0, 8.0, 1e-3).unwrap_err();
        assert!(matches!(err, Error::UnresolvedTrain { .. }), "{err}");
    }

    #[test]
    fn oversized_amplitudes_trip_the_stability_guard() {
        let cfg = KdvConfig::new(16.0, 128, 1.0, 0.0).unwrap();
        let initial: Vec<f64> = cfg
            .grid()
            .iter()
            .map(|&x| 100.0 / ((x - 8.0).cosh().powi(2)))
            .collect();
        let err = evolve(&cfg, &initial, 1.0).unwrap_err();
        assert!(matches!(err, Error::BlowUp { .. }), "{err}");
    }

    #[test]
    fn sinking_profile_crest_height_and_return_follow_the_closed_forms() {
        let (n, kappa, sink) = (1, 0.5, 0.01);
        // Height at the crest: n(n+1)κ² − c₁·t.
        for t in [0.0, 30.0, 100.0] {
            let crest_x = 4.0 * kappa * kappa * t - 0.5 * sink * t * t;
            let v = sinking_profile(n, kappa, sink, crest_x, t);
            assert_abs_diff_eq!(v, 2.0 * kappa * kappa - sink * t, epsilon = 1e-12);
        }
        let t1 = crest_return_time(kappa, sink).unwrap();
        assert_abs_diff_eq!(t1, 200.0, epsilon = 1e-12);
        let measured = measured_return_time(n, kappa, sink).unwrap();
        assert!(
            ((measured - t1) / t1).abs() < 1e-5,
            "measured {measured} vs {t1}"
        );
    }

    #[test]
    fn return_times_scale_like_amplitudes() {
        let sink = 0.01;
        let (k1, k2) = (0.5, 1.0);
        let t1 = measured_return_time(1, k1, sink).unwrap();
        let t2 = measured_return_time(1, k2, sink).unwrap();
        let amp_ratio = (k2 / k1).powi(2);
        assert!(
            ((t2 / t1) - amp_ratio).abs() < 1e-4,
            "time ratio {} vs amplitude ratio {amp_ratio}",
            t2 / t1
        );
    }

    #[test]
    fn soliton_cumulative_is_exactly_one_sigmoid() {
        let kappa = 0.7;
        let map = soliton_to_sigmoid(1, kappa).unwrap();
        let spec = SolitonSpec::new(kappa, 0.0).unwrap();
        for x in [-6.0, -1.3, 0.0, 0.8, 4.2] {
            // Five-point central difference of the cumulative form.
            let h = 1e-4;
            let f = |z: f64| map.cumulative.eval_cumulative(z);
            let fd = (-f(x + 2.0 * h) + 8.0 * f(x + h) - 8.0 * f(x - h) + f(x - 2.0 * h))
                / (12.0 * h);
            assert_abs_diff_eq!(fd, spec.eval(x, 0.0), epsilon = 1e-10);
            // Normalized form is tanh(κx)+1, scaled to a unit range.
            let expected = (kappa * x).tanh() + 1.0;
            assert_abs_diff_eq!(map.normalized.eval_cumulative(x), expected, epsilon = 1e-12);
            let prob = map.scale * map.normalized.eval_cumulative(x);
            assert!((0.0..=1.0).contains(&prob));
        }
        assert_abs_diff_eq!(map.cumulative.a, 4.0 * kappa, epsilon = 1e-15);
        assert_abs_diff_eq!(map.cumulative.c, 2.0 * kappa, epsilon = 1e-15);
        assert!(soliton_to_sigmoid(2, 1.0).is_err());
    }

    #[test]
    fn train_sigmoids_cover_every_released_soliton() {
        let maps = train_to_sigmoids(3, 0.4).unwrap();
        assert_eq!(maps.len(), 3);
        for (j, map) in maps.iter().enumerate() {
            assert_abs_diff_eq!(map.kappa, (j + 1) as f64 * 0.4, epsilon = 1e-15);
        }
    }

    #[test]
    fn stability_number_stays_within_the_rk4_region_for_defaults() {
        let cfg = KdvConfig::new(64.0, 1024, 1.0, 0.0).unwrap();
        // Default α=0.25 leaves headroom for amplitudes up to the guard.
        assert!(stability_number(&cfg, 0.0) < STABILITY_LIMIT);
        assert!(stability_number(&cfg, 12.0) < STABILITY_LIMIT);
    }
}
