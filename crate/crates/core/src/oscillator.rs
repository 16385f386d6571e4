//! Cyclic oscillators for a pair of probabilities exchanging weight around
//! a reference point.
//!
//! Two probabilities `p₁, p₂` with reference values `p₁₀, p₂₀` are coupled
//! through a rate constant `γ`:
//!
//! ```text
//! harmonic (linear) form:
//!   dp₁/dt = −(γ/p₂₀)(p₂ − p₂₀)
//!   dp₂/dt = +(γ/p₁₀)(p₁ − p₁₀)
//! ```
//!
//! which makes each component simple-harmonic with angular frequency
//! `ω = γ/√(p₁₀p₂₀)` and conserves the quadratic divergence
//! `D = Σᵢ (pᵢ−pᵢ₀)²/(2pᵢ₀)` — the second-order Taylor expansion of the
//! Kullback–Leibler divergence of `p` from the reference.
//!
//! Keeping the *third*-order term of the same expansion gives the
//! cubic-corrected divergence; it is conserved along the quadratically
//! corrected system integrated by [`integrate_coupled_nonharmonic`]:
//!
//! ```text
//!   dp₁/dt = +(γ/p₂₀)(p₂ − p₂₀) − (γ/2p₂₀²)(p₂ − p₂₀)²
//!   dp₂/dt = −(γ/p₁₀)(p₁ − p₁₀)
//! ```
//!
//! Eliminating one variable (and allowing a free quadratic coefficient and
//! a constant drive) yields the scalar second-order form handled by
//! [`integrate_nonharmonic`]:
//!
//! ```text
//!   (1/k)·d²p/dt² = −(p − p₀) + α(p − p₀)² + C,    k = γ²/(p₁₀p₂₀)
//! ```
//!
//! All integrations use fixed-step classical RK4 ([`crate::rk4`]): the
//! systems are smooth and non-stiff, and a fixed step keeps conserved-
//! quantity drift measurements well defined.

use crate::error::{Error, Result};
use crate::rk4;

/// Parameters of the coupled pair.
#[derive(Debug, Clone, Copy)]
pub struct OscillatorConfig {
    gamma: f64,
    p_ref: (f64, f64),
    alpha: f64,
    c: f64,
    /// Cached stiffness `k = γ²/(p₁₀·p₂₀)`.
    k: f64,
}

impl OscillatorConfig {
    /// Build a configuration.
    ///
    /// `gamma` must be positive and both reference probabilities must lie
    /// strictly inside (0, 1). `alpha` is the quadratic coefficient and `c`
    /// the constant drive of the scalar form; both may be zero.
    pub fn new(gamma: f64, p_ref: (f64, f64), alpha: f64, c: f64) -> Result<Self> {
        if !(gamma > 0.0) || !gamma.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "gamma must be positive and finite, got {gamma}"
            )));
        }
        for (name, v) in [("p_ref.0", p_ref.0), ("p_ref.1", p_ref.1)] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::InvalidParameter(format!(
                    "{name} must lie strictly between 0 and 1, got {v}"
                )));
            }
        }
        if !alpha.is_finite() || !c.is_finite() {
            return Err(Error::InvalidParameter(
                "alpha and c must be finite".into(),
            ));
        }
        Ok(Self {
            gamma,
            p_ref,
            alpha,
            c,
            k: gamma * gamma / (p_ref.0 * p_ref.1),
        })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn p_ref(&self) -> (f64, f64) {
        self.p_ref
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    /// Stiffness `k = γ²/(p₁₀·p₂₀)` of the scalar form.
    pub fn k(&self) -> f64 {
        self.k
    }

    /// Angular frequency `ω = γ/√(p₁₀·p₂₀)` of the harmonic pair.
    pub fn angular_frequency(&self) -> f64 {
        self.gamma / (self.p_ref.0 * self.p_ref.1).sqrt()
    }

    /// Oscillation period `2π√(p₁₀·p₂₀)/γ` of the harmonic pair.
    pub fn period(&self) -> f64 {
        std::f64::consts::TAU / self.angular_frequency()
    }
}

/// Which truncation of the KL-divergence expansion a trajectory records.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DivergenceOrder {
    /// `Σᵢ (pᵢ−pᵢ₀)²/(2pᵢ₀)` — conserved by the harmonic pair.
    Quadratic,
    /// Quadratic plus the third-order term `−(p₂−p₂₀)³/(6p₂₀²)` —
    /// conserved by the coupled quadratically corrected pair.
    Cubic,
}

/// What the `conserved` column of a [`Trajectory`] contains.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConservedKind {
    /// Quadratic divergence of a coupled pair.
    DivergenceQuadratic,
    /// Cubic-corrected divergence of a coupled pair.
    DivergenceCubic,
    /// Mechanical invariant of the scalar second-order form.
    ScalarEnergy,
}

/// A sampled trajectory. For coupled integrations states are `(p₁, p₂)`
/// pairs; for the scalar form they are `(p, dp/dt)`.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<(f64, f64)>,
    /// The per-sample conserved diagnostic (see `conserved_kind`).
    pub conserved: Vec<f64>,
    pub conserved_kind: ConservedKind,
}

impl Trajectory {
    /// Largest absolute departure of the conserved column from its initial
    /// value.
    pub fn max_conserved_drift(&self) -> f64 {
        let c0 = self.conserved[0];
        self.conserved
            .iter()
            .map(|c| (c - c0).abs())
            .fold(0.0, f64::max)
    }
}

fn check_run(t_end: f64, dt: f64) -> Result<usize> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "dt must be positive, got {dt}"
        )));
    }
    if !(t_end > 0.0) || !t_end.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "t_end must be positive, got {t_end}"
        )));
    }
    Ok((t_end / dt).ceil() as usize)
}

/// Evaluate the chosen divergence truncation pointwise along `states`
/// (interpreted as `(p₁, p₂)` pairs).
pub fn conserved_quantity(
    states: &[(f64, f64)],
    p_ref: (f64, f64),
    order: DivergenceOrder,
) -> Vec<f64> {
    states
        .iter()
        .map(|&(p1, p2)| divergence_value(p1, p2, p_ref, order))
        .collect()
}

fn divergence_value(p1: f64, p2: f64, p_ref: (f64, f64), order: DivergenceOrder) -> f64 {
    let u = p1 - p_ref.0;
    let v = p2 - p_ref.1;
    let quad = u * u / (2.0 * p_ref.0) + v * v / (2.0 * p_ref.1);
    match order {
        DivergenceOrder::Quadratic => quad,
        DivergenceOrder::Cubic => quad - v * v * v / (6.0 * p_ref.1 * p_ref.1),
    }
}

/// Integrate the harmonic (linear, cross-coupled) pair from `initial`,
/// recording the quadratic divergence at every step.
pub fn integrate_harmonic(
    cfg: &OscillatorConfig,
    initial: (f64, f64),
    t_end: f64,
    dt: f64,
) -> Result<Trajectory> {
    let steps = check_run(t_end, dt)?;
    let (q, r) = cfg.p_ref;
    let g = cfg.gamma;
    let f = move |_t: f64, y: &[f64; 2]| [-(g / r) * (y[1] - r), (g / q) * (y[0] - q)];

    let mut traj = Trajectory {
        times: Vec::with_capacity(steps + 1),
        states: Vec::with_capacity(steps + 1),
        conserved: Vec::with_capacity(steps + 1),
        conserved_kind: ConservedKind::DivergenceQuadratic,
    };
    rk4::integrate(f, [initial.0, initial.1], 0.0, dt, steps, |t, y| {
        traj.times.push(t);
        traj.states.push((y[0], y[1]));
        traj.conserved
            .push(divergence_value(y[0], y[1], cfg.p_ref, DivergenceOrder::Quadratic));
    });
    Ok(traj)
}

/// Integrate the quadratically corrected coupled pair from `initial`,
/// recording the cubic-corrected divergence (which this form conserves).
pub fn integrate_coupled_nonharmonic(
    cfg: &OscillatorConfig,
    initial: (f64, f64),
    t_end: f64,
    dt: f64,
) -> Result<Trajectory> {
    let steps = check_run(t_end, dt)?;
    let (q, r) = cfg.p_ref;
    let g = cfg.gamma;
    let f = move |_t: f64, y: &[f64; 2]| {
        let b = y[1] - r;
        [
            (g / r) * b - (g / (2.0 * r * r)) * b * b,
            -(g / q) * (y[0] - q),
        ]
    };

    let mut traj = Trajectory {
        times: Vec::with_capacity(steps + 1),
        states: Vec::with_capacity(steps + 1),
        conserved: Vec::with_capacity(steps + 1),
        conserved_kind: ConservedKind::DivergenceCubic,
    };
    let mut blew_up = None;
    rk4::integrate(f, [initial.0, initial.1], 0.0, dt, steps, |t, y| {
        if blew_up.is_none() && (!y[0].is_finite() || !y[1].is_finite()) {
            blew_up = Some(t);
        }
        traj.times.push(t);
        traj.states.push((y[0], y[1]));
        traj.conserved
            .push(divergence_value(y[0], y[1], cfg.p_ref, DivergenceOrder::Cubic));
    });
    if let Some(t) = blew_up {
        return Err(Error::BlowUp { time: t });
    }
    Ok(traj)
}

/// Integrate the scalar second-order form
/// `(1/k)·p̈ = −(p−p₀) + α(p−p₀)² + C` (with `p₀ = p_ref.1`) from
/// `initial = (p, dp/dt)`.
///
/// The recorded conserved column is the mechanical invariant
/// `E = v²/(2k) + u²/2 − αu³/3 − Cu` with `u = p − p₀`. For `α ≠ 0` the
/// restoring force vanishes near `|u| = 1/α`; a state escaping past that
/// point (where the quadratic term dominates and the motion runs away) is
/// reported as a divergence error with the time and step reached.
pub fn integrate_nonharmonic(
    cfg: &OscillatorConfig,
    initial: (f64, f64),
    t_end: f64,
    dt: f64,
) -> Result<Trajectory> {
    let steps = check_run(t_end, dt)?;
    let p0 = cfg.p_ref.1;
    let (k, alpha, c) = (cfg.k, cfg.alpha, cfg.c);
    let f = move |_t: f64, y: &[f64; 2]| {
        let u = y[0] - p0;
        [y[1], k * (-u + alpha * u * u + c)]
    };
    let energy = move |p: f64, v: f64| {
        let u = p - p0;
        v * v / (2.0 * k) + u * u / 2.0 - alpha * u * u * u / 3.0 - c * u
    };
    // Escape boundary: beyond u = 1/α the quadratic term out-pulls the
    // linear restoring force and the motion runs away.
    let escape = move |u: f64| -> bool {
        if alpha > 0.0 {
            u > 1.0 / alpha
        } else if alpha < 0.0 {
            u < 1.0 / alpha
        } else {
            false
        }
    };

    let mut traj = Trajectory {
        times: Vec::with_capacity(steps + 1),
        states: Vec::with_capacity(steps + 1),
        conserved: Vec::with_capacity(steps + 1),
        conserved_kind: ConservedKind::ScalarEnergy,
    };
    let mut diverged: Option<(f64, usize)> = None;
    let mut step_no = 0usize;
    rk4::integrate(f, [initial.0, initial.1], 0.0, dt, steps, |t, y| {
        if diverged.is_none() && (!y[0].is_finite() || !y[1].is_finite() || escape(y[0] - p0)) {
            diverged = Some((t, step_no));
        }
        step_no += 1;
        traj.times.push(t);
        traj.states.push((y[0], y[1]));
        traj.conserved.push(energy(y[0], y[1]));
    });
    if let Some((time, step)) = diverged {
        return Err(Error::Divergence {
            time,
            step,
            message: format!(
                "state escaped the restoring region |p - p0| < 1/alpha = {:.6}",
                (1.0 / cfg.alpha).abs()
            ),
        });
    }
    Ok(traj)
}

/// Estimate the oscillation period of `series` sampled at `times` from the
/// spacing of its first two interior maxima (each refined by a parabola
/// through the three samples around it). Returns `None` when fewer than
/// two interior maxima exist.
pub fn estimate_period(times: &[f64], series: &[f64]) -> Option<f64> {
    let mut maxima = Vec::new();
    for i in 1..series.len().saturating_sub(1) {
        if series[i] > series[i - 1] && series[i] >= series[i + 1] {
            let dt = times[i + 1] - times[i];
            let denom = series[i - 1] - 2.0 * series[i] + series[i + 1];
            let offset = if denom.abs() > 0.0 {
                0.5 * (series[i - 1] - series[i + 1]) / denom
            } else {
                0.0
            };
            maxima.push(times[i] + offset * dt);
            if maxima.len() == 2 {
                return Some(maxima[1] - maxima[0]);
            }
        }
    }
    None
}
