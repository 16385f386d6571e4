//! Fixed-step classical fourth-order Runge–Kutta integration.
//!
//! All trajectory integrations in this crate (oscillators, SIR) use the
//! classical RK4 scheme with a fixed step: the systems are smooth and
//! non-stiff, fixed steps keep output grids regular and runs reproducible,
//! and the scheme's O(dt⁴) global error is easy to verify by step halving.

/// One classical RK4 step for `dy/dt = f(t, y)` with state dimension `D`.
pub fn step<const D: usize>(
    f: impl Fn(f64, &[f64; D]) -> [f64; D],
    t: f64,
    y: &[f64; D],
    dt: f64,
) -> [f64; D] {
    let k1 = f(t, y);
    let k2 = f(t + 0.5 * dt, &add_scaled(y, &k1, 0.5 * dt));
    let k3 = f(t + 0.5 * dt, &add_scaled(y, &k2, 0.5 * dt));
    let k4 = f(t + dt, &add_scaled(y, &k3, dt));

    let mut out = [0.0; D];
    for i in 0..D {
        out[i] = y[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out
}

/// Integrate from `t0` over `steps` fixed steps, calling `record` with every
/// state including the initial one (`steps + 1` calls in total).
pub fn integrate<const D: usize>(
    f: impl Fn(f64, &[f64; D]) -> [f64; D],
    y0: [f64; D],
    t0: f64,
    dt: f64,
    steps: usize,
    mut record: impl FnMut(f64, &[f64; D]),
) -> [f64; D] {
    let mut y = y0;
    let mut t = t0;
    record(t, &y);
    for i in 0..steps {
        y = step(&f, t, &y, dt);
        // Recompute t from the step count to avoid accumulating rounding.
        t = t0 + (i + 1) as f64 * dt;
        record(t, &y);
    }
    y
}

fn add_scaled<const D: usize>(y: &[f64; D], k: &[f64; D], s: f64) -> [f64; D] {
    let mut out = [0.0; D];
    for i in 0..D {
        out[i] = y[i] + s * k[i];
    }
    out
}
