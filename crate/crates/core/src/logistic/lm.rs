//! Damped Gauss–Newton (Levenberg–Marquardt) least squares.
//!
//! Small dense problems only: parameter counts here are a handful per
//! wave, so the normal equations are formed explicitly and solved with a
//! Cholesky factorisation from `nalgebra`. The damping term uses
//! Marquardt's scaling (λ times the diagonal of JᵀJ) so the step stays
//! well defined even when some columns of the Jacobian are parallel —
//! which happens by construction for logistic waves, where the offset
//! coefficient and the time shift act through the same combination.

use nalgebra::{Cholesky, DMatrix, DVector};

use crate::error::{Error, Result};

pub(crate) struct Options {
    pub max_iterations: usize,
    /// Convergence threshold on the largest relative parameter step of an
    /// accepted iteration.
    pub tolerance: f64,
}

#[derive(Debug)]
pub(crate) struct Solution {
    pub params: DVector<f64>,
    pub iterations: usize,
    /// Root-mean-square residual at the solution (callers recompute their
    /// own fit diagnostics; kept for the solver's tests).
    #[cfg_attr(not(test), allow(dead_code))]
    pub rms: f64,
}

const LAMBDA_INIT: f64 = 1e-3;
const LAMBDA_FACTOR: f64 = 10.0;
const LAMBDA_MAX: f64 = 1e12;
const LAMBDA_MIN: f64 = 1e-12;

/// Minimise ‖r(θ)‖² from `initial`, where `eval` fills the residual
/// vector and its Jacobian (∂rᵢ/∂θⱼ) for a given θ.
///
/// Iterations accept a step only when it reduces the sum of squares;
/// rejected steps raise the damping and retry. Returns a
/// non-convergence error carrying the last iterate when the iteration
/// budget runs out, and a degenerate-fit error when the model cannot be
/// evaluated at the starting point.
pub(crate) fn minimize<F>(mut eval: F, initial: DVector<f64>, opts: &Options) -> Result<Solution>
where
    F: FnMut(&DVector<f64>, &mut DVector<f64>, &mut DMatrix<f64>),
{
    let n_params = initial.len();
    let mut params = initial;

    // Probe once to size the residual space.
    let (mut r, mut jac) = {
        let mut r = DVector::zeros(0);
        let mut j = DMatrix::zeros(0, 0);
        eval(&params, &mut r, &mut j);
        (r, j)
    };
    let m = r.len();
    if m < n_params {
        return Err(Error::DegenerateFit(format!(
            "{m} residuals cannot determine {n_params} parameters"
        )));
    }
    let mut sse = r.norm_squared();
    if !sse.is_finite() {
        return Err(Error::DegenerateFit(
            "model not evaluable at the starting point".into(),
        ));
    }

    let mut r_trial = DVector::zeros(m);
    let mut jac_trial = DMatrix::zeros(m, n_params);
    let mut lambda = LAMBDA_INIT;

    for iter in 1..=opts.max_iterations {
        let jt = jac.transpose();
        let jtj = &jt * &jac;
        let jtr = &jt * &r;
        if jtr.iter().any(|v| !v.is_finite()) || jtj.iter().any(|v| !v.is_finite()) {
            return Err(Error::DegenerateFit(
                "non-finite gradient during least squares".into(),
            ));
        }

        // Inner loop: raise damping until a step is accepted.
        let accepted_step = loop {
            let mut a = jtj.clone();
            for i in 0..n_params {
                let d = jtj[(i, i)].max(1e-12);
                a[(i, i)] += lambda * d;
            }
            let step = Cholesky::new(a).map(|ch| ch.solve(&(-&jtr)));
            let step = match step {
                Some(s) if s.iter().all(|v| v.is_finite()) => s,
                _ => {
                    lambda *= LAMBDA_FACTOR;
                    if lambda > LAMBDA_MAX {
                        return Err(Error::NonConvergence {
                            iterations: iter,
                            residual: (sse / m as f64).sqrt(),
                            last: params.as_slice().to_vec(),
                        });
                    }
                    continue;
                }
            };

            let trial = &params + &step;
            eval(&trial, &mut r_trial, &mut jac_trial);
            let sse_trial = r_trial.norm_squared();
            if sse_trial.is_finite() && sse_trial < sse {
                params = trial;
                sse = sse_trial;
                std::mem::swap(&mut r, &mut r_trial);
                std::mem::swap(&mut jac, &mut jac_trial);
                lambda = (lambda / LAMBDA_FACTOR).max(LAMBDA_MIN);
                break step;
            }
            lambda *= LAMBDA_FACTOR;
            if lambda > LAMBDA_MAX {
                // Damping exhausted: no step of any length reduces the
                // residual further. That is the numerical optimum when
                // the residual is orthogonal to every identifiable
                // Jacobian column (or when earlier iterations already
                // made progress); otherwise the starting point is
                // unusable and the stall is a genuine failure.
                let rnorm = sse.sqrt().max(1e-300);
                let gcos = (0..n_params)
                    .map(|j| jtr[j].abs() / (jtj[(j, j)].max(1e-300).sqrt() * rnorm))
                    .fold(0.0, f64::max);
                if iter > 1 || gcos < 1e-6 {
                    return Ok(Solution {
                        params,
                        iterations: iter,
                        rms: (sse / m as f64).sqrt(),
                    });
                }
                return Err(Error::NonConvergence {
                    iterations: iter,
                    residual: (sse / m as f64).sqrt(),
                    last: params.as_slice().to_vec(),
                });
            }
        };

        let max_rel_step = accepted_step
            .iter()
            .zip(params.iter())
            .map(|(s, p)| s.abs() / (1.0 + p.abs()))
            .fold(0.0, f64::max);
        if max_rel_step < opts.tolerance {
            return Ok(Solution {
                params,
                iterations: iter,
                rms: (sse / m as f64).sqrt(),
            });
        }
    }

    Err(Error::NonConvergence {
        iterations: opts.max_iterations,
        residual: (sse / m as f64).sqrt(),
        last: params.as_slice().to_vec(),
    })
}
