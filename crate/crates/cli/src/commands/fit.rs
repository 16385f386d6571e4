//! `fit`: canonical series file(s) → logistic wave decomposition artifacts.
//!
//! Several inputs are fitted concurrently (they share nothing); each gets
//! its own artifact. Failures are reported per input and the first one
//! decides the exit class.

use std::path::{Path, PathBuf};

use helix_waves_core::ingest::{read_series, to_probability, SeriesKind};
use helix_waves_core::logistic::{fit_composite, segment_waves, FitConfig};
use helix_waves_core::reference::cumulative_from_density;
use helix_waves_core::{Error, Result};
use serde::Serialize;

use crate::args::{FitArgs, Format};
use crate::artifacts::{Convergence, FitArtifact, WaveJson};
use crate::commands::stem;
use crate::context::{write_json, Ctx, Provenance};

#[derive(Debug, Clone, Serialize)]
struct Resolved {
    inputs: Vec<PathBuf>,
    out: PathBuf,
    valley_ratio: f64,
    min_segment_len: usize,
    smoothing_window: usize,
    max_iterations: usize,
    tolerance: f64,
    segments: Option<usize>,
    joint_refinement: bool,
}

pub fn run(ctx: &Ctx, args: FitArgs) -> Result<()> {
    let mut inputs = args.inputs_or_config(ctx)?;
    if inputs.is_empty() {
        return Err(Error::InvalidParameter("--input is required".into()));
    }
    inputs.sort();
    let defaults = FitConfig::default();
    let resolved = Resolved {
        out: args
            .out
            .or(ctx.path("out")?)
            .unwrap_or_else(|| ctx.output_dir.clone()),
        valley_ratio: args
            .valley_ratio
            .or(ctx.f64("valley-ratio")?)
            .unwrap_or(defaults.valley_ratio),
        min_segment_len: args
            .min_segment_len
            .or(ctx.usize("min-segment-len")?)
            .unwrap_or(defaults.min_segment_len),
        smoothing_window: args
            .smoothing_window
            .or(ctx.usize("smoothing-window")?)
            .unwrap_or(defaults.smoothing_window),
        max_iterations: args
            .max_iterations
            .or(ctx.usize("max-iterations")?)
            .unwrap_or(defaults.max_iterations),
        tolerance: args
            .tolerance
            .or(ctx.f64("tolerance")?)
            .unwrap_or(defaults.tolerance),
        segments: args.segments.or(ctx.usize("segments")?),
        joint_refinement: !(args.no_joint_refinement
            || ctx.bool("no-joint-refinement")?.unwrap_or(false)),
        inputs,
    };
    let cfg = FitConfig {
        smoothing_window: resolved.smoothing_window,
        valley_ratio: resolved.valley_ratio,
        min_segment_len: resolved.min_segment_len,
        max_iterations: resolved.max_iterations,
        tolerance: resolved.tolerance,
        joint_refinement: resolved.joint_refinement,
    };
    cfg.validate()?;

    let single_file_out = resolved.inputs.len() == 1
        && resolved
            .out
            .extension()
            .is_some_and(|e| e.eq_ignore_ascii_case("json"));

    let mut outcomes: Vec<(String, Result<String>)> = Vec::new();
    std::thread::scope(|scope| {
        let mut handles = Vec::new();
        for input in &resolved.inputs {
            let label = stem(input);
            let out_path = if single_file_out {
                resolved.out.clone()
            } else {
                resolved.out.join(format!("{label}.json"))
            };
            let cfg = &cfg;
            let resolved = &resolved;
            let worker_label = label.clone();
            let handle = scope.spawn(move || {
                fit_one(input, &worker_label, &out_path, cfg, resolved)
            });
            handles.push((label, handle));
        }
        for (label, handle) in handles {
            let outcome = handle
                .join()
                .unwrap_or_else(|_| Err(Error::InvalidInput("fit worker panicked".into())));
            outcomes.push((label, outcome));
        }
    });

    let mut first_error = None;
    for (label, outcome) in outcomes {
        match outcome {
            Ok(text) => ctx.echo(Format::Json, &text),
            Err(e) => {
                eprintln!("{label}: {e}");
                if first_error.is_none() {
                    first_error = Some(e);
                }
            }
        }
    }
    match first_error {
        None => Ok(()),
        Some(e) => Err(e),
    }
}

impl FitArgs {
    fn inputs_or_config(&self, ctx: &Ctx) -> Result<Vec<PathBuf>> {
        if !self.input.is_empty() {
            return Ok(self.input.clone());
        }
        if let Some(path) = ctx.path("input")? {
            return Ok(vec![path]);
        }
        Ok(Vec::new())
    }
}

/// Fit one series and write its artifact; returns the rendered JSON.
fn fit_one(
    input: &Path,
    label: &str,
    out_path: &Path,
    cfg: &FitConfig,
    resolved: &Resolved,
) -> Result<String> {
    let series = read_series(input)?;
    let (cumulative, daily_hint): (Vec<f64>, Option<Vec<f64>>) = match series.kind() {
        SeriesKind::CumulativeProbability => (series.values().to_vec(), None),
        SeriesKind::DailyProbabilityDensity => (
            cumulative_from_density(series.values()),
            Some(series.values().to_vec()),
        ),
        SeriesKind::RawDailyCases => {
            let prob = to_probability(&series)?;
            (
                prob.cumulative.values().to_vec(),
                Some(prob.density.values().to_vec()),
            )
        }
    };
    let days: Vec<f64> = (0..cumulative.len()).map(|i| i as f64).collect();

    let cfg = match resolved.segments {
        None => cfg.clone(),
        Some(k) => with_forced_count(cfg, daily_hint.as_deref(), &cumulative, k)?,
    };

    let fit = fit_composite(&days, &cumulative, &cfg)?;
    log::info!(
        "{label}: {} wave(s), rms {:.3e}, {} iterations",
        fit.waves.len(),
        fit.rms_residual,
        fit.iterations
    );

    let artifact = FitArtifact {
        provenance: Provenance::of(resolved, None),
        label: label.to_string(),
        population: series.population(),
        days: cumulative.len(),
        waves: fit.waves.iter().map(WaveJson::from).collect(),
        segments: fit.segments.clone(),
        residual_rms: fit.rms_residual,
        convergence: Convergence {
            iterations: fit.iterations,
            max_iterations: cfg.max_iterations,
            tolerance: cfg.tolerance,
        },
    };
    write_json(out_path, &artifact)
}

/// Find a valley ratio that splits the series into exactly `k` waves.
///
/// The segment count grows with the valley ratio (a higher bar lets more
/// valleys separate their peaks), so a bisection over (0, 1) homes in on
/// the requested count; a count no ratio produces is reported as an error.
fn with_forced_count(
    cfg: &FitConfig,
    daily_hint: Option<&[f64]>,
    cumulative: &[f64],
    k: usize,
) -> Result<FitConfig> {
    if k == 0 {
        return Err(Error::InvalidParameter(
            "--segments must be at least 1".into(),
        ));
    }
    let daily: Vec<f64> = match daily_hint {
        Some(d) => d.to_vec(),
        None => {
            let mut d = Vec::with_capacity(cumulative.len());
            d.push(cumulative[0]);
            for w in cumulative.windows(2) {
                d.push(w[1] - w[0]);
            }
            d
        }
    };
    let count_at = |ratio: f64| -> Result<usize> {
        let mut probe = cfg.clone();
        probe.valley_ratio = ratio;
        Ok(segment_waves(&daily, &probe)?.len())
    };
    let (mut lo, mut hi) = (1e-6, 1.0 - 1e-9);
    if count_at(hi)? < k || count_at(lo)? > k {
        return Err(Error::InvalidParameter(format!(
            "no valley ratio splits this series into {k} waves"
        )));
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        let c = count_at(mid)?;
        if c == k {
            let mut tuned = cfg.clone();
            tuned.valley_ratio = mid;
            return Ok(tuned);
        }
        if c < k {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(Error::InvalidParameter(format!(
        "no valley ratio splits this series into {k} waves"
    )))
}
