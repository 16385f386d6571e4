//! `oscillator`: integrate the cyclic probability dynamics and export the
//! trajectory with its conserved diagnostic.

use std::fmt::Write as _;
use std::path::PathBuf;

use helix_waves_core::oscillator::{
    estimate_period, integrate_coupled_nonharmonic, integrate_harmonic,
    integrate_nonharmonic, OscillatorConfig, Trajectory,
};
use helix_waves_core::Result;
use serde::Serialize;

use crate::args::{Format, OscillatorArgs, OscillatorCommand, OscillatorMode, OscillatorSimulateArgs};
use crate::context::{write_atomic, Ctx, Provenance};

pub fn run(ctx: &Ctx, args: OscillatorArgs) -> Result<()> {
    match args.command {
        OscillatorCommand::Simulate(a) => simulate(ctx, a),
    }
}

#[derive(Debug, Serialize)]
struct Resolved {
    mode: String,
    gamma: f64,
    p10: f64,
    p20: f64,
    alpha: f64,
    c: f64,
    initial: (f64, f64),
    t_end: f64,
    dt: f64,
    stride: usize,
    out: PathBuf,
}

#[derive(Debug, Serialize)]
struct Summary {
    provenance: Provenance,
    mode: String,
    reference_period: f64,
    estimated_period: Option<f64>,
    max_conserved_drift: f64,
    samples: usize,
}

fn mode_slug(mode: OscillatorMode) -> &'static str {
    match mode {
        OscillatorMode::Harmonic => "harmonic",
        OscillatorMode::Coupled => "coupled",
        OscillatorMode::Scalar => "scalar",
    }
}

fn simulate(ctx: &Ctx, args: OscillatorSimulateArgs) -> Result<()> {
    let mode = args.mode.unwrap_or({
        match ctx.string("mode")?.as_deref() {
            Some("coupled") => OscillatorMode::Coupled,
            Some("scalar") => OscillatorMode::Scalar,
            _ => OscillatorMode::Harmonic,
        }
    });
    let gamma = args.gamma.or(ctx.f64("gamma")?).unwrap_or(0.1);
    let p10 = args.p10.or(ctx.f64("p10")?).unwrap_or(0.5);
    let p20 = args.p20.or(ctx.f64("p20")?).unwrap_or(0.5);
    let alpha = args.alpha.or(ctx.f64("alpha")?).unwrap_or(0.0);
    let c = args.c.or(ctx.f64("c")?).unwrap_or(0.0);
    let cfg = OscillatorConfig::new(gamma, (p10, p20), alpha, c)?;

    let initial = match mode {
        OscillatorMode::Scalar => (
            args.p.or(ctx.f64("p")?).unwrap_or(p20 + 0.02),
            args.v.or(ctx.f64("v")?).unwrap_or(0.0),
        ),
        _ => (
            args.p1.or(ctx.f64("p1")?).unwrap_or(p10),
            args.p2.or(ctx.f64("p2")?).unwrap_or(p20 + 0.02),
        ),
    };
    let t_end = args
        .t_end
        .or(ctx.f64("t-end")?)
        .unwrap_or(2.0 * cfg.period());
    let dt = args.dt.or(ctx.f64("dt")?).unwrap_or(1e-3);
    let stride = match args.stride.or(ctx.usize("stride")?) {
        Some(s) => s.max(1),
        None => ((t_end / dt) as usize / 5000).max(1),
    };
    let resolved = Resolved {
        mode: mode_slug(mode).into(),
        gamma,
        p10,
        p20,
        alpha,
        c,
        initial,
        t_end,
        dt,
        stride,
        out: args
            .out
            .or(ctx.path("out")?)
            .unwrap_or_else(|| ctx.default_out("oscillator.tsv")),
    };

    let traj: Trajectory = match mode {
        OscillatorMode::Harmonic => integrate_harmonic(&cfg, initial, t_end, dt)?,
        OscillatorMode::Coupled => integrate_coupled_nonharmonic(&cfg, initial, t_end, dt)?,
        OscillatorMode::Scalar => integrate_nonharmonic(&cfg, initial, t_end, dt)?,
    };

    let provenance = Provenance::of(&resolved, None);
    let header = match mode {
        OscillatorMode::Scalar => "t\tp\tdpdt\tE",
        _ => "t\tp1\tp2\tD",
    };
    let mut text = provenance.comment_block();
    let _ = writeln!(text, "# mode: {}", resolved.mode);
    let _ = writeln!(text, "{header}");
    for i in (0..traj.times.len()).step_by(resolved.stride) {
        let (a, b) = traj.states[i];
        let _ = writeln!(text, "{}\t{a}\t{b}\t{}", traj.times[i], traj.conserved[i]);
    }
    write_atomic(&resolved.out, text.as_bytes())?;
    ctx.echo(Format::Tsv, &text);

    let first: Vec<f64> = traj.states.iter().map(|s| s.0).collect();
    let summary = Summary {
        provenance,
        mode: resolved.mode.clone(),
        reference_period: cfg.period(),
        estimated_period: estimate_period(&traj.times, &first),
        max_conserved_drift: traj.max_conserved_drift(),
        samples: traj.times.len().div_ceil(resolved.stride),
    };
    log::info!(
        "conserved drift {:.3e}; period estimate {:?}",
        summary.max_conserved_drift,
        summary.estimated_period,
    );
    let text = serde_json::to_string_pretty(&summary)
        .map_err(|e| helix_waves_core::Error::InvalidInput(format!("cannot serialize summary: {e}")))?;
    ctx.echo(Format::Json, &text);
    Ok(())
}
