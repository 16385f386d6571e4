//! `kdv`: evolve nonlinear wave fields, resolve soliton trains, and export
//! analytic sinking-soliton profiles.

use std::fmt::Write as _;
use std::path::PathBuf;

use helix_waves_core::kdv::{
    crest_return_time, evolve_snapshots, measured_return_time, sinking_profile,
    soliton_train, train_profile, KdvConfig, KdvState,
};
use helix_waves_core::{Error, Result};
use serde::Serialize;

use crate::args::{Format, KdvArgs, KdvCommand, KdvProfileArgs, KdvSimulateArgs, KdvTrainArgs};
use crate::context::{write_atomic, write_json, Ctx, Provenance};

pub fn run(ctx: &Ctx, args: KdvArgs) -> Result<()> {
    match args.command {
        KdvCommand::Simulate(a) => simulate(ctx, a),
        KdvCommand::Train(a) => train(ctx, a),
        KdvCommand::Profile(a) => profile(ctx, a),
    }
}

fn check_kappa(kappa: f64) -> Result<f64> {
    if !(kappa > 0.0) || !kappa.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "kappa must be positive, got {kappa}"
        )));
    }
    Ok(kappa)
}

/// Snapshot blocks in gnuplot's multi-index layout: each block carries a
/// `# t = …` line and an `x<TAB>p` header, and blocks are separated by two
/// blank lines so `index k` selects snapshot k.
fn render_snapshots(states: &[KdvState]) -> String {
    let mut out = String::new();
    for (i, state) in states.iter().enumerate() {
        if i > 0 {
            out.push_str("\n\n");
        }
        let _ = writeln!(out, "# t = {}", state.t);
        out.push_str("x\tp\n");
        for (x, u) in state.x.iter().zip(&state.u) {
            let _ = writeln!(out, "{x}\t{u}");
        }
    }
    out
}

fn snapshot_times(t_end: f64, snapshots: usize) -> Vec<f64> {
    let n = snapshots.max(1);
    (0..=n).map(|i| t_end * i as f64 / n as f64).collect()
}

#[derive(Debug, Serialize)]
struct SimResolved {
    kappa: f64,
    n: usize,
    x0: f64,
    c1: f64,
    delta: f64,
    grid: usize,
    length: f64,
    t_end: f64,
    snapshots: usize,
    alpha: f64,
    out: PathBuf,
}

fn simulate(ctx: &Ctx, args: KdvSimulateArgs) -> Result<()> {
    let kappa = check_kappa(args.kappa.or(ctx.f64("kappa")?).unwrap_or(1.0))?;
    let n = args.n.or(ctx.usize("n")?).unwrap_or(1);
    let length = args
        .length
        .or(ctx.f64("length")?)
        .unwrap_or(32.0 * n.max(1) as f64 / kappa);
    let resolved = SimResolved {
        kappa,
        n,
        x0: args.x0.or(ctx.f64("x0")?).unwrap_or(length / 4.0),
        c1: args.c1.or(ctx.f64("c1")?).unwrap_or(0.0),
        delta: args.delta.or(ctx.f64("delta")?).unwrap_or(1.0),
        grid: args.grid.or(ctx.usize("grid")?).unwrap_or(1024),
        length,
        t_end: args
            .t_end
            .or(ctx.f64("t-end")?)
            .unwrap_or(2.0 / kappa.powi(3)),
        snapshots: args.snapshots.or(ctx.usize("snapshots")?).unwrap_or(8),
        alpha: args.alpha.or(ctx.f64("alpha")?).unwrap_or(0.2),
        out: args
            .out
            .or(ctx.path("out")?)
            .unwrap_or_else(|| ctx.default_out("kdv.tsv")),
    };

    let cfg = KdvConfig::new(resolved.length, resolved.grid, resolved.delta, resolved.c1)?
        .with_alpha_stability(resolved.alpha)?;
    let initial = train_profile(resolved.n, resolved.kappa, resolved.x0, &cfg.grid())?;
    let times = snapshot_times(resolved.t_end, resolved.snapshots);
    let states = evolve_snapshots(&cfg, &initial, &times)?;

    let first = &states[0];
    let last = states.last().expect("at least one snapshot");
    log::info!(
        "mass drift {:.3e}, momentum drift {:.3e} over t = {}",
        (last.mass() - first.mass()).abs(),
        (last.momentum() - first.momentum()).abs(),
        last.t
    );

    let provenance = Provenance::of(&resolved, None);
    let text = format!("{}{}", provenance.comment_block(), render_snapshots(&states));
    write_atomic(&resolved.out, text.as_bytes())?;
    ctx.echo(Format::Tsv, &text);
    Ok(())
}

#[derive(Debug, Serialize)]
struct TrainResolved {
    n: usize,
    kappa: f64,
    x0: f64,
    c1: f64,
    delta: f64,
    grid: usize,
    length: f64,
    t_end: f64,
    alpha: f64,
    out: PathBuf,
}

fn train(ctx: &Ctx, args: KdvTrainArgs) -> Result<()> {
    let kappa = check_kappa(args.kappa.or(ctx.f64("kappa")?).unwrap_or(1.0))?;
    let n = args.n.or(ctx.usize("n")?).unwrap_or(2);
    let length = args
        .length
        .or(ctx.f64("length")?)
        .unwrap_or(32.0 * n.max(1) as f64 / kappa);
    let resolved = TrainResolved {
        n,
        kappa,
        x0: args.x0.or(ctx.f64("x0")?).unwrap_or(length / 4.0),
        c1: args.c1.or(ctx.f64("c1")?).unwrap_or(0.0),
        delta: args.delta.or(ctx.f64("delta")?).unwrap_or(1.0),
        grid: args.grid.or(ctx.usize("grid")?).unwrap_or(1024),
        length,
        t_end: args
            .t_end
            .or(ctx.f64("t-end")?)
            .unwrap_or((0.5 + 0.5 * n as f64) / kappa.powi(3)),
        alpha: args.alpha.or(ctx.f64("alpha")?).unwrap_or(0.2),
        out: args
            .out
            .or(ctx.path("out")?)
            .unwrap_or_else(|| ctx.default_out("train.json")),
    };

    let cfg = KdvConfig::new(resolved.length, resolved.grid, resolved.delta, resolved.c1)?
        .with_alpha_stability(resolved.alpha)?;
    let report = soliton_train(&cfg, resolved.n, resolved.kappa, resolved.x0, resolved.t_end)?;

    // The core reports solitons smallest first; artifacts list the leading
    // (largest, fastest) soliton first, matching how trains are read.
    let order: Vec<usize> = (0..report.peaks.len()).rev().collect();
    let pick = |f: &dyn Fn(usize) -> f64| -> Vec<f64> { order.iter().map(|&j| f(j)).collect() };
    let amplitudes = pick(&|j| report.peaks[j].amplitude);
    let velocities = pick(&|j| report.peaks[j].velocity);
    let positions = pick(&|j| report.peaks[j].position);
    let predicted_amplitudes = pick(&|j| report.expected_amplitudes[j]);
    let predicted_velocities = pick(&|j| report.expected_velocities[j]);
    let rel = |measured: &[f64], predicted: &[f64]| -> Vec<f64> {
        measured
            .iter()
            .zip(predicted)
            .map(|(m, p)| (m - p).abs() / p)
            .collect()
    };

    let artifact = crate::artifacts::TrainArtifact {
        provenance: Provenance::of(&resolved, None),
        n: resolved.n,
        kappa: resolved.kappa,
        sink: resolved.c1,
        amplitude_relative_errors: rel(&amplitudes, &predicted_amplitudes),
        velocity_relative_errors: rel(&velocities, &predicted_velocities),
        amplitudes,
        velocities,
        positions,
        predicted_amplitudes,
        predicted_velocities,
        radiation: report.radiation,
    };
    let text = write_json(&resolved.out, &artifact)?;
    ctx.echo(Format::Json, &text);
    Ok(())
}

#[derive(Debug, Serialize)]
struct ProfileResolved {
    kappa: f64,
    n: usize,
    c1: f64,
    grid: usize,
    x_min: f64,
    x_max: f64,
    t_end: f64,
    snapshots: usize,
    out: PathBuf,
}

#[derive(Debug, Serialize)]
struct ReturnArtifact {
    provenance: Provenance,
    n: usize,
    kappa: f64,
    sink: f64,
    /// Closed-form crest return time 8κ²/c₁.
    predicted_return_time: f64,
    /// Return time measured by tracking the profile's crest.
    measured_return_time: f64,
    relative_error: f64,
}

fn profile(ctx: &Ctx, args: KdvProfileArgs) -> Result<()> {
    let kappa = check_kappa(args.kappa.or(ctx.f64("kappa")?).unwrap_or(1.0))?;
    let n = args.n.or(ctx.usize("n")?).unwrap_or(1);
    let c1 = args.c1.or(ctx.f64("c1")?).unwrap_or(0.0);
    if c1 < 0.0 || !c1.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "c1 must be non-negative, got {c1}"
        )));
    }
    let t_end = match args.t_end.or(ctx.f64("t-end")?) {
        Some(t) => t,
        None if c1 > 0.0 => crest_return_time(kappa, c1)?,
        None => 2.0 / kappa.powi(3),
    };
    // With a sink the crest follows the parabola 4κ²t − c₁t²/2; cover its
    // apex. Without one it moves at 4κ² for the whole span.
    let default_x_max = if c1 > 0.0 {
        let apex = (4.0 * kappa * kappa) * (4.0 * kappa * kappa) / (2.0 * c1);
        apex + 16.0 / kappa
    } else {
        4.0 * kappa * kappa * t_end + 16.0 / kappa
    };
    let resolved = ProfileResolved {
        kappa,
        n,
        c1,
        grid: args.grid.or(ctx.usize("grid")?).unwrap_or(1024),
        x_min: args.x_min.or(ctx.f64("x-min")?).unwrap_or(-16.0 / kappa),
        x_max: args.x_max.or(ctx.f64("x-max")?).unwrap_or(default_x_max),
        t_end,
        snapshots: args.snapshots.or(ctx.usize("snapshots")?).unwrap_or(8),
        out: args
            .out
            .or(ctx.path("out")?)
            .unwrap_or_else(|| ctx.default_out("profile.tsv")),
    };
    if resolved.grid < 2 {
        return Err(Error::InvalidParameter(
            "--grid must be at least 2 samples".into(),
        ));
    }
    if !(resolved.x_max > resolved.x_min) {
        return Err(Error::InvalidParameter(format!(
            "empty x range [{}, {}]",
            resolved.x_min, resolved.x_max
        )));
    }

    let xs: Vec<f64> = (0..resolved.grid)
        .map(|i| {
            resolved.x_min
                + (resolved.x_max - resolved.x_min) * i as f64 / (resolved.grid - 1) as f64
        })
        .collect();
    let states: Vec<KdvState> = snapshot_times(resolved.t_end, resolved.snapshots)
        .into_iter()
        .map(|t| KdvState {
            u: xs
                .iter()
                .map(|&x| sinking_profile(resolved.n, resolved.kappa, resolved.c1, x, t))
                .collect(),
            x: xs.clone(),
            t,
        })
        .collect();

    let provenance = Provenance::of(&resolved, None);
    let text = format!("{}{}", provenance.comment_block(), render_snapshots(&states));
    write_atomic(&resolved.out, text.as_bytes())?;
    ctx.echo(Format::Tsv, &text);

    if resolved.c1 > 0.0 {
        let predicted = crest_return_time(resolved.kappa, resolved.c1)?;
        let measured = measured_return_time(resolved.n, resolved.kappa, resolved.c1)?;
        let artifact = ReturnArtifact {
            provenance,
            n: resolved.n,
            kappa: resolved.kappa,
            sink: resolved.c1,
            predicted_return_time: predicted,
            measured_return_time: measured,
            relative_error: (measured - predicted).abs() / predicted,
        };
        let text = write_json(&resolved.out.with_extension("json"), &artifact)?;
        ctx.echo(Format::Json, &text);
    }
    Ok(())
}
