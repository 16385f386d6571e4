//! `sir`: integrate an outbreak, export the trajectory, and check how well
//! a single logistic wave reproduces the cumulative infections.

use std::fmt::Write as _;
use std::path::PathBuf;

use helix_waves_core::sir::{
    final_size_susceptible, logistic_reduction_check, simulate as integrate, ReductionReport,
    SirConfig,
};
use helix_waves_core::{Error, Result};
use serde::Serialize;

use crate::args::{Format, SirArgs, SirCommand, SirSimulateArgs};
use crate::context::{write_atomic, write_json, Ctx, Provenance};

pub fn run(ctx: &Ctx, args: SirArgs) -> Result<()> {
    match args.command {
        SirCommand::Simulate(a) => simulate(ctx, a),
    }
}

#[derive(Debug, Serialize)]
struct Resolved {
    beta: f64,
    gamma: f64,
    population: f64,
    i0: f64,
    r0: f64,
    t_end: f64,
    dt: f64,
    stride: usize,
    out: PathBuf,
}

#[derive(Debug, Serialize)]
struct Artifact {
    provenance: Provenance,
    basic_reproduction_number: f64,
    conservation_drift: f64,
    /// Fraction still susceptible when the run ends.
    final_susceptible: f64,
    /// Root of the closed final-size relation, for comparison.
    predicted_final_susceptible: f64,
    /// Single-wave fit of the cumulative curve; absent when no outbreak
    /// grows (transmission at or below recovery).
    reduction: Option<ReductionReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    note: Option<String>,
}

fn simulate(ctx: &Ctx, args: SirSimulateArgs) -> Result<()> {
    let population = args.n.or(ctx.f64("n")?).unwrap_or(1e6);
    if !(population > 0.0) || !population.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "population must be positive, got {population}"
        )));
    }
    let t_end = args.t_end.or(ctx.f64("t-end")?).unwrap_or(500.0);
    let dt = args.dt.or(ctx.f64("dt")?).unwrap_or(0.05);
    let stride = match args.stride.or(ctx.usize("stride")?) {
        Some(s) => s.max(1),
        None => ((t_end / dt) as usize / 5000).max(1),
    };
    let resolved = Resolved {
        beta: args.beta.or(ctx.f64("beta")?).unwrap_or(0.15),
        gamma: args.gamma.or(ctx.f64("gamma")?).unwrap_or(0.1),
        population,
        i0: args.i0.or(ctx.f64("i0")?).unwrap_or(10.0),
        r0: args.r0.or(ctx.f64("r0")?).unwrap_or(0.0),
        t_end,
        dt,
        stride,
        out: args
            .out
            .or(ctx.path("out")?)
            .unwrap_or_else(|| ctx.default_out("sir.tsv")),
    };

    let cfg = SirConfig::new(
        resolved.beta,
        resolved.gamma,
        resolved.i0 / population,
        resolved.r0 / population,
    )?;
    let traj = integrate(&cfg, resolved.t_end, resolved.dt)?;

    let provenance = Provenance::of(&resolved, None);
    let mut text = provenance.comment_block();
    let _ = writeln!(text, "# population: {population}");
    let _ = writeln!(text, "t\tS\tI\tR");
    for i in (0..traj.times.len()).step_by(resolved.stride) {
        let _ = writeln!(
            text,
            "{}\t{}\t{}\t{}",
            traj.times[i],
            traj.s[i] * population,
            traj.i[i] * population,
            traj.r[i] * population
        );
    }
    write_atomic(&resolved.out, text.as_bytes())?;
    ctx.echo(Format::Tsv, &text);

    let (reduction, note) = match logistic_reduction_check(&cfg, resolved.t_end, resolved.dt) {
        Ok(report) => (Some(report), None),
        Err(Error::Unsupported(msg)) => (None, Some(msg)),
        Err(e) => return Err(e),
    };
    let artifact = Artifact {
        provenance,
        basic_reproduction_number: cfg.basic_reproduction_number(),
        conservation_drift: traj.conservation_drift(),
        final_susceptible: traj.final_susceptible(),
        predicted_final_susceptible: final_size_susceptible(&cfg),
        reduction,
        note,
    };
    let text = write_json(&resolved.out.with_extension("json"), &artifact)?;
    ctx.echo(Format::Json, &text);
    Ok(())
}
