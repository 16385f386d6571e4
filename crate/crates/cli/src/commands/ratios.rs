//! `ratios`: fit artifacts → per-wave time/amplitude ratio table with the
//! correlation between the two ratio columns.

use std::fmt::Write as _;
use std::path::PathBuf;

use helix_waves_core::analysis::{model_consistency, pearson, wave_ratios, RatioRow};
use helix_waves_core::{Error, Result};
use serde::Serialize;

use crate::args::{Format, RatiosArgs};
use crate::artifacts::{FitArtifact, RatioRowJson, RatiosArtifact};
use crate::context::{write_atomic, write_json, Ctx, Provenance};

#[derive(Debug, Serialize)]
struct Resolved {
    fits: PathBuf,
    out: PathBuf,
    markdown: bool,
    threshold: f64,
}

pub fn run(ctx: &Ctx, args: RatiosArgs) -> Result<()> {
    let resolved = Resolved {
        fits: args
            .fits
            .or(ctx.path("fits")?)
            .ok_or_else(|| Error::InvalidParameter("--fits is required".into()))?,
        out: args
            .out
            .or(ctx.path("out")?)
            .unwrap_or_else(|| ctx.default_out("table2.json")),
        markdown: args.markdown || ctx.bool("markdown")?.unwrap_or(false),
        threshold: args.threshold.or(ctx.f64("threshold")?).unwrap_or(0.5),
    };

    let labelled = collect_rows(&resolved.fits)?;
    if labelled.is_empty() {
        return Err(Error::InvalidInput(format!(
            "no fit artifact under {} has more than one wave",
            resolved.fits.display()
        )));
    }

    let times: Vec<f64> = labelled.iter().map(|(_, r)| r.time_ratio).collect();
    let amplitudes: Vec<f64> = labelled.iter().map(|(_, r)| r.amplitude_ratio).collect();
    let pearson_r = pearson(&times, &amplitudes)?;
    let consistency = model_consistency(&labelled, resolved.threshold);

    let artifact = RatiosArtifact {
        provenance: Provenance::of(&resolved, None),
        threshold: resolved.threshold,
        rows: consistency
            .rows
            .iter()
            .map(|r| RatioRowJson {
                country: r.label.clone(),
                wave: r.wave_index,
                time_ratio: r.time_ratio,
                amplitude_ratio: r.amplitude_ratio,
                relative_deviation: r.relative_deviation,
                flagged: r.flagged,
            })
            .collect(),
        pearson_r,
        flagged: consistency.flagged,
    };
    let text = write_json(&resolved.out, &artifact)?;
    ctx.echo(Format::Json, &text);

    if resolved.markdown || ctx.format == Some(Format::Markdown) {
        let md = render_markdown(&artifact);
        if resolved.markdown {
            write_atomic(&resolved.out.with_extension("md"), md.as_bytes())?;
        }
        ctx.echo(Format::Markdown, &md);
    }
    Ok(())
}

/// Read every fit artifact in `dir` (sorted by file name) and expand it
/// into labelled ratio rows. Single-wave fits contribute nothing.
fn collect_rows(dir: &std::path::Path) -> Result<Vec<(String, RatioRow)>> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")))
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(Error::InvalidInput(format!(
            "no fit artifacts (*.json) under {}",
            dir.display()
        )));
    }

    let mut labelled = Vec::new();
    for path in &paths {
        let artifact = FitArtifact::read(path)?;
        let waves = artifact.to_waves()?;
        let peaks: Vec<(f64, f64)> =
            waves.iter().map(|w| (w.peak_time(), w.peak_height())).collect();
        if peaks.len() < 2 {
            log::info!("{}: single wave, no ratios", artifact.label);
            continue;
        }
        let rows = wave_ratios(&peaks).map_err(|e| match e {
            Error::InvalidParameter(msg) | Error::InvalidInput(msg) => {
                Error::InvalidInput(format!("{}: {msg}", artifact.label))
            }
            other => other,
        })?;
        for row in rows {
            labelled.push((artifact.label.clone(), row));
        }
    }
    Ok(labelled)
}

fn render_markdown(artifact: &RatiosArtifact) -> String {
    let mut md = String::new();
    md.push_str("| Country | Wave | Time ratio | Amplitude ratio |\n");
    md.push_str("|---------|------|------------|-----------------|\n");
    for row in &artifact.rows {
        let mark = if row.flagged { " *" } else { "" };
        let _ = writeln!(
            md,
            "| {} | {} | {:.3} | {:.3}{mark} |",
            row.country, row.wave, row.time_ratio, row.amplitude_ratio
        );
    }
    let _ = writeln!(md);
    let _ = writeln!(md, "Pearson correlation of the two columns: r = {:.3}.", artifact.pearson_r);
    if artifact.flagged > 0 {
        let _ = writeln!(
            md,
            "Rows marked * deviate from ratio equality by more than {:.0}%.",
            artifact.threshold * 100.0
        );
    }
    md
}
