//! `report`: consolidate fits, series, ratio analysis, and an optional
//! soliton-train report into one markdown document plus gnuplot-ready
//! plot files.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use helix_waves_core::analysis::{model_consistency, pearson, wave_ratios, RatioRow};
use helix_waves_core::ingest::{read_series, to_probability, SeriesKind, TimeSeries};
use helix_waves_core::logistic::LogisticWave;
use helix_waves_core::reference::cumulative_from_density;
use helix_waves_core::{Error, Result};
use serde::Serialize;

use crate::args::{Format, ReportArgs};
use crate::artifacts::{FitArtifact, RatioRowJson, RatiosArtifact, TrainArtifact};
use crate::commands::stem;
use crate::context::{write_atomic, Ctx, Provenance};

#[derive(Debug, Serialize)]
struct Resolved {
    series: PathBuf,
    fits: PathBuf,
    ratios: Option<PathBuf>,
    kdv: Option<PathBuf>,
    out: PathBuf,
    threshold: f64,
    strict: bool,
}

pub fn run(ctx: &Ctx, args: ReportArgs) -> Result<()> {
    let resolved = Resolved {
        series: args
            .series
            .or(ctx.path("series")?)
            .ok_or_else(|| Error::InvalidParameter("--series is required".into()))?,
        fits: args
            .fits
            .or(ctx.path("fits")?)
            .ok_or_else(|| Error::InvalidParameter("--fits is required".into()))?,
        ratios: match args.ratios {
            Some(p) => Some(p),
            None => ctx.path("ratios")?,
        },
        kdv: match args.kdv {
            Some(p) => Some(p),
            None => ctx.path("kdv")?,
        },
        out: args
            .out
            .or(ctx.path("out")?)
            .unwrap_or_else(|| ctx.default_out("report")),
        threshold: args.threshold.or(ctx.f64("threshold")?).unwrap_or(0.5),
        strict: args.strict || ctx.bool("strict")?.unwrap_or(false),
    };

    let fit_paths = files_with_extension(&resolved.fits, "json")?;
    let series_paths = files_with_extension(&resolved.series, "tsv")?;
    let fits: BTreeMap<String, PathBuf> =
        fit_paths.into_iter().map(|p| (stem(&p), p)).collect();
    let series: BTreeMap<String, PathBuf> =
        series_paths.into_iter().map(|p| (stem(&p), p)).collect();

    let mut warnings: Vec<String> = Vec::new();
    for name in fits.keys() {
        if !series.contains_key(name) {
            warnings.push(format!("fit `{name}` has no matching series file"));
        }
    }
    for name in series.keys() {
        if !fits.contains_key(name) {
            warnings.push(format!("series `{name}` has no matching fit artifact"));
        }
    }
    if fits.is_empty() {
        warnings.push(format!(
            "no fit artifacts (*.json) under {}",
            resolved.fits.display()
        ));
    }

    let provenance = Provenance::of(&resolved, None);
    let mut md = String::new();
    let _ = writeln!(md, "# Wave decomposition report");
    let _ = writeln!(md);
    let _ = writeln!(
        md,
        "Generated by helix-waves {} (configuration {}).",
        provenance.tool_version, provenance.config_hash
    );

    // Per-country plot data and the wave-parameter table.
    let mut wave_table = String::new();
    wave_table.push_str("| Series | Wave | A | B | C | Peak day |\n");
    wave_table.push_str("|--------|------|---|---|---|----------|\n");
    let mut labelled_rows: Vec<(String, RatioRow)> = Vec::new();
    let mut plots: Vec<String> = Vec::new();

    for (name, fit_path) in &fits {
        let artifact = FitArtifact::read(fit_path)?;
        let waves = artifact.to_waves()?;
        for (i, w) in waves.iter().enumerate() {
            let _ = writeln!(
                wave_table,
                "| {name} | {} | {} | {} | {} | {:.1} |",
                i + 1,
                w.a,
                w.b,
                w.c,
                w.peak_time()
            );
        }

        if waves.len() >= 2 {
            let peaks: Vec<(f64, f64)> =
                waves.iter().map(|w| (w.peak_time(), w.peak_height())).collect();
            match wave_ratios(&peaks) {
                Ok(rows) => {
                    for row in rows {
                        labelled_rows.push((name.clone(), row));
                    }
                }
                Err(e) => warnings.push(format!("{name}: ratios unavailable ({e})")),
            }
        } else {
            warnings.push(format!("{name}: single wave, no ratio rows"));
        }

        if let Some(series_path) = series.get(name) {
            write_plot_files(&resolved.out, name, series_path, &waves, &provenance)?;
            plots.push(name.clone());
        }
    }

    let _ = writeln!(md);
    let _ = writeln!(md, "## Fitted waves");
    let _ = writeln!(md);
    if fits.is_empty() {
        let _ = writeln!(md, "No fit artifacts found.");
    } else {
        md.push_str(&wave_table);
    }

    // Ratio table: taken from a `ratios` artifact when one is supplied,
    // otherwise recomputed from the fits read above.
    let ratio_rows: Vec<RatioRowJson>;
    let ratio_pearson: Option<f64>;
    let ratio_threshold: f64;
    if let Some(path) = &resolved.ratios {
        let artifact = RatiosArtifact::read(path)?;
        ratio_rows = artifact.rows;
        ratio_pearson = Some(artifact.pearson_r);
        ratio_threshold = artifact.threshold;
    } else {
        let consistency = model_consistency(&labelled_rows, resolved.threshold);
        ratio_rows = consistency
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
            .collect();
        let times: Vec<f64> = labelled_rows.iter().map(|(_, r)| r.time_ratio).collect();
        let amps: Vec<f64> = labelled_rows.iter().map(|(_, r)| r.amplitude_ratio).collect();
        ratio_pearson = pearson(&times, &amps).ok();
        ratio_threshold = resolved.threshold;
    }

    let _ = writeln!(md);
    let _ = writeln!(md, "## Wave ratios");
    let _ = writeln!(md);
    if ratio_rows.is_empty() {
        let _ = writeln!(md, "No series has two or more waves; ratios not defined.");
    } else {
        md.push_str("| Series | Wave | Time ratio | Amplitude ratio | Deviation |\n");
        md.push_str("|--------|------|------------|-----------------|-----------|\n");
        let mut flagged = 0;
        for row in &ratio_rows {
            let mark = if row.flagged {
                flagged += 1;
                " *"
            } else {
                ""
            };
            let _ = writeln!(
                md,
                "| {} | {} | {:.3} | {:.3} | {:.1}%{mark} |",
                row.country,
                row.wave,
                row.time_ratio,
                row.amplitude_ratio,
                row.relative_deviation * 100.0
            );
        }
        let _ = writeln!(md);
        match ratio_pearson {
            Some(r) => {
                let _ = writeln!(md, "Pearson correlation of the two columns: r = {r:.3}.");
            }
            None => {
                let _ = writeln!(md, "Too few ratio rows for a correlation.");
            }
        }
        if flagged > 0 {
            let _ = writeln!(
                md,
                "Rows marked * deviate from ratio equality by more than {:.0}%.",
                ratio_threshold * 100.0
            );
        }
    }

    if let Some(kdv_path) = &resolved.kdv {
        let train = TrainArtifact::read(kdv_path)?;
        let _ = writeln!(md);
        let _ = writeln!(md, "## Soliton train");
        let _ = writeln!(md);
        let _ = writeln!(
            md,
            "Order {} impulse, width parameter {}.",
            train.n, train.kappa
        );
        let _ = writeln!(md);
        md.push_str("| Soliton | Amplitude | Predicted | Error | Velocity | Predicted | Error |\n");
        md.push_str("|---------|-----------|-----------|-------|----------|-----------|-------|\n");
        for j in 0..train.amplitudes.len() {
            let _ = writeln!(
                md,
                "| {} | {:.4} | {:.4} | {:.2}% | {:.4} | {:.4} | {:.2}% |",
                j + 1,
                train.amplitudes[j],
                train.predicted_amplitudes[j],
                train.amplitude_relative_errors[j] * 100.0,
                train.velocities[j],
                train.predicted_velocities[j],
                train.velocity_relative_errors[j] * 100.0
            );
        }
        let _ = writeln!(md);
        let _ = writeln!(md, "Residual radiation away from the crests: {:.3e}.", train.radiation);
    }

    let _ = writeln!(md);
    let _ = writeln!(md, "## Plot data");
    let _ = writeln!(md);
    if plots.is_empty() {
        let _ = writeln!(md, "No series/fit pairs; nothing plotted.");
    } else {
        let _ = writeln!(
            md,
            "Per series: `<name>_cumulative.tsv` and `<name>_daily.tsv`, columns \
             day / empirical / fitted. Render with:"
        );
        let _ = writeln!(md);
        let _ = writeln!(md, "```");
        let _ = writeln!(
            md,
            "gnuplot -e \"plot '{}_cumulative.tsv' using 1:2 with points, '' using 1:3 with lines\"",
            plots[0]
        );
        let _ = writeln!(md, "```");
    }

    if !warnings.is_empty() {
        let _ = writeln!(md);
        let _ = writeln!(md, "## Warnings");
        let _ = writeln!(md);
        for w in &warnings {
            let _ = writeln!(md, "- {w}");
            log::warn!("{w}");
        }
    }

    write_atomic(&resolved.out.join("report.md"), md.as_bytes())?;
    ctx.echo(Format::Markdown, &md);

    if resolved.strict && !warnings.is_empty() {
        return Err(Error::InvalidInput(format!(
            "strict mode: {}",
            warnings.join("; ")
        )));
    }
    Ok(())
}

fn files_with_extension(dir: &Path, ext: &str) -> Result<Vec<PathBuf>> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e.eq_ignore_ascii_case(ext)))
        .collect();
    paths.sort();
    Ok(paths)
}

/// Empirical vs fitted curves for one series, cumulative and daily.
fn write_plot_files(
    out_dir: &Path,
    name: &str,
    series_path: &Path,
    waves: &[LogisticWave],
    provenance: &Provenance,
) -> Result<()> {
    let series: TimeSeries = read_series(series_path)?;
    let (cumulative, daily): (Vec<f64>, Vec<f64>) = match series.kind() {
        SeriesKind::CumulativeProbability => {
            let c = series.values().to_vec();
            let mut d = Vec::with_capacity(c.len());
            d.push(c[0]);
            for w in c.windows(2) {
                d.push(w[1] - w[0]);
            }
            (c, d)
        }
        SeriesKind::DailyProbabilityDensity => (
            cumulative_from_density(series.values()),
            series.values().to_vec(),
        ),
        SeriesKind::RawDailyCases => {
            let prob = to_probability(&series)?;
            (
                prob.cumulative.values().to_vec(),
                prob.density.values().to_vec(),
            )
        }
    };

    let eval_cumulative =
        |t: f64| -> f64 { waves.iter().map(|w| w.eval_cumulative(t)).sum() };
    let eval_daily = |t: f64| -> f64 { waves.iter().map(|w| w.eval_daily(t)).sum() };

    let render = |values: &[f64], eval: &dyn Fn(f64) -> f64| -> String {
        let mut text = provenance.comment_block();
        text.push_str("day\tempirical\tfitted\n");
        for (i, v) in values.iter().enumerate() {
            let t = i as f64;
            let _ = writeln!(text, "{t}\t{v}\t{}", eval(t));
        }
        text
    };

    write_atomic(
        &out_dir.join(format!("{name}_cumulative.tsv")),
        render(&cumulative, &eval_cumulative).as_bytes(),
    )?;
    write_atomic(
        &out_dir.join(format!("{name}_daily.tsv")),
        render(&daily, &eval_daily).as_bytes(),
    )?;
    Ok(())
}
