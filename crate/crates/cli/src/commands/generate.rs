//! `generate`: write the bundled multi-country reference series as
//! canonical cumulative files, optionally with seeded multiplicative
//! noise.

use std::path::PathBuf;

use chrono::NaiveDate;
use helix_waves_core::ingest::{write_series, SeriesKind, TimeSeries};
use helix_waves_core::reference::{catalogue, cumulative_from_density};
use helix_waves_core::{Error, Result};
use serde::Serialize;

use crate::args::{Format, GenerateArgs};
use crate::context::{write_atomic, Ctx, Provenance};

#[derive(Debug, Serialize)]
struct Resolved {
    out: PathBuf,
    sigma: f64,
    seed: u64,
    countries: Vec<String>,
}

#[derive(Debug, Serialize)]
struct Summary {
    provenance: Provenance,
    out: PathBuf,
    files: Vec<FileSummary>,
}

#[derive(Debug, Serialize)]
struct FileSummary {
    country: String,
    file: String,
    days: usize,
    waves: usize,
}

pub fn run(ctx: &Ctx, args: GenerateArgs) -> Result<()> {
    let all = catalogue();
    let requested: Vec<String> = if args.country.is_empty() {
        match ctx.string("country")? {
            Some(one) => vec![one],
            None => all.iter().map(|c| c.name.to_string()).collect(),
        }
    } else {
        args.country.clone()
    };
    let mut selected = Vec::new();
    for name in &requested {
        let idx = all
            .iter()
            .position(|c| c.name.eq_ignore_ascii_case(name))
            .ok_or_else(|| {
                Error::InvalidParameter(format!("unknown country `{name}`"))
            })?;
        if !selected.contains(&idx) {
            selected.push(idx);
        }
    }
    selected.sort();

    let resolved = Resolved {
        out: args
            .out
            .or(ctx.path("out")?)
            .unwrap_or_else(|| ctx.output_dir.clone()),
        sigma: args.sigma.or(ctx.f64("sigma")?).unwrap_or(0.0),
        seed: args.seed.or(ctx.u64("seed")?).unwrap_or(0),
        countries: selected
            .iter()
            .map(|&i| all[i].name.to_string())
            .collect(),
    };
    if resolved.sigma < 0.0 || !resolved.sigma.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "sigma must be non-negative, got {}",
            resolved.sigma
        )));
    }

    let noisy = resolved.sigma > 0.0;
    let seed = noisy.then_some(resolved.seed);
    let provenance = Provenance::of(&resolved, seed);
    let origin = NaiveDate::from_ymd_opt(2020, 1, 1).expect("valid origin date");

    let mut files = Vec::new();
    for &idx in &selected {
        let country = &all[idx];
        // Offset the seed by the catalogue index so every country draws an
        // independent noise stream while the whole set stays reproducible.
        let density = if noisy {
            country.noisy_density(resolved.seed.wrapping_add(idx as u64), resolved.sigma)?
        } else {
            country.density()
        };
        let cumulative = cumulative_from_density(&density);
        let series = TimeSeries::new(
            origin,
            cumulative,
            country.population,
            SeriesKind::CumulativeProbability,
        )?;

        let file = format!("{}.tsv", country.name.to_lowercase());
        let mut buf = provenance.comment_block().into_bytes();
        write_series(&series, &mut buf)?;
        write_atomic(&resolved.out.join(&file), &buf)?;
        files.push(FileSummary {
            country: country.name.to_string(),
            file,
            days: series.len(),
            waves: country.waves.len(),
        });
    }

    let summary = Summary {
        provenance,
        out: resolved.out.clone(),
        files,
    };
    let text = serde_json::to_string_pretty(&summary)
        .map_err(|e| Error::InvalidInput(format!("cannot serialize summary: {e}")))?;
    ctx.echo(Format::Json, &text);
    Ok(())
}
