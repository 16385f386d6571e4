//! `ingest`: delimited daily-cases file → canonical series file.

use std::path::PathBuf;

use helix_waves_core::ingest::{
    load_csv_with, to_probability, write_series, ColumnMap, CsvOptions, TimeSeries,
};
use helix_waves_core::{Error, Result};
use serde::Serialize;

use crate::args::{Format, IngestArgs, KindArg};
use crate::commands::stem;
use crate::context::{write_atomic, Ctx, Provenance};

#[derive(Debug, Serialize)]
struct Resolved {
    input: PathBuf,
    date_column: String,
    cases_column: String,
    population_column: Option<String>,
    population: Option<u64>,
    delimiter: Option<char>,
    date_format: Option<String>,
    kind: String,
    out: PathBuf,
}

#[derive(Debug, Serialize)]
struct Summary {
    provenance: Provenance,
    input: PathBuf,
    out: PathBuf,
    kind: String,
    days: usize,
    population: u64,
    /// Negative daily counts clamped to zero during conversion.
    clamped_days: usize,
}

fn kind_slug(kind: KindArg) -> &'static str {
    match kind {
        KindArg::Raw => "raw",
        KindArg::Density => "density",
        KindArg::Cumulative => "cumulative",
    }
}

pub fn run(ctx: &Ctx, args: IngestArgs) -> Result<()> {
    let input = args
        .input
        .or(ctx.path("input")?)
        .ok_or_else(|| Error::InvalidParameter("--input is required".into()))?;
    let kind = args.kind.unwrap_or({
        match ctx.string("kind")?.as_deref() {
            Some("raw") => KindArg::Raw,
            Some("density") => KindArg::Density,
            Some("cumulative") | None => KindArg::Cumulative,
            Some(other) => {
                return Err(Error::InvalidInput(format!(
                    "config key `kind` must be raw, density, or cumulative, got `{other}`"
                )))
            }
        }
    });
    let resolved = Resolved {
        date_column: args
            .date_column
            .or(ctx.string("date-column")?)
            .unwrap_or_else(|| "date".into()),
        cases_column: args
            .cases_column
            .or(ctx.string("cases-column")?)
            .unwrap_or_else(|| "new_cases".into()),
        population_column: args.population_column.or(ctx.string("population-column")?),
        population: args.population.or(ctx.u64("population")?),
        delimiter: match args.delimiter {
            Some(c) => Some(c),
            None => ctx.string("delimiter")?.and_then(|s| s.chars().next()),
        },
        date_format: args.date_format.or(ctx.string("date-format")?),
        kind: kind_slug(kind).into(),
        out: args
            .out
            .or(ctx.path("out")?)
            .unwrap_or_else(|| ctx.default_out(&format!("{}.tsv", stem(&input)))),
        input,
    };

    let map = ColumnMap::new(
        resolved.date_column.clone(),
        resolved.cases_column.clone(),
        resolved.population_column.clone(),
        resolved.population,
    )?;
    let options = CsvOptions {
        delimiter: resolved.delimiter.map(|c| c as u8),
        date_format: resolved.date_format.clone(),
    };
    let raw = load_csv_with(&resolved.input, &map, &options)?;
    log::info!(
        "loaded {} days from {}",
        raw.len(),
        resolved.input.display()
    );

    let (series, clamped_days): (TimeSeries, usize) = match kind {
        KindArg::Raw => (raw, 0),
        KindArg::Density | KindArg::Cumulative => {
            let prob = to_probability(&raw)?;
            if !prob.cleaning.is_clean() {
                log::warn!(
                    "clamped {} negative daily counts to zero",
                    prob.cleaning.clamped.len()
                );
            }
            let n = prob.cleaning.clamped.len();
            match kind {
                KindArg::Density => (prob.density, n),
                _ => (prob.cumulative, n),
            }
        }
    };

    let provenance = Provenance::of(&resolved, None);
    let mut buf = provenance.comment_block().into_bytes();
    write_series(&series, &mut buf)?;
    write_atomic(&resolved.out, &buf)?;

    let summary = Summary {
        days: series.len(),
        population: series.population(),
        kind: resolved.kind.clone(),
        input: resolved.input.clone(),
        out: resolved.out.clone(),
        clamped_days,
        provenance,
    };
    let text = serde_json::to_string_pretty(&summary)
        .map_err(|e| Error::InvalidInput(format!("cannot serialize summary: {e}")))?;
    ctx.echo(Format::Json, &text);
    Ok(())
}
