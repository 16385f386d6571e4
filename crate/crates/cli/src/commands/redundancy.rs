//! `redundancy`: long-format contingency CSV → entropies and the signed
//! three-way mutual redundancy.

use std::path::PathBuf;

use helix_waves_core::infotheory::{mutual_redundancy, ContingencyCube};
use helix_waves_core::{Error, Result};
use serde::Serialize;

use crate::args::{Format, RedundancyArgs};
use crate::context::{write_json, Ctx, Provenance};

#[derive(Debug, Serialize)]
struct Resolved {
    input: PathBuf,
    out: PathBuf,
}

#[derive(Debug, Serialize)]
struct Artifact {
    provenance: Provenance,
    dims: (usize, usize, usize),
    total: f64,
    h1: f64,
    h2: f64,
    h3: f64,
    h12: f64,
    h13: f64,
    h23: f64,
    h123: f64,
    r123: f64,
}

pub fn run(ctx: &Ctx, args: RedundancyArgs) -> Result<()> {
    let resolved = Resolved {
        input: args
            .input
            .or(ctx.path("input")?)
            .ok_or_else(|| Error::InvalidParameter("--input is required".into()))?,
        out: args
            .out
            .or(ctx.path("out")?)
            .unwrap_or_else(|| ctx.default_out("redundancy.json")),
    };

    let records = read_long_csv(&resolved.input)?;
    let cube = ContingencyCube::from_long_records(&records)?;
    let report = mutual_redundancy(&cube)?;

    let artifact = Artifact {
        provenance: Provenance::of(&resolved, None),
        dims: cube.dims(),
        total: cube.total(),
        h1: report.h1,
        h2: report.h2,
        h3: report.h3,
        h12: report.h12,
        h13: report.h13,
        h23: report.h23,
        h123: report.h123,
        r123: report.r123,
    };
    let text = write_json(&resolved.out, &artifact)?;
    ctx.echo(Format::Json, &text);
    Ok(())
}

/// Read `category1, category2, category3, count` rows. Columns are taken
/// by position; the header row is required but its names are free.
fn read_long_csv(path: &std::path::Path) -> Result<Vec<(String, String, String, f64)>> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
    let mut records = Vec::new();
    for (i, row) in reader.records().enumerate() {
        let line = i + 2; // 1-based, after the header
        let row = row.map_err(|e| Error::Row {
            line,
            message: e.to_string(),
        })?;
        if row.len() < 4 {
            return Err(Error::Row {
                line,
                message: format!("expected 4 columns, found {}", row.len()),
            });
        }
        let count: f64 = row[3].parse().map_err(|_| Error::Row {
            line,
            message: format!("count `{}` is not a number", &row[3]),
        })?;
        records.push((row[0].to_string(), row[1].to_string(), row[2].to_string(), count));
    }
    if records.is_empty() {
        return Err(Error::EmptyInput(format!(
            "{} has no data rows",
            path.display()
        )));
    }
    Ok(records)
}
