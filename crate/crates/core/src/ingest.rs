//! Loading reported case counts into clean daily time series.
//!
//! Raw surveillance exports are messy in predictable ways: inconsistent
//! delimiters, two common date formats, duplicate rows for one day, gaps
//! for days with no report, and occasional negative corrections. This
//! module turns such a file into a [`TimeSeries`] with exactly one entry
//! per calendar day, converts counts to probability scale against a
//! population, smooths with a centred moving average, and reads/writes a
//! canonical TSV format used by the rest of the pipeline.

use std::fmt;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// What the values of a [`TimeSeries`] mean.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeriesKind {
    /// Daily reported counts, as loaded (may contain negative corrections).
    RawDailyCases,
    /// Daily counts divided by population; non-negative.
    DailyProbabilityDensity,
    /// Running sum of the daily density; non-decreasing, within [0, 1].
    CumulativeProbability,
}

impl SeriesKind {
    fn slug(self) -> &'static str {
        match self {
            SeriesKind::RawDailyCases => "raw_daily_cases",
            SeriesKind::DailyProbabilityDensity => "daily_probability_density",
            SeriesKind::CumulativeProbability => "cumulative_probability",
        }
    }

    fn from_slug(s: &str) -> Option<Self> {
        match s {
            "raw_daily_cases" => Some(SeriesKind::RawDailyCases),
            "daily_probability_density" => Some(SeriesKind::DailyProbabilityDensity),
            "cumulative_probability" => Some(SeriesKind::CumulativeProbability),
            _ => None,
        }
    }
}

impl fmt::Display for SeriesKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.slug())
    }
}

/// A daily time series: one value per calendar day starting at
/// `origin_date`, tied to the population it describes.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    origin_date: NaiveDate,
    values: Vec<f64>,
    population: u64,
    kind: SeriesKind,
}

impl TimeSeries {
    /// Validate and build a series.
    ///
    /// All kinds require non-empty, finite values and a positive
    /// population. Densities must be non-negative; cumulative series must
    /// be non-decreasing (to rounding) and must not exceed 1.
    pub fn new(
        origin_date: NaiveDate,
        values: Vec<f64>,
        population: u64,
        kind: SeriesKind,
    ) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidInput("time series has no values".into()));
        }
        if population == 0 {
            return Err(Error::InvalidParameter(
                "population must be a positive number of persons".into(),
            ));
        }
        if let Some((i, v)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "value at day {i} is not finite ({v})"
            )));
        }
        match kind {
            SeriesKind::RawDailyCases => {}
            SeriesKind::DailyProbabilityDensity => {
                if let Some((i, v)) = values.iter().enumerate().find(|(_, v)| **v < 0.0) {
                    return Err(Error::InvalidInput(format!(
                        "density at day {i} is negative ({v})"
                    )));
                }
            }
            SeriesKind::CumulativeProbability => {
                let mut prev = 0.0;
                for (i, &v) in values.iter().enumerate() {
                    if v < prev - 1e-12 {
                        return Err(Error::InvalidInput(format!(
                            "cumulative series decreases at day {i} ({prev} -> {v})"
                        )));
                    }
                    if v > 1.0 + 1e-12 {
                        return Err(Error::InvalidInput(format!(
                            "cumulative probability exceeds 1 at day {i} ({v}); counts exceed population"
                        )));
                    }
                    prev = v;
                }
            }
        }
        Ok(Self {
            origin_date,
            values,
            population,
            kind,
        })
    }

    pub fn origin_date(&self) -> NaiveDate {
        self.origin_date
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn population(&self) -> u64 {
        self.population
    }

    pub fn kind(&self) -> SeriesKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Calendar date of day index `i`.
    pub fn date_at(&self, i: usize) -> NaiveDate {
        self.origin_date + chrono::Days::new(i as u64)
    }
}

/// How to find the relevant columns in a delimited file.
///
/// Exactly one population source must be given: either the name of a
/// per-row population column or an explicit override.
#[derive(Debug, Clone)]
pub struct ColumnMap {
    date_column: String,
    cases_column: String,
    population_column: Option<String>,
    population_override: Option<u64>,
}

impl ColumnMap {
    pub fn new(
        date_column: impl Into<String>,
        cases_column: impl Into<String>,
        population_column: Option<String>,
        population_override: Option<u64>,
    ) -> Result<Self> {
        match (&population_column, &population_override) {
            (Some(_), Some(_)) => Err(Error::InvalidParameter(
                "give either a population column or a population override, not both".into(),
            )),
            (None, None) => Err(Error::InvalidParameter(
                "a population column or a population override is required".into(),
            )),
            _ => Ok(Self {
                date_column: date_column.into(),
                cases_column: cases_column.into(),
                population_column,
                population_override,
            }),
        }
    }
}

/// Optional parsing knobs for [`load_csv_with`].
#[derive(Debug, Clone, Default)]
pub struct CsvOptions {
    /// Field delimiter; auto-detected among `,`, `;`, tab when `None`.
    pub delimiter: Option<u8>,
    /// chrono format string for the date column; auto-detected between
    /// ISO-8601 (`%Y-%m-%d`) and `%d/%m/%Y` when `None`.
    pub date_format: Option<String>,
}

/// Load a delimited text file into a raw daily series.
///
/// Rows may arrive in any order; rows sharing a date are summed; days with
/// no row between the first and last reported dates are filled with 0.
pub fn load_csv(path: impl AsRef<Path>, map: &ColumnMap) -> Result<TimeSeries> {
    load_csv_with(path, map, &CsvOptions::default())
}

/// [`load_csv`] with explicit delimiter / date-format settings.
pub fn load_csv_with(
    path: impl AsRef<Path>,
    map: &ColumnMap,
    options: &CsvOptions,
) -> Result<TimeSeries> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    if text.trim().is_empty() {
        return Err(Error::EmptyInput(format!("{} is empty", path.display())));
    }

    let delimiter = match options.delimiter {
        Some(d) => d,
        None => detect_delimiter(&text)?,
    };

    let mut reader = csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .has_headers(true)
        .trim(csv::Trim::All)
        .flexible(false)
        .from_reader(text.as_bytes());

    let headers = reader
        .headers()
        .map_err(|e| Error::InvalidInput(format!("cannot read header: {e}")))?
        .clone();
    let col = |name: &str| -> Result<usize> {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::MissingColumn(name.to_string()))
    };
    let date_idx = col(&map.date_column)?;
    let cases_idx = col(&map.cases_column)?;
    let pop_idx = map
        .population_column
        .as_deref()
        .map(col)
        .transpose()?;

    let mut date_format: Option<String> = options.date_format.clone();
    let mut rows: Vec<(NaiveDate, f64)> = Vec::new();
    let mut population: Option<u64> = map.population_override;

    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e
                .position()
                .map(|p| p.line() as usize)
                .unwrap_or(0);
            Error::Row {
                line,
                message: e.to_string(),
            }
        })?;
        let line = record
            .position()
            .map(|p| p.line() as usize)
            .unwrap_or(0);

        let date_text = record.get(date_idx).unwrap_or("");
        let format = match &date_format {
            Some(f) => f.clone(),
            None => {
                let f = detect_date_format(date_text).ok_or_else(|| Error::Row {
                    line,
                    message: format!(
                        "cannot parse date `{date_text}` as ISO-8601 or DD/MM/YYYY"
                    ),
                })?;
                date_format = Some(f.clone());
                f
            }
        };
        let date = NaiveDate::parse_from_str(date_text, &format).map_err(|_| Error::Row {
            line,
            message: format!("cannot parse date `{date_text}` with format `{format}`"),
        })?;

        let cases_text = record.get(cases_idx).unwrap_or("");
        let cases: f64 = cases_text.parse().map_err(|_| Error::Row {
            line,
            message: format!("cannot parse case count `{cases_text}` as a number"),
        })?;
        if !cases.is_finite() {
            return Err(Error::Row {
                line,
                message: format!("case count `{cases_text}` is not finite"),
            });
        }

        if population.is_none() {
            if let Some(pi) = pop_idx {
                let pop_text = record.get(pi).unwrap_or("");
                if !pop_text.is_empty() {
                    let p: f64 = pop_text.parse().map_err(|_| Error::Row {
                        line,
                        message: format!("cannot parse population `{pop_text}` as a number"),
                    })?;
                    if p < 1.0 || !p.is_finite() {
                        return Err(Error::Row {
                            line,
                            message: format!("population `{pop_text}` must be at least 1"),
                        });
                    }
                    population = Some(p.round() as u64);
                }
            }
        }

        rows.push((date, cases));
    }

    if rows.is_empty() {
        return Err(Error::EmptyInput(format!(
            "{} has a header but no data rows",
            path.display()
        )));
    }
    let population = population.ok_or_else(|| {
        Error::InvalidInput("population column never held a usable value".into())
    })?;

    rows.sort_by_key(|(d, _)| *d);
    let origin = rows[0].0;
    let last = rows[rows.len() - 1].0;
    let days = (last - origin).num_days() as usize + 1;
    let mut values = vec![0.0; days];
    for (date, cases) in rows {
        let idx = (date - origin).num_days() as usize;
        values[idx] += cases;
    }

    TimeSeries::new(origin, values, population, SeriesKind::RawDailyCases)
}

fn detect_delimiter(text: &str) -> Result<u8> {
    let header = text.lines().next().unwrap_or("");
    let candidates = [b',', b';', b'\t'];
    let counts: Vec<usize> = candidates
        .iter()
        .map(|&d| header.bytes().filter(|&b| b == d).count())
        .collect();
    let best = (0..candidates.len()).max_by_key(|&i| counts[i]).unwrap();
    if counts[best] == 0 {
        return Err(Error::InvalidInput(
            "could not detect a delimiter (expected comma, semicolon, or tab) in the header".into(),
        ));
    }
    Ok(candidates[best])
}

fn detect_date_format(text: &str) -> Option<String> {
    for fmt in ["%Y-%m-%d", "%d/%m/%Y"] {
        if NaiveDate::parse_from_str(text, fmt).is_ok() {
            return Some(fmt.to_string());
        }
    }
    None
}

/// Record of repairs applied while converting raw counts to probability
/// scale.
#[derive(Debug, Clone, Default, Serialize)]
pub struct CleaningReport {
    /// `(day_index, original_value)` for every negative count clamped to 0.
    pub clamped: Vec<(usize, f64)>,
}

impl CleaningReport {
    pub fn is_clean(&self) -> bool {
        self.clamped.is_empty()
    }
}

/// Result of [`to_probability`]: the paired cumulative and density series
/// plus the cleaning report.
#[derive(Debug, Clone)]
pub struct ProbabilitySeries {
    pub cumulative: TimeSeries,
    pub density: TimeSeries,
    pub cleaning: CleaningReport,
}

/// Convert a raw daily-cases series to probability scale.
///
/// Negative daily counts are clamped to 0 and recorded in the cleaning
/// report. Fails if the cumulative fraction would exceed 1 (counts exceed
/// the population).
pub fn to_probability(series: &TimeSeries) -> Result<ProbabilitySeries> {
    if series.kind() != SeriesKind::RawDailyCases {
        return Err(Error::InvalidParameter(format!(
            "to_probability expects raw daily cases, got {}",
            series.kind()
        )));
    }
    let pop = series.population() as f64;
    let mut cleaning = CleaningReport::default();
    let mut density = Vec::with_capacity(series.len());
    for (i, &v) in series.values().iter().enumerate() {
        let clean = if v < 0.0 {
            cleaning.clamped.push((i, v));
            0.0
        } else {
            v
        };
        density.push(clean / pop);
    }
    let mut cumulative = Vec::with_capacity(density.len());
    let mut sum = 0.0;
    for &d in &density {
        sum += d;
        cumulative.push(sum);
    }

    let density = TimeSeries::new(
        series.origin_date(),
        density,
        series.population(),
        SeriesKind::DailyProbabilityDensity,
    )?;
    let cumulative = TimeSeries::new(
        series.origin_date(),
        cumulative,
        series.population(),
        SeriesKind::CumulativeProbability,
    )?;
    Ok(ProbabilitySeries {
        cumulative,
        density,
        cleaning,
    })
}

/// Centred moving average with truncated windows at the edges.
///
/// `window` must be odd (so the window is symmetric) and no longer than
/// the series; a window of 1 returns the series unchanged.
pub fn smooth(series: &TimeSeries, window: usize) -> Result<TimeSeries> {
    let n = series.len();
    if window == 0 || window % 2 == 0 {
        return Err(Error::InvalidParameter(format!(
            "smoothing window must be odd and positive, got {window}"
        )));
    }
    if window > n {
        return Err(Error::InvalidParameter(format!(
            "smoothing window {window} exceeds series length {n}"
        )));
    }
    if window == 1 {
        return Ok(series.clone());
    }
    let out = moving_average(series.values(), window);
    TimeSeries::new(series.origin_date(), out, series.population(), series.kind())
}

/// Centred moving average over a plain slice; the window is truncated at
/// the edges. Callers validate that `window` is odd, positive and no
/// longer than the slice.
pub(crate) fn moving_average(values: &[f64], window: usize) -> Vec<f64> {
    let n = values.len();
    let half = window / 2;
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let lo = i.saturating_sub(half);
        let hi = (i + half).min(n - 1);
        let slice = &values[lo..=hi];
        out.push(slice.iter().sum::<f64>() / slice.len() as f64);
    }
    out
}

/// Write a series in the canonical TSV exchange format:
///
/// ```text
/// # kind: daily_probability_density
/// # origin_date: 2020-03-01
/// # population: 331002651
/// day_index	date	value
/// 0	2020-03-01	0.0015
/// ```
pub fn write_series(series: &TimeSeries, mut writer: impl std::io::Write) -> Result<()> {
    writeln!(writer, "# kind: {}", series.kind())?;
    writeln!(writer, "# origin_date: {}", series.origin_date())?;
    writeln!(writer, "# population: {}", series.population())?;
    writeln!(writer, "day_index\tdate\tvalue")?;
    for (i, v) in series.values().iter().enumerate() {
        writeln!(writer, "{}\t{}\t{}", i, series.date_at(i), v)?;
    }
    Ok(())
}

/// Write a series to a file, creating parent directories as needed.
pub fn write_series_file(series: &TimeSeries, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let mut buf = Vec::new();
    write_series(series, &mut buf)?;
    let mut f = fs::File::create(path)?;
    f.write_all(&buf)?;
    Ok(())
}

/// Read a series written by [`write_series`].
pub fn read_series(path: impl AsRef<Path>) -> Result<TimeSeries> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    let mut kind: Option<SeriesKind> = None;
    let mut origin: Option<NaiveDate> = None;
    let mut population: Option<u64> = None;
    let mut values: Vec<f64> = Vec::new();
    let mut saw_header = false;

    for (lineno, line) in text.lines().enumerate() {
        let line_1 = lineno + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(comment) = trimmed.strip_prefix('#') {
            let comment = comment.trim();
            if let Some(v) = comment.strip_prefix("kind:") {
                let slug = v.trim();
                kind = Some(SeriesKind::from_slug(slug).ok_or_else(|| Error::Row {
                    line: line_1,
                    message: format!("unknown series kind `{slug}`"),
                })?);
            } else if let Some(v) = comment.strip_prefix("origin_date:") {
                origin =
                    Some(NaiveDate::parse_from_str(v.trim(), "%Y-%m-%d").map_err(|_| {
                        Error::Row {
                            line: line_1,
                            message: format!("cannot parse origin date `{}`", v.trim()),
                        }
                    })?);
            } else if let Some(v) = comment.strip_prefix("population:") {
                population = Some(v.trim().parse().map_err(|_| Error::Row {
                    line: line_1,
                    message: format!("cannot parse population `{}`", v.trim()),
                })?);
            }
            continue;
        }
        if !saw_header {
            if trimmed != "day_index\tdate\tvalue" {
                return Err(Error::Row {
                    line: line_1,
                    message: "expected header `day_index\\tdate\\tvalue`".into(),
                });
            }
            saw_header = true;
            continue;
        }
        let mut parts = trimmed.split('\t');
        let idx: usize = parts
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Row {
                line: line_1,
                message: "missing or invalid day_index".into(),
            })?;
        if idx != values.len() {
            return Err(Error::Row {
                line: line_1,
                message: format!("day_index {idx} out of order (expected {})", values.len()),
            });
        }
        let _date = parts.next(); // informational; origin + index is authoritative
        let value: f64 = parts
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Row {
                line: line_1,
                message: "missing or invalid value".into(),
            })?;
        values.push(value);
    }

    let kind = kind.ok_or_else(|| {
        Error::InvalidInput(format!("{}: missing `# kind:` comment", path.display()))
    })?;
    let origin = origin.ok_or_else(|| {
        Error::InvalidInput(format!(
            "{}: missing `# origin_date:` comment",
            path.display()
        ))
    })?;
    let population = population.ok_or_else(|| {
        Error::InvalidInput(format!(
            "{}: missing `# population:` comment",
            path.display()
        ))
    })?;
    if values.is_empty() {
        return Err(Error::EmptyInput(format!(
            "{} holds no data rows",
            path.display()
        )));
    }
    TimeSeries::new(origin, values, population, kind)
}
