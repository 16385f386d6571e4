//! Command-line surface.
//!
//! Every value flag is optional at the parser level: a value given on the
//! command line wins, otherwise the `--config` file is consulted, otherwise
//! a documented default applies. Resolution happens in the command modules.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "helix-waves",
    version,
    about = "Soliton trains, probability oscillators, and epidemic wave decomposition",
    propagate_version = true
)]
pub struct Cli {
    /// JSON file of default flag values; explicit flags win.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Directory receiving artifacts whose --out is not given [default: .]
    #[arg(long, global = true, value_name = "DIR")]
    pub output_dir: Option<PathBuf>,

    /// Echo the primary artifact of the given format to stdout.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Tsv,
    Markdown,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Load a delimited daily-cases file into the canonical series format.
    Ingest(IngestArgs),
    /// Decompose cumulative series into sums of logistic waves.
    Fit(FitArgs),
    /// Peak-time and peak-height ratios across fitted waves, with their
    /// correlation.
    Ratios(RatiosArgs),
    /// Nonlinear wave evolution: simulate fields, resolve soliton trains,
    /// export analytic profiles.
    Kdv(KdvArgs),
    /// Cyclic two-probability dynamics with conserved divergence measures.
    Oscillator(OscillatorArgs),
    /// Three-way mutual redundancy of a categorical contingency cube.
    Redundancy(RedundancyArgs),
    /// Susceptible-infected-removed outbreak simulation.
    Sir(SirArgs),
    /// Consolidated markdown report plus gnuplot-ready plot data.
    Report(ReportArgs),
    /// Regenerate the bundled multi-country reference series.
    Generate(GenerateArgs),
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    /// Delimited input file with a header row.
    #[arg(long, value_name = "FILE")]
    pub input: Option<PathBuf>,

    /// Name of the date column [default: date]
    #[arg(long)]
    pub date_column: Option<String>,

    /// Name of the daily-cases column [default: new_cases]
    #[arg(long)]
    pub cases_column: Option<String>,

    /// Name of a per-row population column.
    #[arg(long, conflicts_with = "population")]
    pub population_column: Option<String>,

    /// Fixed population when the file has no population column.
    #[arg(long)]
    pub population: Option<u64>,

    /// Field delimiter; auto-detected among comma, semicolon, tab.
    #[arg(long)]
    pub delimiter: Option<char>,

    /// chrono date format; auto-detected between %Y-%m-%d and %d/%m/%Y.
    #[arg(long)]
    pub date_format: Option<String>,

    /// Series written out: raw counts, daily probability density, or
    /// cumulative probability [default: cumulative]
    #[arg(long, value_enum)]
    pub kind: Option<KindArg>,

    /// Output series file [default: <output-dir>/<input stem>.tsv]
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Raw,
    Density,
    Cumulative,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// Canonical series file(s); repeat the flag to fit several in parallel.
    #[arg(long, value_name = "FILE")]
    pub input: Vec<PathBuf>,

    /// Output file (single input) or directory (several inputs)
    /// [default: <output-dir>/<input stem>.json]
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,

    /// Valley depth (relative to the smaller adjacent peak) below which two
    /// humps count as separate waves [default: 0.95]
    #[arg(long)]
    pub valley_ratio: Option<f64>,

    /// Shortest wave segment kept, in days [default: 21]
    #[arg(long)]
    pub min_segment_len: Option<usize>,

    /// Moving-average window used before valley detection [default: 7]
    #[arg(long)]
    pub smoothing_window: Option<usize>,

    /// Iteration budget per least-squares solve [default: 200]
    #[arg(long)]
    pub max_iterations: Option<usize>,

    /// Convergence threshold on the relative parameter step [default: 1e-8]
    #[arg(long)]
    pub tolerance: Option<f64>,

    /// Force exactly this many waves by tuning the valley ratio.
    #[arg(long)]
    pub segments: Option<usize>,

    /// Skip the joint refinement pass over all wave parameters.
    #[arg(long)]
    pub no_joint_refinement: bool,
}

#[derive(Debug, Args)]
pub struct RatiosArgs {
    /// Directory of fit artifacts (*.json).
    #[arg(long, value_name = "DIR")]
    pub fits: Option<PathBuf>,

    /// Output table file [default: <output-dir>/table2.json]
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,

    /// Also write a human-readable markdown table next to the JSON.
    #[arg(long)]
    pub markdown: bool,

    /// Relative time/amplitude deviation above which a row is flagged
    /// [default: 0.5]
    #[arg(long)]
    pub threshold: Option<f64>,
}

#[derive(Debug, Args)]
pub struct KdvArgs {
    #[command(subcommand)]
    pub command: KdvCommand,
}

#[derive(Debug, Subcommand)]
pub enum KdvCommand {
    /// Evolve an initial profile and write field snapshots.
    Simulate(KdvSimulateArgs),
    /// Evolve an order-n impulse and report the solitons it splits into.
    Train(KdvTrainArgs),
    /// Sample the analytic sinking-soliton profile; with a sink, also
    /// report the crest's return time.
    Profile(KdvProfileArgs),
}

#[derive(Debug, Args)]
pub struct KdvSimulateArgs {
    /// Width parameter of the seeded profile [default: 1]
    #[arg(long)]
    pub kappa: Option<f64>,

    /// Order of the seeded impulse (1 = single soliton) [default: 1]
    #[arg(long)]
    pub n: Option<usize>,

    /// Initial crest position [default: length/4]
    #[arg(long)]
    pub x0: Option<f64>,

    /// Uniform sink strength [default: 0]
    #[arg(long)]
    pub c1: Option<f64>,

    /// Dispersion coefficient [default: 1]
    #[arg(long)]
    pub delta: Option<f64>,

    /// Grid points (even) [default: 1024]
    #[arg(long)]
    pub grid: Option<usize>,

    /// Periodic domain length [default: 32·n/kappa]
    #[arg(long)]
    pub length: Option<f64>,

    /// Simulated time span [default: 2/kappa³]
    #[arg(long)]
    pub t_end: Option<f64>,

    /// Number of snapshots after the initial state [default: 8]
    #[arg(long)]
    pub snapshots: Option<usize>,

    /// Time-step safety factor in (0, 0.3] [default: 0.2]
    #[arg(long)]
    pub alpha: Option<f64>,

    /// Output TSV of snapshot blocks [default: <output-dir>/kdv.tsv]
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct KdvTrainArgs {
    /// Impulse order: the number of solitons expected [default: 2]
    #[arg(long)]
    pub n: Option<usize>,

    /// Width parameter [default: 1]
    #[arg(long)]
    pub kappa: Option<f64>,

    /// Initial crest position [default: length/4]
    #[arg(long)]
    pub x0: Option<f64>,

    /// Uniform sink strength [default: 0]
    #[arg(long)]
    pub c1: Option<f64>,

    /// Dispersion coefficient [default: 1]
    #[arg(long)]
    pub delta: Option<f64>,

    /// Grid points (even) [default: 1024]
    #[arg(long)]
    pub grid: Option<usize>,

    /// Periodic domain length [default: 32·n/kappa]
    #[arg(long)]
    pub length: Option<f64>,

    /// Evolution time before the crests are measured
    /// [default: (0.5 + n/2)/kappa³]
    #[arg(long)]
    pub t_end: Option<f64>,

    /// Time-step safety factor in (0, 0.3] [default: 0.2]
    #[arg(long)]
    pub alpha: Option<f64>,

    /// Output JSON report [default: <output-dir>/train.json]
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct KdvProfileArgs {
    /// Width parameter [default: 1]
    #[arg(long)]
    pub kappa: Option<f64>,

    /// Profile order [default: 1]
    #[arg(long)]
    pub n: Option<usize>,

    /// Uniform sink strength [default: 0]
    #[arg(long)]
    pub c1: Option<f64>,

    /// Sample count per snapshot [default: 1024]
    #[arg(long)]
    pub grid: Option<usize>,

    /// Sampled x range start [default: -16/kappa]
    #[arg(long)]
    pub x_min: Option<f64>,

    /// Sampled x range end [default: crest apex + 16/kappa with a sink,
    /// else 16/kappa]
    #[arg(long)]
    pub x_max: Option<f64>,

    /// Time span covered by the snapshots [default: the crest return time
    /// with a sink, else 2/kappa³]
    #[arg(long)]
    pub t_end: Option<f64>,

    /// Number of snapshots after the initial one [default: 8]
    #[arg(long)]
    pub snapshots: Option<usize>,

    /// Output TSV of snapshot blocks [default: <output-dir>/profile.tsv];
    /// with a sink, a .json return-time report is written next to it.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct OscillatorArgs {
    #[command(subcommand)]
    pub command: OscillatorCommand,
}

#[derive(Debug, Subcommand)]
pub enum OscillatorCommand {
    /// Integrate the coupled (or scalar) probability dynamics.
    Simulate(OscillatorSimulateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OscillatorMode {
    /// Linear cross-coupled pair; conserves the quadratic divergence.
    Harmonic,
    /// Quadratically corrected pair; conserves the cubic-corrected
    /// divergence.
    Coupled,
    /// Second-order scalar form with escape detection; conserves energy.
    Scalar,
}

#[derive(Debug, Args)]
pub struct OscillatorSimulateArgs {
    /// Coupling rate [default: 0.1]
    #[arg(long)]
    pub gamma: Option<f64>,

    /// Reference value of the first probability [default: 0.5]
    #[arg(long)]
    pub p10: Option<f64>,

    /// Reference value of the second probability [default: 0.5]
    #[arg(long)]
    pub p20: Option<f64>,

    /// Quadratic correction strength [default: 0]
    #[arg(long)]
    pub alpha: Option<f64>,

    /// Constant displacement term (scalar mode) [default: 0]
    #[arg(long)]
    pub c: Option<f64>,

    /// Dynamics variant [default: harmonic]
    #[arg(long, value_enum)]
    pub mode: Option<OscillatorMode>,

    /// Initial first probability [default: p10]
    #[arg(long)]
    pub p1: Option<f64>,

    /// Initial second probability [default: p20 + 0.02, so the default run
    /// oscillates]
    #[arg(long)]
    pub p2: Option<f64>,

    /// Initial probability, scalar mode [default: p20 + 0.02]
    #[arg(long)]
    pub p: Option<f64>,

    /// Initial rate of change, scalar mode [default: 0]
    #[arg(long)]
    pub v: Option<f64>,

    /// Simulated time span [default: two reference periods]
    #[arg(long)]
    pub t_end: Option<f64>,

    /// Integration step [default: 1e-3]
    #[arg(long)]
    pub dt: Option<f64>,

    /// Keep every k-th sample in the output [default: fits ~5000 rows]
    #[arg(long)]
    pub stride: Option<usize>,

    /// Output TSV trajectory [default: <output-dir>/oscillator.tsv]
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RedundancyArgs {
    /// Long-format CSV: three category columns then a count column.
    #[arg(long, value_name = "FILE")]
    pub input: Option<PathBuf>,

    /// Output JSON report [default: <output-dir>/redundancy.json]
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SirArgs {
    #[command(subcommand)]
    pub command: SirCommand,
}

#[derive(Debug, Subcommand)]
pub enum SirCommand {
    /// Integrate an outbreak and check its single-wave reduction.
    Simulate(SirSimulateArgs),
}

#[derive(Debug, Args)]
pub struct SirSimulateArgs {
    /// Transmission rate [default: 0.15]
    #[arg(long)]
    pub beta: Option<f64>,

    /// Recovery rate [default: 0.1]
    #[arg(long)]
    pub gamma: Option<f64>,

    /// Population size [default: 1e6]
    #[arg(long)]
    pub n: Option<f64>,

    /// Initially infected persons [default: 10]
    #[arg(long)]
    pub i0: Option<f64>,

    /// Initially removed persons [default: 0]
    #[arg(long)]
    pub r0: Option<f64>,

    /// Simulated days [default: 500]
    #[arg(long)]
    pub t_end: Option<f64>,

    /// Integration step in days [default: 0.05]
    #[arg(long)]
    pub dt: Option<f64>,

    /// Keep every k-th sample in the output [default: fits ~5000 rows]
    #[arg(long)]
    pub stride: Option<usize>,

    /// Output TSV trajectory [default: <output-dir>/sir.tsv]; the
    /// reduction report goes to the matching .json file.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Directory of canonical series files (*.tsv).
    #[arg(long, value_name = "DIR")]
    pub series: Option<PathBuf>,

    /// Directory of fit artifacts (*.json).
    #[arg(long, value_name = "DIR")]
    pub fits: Option<PathBuf>,

    /// Ratio table to render; recomputed from the fits when absent.
    #[arg(long, value_name = "FILE")]
    pub ratios: Option<PathBuf>,

    /// Soliton-train report to include.
    #[arg(long, value_name = "FILE")]
    pub kdv: Option<PathBuf>,

    /// Output directory [default: <output-dir>/report]
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,

    /// Relative time/amplitude deviation above which a ratio row is
    /// flagged [default: 0.5]
    #[arg(long)]
    pub threshold: Option<f64>,

    /// Fail (exit 1) when any series or fit is missing its counterpart.
    #[arg(long)]
    pub strict: bool,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// Output directory for the series files [default: <output-dir>]
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,

    /// Multiplicative noise level (0 = exact curves) [default: 0]
    #[arg(long)]
    pub sigma: Option<f64>,

    /// Noise seed; recorded in the artifacts [default: 0]
    #[arg(long)]
    pub seed: Option<u64>,

    /// Restrict to the named countries (repeatable, case-insensitive).
    #[arg(long)]
    pub country: Vec<String>,
}
