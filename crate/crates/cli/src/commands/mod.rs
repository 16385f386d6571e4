//! One module per subcommand; `run` resolves the global context and
//! dispatches.

mod fit;
mod generate;
mod ingest;
mod kdv;
mod oscillator;
mod ratios;
mod redundancy;
mod report;
mod sir;

use helix_waves_core::Result;

use crate::args::{Cli, Command};
use crate::context::Ctx;

pub fn run(cli: Cli) -> Result<()> {
    let ctx = Ctx::new(&cli)?;
    match cli.command {
        Command::Ingest(args) => ingest::run(&ctx, args),
        Command::Fit(args) => fit::run(&ctx, args),
        Command::Ratios(args) => ratios::run(&ctx, args),
        Command::Kdv(args) => kdv::run(&ctx, args),
        Command::Oscillator(args) => oscillator::run(&ctx, args),
        Command::Redundancy(args) => redundancy::run(&ctx, args),
        Command::Sir(args) => sir::run(&ctx, args),
        Command::Report(args) => report::run(&ctx, args),
        Command::Generate(args) => generate::run(&ctx, args),
    }
}

/// `path` without directory and extension, for labelling artifacts.
pub(crate) fn stem(path: &std::path::Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.to_string_lossy().into_owned())
}
