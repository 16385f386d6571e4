//! Command-line front end for the `helix-waves` toolkit.
//!
//! Every subcommand reads plain files, writes its artifacts atomically, and
//! embeds a provenance block (tool version, configuration hash, seed) so a
//! run can be reproduced byte for byte from its inputs alone.
//!
//! Exit codes: 0 success, 1 input problem, 2 numerical failure, 64 usage.

mod args;
mod artifacts;
mod commands;
mod context;

use clap::Parser;

fn main() {
    env_logger::Builder::from_env(
        env_logger::Env::new().filter_or("HELIXWAVES_LOG", "warn"),
    )
    .target(env_logger::Target::Stderr)
    .init();

    let cli = match args::Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{e}");
                    std::process::exit(0);
                }
                _ => {
                    eprint!("{e}");
                    std::process::exit(64);
                }
            }
        }
    };

    match commands::run(cli) {
        Ok(()) => {}
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(if e.is_input_error() { 1 } else { 2 });
        }
    }
}
