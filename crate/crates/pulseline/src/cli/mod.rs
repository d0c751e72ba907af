//! Command-line front end wiring the pipeline stages into reproducible
//! batch runs with file-based handoff between stages.

mod args;
mod stages;

pub use args::Cli;

use crate::error::Result;
use clap::error::ErrorKind;
use clap::Parser;

/// Exit code for usage errors (unknown flags, bad values).
pub const EXIT_USAGE: i32 = 2;

/// Parse `argv` and execute one subcommand.
///
/// Returns the process exit code: 0 on success, 2 on usage errors; pipeline
/// failures surface as `Err` (the binary maps them to exit code 1). Each
/// subcommand prints a single-line JSON summary on standard output.
pub fn run<I, T>(argv: I) -> Result<i32>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return Ok(0);
        }
        Err(e) => {
            eprint!("{e}");
            return Ok(EXIT_USAGE);
        }
    };

    let summary = match cli.command {
        args::Command::Synth(a) => stages::run_synth(&a)?,
        args::Command::Roi(a) => stages::run_roi(&a)?,
        args::Command::Extract(a) => stages::run_extract(&a)?,
        args::Command::Estimate(a) => stages::run_estimate(&a)?,
        args::Command::Calibrate(a) => stages::run_calibrate(&a)?,
        args::Command::Evaluate(a) => stages::run_evaluate(&a)?,
        args::Command::Stats(a) => stages::run_stats(&a)?,
        args::Command::Magnify(a) => stages::run_magnify(&a)?,
        args::Command::Pipeline(a) => stages::run_pipeline(&a)?,
    };
    println!("{summary}");
    Ok(0)
}
