//! Command-line front end: config parsing, experiment orchestration and
//! result files.

pub mod args;
pub mod commands;
pub mod error;
pub mod output;
pub mod spec;

use std::ffi::OsString;

use clap::Parser;

pub use args::{Cli, Command};
pub use error::CliError;
use spec::{Defaults, ExperimentSpec, Resolved};

pub fn run(cli: &Cli) -> Result<(), CliError> {
    let spec = ExperimentSpec::from_args(cli.command.common())?;
    let resolved = Resolved::new(spec, Defaults::for_command(cli.command.name()))?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(resolved.workers.unwrap_or(0))
        .build()
        .map_err(|e| error::invalid("workers", e.to_string()))?;
    pool.install(|| match &cli.command {
        Command::Simulate(_) => commands::simulate(&resolved),
        Command::Percolate(_) => commands::percolate(&resolved),
        Command::Verify(v) => commands::verify(&resolved, v.debug_invert_acceptance),
        Command::Scan(_) => commands::scan(&resolved),
    })
}

/// Parses `args` and runs the command, returning the process exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("gossipfpp {}: {e}", cli.command.name());
            e.exit_code()
        }
    }
}
