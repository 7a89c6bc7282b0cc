//! The `topicscope` command line: one subcommand per workflow stage.

use std::ffi::OsString;
use std::io::Write;

use clap::Parser;

pub mod args;
pub mod commands;
pub mod config;
pub mod error;

use args::{Cli, Command};
use config::FileConfig;
use error::CliError;

pub const EXIT_OK: i32 = 0;
pub const EXIT_DOMAIN: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

fn dispatch(cli: &Cli) -> Result<commands::Report, CliError> {
    let cfg = FileConfig::load(cli.config.as_deref())?;
    match &cli.command {
        Command::Preprocess(a) => commands::preprocess(a, &cfg),
        Command::Validate(a) => commands::validate(a),
        Command::Evaluate(a) => commands::evaluate(a, &cfg),
        Command::Salient(a) => commands::salient(a, &cfg),
        Command::Label(a) => commands::label(a, &cfg),
        Command::Retrieve(a) => commands::retrieve(a, &cfg),
        Command::Serve(a) => commands::serve(a, &cfg, cli.quiet),
        Command::StubLlm(a) => commands::stub_llm(a, cli.quiet),
    }
}

/// Parses `argv`, runs the subcommand and returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    if matches!(cli.command, Command::Serve(_)) && !cli.quiet {
        let _ = tracing_subscriber::fmt().with_writer(std::io::stderr).try_init();
    }
    let mut stdout = std::io::stdout().lock();
    match dispatch(&cli) {
        Ok(report) => {
            if cli.json {
                let _ = writeln!(stdout, "{}", report.json);
            } else if !cli.quiet && !report.text.is_empty() {
                let _ = writeln!(stdout, "{}", report.text);
            }
            EXIT_OK
        }
        Err(e) => {
            if cli.json {
                let _ = writeln!(stdout, "{}", e.to_json());
            }
            eprintln!("error: {e}");
            EXIT_DOMAIN
        }
    }
}
