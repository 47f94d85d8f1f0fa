use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use quadquartic::config::RunConfig;
use quadquartic::runner::{self, OutputFormat, OutputOptions};

/// Numerical laboratory for a mixed quadratic-quartic functional equation:
/// residual checks, part decompositions, dyadic approximation runs, and
/// certified stability bounds on p-normed spaces.
#[derive(Parser)]
#[command(name = "quadquartic", version)]
struct Cli {
    /// JSON configuration file; omitted means built-in defaults.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Directory for report.json and CSV tables.
    #[arg(long, global = true, value_name = "DIR", default_value = ".")]
    out: PathBuf,

    /// What to print on stdout: the JSON report or the CSV tables.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Print nothing on stdout.
    #[arg(long, global = true)]
    quiet: bool,

    #[command(subcommand)]
    command: Cmd,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Cmd {
    /// Check that the configured function solves the equation on the grid.
    CheckSolution,
    /// Split the function into its quadratic and quartic parts.
    Decompose,
    /// Run the dyadic approximation scheme and record iteration traces.
    Hyers,
    /// Certify the stability bound end to end on the grid.
    Certify,
    /// Check the six derived identities on the grid.
    Identities,
    /// Evaluate the theorem bound and the closed-form constants.
    Bounds,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: &Cli) -> quadquartic::Result<bool> {
    let cfg = match &cli.config {
        Some(path) => RunConfig::from_path(path)?,
        None => RunConfig::default(),
    };
    let outcome = match cli.command {
        Cmd::CheckSolution => runner::check_solution(&cfg)?,
        Cmd::Decompose => runner::decompose(&cfg)?,
        Cmd::Hyers => runner::hyers(&cfg)?,
        Cmd::Certify => runner::certify_cmd(&cfg)?,
        Cmd::Identities => runner::identities(&cfg)?,
        Cmd::Bounds => runner::bounds_cmd(&cfg)?,
    };
    let opts = OutputOptions {
        out_dir: cli.out.clone(),
        format: match cli.format {
            Format::Json => OutputFormat::Json,
            Format::Csv => OutputFormat::Csv,
        },
        quiet: cli.quiet,
    };
    runner::write_outputs(&outcome, &opts)?;
    Ok(outcome.ok)
}
