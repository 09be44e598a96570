use std::path::PathBuf;

use clap::{Parser, Subcommand};

use rigsim_cli::commands;
use rigsim_cli::commands::export_problem::Format;
use rigsim_cli::error::CliError;

/// Operational planning of offshore multi-carrier energy systems by rolling
/// MILP optimization.
#[derive(Parser)]
#[command(name = "rigsim", version, disable_colored_help = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a configuration and list diagnostics
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run the rolling-horizon simulation and write a result bundle
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// bundle output directory
        #[arg(long)]
        out: PathBuf,
        /// overwrite a non-empty output directory
        #[arg(long)]
        force: bool,
    },
    /// Print the KPI table of a bundle
    Kpi {
        bundle: PathBuf,
        /// rebuild the report from the stored series instead of kpi.toml
        #[arg(long)]
        recompute: bool,
    },
    /// Tabulate bundles against the first one
    Compare {
        #[arg(num_args = 2.., required = true)]
        bundles: Vec<PathBuf>,
    },
    /// Write the planning problem of one window as an LP or MPS file
    ExportProblem {
        #[arg(long)]
        config: PathBuf,
        /// absolute step whose committing window is exported
        #[arg(long)]
        at: usize,
        #[arg(long, value_enum, default_value = "lp")]
        format: Format,
        #[arg(long)]
        out: PathBuf,
    },
    /// Render the standard charts of a bundle as SVG files
    Plot {
        bundle: PathBuf,
        /// chart directory, default <bundle>/plots
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Validate { config } => commands::validate::run(&config),
        Command::Simulate { config, out, force } => commands::simulate::run(&config, &out, force),
        Command::Kpi { bundle, recompute } => commands::kpi::run(&bundle, recompute),
        Command::Compare { bundles } => commands::compare::run(&bundles),
        Command::ExportProblem {
            config,
            at,
            format,
            out,
        } => commands::export_problem::run(&config, at, format, &out),
        Command::Plot { bundle, out } => commands::plot::run(&bundle, out.as_deref()),
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                std::process::exit(0);
            }
            let err = CliError::User(e.to_string());
            eprintln!("{}", err.record());
            std::process::exit(err.exit_code());
        }
    };
    if let Err(e) = run(cli) {
        eprintln!("{}", e.record());
        std::process::exit(e.exit_code());
    }
}
