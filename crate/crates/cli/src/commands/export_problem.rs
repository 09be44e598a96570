use std::path::Path;

use rigsim::lp::{write_lp, write_mps};
use rigsim::solver::HighsBackend;

use crate::commands::simulate::sim_error;
use crate::config;
use crate::error::{io_at, CliError};

#[derive(Debug, Clone, Copy, PartialEq, clap::ValueEnum)]
pub enum Format {
    Lp,
    Mps,
}

/// Export the planning problem of the window that commits step `at`. The
/// windows before it are solved and rolled so the exported problem carries
/// the true boundary state.
pub fn run(config_path: &Path, at: usize, format: Format, out: &Path) -> Result<(), CliError> {
    let case = config::load_config(config_path)?;
    if at >= case.config.duration_steps {
        return Err(CliError::User(format!(
            "step {at} is outside the simulation (duration {} steps)",
            case.config.duration_steps
        )));
    }
    let backend = HighsBackend::default();
    let problem =
        rigsim::sim::window_problem(&case.model, &case.config, &case.profiles, &backend, at)
            .map_err(sim_error)?;
    let text = match format {
        Format::Lp => write_lp(&problem),
        Format::Mps => write_mps(&problem),
    };
    std::fs::write(out, &text).map_err(|e| io_at(out, e))?;
    println!(
        "wrote {}: window starting at step {}, {} variables, {} constraints",
        out.display(),
        problem.window_start,
        problem.vars.len(),
        problem.constraints.len()
    );
    Ok(())
}
