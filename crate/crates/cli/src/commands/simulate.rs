use std::path::Path;

use rigsim::sim::SimError;
use rigsim::solver::HighsBackend;

use crate::bundle::{self, Metadata};
use crate::commands::validate::severity_line;
use crate::config;
use crate::error::CliError;

pub fn sim_error(e: SimError) -> CliError {
    match e {
        SimError::Profile(p) => CliError::User(p.to_string()),
        SimError::Window { .. } => CliError::Solver(e.to_string()),
    }
}

/// Run the rolling-horizon simulation and persist a result bundle.
pub fn run(config_path: &Path, out: &Path, force: bool) -> Result<(), CliError> {
    let case = config::load_config(config_path)?;
    for d in &case.warnings {
        println!("{}", severity_line(d));
    }
    let backend = HighsBackend::default();
    let result = rigsim::sim::simulate(&case.model, &case.config, &case.profiles, &backend)
        .map_err(sim_error)?;
    let kpi = rigsim::kpi::report(&case.model, &case.config, &result);
    let metadata = Metadata {
        config_hash: case.config_hash.clone(),
        seed: case.config.seed,
        timestep_minutes: case.config.timestep_minutes,
        tool: format!("rigsim {}", env!("CARGO_PKG_VERSION")),
        solver: "highs".to_string(),
    };
    bundle::write_bundle(out, force, &case.model, &case.config, &result, &kpi, &metadata)?;
    println!(
        "wrote {}: {} committed steps over {} windows, co2 {:.1} kg",
        out.display(),
        result.steps.len(),
        result.windows.len(),
        kpi.co2_total_kg
    );
    Ok(())
}
