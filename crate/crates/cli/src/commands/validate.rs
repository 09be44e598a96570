use std::path::Path;

use rigsim::model::{Diagnostic, Severity};

use crate::config;
use crate::error::CliError;

pub fn severity_line(d: &Diagnostic) -> String {
    let tag = match d.severity {
        Severity::Error => "error",
        Severity::Warning => "warning",
    };
    format!("{tag}[{}]: {}", d.element, d.message)
}

/// Load and validate a configuration, listing diagnostics on standard
/// output. Clean (warnings allowed) exits zero.
pub fn run(config_path: &Path) -> Result<(), CliError> {
    match config::load_config(config_path) {
        Ok(case) => {
            for d in &case.warnings {
                println!("{}", severity_line(d));
            }
            println!(
                "ok: {} nodes, {} edges, {} devices, {} profiles, {} steps",
                case.model.nodes.len(),
                case.model.edges.len(),
                case.model.devices.len(),
                case.profiles.len(),
                case.config.duration_steps
            );
            Ok(())
        }
        Err(CliError::Validation(diags)) => {
            for d in &diags {
                println!("{}", severity_line(d));
            }
            Err(CliError::Validation(diags))
        }
        Err(e) => Err(e),
    }
}
