use std::path::PathBuf;

use rigsim::kpi::compare_cases;

use crate::bundle;
use crate::error::CliError;

/// Tabulate several bundles against the first one.
pub fn run(dirs: &[PathBuf]) -> Result<(), CliError> {
    if dirs.len() < 2 {
        return Err(CliError::User(
            "compare needs at least two bundle directories".to_string(),
        ));
    }
    let bundles: Vec<_> = dirs
        .iter()
        .map(|d| bundle::read_bundle(d).map(|b| (d.clone(), b)))
        .collect::<Result<_, _>>()?;

    let base = &bundles[0].1;
    println!(
        "{:<20}{:>15}{:>10}{:>8}{:>14}{:>12}",
        "case", "co2_kg", "delta_pct", "starts", "oil_Sm3", "slack_MWh"
    );
    for (dir, b) in &bundles {
        let name = dir
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_else(|| dir.display().to_string());
        let cmp = compare_cases(&base.kpi, &b.kpi);
        let delta = match cmp.co2_delta_rel {
            Some(rel) => format!("{:+.2}", 100.0 * rel),
            None => "n/a".to_string(),
        };
        println!(
            "{:<20}{:>15.1}{:>10}{:>8}{:>14.1}{:>12.4}",
            name, cmp.co2_total_kg.1, delta, cmp.starts.1, cmp.oil_export_sm3.1, cmp.slack_supply_mwh.1
        );
    }
    Ok(())
}
