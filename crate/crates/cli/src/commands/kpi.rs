use std::path::Path;

use rigsim::kpi::KpiReport;

use crate::bundle::{self, Bundle};
use crate::error::CliError;

/// Print the KPI table of a bundle. With `recompute`, the report is rebuilt
/// from the stored series instead of read from the KPI file; the two agree
/// exactly for an intact bundle.
pub fn run(bundle_dir: &Path, recompute: bool) -> Result<(), CliError> {
    let b = bundle::read_bundle(bundle_dir)?;
    let report = if recompute {
        rigsim::kpi::report(&b.model, &b.config, &b.result())
    } else {
        b.kpi.clone()
    };
    print_report(&b, &report);
    Ok(())
}

fn print_report(b: &Bundle, r: &KpiReport) {
    println!("config hash: {}", b.metadata.config_hash);
    println!("seed: {}  timestep: {} min  steps: {}", b.metadata.seed, b.metadata.timestep_minutes, b.steps.len());
    println!();
    println!("co2 total:            {:>14.3} kg", r.co2_total_kg);
    println!("oil export:           {:>14.3} Sm3", r.oil_export_sm3);
    println!("gas export:           {:>14.3} Sm3", r.gas_export_sm3);
    match r.co2_per_oil_kg_per_sm3 {
        Some(v) => println!("co2 per oil:          {:>14.3} kg/Sm3", v),
        None => println!("co2 per oil:          {:>14}", "n/a"),
    }
    println!("supply slack:         {:>14.6} MWh", r.slack_supply_mwh);
    println!("absorb slack:         {:>14.6} MWh", r.slack_absorb_mwh);
    println!("reserve slack:        {:>14.6} MWh", r.reserve_slack_mwh);
    println!();
    println!(
        "{:<14}{:>9}{:>9}{:>8}{:>8}{:>13}{:>13}{:>11}{:>11}{:>11}",
        "device", "on_h", "prep_h", "starts", "stops", "fuel_Sm3", "co2_kg", "el_out", "el_in", "curtailed"
    );
    for d in &r.devices {
        println!(
            "{:<14}{:>9.2}{:>9.2}{:>8}{:>8}{:>13.1}{:>13.1}{:>11.2}{:>11.2}{:>11.2}",
            d.id,
            d.on_hours,
            d.prep_hours,
            d.starts,
            d.stops,
            d.fuel_gas_sm3,
            d.co2_kg,
            d.el_out_mwh,
            d.el_in_mwh,
            d.el_curtailed_mwh
        );
    }
    if !r.storages.is_empty() {
        println!();
        println!(
            "{:<14}{:>12}{:>12}{:>12}{:>12}",
            "storage", "charged", "discharged", "min_level", "end_level"
        );
        for s in &r.storages {
            let min = s.level.iter().copied().fold(f64::INFINITY, f64::min);
            let end = s.level.last().copied().unwrap_or(0.0);
            println!(
                "{:<14}{:>12.3}{:>12.3}{:>12.3}{:>12.3}",
                s.id, s.charged, s.discharged, min, end
            );
        }
    }
}
