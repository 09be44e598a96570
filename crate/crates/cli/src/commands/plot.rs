use std::path::Path;

use crate::bundle;
use crate::error::{io_at, CliError};
use crate::plot::Chart;

/// Render the standard charts of a bundle as static SVG files.
pub fn run(bundle_dir: &Path, out: Option<&Path>) -> Result<(), CliError> {
    let b = bundle::read_bundle(bundle_dir)?;
    let default_out = bundle_dir.join("plots");
    let out = out.unwrap_or(&default_out);
    std::fs::create_dir_all(out).map_err(|e| io_at(out, e))?;

    let mut written = 0;

    let mut chart = Chart::new("Emission rate", "step", "kg/s").series("co2", &b.kpi.co2_rate_kg_per_s);
    if let Some(cap) = b.config.emission_cap {
        chart = chart.series("cap", &vec![cap; b.kpi.co2_rate_kg_per_s.len()]);
    }
    write(&out.join("emissions.svg"), &chart.svg())?;
    written += 1;

    let on_count: Vec<f64> = b
        .steps
        .iter()
        .map(|s| s.devices.iter().filter(|d| d.on == Some(true)).count() as f64)
        .collect();
    let prep_count: Vec<f64> = b
        .steps
        .iter()
        .map(|s| s.devices.iter().filter(|d| d.prep == Some(true)).count() as f64)
        .collect();
    let chart = Chart::new("Committed devices", "step", "count")
        .series("on", &on_count)
        .series("prep", &prep_count);
    write(&out.join("commitment.svg"), &chart.svg())?;
    written += 1;

    let n = b.kpi.reserve.len();
    let chart = Chart::new("Reserve decomposition", "step", "MW")
        .series("headroom", &b.kpi.reserve.iter().map(|s| s.committed_headroom).collect::<Vec<_>>())
        .series("battery", &b.kpi.reserve.iter().map(|s| s.battery_power).collect::<Vec<_>>())
        .series("sheddable", &b.kpi.reserve.iter().map(|s| s.sheddable_load).collect::<Vec<_>>())
        .series("slack", &b.kpi.reserve.iter().map(|s| s.slack).collect::<Vec<_>>())
        .series("required", &vec![b.config.reserve_min; n]);
    write(&out.join("reserve.svg"), &chart.svg())?;
    written += 1;

    if !b.kpi.storages.is_empty() {
        let mut chart = Chart::new("Storage levels", "step", "MWh or Sm3");
        for s in &b.kpi.storages {
            chart = chart.series(&s.id, &s.level);
        }
        write(&out.join("storage.svg"), &chart.svg())?;
        written += 1;
    }

    println!("wrote {written} charts to {}", out.display());
    Ok(())
}

fn write(path: &Path, content: &str) -> Result<(), CliError> {
    std::fs::write(path, content).map_err(|e| io_at(path, e))
}
