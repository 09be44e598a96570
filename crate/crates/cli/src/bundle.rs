//! Result bundles: a directory holding the normalized configuration, run
//! metadata, the committed per-step series, per-window solver summaries and
//! the KPI report. Bundles are fully deterministic; rerunning the same
//! configuration reproduces them byte for byte.

use std::path::Path;

use serde::{Deserialize, Serialize};

use rigsim::kpi::{DeviceUsage, KpiReport, ReserveStep, StorageSeries};
use rigsim::model::{CarrierKind, EnergySystemModel, FlowDir, SimulationConfig, Terminal};
use rigsim::sim::{DeviceRecord, EdgeRecord, SimulationResult, StepRecord, WindowSummary};

use crate::config::{self, ConfigDoc, ProfilesDoc};
use crate::error::{io_at, CliError};

pub const CONFIG_FILE: &str = "config.toml";
pub const METADATA_FILE: &str = "metadata.toml";
pub const SERIES_FILE: &str = "series.csv";
pub const WINDOWS_FILE: &str = "windows.csv";
pub const KPI_FILE: &str = "kpi.toml";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Metadata {
    pub config_hash: String,
    pub seed: u64,
    pub timestep_minutes: f64,
    pub tool: String,
    pub solver: String,
}

/// Serializable mirror of the KPI report. Kept separate so the library
/// stays serialization-free; scalar and array fields precede the tables
/// because of the output format's ordering rules.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KpiDoc {
    pub dt_hours: f64,
    pub co2_total_kg: f64,
    pub oil_export_sm3: f64,
    pub gas_export_sm3: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub co2_per_oil_kg_per_sm3: Option<f64>,
    pub slack_supply_mwh: f64,
    pub slack_absorb_mwh: f64,
    pub reserve_slack_mwh: f64,
    pub co2_rate_kg_per_s: Vec<f64>,
    pub reserve: ReserveDoc,
    #[serde(rename = "device", default)]
    pub devices: Vec<DeviceUsageDoc>,
    #[serde(rename = "storage", default)]
    pub storages: Vec<StorageDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReserveDoc {
    pub committed_headroom: Vec<f64>,
    pub battery_power: Vec<f64>,
    pub sheddable_load: Vec<f64>,
    pub slack: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeviceUsageDoc {
    pub id: String,
    pub on_hours: f64,
    pub prep_hours: f64,
    pub starts: usize,
    pub stops: usize,
    pub fuel_gas_sm3: f64,
    pub co2_kg: f64,
    pub el_out_mwh: f64,
    pub el_in_mwh: f64,
    pub el_curtailed_mwh: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StorageDoc {
    pub id: String,
    pub charged: f64,
    pub discharged: f64,
    pub level: Vec<f64>,
}

impl From<&KpiReport> for KpiDoc {
    fn from(r: &KpiReport) -> Self {
        KpiDoc {
            dt_hours: r.dt_hours,
            co2_total_kg: r.co2_total_kg,
            oil_export_sm3: r.oil_export_sm3,
            gas_export_sm3: r.gas_export_sm3,
            co2_per_oil_kg_per_sm3: r.co2_per_oil_kg_per_sm3,
            slack_supply_mwh: r.slack_supply_mwh,
            slack_absorb_mwh: r.slack_absorb_mwh,
            reserve_slack_mwh: r.reserve_slack_mwh,
            co2_rate_kg_per_s: r.co2_rate_kg_per_s.clone(),
            reserve: ReserveDoc {
                committed_headroom: r.reserve.iter().map(|s| s.committed_headroom).collect(),
                battery_power: r.reserve.iter().map(|s| s.battery_power).collect(),
                sheddable_load: r.reserve.iter().map(|s| s.sheddable_load).collect(),
                slack: r.reserve.iter().map(|s| s.slack).collect(),
            },
            devices: r
                .devices
                .iter()
                .map(|d| DeviceUsageDoc {
                    id: d.id.clone(),
                    on_hours: d.on_hours,
                    prep_hours: d.prep_hours,
                    starts: d.starts,
                    stops: d.stops,
                    fuel_gas_sm3: d.fuel_gas_sm3,
                    co2_kg: d.co2_kg,
                    el_out_mwh: d.el_out_mwh,
                    el_in_mwh: d.el_in_mwh,
                    el_curtailed_mwh: d.el_curtailed_mwh,
                })
                .collect(),
            storages: r
                .storages
                .iter()
                .map(|s| StorageDoc {
                    id: s.id.clone(),
                    charged: s.charged,
                    discharged: s.discharged,
                    level: s.level.clone(),
                })
                .collect(),
        }
    }
}

impl From<KpiDoc> for KpiReport {
    fn from(d: KpiDoc) -> Self {
        let n = d.reserve.committed_headroom.len();
        let reserve = (0..n)
            .map(|t| ReserveStep {
                committed_headroom: d.reserve.committed_headroom[t],
                battery_power: d.reserve.battery_power[t],
                sheddable_load: d.reserve.sheddable_load[t],
                slack: d.reserve.slack[t],
            })
            .collect();
        KpiReport {
            dt_hours: d.dt_hours,
            co2_rate_kg_per_s: d.co2_rate_kg_per_s,
            co2_total_kg: d.co2_total_kg,
            oil_export_sm3: d.oil_export_sm3,
            gas_export_sm3: d.gas_export_sm3,
            co2_per_oil_kg_per_sm3: d.co2_per_oil_kg_per_sm3,
            devices: d
                .devices
                .into_iter()
                .map(|u| DeviceUsage {
                    id: u.id,
                    on_hours: u.on_hours,
                    prep_hours: u.prep_hours,
                    starts: u.starts,
                    stops: u.stops,
                    fuel_gas_sm3: u.fuel_gas_sm3,
                    co2_kg: u.co2_kg,
                    el_out_mwh: u.el_out_mwh,
                    el_in_mwh: u.el_in_mwh,
                    el_curtailed_mwh: u.el_curtailed_mwh,
                })
                .collect(),
            storages: d
                .storages
                .into_iter()
                .map(|s| StorageSeries {
                    id: s.id,
                    level: s.level,
                    charged: s.charged,
                    discharged: s.discharged,
                })
                .collect(),
            reserve,
            slack_supply_mwh: d.slack_supply_mwh,
            slack_absorb_mwh: d.slack_absorb_mwh,
            reserve_slack_mwh: d.reserve_slack_mwh,
        }
    }
}

/// One decoded series column.
enum Slot {
    T,
    Window,
    DevFlow(usize, CarrierKind, FlowDir),
    DevAlias(usize),
    DevOn(usize),
    DevPrep(usize),
    DevStart(usize),
    DevStop(usize),
    DevLevel(usize),
    DevPavail(usize),
    DevProfile(usize),
    EdgeQ(usize),
    EdgeLossPlus(usize),
    EdgeLossMinus(usize),
    QTerm(usize, CarrierKind),
    Pressure(usize, CarrierKind, Terminal),
    Angle(usize),
    SlackSup(usize),
    SlackAbs(usize),
    ReserveSlack,
}

fn fmt_f(v: f64) -> String {
    format!("{v}")
}

fn fmt_flag(v: Option<bool>) -> String {
    match v {
        None => String::new(),
        Some(true) => "1".to_string(),
        Some(false) => "0".to_string(),
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_f).unwrap_or_default()
}

fn series_header(model: &EnergySystemModel, sample: &StepRecord) -> Vec<String> {
    let mut names = vec!["t".to_string(), "window".to_string()];
    for (d, spec) in model.devices.iter().enumerate() {
        let id = &spec.id;
        for (carrier, dir) in spec.flows() {
            names.push(format!("d_{id}_{}_{}", carrier.name(), dir.name()));
        }
        names.push(format!("d_{id}_alias"));
        let rec = &sample.devices[d];
        if rec.on.is_some() {
            names.push(format!("d_{id}_on"));
        }
        if rec.prep.is_some() {
            names.push(format!("d_{id}_prep"));
        }
        if rec.start.is_some() {
            names.push(format!("d_{id}_start"));
        }
        if rec.stop.is_some() {
            names.push(format!("d_{id}_stop"));
        }
        if rec.level.is_some() {
            names.push(format!("d_{id}_level"));
        }
        if rec.p_avail.is_some() {
            names.push(format!("d_{id}_p_avail"));
        }
        names.push(format!("d_{id}_profile"));
    }
    for edge in &model.edges {
        names.push(format!("e_{}_q", edge.id));
        names.push(format!("e_{}_loss_plus", edge.id));
        names.push(format!("e_{}_loss_minus", edge.id));
    }
    for (n, carrier) in sample.q_terms.keys() {
        names.push(format!("qterm_{}_{}", model.nodes[*n].id, carrier.name()));
    }
    for (n, carrier, terminal) in sample.pressures.keys() {
        names.push(format!(
            "p_{}_{}_{}",
            model.nodes[*n].id,
            carrier.name(),
            terminal.name()
        ));
    }
    for n in sample.angles.keys() {
        names.push(format!("theta_{}", model.nodes[*n].id));
    }
    for n in sample.slack_supply.keys() {
        names.push(format!("slack_sup_{}", model.nodes[*n].id));
    }
    for n in sample.slack_absorb.keys() {
        names.push(format!("slack_abs_{}", model.nodes[*n].id));
    }
    names.push("reserve_slack".to_string());
    names
}

fn series_row(model: &EnergySystemModel, step: &StepRecord) -> Vec<String> {
    let mut row = vec![step.t.to_string(), step.window.to_string()];
    for (d, spec) in model.devices.iter().enumerate() {
        let rec = &step.devices[d];
        for (i, _) in spec.flows().iter().enumerate() {
            row.push(fmt_f(rec.flows[i].1));
        }
        row.push(fmt_f(rec.alias));
        for flag in [rec.on, rec.prep, rec.start, rec.stop] {
            if flag.is_some() {
                row.push(fmt_flag(flag));
            }
        }
        if rec.level.is_some() {
            row.push(fmt_opt(rec.level));
        }
        if rec.p_avail.is_some() {
            row.push(fmt_opt(rec.p_avail));
        }
        row.push(fmt_f(rec.profile));
    }
    for rec in &step.edges {
        row.push(fmt_f(rec.q));
        row.push(fmt_f(rec.loss_plus));
        row.push(fmt_f(rec.loss_minus));
    }
    for v in step.q_terms.values() {
        row.push(fmt_f(*v));
    }
    for v in step.pressures.values() {
        row.push(fmt_f(*v));
    }
    for v in step.angles.values() {
        row.push(fmt_f(*v));
    }
    for v in step.slack_supply.values() {
        row.push(fmt_f(*v));
    }
    for v in step.slack_absorb.values() {
        row.push(fmt_f(*v));
    }
    row.push(fmt_f(step.reserve_slack));
    row
}

/// Resolve `rest` as `<id>_<suffix>` against known ids, longest id first so
/// ids containing underscores cannot shadow each other.
fn match_id<'a, T>(
    rest: &str,
    ids: impl Iterator<Item = (usize, &'a str)>,
    parse_suffix: impl Fn(&str) -> Option<T>,
) -> Option<(usize, T)> {
    let mut candidates: Vec<(usize, &str)> = ids.collect();
    candidates.sort_by_key(|(_, id)| std::cmp::Reverse(id.len()));
    for (index, id) in candidates {
        if let Some(suffix) = rest.strip_prefix(id).and_then(|r| r.strip_prefix('_')) {
            if let Some(parsed) = parse_suffix(suffix) {
                return Some((index, parsed));
            }
        }
    }
    None
}

enum DevField {
    Flow(CarrierKind, FlowDir),
    Alias,
    On,
    Prep,
    Start,
    Stop,
    Level,
    Pavail,
    Profile,
}

fn parse_column(name: &str, model: &EnergySystemModel) -> Option<Slot> {
    match name {
        "t" => return Some(Slot::T),
        "window" => return Some(Slot::Window),
        "reserve_slack" => return Some(Slot::ReserveSlack),
        _ => {}
    }
    let devices = || model.devices.iter().enumerate().map(|(i, d)| (i, d.id.as_str()));
    let nodes = || model.nodes.iter().enumerate().map(|(i, n)| (i, n.id.as_str()));
    let edges = || model.edges.iter().enumerate().map(|(i, e)| (i, e.id.as_str()));

    if let Some(rest) = name.strip_prefix("d_") {
        let (d, field) = match_id(rest, devices(), |suffix| match suffix {
            "alias" => Some(DevField::Alias),
            "on" => Some(DevField::On),
            "prep" => Some(DevField::Prep),
            "start" => Some(DevField::Start),
            "stop" => Some(DevField::Stop),
            "level" => Some(DevField::Level),
            "p_avail" => Some(DevField::Pavail),
            "profile" => Some(DevField::Profile),
            _ => {
                let (carrier, dir) = suffix.rsplit_once('_')?;
                Some(DevField::Flow(
                    CarrierKind::parse(carrier)?,
                    match dir {
                        "in" => FlowDir::In,
                        "out" => FlowDir::Out,
                        _ => return None,
                    },
                ))
            }
        })?;
        return Some(match field {
            DevField::Flow(c, dir) => Slot::DevFlow(d, c, dir),
            DevField::Alias => Slot::DevAlias(d),
            DevField::On => Slot::DevOn(d),
            DevField::Prep => Slot::DevPrep(d),
            DevField::Start => Slot::DevStart(d),
            DevField::Stop => Slot::DevStop(d),
            DevField::Level => Slot::DevLevel(d),
            DevField::Pavail => Slot::DevPavail(d),
            DevField::Profile => Slot::DevProfile(d),
        });
    }
    if let Some(rest) = name.strip_prefix("e_") {
        let (e, which) = match_id(rest, edges(), |suffix| match suffix {
            "q" => Some(0),
            "loss_plus" => Some(1),
            "loss_minus" => Some(2),
            _ => None,
        })?;
        return Some(match which {
            0 => Slot::EdgeQ(e),
            1 => Slot::EdgeLossPlus(e),
            _ => Slot::EdgeLossMinus(e),
        });
    }
    if let Some(rest) = name.strip_prefix("qterm_") {
        let (n, carrier) = match_id(rest, nodes(), CarrierKind::parse)?;
        return Some(Slot::QTerm(n, carrier));
    }
    if let Some(rest) = name.strip_prefix("p_") {
        let (n, (carrier, terminal)) = match_id(rest, nodes(), |suffix| {
            let (carrier, terminal) = suffix.rsplit_once('_')?;
            Some((
                CarrierKind::parse(carrier)?,
                match terminal {
                    "in" => Terminal::In,
                    "out" => Terminal::Out,
                    _ => return None,
                },
            ))
        })?;
        return Some(Slot::Pressure(n, carrier, terminal));
    }
    if let Some(rest) = name.strip_prefix("theta_") {
        let n = nodes().find(|(_, id)| *id == rest)?.0;
        return Some(Slot::Angle(n));
    }
    if let Some(rest) = name.strip_prefix("slack_sup_") {
        let n = nodes().find(|(_, id)| *id == rest)?.0;
        return Some(Slot::SlackSup(n));
    }
    if let Some(rest) = name.strip_prefix("slack_abs_") {
        let n = nodes().find(|(_, id)| *id == rest)?.0;
        return Some(Slot::SlackAbs(n));
    }
    None
}

/// Write the committed series, one row per timestep in a stable column
/// order derived from the model.
pub fn write_series(
    path: &Path,
    model: &EnergySystemModel,
    steps: &[StepRecord],
) -> Result<(), CliError> {
    let Some(sample) = steps.first() else {
        return Err(CliError::User("no committed steps to write".to_string()));
    };
    let mut writer = csv::Writer::from_path(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    writer
        .write_record(series_header(model, sample))
        .map_err(|e| CliError::Io(e.to_string()))?;
    for step in steps {
        writer
            .write_record(series_row(model, step))
            .map_err(|e| CliError::Io(e.to_string()))?;
    }
    writer.flush().map_err(|e| io_at(path, e))?;
    Ok(())
}

/// Read a committed series back into step records, resolving columns
/// against the model from the same bundle.
pub fn read_series(path: &Path, model: &EnergySystemModel) -> Result<Vec<StepRecord>, CliError> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let headers = reader
        .headers()
        .map_err(|e| CliError::User(format!("{}: {e}", path.display())))?
        .clone();
    let slots: Vec<Slot> = headers
        .iter()
        .map(|name| {
            parse_column(name, model).ok_or_else(|| {
                CliError::User(format!(
                    "{}: column '{}' does not match any model element",
                    path.display(),
                    name
                ))
            })
        })
        .collect::<Result<_, _>>()?;

    let flow_order: Vec<Vec<(CarrierKind, FlowDir)>> =
        model.devices.iter().map(|d| d.flows()).collect();

    let mut steps = Vec::new();
    for (row_index, record) in reader.records().enumerate() {
        let line = row_index + 2;
        let record = record.map_err(|e| CliError::User(format!("{}: line {line}: {e}", path.display())))?;
        let mut step = StepRecord {
            t: 0,
            window: 0,
            devices: flow_order
                .iter()
                .map(|flows| DeviceRecord {
                    flows: flows.iter().map(|key| (*key, 0.0)).collect(),
                    alias: 0.0,
                    on: None,
                    prep: None,
                    start: None,
                    stop: None,
                    level: None,
                    p_avail: None,
                    profile: 0.0,
                })
                .collect(),
            edges: model
                .edges
                .iter()
                .map(|_| EdgeRecord {
                    q: 0.0,
                    loss_plus: 0.0,
                    loss_minus: 0.0,
                })
                .collect(),
            q_terms: Default::default(),
            pressures: Default::default(),
            angles: Default::default(),
            slack_supply: Default::default(),
            slack_absorb: Default::default(),
            reserve_slack: 0.0,
        };
        for (slot, field) in slots.iter().zip(record.iter()) {
            let number = || -> Result<f64, CliError> {
                field.trim().parse().map_err(|_| {
                    CliError::User(format!(
                        "{}: line {line}: '{field}' is not a number",
                        path.display()
                    ))
                })
            };
            let flag = || -> Result<Option<bool>, CliError> {
                match field.trim() {
                    "" => Ok(None),
                    "1" => Ok(Some(true)),
                    "0" => Ok(Some(false)),
                    other => Err(CliError::User(format!(
                        "{}: line {line}: '{other}' is not a flag",
                        path.display()
                    ))),
                }
            };
            match slot {
                Slot::T => step.t = number()? as usize,
                Slot::Window => step.window = number()? as usize,
                Slot::DevFlow(d, carrier, dir) => {
                    let rec = &mut step.devices[*d];
                    if let Some(entry) = rec
                        .flows
                        .iter_mut()
                        .find(|((c, dd), _)| c == carrier && dd == dir)
                    {
                        entry.1 = number()?;
                    }
                }
                Slot::DevAlias(d) => step.devices[*d].alias = number()?,
                Slot::DevOn(d) => step.devices[*d].on = flag()?,
                Slot::DevPrep(d) => step.devices[*d].prep = flag()?,
                Slot::DevStart(d) => step.devices[*d].start = flag()?,
                Slot::DevStop(d) => step.devices[*d].stop = flag()?,
                Slot::DevLevel(d) => {
                    step.devices[*d].level = (!field.is_empty()).then(number).transpose()?
                }
                Slot::DevPavail(d) => {
                    step.devices[*d].p_avail = (!field.is_empty()).then(number).transpose()?
                }
                Slot::DevProfile(d) => step.devices[*d].profile = number()?,
                Slot::EdgeQ(e) => step.edges[*e].q = number()?,
                Slot::EdgeLossPlus(e) => step.edges[*e].loss_plus = number()?,
                Slot::EdgeLossMinus(e) => step.edges[*e].loss_minus = number()?,
                Slot::QTerm(n, carrier) => {
                    step.q_terms.insert((*n, *carrier), number()?);
                }
                Slot::Pressure(n, carrier, terminal) => {
                    step.pressures.insert((*n, *carrier, *terminal), number()?);
                }
                Slot::Angle(n) => {
                    step.angles.insert(*n, number()?);
                }
                Slot::SlackSup(n) => {
                    step.slack_supply.insert(*n, number()?);
                }
                Slot::SlackAbs(n) => {
                    step.slack_absorb.insert(*n, number()?);
                }
                Slot::ReserveSlack => step.reserve_slack = number()?,
            }
        }
        steps.push(step);
    }
    Ok(steps)
}

fn write_windows(path: &Path, model: &EnergySystemModel, windows: &[WindowSummary]) -> Result<(), CliError> {
    let mut writer = csv::Writer::from_path(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    writer
        .write_record([
            "t0",
            "committed",
            "objective",
            "objective_recomputed",
            "mip_gap",
            "deficits",
        ])
        .map_err(|e| CliError::Io(e.to_string()))?;
    for w in windows {
        let deficits = w
            .deficits
            .iter()
            .map(|(d, v)| format!("{}={}", model.devices[*d].id, v))
            .collect::<Vec<_>>()
            .join(" ");
        writer
            .write_record([
                w.t0.to_string(),
                w.committed.to_string(),
                fmt_f(w.objective),
                fmt_f(w.objective_recomputed),
                fmt_opt(w.mip_gap),
                deficits,
            ])
            .map_err(|e| CliError::Io(e.to_string()))?;
    }
    writer.flush().map_err(|e| io_at(path, e))?;
    Ok(())
}

/// Write a complete bundle. Refuses to touch a non-empty directory unless
/// `force` is set.
pub fn write_bundle(
    dir: &Path,
    force: bool,
    model: &EnergySystemModel,
    sim_config: &SimulationConfig,
    result: &SimulationResult,
    kpi: &KpiReport,
    metadata: &Metadata,
) -> Result<(), CliError> {
    if dir.exists() {
        let occupied = dir
            .read_dir()
            .map_err(|e| io_at(dir, e))?
            .next()
            .is_some();
        if occupied && !force {
            return Err(CliError::User(format!(
                "output directory '{}' is not empty; pass --force to overwrite",
                dir.display()
            )));
        }
    }
    std::fs::create_dir_all(dir).map_err(|e| io_at(dir, e))?;

    let doc = config::document_from(model, sim_config, &ProfilesDoc::default());
    let text = toml::to_string(&doc).expect("config document serializes");
    std::fs::write(dir.join(CONFIG_FILE), text).map_err(|e| io_at(dir, e))?;

    let text = toml::to_string(metadata).expect("metadata serializes");
    std::fs::write(dir.join(METADATA_FILE), text).map_err(|e| io_at(dir, e))?;

    write_series(&dir.join(SERIES_FILE), model, &result.steps)?;
    write_windows(&dir.join(WINDOWS_FILE), model, &result.windows)?;

    let text = toml::to_string(&KpiDoc::from(kpi)).expect("kpi document serializes");
    std::fs::write(dir.join(KPI_FILE), text).map_err(|e| io_at(dir, e))?;
    Ok(())
}

/// A bundle read back from disk; windows are informational output and are
/// not reloaded.
pub struct Bundle {
    pub doc: ConfigDoc,
    pub model: EnergySystemModel,
    pub config: SimulationConfig,
    pub metadata: Metadata,
    pub kpi: KpiReport,
    pub steps: Vec<StepRecord>,
}

impl Bundle {
    pub fn result(&self) -> SimulationResult {
        SimulationResult {
            steps: self.steps.clone(),
            windows: Vec::new(),
        }
    }
}

pub fn read_bundle(dir: &Path) -> Result<Bundle, CliError> {
    let config_path = dir.join(CONFIG_FILE);
    let text = std::fs::read_to_string(&config_path).map_err(|e| io_at(&config_path, e))?;
    let (doc, model, config) = config::parse_config(&text, &config_path.display().to_string())?;

    let meta_path = dir.join(METADATA_FILE);
    let text = std::fs::read_to_string(&meta_path).map_err(|e| io_at(&meta_path, e))?;
    let metadata: Metadata =
        toml::from_str(&text).map_err(|e| CliError::User(format!("{}: {e}", meta_path.display())))?;

    let kpi_path = dir.join(KPI_FILE);
    let text = std::fs::read_to_string(&kpi_path).map_err(|e| io_at(&kpi_path, e))?;
    let kpi: KpiDoc =
        toml::from_str(&text).map_err(|e| CliError::User(format!("{}: {e}", kpi_path.display())))?;

    let steps = read_series(&dir.join(SERIES_FILE), &model)?;

    Ok(Bundle {
        doc,
        model,
        config,
        metadata,
        kpi: kpi.into(),
        steps,
    })
}
