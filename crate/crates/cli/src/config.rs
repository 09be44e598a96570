//! Configuration documents: a strict TOML schema with explicit unit
//! suffixes on every dimensioned value, converted into the normalized
//! internal model. The same document type serializes back out, so a loaded
//! configuration can be re-emitted in canonical units (bundles store this
//! normalized copy).

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use rigsim::model::{
    generate_forecast_from_nowcast, has_errors, validate_model, validate_profiles, BatteryParams,
    CarrierKind, CarrierSet, CompressorDriver, CompressorParams, DeviceKind, DeviceSpec, Diagnostic,
    Edge, ElectrolyserParams, EnergySystemModel, FlowDir, FlowModel, FuelCellParams, GasParams,
    GasTurbineParams, HeaterParams, HydrogenStorageParams, LiquidParams, Node, PenaltyCurve,
    PressureSpec, PumpParams, SeparatorParams, Severity, SimulationConfig, SolverOptions,
    StartStop, Terminal, TimeSeriesSet, WellParams,
};

use crate::error::{io_at, CliError};
use crate::timeseries;
use crate::units;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigDoc {
    pub simulation: SimulationDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub carriers: Option<CarriersDoc>,
    #[serde(rename = "node", default, skip_serializing_if = "Vec::is_empty")]
    pub nodes: Vec<NodeDoc>,
    #[serde(rename = "edge", default, skip_serializing_if = "Vec::is_empty")]
    pub edges: Vec<EdgeDoc>,
    #[serde(rename = "device", default, skip_serializing_if = "Vec::is_empty")]
    pub devices: Vec<DeviceDoc>,
    #[serde(default, skip_serializing_if = "ProfilesDoc::is_empty")]
    pub profiles: ProfilesDoc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationDoc {
    pub timestep: String,
    pub horizon: String,
    pub reopt: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nowcast: Option<String>,
    pub duration: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reserve_min: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub emission_cap: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s_base: Option<String>,
    #[serde(default)]
    pub elastic: bool,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solver: Option<SolverDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gap: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time_limit: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CarriersDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hydrogen_calorific_value: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gas: Option<GasDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oil: Option<LiquidDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub water: Option<LiquidDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GasDoc {
    pub calorific_value: String,
    pub co2_content: String,
    pub gravity: f64,
    pub compressibility: f64,
    pub temperature: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LiquidDoc {
    pub density: String,
    pub darcy_friction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeDoc {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elevation: Option<String>,
    #[serde(default)]
    pub el_reference: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub pressure: Vec<PressureDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PressureDoc {
    pub carrier: String,
    pub terminal: String,
    pub nominal: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_deviation: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeDoc {
    pub id: String,
    pub carrier: String,
    pub from: String,
    pub to: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q_max: Option<String>,
    #[serde(default)]
    pub bidirectional: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub losses: Option<Vec<(String, String)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dc: Option<DcDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weymouth: Option<WeymouthDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub darcy: Option<DarcyDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DcDoc {
    pub reactance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeymouthDoc {
    pub diameter: String,
    pub length: String,
    pub base_temperature: String,
    pub base_pressure: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DarcyDoc {
    pub diameter: String,
    pub length: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeviceDoc {
    pub id: String,
    pub node: String,
    pub f_max: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f_min: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ramp_up: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ramp_down: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile: Option<String>,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub reserve_factor: f64,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub load_reserve_factor: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_flow: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start_stop: Option<StartStopDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub penalty: Option<PenaltyDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub well: Option<WellDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub separator: Option<SeparatorDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub compressor: Option<CompressorDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pump: Option<PumpDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gas_turbine: Option<GasTurbineDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub heater: Option<HeaterDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub battery: Option<BatteryDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hydrogen_storage: Option<HydrogenStorageDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub electrolyser: Option<ElectrolyserDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fuel_cell: Option<FuelCellDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<SourceSinkDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sink: Option<SourceSinkDoc>,
}

fn is_zero(v: &f64) -> bool {
    *v == 0.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StartStopDoc {
    pub prep_time: String,
    #[serde(default)]
    pub cost_start: f64,
    #[serde(default)]
    pub cost_stop: f64,
    #[serde(default)]
    pub initially_on: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PenaltyDoc {
    pub points: Vec<(String, f64)>,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub on_term: f64,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub prep_term: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<(String, String)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WellDoc {
    pub gas_oil_ratio: f64,
    pub water_cut: f64,
    #[serde(default)]
    pub gas_injection_ratio: f64,
    pub injection_pressure: String,
    pub separator_pressure: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeparatorDoc {
    pub heat_demand_factor: f64,
    pub el_demand_factor: f64,
    pub outlet_pressure_gas: String,
    pub outlet_pressure_oil: String,
    pub outlet_pressure_water: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompressorDoc {
    pub driver: String,
    pub eta_is: f64,
    pub heat_capacity_ratio: f64,
    pub compressibility: f64,
    pub gas_constant: f64,
    pub inlet_temperature: String,
    pub density: String,
    pub nominal_flow: String,
    pub nominal_pressure_in: String,
    pub nominal_pressure_out: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PumpDoc {
    pub carrier: String,
    pub efficiency: f64,
    pub nominal_pressure_in: String,
    pub nominal_pressure_out: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GasTurbineDoc {
    pub fuel_a: f64,
    pub fuel_b: f64,
    pub eta_heat: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HeaterDoc {
    pub efficiency: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BatteryDoc {
    pub capacity: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_level: Option<String>,
    pub efficiency: f64,
    pub reserve_duration: String,
    #[serde(default)]
    pub cost_deficit: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_level: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_level: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HydrogenStorageDoc {
    pub capacity: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_level: Option<String>,
    #[serde(default)]
    pub cost_deficit: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_level: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_level: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElectrolyserDoc {
    pub eta: f64,
    #[serde(default)]
    pub eta_heat: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FuelCellDoc {
    pub eta: f64,
    #[serde(default)]
    pub eta_heat: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceSinkDoc {
    pub carrier: String,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfilesDoc {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub files: Vec<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub synthesize: BTreeMap<String, f64>,
}

impl ProfilesDoc {
    pub fn is_empty(&self) -> bool {
        self.files.is_empty() && self.synthesize.is_empty()
    }
}

/// Diagnostic collector for the document-to-model conversion. Unit and
/// reference mistakes accumulate instead of aborting on the first, so one
/// validate run reports everything.
struct Conv {
    diags: Vec<Diagnostic>,
}

impl Conv {
    fn new() -> Self {
        Conv { diags: Vec::new() }
    }

    fn error(&mut self, element: &str, message: String) {
        self.diags.push(Diagnostic {
            severity: Severity::Error,
            element: element.to_string(),
            message,
        });
    }

    fn get<T: Default>(&mut self, element: &str, field: &str, r: Result<T, String>) -> T {
        self.get_or(element, field, r, T::default())
    }

    fn get_or<T>(&mut self, element: &str, field: &str, r: Result<T, String>, fallback: T) -> T {
        match r {
            Ok(v) => v,
            Err(m) => {
                self.error(element, format!("{field}: {m}"));
                fallback
            }
        }
    }

    fn opt<T>(
        &mut self,
        element: &str,
        field: &str,
        v: &Option<String>,
        f: impl Fn(&str) -> Result<T, String>,
    ) -> Option<T> {
        match v {
            None => None,
            Some(s) => match f(s) {
                Ok(v) => Some(v),
                Err(m) => {
                    self.error(element, format!("{field}: {m}"));
                    None
                }
            },
        }
    }
}

fn parse_carrier(s: &str) -> Result<CarrierKind, String> {
    CarrierKind::parse(s).ok_or_else(|| format!("'{s}' is not a carrier"))
}

fn parse_terminal(s: &str) -> Result<Terminal, String> {
    match s {
        "in" => Ok(Terminal::In),
        "out" => Ok(Terminal::Out),
        _ => Err(format!("'{s}' is not a terminal (in, out)")),
    }
}

fn parse_dir(s: &str) -> Result<FlowDir, String> {
    match s {
        "in" => Ok(FlowDir::In),
        "out" => Ok(FlowDir::Out),
        _ => Err(format!("'{s}' is not a flow direction (in, out)")),
    }
}

/// The carrier whose units apply to a device's generic flow bounds.
fn alias_carrier(kind: &DeviceKind) -> CarrierKind {
    match kind {
        DeviceKind::Well(_) | DeviceKind::Separator(_) => CarrierKind::Wellstream,
        DeviceKind::Compressor(_) => CarrierKind::Gas,
        DeviceKind::Pump(p) => p.carrier,
        DeviceKind::GasTurbine(_)
        | DeviceKind::Heater(_)
        | DeviceKind::Battery(_)
        | DeviceKind::Electrolyser(_)
        | DeviceKind::FuelCell(_) => CarrierKind::Electricity,
        DeviceKind::HydrogenStorage(_) => CarrierKind::Hydrogen,
        DeviceKind::Source(c) | DeviceKind::Sink(c) => *c,
    }
}

fn amount(carrier: CarrierKind, s: &str) -> Result<f64, String> {
    match carrier {
        CarrierKind::Electricity | CarrierKind::Heat => units::power_mw(s),
        _ => units::flow_sm3_per_s(s),
    }
}

impl DeviceDoc {
    fn build_kind(&self, conv: &mut Conv) -> Option<DeviceKind> {
        let id = &self.id;
        let mut kinds: Vec<DeviceKind> = Vec::new();
        if let Some(p) = &self.well {
            kinds.push(DeviceKind::Well(WellParams {
                gas_oil_ratio: p.gas_oil_ratio,
                water_cut: p.water_cut,
                gas_injection_ratio: p.gas_injection_ratio,
                injection_pressure: conv.get(id, "injection_pressure", units::pressure_mpa(&p.injection_pressure)),
                separator_pressure: conv.get(id, "separator_pressure", units::pressure_mpa(&p.separator_pressure)),
            }));
        }
        if let Some(p) = &self.separator {
            kinds.push(DeviceKind::Separator(SeparatorParams {
                heat_demand_factor: p.heat_demand_factor,
                el_demand_factor: p.el_demand_factor,
                outlet_pressure_gas: conv.get(id, "outlet_pressure_gas", units::pressure_mpa(&p.outlet_pressure_gas)),
                outlet_pressure_oil: conv.get(id, "outlet_pressure_oil", units::pressure_mpa(&p.outlet_pressure_oil)),
                outlet_pressure_water: conv.get(id, "outlet_pressure_water", units::pressure_mpa(&p.outlet_pressure_water)),
            }));
        }
        if let Some(p) = &self.compressor {
            let driver = match p.driver.as_str() {
                "electric" => CompressorDriver::Electric,
                "gas-turbine" => CompressorDriver::GasTurbine,
                other => {
                    conv.error(id, format!("driver '{other}' is not electric or gas-turbine"));
                    CompressorDriver::Electric
                }
            };
            kinds.push(DeviceKind::Compressor(CompressorParams {
                driver,
                eta_is: p.eta_is,
                heat_capacity_ratio: p.heat_capacity_ratio,
                compressibility: p.compressibility,
                gas_constant: p.gas_constant,
                inlet_temperature_k: conv.get(id, "inlet_temperature", units::kelvin(&p.inlet_temperature)),
                density: conv.get(id, "density", units::kg_per_m3(&p.density)),
                nominal_flow: conv.get(id, "nominal_flow", units::flow_sm3_per_s(&p.nominal_flow)),
                nominal_pressure_in: conv.get(id, "nominal_pressure_in", units::pressure_mpa(&p.nominal_pressure_in)),
                nominal_pressure_out: conv.get(id, "nominal_pressure_out", units::pressure_mpa(&p.nominal_pressure_out)),
            }));
        }
        if let Some(p) = &self.pump {
            kinds.push(DeviceKind::Pump(PumpParams {
                carrier: conv.get_or(id, "carrier", parse_carrier(&p.carrier), CarrierKind::Oil),
                efficiency: p.efficiency,
                nominal_pressure_in: conv.get(id, "nominal_pressure_in", units::pressure_mpa(&p.nominal_pressure_in)),
                nominal_pressure_out: conv.get(id, "nominal_pressure_out", units::pressure_mpa(&p.nominal_pressure_out)),
            }));
        }
        if let Some(p) = &self.gas_turbine {
            kinds.push(DeviceKind::GasTurbine(GasTurbineParams {
                fuel_a: p.fuel_a,
                fuel_b: p.fuel_b,
                eta_heat: p.eta_heat,
            }));
        }
        if let Some(p) = &self.heater {
            kinds.push(DeviceKind::Heater(HeaterParams { efficiency: p.efficiency }));
        }
        if let Some(p) = &self.battery {
            kinds.push(DeviceKind::Battery(BatteryParams {
                capacity: conv.get(id, "capacity", units::energy_mwh(&p.capacity)),
                min_level: conv.opt(id, "min_level", &p.min_level, units::energy_mwh).unwrap_or(0.0),
                efficiency: p.efficiency,
                reserve_duration_h: conv.get(id, "reserve_duration", units::hours(&p.reserve_duration)),
                cost_deficit: p.cost_deficit,
                initial_level: conv.opt(id, "initial_level", &p.initial_level, units::energy_mwh),
                target_level: conv.opt(id, "target_level", &p.target_level, units::energy_mwh),
            }));
        }
        if let Some(p) = &self.hydrogen_storage {
            kinds.push(DeviceKind::HydrogenStorage(HydrogenStorageParams {
                capacity: conv.get(id, "capacity", units::volume_sm3(&p.capacity)),
                min_level: conv.opt(id, "min_level", &p.min_level, units::volume_sm3).unwrap_or(0.0),
                cost_deficit: p.cost_deficit,
                initial_level: conv.opt(id, "initial_level", &p.initial_level, units::volume_sm3),
                target_level: conv.opt(id, "target_level", &p.target_level, units::volume_sm3),
            }));
        }
        if let Some(p) = &self.electrolyser {
            kinds.push(DeviceKind::Electrolyser(ElectrolyserParams {
                eta: p.eta,
                eta_heat: p.eta_heat,
            }));
        }
        if let Some(p) = &self.fuel_cell {
            kinds.push(DeviceKind::FuelCell(FuelCellParams {
                eta: p.eta,
                eta_heat: p.eta_heat,
            }));
        }
        if let Some(p) = &self.source {
            kinds.push(DeviceKind::Source(conv.get_or(
                id,
                "carrier",
                parse_carrier(&p.carrier),
                CarrierKind::Electricity,
            )));
        }
        if let Some(p) = &self.sink {
            kinds.push(DeviceKind::Sink(conv.get_or(
                id,
                "carrier",
                parse_carrier(&p.carrier),
                CarrierKind::Electricity,
            )));
        }
        match kinds.len() {
            1 => Some(kinds.pop().unwrap()),
            0 => {
                conv.error(id, "device declares no kind table (well, separator, compressor, pump, gas_turbine, heater, battery, hydrogen_storage, electrolyser, fuel_cell, source, sink)".to_string());
                None
            }
            n => {
                conv.error(id, format!("device declares {n} kind tables, expected exactly one"));
                None
            }
        }
    }
}

impl ConfigDoc {
    /// Convert the parsed document into the internal model, normalizing all
    /// units. Aggregates every conversion problem instead of stopping early.
    pub fn to_model(&self) -> Result<(EnergySystemModel, SimulationConfig), Vec<Diagnostic>> {
        let mut conv = Conv::new();
        let sim = &self.simulation;

        let timestep = conv.get("config", "timestep", units::minutes(&sim.timestep));
        let timestep = if timestep > 0.0 { timestep } else { 1.0 };
        let config = SimulationConfig {
            timestep_minutes: timestep,
            horizon_steps: conv.get("config", "horizon", units::steps(&sim.horizon, timestep)),
            reopt_steps: conv.get("config", "reopt", units::steps(&sim.reopt, timestep)),
            nowcast_steps: sim
                .nowcast
                .as_ref()
                .map(|s| conv.get("config", "nowcast", units::steps(s, timestep)))
                .unwrap_or(0),
            duration_steps: conv.get("config", "duration", units::steps(&sim.duration, timestep)),
            reserve_min: conv.opt("config", "reserve_min", &sim.reserve_min, units::power_mw).unwrap_or(0.0),
            emission_cap: conv.opt("config", "emission_cap", &sim.emission_cap, units::kg_per_s),
            s_base_mva: conv.opt("config", "s_base", &sim.s_base, units::mva).unwrap_or(100.0),
            elastic: sim.elastic,
            seed: sim.seed,
            solver: SolverOptions {
                gap: sim.solver.as_ref().and_then(|s| s.gap).unwrap_or(1e-9),
                time_limit_s: sim
                    .solver
                    .as_ref()
                    .and_then(|s| conv.opt("config", "time_limit", &s.time_limit, units::seconds)),
            },
        };

        let carriers = match &self.carriers {
            None => CarrierSet::default(),
            Some(c) => CarrierSet {
                gas: c.gas.as_ref().map(|g| GasParams {
                    calorific_value: conv.get("carriers.gas", "calorific_value", units::mj_per_sm3(&g.calorific_value)),
                    co2_content: conv.get("carriers.gas", "co2_content", units::kg_per_sm3(&g.co2_content)),
                    gravity: g.gravity,
                    compressibility: g.compressibility,
                    temperature_k: conv.get("carriers.gas", "temperature", units::kelvin(&g.temperature)),
                }),
                hydrogen_calorific_value: conv.opt(
                    "carriers",
                    "hydrogen_calorific_value",
                    &c.hydrogen_calorific_value,
                    units::mj_per_sm3,
                ),
                oil: c.oil.as_ref().map(|l| LiquidParams {
                    density: conv.get("carriers.oil", "density", units::kg_per_m3(&l.density)),
                    darcy_friction: l.darcy_friction,
                }),
                water: c.water.as_ref().map(|l| LiquidParams {
                    density: conv.get("carriers.water", "density", units::kg_per_m3(&l.density)),
                    darcy_friction: l.darcy_friction,
                }),
            },
        };

        let nodes = self
            .nodes
            .iter()
            .map(|n| Node {
                id: n.id.clone(),
                elevation: conv.opt(&n.id, "elevation", &n.elevation, units::metres).unwrap_or(0.0),
                el_reference: n.el_reference,
                pressure: n
                    .pressure
                    .iter()
                    .map(|p| {
                        (
                            conv.get_or(&n.id, "pressure carrier", parse_carrier(&p.carrier), CarrierKind::Gas),
                            conv.get_or(&n.id, "pressure terminal", parse_terminal(&p.terminal), Terminal::In),
                            PressureSpec {
                                nominal: conv.get(&n.id, "pressure nominal", units::pressure_mpa(&p.nominal)),
                                max_deviation: p.max_deviation,
                            },
                        )
                    })
                    .collect(),
            })
            .collect();

        let edges = self
            .edges
            .iter()
            .map(|e| {
                let carrier = conv.get_or(&e.id, "carrier", parse_carrier(&e.carrier), CarrierKind::Electricity);
                let flow_model = match (&e.dc, &e.weymouth, &e.darcy) {
                    (None, None, None) => FlowModel::Transport,
                    (Some(dc), None, None) => FlowModel::DcPower { reactance: dc.reactance },
                    (None, Some(w), None) => FlowModel::Weymouth {
                        diameter_mm: conv.get(&e.id, "diameter", units::millimetres(&w.diameter)),
                        length_km: conv.get(&e.id, "length", units::kilometres(&w.length)),
                        base_temperature_k: conv.get(&e.id, "base_temperature", units::kelvin(&w.base_temperature)),
                        base_pressure_mpa: conv.get(&e.id, "base_pressure", units::pressure_mpa(&w.base_pressure)),
                    },
                    (None, None, Some(d)) => FlowModel::Darcy {
                        diameter_mm: conv.get(&e.id, "diameter", units::millimetres(&d.diameter)),
                        length_km: conv.get(&e.id, "length", units::kilometres(&d.length)),
                    },
                    _ => {
                        conv.error(&e.id, "edge declares more than one flow model".to_string());
                        FlowModel::Transport
                    }
                };
                Edge {
                    id: e.id.clone(),
                    carrier,
                    from: e.from.clone(),
                    to: e.to.clone(),
                    q_max: conv.opt(&e.id, "q_max", &e.q_max, |s| amount(carrier, s)),
                    bidirectional: e.bidirectional,
                    flow_model,
                    loss_table: e.losses.as_ref().map(|table| {
                        table
                            .iter()
                            .map(|(q, loss)| {
                                (
                                    conv.get(&e.id, "losses flow", amount(carrier, q)),
                                    conv.get(&e.id, "losses value", amount(carrier, loss)),
                                )
                            })
                            .collect()
                    }),
                }
            })
            .collect();

        let devices = self
            .devices
            .iter()
            .filter_map(|d| {
                let kind = d.build_kind(&mut conv)?;
                let flow_carrier = alias_carrier(&kind);
                let amt = |s: &str| amount(flow_carrier, s);
                let penalty = d.penalty.as_ref().map(|p| {
                    let target = p.target.as_ref().map(|(c, dir)| {
                        (
                            conv.get_or(&d.id, "penalty target carrier", parse_carrier(c), flow_carrier),
                            conv.get_or(&d.id, "penalty target direction", parse_dir(dir), FlowDir::Out),
                        )
                    });
                    let x_carrier = target.map(|(c, _)| c).unwrap_or(flow_carrier);
                    PenaltyCurve {
                        points: p
                            .points
                            .iter()
                            .map(|(x, y)| (conv.get(&d.id, "penalty point", amount(x_carrier, x)), *y))
                            .collect(),
                        on_term: p.on_term,
                        prep_term: p.prep_term,
                        target,
                    }
                });
                Some(DeviceSpec {
                    id: d.id.clone(),
                    node: d.node.clone(),
                    kind,
                    f_max: conv.get(&d.id, "f_max", amt(&d.f_max)),
                    f_min: conv.opt(&d.id, "f_min", &d.f_min, amt).unwrap_or(0.0),
                    ramp_up: d.ramp_up,
                    ramp_down: d.ramp_down,
                    profile: d.profile.clone(),
                    start_stop: d.start_stop.as_ref().map(|ss| StartStop {
                        prep_steps: conv.get(&d.id, "prep_time", units::steps(&ss.prep_time, timestep)),
                        cost_start: ss.cost_start,
                        cost_stop: ss.cost_stop,
                        initially_on: ss.initially_on,
                    }),
                    reserve_factor: d.reserve_factor,
                    load_reserve_factor: d.load_reserve_factor,
                    penalty,
                    initial_flow: conv.opt(&d.id, "initial_flow", &d.initial_flow, amt),
                })
            })
            .collect();

        if !conv.diags.is_empty() {
            return Err(conv.diags);
        }
        Ok((
            EnergySystemModel {
                carriers,
                nodes,
                edges,
                devices,
            },
            config,
        ))
    }
}

fn fmt(v: f64, unit: &str) -> String {
    format!("{v} {unit}")
}

fn fmt_amount(carrier: CarrierKind, v: f64) -> String {
    match carrier {
        CarrierKind::Electricity | CarrierKind::Heat => fmt(v, "MW"),
        _ => fmt(v, "Sm3/s"),
    }
}

fn fmt_steps(n: usize) -> String {
    format!("{n} steps")
}

/// Re-create a document from the internal model, in canonical units. The
/// result parses back to an equal model; bundles store this normalized form.
pub fn document_from(
    model: &EnergySystemModel,
    config: &SimulationConfig,
    profiles: &ProfilesDoc,
) -> ConfigDoc {
    let carriers = {
        let c = &model.carriers;
        if c.gas.is_none() && c.oil.is_none() && c.water.is_none() && c.hydrogen_calorific_value.is_none() {
            None
        } else {
            Some(CarriersDoc {
                hydrogen_calorific_value: c.hydrogen_calorific_value.map(|v| fmt(v, "MJ/Sm3")),
                gas: c.gas.as_ref().map(|g| GasDoc {
                    calorific_value: fmt(g.calorific_value, "MJ/Sm3"),
                    co2_content: fmt(g.co2_content, "kg/Sm3"),
                    gravity: g.gravity,
                    compressibility: g.compressibility,
                    temperature: fmt(g.temperature_k, "K"),
                }),
                oil: c.oil.as_ref().map(|l| LiquidDoc {
                    density: fmt(l.density, "kg/m3"),
                    darcy_friction: l.darcy_friction,
                }),
                water: c.water.as_ref().map(|l| LiquidDoc {
                    density: fmt(l.density, "kg/m3"),
                    darcy_friction: l.darcy_friction,
                }),
            })
        }
    };

    let nodes = model
        .nodes
        .iter()
        .map(|n| NodeDoc {
            id: n.id.clone(),
            elevation: if n.elevation == 0.0 { None } else { Some(fmt(n.elevation, "m")) },
            el_reference: n.el_reference,
            pressure: n
                .pressure
                .iter()
                .map(|(carrier, terminal, spec)| PressureDoc {
                    carrier: carrier.name().to_string(),
                    terminal: terminal.name().to_string(),
                    nominal: fmt(spec.nominal, "MPa"),
                    max_deviation: spec.max_deviation,
                })
                .collect(),
        })
        .collect();

    let edges = model
        .edges
        .iter()
        .map(|e| {
            let mut doc = EdgeDoc {
                id: e.id.clone(),
                carrier: e.carrier.name().to_string(),
                from: e.from.clone(),
                to: e.to.clone(),
                q_max: e.q_max.map(|v| fmt_amount(e.carrier, v)),
                bidirectional: e.bidirectional,
                losses: e.loss_table.as_ref().map(|t| {
                    t.iter()
                        .map(|(q, loss)| (fmt_amount(e.carrier, *q), fmt_amount(e.carrier, *loss)))
                        .collect()
                }),
                dc: None,
                weymouth: None,
                darcy: None,
            };
            match &e.flow_model {
                FlowModel::Transport => {}
                FlowModel::DcPower { reactance } => doc.dc = Some(DcDoc { reactance: *reactance }),
                FlowModel::Weymouth {
                    diameter_mm,
                    length_km,
                    base_temperature_k,
                    base_pressure_mpa,
                } => {
                    doc.weymouth = Some(WeymouthDoc {
                        diameter: fmt(*diameter_mm, "mm"),
                        length: fmt(*length_km, "km"),
                        base_temperature: fmt(*base_temperature_k, "K"),
                        base_pressure: fmt(*base_pressure_mpa, "MPa"),
                    })
                }
                FlowModel::Darcy { diameter_mm, length_km } => {
                    doc.darcy = Some(DarcyDoc {
                        diameter: fmt(*diameter_mm, "mm"),
                        length: fmt(*length_km, "km"),
                    })
                }
            }
            doc
        })
        .collect();

    let devices = model
        .devices
        .iter()
        .map(|d| {
            let flow_carrier = alias_carrier(&d.kind);
            let mut doc = DeviceDoc {
                id: d.id.clone(),
                node: d.node.clone(),
                f_max: fmt_amount(flow_carrier, d.f_max),
                f_min: if d.f_min == 0.0 { None } else { Some(fmt_amount(flow_carrier, d.f_min)) },
                ramp_up: d.ramp_up,
                ramp_down: d.ramp_down,
                profile: d.profile.clone(),
                reserve_factor: d.reserve_factor,
                load_reserve_factor: d.load_reserve_factor,
                initial_flow: d.initial_flow.map(|v| fmt_amount(flow_carrier, v)),
                start_stop: d.start_stop.as_ref().map(|ss| StartStopDoc {
                    prep_time: fmt_steps(ss.prep_steps),
                    cost_start: ss.cost_start,
                    cost_stop: ss.cost_stop,
                    initially_on: ss.initially_on,
                }),
                penalty: d.penalty.as_ref().map(|p| {
                    let x_carrier = p.target.map(|(c, _)| c).unwrap_or(flow_carrier);
                    PenaltyDoc {
                        points: p
                            .points
                            .iter()
                            .map(|(x, y)| (fmt_amount(x_carrier, *x), *y))
                            .collect(),
                        on_term: p.on_term,
                        prep_term: p.prep_term,
                        target: p.target.map(|(c, dir)| (c.name().to_string(), dir.name().to_string())),
                    }
                }),
                well: None,
                separator: None,
                compressor: None,
                pump: None,
                gas_turbine: None,
                heater: None,
                battery: None,
                hydrogen_storage: None,
                electrolyser: None,
                fuel_cell: None,
                source: None,
                sink: None,
            };
            match &d.kind {
                DeviceKind::Well(p) => {
                    doc.well = Some(WellDoc {
                        gas_oil_ratio: p.gas_oil_ratio,
                        water_cut: p.water_cut,
                        gas_injection_ratio: p.gas_injection_ratio,
                        injection_pressure: fmt(p.injection_pressure, "MPa"),
                        separator_pressure: fmt(p.separator_pressure, "MPa"),
                    })
                }
                DeviceKind::Separator(p) => {
                    doc.separator = Some(SeparatorDoc {
                        heat_demand_factor: p.heat_demand_factor,
                        el_demand_factor: p.el_demand_factor,
                        outlet_pressure_gas: fmt(p.outlet_pressure_gas, "MPa"),
                        outlet_pressure_oil: fmt(p.outlet_pressure_oil, "MPa"),
                        outlet_pressure_water: fmt(p.outlet_pressure_water, "MPa"),
                    })
                }
                DeviceKind::Compressor(p) => {
                    doc.compressor = Some(CompressorDoc {
                        driver: match p.driver {
                            CompressorDriver::Electric => "electric".to_string(),
                            CompressorDriver::GasTurbine => "gas-turbine".to_string(),
                        },
                        eta_is: p.eta_is,
                        heat_capacity_ratio: p.heat_capacity_ratio,
                        compressibility: p.compressibility,
                        gas_constant: p.gas_constant,
                        inlet_temperature: fmt(p.inlet_temperature_k, "K"),
                        density: fmt(p.density, "kg/m3"),
                        nominal_flow: fmt(p.nominal_flow, "Sm3/s"),
                        nominal_pressure_in: fmt(p.nominal_pressure_in, "MPa"),
                        nominal_pressure_out: fmt(p.nominal_pressure_out, "MPa"),
                    })
                }
                DeviceKind::Pump(p) => {
                    doc.pump = Some(PumpDoc {
                        carrier: p.carrier.name().to_string(),
                        efficiency: p.efficiency,
                        nominal_pressure_in: fmt(p.nominal_pressure_in, "MPa"),
                        nominal_pressure_out: fmt(p.nominal_pressure_out, "MPa"),
                    })
                }
                DeviceKind::GasTurbine(p) => {
                    doc.gas_turbine = Some(GasTurbineDoc {
                        fuel_a: p.fuel_a,
                        fuel_b: p.fuel_b,
                        eta_heat: p.eta_heat,
                    })
                }
                DeviceKind::Heater(p) => doc.heater = Some(HeaterDoc { efficiency: p.efficiency }),
                DeviceKind::Battery(p) => {
                    doc.battery = Some(BatteryDoc {
                        capacity: fmt(p.capacity, "MWh"),
                        min_level: if p.min_level == 0.0 { None } else { Some(fmt(p.min_level, "MWh")) },
                        efficiency: p.efficiency,
                        reserve_duration: fmt(p.reserve_duration_h, "h"),
                        cost_deficit: p.cost_deficit,
                        initial_level: p.initial_level.map(|v| fmt(v, "MWh")),
                        target_level: p.target_level.map(|v| fmt(v, "MWh")),
                    })
                }
                DeviceKind::HydrogenStorage(p) => {
                    doc.hydrogen_storage = Some(HydrogenStorageDoc {
                        capacity: fmt(p.capacity, "Sm3"),
                        min_level: if p.min_level == 0.0 { None } else { Some(fmt(p.min_level, "Sm3")) },
                        cost_deficit: p.cost_deficit,
                        initial_level: p.initial_level.map(|v| fmt(v, "Sm3")),
                        target_level: p.target_level.map(|v| fmt(v, "Sm3")),
                    })
                }
                DeviceKind::Electrolyser(p) => {
                    doc.electrolyser = Some(ElectrolyserDoc { eta: p.eta, eta_heat: p.eta_heat })
                }
                DeviceKind::FuelCell(p) => {
                    doc.fuel_cell = Some(FuelCellDoc { eta: p.eta, eta_heat: p.eta_heat })
                }
                DeviceKind::Source(c) => doc.source = Some(SourceSinkDoc { carrier: c.name().to_string() }),
                DeviceKind::Sink(c) => doc.sink = Some(SourceSinkDoc { carrier: c.name().to_string() }),
            }
            doc
        })
        .collect();

    ConfigDoc {
        simulation: SimulationDoc {
            timestep: fmt(config.timestep_minutes, "min"),
            horizon: fmt_steps(config.horizon_steps),
            reopt: fmt_steps(config.reopt_steps),
            nowcast: Some(fmt_steps(config.nowcast_steps)),
            duration: fmt_steps(config.duration_steps),
            reserve_min: Some(fmt(config.reserve_min, "MW")),
            emission_cap: config.emission_cap.map(|v| fmt(v, "kg/s")),
            s_base: Some(fmt(config.s_base_mva, "MVA")),
            elastic: config.elastic,
            seed: config.seed,
            solver: Some(SolverDoc {
                gap: Some(config.solver.gap),
                time_limit: config.solver.time_limit_s.map(|v| fmt(v, "s")),
            }),
        },
        carriers,
        nodes,
        edges,
        devices,
        profiles: profiles.clone(),
    }
}

/// A fully loaded and validated case, ready to simulate.
pub struct LoadedCase {
    pub doc: ConfigDoc,
    pub model: EnergySystemModel,
    pub config: SimulationConfig,
    pub profiles: TimeSeriesSet,
    /// directory of the source file, for resolving relative paths
    pub dir: PathBuf,
    /// sha256 over the normalized configuration and the profile files
    pub config_hash: String,
    pub warnings: Vec<Diagnostic>,
}

/// Parse text into a document and model without touching the file system.
/// Profile files are not resolved; used for bundle configs and validation.
pub fn parse_config(
    text: &str,
    origin: &str,
) -> Result<(ConfigDoc, EnergySystemModel, SimulationConfig), CliError> {
    let doc: ConfigDoc = toml::from_str(text)
        .map_err(|e| CliError::User(format!("{origin}: {}", e.message_with_span())))?;
    let (model, config) = doc.to_model().map_err(CliError::Validation)?;
    Ok((doc, model, config))
}

trait SpanMessage {
    fn message_with_span(&self) -> String;
}

impl SpanMessage for toml::de::Error {
    fn message_with_span(&self) -> String {
        // toml's Display already includes the line/column context
        let text = self.to_string();
        text.trim_end().replace('\n', " ")
    }
}

/// Load, convert and validate a configuration file together with the time
/// series it references.
pub fn load_config(path: &Path) -> Result<LoadedCase, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| io_at(path, e))?;
    let (doc, model, config) = parse_config(&text, &path.display().to_string())?;
    let dir = path.parent().unwrap_or(Path::new(".")).to_path_buf();

    let mut diags: Vec<Diagnostic> = Vec::new();
    let mut profiles = TimeSeriesSet::new();
    let mut profile_bytes: Vec<(String, Vec<u8>)> = Vec::new();
    for file in &doc.profiles.files {
        let full = dir.join(file);
        let bytes = std::fs::read(&full).map_err(|e| io_at(&full, e))?;
        let set = timeseries::load_timeseries(&full).map_err(|e| match e {
            CliError::User(m) => CliError::User(m),
            other => other,
        })?;
        for (name, profile) in set {
            if profiles.insert(name.clone(), profile).is_some() {
                diags.push(Diagnostic {
                    severity: Severity::Error,
                    element: file.clone(),
                    message: format!("profile '{name}' is defined by more than one file"),
                });
            }
        }
        profile_bytes.push((file.clone(), bytes));
    }

    for (name, sigma) in &doc.profiles.synthesize {
        match profiles.get_mut(name) {
            None => diags.push(Diagnostic {
                severity: Severity::Error,
                element: name.clone(),
                message: "synthesize lists a profile that no file defines".to_string(),
            }),
            Some(profile) => match &profile.nowcast {
                None => diags.push(Diagnostic {
                    severity: Severity::Error,
                    element: name.clone(),
                    message: "synthesize needs a nowcast column to derive the forecast from".to_string(),
                }),
                Some(nowcast) => match generate_forecast_from_nowcast(nowcast, *sigma, config.seed) {
                    Ok(forecast) => profile.forecast = forecast,
                    Err(e) => diags.push(Diagnostic {
                        severity: Severity::Error,
                        element: name.clone(),
                        message: e.to_string(),
                    }),
                },
            },
        }
    }
    for (name, profile) in &profiles {
        if profile.forecast.is_empty() {
            diags.push(Diagnostic {
                severity: Severity::Error,
                element: name.clone(),
                message: "profile has a nowcast but no forecast; add a forecast column or list it under profiles.synthesize".to_string(),
            });
        }
    }

    diags.extend(validate_model(&model));
    diags.extend(validate_profiles(&model, &config, &profiles));
    if has_errors(&diags) {
        return Err(CliError::Validation(diags));
    }

    let normalized = document_from(&model, &config, &doc.profiles);
    let mut hasher = Sha256::new();
    hasher.update(toml::to_string(&normalized).expect("document serializes").as_bytes());
    for (name, bytes) in &profile_bytes {
        hasher.update(name.as_bytes());
        hasher.update(bytes);
    }
    let config_hash = format!("{:x}", hasher.finalize());

    Ok(LoadedCase {
        doc: normalized,
        model,
        config,
        profiles,
        dir,
        config_hash,
        warnings: diags,
    })
}
