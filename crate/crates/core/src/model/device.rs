use super::carrier::CarrierKind;

/// Direction of a device flow relative to its node: `In` draws from the
/// node's in-terminal, `Out` feeds the node's out-terminal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FlowDir {
    In,
    Out,
}

impl FlowDir {
    pub fn name(self) -> &'static str {
        match self {
            FlowDir::In => "in",
            FlowDir::Out => "out",
        }
    }
}

/// Commitment behaviour: a device with start/stop logic carries four binary
/// decision sequences (on, prep, start, stop). A start fires `prep_steps`
/// timesteps before the device comes online; during those steps the device is
/// preparing (for gas turbines, burning fuel without producing).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StartStop {
    pub prep_steps: usize,
    pub cost_start: f64,
    pub cost_stop: f64,
    pub initially_on: bool,
}

/// Piecewise-linear operating cost as a function of one device flow.
/// `points` are (flow, penalty) breakpoints with strictly increasing flow.
/// `on_term` and `prep_term` are fixed penalties added while the device is
/// on or preparing. `target` picks which flow the curve applies to; `None`
/// means the device's generic flow alias.
#[derive(Debug, Clone, PartialEq)]
pub struct PenaltyCurve {
    pub points: Vec<(f64, f64)>,
    pub on_term: f64,
    pub prep_term: f64,
    pub target: Option<(CarrierKind, FlowDir)>,
}

impl PenaltyCurve {
    /// True if the curve's slopes are nondecreasing, which allows a pure-LP
    /// convex-combination encoding. Single-segment curves count as convex.
    pub fn is_convex(&self) -> bool {
        let slopes: Vec<f64> = self
            .points
            .windows(2)
            .map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0))
            .collect();
        slopes.windows(2).all(|s| s[1] >= s[0] - 1e-12)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WellParams {
    /// gas/oil ratio R_s (Sm3 gas per Sm3 oil)
    pub gas_oil_ratio: f64,
    /// water cut r_w in [0, 1)
    pub water_cut: f64,
    /// gas lift injection rate per unit oil produced
    pub gas_injection_ratio: f64,
    /// fixed lift gas supply pressure, MPa
    pub injection_pressure: f64,
    /// fixed wellstream delivery pressure (separator inlet), MPa
    pub separator_pressure: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeparatorParams {
    /// heat demand per unit total inflow, MW per Sm3/s
    pub heat_demand_factor: f64,
    /// electricity demand per unit total inflow, MW per Sm3/s
    pub el_demand_factor: f64,
    /// fixed outlet pressures, MPa
    pub outlet_pressure_gas: f64,
    pub outlet_pressure_oil: f64,
    pub outlet_pressure_water: f64,
}

/// What powers a compressor: an electric motor drawing from the grid, or a
/// direct-drive gas turbine taking its fuel out of the compressed stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CompressorDriver {
    Electric,
    GasTurbine,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompressorParams {
    pub driver: CompressorDriver,
    /// isentropic efficiency
    pub eta_is: f64,
    /// specific heat capacity ratio
    pub heat_capacity_ratio: f64,
    /// gas compressibility factor
    pub compressibility: f64,
    /// individual gas constant, J/(kg K)
    pub gas_constant: f64,
    /// inlet temperature, K
    pub inlet_temperature_k: f64,
    /// gas density at standard conditions, kg/m3
    pub density: f64,
    /// linearization point: nominal flow (Sm3/s) and pressures (MPa)
    pub nominal_flow: f64,
    pub nominal_pressure_in: f64,
    pub nominal_pressure_out: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PumpParams {
    pub carrier: CarrierKind,
    pub efficiency: f64,
    /// nominal suction/discharge pressures, MPa
    pub nominal_pressure_in: f64,
    pub nominal_pressure_out: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GasTurbineParams {
    /// linear fuel curve: fuel energy fraction = A * load fraction + B * (on + prep)
    pub fuel_a: f64,
    pub fuel_b: f64,
    /// share of exhaust energy recovered as heat
    pub eta_heat: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeaterParams {
    /// el-to-heat conversion factor; above 1 models a heat pump
    pub efficiency: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BatteryParams {
    /// MWh
    pub capacity: f64,
    pub min_level: f64,
    /// charge and discharge efficiency (applied on both sides)
    pub efficiency: f64,
    /// hours the rated power must be sustainable to count as reserve
    pub reserve_duration_h: f64,
    /// penalty per MWh of end-of-horizon depletion below target
    pub cost_deficit: f64,
    /// MWh at simulation start; defaults to half capacity
    pub initial_level: Option<f64>,
    /// end-of-horizon target level; defaults to the level at window start
    pub target_level: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HydrogenStorageParams {
    /// Sm3
    pub capacity: f64,
    pub min_level: f64,
    /// penalty per Sm3 of end-of-horizon depletion below target
    pub cost_deficit: f64,
    /// Sm3 at simulation start; defaults to half capacity
    pub initial_level: Option<f64>,
    /// end-of-horizon target level; defaults to the level at window start
    pub target_level: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElectrolyserParams {
    /// fraction of electric input converted to hydrogen energy
    pub eta: f64,
    /// share of conversion losses recovered as usable heat
    pub eta_heat: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FuelCellParams {
    /// fraction of hydrogen energy converted to electricity
    pub eta: f64,
    /// share of conversion losses recovered as usable heat
    pub eta_heat: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum DeviceKind {
    Well(WellParams),
    Separator(SeparatorParams),
    Compressor(CompressorParams),
    Pump(PumpParams),
    GasTurbine(GasTurbineParams),
    Heater(HeaterParams),
    Battery(BatteryParams),
    HydrogenStorage(HydrogenStorageParams),
    Electrolyser(ElectrolyserParams),
    FuelCell(FuelCellParams),
    Source(CarrierKind),
    Sink(CarrierKind),
}

impl DeviceKind {
    pub fn name(&self) -> &'static str {
        match self {
            DeviceKind::Well(_) => "well",
            DeviceKind::Separator(_) => "separator",
            DeviceKind::Compressor(_) => "compressor",
            DeviceKind::Pump(_) => "pump",
            DeviceKind::GasTurbine(_) => "gas-turbine",
            DeviceKind::Heater(_) => "heater",
            DeviceKind::Battery(_) => "battery",
            DeviceKind::HydrogenStorage(_) => "hydrogen-storage",
            DeviceKind::Electrolyser(_) => "electrolyser",
            DeviceKind::FuelCell(_) => "fuel-cell",
            DeviceKind::Source(_) => "source",
            DeviceKind::Sink(_) => "sink",
        }
    }
}

/// One device instance attached to a node.
///
/// `f_max`/`f_min` bound the device's generic flow alias (for batteries,
/// `f_min` is negative and its magnitude is the charge power limit). Ramp
/// rates are fractions of `f_max` per hour. `reserve_factor` is the share of
/// unused electric capacity counted towards spinning reserve,
/// `load_reserve_factor` the sheddable share of an electric load.
#[derive(Debug, Clone, PartialEq)]
pub struct DeviceSpec {
    pub id: String,
    pub node: String,
    pub kind: DeviceKind,
    pub f_max: f64,
    pub f_min: f64,
    pub ramp_up: Option<f64>,
    pub ramp_down: Option<f64>,
    pub profile: Option<String>,
    pub start_stop: Option<StartStop>,
    pub reserve_factor: f64,
    pub load_reserve_factor: f64,
    pub penalty: Option<PenaltyCurve>,
    /// flow alias value just before the simulation starts; defaults to 0 for
    /// offline devices and f_min for online ones
    pub initial_flow: Option<f64>,
}

impl DeviceSpec {
    /// The (carrier, direction) flow variables this device type owns.
    pub fn flows(&self) -> Vec<(CarrierKind, FlowDir)> {
        use CarrierKind::*;
        use FlowDir::*;
        match &self.kind {
            DeviceKind::Well(_) => vec![(Oil, Out), (Gas, Out), (Water, Out), (Gas, In)],
            DeviceKind::Separator(_) => vec![
                (Oil, In),
                (Gas, In),
                (Water, In),
                (Oil, Out),
                (Gas, Out),
                (Water, Out),
                (Heat, In),
                (Electricity, In),
            ],
            DeviceKind::Compressor(p) => match p.driver {
                CompressorDriver::Electric => vec![(Gas, In), (Gas, Out), (Electricity, In)],
                CompressorDriver::GasTurbine => vec![(Gas, In), (Gas, Out)],
            },
            DeviceKind::Pump(p) => vec![(p.carrier, In), (p.carrier, Out), (Electricity, In)],
            DeviceKind::GasTurbine(_) => vec![(Gas, In), (Electricity, Out), (Heat, Out)],
            DeviceKind::Heater(_) => vec![(Electricity, In), (Heat, Out)],
            DeviceKind::Battery(_) => vec![(Electricity, In), (Electricity, Out)],
            DeviceKind::HydrogenStorage(_) => vec![(Hydrogen, In), (Hydrogen, Out)],
            DeviceKind::Electrolyser(_) => vec![(Electricity, In), (Hydrogen, Out), (Heat, Out)],
            DeviceKind::FuelCell(_) => vec![(Hydrogen, In), (Electricity, Out), (Heat, Out)],
            DeviceKind::Source(c) => vec![(*c, Out)],
            DeviceKind::Sink(c) => vec![(*c, In)],
        }
    }

    /// Which flow the generic bounds and ramp limits apply to. `None` means
    /// the alias is a composite quantity that gets its own variable with a
    /// defining constraint (wells and separators).
    pub fn alias_flow(&self) -> Option<(CarrierKind, FlowDir)> {
        use CarrierKind::*;
        use FlowDir::*;
        match &self.kind {
            DeviceKind::Well(_) | DeviceKind::Separator(_) => None,
            DeviceKind::Compressor(_) => Some((Gas, Out)),
            DeviceKind::Pump(p) => Some((p.carrier, In)),
            DeviceKind::GasTurbine(_) => Some((Electricity, Out)),
            DeviceKind::Heater(_) => Some((Electricity, In)),
            DeviceKind::Battery(_) => Some((Electricity, Out)),
            DeviceKind::HydrogenStorage(_) => Some((Hydrogen, Out)),
            DeviceKind::Electrolyser(_) => Some((Electricity, In)),
            DeviceKind::FuelCell(_) => Some((Electricity, Out)),
            DeviceKind::Source(c) => Some((*c, Out)),
            DeviceKind::Sink(c) => Some((*c, In)),
        }
    }

    pub fn touches_carrier(&self, carrier: CarrierKind) -> bool {
        self.flows().iter().any(|(c, _)| *c == carrier)
    }

    pub fn is_storage(&self) -> bool {
        matches!(
            self.kind,
            DeviceKind::Battery(_) | DeviceKind::HydrogenStorage(_)
        )
    }

    /// Storages bridge a carrier's in and out terminals without a fixed
    /// throughput relation, so they do not make the carrier pass-through at
    /// their node; every other multi-terminal device does.
    pub fn bridges_carrier(&self, carrier: CarrierKind) -> bool {
        if self.is_storage() {
            return false;
        }
        let flows = self.flows();
        flows.contains(&(carrier, FlowDir::In)) && flows.contains(&(carrier, FlowDir::Out))
    }

    /// Devices that burn gas internally, counted by the emission limit.
    pub fn combusts_gas(&self) -> bool {
        match &self.kind {
            DeviceKind::GasTurbine(_) => true,
            DeviceKind::Compressor(p) => p.driver == CompressorDriver::GasTurbine,
            _ => false,
        }
    }
}
