use std::collections::{BTreeMap, BTreeSet};

use super::carrier::CarrierKind;
use super::config::SimulationConfig;
use super::device::{CompressorDriver, DeviceKind, DeviceSpec};
use super::edge::FlowModel;
use super::node::Terminal;
use super::profile::TimeSeriesSet;
use super::EnergySystemModel;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

/// One validation finding tied to the element that caused it. Diagnostics
/// are data, not failures; callers decide whether errors abort.
#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub element: String,
    pub message: String,
}

impl Diagnostic {
    fn error(element: &str, message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Error,
            element: element.to_string(),
            message: message.into(),
        }
    }

    fn warning(element: &str, message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Warning,
            element: element.to_string(),
            message: message.into(),
        }
    }
}

pub fn has_errors(diagnostics: &[Diagnostic]) -> bool {
    diagnostics.iter().any(|d| d.severity == Severity::Error)
}

fn check_unit_interval(out: &mut Vec<Diagnostic>, id: &str, name: &str, v: f64) {
    if !(0.0..=1.0).contains(&v) {
        out.push(Diagnostic::error(
            id,
            format!("{name} must lie in [0, 1], got {v}"),
        ));
    }
}

fn check_efficiency(out: &mut Vec<Diagnostic>, id: &str, name: &str, v: f64) {
    if !(v > 0.0 && v <= 1.0) {
        out.push(Diagnostic::error(
            id,
            format!("{name} must lie in (0, 1], got {v}"),
        ));
    }
}

fn check_positive(out: &mut Vec<Diagnostic>, id: &str, name: &str, v: f64) {
    if !(v > 0.0) {
        out.push(Diagnostic::error(
            id,
            format!("{name} must be positive, got {v}"),
        ));
    }
}

/// Structural validation: referential integrity, parameter ranges, and the
/// cross-element conditions constraint assembly relies on. Returns an empty
/// list exactly when the model is safe to assemble.
pub fn validate_model(model: &EnergySystemModel) -> Vec<Diagnostic> {
    let mut out = Vec::new();

    check_unique_ids(model, &mut out);
    for node in &model.nodes {
        check_node(node, &mut out);
    }
    for edge in &model.edges {
        check_edge(model, edge, &mut out);
    }
    for device in &model.devices {
        check_device(model, device, &mut out);
    }
    check_dc_references(model, &mut out);

    out
}

fn check_unique_ids(model: &EnergySystemModel, out: &mut Vec<Diagnostic>) {
    let mut seen = BTreeSet::new();
    for id in model
        .nodes
        .iter()
        .map(|n| &n.id)
        .chain(model.edges.iter().map(|e| &e.id))
        .chain(model.devices.iter().map(|d| &d.id))
    {
        if !seen.insert(id.clone()) {
            out.push(Diagnostic::error(id, "id is used more than once"));
        }
    }
}

fn check_node(node: &super::Node, out: &mut Vec<Diagnostic>) {
    let mut seen = BTreeSet::new();
    for (carrier, terminal, spec) in &node.pressure {
        if !carrier.is_fluid() {
            out.push(Diagnostic::error(
                &node.id,
                format!("pressure declared for non-fluid carrier {carrier}"),
            ));
        }
        if !seen.insert((*carrier, *terminal)) {
            out.push(Diagnostic::error(
                &node.id,
                format!("duplicate pressure entry for {carrier} {}", terminal.name()),
            ));
        }
        check_positive(out, &node.id, "nominal pressure", spec.nominal);
        if let Some(dev) = spec.max_deviation {
            check_unit_interval(out, &node.id, "max pressure deviation", dev);
        }
    }
}

fn check_edge(model: &EnergySystemModel, edge: &super::Edge, out: &mut Vec<Diagnostic>) {
    for endpoint in [&edge.from, &edge.to] {
        if model.node_index(endpoint).is_none() {
            out.push(Diagnostic::error(
                &edge.id,
                format!("references missing node '{endpoint}'"),
            ));
        }
    }
    if edge.from == edge.to {
        out.push(Diagnostic::error(&edge.id, "connects a node to itself"));
    }
    if let Some(q_max) = edge.q_max {
        check_positive(out, &edge.id, "flow limit", q_max);
    }
    match &edge.flow_model {
        FlowModel::Transport => {}
        FlowModel::DcPower { reactance } => {
            if edge.carrier != CarrierKind::Electricity {
                out.push(Diagnostic::error(
                    &edge.id,
                    "power flow model requires the electricity carrier",
                ));
            }
            if !edge.bidirectional {
                out.push(Diagnostic::error(
                    &edge.id,
                    "power flow edges must be bidirectional",
                ));
            }
            check_positive(out, &edge.id, "reactance", *reactance);
        }
        FlowModel::Weymouth {
            diameter_mm,
            length_km,
            base_temperature_k,
            base_pressure_mpa,
        } => {
            if edge.carrier != CarrierKind::Gas {
                out.push(Diagnostic::error(
                    &edge.id,
                    "gas pipeline model requires the gas carrier",
                ));
            }
            if model.carriers.gas.is_none() {
                out.push(Diagnostic::error(
                    &edge.id,
                    "gas pipeline model needs gas carrier parameters",
                ));
            }
            if edge.bidirectional {
                out.push(Diagnostic::error(
                    &edge.id,
                    "pipeline pressure models are one-directional",
                ));
            }
            check_positive(out, &edge.id, "diameter", *diameter_mm);
            check_positive(out, &edge.id, "length", *length_km);
            check_positive(out, &edge.id, "base temperature", *base_temperature_k);
            check_positive(out, &edge.id, "base pressure", *base_pressure_mpa);
            check_pipeline_nominals(model, edge, out);
        }
        FlowModel::Darcy {
            diameter_mm,
            length_km,
        } => {
            if model.carriers.liquid(edge.carrier).is_none() {
                out.push(Diagnostic::error(
                    &edge.id,
                    format!(
                        "liquid pipeline model needs density and friction for carrier {}",
                        edge.carrier
                    ),
                ));
            }
            if edge.bidirectional {
                out.push(Diagnostic::error(
                    &edge.id,
                    "pipeline pressure models are one-directional",
                ));
            }
            check_positive(out, &edge.id, "diameter", *diameter_mm);
            check_positive(out, &edge.id, "length", *length_km);
            check_pipeline_nominals(model, edge, out);
        }
    }
    if let Some(table) = &edge.loss_table {
        check_loss_table(&edge.id, table, out);
    }
}

fn check_pipeline_nominals(model: &EnergySystemModel, edge: &super::Edge, out: &mut Vec<Diagnostic>) {
    let ends = [
        (&edge.from, Terminal::Out, "from"),
        (&edge.to, Terminal::In, "to"),
    ];
    for (node_id, terminal, label) in ends {
        let Some(idx) = model.node_index(node_id) else {
            continue;
        };
        if model.nodes[idx]
            .pressure_spec(edge.carrier, terminal)
            .is_none()
        {
            out.push(Diagnostic::error(
                &edge.id,
                format!(
                    "pipeline linearization needs a nominal {} pressure at {label}-node '{node_id}'",
                    edge.carrier
                ),
            ));
        }
    }
}

fn check_loss_table(id: &str, table: &[(f64, f64)], out: &mut Vec<Diagnostic>) {
    if table.len() < 2 {
        out.push(Diagnostic::error(id, "loss table needs at least two points"));
        return;
    }
    if table[0] != (0.0, 0.0) {
        out.push(Diagnostic::error(id, "loss table must start at (0, 0)"));
    }
    if table.windows(2).any(|w| w[1].0 <= w[0].0) {
        out.push(Diagnostic::error(
            id,
            "loss table flow values must be strictly increasing",
        ));
    }
    if table.windows(2).any(|w| w[1].1 < w[0].1) {
        out.push(Diagnostic::error(id, "losses must be nondecreasing"));
    }
    let slopes: Vec<f64> = table
        .windows(2)
        .map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0))
        .collect();
    if slopes.windows(2).any(|s| s[1] < s[0] - 1e-12) {
        out.push(Diagnostic::error(
            id,
            "loss table must be convex so losses stay linearizable without binaries",
        ));
    }
}

fn check_device(model: &EnergySystemModel, device: &DeviceSpec, out: &mut Vec<Diagnostic>) {
    let id = &device.id;
    if model.node_index(&device.node).is_none() {
        out.push(Diagnostic::error(
            id,
            format!("references missing node '{}'", device.node),
        ));
    }

    if device.is_storage() {
        if device.f_min > 0.0 {
            out.push(Diagnostic::error(
                id,
                format!(
                    "storage minimum flow is the negated charge limit and must be <= 0, got {}",
                    device.f_min
                ),
            ));
        }
    } else if !(0.0 <= device.f_min && device.f_min <= device.f_max) {
        out.push(Diagnostic::error(
            id,
            format!(
                "flow bounds must satisfy 0 <= f_min <= f_max, got [{}, {}]",
                device.f_min, device.f_max
            ),
        ));
    }
    if device.f_max < 0.0 {
        out.push(Diagnostic::error(id, "maximum flow must be nonnegative"));
    }

    for (name, ramp) in [("ramp_up", device.ramp_up), ("ramp_down", device.ramp_down)] {
        if let Some(r) = ramp {
            if device.f_max == 0.0 {
                out.push(Diagnostic::error(
                    id,
                    format!("{name} set but f_max is zero, so the limit is undefined"),
                ));
            }
            check_positive(out, id, name, r);
        }
    }

    if let Some(ss) = &device.start_stop {
        if ss.cost_start < 0.0 || ss.cost_stop < 0.0 {
            out.push(Diagnostic::error(id, "start and stop costs must be nonnegative"));
        }
    }
    check_unit_interval(out, id, "reserve_factor", device.reserve_factor);
    check_unit_interval(out, id, "load_reserve_factor", device.load_reserve_factor);

    if let Some(curve) = &device.penalty {
        if curve.points.len() < 2 {
            out.push(Diagnostic::error(id, "penalty curve needs at least two points"));
        }
        if curve.points.windows(2).any(|w| w[1].0 <= w[0].0) {
            out.push(Diagnostic::error(
                id,
                "penalty breakpoint flows must be strictly increasing",
            ));
        }
        if let Some(target) = curve.target {
            if !device.flows().contains(&target) {
                out.push(Diagnostic::error(
                    id,
                    format!(
                        "penalty targets flow {} {} which this device does not have",
                        target.0,
                        target.1.name()
                    ),
                ));
            }
        } else if let (Some(first), Some(last)) = (curve.points.first(), curve.points.last()) {
            // The convex-combination encoding caps the flow at the last
            // breakpoint, so a short curve would silently derate the device.
            if first.0 > 0.0 || last.0 < device.f_max {
                out.push(Diagnostic::error(
                    id,
                    format!(
                        "penalty curve must cover the flow range [0, {}], got [{}, {}]",
                        device.f_max, first.0, last.0
                    ),
                ));
            }
        }
    }

    check_device_params(model, device, out);
}

fn check_device_params(model: &EnergySystemModel, device: &DeviceSpec, out: &mut Vec<Diagnostic>) {
    let id = &device.id;
    match &device.kind {
        DeviceKind::Well(p) => {
            if !(0.0..1.0).contains(&p.water_cut) {
                out.push(Diagnostic::error(
                    id,
                    format!("water cut must lie in [0, 1), got {}", p.water_cut),
                ));
            }
            if p.gas_oil_ratio < 0.0 {
                out.push(Diagnostic::error(id, "gas/oil ratio must be nonnegative"));
            }
            if p.gas_injection_ratio < 0.0 {
                out.push(Diagnostic::error(id, "gas injection ratio must be nonnegative"));
            }
            check_positive(out, id, "injection pressure", p.injection_pressure);
            check_positive(out, id, "separator pressure", p.separator_pressure);
        }
        DeviceKind::Separator(p) => {
            if p.heat_demand_factor < 0.0 || p.el_demand_factor < 0.0 {
                out.push(Diagnostic::error(id, "demand factors must be nonnegative"));
            }
            check_positive(out, id, "gas outlet pressure", p.outlet_pressure_gas);
            check_positive(out, id, "oil outlet pressure", p.outlet_pressure_oil);
            check_positive(out, id, "water outlet pressure", p.outlet_pressure_water);
        }
        DeviceKind::Compressor(p) => {
            check_efficiency(out, id, "isentropic efficiency", p.eta_is);
            if p.heat_capacity_ratio <= 1.0 {
                out.push(Diagnostic::error(
                    id,
                    format!(
                        "heat capacity ratio must exceed 1, got {}",
                        p.heat_capacity_ratio
                    ),
                ));
            }
            check_positive(out, id, "compressibility", p.compressibility);
            check_positive(out, id, "gas constant", p.gas_constant);
            check_positive(out, id, "inlet temperature", p.inlet_temperature_k);
            check_positive(out, id, "density", p.density);
            check_positive(out, id, "nominal inlet pressure", p.nominal_pressure_in);
            check_positive(out, id, "nominal outlet pressure", p.nominal_pressure_out);
            if p.nominal_flow < 0.0 {
                out.push(Diagnostic::error(id, "nominal flow must be nonnegative"));
            }
            check_compressor_pressures_determined(model, device, out);
            if p.driver == CompressorDriver::GasTurbine && model.carriers.gas.is_none() {
                out.push(Diagnostic::error(
                    id,
                    "gas-driven compressor needs gas carrier parameters",
                ));
            }
        }
        DeviceKind::Pump(p) => {
            if !matches!(p.carrier, CarrierKind::Oil | CarrierKind::Water) {
                out.push(Diagnostic::error(
                    id,
                    format!("pumps move oil or water, not {}", p.carrier),
                ));
            }
            check_efficiency(out, id, "pump efficiency", p.efficiency);
            if p.nominal_pressure_out <= p.nominal_pressure_in {
                out.push(Diagnostic::error(
                    id,
                    "discharge pressure must exceed suction pressure",
                ));
            }
        }
        DeviceKind::GasTurbine(p) => {
            if p.fuel_a <= 0.0 || p.fuel_b < 0.0 {
                out.push(Diagnostic::error(
                    id,
                    "fuel curve needs positive slope A and nonnegative idle term B",
                ));
            }
            check_unit_interval(out, id, "heat recovery", p.eta_heat);
            if model.carriers.gas.is_none() {
                out.push(Diagnostic::error(id, "gas turbine needs gas carrier parameters"));
            }
        }
        DeviceKind::Heater(p) => {
            check_positive(out, id, "efficiency", p.efficiency);
        }
        DeviceKind::Battery(p) => {
            if p.min_level > p.capacity {
                out.push(Diagnostic::error(
                    id,
                    format!(
                        "storage bounds must satisfy E_min <= E_max, got [{}, {}]",
                        p.min_level, p.capacity
                    ),
                ));
            }
            if p.min_level < 0.0 {
                out.push(Diagnostic::error(id, "minimum level must be nonnegative"));
            }
            check_efficiency(out, id, "charge/discharge efficiency", p.efficiency);
            check_positive(out, id, "reserve duration", p.reserve_duration_h);
            if p.cost_deficit < 0.0 {
                out.push(Diagnostic::error(id, "depletion cost must be nonnegative"));
            }
            check_level_in_bounds(out, id, "initial level", p.initial_level, p.min_level, p.capacity);
            check_level_in_bounds(out, id, "target level", p.target_level, p.min_level, p.capacity);
        }
        DeviceKind::HydrogenStorage(p) => {
            if p.min_level > p.capacity {
                out.push(Diagnostic::error(
                    id,
                    format!(
                        "storage bounds must satisfy E_min <= E_max, got [{}, {}]",
                        p.min_level, p.capacity
                    ),
                ));
            }
            if p.min_level < 0.0 {
                out.push(Diagnostic::error(id, "minimum level must be nonnegative"));
            }
            if p.cost_deficit < 0.0 {
                out.push(Diagnostic::error(id, "depletion cost must be nonnegative"));
            }
            check_level_in_bounds(out, id, "initial level", p.initial_level, p.min_level, p.capacity);
            check_level_in_bounds(out, id, "target level", p.target_level, p.min_level, p.capacity);
        }
        DeviceKind::Electrolyser(p) => {
            check_efficiency(out, id, "efficiency", p.eta);
            check_unit_interval(out, id, "heat recovery", p.eta_heat);
            if model.carriers.hydrogen_calorific_value.is_none() {
                out.push(Diagnostic::error(id, "electrolyser needs a hydrogen calorific value"));
            }
        }
        DeviceKind::FuelCell(p) => {
            check_efficiency(out, id, "efficiency", p.eta);
            check_unit_interval(out, id, "heat recovery", p.eta_heat);
            if model.carriers.hydrogen_calorific_value.is_none() {
                out.push(Diagnostic::error(id, "fuel cell needs a hydrogen calorific value"));
            }
        }
        DeviceKind::Source(_) | DeviceKind::Sink(_) => {}
    }
}

fn check_level_in_bounds(
    out: &mut Vec<Diagnostic>,
    id: &str,
    name: &str,
    level: Option<f64>,
    lo: f64,
    hi: f64,
) {
    if let Some(v) = level {
        if !(lo..=hi).contains(&v) {
            out.push(Diagnostic::error(
                id,
                format!("{name} {v} lies outside the storage bounds [{lo}, {hi}]"),
            ));
        }
    }
}

/// The compressor power linearization couples to the gas pressure variables
/// at its node, so those must be determined: either banded around a nominal
/// or set by an attached gas pipeline. Otherwise the optimizer would be free
/// to drive the pressures, and with them the power draw, anywhere.
fn check_compressor_pressures_determined(
    model: &EnergySystemModel,
    device: &DeviceSpec,
    out: &mut Vec<Diagnostic>,
) {
    let Some(node_idx) = model.node_index(&device.node) else {
        return;
    };
    let node = &model.nodes[node_idx];
    for terminal in [Terminal::In, Terminal::Out] {
        let banded = node
            .pressure_spec(CarrierKind::Gas, terminal)
            .is_some_and(|s| s.max_deviation.is_some());
        let piped = model.edges.iter().any(|e| {
            e.carrier == CarrierKind::Gas
                && matches!(e.flow_model, FlowModel::Weymouth { .. })
                && match terminal {
                    Terminal::In => e.to == node.id,
                    Terminal::Out => e.from == node.id,
                }
        });
        if !banded && !piped {
            out.push(Diagnostic::error(
                &device.id,
                format!(
                    "gas {} pressure at node '{}' is undetermined; give it a deviation band or a pipeline",
                    terminal.name(),
                    node.id
                ),
            ));
        }
    }
}

/// Voltage-angle coupling needs a reference per connected component of the
/// power-flow subgraph: none leaves angles floating, more than one
/// overconstrains them.
fn check_dc_references(model: &EnergySystemModel, out: &mut Vec<Diagnostic>) {
    let dc_edges: Vec<&super::Edge> = model
        .edges
        .iter()
        .filter(|e| matches!(e.flow_model, FlowModel::DcPower { .. }))
        .collect();
    if dc_edges.is_empty() {
        return;
    }

    let mut component: BTreeMap<&str, usize> = BTreeMap::new();
    let mut next = 0usize;
    for edge in &dc_edges {
        let a = component.get(edge.from.as_str()).copied();
        let b = component.get(edge.to.as_str()).copied();
        match (a, b) {
            (None, None) => {
                component.insert(&edge.from, next);
                component.insert(&edge.to, next);
                next += 1;
            }
            (Some(c), None) => {
                component.insert(&edge.to, c);
            }
            (None, Some(c)) => {
                component.insert(&edge.from, c);
            }
            (Some(c1), Some(c2)) if c1 != c2 => {
                for v in component.values_mut() {
                    if *v == c2 {
                        *v = c1;
                    }
                }
            }
            _ => {}
        }
    }

    let mut refs_per_component: BTreeMap<usize, usize> = BTreeMap::new();
    for (node_id, comp) in &component {
        if let Some(idx) = model.node_index(node_id) {
            if model.nodes[idx].el_reference {
                *refs_per_component.entry(*comp).or_insert(0) += 1;
            }
        }
    }
    let components: BTreeSet<usize> = component.values().copied().collect();
    for comp in components {
        let members: Vec<&str> = component
            .iter()
            .filter(|(_, c)| **c == comp)
            .map(|(n, _)| *n)
            .collect();
        match refs_per_component.get(&comp).copied().unwrap_or(0) {
            0 => out.push(Diagnostic::error(
                members[0],
                format!(
                    "power-flow subnetwork {{{}}} has no voltage angle reference node",
                    members.join(", ")
                ),
            )),
            1 => {}
            n => out.push(Diagnostic::error(
                members[0],
                format!(
                    "power-flow subnetwork {{{}}} has {n} reference nodes, expected one",
                    members.join(", ")
                ),
            )),
        }
    }
}

/// Checks that profile references resolve and that the series cover the
/// simulated span plus one full planning window, and that the configured
/// timing is internally consistent.
pub fn validate_profiles(
    model: &EnergySystemModel,
    config: &SimulationConfig,
    profiles: &TimeSeriesSet,
) -> Vec<Diagnostic> {
    let mut out = Vec::new();

    if config.timestep_minutes <= 0.0 {
        out.push(Diagnostic::error("config", "timestep must be positive"));
    }
    if config.reopt_steps < 1 || config.horizon_steps < config.reopt_steps {
        out.push(Diagnostic::error(
            "config",
            format!(
                "need horizon >= re-optimization interval >= 1, got {} and {}",
                config.horizon_steps, config.reopt_steps
            ),
        ));
    }
    if config.nowcast_steps > config.horizon_steps {
        out.push(Diagnostic::error(
            "config",
            "nowcast window cannot exceed the planning horizon",
        ));
    }
    if config.reserve_min < 0.0 {
        out.push(Diagnostic::error("config", "reserve requirement must be nonnegative"));
    }
    if let Some(cap) = config.emission_cap {
        if cap < 0.0 {
            out.push(Diagnostic::error("config", "emission cap must be nonnegative"));
        }
    }
    let max_prep = model
        .devices
        .iter()
        .filter_map(|d| d.start_stop.as_ref())
        .map(|ss| ss.prep_steps)
        .max()
        .unwrap_or(0);
    if config.horizon_steps < max_prep + 1 {
        out.push(Diagnostic::error(
            "config",
            format!(
                "planning horizon of {} steps cannot host a start delay of {max_prep} steps",
                config.horizon_steps
            ),
        ));
    }

    let needed = config.duration_steps.saturating_sub(config.reopt_steps) + config.horizon_steps;
    for device in &model.devices {
        let Some(name) = &device.profile else { continue };
        let Some(profile) = profiles.get(name) else {
            out.push(Diagnostic::error(
                &device.id,
                format!("references missing profile '{name}'"),
            ));
            continue;
        };
        if profile.forecast.len() < needed {
            out.push(Diagnostic::error(
                name,
                format!(
                    "forecast has {} steps but the simulation needs {needed}",
                    profile.forecast.len()
                ),
            ));
        }
        if let Some(nowcast) = &profile.nowcast {
            if nowcast.len() != profile.forecast.len() {
                out.push(Diagnostic::error(
                    name,
                    "nowcast and forecast lengths differ",
                ));
            }
        }
        if profile
            .forecast
            .iter()
            .chain(profile.nowcast.iter().flatten())
            .any(|v| *v < 0.0 || !v.is_finite())
        {
            out.push(Diagnostic::error(
                name,
                "profile values must be finite and nonnegative",
            ));
        }
    }

    for (name, _) in profiles.iter() {
        if !model.devices.iter().any(|d| d.profile.as_deref() == Some(name)) {
            out.push(Diagnostic::warning(
                name,
                "profile is loaded but no device references it",
            ));
        }
    }

    out
}
