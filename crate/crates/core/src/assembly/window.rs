//! Variable bookkeeping for one planning window.
//!
//! The builder allocates every variable the window needs up front, keyed by
//! model element, then hands itself to the device and network emitters. The
//! finished structure doubles as the index for reading solved values back
//! out, so assembly and extraction cannot drift apart.

use std::collections::BTreeMap;

use crate::lp::{PlanningProblem, VarId};
use crate::model::{
    profile_value, CarrierKind, DeviceSpec, EnergySystemModel, FlowDir, ProfileError,
    SimulationConfig, Terminal, TimeSeriesSet,
};

/// Carried-over operating state at a window's first step. `recent_starts`
/// holds the last `max prep_steps` start decisions, most recent last, so
/// delayed starts from before the window still take effect on schedule.
#[derive(Debug, Clone, Default)]
pub struct DeviceBoundary {
    pub on_prev: bool,
    pub recent_starts: Vec<bool>,
    /// generic flow alias value at the step before the window
    pub flow_prev: Option<f64>,
    /// storage level at the step before the window
    pub level_prev: Option<f64>,
}

#[derive(Debug, Clone, Default)]
pub struct BoundaryState {
    pub devices: Vec<DeviceBoundary>,
}

impl BoundaryState {
    /// Start-of-simulation state: commitment devices follow their configured
    /// initial flag, storages sit at their configured or half-full level,
    /// flows default to 0 when off and f_min when on.
    pub fn initial(model: &EnergySystemModel) -> Self {
        let devices = model
            .devices
            .iter()
            .map(|spec| {
                let on_prev = spec.start_stop.map(|ss| ss.initially_on).unwrap_or(true);
                let default_flow = if on_prev { spec.f_min.max(0.0) } else { 0.0 };
                DeviceBoundary {
                    on_prev,
                    recent_starts: vec![
                        false;
                        spec.start_stop.map(|ss| ss.prep_steps).unwrap_or(0)
                    ],
                    flow_prev: Some(spec.initial_flow.unwrap_or(default_flow)),
                    level_prev: initial_level(spec),
                }
            })
            .collect();
        BoundaryState { devices }
    }
}

pub fn initial_level(spec: &DeviceSpec) -> Option<f64> {
    match &spec.kind {
        crate::model::DeviceKind::Battery(p) => {
            Some(p.initial_level.unwrap_or(0.5 * p.capacity))
        }
        crate::model::DeviceKind::HydrogenStorage(p) => {
            Some(p.initial_level.unwrap_or(0.5 * p.capacity))
        }
        _ => None,
    }
}

/// Where a device's generic flow alias lives: a flow it already owns, or a
/// dedicated variable tied down by a defining constraint.
#[derive(Debug, Clone)]
pub enum AliasVars {
    Flow(CarrierKind, FlowDir),
    Defined(Vec<VarId>),
}

#[derive(Debug, Clone)]
pub struct DeviceVars {
    pub flows: Vec<((CarrierKind, FlowDir), Vec<VarId>)>,
    pub alias: AliasVars,
    pub on: Option<Vec<VarId>>,
    pub prep: Option<Vec<VarId>>,
    pub start: Option<Vec<VarId>>,
    pub stop: Option<Vec<VarId>>,
    /// storage level per step
    pub level: Option<Vec<VarId>>,
    /// battery reserve-capable power
    pub p_avail: Option<Vec<VarId>>,
    pub y_storage: Option<Vec<VarId>>,
    /// end-of-window depletion below target
    pub deficit: Option<VarId>,
    /// profile factor per window step; all ones without a profile reference
    pub profile: Vec<f64>,
}

impl DeviceVars {
    pub fn flow(&self, carrier: CarrierKind, dir: FlowDir, t: usize) -> VarId {
        self.try_flow(carrier, dir, t)
            .expect("device does not own this flow")
    }

    pub fn try_flow(&self, carrier: CarrierKind, dir: FlowDir, t: usize) -> Option<VarId> {
        self.flows
            .iter()
            .find(|((c, d), _)| *c == carrier && *d == dir)
            .map(|(_, vars)| vars[t])
    }

    pub fn alias(&self, t: usize) -> VarId {
        match &self.alias {
            AliasVars::Flow(c, d) => self.flow(*c, *d, t),
            AliasVars::Defined(vars) => vars[t],
        }
    }
}

#[derive(Debug, Clone)]
pub struct EdgeVars {
    pub q: Vec<VarId>,
    /// directional split and per-direction losses, present when the edge
    /// has a loss table
    pub q_plus: Option<Vec<VarId>>,
    pub q_minus: Option<Vec<VarId>>,
    pub loss_plus: Option<Vec<VarId>>,
    pub loss_minus: Option<Vec<VarId>>,
}

/// Elastic slack injections, tracked so reporting can surface their use.
#[derive(Debug, Clone, Default)]
pub struct SlackVars {
    /// (node index, supply vars, absorb vars)
    pub el_nodes: Vec<(usize, Vec<VarId>, Vec<VarId>)>,
    pub reserve: Vec<VarId>,
}

pub struct WindowBuilder<'a> {
    pub problem: PlanningProblem,
    pub model: &'a EnergySystemModel,
    pub config: &'a SimulationConfig,
    pub boundary: &'a BoundaryState,
    /// absolute step of the window start
    pub t0: usize,
    /// window length in steps
    pub steps: usize,
    pub dt_h: f64,
    pub dev: Vec<DeviceVars>,
    pub edges: Vec<EdgeVars>,
    /// node fluid pressures keyed by (node index, carrier, terminal)
    pub pressures: BTreeMap<(usize, CarrierKind, Terminal), Vec<VarId>>,
    /// voltage angles for nodes on power-flow edges
    pub angles: BTreeMap<usize, Vec<VarId>>,
    /// terminal-merge flows keyed by (node index, carrier)
    pub q_terms: BTreeMap<(usize, CarrierKind), Vec<VarId>>,
    pub slack: SlackVars,
}

impl<'a> WindowBuilder<'a> {
    pub fn start(
        model: &'a EnergySystemModel,
        config: &'a SimulationConfig,
        profiles: &TimeSeriesSet,
        boundary: &'a BoundaryState,
        t0: usize,
        steps: usize,
    ) -> Result<Self, ProfileError> {
        assert_eq!(boundary.devices.len(), model.devices.len());
        let mut problem = PlanningProblem::new(format!("window_t{t0}"), t0);
        let mut dev = Vec::with_capacity(model.devices.len());
        for spec in &model.devices {
            dev.push(allocate_device(&mut problem, spec, profiles, config, t0, steps)?);
        }
        Ok(WindowBuilder {
            problem,
            model,
            config,
            boundary,
            t0,
            steps,
            dt_h: config.dt_hours(),
            dev,
            edges: Vec::new(),
            pressures: BTreeMap::new(),
            angles: BTreeMap::new(),
            q_terms: BTreeMap::new(),
            slack: SlackVars::default(),
        })
    }

    /// Pressure variable for a node terminal, created on first use. Pressures
    /// are physically positive; the upper sanity bound keeps unreferenced
    /// directions from drifting without constraining any real solution.
    pub fn pressure(&mut self, node: usize, carrier: CarrierKind, terminal: Terminal, t: usize) -> VarId {
        if let Some(vars) = self.pressures.get(&(node, carrier, terminal)) {
            return vars[t];
        }
        let id = &self.model.nodes[node].id;
        let vars: Vec<VarId> = (0..self.steps)
            .map(|k| {
                self.problem.add_continuous(
                    format!("n_{id}_{carrier}_{}_p_t{k}", terminal.name()),
                    0.0,
                    1e4,
                )
            })
            .collect();
        let var = vars[t];
        self.pressures.insert((node, carrier, terminal), vars);
        var
    }

    pub fn angle(&mut self, node: usize, t: usize) -> VarId {
        if let Some(vars) = self.angles.get(&node) {
            return vars[t];
        }
        let id = &self.model.nodes[node].id;
        let vars: Vec<VarId> = (0..self.steps)
            .map(|k| {
                self.problem
                    .add_continuous(format!("n_{id}_theta_t{k}"), -1e3, 1e3)
            })
            .collect();
        let var = vars[t];
        self.angles.insert(node, vars);
        var
    }
}

fn allocate_device(
    problem: &mut PlanningProblem,
    spec: &DeviceSpec,
    profiles: &TimeSeriesSet,
    config: &SimulationConfig,
    t0: usize,
    steps: usize,
) -> Result<DeviceVars, ProfileError> {
    let id = &spec.id;
    let profile = match &spec.profile {
        Some(name) => (0..steps)
            .map(|k| profile_value(profiles, name, t0, k, config.nowcast_steps))
            .collect::<Result<Vec<f64>, _>>()?,
        None => vec![1.0; steps],
    };

    let mut flows = Vec::new();
    for (carrier, dir) in spec.flows() {
        let vars: Vec<VarId> = (0..steps)
            .map(|k| {
                problem.add_continuous(
                    format!("d_{id}_{carrier}_{}_t{k}", dir.name()),
                    0.0,
                    f64::INFINITY,
                )
            })
            .collect();
        flows.push(((carrier, dir), vars));
    }

    let alias = match spec.alias_flow() {
        Some((carrier, dir)) => AliasVars::Flow(carrier, dir),
        None => AliasVars::Defined(
            (0..steps)
                .map(|k| problem.add_continuous(format!("d_{id}_f_t{k}"), 0.0, f64::INFINITY))
                .collect(),
        ),
    };

    let (on, prep, start, stop) = if spec.start_stop.is_some() {
        let make = |problem: &mut PlanningProblem, tag: &str| -> Vec<VarId> {
            (0..steps)
                .map(|k| problem.add_binary(format!("d_{id}_{tag}_t{k}")))
                .collect()
        };
        (
            Some(make(problem, "on")),
            Some(make(problem, "prep")),
            Some(make(problem, "start")),
            Some(make(problem, "stop")),
        )
    } else {
        (None, None, None, None)
    };

    let mut level = None;
    let mut p_avail = None;
    let mut y_storage = None;
    let mut deficit = None;
    match &spec.kind {
        crate::model::DeviceKind::Battery(p) => {
            level = Some(
                (0..steps)
                    .map(|k| {
                        problem.add_continuous(format!("d_{id}_E_t{k}"), p.min_level, p.capacity)
                    })
                    .collect(),
            );
            p_avail = Some(
                (0..steps)
                    .map(|k| problem.add_continuous(format!("d_{id}_pavail_t{k}"), 0.0, f64::INFINITY))
                    .collect(),
            );
            y_storage = Some(
                (0..steps)
                    .map(|k| problem.add_binary(format!("d_{id}_ystor_t{k}")))
                    .collect(),
            );
            deficit = Some(problem.add_continuous(format!("d_{id}_deficit"), 0.0, f64::INFINITY));
        }
        crate::model::DeviceKind::HydrogenStorage(p) => {
            level = Some(
                (0..steps)
                    .map(|k| {
                        problem.add_continuous(format!("d_{id}_E_t{k}"), p.min_level, p.capacity)
                    })
                    .collect(),
            );
            deficit = Some(problem.add_continuous(format!("d_{id}_deficit"), 0.0, f64::INFINITY));
        }
        _ => {}
    }

    Ok(DeviceVars {
        flows,
        alias,
        on,
        prep,
        start,
        stop,
        level,
        p_avail,
        y_storage,
        deficit,
        profile,
    })
}
