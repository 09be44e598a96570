//! Rolling-horizon simulation: assemble a window, solve it, commit the
//! first steps, roll the boundary state forward, repeat.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::assembly::{assemble, BoundaryState, DeviceBoundary, WindowBuilder};
use crate::kpi::reaccount_objective;
use crate::model::{
    CarrierKind, EnergySystemModel, FlowDir, ProfileError, SimulationConfig, Terminal,
    TimeSeriesSet,
};
use crate::solver::{SolveStatus, SolverBackend};

#[derive(Debug, Error)]
pub enum SimError {
    #[error(transparent)]
    Profile(#[from] ProfileError),
    #[error("window starting at step {t0}: solver returned {status:?}")]
    Window { t0: usize, status: SolveStatus },
}

/// Solved values for one device at one committed step.
#[derive(Debug, Clone, PartialEq)]
pub struct DeviceRecord {
    pub flows: Vec<((CarrierKind, FlowDir), f64)>,
    pub alias: f64,
    pub on: Option<bool>,
    pub prep: Option<bool>,
    pub start: Option<bool>,
    pub stop: Option<bool>,
    pub level: Option<f64>,
    pub p_avail: Option<f64>,
    /// profile factor the window used at this step
    pub profile: f64,
}

impl DeviceRecord {
    pub fn flow(&self, carrier: CarrierKind, dir: FlowDir) -> Option<f64> {
        self.flows
            .iter()
            .find(|((c, d), _)| *c == carrier && *d == dir)
            .map(|(_, v)| *v)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EdgeRecord {
    pub q: f64,
    pub loss_plus: f64,
    pub loss_minus: f64,
}

/// One committed timestep of the whole system, in model element order.
#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    /// absolute step index
    pub t: usize,
    /// index of the window this step was committed from
    pub window: usize,
    pub devices: Vec<DeviceRecord>,
    pub edges: Vec<EdgeRecord>,
    /// terminal-merge flow per (node index, carrier)
    pub q_terms: BTreeMap<(usize, CarrierKind), f64>,
    pub pressures: BTreeMap<(usize, CarrierKind, Terminal), f64>,
    pub angles: BTreeMap<usize, f64>,
    /// elastic slack per node index, zero when inactive
    pub slack_supply: BTreeMap<usize, f64>,
    pub slack_absorb: BTreeMap<usize, f64>,
    pub reserve_slack: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WindowSummary {
    pub t0: usize,
    /// steps committed from this window
    pub committed: usize,
    pub objective: f64,
    /// the same objective re-accounted from solved values by independent
    /// bookkeeping; should agree with `objective` to solver tolerance
    pub objective_recomputed: f64,
    pub mip_gap: Option<f64>,
    /// end-of-window depletion below target per storage device index
    pub deficits: Vec<(usize, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationResult {
    pub steps: Vec<StepRecord>,
    pub windows: Vec<WindowSummary>,
}

pub fn simulate(
    model: &EnergySystemModel,
    config: &SimulationConfig,
    profiles: &TimeSeriesSet,
    backend: &dyn SolverBackend,
) -> Result<SimulationResult, SimError> {
    let mut steps = Vec::with_capacity(config.duration_steps);
    let mut windows = Vec::new();
    let mut boundary = BoundaryState::initial(model);
    let mut t0 = 0;

    while t0 < config.duration_steps {
        let b = assemble(model, config, profiles, &boundary, t0, config.horizon_steps)?;
        let outcome = backend.solve(&b.problem, &config.solver);
        let solution = match (&outcome.status, outcome.solution) {
            (SolveStatus::Optimal, Some(s)) => s,
            // a timeout with an incumbent is usable, just not proven optimal
            (SolveStatus::TimedOut, Some(s)) => s,
            (status, _) => {
                return Err(SimError::Window {
                    t0,
                    status: status.clone(),
                })
            }
        };

        let commit = config.reopt_steps.min(config.duration_steps - t0);
        for k in 0..commit {
            steps.push(snapshot(&b, &solution.values, windows.len(), k));
        }
        windows.push(WindowSummary {
            t0,
            committed: commit,
            objective: solution.objective,
            objective_recomputed: reaccount_objective(&b, &solution.values),
            mip_gap: outcome.mip_gap,
            deficits: (0..model.devices.len())
                .filter_map(|d| b.dev[d].deficit.map(|v| (d, solution.values[v.0])))
                .collect(),
        });

        let next = roll(&b, &solution.values, commit);
        t0 += commit;
        boundary = next;
    }

    Ok(SimulationResult { steps, windows })
}

/// Assemble the planning problem for the window that commits step `at`,
/// reproducing the boundary state the rolling simulation reaches there.
/// Earlier windows are solved with `backend` exactly as in `simulate`; the
/// returned problem itself is left unsolved.
pub fn window_problem(
    model: &EnergySystemModel,
    config: &SimulationConfig,
    profiles: &TimeSeriesSet,
    backend: &dyn SolverBackend,
    at: usize,
) -> Result<crate::lp::PlanningProblem, SimError> {
    assert!(
        at < config.duration_steps,
        "step {at} is outside the simulated span"
    );
    let mut boundary = BoundaryState::initial(model);
    let mut t0 = 0;
    loop {
        let b = assemble(model, config, profiles, &boundary, t0, config.horizon_steps)?;
        let commit = config.reopt_steps.min(config.duration_steps - t0);
        if at < t0 + commit {
            return Ok(b.problem);
        }
        let outcome = backend.solve(&b.problem, &config.solver);
        let solution = match (&outcome.status, outcome.solution) {
            (SolveStatus::Optimal, Some(s)) => s,
            (SolveStatus::TimedOut, Some(s)) => s,
            (status, _) => {
                return Err(SimError::Window {
                    t0,
                    status: status.clone(),
                })
            }
        };
        boundary = roll(&b, &solution.values, commit);
        t0 += commit;
    }
}

/// Read one window step out of the solved values into a plain record.
fn snapshot(b: &WindowBuilder, values: &[f64], window: usize, k: usize) -> StepRecord {
    let v = |id: crate::lp::VarId| values[id.0];
    let flag = |ids: &Option<Vec<crate::lp::VarId>>| ids.as_ref().map(|ids| v(ids[k]) > 0.5);

    let devices = (0..b.model.devices.len())
        .map(|d| {
            let dv = &b.dev[d];
            DeviceRecord {
                flows: dv
                    .flows
                    .iter()
                    .map(|(key, vars)| (*key, v(vars[k])))
                    .collect(),
                alias: v(dv.alias(k)),
                on: flag(&dv.on),
                prep: flag(&dv.prep),
                start: flag(&dv.start),
                stop: flag(&dv.stop),
                level: dv.level.as_ref().map(|l| v(l[k])),
                p_avail: dv.p_avail.as_ref().map(|p| v(p[k])),
                profile: dv.profile[k],
            }
        })
        .collect();

    let edges = b
        .edges
        .iter()
        .map(|ev| EdgeRecord {
            q: v(ev.q[k]),
            loss_plus: ev.loss_plus.as_ref().map(|l| v(l[k])).unwrap_or(0.0),
            loss_minus: ev.loss_minus.as_ref().map(|l| v(l[k])).unwrap_or(0.0),
        })
        .collect();

    StepRecord {
        t: b.t0 + k,
        window,
        devices,
        edges,
        q_terms: b
            .q_terms
            .iter()
            .map(|(key, vars)| (*key, v(vars[k])))
            .collect(),
        pressures: b
            .pressures
            .iter()
            .map(|(key, vars)| (*key, v(vars[k])))
            .collect(),
        angles: b.angles.iter().map(|(n, vars)| (*n, v(vars[k]))).collect(),
        slack_supply: b
            .slack
            .el_nodes
            .iter()
            .map(|(n, sup, _)| (*n, v(sup[k])))
            .collect(),
        slack_absorb: b
            .slack
            .el_nodes
            .iter()
            .map(|(n, _, abs)| (*n, v(abs[k])))
            .collect(),
        reserve_slack: b.slack.reserve.get(k).map(|id| v(*id)).unwrap_or(0.0),
    }
}

/// Boundary state for the next window after committing `commit` steps.
fn roll(b: &WindowBuilder, values: &[f64], commit: usize) -> BoundaryState {
    let last = commit - 1;
    let devices = (0..b.model.devices.len())
        .map(|d| {
            let dv = &b.dev[d];
            let old = &b.boundary.devices[d];
            let history = old.recent_starts.len();
            let mut recent_starts = old.recent_starts.clone();
            for k in 0..commit {
                recent_starts.push(match &dv.start {
                    Some(start) => values[start[k].0] > 0.5,
                    None => false,
                });
            }
            while recent_starts.len() > history {
                recent_starts.remove(0);
            }
            DeviceBoundary {
                on_prev: match &dv.on {
                    Some(on) => values[on[last].0] > 0.5,
                    None => old.on_prev,
                },
                recent_starts,
                flow_prev: Some(values[dv.alias(last).0]),
                level_prev: dv.level.as_ref().map(|l| values[l[last].0]),
            }
        })
        .collect();
    BoundaryState { devices }
}
