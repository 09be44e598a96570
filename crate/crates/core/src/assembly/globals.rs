//! Window-level rows and the objective.
//!
//! Operating-cost curves, the spinning-reserve floor, the emission-rate
//! cap, and the cost terms for commitment events, storage depletion, the
//! deterministic tie-break and elastic slack.

use crate::assembly::WindowBuilder;
use crate::lp::{LinExpr, VarId};
use crate::model::{CarrierKind, DeviceKind, FlowDir, PenaltyCurve};

/// Cost per MWh of elastic slack supply or absorption and per MW step of
/// reserve shortfall. High enough to dominate any real operating cost, low
/// enough to keep the problem well scaled.
pub const SLACK_COST: f64 = 1e6;

/// Weight of the deterministic tie-break added to every device's flow
/// alias so equivalent optima resolve the same way on every solve.
pub const TIE_BREAK: f64 = 1e-6;

pub fn emit_globals(b: &mut WindowBuilder) {
    emit_penalty_curves(b);
    emit_reserve(b);
    emit_emission_cap(b);
    emit_costs(b);
}

/// Piecewise-linear value of an operating-cost curve at one flow, used both
/// when re-accounting objectives from committed flows and in tests. Flows
/// outside the curve's range clamp to the nearest end.
pub fn evaluate_penalty(curve: &PenaltyCurve, flow: f64) -> f64 {
    let first = curve.points.first().expect("penalty curve has points");
    let last = curve.points.last().unwrap();
    let f = flow.clamp(first.0, last.0);
    for w in curve.points.windows(2) {
        let ((x0, y0), (x1, y1)) = (w[0], w[1]);
        if f <= x1 {
            return y0 + (f - x0) / (x1 - x0) * (y1 - y0);
        }
    }
    last.1
}

/// Encode each device's operating-cost curve as a convex combination of its
/// breakpoints. Curves with nondecreasing slopes stay pure LP; otherwise
/// segment binaries restrict the weights to one segment at a time.
fn emit_penalty_curves(b: &mut WindowBuilder) {
    let model = b.model;
    let dt = b.dt_h;
    for d in 0..model.devices.len() {
        let spec = &model.devices[d];
        let Some(curve) = &spec.penalty else {
            continue;
        };
        let id = &spec.id;
        let convex = curve.is_convex();
        for t in 0..b.steps {
            let flow = match curve.target {
                Some((carrier, dir)) => b.dev[d].flow(carrier, dir, t),
                None => b.dev[d].alias(t),
            };
            let mus: Vec<VarId> = (0..curve.points.len())
                .map(|i| {
                    b.problem
                        .add_continuous(format!("d_{id}_mu{i}_t{t}"), 0.0, 1.0)
                })
                .collect();
            let mut sum = LinExpr::new();
            let mut interp = LinExpr::var(flow);
            for (i, (x, y)) in curve.points.iter().enumerate() {
                sum.add(mus[i], 1.0);
                interp.add(mus[i], -x);
                b.problem.add_objective(mus[i], dt * y);
            }
            b.problem.equal(format!("d_{id}_pen_sum_t{t}"), sum, 1.0);
            b.problem.equal(format!("d_{id}_pen_flow_t{t}"), interp, 0.0);

            if !convex {
                let segments = curve.points.len() - 1;
                let segs: Vec<VarId> = (0..segments)
                    .map(|s| b.problem.add_binary(format!("d_{id}_seg{s}_t{t}")))
                    .collect();
                let mut pick = LinExpr::new();
                for &z in &segs {
                    pick.add(z, 1.0);
                }
                b.problem.equal(format!("d_{id}_pen_seg_t{t}"), pick, 1.0);
                for (i, &mu) in mus.iter().enumerate() {
                    let mut adjacent = LinExpr::var(mu);
                    if i > 0 {
                        adjacent.add(segs[i - 1], -1.0);
                    }
                    if i < segments {
                        adjacent.add(segs[i], -1.0);
                    }
                    b.problem
                        .at_most(format!("d_{id}_pen_adj{i}_t{t}"), adjacent, 0.0);
                }
            }

            // fixed cost while on or preparing, only meaningful once the
            // device has commitment binaries
            if let Some(on) = &b.dev[d].on {
                if curve.on_term != 0.0 {
                    b.problem.add_objective(on[t], dt * curve.on_term);
                }
            }
            if let Some(prep) = &b.dev[d].prep {
                if curve.prep_term != 0.0 {
                    b.problem.add_objective(prep[t], dt * curve.prep_term);
                }
            }
        }
    }
}

/// Spinning reserve: unused committed electric capacity, battery headroom
/// and sheddable load together must cover the configured floor each step.
fn emit_reserve(b: &mut WindowBuilder) {
    if b.config.reserve_min <= 0.0 {
        return;
    }
    let model = b.model;
    let slack: Option<Vec<VarId>> = if b.config.elastic {
        let vars: Vec<VarId> = (0..b.steps)
            .map(|k| {
                b.problem
                    .add_continuous(format!("g_rslack_t{k}"), 0.0, f64::INFINITY)
            })
            .collect();
        b.slack.reserve = vars.clone();
        Some(vars)
    } else {
        None
    };

    for t in 0..b.steps {
        let mut expr = LinExpr::new();
        let mut rhs = b.config.reserve_min;
        for d in 0..model.devices.len() {
            let spec = &model.devices[d];
            if spec.reserve_factor > 0.0 {
                if let Some(out) = b.dev[d].try_flow(CarrierKind::Electricity, FlowDir::Out, t) {
                    expr.add(out, -spec.reserve_factor);
                    if let Some(p_avail) = &b.dev[d].p_avail {
                        expr.add(p_avail[t], spec.reserve_factor);
                    } else {
                        let avail = spec.f_max * b.dev[d].profile[t];
                        match &b.dev[d].on {
                            Some(on) => expr.add(on[t], spec.reserve_factor * avail),
                            None => rhs -= spec.reserve_factor * avail,
                        }
                    }
                }
            }
            if spec.load_reserve_factor > 0.0 {
                if let Some(input) = b.dev[d].try_flow(CarrierKind::Electricity, FlowDir::In, t) {
                    expr.add(input, spec.load_reserve_factor);
                }
            }
        }
        if let Some(slack) = &slack {
            expr.add(slack[t], 1.0);
        }
        b.problem.at_least(format!("g_reserve_t{t}"), expr, rhs);
    }
}

/// Cap the total CO2 emission rate of gas-combusting devices each step.
fn emit_emission_cap(b: &mut WindowBuilder) {
    let Some(cap) = b.config.emission_cap else {
        return;
    };
    let model = b.model;
    let Some(gas) = &model.carriers.gas else {
        return;
    };
    let co2 = gas.co2_content;
    for t in 0..b.steps {
        let mut expr = LinExpr::new();
        for d in 0..model.devices.len() {
            if !model.devices[d].combusts_gas() {
                continue;
            }
            expr.add(b.dev[d].flow(CarrierKind::Gas, FlowDir::In, t), co2);
            if let Some(out) = b.dev[d].try_flow(CarrierKind::Gas, FlowDir::Out, t) {
                expr.add(out, -co2);
            }
        }
        if !expr.terms.is_empty() {
            b.problem.at_most(format!("g_emcap_t{t}"), expr, cap);
        }
    }
}

/// Commitment event costs, storage depletion costs, the deterministic
/// tie-break, and penalties on elastic slack.
fn emit_costs(b: &mut WindowBuilder) {
    let model = b.model;
    let dt = b.dt_h;
    for d in 0..model.devices.len() {
        let spec = &model.devices[d];
        if let (Some(ss), Some(start), Some(stop)) =
            (&spec.start_stop, &b.dev[d].start, &b.dev[d].stop)
        {
            for t in 0..b.steps {
                b.problem.add_objective(start[t], ss.cost_start);
                b.problem.add_objective(stop[t], ss.cost_stop);
            }
        }
        if let Some(deficit) = b.dev[d].deficit {
            let cost = match &spec.kind {
                DeviceKind::Battery(p) => p.cost_deficit,
                DeviceKind::HydrogenStorage(p) => p.cost_deficit,
                _ => 0.0,
            };
            if cost != 0.0 {
                b.problem.add_objective(deficit, cost);
            }
        }
        let weight = TIE_BREAK * (d as f64 + 1.0) / (spec.f_max.max(1.0) * b.steps as f64);
        for t in 0..b.steps {
            let alias = b.dev[d].alias(t);
            b.problem.add_objective(alias, weight);
        }
    }

    for (_, supply, absorb) in &b.slack.el_nodes {
        for t in 0..b.steps {
            b.problem.add_objective(supply[t], dt * SLACK_COST);
            b.problem.add_objective(absorb[t], dt * SLACK_COST);
        }
    }
    for slack in &b.slack.reserve {
        b.problem.add_objective(*slack, dt * SLACK_COST);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::assemble;
    use crate::lp::{Constraint, PlanningProblem};
    use crate::model::*;
    use crate::solver::{HighsBackend, SolverBackend};
    use approx::assert_relative_eq;

    fn leak_model(model: EnergySystemModel, config: SimulationConfig) -> crate::assembly::WindowBuilder<'static> {
        let model = Box::leak(Box::new(model));
        let config = Box::leak(Box::new(config));
        let boundary = Box::leak(Box::new(crate::assembly::BoundaryState::initial(model)));
        let profiles = TimeSeriesSet::new();
        assemble(model, config, &profiles, boundary, 0, 1).unwrap()
    }

    fn carriers() -> CarrierSet {
        CarrierSet {
            gas: Some(GasParams {
                calorific_value: 40.0,
                co2_content: 2.5,
                gravity: 0.7,
                compressibility: 0.95,
                temperature_k: 300.0,
            }),
            hydrogen_calorific_value: Some(10.8),
            oil: None,
            water: None,
        }
    }

    fn one_node() -> Vec<Node> {
        vec![Node {
            id: "n".into(),
            elevation: 0.0,
            pressure: Vec::new(),
            el_reference: false,
        }]
    }

    fn device(id: &str, kind: DeviceKind, f_max: f64) -> DeviceSpec {
        DeviceSpec {
            id: id.into(),
            node: "n".into(),
            kind,
            f_max,
            f_min: 0.0,
            ramp_up: None,
            ramp_down: None,
            profile: None,
            start_stop: None,
            reserve_factor: 0.0,
            load_reserve_factor: 0.0,
            penalty: None,
            initial_flow: None,
        }
    }

    fn curve(points: &[(f64, f64)]) -> PenaltyCurve {
        PenaltyCurve {
            points: points.to_vec(),
            on_term: 0.0,
            prep_term: 0.0,
            target: None,
        }
    }

    fn row<'p>(p: &'p PlanningProblem, name: &str) -> &'p Constraint {
        p.constraints
            .iter()
            .find(|c| c.name == name)
            .unwrap_or_else(|| panic!("no row named {name}"))
    }

    fn coeff(p: &PlanningProblem, c: &Constraint, var: &str) -> f64 {
        let id = p.var_named(var).unwrap_or_else(|| panic!("no var {var}"));
        c.expr
            .terms
            .iter()
            .filter(|(v, _)| *v == id)
            .map(|(_, c)| c)
            .sum()
    }

    fn objective_coeff(p: &PlanningProblem, var: &str) -> f64 {
        let id = p.var_named(var).unwrap_or_else(|| panic!("no var {var}"));
        p.objective
            .terms
            .iter()
            .filter(|(v, _)| *v == id)
            .map(|(_, c)| c)
            .sum()
    }

    #[test]
    fn penalty_interpolates_between_breakpoints() {
        let c = curve(&[(0.0, 0.0), (5.0, 10.0), (10.0, 30.0)]);
        assert_relative_eq!(evaluate_penalty(&c, 0.0), 0.0);
        assert_relative_eq!(evaluate_penalty(&c, 2.5), 5.0);
        assert_relative_eq!(evaluate_penalty(&c, 7.5), 20.0);
        assert_relative_eq!(evaluate_penalty(&c, 10.0), 30.0);
        assert_relative_eq!(evaluate_penalty(&c, 12.0), 30.0);
    }

    fn priced_supply_model(points: &[(f64, f64)]) -> (EnergySystemModel, SimulationConfig) {
        let mut sup = device("sup", DeviceKind::Source(CarrierKind::Electricity), 10.0);
        sup.penalty = Some(curve(points));
        let mut dem = device("dem", DeviceKind::Sink(CarrierKind::Electricity), 7.5);
        dem.f_min = 7.5;
        let model = EnergySystemModel {
            carriers: carriers(),
            nodes: one_node(),
            edges: Vec::new(),
            devices: vec![sup, dem],
        };
        let mut config = SimulationConfig::default();
        config.timestep_minutes = 60.0;
        (model, config)
    }

    #[test]
    fn convex_curve_prices_flow_by_interpolation() {
        let (model, config) = priced_supply_model(&[(0.0, 0.0), (5.0, 10.0), (10.0, 30.0)]);
        let b = leak_model(model, config);
        assert_eq!(b.problem.binary_count(), 0);
        let sol = HighsBackend::default()
            .solve(&b.problem, &Default::default())
            .expect_optimal();
        assert_relative_eq!(sol.objective, 20.0, epsilon = 1e-4);
    }

    #[test]
    fn concave_curve_cannot_shortcut_across_segments() {
        // slopes fall from 4 to 1, so a pure convex combination would claim
        // 18.75 by mixing the endpoints; the segment binaries force 22.5
        let (model, config) = priced_supply_model(&[(0.0, 0.0), (5.0, 20.0), (10.0, 25.0)]);
        let b = leak_model(model, config);
        assert!(b.problem.binary_count() > 0);
        let sol = HighsBackend::default()
            .solve(&b.problem, &Default::default())
            .expect_optimal();
        assert_relative_eq!(sol.objective, 22.5, epsilon = 1e-4);
        assert_relative_eq!(
            evaluate_penalty(&curve(&[(0.0, 0.0), (5.0, 20.0), (10.0, 25.0)]), 7.5),
            22.5
        );
    }

    #[test]
    fn reserve_counts_headroom_battery_power_and_sheddable_load() {
        let mut gt = device(
            "gt",
            DeviceKind::GasTurbine(GasTurbineParams {
                fuel_a: 2.0,
                fuel_b: 0.5,
                eta_heat: 0.0,
            }),
            20.0,
        );
        gt.reserve_factor = 1.0;
        gt.start_stop = Some(StartStop {
            prep_steps: 0,
            cost_start: 0.0,
            cost_stop: 0.0,
            initially_on: true,
        });
        let mut bat = device(
            "bat",
            DeviceKind::Battery(BatteryParams {
                capacity: 10.0,
                min_level: 0.0,
                efficiency: 0.9,
                reserve_duration_h: 0.5,
                cost_deficit: 0.0,
                initial_level: None,
                target_level: None,
            }),
            4.0,
        );
        bat.f_min = -4.0;
        bat.reserve_factor = 1.0;
        bat.load_reserve_factor = 1.0;
        let mut dem = device("dem", DeviceKind::Sink(CarrierKind::Electricity), 30.0);
        dem.load_reserve_factor = 0.5;
        let model = EnergySystemModel {
            carriers: carriers(),
            nodes: one_node(),
            edges: Vec::new(),
            devices: vec![gt, bat, dem],
        };
        let mut config = SimulationConfig::default();
        config.reserve_min = 5.0;
        let b = leak_model(model, config);

        let p = &b.problem;
        let r = row(p, "g_reserve_t0");
        assert_relative_eq!(coeff(p, r, "d_gt_on_t0"), 20.0);
        assert_relative_eq!(coeff(p, r, "d_gt_el_out_t0"), -1.0);
        assert_relative_eq!(coeff(p, r, "d_bat_pavail_t0"), 1.0);
        assert_relative_eq!(coeff(p, r, "d_bat_el_out_t0"), -1.0);
        assert_relative_eq!(coeff(p, r, "d_bat_el_in_t0"), 1.0);
        assert_relative_eq!(coeff(p, r, "d_dem_el_in_t0"), 0.5);
        assert_relative_eq!(r.lo, 5.0);
    }

    #[test]
    fn uncommitted_capacity_moves_reserve_to_the_rhs() {
        let mut wind = device("wind", DeviceKind::Source(CarrierKind::Electricity), 6.0);
        wind.reserve_factor = 0.25;
        let model = EnergySystemModel {
            carriers: carriers(),
            nodes: one_node(),
            edges: Vec::new(),
            devices: vec![wind],
        };
        let mut config = SimulationConfig::default();
        config.reserve_min = 5.0;
        let b = leak_model(model, config);
        let r = row(&b.problem, "g_reserve_t0");
        assert_relative_eq!(coeff(&b.problem, r, "d_wind_el_out_t0"), -0.25);
        // 5 minus 0.25 * 6 of always-available capacity
        assert_relative_eq!(r.lo, 3.5);
    }

    #[test]
    fn emission_cap_covers_net_gas_into_combustion() {
        let gt = device(
            "gt",
            DeviceKind::GasTurbine(GasTurbineParams {
                fuel_a: 2.0,
                fuel_b: 0.5,
                eta_heat: 0.0,
            }),
            20.0,
        );
        let burner = device(
            "boost",
            DeviceKind::Compressor(CompressorParams {
                driver: CompressorDriver::GasTurbine,
                eta_is: 0.75,
                heat_capacity_ratio: 4.0 / 3.0,
                compressibility: 0.96,
                gas_constant: 500.0,
                inlet_temperature_k: 300.0,
                density: 1.25,
                nominal_flow: 3.0,
                nominal_pressure_in: 5.0,
                nominal_pressure_out: 10.0,
            }),
            10.0,
        );
        let electric = device(
            "ecomp",
            DeviceKind::Compressor(CompressorParams {
                driver: CompressorDriver::Electric,
                eta_is: 0.75,
                heat_capacity_ratio: 4.0 / 3.0,
                compressibility: 0.96,
                gas_constant: 500.0,
                inlet_temperature_k: 300.0,
                density: 1.25,
                nominal_flow: 3.0,
                nominal_pressure_in: 5.0,
                nominal_pressure_out: 10.0,
            }),
            10.0,
        );
        let model = EnergySystemModel {
            carriers: carriers(),
            nodes: one_node(),
            edges: Vec::new(),
            devices: vec![gt, burner, electric],
        };
        let mut config = SimulationConfig::default();
        config.emission_cap = Some(1.9);
        let b = leak_model(model, config);

        let p = &b.problem;
        let r = row(p, "g_emcap_t0");
        assert_relative_eq!(coeff(p, r, "d_gt_gas_in_t0"), 2.5);
        assert_relative_eq!(coeff(p, r, "d_boost_gas_in_t0"), 2.5);
        assert_relative_eq!(coeff(p, r, "d_boost_gas_out_t0"), -2.5);
        assert_relative_eq!(coeff(p, r, "d_ecomp_gas_in_t0"), 0.0);
        assert_relative_eq!(r.hi, 1.9);
    }

    #[test]
    fn objective_carries_event_deficit_and_slack_costs() {
        let mut gt = device(
            "gt",
            DeviceKind::GasTurbine(GasTurbineParams {
                fuel_a: 2.0,
                fuel_b: 0.5,
                eta_heat: 0.0,
            }),
            20.0,
        );
        gt.reserve_factor = 1.0;
        gt.start_stop = Some(StartStop {
            prep_steps: 2,
            cost_start: 100.0,
            cost_stop: 40.0,
            initially_on: true,
        });
        let mut bat = device(
            "bat",
            DeviceKind::Battery(BatteryParams {
                capacity: 10.0,
                min_level: 0.0,
                efficiency: 0.9,
                reserve_duration_h: 0.5,
                cost_deficit: 12.0,
                initial_level: None,
                target_level: None,
            }),
            4.0,
        );
        bat.f_min = -4.0;
        let model = EnergySystemModel {
            carriers: carriers(),
            nodes: one_node(),
            edges: Vec::new(),
            devices: vec![gt, bat],
        };
        let mut config = SimulationConfig::default();
        config.elastic = true;
        config.reserve_min = 2.0;
        let b = leak_model(model, config);

        let p = &b.problem;
        assert_relative_eq!(objective_coeff(p, "d_gt_start_t0"), 100.0);
        assert_relative_eq!(objective_coeff(p, "d_gt_stop_t0"), 40.0);
        assert_relative_eq!(objective_coeff(p, "d_bat_deficit"), 12.0);
        let dt = 5.0 / 60.0;
        assert_relative_eq!(objective_coeff(p, "n_n_slack_sup_t0"), dt * 1e6);
        assert_relative_eq!(objective_coeff(p, "g_rslack_t0"), dt * 1e6);
        // tie-break prefers the lower-index device
        let gt_weight = objective_coeff(p, "d_gt_el_out_t0");
        let bat_weight = objective_coeff(p, "d_bat_el_out_t0");
        assert!(gt_weight > 0.0 && bat_weight > gt_weight);
    }
}
