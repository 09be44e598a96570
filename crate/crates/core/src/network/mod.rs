//! Node balances, terminal merging, pressure bands and flow models.
//!
//! Every node keeps separate inlet and outlet terminals per carrier. A
//! merge variable connects the two unless a process device already bridges
//! them, in which case all flow must pass through the device.

mod flow;
pub mod pipeline;

pub use pipeline::{
    darcy_coefficients, darcy_drop_linearized, darcy_flow, weymouth_coefficients,
    weymouth_flow, weymouth_linear_terms, weymouth_linearized, GasPipe, LiquidPipe,
};

use crate::assembly::WindowBuilder;
use crate::lp::LinExpr;
use crate::model::{CarrierKind, FlowDir};

pub fn emit_network(b: &mut WindowBuilder) {
    flow::emit_edges(b);
    emit_balances(b);
    apply_pressure_bands(b);
    fix_reference_angles(b);
}

fn emit_balances(b: &mut WindowBuilder) {
    let model = b.model;
    for (n, node) in model.nodes.iter().enumerate() {
        for carrier in CarrierKind::ALL {
            let dev_here: Vec<usize> = model
                .devices
                .iter()
                .enumerate()
                .filter(|(_, d)| d.node == node.id)
                .map(|(i, _)| i)
                .collect();
            let dev_in: Vec<usize> = dev_here
                .iter()
                .copied()
                .filter(|&d| b.dev[d].try_flow(carrier, FlowDir::In, 0).is_some())
                .collect();
            let dev_out: Vec<usize> = dev_here
                .iter()
                .copied()
                .filter(|&d| b.dev[d].try_flow(carrier, FlowDir::Out, 0).is_some())
                .collect();
            let edges_in: Vec<usize> = model
                .edges
                .iter()
                .enumerate()
                .filter(|(_, e)| e.carrier == carrier && e.to == node.id)
                .map(|(i, _)| i)
                .collect();
            let edges_out: Vec<usize> = model
                .edges
                .iter()
                .enumerate()
                .filter(|(_, e)| e.carrier == carrier && e.from == node.id)
                .map(|(i, _)| i)
                .collect();
            if dev_in.is_empty() && dev_out.is_empty() && edges_in.is_empty() && edges_out.is_empty()
            {
                continue;
            }

            let bridged = dev_here
                .iter()
                .any(|&d| model.devices[d].bridges_carrier(carrier));
            let id = &node.id;
            let q_term = if bridged {
                None
            } else {
                let bound = model.carrier_sanity_bound(carrier);
                let vars: Vec<_> = (0..b.steps)
                    .map(|k| {
                        b.problem.add_continuous(
                            format!("n_{id}_{carrier}_qterm_t{k}"),
                            -bound,
                            bound,
                        )
                    })
                    .collect();
                b.q_terms.insert((n, carrier), vars.clone());
                Some(vars)
            };

            let elastic = b.config.elastic && carrier == CarrierKind::Electricity;
            let slack = if elastic {
                let supply: Vec<_> = (0..b.steps)
                    .map(|k| {
                        b.problem.add_continuous(
                            format!("n_{id}_slack_sup_t{k}"),
                            0.0,
                            f64::INFINITY,
                        )
                    })
                    .collect();
                let absorb: Vec<_> = (0..b.steps)
                    .map(|k| {
                        b.problem.add_continuous(
                            format!("n_{id}_slack_abs_t{k}"),
                            0.0,
                            f64::INFINITY,
                        )
                    })
                    .collect();
                b.slack.el_nodes.push((n, supply.clone(), absorb.clone()));
                Some((supply, absorb))
            } else {
                None
            };

            for t in 0..b.steps {
                // inlet terminal: arriving edge flow net of losses covers
                // device draws and what merges onward to the outlet side
                let mut inflow = LinExpr::new();
                for &e in &edges_in {
                    inflow.add(b.edges[e].q[t], 1.0);
                    if let Some(loss) = &b.edges[e].loss_plus {
                        inflow.add(loss[t], -1.0);
                    }
                }
                for &d in &dev_in {
                    inflow.add(b.dev[d].flow(carrier, FlowDir::In, t), -1.0);
                }
                if let Some(q_term) = &q_term {
                    inflow.add(q_term[t], -1.0);
                }
                if let Some((_, absorb)) = &slack {
                    inflow.add(absorb[t], -1.0);
                }
                if !inflow.terms.is_empty() {
                    inflow = inflow.compacted();
                    if !inflow.terms.is_empty() {
                        b.problem
                            .equal(format!("n_{id}_{carrier}_in_t{t}"), inflow, 0.0);
                    }
                }

                // outlet terminal: device output plus the merged flow feeds
                // the departing edges, which also carry their reverse losses
                let mut outflow = LinExpr::new();
                for &d in &dev_out {
                    outflow.add(b.dev[d].flow(carrier, FlowDir::Out, t), 1.0);
                }
                if let Some(q_term) = &q_term {
                    outflow.add(q_term[t], 1.0);
                }
                if let Some((supply, _)) = &slack {
                    outflow.add(supply[t], 1.0);
                }
                for &e in &edges_out {
                    outflow.add(b.edges[e].q[t], -1.0);
                    if let Some(loss) = &b.edges[e].loss_minus {
                        outflow.add(loss[t], -1.0);
                    }
                }
                if !outflow.terms.is_empty() {
                    b.problem
                        .equal(format!("n_{id}_{carrier}_out_t{t}"), outflow, 0.0);
                }
            }
        }
    }
}

fn apply_pressure_bands(b: &mut WindowBuilder) {
    for (n, node) in b.model.nodes.iter().enumerate() {
        for (carrier, terminal, spec) in &node.pressure {
            let Some(vars) = b.pressures.get(&(n, *carrier, *terminal)) else {
                continue;
            };
            let deviation = spec.max_deviation.unwrap_or(0.0);
            for var in vars {
                let v = &mut b.problem.vars[var.0];
                v.lb = v.lb.max(spec.nominal * (1.0 - deviation));
                v.ub = v.ub.min(spec.nominal * (1.0 + deviation));
            }
        }
    }
}

fn fix_reference_angles(b: &mut WindowBuilder) {
    for (n, node) in b.model.nodes.iter().enumerate() {
        if !node.el_reference {
            continue;
        }
        let Some(vars) = b.angles.get(&n) else {
            continue;
        };
        for var in vars {
            b.problem.vars[var.0].lb = 0.0;
            b.problem.vars[var.0].ub = 0.0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::{BoundaryState, WindowBuilder};
    use crate::lp::check_solution;
    use crate::model::*;
    use crate::solver::{HighsBackend, SolverBackend};
    use approx::assert_relative_eq;

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
            oil: Some(LiquidParams {
                density: 850.0,
                darcy_friction: 0.02,
            }),
            water: Some(LiquidParams {
                density: 1025.0,
                darcy_friction: 0.02,
            }),
        }
    }

    fn node(id: &str) -> Node {
        Node {
            id: id.into(),
            elevation: 0.0,
            pressure: Vec::new(),
            el_reference: false,
        }
    }

    fn device(id: &str, at: &str, kind: DeviceKind, f_max: f64) -> DeviceSpec {
        DeviceSpec {
            id: id.into(),
            node: at.into(),
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

    fn transport_edge(id: &str, carrier: CarrierKind, from: &str, to: &str) -> Edge {
        Edge {
            id: id.into(),
            carrier,
            from: from.into(),
            to: to.into(),
            q_max: Some(50.0),
            bidirectional: false,
            flow_model: FlowModel::Transport,
            loss_table: None,
        }
    }

    fn build(model: &EnergySystemModel, config: &SimulationConfig, steps: usize) -> WindowBuilder<'static> {
        // leak the inputs: test models are tiny and built once per test
        let model = Box::leak(Box::new(model.clone()));
        let config = Box::leak(Box::new(config.clone()));
        let boundary = Box::leak(Box::new(BoundaryState::initial(model)));
        let profiles = TimeSeriesSet::new();
        let mut b = WindowBuilder::start(model, config, &profiles, boundary, 0, steps).unwrap();
        for d in 0..model.devices.len() {
            crate::devices::emit_device(&mut b, d);
        }
        emit_network(&mut b);
        b
    }

    fn set(b: &WindowBuilder, values: &mut [f64], name: &str, v: f64) {
        let id = b
            .problem
            .var_named(name)
            .unwrap_or_else(|| panic!("no variable named {name}"));
        values[id.0] = v;
    }

    fn clean(b: &WindowBuilder, values: &[f64]) -> bool {
        check_solution(&b.problem, values, 1e-9).is_empty()
    }

    #[test]
    fn transport_chain_balances_at_both_ends() {
        let model = EnergySystemModel {
            carriers: carriers(),
            nodes: vec![node("a"), node("b")],
            edges: vec![transport_edge("ab", CarrierKind::Gas, "a", "b")],
            devices: vec![
                device("sup", "a", DeviceKind::Source(CarrierKind::Gas), 10.0),
                device("dem", "b", DeviceKind::Sink(CarrierKind::Gas), 10.0),
            ],
        };
        let config = SimulationConfig::default();
        let b = build(&model, &config, 1);

        let mut v = vec![0.0; b.problem.vars.len()];
        set(&b, &mut v, "d_sup_gas_out_t0", 3.0);
        set(&b, &mut v, "e_ab_q_t0", 3.0);
        set(&b, &mut v, "d_dem_gas_in_t0", 3.0);
        assert!(clean(&b, &v));

        // losing flow between the terminals is caught
        set(&b, &mut v, "d_dem_gas_in_t0", 2.0);
        assert!(!clean(&b, &v));
    }

    #[test]
    fn same_node_production_feeds_consumption_through_the_merge() {
        let model = EnergySystemModel {
            carriers: carriers(),
            nodes: vec![node("hub")],
            edges: Vec::new(),
            devices: vec![
                device(
                    "gt",
                    "hub",
                    DeviceKind::GasTurbine(GasTurbineParams {
                        fuel_a: 2.0,
                        fuel_b: 0.5,
                        eta_heat: 0.0,
                    }),
                    20.0,
                ),
                device("load", "hub", DeviceKind::Sink(CarrierKind::Electricity), 20.0),
                device("fuel", "hub", DeviceKind::Source(CarrierKind::Gas), 5.0),
            ],
        };
        let config = SimulationConfig::default();
        let b = build(&model, &config, 1);

        let mut v = vec![0.0; b.problem.vars.len()];
        set(&b, &mut v, "d_gt_el_out_t0", 10.0);
        set(&b, &mut v, "d_gt_gas_in_t0", 0.75);
        set(&b, &mut v, "d_load_el_in_t0", 10.0);
        set(&b, &mut v, "d_fuel_gas_out_t0", 0.75);
        // production sits on the outlet terminal, consumption on the inlet
        // terminal, so both carriers merge outlet to inlet (negative sign)
        set(&b, &mut v, "n_hub_el_qterm_t0", -10.0);
        set(&b, &mut v, "n_hub_gas_qterm_t0", -0.75);
        assert!(clean(&b, &v));

        // dropping the merge strands both sides
        set(&b, &mut v, "n_hub_el_qterm_t0", 0.0);
        let violations = check_solution(&b.problem, &v, 1e-9);
        assert!(violations.iter().any(|x| x.element == "n_hub_el_in_t0"));
        assert!(violations.iter().any(|x| x.element == "n_hub_el_out_t0"));
    }

    #[test]
    fn convex_losses_interpolate_between_breakpoints() {
        let mut edge = transport_edge("ab", CarrierKind::Electricity, "a", "b");
        edge.loss_table = Some(vec![(0.0, 0.0), (2.0, 0.1), (4.0, 0.4)]);
        let model = EnergySystemModel {
            carriers: carriers(),
            nodes: vec![node("a"), node("b")],
            edges: vec![edge],
            devices: vec![
                device("sup", "a", DeviceKind::Source(CarrierKind::Electricity), 10.0),
                device("dem", "b", DeviceKind::Sink(CarrierKind::Electricity), 10.0),
            ],
        };
        let config = SimulationConfig::default();
        let b = build(&model, &config, 1);

        // q = 3 sits halfway between the last two breakpoints
        let mut v = vec![0.0; b.problem.vars.len()];
        set(&b, &mut v, "d_sup_el_out_t0", 3.0);
        set(&b, &mut v, "e_ab_q_t0", 3.0);
        set(&b, &mut v, "e_ab_qp_t0", 3.0);
        set(&b, &mut v, "e_ab_lp1_t0", 0.5);
        set(&b, &mut v, "e_ab_lp2_t0", 0.5);
        set(&b, &mut v, "e_ab_lossp_t0", 0.25);
        set(&b, &mut v, "d_dem_el_in_t0", 2.75);
        assert!(clean(&b, &v));

        // a cheapest-supply solve lands on the same interpolation
        let mut b = b;
        let dem = b.problem.var_named("d_dem_el_in_t0").unwrap();
        b.problem.vars[dem.0].lb = 2.75;
        let sup = b.problem.var_named("d_sup_el_out_t0").unwrap();
        b.problem.objective = crate::lp::LinExpr::var(sup);
        let outcome = HighsBackend::default().solve(&b.problem, &Default::default());
        let sol = outcome.expect_optimal();
        assert_relative_eq!(sol.values[sup.0], 3.0, epsilon = 1e-6);
    }

    fn el_grid(nodes: Vec<Node>, edges: Vec<Edge>, devices: Vec<DeviceSpec>) -> EnergySystemModel {
        EnergySystemModel {
            carriers: carriers(),
            nodes,
            edges,
            devices,
        }
    }

    #[test]
    fn dc_flow_follows_angle_difference() {
        let mut a = node("a");
        a.el_reference = true;
        let edge = Edge {
            id: "ab".into(),
            carrier: CarrierKind::Electricity,
            from: "a".into(),
            to: "b".into(),
            q_max: Some(10.0),
            bidirectional: true,
            flow_model: FlowModel::DcPower { reactance: 0.05 },
            loss_table: None,
        };
        let model = el_grid(
            vec![a, node("b")],
            vec![edge],
            vec![
                device("sup", "a", DeviceKind::Source(CarrierKind::Electricity), 10.0),
                device("dem", "b", DeviceKind::Sink(CarrierKind::Electricity), 10.0),
            ],
        );
        let config = SimulationConfig::default();
        let mut b = build(&model, &config, 1);

        let dem = b.problem.var_named("d_dem_el_in_t0").unwrap();
        b.problem.vars[dem.0].lb = 0.1;
        let sup = b.problem.var_named("d_sup_el_out_t0").unwrap();
        b.problem.objective = crate::lp::LinExpr::var(sup);
        let outcome = HighsBackend::default().solve(&b.problem, &Default::default());
        let sol = outcome.expect_optimal();
        let q = b.problem.var_named("e_ab_q_t0").unwrap();
        let theta_b = b.problem.var_named("n_b_theta_t0").unwrap();
        assert_relative_eq!(sol.values[q.0], 0.1, epsilon = 1e-9);
        // q = -(s_base / x) (theta_a - theta_b) with theta_a fixed at zero
        assert_relative_eq!(sol.values[theta_b.0], 5.0e-5, epsilon = 1e-12);
    }

    #[test]
    fn dc_ring_splits_inversely_to_reactance() {
        let mut a = node("a");
        a.el_reference = true;
        let mk = |id: &str, from: &str, to: &str, x: f64| Edge {
            id: id.into(),
            carrier: CarrierKind::Electricity,
            from: from.into(),
            to: to.into(),
            q_max: Some(10.0),
            bidirectional: true,
            flow_model: FlowModel::DcPower { reactance: x },
            loss_table: None,
        };
        let model = el_grid(
            vec![a, node("b"), node("c")],
            vec![
                mk("ab", "a", "b", 0.05),
                mk("bc", "b", "c", 0.05),
                mk("ac", "a", "c", 0.3),
            ],
            vec![
                device("sup", "a", DeviceKind::Source(CarrierKind::Electricity), 10.0),
                device("dem", "c", DeviceKind::Sink(CarrierKind::Electricity), 10.0),
            ],
        );
        let config = SimulationConfig::default();
        let mut b = build(&model, &config, 1);

        let dem = b.problem.var_named("d_dem_el_in_t0").unwrap();
        b.problem.vars[dem.0].lb = 0.3;
        let sup = b.problem.var_named("d_sup_el_out_t0").unwrap();
        b.problem.objective = crate::lp::LinExpr::var(sup);
        let sol = HighsBackend::default()
            .solve(&b.problem, &Default::default())
            .expect_optimal();
        // series path 0.1 versus direct 0.3: flows split three to one
        assert_relative_eq!(
            sol.values[b.problem.var_named("e_ab_q_t0").unwrap().0],
            0.225,
            epsilon = 1e-9
        );
        assert_relative_eq!(
            sol.values[b.problem.var_named("e_bc_q_t0").unwrap().0],
            0.225,
            epsilon = 1e-9
        );
        assert_relative_eq!(
            sol.values[b.problem.var_named("e_ac_q_t0").unwrap().0],
            0.075,
            epsilon = 1e-9
        );
    }

    fn pressured_node(
        id: &str,
        carrier: CarrierKind,
        terminal: Terminal,
        nominal: f64,
        deviation: f64,
    ) -> Node {
        Node {
            id: id.into(),
            elevation: 0.0,
            pressure: vec![(
                carrier,
                terminal,
                PressureSpec {
                    nominal,
                    max_deviation: Some(deviation),
                },
            )],
            el_reference: false,
        }
    }

    #[test]
    fn weymouth_row_ties_flow_to_terminal_pressures() {
        let edge = Edge {
            id: "pipe".into(),
            carrier: CarrierKind::Gas,
            from: "a".into(),
            to: "b".into(),
            q_max: Some(50.0),
            bidirectional: false,
            flow_model: FlowModel::Weymouth {
                diameter_mm: 250.0,
                length_km: 20.0,
                base_temperature_k: 288.15,
                base_pressure_mpa: 0.101325,
            },
            loss_table: None,
        };
        let model = EnergySystemModel {
            carriers: carriers(),
            nodes: vec![
                pressured_node("a", CarrierKind::Gas, Terminal::Out, 10.0, 0.02),
                pressured_node("b", CarrierKind::Gas, Terminal::In, 9.0, 0.02),
            ],
            edges: vec![edge],
            devices: vec![
                device("sup", "a", DeviceKind::Source(CarrierKind::Gas), 50.0),
                device("dem", "b", DeviceKind::Sink(CarrierKind::Gas), 50.0),
            ],
        };
        let config = SimulationConfig::default();
        let b = build(&model, &config, 1);

        let pipe = weymouth_coefficients(
            model.carriers.gas.as_ref().unwrap(),
            250.0,
            20.0,
            288.15,
            0.101325,
            0.0,
        );
        // at nominal pressures the row demands the nominal flow
        let q_nom = weymouth_flow(&pipe, 10.0, 9.0);
        let mut v = vec![0.0; b.problem.vars.len()];
        set(&b, &mut v, "n_a_gas_out_p_t0", 10.0);
        set(&b, &mut v, "n_b_gas_in_p_t0", 9.0);
        set(&b, &mut v, "e_pipe_q_t0", q_nom);
        set(&b, &mut v, "d_sup_gas_out_t0", q_nom);
        set(&b, &mut v, "d_dem_gas_in_t0", q_nom);
        assert!(clean(&b, &v));

        // at perturbed pressures it demands the linearized flow
        let q_lin = weymouth_linearized(&pipe, 10.0, 9.0, 10.2, 8.9);
        set(&b, &mut v, "n_a_gas_out_p_t0", 10.2);
        set(&b, &mut v, "n_b_gas_in_p_t0", 8.9);
        assert!(!clean(&b, &v));
        set(&b, &mut v, "e_pipe_q_t0", q_lin);
        set(&b, &mut v, "d_sup_gas_out_t0", q_lin);
        set(&b, &mut v, "d_dem_gas_in_t0", q_lin);
        assert!(clean(&b, &v));
    }

    #[test]
    fn darcy_row_prices_extra_flow_in_pressure_drop() {
        let edge = Edge {
            id: "line".into(),
            carrier: CarrierKind::Oil,
            from: "a".into(),
            to: "b".into(),
            q_max: Some(1.0),
            bidirectional: false,
            flow_model: FlowModel::Darcy {
                diameter_mm: 250.0,
                length_km: 7.2,
            },
            loss_table: None,
        };
        let model = EnergySystemModel {
            carriers: carriers(),
            nodes: vec![
                pressured_node("a", CarrierKind::Oil, Terminal::Out, 2.0, 0.05),
                pressured_node("b", CarrierKind::Oil, Terminal::In, 1.5, 0.05),
            ],
            edges: vec![edge],
            devices: vec![
                device("sup", "a", DeviceKind::Source(CarrierKind::Oil), 1.0),
                device("dem", "b", DeviceKind::Sink(CarrierKind::Oil), 1.0),
            ],
        };
        let config = SimulationConfig::default();
        let b = build(&model, &config, 1);

        let pipe = darcy_coefficients(model.carriers.oil.as_ref().unwrap(), 250.0, 7.2, 0.0);
        let q_nom = darcy_flow(&pipe, 2.0, 1.5);
        let mut v = vec![0.0; b.problem.vars.len()];
        set(&b, &mut v, "n_a_oil_out_p_t0", 2.0);
        set(&b, &mut v, "n_b_oil_in_p_t0", 1.5);
        set(&b, &mut v, "e_line_q_t0", q_nom);
        set(&b, &mut v, "d_sup_oil_out_t0", q_nom);
        set(&b, &mut v, "d_dem_oil_in_t0", q_nom);
        assert!(clean(&b, &v));

        // 10% more flow raises the linearized drop to 0.6 MPa
        let q = 1.1 * q_nom;
        set(&b, &mut v, "n_a_oil_out_p_t0", 2.05);
        set(&b, &mut v, "n_b_oil_in_p_t0", 1.45);
        set(&b, &mut v, "e_line_q_t0", q);
        set(&b, &mut v, "d_sup_oil_out_t0", q);
        set(&b, &mut v, "d_dem_oil_in_t0", q);
        assert!(clean(&b, &v));
        set(&b, &mut v, "n_b_oil_in_p_t0", 1.48);
        assert!(!clean(&b, &v));
    }

    #[test]
    fn pressure_bands_bound_the_terminal_pressure() {
        let model = EnergySystemModel {
            carriers: carriers(),
            nodes: vec![
                pressured_node("a", CarrierKind::Gas, Terminal::Out, 10.0, 0.02),
                pressured_node("b", CarrierKind::Gas, Terminal::In, 9.0, 0.02),
            ],
            edges: vec![Edge {
                id: "pipe".into(),
                carrier: CarrierKind::Gas,
                from: "a".into(),
                to: "b".into(),
                q_max: Some(50.0),
                bidirectional: false,
                flow_model: FlowModel::Weymouth {
                    diameter_mm: 250.0,
                    length_km: 20.0,
                    base_temperature_k: 288.15,
                    base_pressure_mpa: 0.101325,
                },
                loss_table: None,
            }],
            devices: Vec::new(),
        };
        let config = SimulationConfig::default();
        let b = build(&model, &config, 1);
        let p = b.problem.var_named("n_a_gas_out_p_t0").unwrap();
        assert_relative_eq!(b.problem.vars[p.0].lb, 9.8);
        assert_relative_eq!(b.problem.vars[p.0].ub, 10.2);
    }

    #[test]
    fn bridging_device_removes_the_terminal_merge() {
        let model = EnergySystemModel {
            carriers: carriers(),
            nodes: vec![node("proc")],
            edges: Vec::new(),
            devices: vec![device(
                "sep",
                "proc",
                DeviceKind::Separator(SeparatorParams {
                    heat_demand_factor: 0.0,
                    el_demand_factor: 0.0,
                    outlet_pressure_gas: 2.0,
                    outlet_pressure_oil: 2.0,
                    outlet_pressure_water: 2.0,
                }),
                100.0,
            )],
        };
        let config = SimulationConfig::default();
        let b = build(&model, &config, 1);
        assert!(b.problem.var_named("n_proc_oil_qterm_t0").is_none());
        assert!(b.problem.var_named("n_proc_gas_qterm_t0").is_none());
        // electricity is only drawn, never bridged, so the merge exists
        assert!(b.problem.var_named("n_proc_el_qterm_t0").is_some());
    }

    #[test]
    fn elastic_mode_adds_reported_slack_supply() {
        let model = el_grid(
            vec![node("a")],
            Vec::new(),
            vec![device("dem", "a", DeviceKind::Sink(CarrierKind::Electricity), 10.0)],
        );
        let mut config = SimulationConfig::default();
        config.elastic = true;
        let b = build(&model, &config, 1);
        assert_eq!(b.slack.el_nodes.len(), 1);

        let mut v = vec![0.0; b.problem.vars.len()];
        set(&b, &mut v, "d_dem_el_in_t0", 5.0);
        assert!(!clean(&b, &v));
        set(&b, &mut v, "n_a_slack_sup_t0", 5.0);
        set(&b, &mut v, "n_a_el_qterm_t0", -5.0);
        assert!(clean(&b, &v));
    }
}
