//! Reported quantities derived from committed trajectories: emissions,
//! device usage, reserve decomposition, storage series, slack use, and the
//! independent checkers tests gate on.

use crate::assembly::{evaluate_penalty, WindowBuilder, SLACK_COST, TIE_BREAK};
use crate::devices::battery_dispatchable_power;
use crate::model::{
    CarrierKind, DeviceKind, EnergySystemModel, FlowDir, SimulationConfig, Terminal,
};
use crate::sim::SimulationResult;

/// Re-account a window's objective from solved values without reading the
/// problem's objective vector. Walks the same cost conventions the
/// assembly emits, so any drift between the two shows up as a mismatch.
pub fn reaccount_objective(b: &WindowBuilder, values: &[f64]) -> f64 {
    let model = b.model;
    let dt = b.dt_h;
    let v = |id: crate::lp::VarId| values[id.0];
    let mut total = 0.0;

    for d in 0..model.devices.len() {
        let spec = &model.devices[d];
        let dv = &b.dev[d];
        if let Some(curve) = &spec.penalty {
            for t in 0..b.steps {
                let flow = match curve.target {
                    Some((carrier, dir)) => v(dv.flow(carrier, dir, t)),
                    None => v(dv.alias(t)),
                };
                total += dt * evaluate_penalty(curve, flow);
                if let Some(on) = &dv.on {
                    if v(on[t]) > 0.5 {
                        total += dt * curve.on_term;
                    }
                }
                if let Some(prep) = &dv.prep {
                    if v(prep[t]) > 0.5 {
                        total += dt * curve.prep_term;
                    }
                }
            }
        }
        if let (Some(ss), Some(start), Some(stop)) = (&spec.start_stop, &dv.start, &dv.stop) {
            for t in 0..b.steps {
                if v(start[t]) > 0.5 {
                    total += ss.cost_start;
                }
                if v(stop[t]) > 0.5 {
                    total += ss.cost_stop;
                }
            }
        }
        if let Some(deficit) = dv.deficit {
            let cost = match &spec.kind {
                DeviceKind::Battery(p) => p.cost_deficit,
                DeviceKind::HydrogenStorage(p) => p.cost_deficit,
                _ => 0.0,
            };
            total += cost * v(deficit);
        }
        let weight = TIE_BREAK * (d as f64 + 1.0) / (spec.f_max.max(1.0) * b.steps as f64);
        for t in 0..b.steps {
            total += weight * v(dv.alias(t));
        }
    }

    for (_, supply, absorb) in &b.slack.el_nodes {
        for t in 0..b.steps {
            total += dt * SLACK_COST * (v(supply[t]) + v(absorb[t]));
        }
    }
    for slack in &b.slack.reserve {
        total += dt * SLACK_COST * v(*slack);
    }
    total
}

#[derive(Debug, Clone, PartialEq)]
pub struct BalanceViolation {
    pub t: usize,
    pub node: String,
    pub carrier: CarrierKind,
    pub terminal: Terminal,
    pub residual: f64,
}

/// Re-derive every node terminal balance from committed records by plain
/// arithmetic over the model topology. Independent of the LP: a bug that
/// emitted a wrong balance row shows up here as a nonzero residual.
pub fn check_conservation(
    model: &EnergySystemModel,
    result: &SimulationResult,
    tol: f64,
) -> Vec<BalanceViolation> {
    let mut violations = Vec::new();
    for step in &result.steps {
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
                    .filter(|&d| step.devices[d].flow(carrier, FlowDir::In).is_some())
                    .collect();
                let dev_out: Vec<usize> = dev_here
                    .iter()
                    .copied()
                    .filter(|&d| step.devices[d].flow(carrier, FlowDir::Out).is_some())
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
                if dev_in.is_empty()
                    && dev_out.is_empty()
                    && edges_in.is_empty()
                    && edges_out.is_empty()
                {
                    continue;
                }

                let q_term = step.q_terms.get(&(n, carrier)).copied();
                let elastic = carrier == CarrierKind::Electricity;
                let supply = if elastic {
                    step.slack_supply.get(&n).copied()
                } else {
                    None
                };
                let absorb = if elastic {
                    step.slack_absorb.get(&n).copied()
                } else {
                    None
                };

                let mut inflow = 0.0;
                let mut in_terms = 0;
                for &e in &edges_in {
                    inflow += step.edges[e].q - step.edges[e].loss_plus;
                    in_terms += 1;
                }
                for &d in &dev_in {
                    inflow -= step.devices[d].flow(carrier, FlowDir::In).unwrap();
                    in_terms += 1;
                }
                if let Some(q) = q_term {
                    inflow -= q;
                    in_terms += 1;
                }
                if let Some(s) = absorb {
                    inflow -= s;
                    in_terms += 1;
                }
                if in_terms > 0 && inflow.abs() > tol {
                    violations.push(BalanceViolation {
                        t: step.t,
                        node: node.id.clone(),
                        carrier,
                        terminal: Terminal::In,
                        residual: inflow,
                    });
                }

                let mut outflow = 0.0;
                let mut out_terms = 0;
                for &d in &dev_out {
                    outflow += step.devices[d].flow(carrier, FlowDir::Out).unwrap();
                    out_terms += 1;
                }
                if let Some(q) = q_term {
                    outflow += q;
                    out_terms += 1;
                }
                if let Some(s) = supply {
                    outflow += s;
                    out_terms += 1;
                }
                for &e in &edges_out {
                    outflow -= step.edges[e].q + step.edges[e].loss_minus;
                    out_terms += 1;
                }
                if out_terms > 0 && outflow.abs() > tol {
                    violations.push(BalanceViolation {
                        t: step.t,
                        node: node.id.clone(),
                        carrier,
                        terminal: Terminal::Out,
                        residual: outflow,
                    });
                }
            }
        }
    }
    violations
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeviceUsage {
    pub id: String,
    /// hours the device was on (committed devices) or flowing (others)
    pub on_hours: f64,
    pub prep_hours: f64,
    pub starts: usize,
    pub stops: usize,
    /// net gas drawn for combustion, Sm3
    pub fuel_gas_sm3: f64,
    pub co2_kg: f64,
    pub el_out_mwh: f64,
    pub el_in_mwh: f64,
    /// unused profile-scaled electric capacity of a source, MWh
    pub el_curtailed_mwh: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StorageSeries {
    pub id: String,
    /// level after each committed step, MWh or Sm3
    pub level: Vec<f64>,
    pub charged: f64,
    pub discharged: f64,
}

/// Reserve contributions per committed step, mirroring the reserve row.
#[derive(Debug, Clone, PartialEq)]
pub struct ReserveStep {
    pub committed_headroom: f64,
    pub battery_power: f64,
    pub sheddable_load: f64,
    pub slack: f64,
}

impl ReserveStep {
    pub fn total(&self) -> f64 {
        self.committed_headroom + self.battery_power + self.sheddable_load + self.slack
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KpiReport {
    pub dt_hours: f64,
    /// emission rate per committed step, kg/s
    pub co2_rate_kg_per_s: Vec<f64>,
    pub co2_total_kg: f64,
    pub oil_export_sm3: f64,
    pub gas_export_sm3: f64,
    /// emission intensity of produced oil, when any oil was exported
    pub co2_per_oil_kg_per_sm3: Option<f64>,
    pub devices: Vec<DeviceUsage>,
    pub storages: Vec<StorageSeries>,
    pub reserve: Vec<ReserveStep>,
    pub slack_supply_mwh: f64,
    pub slack_absorb_mwh: f64,
    pub reserve_slack_mwh: f64,
}

pub fn report(
    model: &EnergySystemModel,
    config: &SimulationConfig,
    result: &SimulationResult,
) -> KpiReport {
    let dt_h = config.dt_hours();
    let dt_s = dt_h * 3600.0;
    let co2_content = model.carriers.gas.as_ref().map(|g| g.co2_content).unwrap_or(0.0);

    let mut co2_rate = Vec::with_capacity(result.steps.len());
    for step in &result.steps {
        let mut rate = 0.0;
        for (d, spec) in model.devices.iter().enumerate() {
            if !spec.combusts_gas() {
                continue;
            }
            let burned = step.devices[d].flow(CarrierKind::Gas, FlowDir::In).unwrap_or(0.0)
                - step.devices[d].flow(CarrierKind::Gas, FlowDir::Out).unwrap_or(0.0);
            rate += co2_content * burned;
        }
        co2_rate.push(rate);
    }
    let co2_total_kg = co2_rate.iter().sum::<f64>() * dt_s;

    let mut oil_export_sm3 = 0.0;
    let mut gas_export_sm3 = 0.0;
    for step in &result.steps {
        for (d, spec) in model.devices.iter().enumerate() {
            match spec.kind {
                DeviceKind::Sink(CarrierKind::Oil) => {
                    oil_export_sm3 +=
                        step.devices[d].flow(CarrierKind::Oil, FlowDir::In).unwrap() * dt_s;
                }
                DeviceKind::Sink(CarrierKind::Gas) => {
                    gas_export_sm3 +=
                        step.devices[d].flow(CarrierKind::Gas, FlowDir::In).unwrap() * dt_s;
                }
                _ => {}
            }
        }
    }

    let devices = model
        .devices
        .iter()
        .enumerate()
        .map(|(d, spec)| {
            let mut usage = DeviceUsage {
                id: spec.id.clone(),
                on_hours: 0.0,
                prep_hours: 0.0,
                starts: 0,
                stops: 0,
                fuel_gas_sm3: 0.0,
                co2_kg: 0.0,
                el_out_mwh: 0.0,
                el_in_mwh: 0.0,
                el_curtailed_mwh: 0.0,
            };
            for step in &result.steps {
                let rec = &step.devices[d];
                let operating = match rec.on {
                    Some(on) => on,
                    None => rec.alias.abs() > 1e-6,
                };
                if operating {
                    usage.on_hours += dt_h;
                }
                if rec.prep == Some(true) {
                    usage.prep_hours += dt_h;
                }
                if rec.start == Some(true) {
                    usage.starts += 1;
                }
                if rec.stop == Some(true) {
                    usage.stops += 1;
                }
                if spec.combusts_gas() {
                    let burned = rec.flow(CarrierKind::Gas, FlowDir::In).unwrap_or(0.0)
                        - rec.flow(CarrierKind::Gas, FlowDir::Out).unwrap_or(0.0);
                    usage.fuel_gas_sm3 += burned * dt_s;
                }
                if let Some(el) = rec.flow(CarrierKind::Electricity, FlowDir::Out) {
                    usage.el_out_mwh += el * dt_h;
                    if matches!(spec.kind, DeviceKind::Source(CarrierKind::Electricity)) {
                        usage.el_curtailed_mwh += (spec.f_max * rec.profile - el) * dt_h;
                    }
                }
                if let Some(el) = rec.flow(CarrierKind::Electricity, FlowDir::In) {
                    usage.el_in_mwh += el * dt_h;
                }
            }
            usage.co2_kg = co2_content * usage.fuel_gas_sm3;
            usage
        })
        .collect();

    let storages = model
        .devices
        .iter()
        .enumerate()
        .filter(|(_, spec)| spec.is_storage())
        .map(|(d, spec)| {
            let (carrier, per_hour) = match spec.kind {
                DeviceKind::Battery(_) => (CarrierKind::Electricity, dt_h),
                _ => (CarrierKind::Hydrogen, dt_s),
            };
            let mut series = StorageSeries {
                id: spec.id.clone(),
                level: Vec::with_capacity(result.steps.len()),
                charged: 0.0,
                discharged: 0.0,
            };
            for step in &result.steps {
                let rec = &step.devices[d];
                series.level.push(rec.level.unwrap());
                series.charged += rec.flow(carrier, FlowDir::In).unwrap() * per_hour;
                series.discharged += rec.flow(carrier, FlowDir::Out).unwrap() * per_hour;
            }
            series
        })
        .collect();

    let reserve = result
        .steps
        .iter()
        .map(|step| {
            let mut r = ReserveStep {
                committed_headroom: 0.0,
                battery_power: 0.0,
                sheddable_load: 0.0,
                slack: step.reserve_slack,
            };
            for (d, spec) in model.devices.iter().enumerate() {
                let rec = &step.devices[d];
                if spec.reserve_factor > 0.0 {
                    if let Some(el_out) = rec.flow(CarrierKind::Electricity, FlowDir::Out) {
                        if let Some(p_avail) = rec.p_avail {
                            r.battery_power += spec.reserve_factor * (p_avail - el_out);
                        } else {
                            let committed = match rec.on {
                                Some(on) => {
                                    if on {
                                        1.0
                                    } else {
                                        0.0
                                    }
                                }
                                None => 1.0,
                            };
                            let avail = committed * spec.f_max * rec.profile;
                            r.committed_headroom += spec.reserve_factor * (avail - el_out);
                        }
                    }
                }
                if spec.load_reserve_factor > 0.0 {
                    if let Some(el_in) = rec.flow(CarrierKind::Electricity, FlowDir::In) {
                        r.sheddable_load += spec.load_reserve_factor * el_in;
                    }
                }
            }
            r
        })
        .collect();

    let mut slack_supply_mwh = 0.0;
    let mut slack_absorb_mwh = 0.0;
    let mut reserve_slack_mwh = 0.0;
    for step in &result.steps {
        slack_supply_mwh += step.slack_supply.values().sum::<f64>() * dt_h;
        slack_absorb_mwh += step.slack_absorb.values().sum::<f64>() * dt_h;
        reserve_slack_mwh += step.reserve_slack * dt_h;
    }

    KpiReport {
        dt_hours: dt_h,
        co2_total_kg,
        co2_per_oil_kg_per_sm3: if oil_export_sm3 > 0.0 {
            Some(co2_total_kg / oil_export_sm3)
        } else {
            None
        },
        co2_rate_kg_per_s: co2_rate,
        oil_export_sm3,
        gas_export_sm3,
        devices,
        storages,
        reserve,
        slack_supply_mwh,
        slack_absorb_mwh,
        reserve_slack_mwh,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CaseComparison {
    pub co2_total_kg: (f64, f64),
    pub co2_delta_kg: f64,
    /// relative change against the base case, when the base emitted
    pub co2_delta_rel: Option<f64>,
    pub starts: (usize, usize),
    pub oil_export_sm3: (f64, f64),
    pub slack_supply_mwh: (f64, f64),
}

pub fn compare_cases(base: &KpiReport, variant: &KpiReport) -> CaseComparison {
    let starts = |r: &KpiReport| r.devices.iter().map(|d| d.starts).sum();
    CaseComparison {
        co2_total_kg: (base.co2_total_kg, variant.co2_total_kg),
        co2_delta_kg: variant.co2_total_kg - base.co2_total_kg,
        co2_delta_rel: if base.co2_total_kg.abs() > 0.0 {
            Some((variant.co2_total_kg - base.co2_total_kg) / base.co2_total_kg)
        } else {
            None
        },
        starts: (starts(base), starts(variant)),
        oil_export_sm3: (base.oil_export_sm3, variant.oil_export_sm3),
        slack_supply_mwh: (base.slack_supply_mwh, variant.slack_supply_mwh),
    }
}

/// Recompute reserve-capable battery power from committed levels and check
/// the recorded values match; used by tests as an extra oracle.
pub fn check_battery_power(
    model: &EnergySystemModel,
    result: &SimulationResult,
    tol: f64,
) -> Vec<(usize, String, f64, f64)> {
    let mut mismatches = Vec::new();
    for step in &result.steps {
        for (d, spec) in model.devices.iter().enumerate() {
            let DeviceKind::Battery(p) = &spec.kind else {
                continue;
            };
            let rec = &step.devices[d];
            let (Some(level), Some(p_avail)) = (rec.level, rec.p_avail) else {
                continue;
            };
            let expected = battery_dispatchable_power(p, spec.f_max, level);
            if (p_avail - expected).abs() > tol {
                mismatches.push((step.t, spec.id.clone(), p_avail, expected));
            }
        }
    }
    mismatches
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::*;
    use crate::sim::simulate;
    use crate::solver::HighsBackend;
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
            hydrogen_calorific_value: None,
            oil: None,
            water: None,
        }
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

    fn turbine_case() -> (EnergySystemModel, SimulationConfig, TimeSeriesSet) {
        let mut gt = device(
            "gt",
            DeviceKind::GasTurbine(GasTurbineParams {
                fuel_a: 2.0,
                fuel_b: 0.5,
                eta_heat: 0.0,
            }),
            10.0,
        );
        gt.start_stop = Some(StartStop {
            prep_steps: 2,
            cost_start: 100.0,
            cost_stop: 50.0,
            initially_on: false,
        });
        gt.penalty = Some(PenaltyCurve {
            points: vec![(0.0, 0.0), (10.0, 5.0)],
            on_term: 1.0,
            prep_term: 0.0,
            target: None,
        });
        gt.reserve_factor = 1.0;
        let mut wind = device("wind", DeviceKind::Source(CarrierKind::Electricity), 2.0);
        wind.profile = Some("wind".into());
        let mut dem = device("dem", DeviceKind::Sink(CarrierKind::Electricity), 5.0);
        dem.f_min = 5.0;
        dem.profile = Some("demand".into());
        let fuel = device("fuel", DeviceKind::Source(CarrierKind::Gas), 5.0);
        let model = EnergySystemModel {
            carriers: carriers(),
            nodes: vec![Node {
                id: "n".into(),
                elevation: 0.0,
                pressure: Vec::new(),
                el_reference: false,
            }],
            edges: Vec::new(),
            devices: vec![gt, wind, dem, fuel],
        };
        let mut config = SimulationConfig::default();
        config.timestep_minutes = 60.0;
        config.horizon_steps = 4;
        config.reopt_steps = 2;
        config.duration_steps = 6;
        let mut profiles = TimeSeriesSet::new();
        profiles.insert("wind".into(), Profile::forecast_only(vec![1.0; 10]));
        profiles.insert(
            "demand".into(),
            Profile::forecast_only(vec![0.4, 0.4, 0.4, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0]),
        );
        (model, config, profiles)
    }

    #[test]
    fn emission_and_usage_totals_follow_the_committed_plan() {
        let (model, config, profiles) = turbine_case();
        let result = simulate(&model, &config, &profiles, &HighsBackend::default()).unwrap();
        let kpi = report(&model, &config, &result);

        // two prep steps at standby fuel, three on steps at 3 MW
        let prep_fuel = 0.5 * 10.0 / 40.0;
        let on_fuel = (2.0 * 3.0 + 0.5 * 10.0) / 40.0;
        let expected_rates = vec![
            0.0,
            2.5 * prep_fuel,
            2.5 * prep_fuel,
            2.5 * on_fuel,
            2.5 * on_fuel,
            2.5 * on_fuel,
        ];
        for (got, want) in kpi.co2_rate_kg_per_s.iter().zip(&expected_rates) {
            assert_relative_eq!(got, want, epsilon = 1e-6);
        }
        let expected_total = expected_rates.iter().sum::<f64>() * 3600.0;
        assert_relative_eq!(kpi.co2_total_kg, expected_total, epsilon = 1e-3);

        let gt = &kpi.devices[0];
        assert_relative_eq!(gt.on_hours, 3.0);
        assert_relative_eq!(gt.prep_hours, 2.0);
        assert_eq!(gt.starts, 1);
        assert_eq!(gt.stops, 0);
        assert_relative_eq!(gt.el_out_mwh, 9.0, epsilon = 1e-6);
        assert_relative_eq!(gt.co2_kg, expected_total, epsilon = 1e-3);

        // wind runs flat out the whole time
        let wind = &kpi.devices[1];
        assert_relative_eq!(wind.el_out_mwh, 12.0, epsilon = 1e-6);
        assert_relative_eq!(wind.el_curtailed_mwh, 0.0, epsilon = 1e-6);

        assert_relative_eq!(kpi.slack_supply_mwh, 0.0);
        assert!(kpi.co2_per_oil_kg_per_sm3.is_none());
    }

    #[test]
    fn reserve_decomposition_tracks_turbine_headroom() {
        let (model, config, profiles) = turbine_case();
        let result = simulate(&model, &config, &profiles, &HighsBackend::default()).unwrap();
        let kpi = report(&model, &config, &result);

        // off: no committed capacity; on at 3 MW of 10: headroom 7
        assert_relative_eq!(kpi.reserve[0].committed_headroom, 0.0, epsilon = 1e-6);
        assert_relative_eq!(kpi.reserve[3].committed_headroom, 7.0, epsilon = 1e-6);
        assert_relative_eq!(kpi.reserve[3].battery_power, 0.0);
        assert_relative_eq!(kpi.reserve[3].sheddable_load, 0.0);
        assert_relative_eq!(kpi.reserve[3].total(), 7.0, epsilon = 1e-6);
    }

    #[test]
    fn perturbed_record_fails_conservation() {
        let (model, config, profiles) = turbine_case();
        let mut result = simulate(&model, &config, &profiles, &HighsBackend::default()).unwrap();
        assert!(check_conservation(&model, &result, 1e-6).is_empty());

        let rec = &mut result.steps[3].devices[1];
        let el_out = rec
            .flows
            .iter()
            .position(|((c, d), _)| *c == CarrierKind::Electricity && *d == FlowDir::Out)
            .unwrap();
        rec.flows[el_out].1 += 0.5;
        let violations = check_conservation(&model, &result, 1e-6);
        assert!(!violations.is_empty());
        assert!(violations
            .iter()
            .any(|v| v.node == "n" && v.carrier == CarrierKind::Electricity));
    }

    #[test]
    fn case_comparison_reports_deltas() {
        let (model, config, profiles) = turbine_case();
        let result = simulate(&model, &config, &profiles, &HighsBackend::default()).unwrap();
        let base = report(&model, &config, &result);

        // double the wind fleet and rerun
        let mut bigger = model.clone();
        bigger.devices[1].f_max = 4.0;
        let richer = simulate(&bigger, &config, &profiles, &HighsBackend::default()).unwrap();
        let variant = report(&bigger, &config, &richer);

        let delta = compare_cases(&base, &variant);
        assert!(delta.co2_delta_kg < 0.0);
        assert!(delta.co2_delta_rel.unwrap() < 0.0);
        assert_eq!(delta.starts.0, 1);
    }
}
