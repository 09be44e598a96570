//! Petroleum process devices: wells, separators, compressors and pumps.

use crate::assembly::{AliasVars, WindowBuilder};
use crate::lp::LinExpr;
use crate::model::{
    CarrierKind, CompressorDriver, CompressorParams, DeviceKind, FlowDir, PumpParams, Terminal,
    WellParams,
};

/// Composition of the total well flow: (water, oil, net gas) fractions.
/// `water_cut` is the water share of the liquid phase, `gas_oil_ratio` the
/// produced gas per unit of oil. The fractions sum to one by construction.
pub fn well_split_fractions(params: &WellParams) -> (f64, f64, f64) {
    let r_w = params.water_cut;
    let r_s = params.gas_oil_ratio;
    let denom = 1.0 + r_s * (1.0 - r_w);
    (
        r_w / denom,
        (1.0 - r_w) / denom,
        r_s * (1.0 - r_w) / denom,
    )
}

pub fn emit_well(b: &mut WindowBuilder, d: usize) {
    let model = b.model;
    let spec = &model.devices[d];
    let DeviceKind::Well(p) = &spec.kind else {
        unreachable!()
    };
    let id = &spec.id;
    let node = model.node_index(&spec.node).unwrap();
    let (frac_water, frac_oil, frac_gas) = well_split_fractions(p);

    for t in 0..b.steps {
        let f = match &b.dev[d].alias {
            AliasVars::Defined(vars) => vars[t],
            AliasVars::Flow(..) => unreachable!("well alias is a defined variable"),
        };
        let water_out = b.dev[d].flow(CarrierKind::Water, FlowDir::Out, t);
        let oil_out = b.dev[d].flow(CarrierKind::Oil, FlowDir::Out, t);
        let gas_out = b.dev[d].flow(CarrierKind::Gas, FlowDir::Out, t);
        let gas_in = b.dev[d].flow(CarrierKind::Gas, FlowDir::In, t);

        b.problem.equal(
            format!("d_{id}_split_water_t{t}"),
            LinExpr::var(water_out).term(f, -frac_water),
            0.0,
        );
        b.problem.equal(
            format!("d_{id}_split_oil_t{t}"),
            LinExpr::var(oil_out).term(f, -frac_oil),
            0.0,
        );
        b.problem.equal(
            format!("d_{id}_split_gas_t{t}"),
            LinExpr::var(gas_out).term(gas_in, -1.0).term(f, -frac_gas),
            0.0,
        );
        // lift gas drawn back down the well, proportional to oil produced
        b.problem.equal(
            format!("d_{id}_lift_t{t}"),
            LinExpr::var(gas_in).term(oil_out, -p.gas_injection_ratio),
            0.0,
        );

        // the well fixes its terminal pressures: production arrives at
        // separator pressure, lift gas is taken at injection pressure
        for carrier in [CarrierKind::Oil, CarrierKind::Gas, CarrierKind::Water] {
            let var = b.pressure(node, carrier, Terminal::Out, t);
            b.problem.vars[var.0].lb = p.separator_pressure;
            b.problem.vars[var.0].ub = p.separator_pressure;
        }
        let var = b.pressure(node, CarrierKind::Gas, Terminal::In, t);
        b.problem.vars[var.0].lb = p.injection_pressure;
        b.problem.vars[var.0].ub = p.injection_pressure;
    }
}

pub fn emit_separator(b: &mut WindowBuilder, d: usize) {
    let model = b.model;
    let spec = &model.devices[d];
    let DeviceKind::Separator(p) = &spec.kind else {
        unreachable!()
    };
    let id = &spec.id;
    let node = model.node_index(&spec.node).unwrap();

    for t in 0..b.steps {
        let f = match &b.dev[d].alias {
            AliasVars::Defined(vars) => vars[t],
            AliasVars::Flow(..) => unreachable!("separator alias is a defined variable"),
        };
        let fluids = [CarrierKind::Oil, CarrierKind::Gas, CarrierKind::Water];
        // each phase passes straight through
        for carrier in fluids {
            b.problem.equal(
                format!("d_{id}_pass_{carrier}_t{t}"),
                LinExpr::var(b.dev[d].flow(carrier, FlowDir::Out, t))
                    .term(b.dev[d].flow(carrier, FlowDir::In, t), -1.0),
                0.0,
            );
        }
        // the throughput alias is the total inflow
        let mut fdef = LinExpr::var(f);
        for carrier in fluids {
            fdef.add(b.dev[d].flow(carrier, FlowDir::In, t), -1.0);
        }
        b.problem.equal(format!("d_{id}_fdef_t{t}"), fdef, 0.0);

        // utility demand scales with throughput
        b.problem.equal(
            format!("d_{id}_heat_t{t}"),
            LinExpr::var(b.dev[d].flow(CarrierKind::Heat, FlowDir::In, t))
                .term(f, -p.heat_demand_factor),
            0.0,
        );
        b.problem.equal(
            format!("d_{id}_el_t{t}"),
            LinExpr::var(b.dev[d].flow(CarrierKind::Electricity, FlowDir::In, t))
                .term(f, -p.el_demand_factor),
            0.0,
        );

        for (carrier, pressure) in [
            (CarrierKind::Gas, p.outlet_pressure_gas),
            (CarrierKind::Oil, p.outlet_pressure_oil),
            (CarrierKind::Water, p.outlet_pressure_water),
        ] {
            let var = b.pressure(node, carrier, Terminal::Out, t);
            b.problem.vars[var.0].lb = pressure;
            b.problem.vars[var.0].ub = pressure;
        }
    }
}

/// Specific compression work coefficient in MJ per Sm3 per unit of the
/// pressure-ratio expression, from isentropic compression of a real gas.
fn work_coefficient(p: &CompressorParams) -> f64 {
    p.density * p.compressibility * p.gas_constant * p.inlet_temperature_k
        / (p.eta_is * (p.heat_capacity_ratio - 1.0))
        * 1e-6
}

fn pressure_exponent(p: &CompressorParams) -> f64 {
    (p.heat_capacity_ratio - 1.0) / p.heat_capacity_ratio
}

/// Compressor shaft power in MW for flow `q` in Sm3/s and pressures in MPa.
pub fn compressor_power(p: &CompressorParams, q: f64, p_in: f64, p_out: f64) -> f64 {
    let c = work_coefficient(p);
    let a = pressure_exponent(p);
    c * ((p_out / p_in).powf(a) - 1.0) * q
}

/// Coefficients of the power expression linearized at the nominal operating
/// point: `P = co_q * q + co_pin * p_in + co_pout * p_out`.
fn linear_coefficients(p: &CompressorParams) -> (f64, f64, f64) {
    let c = work_coefficient(p);
    let a = pressure_exponent(p);
    let ratio = p.nominal_pressure_out / p.nominal_pressure_in;
    let slope = c * a * ratio.powf(a) * p.nominal_flow;
    (
        c * (ratio.powf(a) - 1.0),
        -slope / p.nominal_pressure_in,
        slope / p.nominal_pressure_out,
    )
}

/// The linearized power used inside the planning problem, evaluated
/// directly. Matches `compressor_power` exactly at the nominal point.
pub fn compressor_power_linearized(p: &CompressorParams, q: f64, p_in: f64, p_out: f64) -> f64 {
    let (co_q, co_pin, co_pout) = linear_coefficients(p);
    co_q * q + co_pin * p_in + co_pout * p_out
}

pub fn emit_compressor(b: &mut WindowBuilder, d: usize) {
    let model = b.model;
    let spec = &model.devices[d];
    let DeviceKind::Compressor(p) = &spec.kind else {
        unreachable!()
    };
    let id = spec.id.clone();
    let node = model.node_index(&spec.node).unwrap();
    let (co_q, co_pin, co_pout) = linear_coefficients(p);
    let driver = p.driver;
    let calorific = model
        .carriers
        .gas
        .as_ref()
        .map(|g| g.calorific_value)
        .unwrap_or(f64::NAN);

    for t in 0..b.steps {
        let gas_in = b.dev[d].flow(CarrierKind::Gas, FlowDir::In, t);
        let gas_out = b.dev[d].flow(CarrierKind::Gas, FlowDir::Out, t);
        let p_in = b.pressure(node, CarrierKind::Gas, Terminal::In, t);
        let p_out = b.pressure(node, CarrierKind::Gas, Terminal::Out, t);

        match driver {
            CompressorDriver::Electric => {
                b.problem.equal(
                    format!("d_{id}_pass_t{t}"),
                    LinExpr::var(gas_out).term(gas_in, -1.0),
                    0.0,
                );
                let el_in = b.dev[d].flow(CarrierKind::Electricity, FlowDir::In, t);
                b.problem.equal(
                    format!("d_{id}_power_t{t}"),
                    LinExpr::var(el_in)
                        .term(gas_out, -co_q)
                        .term(p_in, -co_pin)
                        .term(p_out, -co_pout),
                    0.0,
                );
            }
            CompressorDriver::GasTurbine => {
                // part of the inflow is burnt to drive the shaft
                b.problem.equal(
                    format!("d_{id}_fuel_t{t}"),
                    LinExpr::var(gas_in)
                        .term(gas_out, -1.0 - co_q / calorific)
                        .term(p_in, -co_pin / calorific)
                        .term(p_out, -co_pout / calorific),
                    0.0,
                );
            }
        }
    }
}

/// Pump power in MW: pressure lift in MPa times flow in Sm3/s over the
/// efficiency, using the nominal pressures.
pub fn pump_power(p: &PumpParams, q: f64) -> f64 {
    (p.nominal_pressure_out - p.nominal_pressure_in) * q / p.efficiency
}

pub fn emit_pump(b: &mut WindowBuilder, d: usize) {
    let model = b.model;
    let spec = &model.devices[d];
    let DeviceKind::Pump(p) = &spec.kind else {
        unreachable!()
    };
    let id = spec.id.clone();
    let coeff = (p.nominal_pressure_out - p.nominal_pressure_in) / p.efficiency;
    let carrier = p.carrier;

    for t in 0..b.steps {
        let q_in = b.dev[d].flow(carrier, FlowDir::In, t);
        let q_out = b.dev[d].flow(carrier, FlowDir::Out, t);
        let el_in = b.dev[d].flow(CarrierKind::Electricity, FlowDir::In, t);
        b.problem.equal(
            format!("d_{id}_pass_t{t}"),
            LinExpr::var(q_out).term(q_in, -1.0),
            0.0,
        );
        b.problem.equal(
            format!("d_{id}_power_t{t}"),
            LinExpr::var(el_in).term(q_in, -coeff),
            0.0,
        );
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::BoundaryState;
    use crate::devices::harness::*;
    use crate::model::*;
    use approx::assert_relative_eq;

    fn leogo_well() -> WellParams {
        WellParams {
            gas_oil_ratio: 500.0,
            water_cut: 0.6,
            gas_injection_ratio: 0.1,
            injection_pressure: 25.0,
            separator_pressure: 2.5,
        }
    }

    #[test]
    fn well_fractions_match_field_composition() {
        // water cut 0.6 with gas-oil ratio 500 gives a 201 denominator
        let (water, oil, gas) = well_split_fractions(&leogo_well());
        assert_relative_eq!(water, 0.6 / 201.0, epsilon = 1e-15);
        assert_relative_eq!(oil, 0.4 / 201.0, epsilon = 1e-15);
        assert_relative_eq!(gas, 200.0 / 201.0, epsilon = 1e-15);
        assert_relative_eq!(water + oil + gas, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn well_fractions_sum_to_one_elsewhere() {
        let p = WellParams {
            gas_oil_ratio: 100.0,
            water_cut: 0.25,
            gas_injection_ratio: 0.0,
            injection_pressure: 20.0,
            separator_pressure: 3.0,
        };
        let (water, oil, gas) = well_split_fractions(&p);
        assert_relative_eq!(water, 0.25 / 76.0, epsilon = 1e-15);
        assert_relative_eq!(oil, 0.75 / 76.0, epsilon = 1e-15);
        assert_relative_eq!(gas, 75.0 / 76.0, epsilon = 1e-15);
        assert_relative_eq!(water + oil + gas, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn well_rows_split_total_flow_and_draw_lift_gas() {
        let spec = bare_spec("w1", DeviceKind::Well(leogo_well()), 500.0);
        let model = model_around(spec);
        let config = SimulationConfig::default();
        let boundary = BoundaryState::initial(&model);
        let problem = window_for(&model, &config, &boundary, 1);

        let mut p = Point::zeros(&problem);
        // total flow 201 splits into 0.6 water, 0.4 oil, 200 net gas;
        // lift gas adds 10% of the oil rate on both gas terminals
        p.set(&problem, "d_w1_f_t0", 201.0)
            .set(&problem, "d_w1_water_out_t0", 0.6)
            .set(&problem, "d_w1_oil_out_t0", 0.4)
            .set(&problem, "d_w1_gas_in_t0", 0.04)
            .set(&problem, "d_w1_gas_out_t0", 200.04)
            .set(&problem, "n_n1_oil_out_p_t0", 2.5)
            .set(&problem, "n_n1_gas_out_p_t0", 2.5)
            .set(&problem, "n_n1_water_out_p_t0", 2.5)
            .set(&problem, "n_n1_gas_in_p_t0", 25.0);
        assert!(residual_free(&problem, &p));

        // breaking the split is caught
        p.set(&problem, "d_w1_oil_out_t0", 0.5);
        assert!(!residual_free(&problem, &p));
    }

    #[test]
    fn separator_passes_phases_and_draws_utilities() {
        let spec = bare_spec(
            "sep",
            DeviceKind::Separator(SeparatorParams {
                heat_demand_factor: 0.02,
                el_demand_factor: 0.01,
                outlet_pressure_gas: 2.0,
                outlet_pressure_oil: 1.8,
                outlet_pressure_water: 1.5,
            }),
            100.0,
        );
        let model = model_around(spec);
        let config = SimulationConfig::default();
        let boundary = BoundaryState::initial(&model);
        let problem = window_for(&model, &config, &boundary, 1);

        let mut p = Point::zeros(&problem);
        p.set(&problem, "d_sep_oil_in_t0", 2.0)
            .set(&problem, "d_sep_gas_in_t0", 3.0)
            .set(&problem, "d_sep_water_in_t0", 4.0)
            .set(&problem, "d_sep_oil_out_t0", 2.0)
            .set(&problem, "d_sep_gas_out_t0", 3.0)
            .set(&problem, "d_sep_water_out_t0", 4.0)
            .set(&problem, "d_sep_f_t0", 9.0)
            .set(&problem, "d_sep_heat_in_t0", 0.18)
            .set(&problem, "d_sep_el_in_t0", 0.09)
            .set(&problem, "n_n1_gas_out_p_t0", 2.0)
            .set(&problem, "n_n1_oil_out_p_t0", 1.8)
            .set(&problem, "n_n1_water_out_p_t0", 1.5);
        assert!(residual_free(&problem, &p));

        p.set(&problem, "d_sep_heat_in_t0", 0.2);
        assert!(!residual_free(&problem, &p));
    }

    fn quarter_exponent_compressor(driver: CompressorDriver) -> CompressorParams {
        // heat capacity ratio 4/3 gives pressure exponent 1/4, and the
        // chosen density and efficiency give a 0.72 MJ/Sm3 coefficient
        CompressorParams {
            driver,
            eta_is: 0.75,
            heat_capacity_ratio: 4.0 / 3.0,
            compressibility: 0.96,
            gas_constant: 500.0,
            inlet_temperature_k: 300.0,
            density: 1.25,
            nominal_flow: 3.0,
            nominal_pressure_in: 5.0,
            nominal_pressure_out: 10.0,
        }
    }

    #[test]
    fn compressor_power_matches_hand_computation() {
        let p = quarter_exponent_compressor(CompressorDriver::Electric);
        // c = 1.25 * 0.96 * 500 * 300 / (0.75 * 1/3) * 1e-6 = 0.72 MJ/Sm3,
        // doubling the pressure with exponent 1/4 costs (2^0.25 - 1) per unit
        assert_relative_eq!(
            compressor_power(&p, 3.0, 5.0, 10.0),
            0.408687368405877,
            epsilon = 1e-12
        );
        // power scales linearly with flow
        assert_relative_eq!(
            compressor_power(&p, 6.0, 5.0, 10.0),
            2.0 * compressor_power(&p, 3.0, 5.0, 10.0),
            epsilon = 1e-12
        );
    }

    #[test]
    fn linearization_is_exact_at_the_nominal_point() {
        let p = quarter_exponent_compressor(CompressorDriver::Electric);
        assert_relative_eq!(
            compressor_power_linearized(&p, 3.0, 5.0, 10.0),
            compressor_power(&p, 3.0, 5.0, 10.0),
            epsilon = 1e-12
        );
    }

    #[test]
    fn linearization_stays_close_around_the_nominal_point() {
        let p = quarter_exponent_compressor(CompressorDriver::Electric);
        for (q, p_in, p_out) in [
            (3.3, 5.0, 10.0),
            (2.7, 5.5, 10.0),
            (3.0, 4.5, 9.0),
            (3.3, 5.5, 11.0),
            (2.7, 4.5, 11.0),
        ] {
            let exact = compressor_power(&p, q, p_in, p_out);
            let linear = compressor_power_linearized(&p, q, p_in, p_out);
            assert!(
                (linear - exact).abs() <= 0.05 * exact.abs(),
                "lin {linear} vs exact {exact} at q={q} p_in={p_in} p_out={p_out}"
            );
        }
    }

    #[test]
    fn electric_compressor_rows_tie_power_to_pressures() {
        let p = quarter_exponent_compressor(CompressorDriver::Electric);
        let spec = bare_spec("cmp", DeviceKind::Compressor(p), 10.0);
        let model = model_around(spec);
        let config = SimulationConfig::default();
        let boundary = BoundaryState::initial(&model);
        let problem = window_for(&model, &config, &boundary, 1);

        let mut pt = Point::zeros(&problem);
        pt.set(&problem, "d_cmp_gas_in_t0", 3.0)
            .set(&problem, "d_cmp_gas_out_t0", 3.0)
            .set(&problem, "n_n1_gas_in_p_t0", 5.0)
            .set(&problem, "n_n1_gas_out_p_t0", 10.0)
            .set(&problem, "d_cmp_el_in_t0", 0.408687368405877);
        assert!(residual_free(&problem, &pt));

        // off the nominal pressures the rows demand the linearized power
        let p = quarter_exponent_compressor(CompressorDriver::Electric);
        let lin = compressor_power_linearized(&p, 3.0, 5.0, 11.0);
        pt.set(&problem, "n_n1_gas_out_p_t0", 11.0);
        assert!(!residual_free(&problem, &pt));
        pt.set(&problem, "d_cmp_el_in_t0", lin);
        assert!(residual_free(&problem, &pt));
    }

    #[test]
    fn gas_driven_compressor_burns_part_of_the_stream() {
        let p = quarter_exponent_compressor(CompressorDriver::GasTurbine);
        let spec = bare_spec("cmp", DeviceKind::Compressor(p), 10.0);
        let model = model_around(spec);
        let config = SimulationConfig::default();
        let boundary = BoundaryState::initial(&model);
        let problem = window_for(&model, &config, &boundary, 1);

        // at nominal conditions the shaft takes P/c_gas of the stream
        let fuel = 0.408687368405877 / 40.0;
        let mut pt = Point::zeros(&problem);
        pt.set(&problem, "d_cmp_gas_out_t0", 3.0)
            .set(&problem, "d_cmp_gas_in_t0", 3.0 + fuel)
            .set(&problem, "n_n1_gas_in_p_t0", 5.0)
            .set(&problem, "n_n1_gas_out_p_t0", 10.0);
        assert!(residual_free(&problem, &pt));

        pt.set(&problem, "d_cmp_gas_in_t0", 3.0);
        assert!(!residual_free(&problem, &pt));
    }

    #[test]
    fn pump_power_follows_pressure_lift() {
        let p = PumpParams {
            carrier: CarrierKind::Water,
            efficiency: 0.75,
            nominal_pressure_in: 0.1,
            nominal_pressure_out: 1.0,
        };
        // 0.03 Sm3/s lifted by 0.9 MPa at 75% efficiency costs 36 kW
        assert_relative_eq!(pump_power(&p, 0.03), 0.036, epsilon = 1e-15);

        let spec = bare_spec("pmp", DeviceKind::Pump(p), 1.0);
        let model = model_around(spec);
        let config = SimulationConfig::default();
        let boundary = BoundaryState::initial(&model);
        let problem = window_for(&model, &config, &boundary, 1);

        let mut pt = Point::zeros(&problem);
        pt.set(&problem, "d_pmp_water_in_t0", 0.03)
            .set(&problem, "d_pmp_water_out_t0", 0.03)
            .set(&problem, "d_pmp_el_in_t0", 0.036);
        assert!(residual_free(&problem, &pt));

        pt.set(&problem, "d_pmp_el_in_t0", 0.03);
        assert!(!residual_free(&problem, &pt));
    }
}
