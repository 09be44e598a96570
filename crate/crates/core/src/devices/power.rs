//! Electricity and heat production: gas turbines and heaters.

use crate::assembly::WindowBuilder;
use crate::lp::LinExpr;
use crate::model::{CarrierKind, DeviceKind, FlowDir};

pub fn emit_gas_turbine(b: &mut WindowBuilder, d: usize) {
    let model = b.model;
    let spec = &model.devices[d];
    let DeviceKind::GasTurbine(p) = &spec.kind else {
        unreachable!()
    };
    let id = &spec.id;
    let f_max = spec.f_max;
    let calorific = model.carriers.gas.as_ref().unwrap().calorific_value;

    for t in 0..b.steps {
        let gas_in = b.dev[d].flow(CarrierKind::Gas, FlowDir::In, t);
        let el_out = b.dev[d].flow(CarrierKind::Electricity, FlowDir::Out, t);
        let heat_out = b.dev[d].flow(CarrierKind::Heat, FlowDir::Out, t);

        // affine fuel curve in per-unit load, with a standing term while
        // the turbine is on or spinning up; scaled through by capacity
        let mut fuel = LinExpr::new()
            .term(gas_in, calorific)
            .term(el_out, -p.fuel_a);
        let mut rhs = 0.0;
        match (&b.dev[d].on, &b.dev[d].prep) {
            (Some(on), Some(prep)) => {
                fuel.add(on[t], -p.fuel_b * f_max);
                fuel.add(prep[t], -p.fuel_b * f_max);
            }
            _ => rhs = p.fuel_b * f_max,
        }
        b.problem.equal(format!("d_{id}_fuel_t{t}"), fuel, rhs);

        // exhaust heat recovered from the energy not converted
        b.problem.equal(
            format!("d_{id}_heat_t{t}"),
            LinExpr::var(heat_out)
                .term(gas_in, -calorific * p.eta_heat)
                .term(el_out, p.eta_heat),
            0.0,
        );
    }
}

pub fn emit_heater(b: &mut WindowBuilder, d: usize) {
    let model = b.model;
    let spec = &model.devices[d];
    let DeviceKind::Heater(p) = &spec.kind else {
        unreachable!()
    };
    let id = &spec.id;
    for t in 0..b.steps {
        b.problem.equal(
            format!("d_{id}_conv_t{t}"),
            LinExpr::var(b.dev[d].flow(CarrierKind::Heat, FlowDir::Out, t))
                .term(b.dev[d].flow(CarrierKind::Electricity, FlowDir::In, t), -p.efficiency),
            0.0,
        );
    }
}
