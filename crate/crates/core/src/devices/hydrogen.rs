//! Hydrogen conversion: electrolysers and fuel cells.

use crate::assembly::WindowBuilder;
use crate::lp::LinExpr;
use crate::model::{CarrierKind, DeviceKind, FlowDir};

pub fn emit_electrolyser(b: &mut WindowBuilder, d: usize) {
    let model = b.model;
    let spec = &model.devices[d];
    let DeviceKind::Electrolyser(p) = &spec.kind else {
        unreachable!()
    };
    let id = &spec.id;
    let calorific = model.carriers.hydrogen_calorific_value.unwrap();

    for t in 0..b.steps {
        let el_in = b.dev[d].flow(CarrierKind::Electricity, FlowDir::In, t);
        let h_out = b.dev[d].flow(CarrierKind::Hydrogen, FlowDir::Out, t);
        let heat_out = b.dev[d].flow(CarrierKind::Heat, FlowDir::Out, t);

        // the produced hydrogen carries eta of the electric energy
        b.problem.equal(
            format!("d_{id}_conv_t{t}"),
            LinExpr::new().term(h_out, calorific).term(el_in, -p.eta),
            0.0,
        );
        // a share of the conversion losses is recovered as heat
        b.problem.equal(
            format!("d_{id}_heat_t{t}"),
            LinExpr::var(heat_out).term(el_in, -(1.0 - p.eta) * p.eta_heat),
            0.0,
        );
    }
}

pub fn emit_fuel_cell(b: &mut WindowBuilder, d: usize) {
    let model = b.model;
    let spec = &model.devices[d];
    let DeviceKind::FuelCell(p) = &spec.kind else {
        unreachable!()
    };
    let id = &spec.id;
    let calorific = model.carriers.hydrogen_calorific_value.unwrap();

    for t in 0..b.steps {
        let h_in = b.dev[d].flow(CarrierKind::Hydrogen, FlowDir::In, t);
        let el_out = b.dev[d].flow(CarrierKind::Electricity, FlowDir::Out, t);
        let heat_out = b.dev[d].flow(CarrierKind::Heat, FlowDir::Out, t);

        b.problem.equal(
            format!("d_{id}_conv_t{t}"),
            LinExpr::var(el_out).term(h_in, -calorific * p.eta),
            0.0,
        );
        b.problem.equal(
            format!("d_{id}_heat_t{t}"),
            LinExpr::var(heat_out).term(h_in, -calorific * (1.0 - p.eta) * p.eta_heat),
            0.0,
        );
    }
}
