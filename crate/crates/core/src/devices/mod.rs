//! Per-device-type constraint generators and the closed-form physics they
//! linearize.
//!
//! Each emitter takes the window builder and a device index and appends
//! that device's rows to the problem. The generic layer (flow bounds,
//! ramps, commitment logic) applies to every device; the type-specific
//! layers add the physics coupling the device's flows.

pub mod generic;
mod hydrogen;
mod power;
mod process;
mod storage;

pub use generic::start_stop_trajectory;
pub use storage::{battery_dispatchable_power, storage_target};
pub use process::{compressor_power, compressor_power_linearized, pump_power, well_split_fractions};

use crate::assembly::WindowBuilder;
use crate::model::DeviceKind;

pub fn emit_device(b: &mut WindowBuilder, d: usize) {
    generic::emit(b, d);
    match &b.model.devices[d].kind {
        DeviceKind::Well(_) => process::emit_well(b, d),
        DeviceKind::Separator(_) => process::emit_separator(b, d),
        DeviceKind::Compressor(_) => process::emit_compressor(b, d),
        DeviceKind::Pump(_) => process::emit_pump(b, d),
        DeviceKind::GasTurbine(_) => power::emit_gas_turbine(b, d),
        DeviceKind::Heater(_) => power::emit_heater(b, d),
        DeviceKind::Battery(_) => storage::emit_battery(b, d),
        DeviceKind::HydrogenStorage(_) => storage::emit_hydrogen_storage(b, d),
        DeviceKind::Electrolyser(_) => hydrogen::emit_electrolyser(b, d),
        DeviceKind::FuelCell(_) => hydrogen::emit_fuel_cell(b, d),
        DeviceKind::Source(_) | DeviceKind::Sink(_) => {}
    }
}

#[cfg(test)]
pub(crate) mod harness {
    //! Shared scaffolding for device tests: a one-node model around a single
    //! device, assembled into a bare window so emitted rows can be checked
    //! by substitution or tiny solves.

    use crate::assembly::{BoundaryState, WindowBuilder};
    use crate::lp::PlanningProblem;
    use crate::model::*;

    pub fn gas_params() -> GasParams {
        GasParams {
            calorific_value: 40.0,
            co2_content: 2.5,
            gravity: 0.7,
            compressibility: 0.95,
            temperature_k: 300.0,
        }
    }

    pub fn model_around(device: DeviceSpec) -> EnergySystemModel {
        EnergySystemModel {
            carriers: CarrierSet {
                gas: Some(gas_params()),
                hydrogen_calorific_value: Some(10.8),
                oil: Some(LiquidParams {
                    density: 850.0,
                    darcy_friction: 0.02,
                }),
                water: Some(LiquidParams {
                    density: 1025.0,
                    darcy_friction: 0.02,
                }),
            },
            nodes: vec![Node {
                id: "n1".into(),
                elevation: 0.0,
                pressure: Vec::new(),
                el_reference: false,
            }],
            edges: Vec::new(),
            devices: vec![device],
        }
    }

    pub fn bare_spec(id: &str, kind: DeviceKind, f_max: f64) -> DeviceSpec {
        DeviceSpec {
            id: id.into(),
            node: "n1".into(),
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

    /// Build a window over `steps` steps holding only this device's rows.
    pub fn window_for(
        model: &EnergySystemModel,
        config: &SimulationConfig,
        boundary: &BoundaryState,
        steps: usize,
    ) -> PlanningProblem {
        let profiles = TimeSeriesSet::new();
        let mut b = WindowBuilder::start(model, config, &profiles, boundary, 0, steps).unwrap();
        super::emit_device(&mut b, 0);
        b.problem
    }

    /// Dense value vector addressed by variable name; unset entries are 0.
    pub struct Point {
        pub values: Vec<f64>,
    }

    impl Point {
        pub fn zeros(problem: &PlanningProblem) -> Self {
            Point {
                values: vec![0.0; problem.vars.len()],
            }
        }

        pub fn set(&mut self, problem: &PlanningProblem, name: &str, value: f64) -> &mut Self {
            let id = problem
                .var_named(name)
                .unwrap_or_else(|| panic!("no variable named {name}"));
            self.values[id.0] = value;
            self
        }
    }

    pub fn residual_free(problem: &PlanningProblem, point: &Point) -> bool {
        crate::lp::check_solution(problem, &point.values, 1e-9).is_empty()
    }
}
