//! Turns a model plus a window of forecast data into one planning problem.

mod globals;
mod window;

pub use globals::{evaluate_penalty, SLACK_COST, TIE_BREAK};
pub use window::{
    initial_level, AliasVars, BoundaryState, DeviceBoundary, DeviceVars, EdgeVars, SlackVars,
    WindowBuilder,
};

use crate::model::{EnergySystemModel, ProfileError, SimulationConfig, TimeSeriesSet};

/// Build the complete planning problem for one window: device rows, network
/// rows, window-level rows and the objective.
pub fn assemble<'a>(
    model: &'a EnergySystemModel,
    config: &'a SimulationConfig,
    profiles: &TimeSeriesSet,
    boundary: &'a BoundaryState,
    t0: usize,
    steps: usize,
) -> Result<WindowBuilder<'a>, ProfileError> {
    let mut b = WindowBuilder::start(model, config, profiles, boundary, t0, steps)?;
    for d in 0..model.devices.len() {
        crate::devices::emit_device(&mut b, d);
    }
    crate::network::emit_network(&mut b);
    globals::emit_globals(&mut b);
    Ok(b)
}
