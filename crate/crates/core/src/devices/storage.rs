//! Storage devices: the battery and the hydrogen tank.
//!
//! Both track a level through a per-step balance and pay a configured
//! penalty when the end-of-window level falls short of its target. The
//! battery additionally exposes the power it can raise at short notice,
//! needed by the reserve requirement.

use crate::assembly::WindowBuilder;
use crate::lp::LinExpr;
use crate::model::{BatteryParams, CarrierKind, DeviceKind, FlowDir, HydrogenStorageParams};

pub fn emit_battery(b: &mut WindowBuilder, d: usize) {
    let model = b.model;
    let spec = &model.devices[d];
    let DeviceKind::Battery(p) = &spec.kind else {
        unreachable!()
    };
    let id = &spec.id;
    let f_min = spec.f_min;
    let f_max = spec.f_max;
    let dt_h = b.dt_h;
    let level_prev = b.boundary.devices[d]
        .level_prev
        .expect("battery boundary carries a level");
    let level = b.dev[d].level.clone().unwrap();
    let p_avail = b.dev[d].p_avail.clone().unwrap();
    let y_storage = b.dev[d].y_storage.clone().unwrap();
    // slack large enough to disarm either availability branch
    let big_m = 2.0 * f_max + p.capacity / p.reserve_duration_h;

    for t in 0..b.steps {
        let el_in = b.dev[d].flow(CarrierKind::Electricity, FlowDir::In, t);
        let el_out = b.dev[d].flow(CarrierKind::Electricity, FlowDir::Out, t);

        // charging draws at most the configured rate
        b.problem.vars[el_in.0].ub = b.problem.vars[el_in.0].ub.min(-f_min);

        // level balance with conversion losses on both directions
        let mut bal = LinExpr::new()
            .term(el_in, p.efficiency * dt_h)
            .term(el_out, -dt_h / p.efficiency)
            .term(level[t], -1.0);
        let mut rhs = 0.0;
        if t > 0 {
            bal.add(level[t - 1], 1.0);
        } else {
            rhs = -level_prev;
        }
        b.problem.equal(format!("d_{id}_bal_t{t}"), bal, rhs);

        // the dispatchable power is the lower of the discharge rating and
        // what the stored energy can sustain over the reserve duration;
        // the binary picks the binding branch and the rows pin the value
        b.problem.vars[p_avail[t].0].ub = f_max;
        b.problem.at_most(
            format!("d_{id}_pav_energy_cap_t{t}"),
            LinExpr::var(p_avail[t]).term(level[t], -1.0 / p.reserve_duration_h),
            0.0,
        );
        b.problem.at_least(
            format!("d_{id}_pav_rating_t{t}"),
            LinExpr::var(p_avail[t]).term(y_storage[t], -big_m),
            f_max - big_m,
        );
        b.problem.at_least(
            format!("d_{id}_pav_energy_t{t}"),
            LinExpr::var(p_avail[t])
                .term(level[t], -1.0 / p.reserve_duration_h)
                .term(y_storage[t], big_m),
            0.0,
        );
    }

    // shortfall below the level target at the window end
    let target = p.target_level.unwrap_or(level_prev);
    b.problem.at_least(
        format!("d_{id}_target"),
        LinExpr::var(b.dev[d].deficit.unwrap()).term(level[b.steps - 1], 1.0),
        target,
    );
}

pub fn emit_hydrogen_storage(b: &mut WindowBuilder, d: usize) {
    let model = b.model;
    let spec = &model.devices[d];
    let DeviceKind::HydrogenStorage(p) = &spec.kind else {
        unreachable!()
    };
    let id = &spec.id;
    let dt_s = b.dt_h * 3600.0;
    let level_prev = b.boundary.devices[d]
        .level_prev
        .expect("storage boundary carries a level");
    let level = b.dev[d].level.clone().unwrap();

    for t in 0..b.steps {
        let h_in = b.dev[d].flow(CarrierKind::Hydrogen, FlowDir::In, t);
        let h_out = b.dev[d].flow(CarrierKind::Hydrogen, FlowDir::Out, t);
        b.problem.vars[h_in.0].ub = b.problem.vars[h_in.0].ub.min(-spec.f_min);

        // volume balance; flows are per second, the level is a volume
        let mut bal = LinExpr::new()
            .term(h_in, dt_s)
            .term(h_out, -dt_s)
            .term(level[t], -1.0);
        let mut rhs = 0.0;
        if t > 0 {
            bal.add(level[t - 1], 1.0);
        } else {
            rhs = -level_prev;
        }
        b.problem.equal(format!("d_{id}_bal_t{t}"), bal, rhs);
    }

    let target = p.target_level.unwrap_or(level_prev);
    b.problem.at_least(
        format!("d_{id}_target"),
        LinExpr::var(b.dev[d].deficit.unwrap()).term(level[b.steps - 1], 1.0),
        target,
    );
}

/// Battery parameters shared by the tests and reserve accounting.
pub fn battery_dispatchable_power(p: &BatteryParams, f_max: f64, level: f64) -> f64 {
    f_max.min(level / p.reserve_duration_h)
}

/// Level target used by the shortfall penalty for either storage kind.
pub fn storage_target(kind: &DeviceKind, window_start_level: f64) -> f64 {
    match kind {
        DeviceKind::Battery(BatteryParams { target_level, .. })
        | DeviceKind::HydrogenStorage(HydrogenStorageParams { target_level, .. }) => {
            target_level.unwrap_or(window_start_level)
        }
        _ => window_start_level,
    }
}
