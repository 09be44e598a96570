//! Pressure-driven pipeline flow for gas and liquids.
//!
//! Both models give closed-form flow as a function of terminal pressures;
//! the planning problem uses their first-order expansion around the
//! nominal pressures, exact at the nominal point.

use crate::model::{GasParams, LiquidParams};

/// Gravitational acceleration used for static head, m/s2.
const GRAVITY: f64 = 9.98;

/// Gas pipeline coefficients: flow is `k * sqrt(p1^2 - exp_s * p2^2)` with
/// pressures in MPa and flow in Sm3/s. `exp_s` folds the elevation change
/// into an equivalent outlet-pressure correction.
#[derive(Debug, Clone, Copy)]
pub struct GasPipe {
    pub k: f64,
    pub exp_s: f64,
}

pub fn weymouth_coefficients(
    gas: &GasParams,
    diameter_mm: f64,
    length_km: f64,
    base_temperature_k: f64,
    base_pressure_mpa: f64,
    elevation_change_m: f64,
) -> GasPipe {
    let s = 0.0684 * gas.gravity * elevation_change_m
        / (gas.temperature_k * gas.compressibility);
    // equivalent length of an inclined pipe; the limit at s = 0 is L
    let effective_length = if s == 0.0 {
        length_km
    } else {
        length_km * (s.exp() - 1.0) / s
    };
    let k = 4.3328e-8 * (base_temperature_k / base_pressure_mpa)
        * (gas.gravity * gas.temperature_k * effective_length * gas.compressibility).powf(-0.5)
        * diameter_mm.powf(8.0 / 3.0);
    GasPipe { k, exp_s: s.exp() }
}

pub fn weymouth_flow(pipe: &GasPipe, p1: f64, p2: f64) -> f64 {
    pipe.k * (p1 * p1 - pipe.exp_s * p2 * p2).sqrt()
}

/// Row coefficients of the linearized flow `q = a1 * p1 - a2 * p2`.
pub fn weymouth_linear_terms(pipe: &GasPipe, p1_nom: f64, p2_nom: f64) -> (f64, f64) {
    let denom = (p1_nom * p1_nom - pipe.exp_s * p2_nom * p2_nom).sqrt();
    (
        pipe.k * p1_nom / denom,
        pipe.k * pipe.exp_s * p2_nom / denom,
    )
}

pub fn weymouth_linearized(pipe: &GasPipe, p1_nom: f64, p2_nom: f64, p1: f64, p2: f64) -> f64 {
    let (a1, a2) = weymouth_linear_terms(pipe, p1_nom, p2_nom);
    a1 * p1 - a2 * p2
}

/// Liquid pipeline coefficients: flow is `k * sqrt(p1 - p2 - head)` with
/// pressures in MPa; `head` is the static column between the endpoints.
#[derive(Debug, Clone, Copy)]
pub struct LiquidPipe {
    pub k: f64,
    pub head: f64,
}

pub fn darcy_coefficients(
    liquid: &LiquidParams,
    diameter_mm: f64,
    length_km: f64,
    elevation_change_m: f64,
) -> LiquidPipe {
    let d = diameter_mm / 1000.0;
    let l = length_km * 1000.0;
    let k_si = (std::f64::consts::PI.powi(2) * d.powi(5)
        / (8.0 * liquid.darcy_friction * liquid.density * l))
        .sqrt();
    LiquidPipe {
        // rescale from per sqrt(Pa) to per sqrt(MPa)
        k: 1000.0 * k_si,
        head: liquid.density * GRAVITY * elevation_change_m * 1e-6,
    }
}

pub fn darcy_flow(pipe: &LiquidPipe, p1: f64, p2: f64) -> f64 {
    pipe.k * (p1 - p2 - pipe.head).sqrt()
}

/// Pressure drop `p1 - p2` of the linearized model at flow `q`, expanded
/// around the nominal pressures.
pub fn darcy_drop_linearized(pipe: &LiquidPipe, p1_nom: f64, p2_nom: f64, q: f64) -> f64 {
    let x = (p1_nom - p2_nom - pipe.head).sqrt();
    let q_nom = pipe.k * x;
    (p1_nom - p2_nom) + (2.0 * x / pipe.k) * (q - q_nom)
}
