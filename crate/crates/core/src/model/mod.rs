//! System description: carriers, nodes, edges, devices, profiles and
//! simulation settings, plus structural validation.
//!
//! Everything in this module is plain data in normalized internal units:
//! fluid flows in Sm3/s, electricity and heat in MW, pressure in MPa,
//! battery energy in MWh, hydrogen storage volume in Sm3, durations in
//! timesteps of the configured resolution. Config front-ends are expected
//! to convert user-facing units before constructing these types.

mod carrier;
mod config;
mod device;
mod edge;
mod node;
mod profile;
mod validate;

pub use carrier::{CarrierKind, CarrierParams, CarrierSet, GasParams, LiquidParams};
pub use config::{SimulationConfig, SolverOptions};
pub use device::{
    BatteryParams, CompressorDriver, CompressorParams, DeviceKind, DeviceSpec, ElectrolyserParams,
    FlowDir, FuelCellParams, GasTurbineParams, HeaterParams, HydrogenStorageParams, PenaltyCurve,
    PumpParams, SeparatorParams, StartStop, WellParams,
};
pub use edge::{Edge, FlowModel};
pub use node::{Node, PressureSpec, Terminal};
pub use profile::{
    generate_forecast_from_nowcast, profile_value, Profile, ProfileError, TimeSeriesSet,
};
pub use validate::{has_errors, validate_model, validate_profiles, Diagnostic, Severity};

/// A complete system description. Collections keep file order; indices into
/// them act as stable ids during assembly and result reporting.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergySystemModel {
    pub carriers: CarrierSet,
    pub nodes: Vec<Node>,
    pub edges: Vec<Edge>,
    pub devices: Vec<DeviceSpec>,
}

impl EnergySystemModel {
    pub fn node_index(&self, id: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n.id == id)
    }

    pub fn device_index(&self, id: &str) -> Option<usize> {
        self.devices.iter().position(|d| d.id == id)
    }

    pub fn edge_index(&self, id: &str) -> Option<usize> {
        self.edges.iter().position(|e| e.id == id)
    }

    /// Sanity bound used for otherwise free network variables of a carrier:
    /// ten times the total installed device capacity, floored at 10 so empty
    /// carriers still get a finite bound.
    pub fn carrier_sanity_bound(&self, carrier: CarrierKind) -> f64 {
        let installed: f64 = self
            .devices
            .iter()
            .filter(|d| d.touches_carrier(carrier))
            .map(|d| d.f_max)
            .sum();
        let edges: f64 = self
            .edges
            .iter()
            .filter(|e| e.carrier == carrier)
            .filter_map(|e| e.q_max)
            .sum();
        10.0 * (installed + edges).max(1.0)
    }
}
