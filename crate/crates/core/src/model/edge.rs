use super::carrier::CarrierKind;

/// How an edge relates flow to the rest of the system. Transport edges are
/// capacity-limited only. The other models add physics: linearized voltage
/// angle coupling for electricity, and pressure-drop relations for gas
/// (Weymouth) and liquid (Darcy-Weisbach) pipelines, both linearized around
/// the endpoint nominal pressures.
#[derive(Debug, Clone, PartialEq)]
pub enum FlowModel {
    Transport,
    DcPower {
        /// reactance, per unit on the configured power base
        reactance: f64,
    },
    Weymouth {
        /// inner diameter, mm
        diameter_mm: f64,
        /// segment length, km
        length_km: f64,
        /// base (ambient) temperature, K
        base_temperature_k: f64,
        /// base (atmospheric) pressure, MPa
        base_pressure_mpa: f64,
    },
    Darcy {
        /// inner diameter, mm
        diameter_mm: f64,
        /// segment length, km
        length_km: f64,
    },
}

/// A directed connection from one node's out-terminal to another node's
/// in-terminal. Bidirectional edges allow negative flow; losses, if any, are
/// given as a piecewise table of loss against transported magnitude.
#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub id: String,
    pub carrier: CarrierKind,
    pub from: String,
    pub to: String,
    /// flow magnitude limit; carrier units (Sm3/s or MW)
    pub q_max: Option<f64>,
    pub bidirectional: bool,
    pub flow_model: FlowModel,
    /// (flow, loss) breakpoints applied to each direction's magnitude
    pub loss_table: Option<Vec<(f64, f64)>>,
}

impl Edge {
    pub fn has_losses(&self) -> bool {
        self.loss_table
            .as_ref()
            .is_some_and(|t| t.iter().any(|(_, loss)| *loss > 0.0))
    }
}
