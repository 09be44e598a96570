use std::fmt;

/// The kinds of flow the network can carry. Wellstream is the unseparated
/// oil/gas/water mix between wellheads and the separator inlet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CarrierKind {
    Electricity,
    Heat,
    Oil,
    Gas,
    Water,
    Hydrogen,
    Wellstream,
}

impl CarrierKind {
    pub const ALL: [CarrierKind; 7] = [
        CarrierKind::Electricity,
        CarrierKind::Heat,
        CarrierKind::Oil,
        CarrierKind::Gas,
        CarrierKind::Water,
        CarrierKind::Hydrogen,
        CarrierKind::Wellstream,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CarrierKind::Electricity => "el",
            CarrierKind::Heat => "heat",
            CarrierKind::Oil => "oil",
            CarrierKind::Gas => "gas",
            CarrierKind::Water => "water",
            CarrierKind::Hydrogen => "hydrogen",
            CarrierKind::Wellstream => "wellstream",
        }
    }

    pub fn parse(s: &str) -> Option<CarrierKind> {
        match s {
            "el" | "electricity" => Some(CarrierKind::Electricity),
            "heat" => Some(CarrierKind::Heat),
            "oil" => Some(CarrierKind::Oil),
            "gas" => Some(CarrierKind::Gas),
            "water" => Some(CarrierKind::Water),
            "hydrogen" => Some(CarrierKind::Hydrogen),
            "wellstream" => Some(CarrierKind::Wellstream),
            _ => None,
        }
    }

    /// Carriers whose flow is a fluid volume rate and can have an associated
    /// node pressure. Energy carriers flow in MW and have no pressure.
    pub fn is_fluid(self) -> bool {
        !matches!(self, CarrierKind::Electricity | CarrierKind::Heat)
    }
}

impl fmt::Display for CarrierKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Natural gas properties. Calorific value converts volume rate to combustion
/// power, CO2 content converts burned volume to emission mass, and the
/// remaining constants feed the pipeline pressure-drop model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GasParams {
    /// MJ/Sm3
    pub calorific_value: f64,
    /// kg/Sm3
    pub co2_content: f64,
    /// specific gravity relative to air
    pub gravity: f64,
    /// compressibility factor
    pub compressibility: f64,
    /// flowing gas temperature, K
    pub temperature_k: f64,
}

/// Incompressible liquid properties for pipeline pressure-drop modeling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LiquidParams {
    /// kg/m3
    pub density: f64,
    /// Darcy friction factor
    pub darcy_friction: f64,
}

/// Per-carrier physical constants. Entries are optional so small systems only
/// declare what their devices and edges actually reference.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CarrierSet {
    pub gas: Option<GasParams>,
    pub hydrogen_calorific_value: Option<f64>,
    pub oil: Option<LiquidParams>,
    pub water: Option<LiquidParams>,
}

impl CarrierSet {
    pub fn liquid(&self, kind: CarrierKind) -> Option<&LiquidParams> {
        match kind {
            CarrierKind::Oil => self.oil.as_ref(),
            CarrierKind::Water => self.water.as_ref(),
            _ => None,
        }
    }
}

/// Marker re-export so callers can name carrier parameter groups generically.
pub type CarrierParams = CarrierSet;
