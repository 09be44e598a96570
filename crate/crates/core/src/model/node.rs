use super::carrier::CarrierKind;

/// Each node exposes an in- and an out-terminal per carrier; edges arrive at
/// the in-terminal and leave from the out-terminal, devices draw from in and
/// feed out.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Terminal {
    In,
    Out,
}

impl Terminal {
    pub fn name(self) -> &'static str {
        match self {
            Terminal::In => "in",
            Terminal::Out => "out",
        }
    }
}

/// Nominal pressure at one node terminal, with an optional relative band.
/// With `max_deviation` set, the pressure variable is constrained to
/// nominal*(1 +- max_deviation); a zero band pins it. Without it the nominal
/// only serves as a linearization point for attached pipelines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PressureSpec {
    /// MPa
    pub nominal: f64,
    pub max_deviation: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub id: String,
    /// elevation above reference, m; feeds pipeline elevation terms
    pub elevation: f64,
    /// pressure specs keyed by fluid carrier and terminal
    pub pressure: Vec<(CarrierKind, Terminal, PressureSpec)>,
    /// voltage angle reference for the linearized power flow equations
    pub el_reference: bool,
}

impl Node {
    pub fn pressure_spec(&self, carrier: CarrierKind, terminal: Terminal) -> Option<&PressureSpec> {
        self.pressure
            .iter()
            .find(|(c, t, _)| *c == carrier && *t == terminal)
            .map(|(_, _, spec)| spec)
    }
}
