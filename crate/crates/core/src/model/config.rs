/// MILP backend settings, applied per planning window.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverOptions {
    /// relative MIP gap tolerance
    pub gap: f64,
    /// wall-clock limit per window, seconds
    pub time_limit_s: Option<f64>,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            gap: 1e-9,
            time_limit_s: None,
        }
    }
}

/// Timing, global limits and solver settings for a simulation. All step
/// counts are in units of `timestep_minutes`.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig {
    pub timestep_minutes: f64,
    /// planning window length, steps
    pub horizon_steps: usize,
    /// steps committed from each window before re-optimizing
    pub reopt_steps: usize,
    /// steps from window start that read the nowcast instead of the forecast
    pub nowcast_steps: usize,
    /// simulated span, steps
    pub duration_steps: usize,
    /// minimum spinning reserve, MW
    pub reserve_min: f64,
    /// optional CO2 emission rate cap, kg/s
    pub emission_cap: Option<f64>,
    /// power base for per-unit grid quantities, MVA
    pub s_base_mva: f64,
    /// add high-cost slack supply/absorption so pathological windows stay
    /// feasible; slack use is reported, never silent
    pub elastic: bool,
    pub seed: u64,
    pub solver: SolverOptions,
}

impl SimulationConfig {
    pub fn dt_hours(&self) -> f64 {
        self.timestep_minutes / 60.0
    }
}

/// A convenience baseline: callers override what their scenario needs.
impl Default for SimulationConfig {
    fn default() -> Self {
        SimulationConfig {
            timestep_minutes: 5.0,
            horizon_steps: 24,
            reopt_steps: 6,
            nowcast_steps: 0,
            duration_steps: 288,
            reserve_min: 0.0,
            emission_cap: None,
            s_base_mva: 100.0,
            elastic: false,
            seed: 0,
            solver: SolverOptions::default(),
        }
    }
}
