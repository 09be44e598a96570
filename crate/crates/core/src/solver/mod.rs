//! Solver abstraction: one trait, currently one MILP backend.
//!
//! Everything upstream talks to [`SolverBackend`] so the modeling and
//! simulation layers stay independent of the concrete solver. The bundled
//! implementation drives HiGHS in single-threaded deterministic mode.

mod highs_backend;

pub use highs_backend::HighsBackend;

use crate::lp::PlanningProblem;
use crate::model::SolverOptions;

#[derive(Debug, Clone, PartialEq)]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    Unbounded,
    TimedOut,
    /// anything else the backend reports; carries the backend's own wording
    Failed(String),
}

impl SolveStatus {
    pub fn is_optimal(&self) -> bool {
        *self == SolveStatus::Optimal
    }
}

/// A solved point: variable values in problem order plus the objective,
/// including any constant term the problem carries.
#[derive(Debug, Clone)]
pub struct Solution {
    pub objective: f64,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct SolveOutcome {
    pub status: SolveStatus,
    pub solution: Option<Solution>,
    /// relative MIP gap at termination, when the backend reports one
    pub mip_gap: Option<f64>,
}

impl SolveOutcome {
    pub fn expect_optimal(self) -> Solution {
        match (&self.status, self.solution) {
            (SolveStatus::Optimal, Some(solution)) => solution,
            (status, _) => panic!("expected an optimal solution, got {status:?}"),
        }
    }
}

pub trait SolverBackend {
    fn name(&self) -> &'static str;
    /// True if the backend honors binary variable declarations. A backend
    /// without integer support may only receive problems whose binaries are
    /// fixed by bounds.
    fn supports_integer(&self) -> bool;
    fn solve(&self, problem: &PlanningProblem, options: &SolverOptions) -> SolveOutcome;
}
