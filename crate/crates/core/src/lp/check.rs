//! Solution audit by direct substitution.
//!
//! This deliberately shares no code with the solver path: it walks the
//! problem's constraint list, plugs candidate values into each expression
//! and compares against the stated range, so a bug in the backend bridge
//! or in the solver itself shows up as a reported violation.

use super::{PlanningProblem, VarKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolationKind {
    BelowLower,
    AboveUpper,
    BoundViolated,
    NotIntegral,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub element: String,
    pub kind: ViolationKind,
    /// how far outside the admissible range the value lies
    pub residual: f64,
}

/// Check `values` against every constraint, variable bound and integrality
/// requirement of `problem`. Returns one violation per breach larger than
/// `tol`; an empty result certifies feasibility at that tolerance.
pub fn check_solution(problem: &PlanningProblem, values: &[f64], tol: f64) -> Vec<Violation> {
    assert_eq!(
        values.len(),
        problem.vars.len(),
        "solution length does not match the variable table"
    );
    let mut out = Vec::new();

    for (var, value) in problem.vars.iter().zip(values) {
        let below = var.lb - value;
        let above = value - var.ub;
        if below > tol || above > tol {
            out.push(Violation {
                element: var.name.clone(),
                kind: ViolationKind::BoundViolated,
                residual: below.max(above),
            });
        }
        if var.kind == VarKind::Binary {
            let distance = (value - value.round()).abs();
            if distance > tol {
                out.push(Violation {
                    element: var.name.clone(),
                    kind: ViolationKind::NotIntegral,
                    residual: distance,
                });
            }
        }
    }

    for constraint in &problem.constraints {
        let value = constraint.expr.evaluate(values);
        if value < constraint.lo - tol {
            out.push(Violation {
                element: constraint.name.clone(),
                kind: ViolationKind::BelowLower,
                residual: constraint.lo - value,
            });
        } else if value > constraint.hi + tol {
            out.push(Violation {
                element: constraint.name.clone(),
                kind: ViolationKind::AboveUpper,
                residual: value - constraint.hi,
            });
        }
    }

    out
}
