//! Mixed-integer linear problem container shared by assembly, solvers and
//! the exporters.
//!
//! A [`PlanningProblem`] is a flat, solver-agnostic statement: named
//! variables with bounds, named range constraints `lo <= a.x + c <= hi`,
//! and a minimized affine objective. Insertion order is preserved
//! everywhere so identical assembly inputs produce byte-identical exports.

mod check;
mod export;

pub use check::{check_solution, Violation, ViolationKind};
pub use export::{write_lp, write_mps};

/// Handle into a problem's variable table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarKind {
    Continuous,
    Binary,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VarDef {
    pub name: String,
    pub kind: VarKind,
    pub lb: f64,
    pub ub: f64,
}

/// Affine expression `sum(coeff * var) + constant`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LinExpr {
    pub terms: Vec<(VarId, f64)>,
    pub constant: f64,
}

impl LinExpr {
    pub fn new() -> Self {
        LinExpr::default()
    }

    pub fn var(id: VarId) -> Self {
        LinExpr {
            terms: vec![(id, 1.0)],
            constant: 0.0,
        }
    }

    pub fn term(mut self, id: VarId, coeff: f64) -> Self {
        self.terms.push((id, coeff));
        self
    }

    pub fn plus(mut self, constant: f64) -> Self {
        self.constant += constant;
        self
    }

    pub fn add(&mut self, id: VarId, coeff: f64) {
        self.terms.push((id, coeff));
    }

    pub fn evaluate(&self, values: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(id, c)| c * values[id.0])
            .sum::<f64>()
            + self.constant
    }

    /// Merge duplicate variable references, dropping exact zeros. Terms keep
    /// the position of their first occurrence.
    pub fn compacted(&self) -> LinExpr {
        let mut order: Vec<VarId> = Vec::new();
        let mut coeff: std::collections::HashMap<VarId, f64> = std::collections::HashMap::new();
        for (id, c) in &self.terms {
            if !coeff.contains_key(id) {
                order.push(*id);
            }
            *coeff.entry(*id).or_insert(0.0) += c;
        }
        LinExpr {
            terms: order
                .into_iter()
                .filter_map(|id| {
                    let c = coeff[&id];
                    (c != 0.0).then_some((id, c))
                })
                .collect(),
            constant: self.constant,
        }
    }
}

/// `lo <= expr <= hi`; equalities have `lo == hi`, one-sided rows use an
/// infinite end.
#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub name: String,
    pub expr: LinExpr,
    pub lo: f64,
    pub hi: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct PlanningProblem {
    pub name: String,
    /// absolute timestep the window starts at
    pub window_start: usize,
    pub vars: Vec<VarDef>,
    pub constraints: Vec<Constraint>,
    /// minimized
    pub objective: LinExpr,
}

impl PlanningProblem {
    pub fn new(name: impl Into<String>, window_start: usize) -> Self {
        PlanningProblem {
            name: name.into(),
            window_start,
            ..Default::default()
        }
    }

    pub fn add_var(&mut self, name: impl Into<String>, kind: VarKind, lb: f64, ub: f64) -> VarId {
        let name = name.into();
        debug_assert!(
            !self.vars.iter().any(|v| v.name == name),
            "duplicate variable name {name}"
        );
        self.vars.push(VarDef { name, kind, lb, ub });
        VarId(self.vars.len() - 1)
    }

    pub fn add_continuous(&mut self, name: impl Into<String>, lb: f64, ub: f64) -> VarId {
        self.add_var(name, VarKind::Continuous, lb, ub)
    }

    pub fn add_binary(&mut self, name: impl Into<String>) -> VarId {
        self.add_var(name, VarKind::Binary, 0.0, 1.0)
    }

    pub fn constrain(&mut self, name: impl Into<String>, expr: LinExpr, lo: f64, hi: f64) {
        self.constraints.push(Constraint {
            name: name.into(),
            expr: expr.compacted(),
            lo,
            hi,
        });
    }

    pub fn equal(&mut self, name: impl Into<String>, expr: LinExpr, rhs: f64) {
        self.constrain(name, expr, rhs, rhs);
    }

    pub fn at_most(&mut self, name: impl Into<String>, expr: LinExpr, hi: f64) {
        self.constrain(name, expr, f64::NEG_INFINITY, hi);
    }

    pub fn at_least(&mut self, name: impl Into<String>, expr: LinExpr, lo: f64) {
        self.constrain(name, expr, lo, f64::INFINITY);
    }

    pub fn add_objective(&mut self, id: VarId, coeff: f64) {
        self.objective.add(id, coeff);
    }

    pub fn var_named(&self, name: &str) -> Option<VarId> {
        self.vars.iter().position(|v| v.name == name).map(VarId)
    }

    pub fn binary_count(&self) -> usize {
        self.vars
            .iter()
            .filter(|v| v.kind == VarKind::Binary)
            .count()
    }
}
