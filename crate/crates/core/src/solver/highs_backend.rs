use highs::{HighsModelStatus, RowProblem, Sense};

use super::{SolveOutcome, SolveStatus, Solution, SolverBackend};
use crate::lp::{PlanningProblem, VarKind};
use crate::model::SolverOptions;

/// HiGHS driven single-threaded with a fixed random seed, so repeated solves
/// of the same problem return identical solutions.
#[derive(Debug, Clone, Default)]
pub struct HighsBackend {
    pub seed: i32,
}

// Tighter than the HiGHS defaults; committed trajectories are audited
// against a 1e-6 residual budget downstream and need headroom under it.
const FEASIBILITY_TOL: f64 = 1e-9;

impl SolverBackend for HighsBackend {
    fn name(&self) -> &'static str {
        "highs"
    }

    fn supports_integer(&self) -> bool {
        true
    }

    fn solve(&self, problem: &PlanningProblem, options: &SolverOptions) -> SolveOutcome {
        if problem.vars.is_empty() {
            // HiGHS reports empty models as a separate status; an empty
            // problem is trivially optimal at its constant term.
            return SolveOutcome {
                status: SolveStatus::Optimal,
                solution: Some(Solution {
                    objective: problem.objective.constant,
                    values: Vec::new(),
                }),
                mip_gap: None,
            };
        }

        let objective = problem.objective.compacted();
        let mut coeff_of = vec![0.0f64; problem.vars.len()];
        for (id, c) in &objective.terms {
            coeff_of[id.0] = *c;
        }

        let mut pb = RowProblem::default();
        let mut cols = Vec::with_capacity(problem.vars.len());
        let mut has_integer = false;
        for (var, obj) in problem.vars.iter().zip(&coeff_of) {
            let col = match var.kind {
                VarKind::Binary => {
                    has_integer = true;
                    pb.add_integer_column(*obj, 0..=1)
                }
                VarKind::Continuous => pb.add_column(*obj, var.lb..=var.ub),
            };
            cols.push(col);
        }
        for constraint in &problem.constraints {
            let lo = constraint.lo - constraint.expr.constant;
            let hi = constraint.hi - constraint.expr.constant;
            let row: Vec<_> = constraint
                .expr
                .terms
                .iter()
                .map(|(id, c)| (cols[id.0], *c))
                .collect();
            pb.add_row(lo..=hi, &row);
        }

        let mut model = pb.optimise(Sense::Minimise);
        model.set_option("output_flag", false);
        model.set_option("threads", 1i32);
        model.set_option("random_seed", self.seed);
        model.set_option("mip_rel_gap", options.gap);
        model.set_option("primal_feasibility_tolerance", FEASIBILITY_TOL);
        model.set_option("mip_feasibility_tolerance", FEASIBILITY_TOL);
        if let Some(limit) = options.time_limit_s {
            model.set_option("time_limit", limit);
        }

        let solved = model.solve();
        let status = match solved.status() {
            HighsModelStatus::Optimal => SolveStatus::Optimal,
            HighsModelStatus::Infeasible => SolveStatus::Infeasible,
            HighsModelStatus::Unbounded | HighsModelStatus::UnboundedOrInfeasible => {
                SolveStatus::Unbounded
            }
            HighsModelStatus::ReachedTimeLimit => SolveStatus::TimedOut,
            other => SolveStatus::Failed(format!("{other:?}")),
        };

        let (solution, mip_gap) = if status == SolveStatus::Optimal {
            let gap = if has_integer {
                let g = solved.mip_gap();
                g.is_finite().then_some(g)
            } else {
                None
            };
            let objective = solved.objective_value() + problem.objective.constant;
            let values = solved.get_solution().columns().to_vec();
            (Some(Solution { objective, values }), gap)
        } else {
            (None, None)
        };

        SolveOutcome {
            status,
            solution,
            mip_gap,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::LinExpr;

    fn solve(problem: &PlanningProblem) -> SolveOutcome {
        HighsBackend::default().solve(problem, &SolverOptions::default())
    }

    #[test]
    fn empty_problem_is_optimal_at_zero() {
        let outcome = solve(&PlanningProblem::new("empty", 0));
        let solution = outcome.expect_optimal();
        assert_eq!(solution.objective, 0.0);
        assert!(solution.values.is_empty());
    }

    #[test]
    fn small_milp_reaches_known_optimum() {
        // min 2a + b st a + b >= 1.5, a binary: a=1, b=0.5 beats a=0, b=1.5
        // only when b costs more than 2 per unit, so check both price points
        let mut p = PlanningProblem::new("milp", 0);
        let a = p.add_binary("a");
        let b = p.add_continuous("b", 0.0, 10.0);
        p.add_objective(a, 2.0);
        p.add_objective(b, 3.0);
        p.at_least("cover", LinExpr::var(a).term(b, 1.0), 1.5);
        let solution = solve(&p).expect_optimal();
        assert!((solution.objective - 3.5).abs() < 1e-9);
        assert!((solution.values[0] - 1.0).abs() < 1e-9);
        assert!((solution.values[1] - 0.5).abs() < 1e-9);
    }

    #[test]
    fn infeasible_and_unbounded_are_distinguished() {
        let mut p = PlanningProblem::new("infeasible", 0);
        let x = p.add_continuous("x", 0.0, 1.0);
        p.at_least("impossible", LinExpr::var(x), 2.0);
        assert_eq!(solve(&p).status, SolveStatus::Infeasible);

        let mut p = PlanningProblem::new("unbounded", 0);
        let x = p.add_continuous("x", f64::NEG_INFINITY, f64::INFINITY);
        p.add_objective(x, 1.0);
        assert_eq!(solve(&p).status, SolveStatus::Unbounded);
    }

    #[test]
    fn objective_constant_is_included() {
        let mut p = PlanningProblem::new("const", 0);
        let x = p.add_continuous("x", 1.0, 2.0);
        p.add_objective(x, 1.0);
        p.objective.constant = 10.0;
        let solution = solve(&p).expect_optimal();
        assert!((solution.objective - 11.0).abs() < 1e-9);
    }

    #[test]
    fn repeated_solves_are_identical() {
        let mut p = PlanningProblem::new("repeat", 0);
        for i in 0..6 {
            p.add_binary(format!("y{i}"));
        }
        let xs: Vec<_> = (0..6)
            .map(|i| p.add_continuous(format!("x{i}"), 0.0, 4.0))
            .collect();
        for (i, x) in xs.iter().enumerate() {
            p.add_objective(*x, 1.0 + 0.1 * i as f64);
            p.constrain("link".to_string() + &i.to_string(), LinExpr::var(*x), 0.0, 3.0);
        }
        let first = solve(&p).expect_optimal();
        let second = solve(&p).expect_optimal();
        assert_eq!(first.values, second.values);
        assert_eq!(first.objective, second.objective);
    }
}
