//! Plain-text problem exports in CPLEX LP and free MPS formats.
//!
//! Both writers walk the problem in insertion order and format numbers with
//! Rust's shortest-roundtrip float notation, so the same problem always
//! serializes to the same bytes. Ranged constraints become two LP rows or
//! one MPS row plus a RANGES entry.

use super::{Constraint, PlanningProblem, VarKind};

fn num(v: f64) -> String {
    if v == 0.0 {
        "0".to_string()
    } else {
        format!("{v}")
    }
}

fn terms(expr: &super::LinExpr, problem: &PlanningProblem) -> String {
    let mut s = String::new();
    for (i, (id, coeff)) in expr.terms.iter().enumerate() {
        let name = &problem.vars[id.0].name;
        if i == 0 {
            if *coeff < 0.0 {
                s.push_str(&format!("- {} {}", num(-coeff), name));
            } else {
                s.push_str(&format!("{} {}", num(*coeff), name));
            }
        } else if *coeff < 0.0 {
            s.push_str(&format!(" - {} {}", num(-coeff), name));
        } else {
            s.push_str(&format!(" + {} {}", num(*coeff), name));
        }
    }
    s
}

pub fn write_lp(problem: &PlanningProblem) -> String {
    let mut out = String::new();
    out.push_str(&format!("\\ {}\n", problem.name));
    out.push_str("Minimize\n obj: ");
    out.push_str(&terms(&problem.objective, problem));
    if problem.objective.constant != 0.0 {
        if problem.objective.constant < 0.0 {
            out.push_str(&format!(" - {}", num(-problem.objective.constant)));
        } else {
            out.push_str(&format!(" + {}", num(problem.objective.constant)));
        }
    }
    out.push_str("\nSubject To\n");
    for c in &problem.constraints {
        let body = terms(&c.expr, problem);
        let (lo, hi) = (c.lo - c.expr.constant, c.hi - c.expr.constant);
        match (c.lo == c.hi, c.lo.is_finite(), c.hi.is_finite()) {
            (true, _, _) => out.push_str(&format!(" {}: {} = {}\n", c.name, body, num(lo))),
            (false, true, true) => {
                out.push_str(&format!(" {}.lo: {} >= {}\n", c.name, body, num(lo)));
                out.push_str(&format!(" {}.hi: {} <= {}\n", c.name, body, num(hi)));
            }
            (false, true, false) => {
                out.push_str(&format!(" {}: {} >= {}\n", c.name, body, num(lo)))
            }
            (false, false, true) => {
                out.push_str(&format!(" {}: {} <= {}\n", c.name, body, num(hi)))
            }
            (false, false, false) => {}
        }
    }
    out.push_str("Bounds\n");
    for v in &problem.vars {
        if v.kind == VarKind::Binary {
            continue;
        }
        match (v.lb.is_finite(), v.ub.is_finite()) {
            (true, true) if v.lb == v.ub => {
                out.push_str(&format!(" {} = {}\n", v.name, num(v.lb)));
            }
            (true, true) => {
                out.push_str(&format!(" {} <= {} <= {}\n", num(v.lb), v.name, num(v.ub)));
            }
            (true, false) => out.push_str(&format!(" {} >= {}\n", v.name, num(v.lb))),
            (false, true) => {
                out.push_str(&format!(" -inf <= {} <= {}\n", v.name, num(v.ub)));
            }
            (false, false) => out.push_str(&format!(" {} free\n", v.name)),
        }
    }
    let binaries: Vec<&str> = problem
        .vars
        .iter()
        .filter(|v| v.kind == VarKind::Binary)
        .map(|v| v.name.as_str())
        .collect();
    if !binaries.is_empty() {
        out.push_str("Binary\n");
        for name in binaries {
            out.push_str(&format!(" {name}\n"));
        }
    }
    out.push_str("End\n");
    out
}

/// Row sense assigned in the MPS ROWS section.
fn mps_sense(c: &Constraint) -> (char, f64, Option<f64>) {
    let (lo, hi) = (c.lo - c.expr.constant, c.hi - c.expr.constant);
    if c.lo == c.hi {
        ('E', lo, None)
    } else if c.lo.is_finite() && c.hi.is_finite() {
        // L row at the upper end; RANGES recovers the lower end
        ('L', hi, Some(hi - lo))
    } else if c.hi.is_finite() {
        ('L', hi, None)
    } else {
        ('G', lo, None)
    }
}

pub fn write_mps(problem: &PlanningProblem) -> String {
    let mut out = String::new();
    out.push_str(&format!("NAME {}\n", problem.name));
    out.push_str("ROWS\n N obj\n");
    for c in &problem.constraints {
        let (sense, _, _) = mps_sense(c);
        out.push_str(&format!(" {sense} {}\n", c.name));
    }

    // entries per column, keyed by variable index, in row order
    let mut entries: Vec<Vec<(String, f64)>> = vec![Vec::new(); problem.vars.len()];
    for (id, coeff) in &problem.objective.terms {
        entries[id.0].push(("obj".to_string(), *coeff));
    }
    for c in &problem.constraints {
        for (id, coeff) in &c.expr.terms {
            entries[id.0].push((c.name.clone(), *coeff));
        }
    }

    out.push_str("COLUMNS\n");
    let mut in_integer_block = false;
    let mut marker = 0usize;
    for (v, cols) in problem.vars.iter().zip(&entries) {
        let wants_integer = v.kind == VarKind::Binary;
        if wants_integer != in_integer_block {
            let tag = if wants_integer { "'INTORG'" } else { "'INTEND'" };
            out.push_str(&format!(" MARKER{marker} 'MARKER' {tag}\n"));
            marker += 1;
            in_integer_block = wants_integer;
        }
        if cols.is_empty() {
            // declare otherwise unused columns with a null objective entry
            out.push_str(&format!(" {} obj 0\n", v.name));
        }
        for (row, coeff) in cols {
            out.push_str(&format!(" {} {} {}\n", v.name, row, num(*coeff)));
        }
    }
    if in_integer_block {
        out.push_str(&format!(" MARKER{marker} 'MARKER' 'INTEND'\n"));
    }

    out.push_str("RHS\n");
    if problem.objective.constant != 0.0 {
        out.push_str(&format!(" rhs obj {}\n", num(-problem.objective.constant)));
    }
    for c in &problem.constraints {
        let (_, rhs, _) = mps_sense(c);
        if rhs != 0.0 {
            out.push_str(&format!(" rhs {} {}\n", c.name, num(rhs)));
        }
    }

    let ranged: Vec<(&Constraint, f64)> = problem
        .constraints
        .iter()
        .filter_map(|c| mps_sense(c).2.map(|r| (c, r)))
        .collect();
    if !ranged.is_empty() {
        out.push_str("RANGES\n");
        for (c, range) in ranged {
            out.push_str(&format!(" rng {} {}\n", c.name, num(range)));
        }
    }

    out.push_str("BOUNDS\n");
    for v in &problem.vars {
        if v.kind == VarKind::Binary {
            out.push_str(&format!(" BV bnd {}\n", v.name));
            continue;
        }
        match (v.lb.is_finite(), v.ub.is_finite()) {
            (true, true) if v.lb == v.ub => {
                out.push_str(&format!(" FX bnd {} {}\n", v.name, num(v.lb)));
            }
            (true, true) => {
                if v.lb != 0.0 {
                    out.push_str(&format!(" LO bnd {} {}\n", v.name, num(v.lb)));
                }
                out.push_str(&format!(" UP bnd {} {}\n", v.name, num(v.ub)));
            }
            (true, false) => {
                if v.lb != 0.0 {
                    out.push_str(&format!(" LO bnd {} {}\n", v.name, num(v.lb)));
                }
            }
            (false, true) => {
                out.push_str(&format!(" MI bnd {}\n", v.name));
                out.push_str(&format!(" UP bnd {} {}\n", v.name, num(v.ub)));
            }
            (false, false) => out.push_str(&format!(" FR bnd {}\n", v.name)),
        }
    }
    out.push_str("ENDATA\n");
    out
}
