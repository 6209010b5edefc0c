use microlp::{ComparisonOp, OptimizationDirection, Problem};

use super::Reduced;
use crate::error::{Error, Result};

fn map_err(e: microlp::Error) -> Error {
    match e {
        microlp::Error::Infeasible => Error::NoAdmissibleDensity,
        other => Error::SolverStall(other.to_string()),
    }
}

pub(super) fn solve_primal(red: &Reduced) -> Result<Vec<f64>> {
    let mut lp = Problem::new(OptimizationDirection::Minimize);
    let vars: Vec<_> = red.weights.iter().map(|&w| lp.add_var(w, (0.0, f64::INFINITY))).collect();
    for row in &red.rows {
        let expr: Vec<_> = row.coeffs.iter().map(|&(i, a)| (vars[i], a)).collect();
        lp.add_constraint(expr.as_slice(), ComparisonOp::Ge, row.rhs);
    }
    let sol = lp.solve().map_err(map_err)?;
    Ok(vars.iter().map(|&v| *sol.var_value(v)).collect())
}

/// `max r·y  s.t.  Aᵀy <= w, y >= 0`.
pub(super) fn solve_dual(red: &Reduced) -> Result<Vec<f64>> {
    let mut lp = Problem::new(OptimizationDirection::Maximize);
    let ys: Vec<_> = red.rows.iter().map(|r| lp.add_var(r.rhs, (0.0, f64::INFINITY))).collect();
    let mut columns: Vec<Vec<(usize, f64)>> = vec![Vec::new(); red.weights.len()];
    for (j, row) in red.rows.iter().enumerate() {
        for &(i, a) in &row.coeffs {
            columns[i].push((j, a));
        }
    }
    for (i, col) in columns.iter().enumerate() {
        let expr: Vec<_> = col.iter().map(|&(j, a)| (ys[j], a)).collect();
        lp.add_constraint(expr.as_slice(), ComparisonOp::Le, red.weights[i]);
    }
    let sol = lp.solve().map_err(|e| Error::SolverStall(format!("dual: {e}")))?;
    Ok(ys.iter().map(|&v| *sol.var_value(v)).collect())
}
