//! Minimal-norm programs
//!
//! ```text
//! minimize  Σ_i w_i x_i^p   subject to  a_j · x >= r_j,  x >= 0
//! ```
//!
//! with optional variables pinned to zero. `p = 1` is a linear program
//! (simplex, certified by a separately solved dual), `p > 1` a convex
//! program (interior point; QP at `p = 2`, power cones otherwise).

mod conic;
mod polish;
mod simplex;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::ext_real;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearRow {
    /// Sparse `(variable, coefficient)` pairs.
    pub coeffs: Vec<(usize, f64)>,
    pub rhs: f64,
}

impl LinearRow {
    pub fn new(coeffs: Vec<(usize, f64)>, rhs: f64) -> Self {
        LinearRow { coeffs, rhs }
    }

    pub fn lhs(&self, x: &[f64]) -> f64 {
        self.coeffs.iter().map(|&(i, a)| a * x[i]).sum()
    }

    pub fn violation(&self, x: &[f64]) -> f64 {
        (self.rhs - self.lhs(x)).max(0.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinNormProgram {
    pub weights: Vec<f64>,
    pub p: f64,
    pub rows: Vec<LinearRow>,
    /// Variables forced to zero.
    #[serde(default)]
    pub fixed_zero: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Optimal,
    InfeasibleDetected,
    ToleranceReached,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    pub tol_feas: f64,
    /// Relative duality gap required at `p = 1`.
    pub tol_gap: f64,
    pub tol_kkt: f64,
    pub max_iter: u32,
    pub time_budget_ms: Option<u64>,
    /// Solve the dual as well and report the gap.
    pub certify: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { tol_feas: 1e-9, tol_gap: 1e-9, tol_kkt: 1e-7, max_iter: 200, time_budget_ms: None, certify: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProgramSolution {
    pub x: Vec<f64>,
    /// `Σ w x^p`.
    pub value: f64,
    /// Certified lower bound on `value` (`-inf` when uncertified).
    #[serde(with = "ext_real")]
    pub dual_bound: f64,
    pub max_violation: f64,
    /// Natural KKT residual of `(x, y)`, relative to the problem scale.
    #[serde(with = "ext_real")]
    pub kkt_residual: f64,
    /// Row multipliers, zero for rows removed in presolve.
    pub row_duals: Vec<f64>,
    pub iterations: u32,
    pub status: SolveStatus,
}

impl ProgramSolution {
    pub fn gap(&self) -> f64 {
        self.value - self.dual_bound
    }
}

/// Presolved program over a subset of the variables.
struct Reduced {
    /// Reduced index -> original index.
    vars: Vec<usize>,
    weights: Vec<f64>,
    rows: Vec<LinearRow>,
    /// Original index of each reduced row.
    row_origin: Vec<usize>,
    /// Rows dropped because a zero-cost variable can absorb them: (row, variable).
    deferred: Vec<(usize, usize)>,
}

fn presolve(prog: &MinNormProgram) -> Result<Reduced> {
    let n = prog.weights.len();
    let mut fixed = vec![false; n];
    for &v in &prog.fixed_zero {
        fixed[v] = true;
    }
    let mut live: Vec<(usize, LinearRow)> = Vec::new();
    for (j, row) in prog.rows.iter().enumerate() {
        let coeffs: Vec<(usize, f64)> = row.coeffs.iter().copied().filter(|&(i, a)| a != 0.0 && !fixed[i]).collect();
        let nonneg = coeffs.iter().all(|&(_, a)| a > 0.0);
        if nonneg && row.rhs <= 0.0 {
            continue;
        }
        if coeffs.is_empty() {
            return Err(Error::NoAdmissibleDensity);
        }
        live.push((j, LinearRow { coeffs, rhs: row.rhs }));
    }
    // A variable is free when it costs nothing and only ever helps.
    let mut free: Vec<bool> = (0..n).map(|i| !fixed[i] && prog.weights[i] == 0.0).collect();
    for (_, row) in &live {
        for &(i, a) in &row.coeffs {
            if a < 0.0 {
                free[i] = false;
            }
        }
    }
    let mut deferred = Vec::new();
    let mut kept = Vec::new();
    for (j, row) in live {
        match row.coeffs.iter().find(|&&(i, _)| free[i]) {
            Some(&(i, _)) => deferred.push((j, i)),
            None => kept.push((j, row)),
        }
    }
    let mut index = vec![usize::MAX; n];
    let mut vars = Vec::new();
    for (_, row) in &kept {
        for &(i, _) in &row.coeffs {
            if index[i] == usize::MAX {
                index[i] = 0;
            }
        }
    }
    for i in 0..n {
        if index[i] == 0 {
            index[i] = vars.len();
            vars.push(i);
        }
    }
    let weights = vars.iter().map(|&i| prog.weights[i]).collect();
    let (row_origin, rows) = kept
        .into_iter()
        .map(|(j, row)| (j, LinearRow { coeffs: row.coeffs.iter().map(|&(i, a)| (index[i], a)).collect(), rhs: row.rhs }))
        .unzip();
    Ok(Reduced { vars, weights, rows, row_origin, deferred })
}

/// Uniform up-scaling that restores feasibility when every row has
/// nonnegative coefficients and positive right-hand side.
fn repair(rows: &[LinearRow], x: &mut [f64]) {
    if rows.iter().any(|r| r.rhs <= 0.0 || r.coeffs.iter().any(|&(_, a)| a < 0.0)) {
        return;
    }
    let mut factor: f64 = 1.0;
    for r in rows {
        let lhs = r.lhs(x);
        if lhs < r.rhs && lhs > 0.0 {
            factor = factor.max(r.rhs / lhs);
        }
    }
    if factor > 1.0 {
        x.iter_mut().for_each(|v| *v *= factor);
    }
}

/// `|min(a, b)|`, the complementarity residual of `a >= 0, b >= 0, ab = 0`.
fn natural(a: f64, b: f64) -> f64 {
    a.min(b).abs()
}

/// Natural KKT residual of `(x, y)` for the reduced program, scaled by the
/// largest gradient or right-hand-side magnitude.
fn kkt_residual(red: &Reduced, p: f64, x: &[f64], y: &[f64]) -> f64 {
    let k = x.len();
    let mut c = vec![0.0; k];
    for (row, &yj) in red.rows.iter().zip(y) {
        for &(i, a) in &row.coeffs {
            c[i] += a * yj;
        }
    }
    let grad: Vec<f64> = (0..k).map(|i| p * red.weights[i] * x[i].max(0.0).powf(p - 1.0)).collect();
    let mut scale: f64 = 1.0;
    for g in &grad {
        scale = scale.max(g.abs());
    }
    for r in &red.rows {
        scale = scale.max(r.rhs.abs());
    }
    let mut res: f64 = 0.0;
    for i in 0..k {
        res = res.max(natural(x[i], grad[i] - c[i]));
    }
    for (row, &yj) in red.rows.iter().zip(y) {
        res = res.max(natural(yj, row.lhs(x) - row.rhs));
    }
    res / scale
}

/// Lagrangian lower bound `r·y + Σ_i min_{x>=0} (w x^p - c_i x)` with `c = Aᵀy`.
fn lagrangian_bound(red: &Reduced, p: f64, y: &[f64]) -> f64 {
    let k = red.weights.len();
    let mut c = vec![0.0; k];
    let mut bound = 0.0;
    for (row, &yj) in red.rows.iter().zip(y) {
        let yj = yj.max(0.0);
        bound += row.rhs * yj;
        for &(i, a) in &row.coeffs {
            c[i] += a * yj;
        }
    }
    for i in 0..k {
        let (w, ci) = (red.weights[i], c[i]);
        if ci <= 0.0 {
            continue;
        }
        if p == 1.0 {
            // Dual simplex round-off is tolerated at the last few ulps.
            if ci > w * (1.0 + 1e-12) + 1e-15 {
                return f64::NEG_INFINITY;
            }
        } else if w == 0.0 {
            return f64::NEG_INFINITY;
        } else {
            let xs = (ci / (p * w)).powf(1.0 / (p - 1.0));
            bound -= (p - 1.0) * w * xs.powf(p);
        }
    }
    bound
}

pub fn solve_program(prog: &MinNormProgram, opts: &SolverOptions) -> Result<ProgramSolution> {
    let n = prog.weights.len();
    if !(prog.p >= 1.0) || !prog.p.is_finite() {
        return Err(Error::InvalidArgument(format!("p must be a finite real >= 1, got {}", prog.p)));
    }
    if let Some(i) = prog.weights.iter().position(|w| !(w.is_finite() && *w >= 0.0)) {
        return Err(Error::NegativeMass { index: i, value: prog.weights[i] });
    }
    for row in &prog.rows {
        if !row.rhs.is_finite() {
            return Err(Error::InvalidArgument(format!("non-finite right-hand side {}", row.rhs)));
        }
        if let Some(&(i, _)) = row.coeffs.iter().find(|&&(i, a)| i >= n || !a.is_finite()) {
            return Err(Error::IndexOutOfRange { index: i, len: n });
        }
    }
    if let Some(&v) = prog.fixed_zero.iter().find(|&&v| v >= n) {
        return Err(Error::IndexOutOfRange { index: v, len: n });
    }
    let red = presolve(prog)?;
    let (mut xr, mut yr, iterations, solver_ok) = if red.rows.is_empty() {
        (vec![0.0; red.vars.len()], Vec::new(), 0, true)
    } else if prog.p == 1.0 {
        let x = simplex::solve_primal(&red)?;
        let y = if opts.certify { Some(simplex::solve_dual(&red)?) } else { None };
        (x, y.unwrap_or_default(), 1, true)
    } else {
        let out = conic::solve(&red, prog.p, opts)?;
        (out.x, out.y, out.iterations, out.converged)
    };
    if prog.p > 1.0 && !red.rows.is_empty() && kkt_residual(&red, prog.p, &xr, &yr) > 1e-2 * opts.tol_kkt {
        if let Some((xp, yp)) = polish::polish(&red, prog.p, &xr, &yr) {
            xr = xp;
            yr = yp;
        }
    }
    repair(&red.rows, &mut xr);

    let kkt = if red.rows.is_empty() {
        0.0
    } else if yr.len() == red.rows.len() {
        kkt_residual(&red, prog.p, &xr, &yr)
    } else {
        f64::INFINITY
    };
    let dual_bound = if red.rows.is_empty() {
        0.0
    } else if yr.len() == red.rows.len() {
        lagrangian_bound(&red, prog.p, &yr)
    } else {
        f64::NEG_INFINITY
    };

    let mut x = vec![0.0; n];
    for (r, &i) in red.vars.iter().enumerate() {
        x[i] = xr[r].max(0.0);
    }
    for &(j, v) in &red.deferred {
        let row = &prog.rows[j];
        let lhs = row.lhs(&x);
        if lhs < row.rhs {
            let a = row.coeffs.iter().filter(|&&(i, _)| i == v).map(|&(_, a)| a).sum::<f64>();
            x[v] += (row.rhs - lhs) / a;
        }
    }
    let mut row_duals = vec![0.0; prog.rows.len()];
    for (r, &j) in red.row_origin.iter().enumerate() {
        if let Some(&y) = yr.get(r) {
            row_duals[j] = y.max(0.0);
        }
    }
    let value: f64 = x.iter().zip(&prog.weights).map(|(&xi, &w)| if w == 0.0 { 0.0 } else { w * xi.powf(prog.p) }).sum();
    let max_violation = prog.rows.iter().map(|r| r.violation(&x)).fold(0.0, f64::max);
    let certified = if prog.p == 1.0 {
        !opts.certify || value - dual_bound <= opts.tol_gap * value.abs().max(1.0)
    } else {
        kkt <= opts.tol_kkt
    };
    let status = if solver_ok && certified && max_violation <= opts.tol_feas {
        SolveStatus::Optimal
    } else if !solver_ok && !certified {
        return Err(Error::SolverStall(format!("kkt residual {kkt:e} after {iterations} iterations")));
    } else {
        SolveStatus::ToleranceReached
    };
    Ok(ProgramSolution { x, value, dual_bound, max_violation, kkt_residual: kkt, row_duals, iterations, status })
}
