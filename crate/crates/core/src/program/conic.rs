use clarabel::algebra::CscMatrix;
use clarabel::solver::{
    DefaultSettings, DefaultSolver, IPSolver, NonnegativeConeT, PowerConeT, SolverStatus, SupportedConeT,
};

use super::{Reduced, SolverOptions};
use crate::error::{Error, Result};

pub(super) struct ConicOutput {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub iterations: u32,
    pub converged: bool,
}

/// Interior-point solve. Layout: `x` (k), then one epigraph variable `t_i`
/// per positive weight when `p != 2`.
pub(super) fn solve(red: &Reduced, p: f64, opts: &SolverOptions) -> Result<ConicOutput> {
    let k = red.weights.len();
    let m = red.rows.len();
    let quadratic = p == 2.0;
    let epi: Vec<usize> = if quadratic { Vec::new() } else { (0..k).filter(|&i| red.weights[i] > 0.0).collect() };
    let nv = k + epi.len();

    let (mut ri, mut cj, mut vals) = (Vec::new(), Vec::new(), Vec::new());
    let mut b = Vec::new();
    let mut push = |r: usize, c: usize, v: f64| {
        ri.push(r);
        cj.push(c);
        vals.push(v);
    };
    // a·x >= r  as  -a·x + s = -r, s >= 0
    for (j, row) in red.rows.iter().enumerate() {
        for &(i, a) in &row.coeffs {
            push(j, i, -a);
        }
        b.push(-row.rhs);
    }
    for i in 0..k {
        push(m + i, i, -1.0);
        b.push(0.0);
    }
    let mut cones: Vec<SupportedConeT<f64>> = vec![NonnegativeConeT(m + k)];
    // (t_i, 1, x_i) in the power cone with exponent 1/p: t_i >= x_i^p
    let mut r = m + k;
    for (e, &i) in epi.iter().enumerate() {
        push(r, k + e, -1.0);
        push(r + 2, i, -1.0);
        b.extend_from_slice(&[0.0, 1.0, 0.0]);
        cones.push(PowerConeT(1.0 / p));
        r += 3;
    }
    let a = CscMatrix::new_from_triplets(r, nv, ri, cj, vals);

    let (pm, q) = if quadratic {
        let diag: Vec<usize> = (0..k).collect();
        let pm = CscMatrix::new_from_triplets(nv, nv, diag.clone(), diag, red.weights.iter().map(|w| 2.0 * w).collect());
        (pm, vec![0.0; nv])
    } else {
        let mut q = vec![0.0; nv];
        for (e, &i) in epi.iter().enumerate() {
            q[k + e] = red.weights[i];
        }
        (CscMatrix::zeros((nv, nv)), q)
    };

    let settings = DefaultSettings {
        verbose: false,
        max_iter: opts.max_iter,
        time_limit: opts.time_budget_ms.map_or(f64::INFINITY, |ms| ms as f64 / 1000.0),
        tol_gap_abs: 1e-11,
        tol_gap_rel: 1e-11,
        tol_feas: 1e-11,
        tol_ktratio: 1e-9,
        ..DefaultSettings::default()
    };
    let mut solver =
        DefaultSolver::new(&pm, &q, &a, &b, &cones, settings).map_err(|e| Error::SolverStall(e.to_string()))?;
    solver.solve();
    let sol = &solver.solution;
    match sol.status {
        SolverStatus::PrimalInfeasible | SolverStatus::AlmostPrimalInfeasible => Err(Error::NoAdmissibleDensity),
        status => Ok(ConicOutput {
            x: sol.x[..k].to_vec(),
            y: sol.z[..m].to_vec(),
            iterations: sol.iterations,
            converged: matches!(status, SolverStatus::Solved | SolverStatus::AlmostSolved),
        }),
    }
}
