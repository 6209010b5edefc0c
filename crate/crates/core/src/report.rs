use serde::Serialize;

use crate::field::ext_real;
use crate::program::{ProgramSolution, SolveStatus};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveReport {
    #[serde(with = "ext_real")]
    pub objective: f64,
    /// Optimal field (`g*` or `ρ*`).
    #[serde(with = "ext_real::vec")]
    pub field: Vec<f64>,
    pub max_violation: f64,
    /// Certified lower bound on `objective`.
    #[serde(with = "ext_real")]
    pub dual_bound: f64,
    #[serde(with = "ext_real")]
    pub kkt_residual: f64,
    pub iterations: u32,
    pub cuts: usize,
    pub constraints: usize,
    pub status: SolveStatus,
}

impl SolveReport {
    /// Report in norm units: objective `(Σ w x^p)^(1/p)`.
    pub(crate) fn from_norm(sol: ProgramSolution, p: f64, constraints: usize) -> Self {
        let root = |v: f64| if v > 0.0 { v.powf(1.0 / p) } else { 0.0 };
        let dual_bound = if sol.dual_bound.is_finite() { root(sol.dual_bound) } else { sol.dual_bound };
        SolveReport {
            objective: root(sol.value),
            field: sol.x,
            max_violation: sol.max_violation,
            dual_bound,
            kkt_residual: sol.kkt_residual,
            iterations: sol.iterations,
            cuts: 0,
            constraints,
            status: sol.status,
        }
    }

    /// Report in energy units: objective `Σ w x^p`.
    pub(crate) fn from_value(sol: ProgramSolution, constraints: usize) -> Self {
        SolveReport {
            objective: sol.value,
            field: sol.x,
            max_violation: sol.max_violation,
            dual_bound: sol.dual_bound,
            kkt_residual: sol.kkt_residual,
            iterations: sol.iterations,
            cuts: 0,
            constraints,
            status: sol.status,
        }
    }

    pub(crate) fn empty(n: usize) -> Self {
        SolveReport {
            objective: 0.0,
            field: vec![0.0; n],
            max_violation: 0.0,
            dual_bound: 0.0,
            kkt_residual: 0.0,
            iterations: 0,
            cuts: 0,
            constraints: 0,
            status: SolveStatus::Optimal,
        }
    }
}
