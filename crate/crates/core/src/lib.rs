//! Chain calculus on finite metric measure spaces.

pub mod chain;
pub mod error;
pub mod field;
pub mod fixtures;
pub mod gradient;
pub mod modulus;
pub mod poincare;
pub mod potential;
pub mod program;
pub mod report;
pub mod riemann;
pub mod shortest;
pub mod space;

pub use chain::{sample_chain_from_curve, Chain, SampledChain, StepCurve};
pub use error::{Error, Result};
pub use field::{FieldRole, ScalarField};
pub use gradient::{
    check_curve_consistency, energy_ladder, minimal_gradient, minimal_weak_gradient, slope_field, verify_upper_gradient,
    verify_with, GradientOptions, GradientProgram, VerifyOptions,
};
pub use modulus::{
    chain_modulus, is_weak_exceptional, keith_modulus_ladder, ChainFamily, FunctionClass, ModulusOptions, ModulusReport,
};
pub use poincare::{
    ball_pi_audit, bmc_audit, chain_width, minkowski_profile, pointwise_pi_check, riesz_weights, PIAudit, RieszWeights,
};
pub use potential::{
    chain_potential, eb_pipeline, leibniz_gradient, potential_gradient_check, EbOptions, PotentialSpec, SeedRule,
};
pub use program::{solve_program, LinearRow, MinNormProgram, ProgramSolution, SolveStatus, SolverOptions};
pub use report::SolveReport;
pub use riemann::riemann_sum;
pub use space::{Metric, PointCloudSpace};
