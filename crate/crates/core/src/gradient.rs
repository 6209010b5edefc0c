//! eps-upper gradients: verification, slopes, and minimal-norm synthesis.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::chain::step_integral;
use crate::error::{check_eps, check_lambda, Error, Result};
use crate::field::ScalarField;
use crate::program::{solve_program, LinearRow, MinNormProgram, SolveStatus, SolverOptions};
use crate::report::SolveReport;
use crate::space::{build_epsilon_graph, EpsilonGraph, Metric, PointCloudSpace};

/// `sl_eps u(x) = max |u(y) - u(x)| / d(x, y)` over `0 < d(x, y) <= eps`.
pub fn slope_field(space: &PointCloudSpace, u: &ScalarField, eps: f64) -> Result<ScalarField> {
    check_eps(eps)?;
    u.check_len(space.len())?;
    u.check_finite()?;
    let n = space.len();
    let values = (0..n)
        .map(|x| {
            (0..n)
                .filter(|&y| y != x && space.dist(x, y) <= eps)
                .map(|y| (u[y] - u[x]).abs() / space.dist(x, y))
                .fold(0.0, f64::max)
        })
        .collect();
    ScalarField::gradient(values)
}

/// True when the two-point constraint `x -> y` concerns a chain family that is
/// modulus-null: a zero-mass point carrying positive weight in the integral.
pub(crate) fn weakly_negligible(space: &PointCloudSpace, x: usize, y: usize, lambda: f64) -> bool {
    (lambda > 0.0 && space.mass(x) == 0.0) || (lambda < 1.0 && space.mass(y) == 0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerifyOptions {
    pub lambda: f64,
    /// Test `u(y) - u(x)` instead of `|u(y) - u(x)|`.
    pub one_sided: bool,
    /// Skip constraints whose chains are modulus-null (p-weak variant).
    pub weak: bool,
    pub rel_tol: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { lambda: 0.5, one_sided: false, weak: false, rel_tol: 1e-9 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub from: usize,
    pub to: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub deficit: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub accepted: bool,
    pub pairs_checked: usize,
    pub violations: Vec<Violation>,
}

/// Ordered pairs to test: both orientations, or one per unordered pair when
/// the test is symmetric (two-sided at λ = 1/2).
fn constraint_pairs(graph: &EpsilonGraph, lambda: f64, one_sided: bool) -> Vec<(usize, usize, f64)> {
    let symmetric = lambda == 0.5 && !one_sided;
    let mut pairs = Vec::new();
    for i in 0..graph.len() {
        for &(j, d) in graph.neighbors(i) {
            if !symmetric || i < j {
                pairs.push((i, j, d));
            }
        }
    }
    pairs
}

pub fn verify_upper_gradient(
    space: &PointCloudSpace,
    u: &ScalarField,
    g: &ScalarField,
    eps: f64,
    lambda: f64,
) -> Result<Verdict> {
    verify_with(space, u, g, eps, &VerifyOptions { lambda, ..VerifyOptions::default() })
}

pub fn verify_with(
    space: &PointCloudSpace,
    u: &ScalarField,
    g: &ScalarField,
    eps: f64,
    opts: &VerifyOptions,
) -> Result<Verdict> {
    check_lambda(opts.lambda)?;
    u.check_len(space.len())?;
    g.check_len(space.len())?;
    u.check_finite()?;
    if let Some(i) = g.values().iter().position(|&v| v < 0.0) {
        return Err(Error::InvalidArgument(format!("gradient is negative at point {i}")));
    }
    let graph = build_epsilon_graph(space, eps)?;
    let mut verdict = Verdict { accepted: true, pairs_checked: 0, violations: Vec::new() };
    for (x, y, d) in constraint_pairs(&graph, opts.lambda, opts.one_sided) {
        if opts.weak && weakly_negligible(space, x, y, opts.lambda) {
            continue;
        }
        verdict.pairs_checked += 1;
        let diff = u[y] - u[x];
        let lhs = if opts.one_sided { diff } else { diff.abs() };
        let rhs = step_integral(g[x], g[y], opts.lambda, d);
        if lhs - rhs > opts.rel_tol * lhs.abs().max(1.0) {
            verdict.accepted = false;
            verdict.violations.push(Violation { from: x, to: y, lhs, rhs, deficit: lhs - rhs });
        }
    }
    Ok(verdict)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[derive(Default)]
pub struct GradientOptions {
    pub one_sided: bool,
    pub solver: SolverOptions,
}


/// The two-point reduction as a minimal-norm program.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GradientProgram {
    pub eps: f64,
    pub lambda: f64,
    pub one_sided: bool,
    pub weak: bool,
    /// Ordered pair behind each row.
    pub pairs: Vec<(usize, usize)>,
    pub program: MinNormProgram,
}

impl GradientProgram {
    pub fn build(
        space: &PointCloudSpace,
        u: &ScalarField,
        eps: f64,
        p: f64,
        lambda: f64,
        one_sided: bool,
        weak: bool,
    ) -> Result<Self> {
        check_lambda(lambda)?;
        u.check_len(space.len())?;
        u.check_finite()?;
        if !(p >= 1.0 && p.is_finite()) {
            return Err(Error::InvalidArgument(format!("p must be a finite real >= 1, got {p}")));
        }
        let graph = build_epsilon_graph(space, eps)?;
        let mut pairs = Vec::new();
        let mut rows = Vec::new();
        for (x, y, d) in constraint_pairs(&graph, lambda, one_sided) {
            if weak && weakly_negligible(space, x, y, lambda) {
                continue;
            }
            let diff = u[y] - u[x];
            let rhs = if one_sided { diff } else { diff.abs() } / d;
            let coeffs = [(x, lambda), (y, 1.0 - lambda)].into_iter().filter(|&(_, a)| a != 0.0).collect();
            pairs.push((x, y));
            rows.push(LinearRow::new(coeffs, rhs));
        }
        let program = MinNormProgram { weights: space.masses().to_vec(), p, rows, fixed_zero: Vec::new() };
        Ok(GradientProgram { eps, lambda, one_sided, weak, pairs, program })
    }

    pub fn solve(&self, opts: &SolverOptions) -> Result<SolveReport> {
        let sol = solve_program(&self.program, opts)?;
        Ok(SolveReport::from_norm(sol, self.program.p, self.program.rows.len()))
    }
}

/// Minimal `L^p(m)` norm over eps-upper gradients of `u`.
pub fn minimal_gradient(
    space: &PointCloudSpace,
    u: &ScalarField,
    eps: f64,
    p: f64,
    lambda: f64,
    opts: &GradientOptions,
) -> Result<SolveReport> {
    GradientProgram::build(space, u, eps, p, lambda, opts.one_sided, false)?.solve(&opts.solver)
}

/// As [`minimal_gradient`], without the constraints whose chains are
/// modulus-null because they charge a zero-mass point.
pub fn minimal_weak_gradient(
    space: &PointCloudSpace,
    u: &ScalarField,
    eps: f64,
    p: f64,
    lambda: f64,
    opts: &GradientOptions,
) -> Result<SolveReport> {
    GradientProgram::build(space, u, eps, p, lambda, opts.one_sided, true)?.solve(&opts.solver)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LadderRung {
    pub eps: f64,
    pub objective: f64,
    pub constraints: usize,
    pub status: SolveStatus,
}

pub fn energy_ladder(
    space: &PointCloudSpace,
    u: &ScalarField,
    eps_list: &[f64],
    p: f64,
    lambda: f64,
    opts: &GradientOptions,
) -> Result<Vec<LadderRung>> {
    if eps_list.is_empty() {
        return Err(Error::InvalidArgument("empty eps list".into()));
    }
    if eps_list.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::InvalidArgument("eps list must be strictly decreasing".into()));
    }
    eps_list
        .iter()
        .map(|&eps| {
            let r = minimal_gradient(space, u, eps, p, lambda, opts)?;
            Ok(LadderRung { eps, objective: r.objective, constraints: r.constraints, status: r.status })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyOptions {
    /// Exhaustive enumeration up to this many points, random walks above.
    pub exhaustive_limit: usize,
    pub walks: usize,
    pub seed: u64,
}

impl Default for ConsistencyOptions {
    fn default() -> Self {
        ConsistencyOptions { exhaustive_limit: 8, walks: 10_000, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveConsistency {
    pub consistent: bool,
    pub exhaustive: bool,
    pub paths_checked: usize,
    /// First path found with `∫ g < |Δu|`, and its deficit.
    pub counterexample: Option<(Vec<usize>, f64)>,
}

struct PathCheck<'a> {
    space: &'a PointCloudSpace,
    graph: EpsilonGraph,
    u: &'a [f64],
    g: &'a [f64],
    out: CurveConsistency,
}

impl PathCheck<'_> {
    /// Checks the path ending at its last point; `integral` is its λ=1/2 integral.
    fn check(&mut self, path: &[usize], integral: f64) {
        let (s, t) = (path[0], *path.last().unwrap());
        if !self.g[t].is_finite() {
            return;
        }
        self.out.paths_checked += 1;
        let jump = (self.u[t] - self.u[s]).abs();
        if jump - integral > 1e-9 * jump.max(1.0) && self.out.counterexample.is_none() {
            self.out.consistent = false;
            self.out.counterexample = Some((path.to_vec(), jump - integral));
        }
    }

    fn dfs(&mut self, path: &mut Vec<usize>, on_path: &mut [bool], integral: f64) {
        let last = *path.last().unwrap();
        let nbrs: Vec<(usize, f64)> = self.graph.neighbors(last).to_vec();
        for (j, d) in nbrs {
            if on_path[j] {
                continue;
            }
            let next = integral + step_integral(self.g[last], self.g[j], 0.5, d);
            path.push(j);
            on_path[j] = true;
            self.check(path, next);
            self.dfs(path, on_path, next);
            on_path[j] = false;
            path.pop();
        }
    }
}

/// Checks `|u(ω) - u(α)| <= ∫ g` along simple eps-graph paths between
/// finite-`g` endpoints (λ = 1/2), for a verified eps-upper gradient `g`.
pub fn check_curve_consistency(
    space: &PointCloudSpace,
    u: &ScalarField,
    g: &ScalarField,
    eps: f64,
    opts: &ConsistencyOptions,
) -> Result<CurveConsistency> {
    if !verify_upper_gradient(space, u, g, eps, 0.5)?.accepted {
        return Err(Error::InvalidArgument("g is not an eps-upper gradient of u".into()));
    }
    let n = space.len();
    let exhaustive = n <= opts.exhaustive_limit;
    let mut pc = PathCheck {
        space,
        graph: build_epsilon_graph(space, eps)?,
        u: u.values(),
        g: g.values(),
        out: CurveConsistency { consistent: true, exhaustive, paths_checked: 0, counterexample: None },
    };
    let starts: Vec<usize> = (0..n).filter(|&i| g[i].is_finite()).collect();
    if exhaustive {
        for &s in &starts {
            let mut on_path = vec![false; n];
            on_path[s] = true;
            pc.dfs(&mut vec![s], &mut on_path, 0.0);
        }
    } else if !starts.is_empty() {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        for _ in 0..opts.walks {
            let s = starts[rng.gen_range(0..starts.len())];
            let mut path = vec![s];
            let mut on_path = vec![false; n];
            on_path[s] = true;
            let mut integral = 0.0;
            loop {
                let last = *path.last().unwrap();
                let open: Vec<(usize, f64)> =
                    pc.graph.neighbors(last).iter().copied().filter(|&(j, _)| !on_path[j]).collect();
                if open.is_empty() {
                    break;
                }
                let (j, d) = open[rng.gen_range(0..open.len())];
                integral += step_integral(pc.g[last], pc.g[j], 0.5, d);
                path.push(j);
                on_path[j] = true;
                pc.check(&path, integral);
            }
        }
    }
    let _ = pc.space;
    Ok(pc.out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{generate_space, MassRule, SpaceGenerator};

    fn line(xs: &[f64]) -> PointCloudSpace {
        PointCloudSpace::from_coords(xs.iter().map(|&x| vec![x]).collect(), vec![1.0; xs.len()]).unwrap()
    }

    fn f(v: &[f64]) -> ScalarField {
        ScalarField::function(v.to_vec()).unwrap()
    }

    fn gr(v: &[f64]) -> ScalarField {
        ScalarField::gradient(v.to_vec()).unwrap()
    }

    #[test]
    fn slopes() {
        let s = line(&[0.0, 0.5, 1.0]);
        assert_eq!(slope_field(&s, &f(&[0.0, 0.5, 1.0]), 0.6).unwrap().values(), &[1.0, 1.0, 1.0]);
        assert_eq!(slope_field(&s, &f(&[3.0; 3]), 0.6).unwrap().values(), &[0.0; 3]);
        let iso = line(&[0.0, 0.5, 5.0]);
        assert_eq!(slope_field(&iso, &f(&[0.0, 1.0, 7.0]), 0.6).unwrap()[2], 0.0);
    }

    #[test]
    fn two_point_verdicts() {
        let s = line(&[0.0, 1.0]);
        let u = f(&[0.0, 1.0]);
        assert!(verify_upper_gradient(&s, &u, &gr(&[1.0, 1.0]), 1.0, 0.5).unwrap().accepted);
        let v = verify_upper_gradient(&s, &u, &gr(&[0.0, 1.5]), 1.0, 0.5).unwrap();
        assert!(!v.accepted);
        assert_eq!((v.violations[0].from, v.violations[0].to), (0, 1));
        assert!((v.violations[0].deficit - 0.25).abs() < 1e-15);
    }

    #[test]
    fn one_sided_only_tests_increase() {
        let s = line(&[0.0, 1.0]);
        let u = f(&[1.0, 0.0]);
        // λ = 1 charges the start point: only 1 -> 0 climbs, and it is paid by g(1).
        let opts = VerifyOptions { lambda: 1.0, one_sided: true, ..VerifyOptions::default() };
        assert!(verify_with(&s, &u, &gr(&[0.0, 1.0]), 1.0, &opts).unwrap().accepted);
        assert!(!verify_with(&s, &u, &gr(&[1.0, 0.0]), 1.0, &opts).unwrap().accepted);
        assert!(!verify_upper_gradient(&s, &u, &gr(&[0.0, 1.0]), 1.0, 1.0).unwrap().accepted);
    }

    #[test]
    fn slope_is_an_upper_gradient() {
        let s = line(&[0.0, 0.3, 0.5, 1.1, 1.2]);
        let u = f(&[0.0, 2.0, -1.0, 0.5, 3.0]);
        for &eps in &[0.2, 0.6, 2.0] {
            let g = slope_field(&s, &u, eps).unwrap();
            for &lambda in &[0.0, 0.25, 0.5, 1.0] {
                assert!(verify_upper_gradient(&s, &u, &g, eps, lambda).unwrap().accepted);
            }
        }
    }

    #[test]
    fn constant_u_has_zero_gradient() {
        let s = line(&[0.0, 1.0, 2.0]);
        let r = minimal_gradient(&s, &f(&[2.0; 3]), 5.0, 2.0, 0.5, &GradientOptions::default()).unwrap();
        assert_eq!(r.objective, 0.0);
        assert_eq!(r.field, vec![0.0; 3]);
    }

    #[test]
    fn identity_on_grid() {
        let s = generate_space(&SpaceGenerator::Grid { dim: 1, side: 11, spacing: 0.1, mass: MassRule::CellVolume })
            .unwrap();
        let u = f(&s.coords().unwrap().iter().map(|c| c[0]).collect::<Vec<_>>());
        // p = 1: the alternating field 0, 2, 0, ... reaches 1.
        let r1 = minimal_gradient(&s, &u, 0.1, 1.0, 0.5, &GradientOptions::default()).unwrap();
        assert!((r1.objective - 1.0).abs() < 1e-9, "{}", r1.objective);
        // p = 2: all ten constraints bind, g_i = 1 -+ 1/11 alternating.
        let r2 = minimal_gradient(&s, &u, 0.1, 2.0, 0.5, &GradientOptions::default()).unwrap();
        assert!((r2.objective - (12.0f64 / 11.0).sqrt()).abs() < 1e-7, "{}", r2.objective);
        let r3 = minimal_gradient(&s, &u, 0.1, 3.0, 0.5, &GradientOptions::default()).unwrap();
        for r in [&r1, &r2, &r3] {
            assert_eq!(r.status, SolveStatus::Optimal);
        }
    }

    #[test]
    fn weak_drops_zero_mass_constraints() {
        let s = line(&[0.0, 1.0, 2.0]).with_masses(vec![1.0, 0.0, 1.0]).unwrap();
        let u = f(&[0.0, 10.0, 0.0]);
        let strong = minimal_gradient(&s, &u, 1.0, 1.0, 0.5, &GradientOptions::default()).unwrap();
        let weak = minimal_weak_gradient(&s, &u, 1.0, 1.0, 0.5, &GradientOptions::default()).unwrap();
        assert_eq!(weak.constraints, 0);
        assert_eq!(weak.objective, 0.0);
        // the zero-mass point absorbs every constraint at no cost
        assert_eq!(strong.objective, 0.0);
        assert!(strong.field[1] >= 20.0);
        assert_eq!(weak.field[1], 0.0);
    }

    #[test]
    fn ladder_rejects_bad_lists() {
        let s = line(&[0.0, 1.0]);
        let u = f(&[0.0, 1.0]);
        let o = GradientOptions::default();
        assert!(energy_ladder(&s, &u, &[], 1.0, 0.5, &o).is_err());
        assert!(energy_ladder(&s, &u, &[0.5, 1.0], 1.0, 0.5, &o).is_err());
        let lad = energy_ladder(&s, &u, &[2.0, 0.5], 1.0, 0.5, &o).unwrap();
        assert!(lad[0].objective > 0.0);
        assert_eq!(lad[1].objective, 0.0);
    }

    #[test]
    fn curve_consistency_exhaustive() {
        let s = line(&[0.0, 0.4, 0.9, 1.2, 1.5]);
        let u = f(&[0.0, 1.0, -0.5, 2.0, 2.5]);
        let g = slope_field(&s, &u, 0.6).unwrap();
        let c = check_curve_consistency(&s, &u, &g, 0.6, &ConsistencyOptions::default()).unwrap();
        assert!(c.consistent && c.exhaustive && c.paths_checked > 0);
    }

    #[test]
    fn infinite_cut_vertex() {
        let s = line(&[0.0, 1.0, 2.0]);
        let u = f(&[0.0, 0.0, 5.0]);
        let g = gr(&[0.0, f64::INFINITY, 0.0]);
        assert!(verify_upper_gradient(&s, &u, &g, 1.0, 0.5).unwrap().accepted);
        let c = check_curve_consistency(&s, &u, &g, 1.0, &ConsistencyOptions::default()).unwrap();
        assert!(c.consistent);
    }

    #[test]
    fn zero_gradient_of_step_is_rejected() {
        let s = line(&[0.0, 1.0, 2.0]);
        let u = f(&[0.0, 0.0, 1.0]);
        let g = gr(&[0.0; 3]);
        assert!(!verify_upper_gradient(&s, &u, &g, 1.0, 0.5).unwrap().accepted);
        assert!(check_curve_consistency(&s, &u, &g, 1.0, &ConsistencyOptions::default()).is_err());
    }
}
