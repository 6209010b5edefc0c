//! (eps, p)-modulus of chain families by cutting planes.
//!
//! The restricted master `min Σ w ρ^p` over finitely many chain constraints
//! `∫_c ρ >= 1` is re-solved after each separation round; the separation
//! oracle returns the family member with the smallest λ-integral.

use std::collections::HashSet;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::chain::step_integral;
use crate::error::{check_eps, check_lambda, Error, Result};
use crate::field::ext_real;
use crate::poincare::riesz_weights;
use crate::program::{solve_program, LinearRow, MinNormProgram, SolveStatus, SolverOptions};
use crate::report::SolveReport;
use crate::shortest::dijkstra;
use crate::space::{build_epsilon_graph, EpsilonGraph, Metric, PointCloudSpace};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ChainFamily {
    /// Chains from `x` to `y`.
    Connect { x: usize, y: usize },
    /// Chains with at least one nonzero step that visit the set.
    Hit { set: Vec<usize> },
    /// Listed point sequences; members with a step longer than eps are outside the family.
    Explicit { chains: Vec<Vec<usize>> },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FunctionClass {
    AllBorel,
    /// Densities vanishing at the two poles.
    FiniteAt { x: usize, y: usize },
    /// With `bound = Some(K)`: `|ρ(i) - ρ(j)| <= K d(i, j)`. Without a bound every field qualifies.
    Lipschitz { bound: Option<f64> },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModulusOptions {
    pub solver: SolverOptions,
    /// Stop once every family member has `∫ ρ >= 1 - sep_tol`.
    pub sep_tol: f64,
    pub max_rounds: usize,
    /// Non-binding cuts are dropped every this many rounds.
    pub purge_every: usize,
}

impl Default for ModulusOptions {
    fn default() -> Self {
        ModulusOptions { solver: SolverOptions::default(), sep_tol: 1e-7, max_rounds: 5000, purge_every: 50 }
    }
}

/// `ρ_k = c k χ_E` with `c = 1 / min(λ, 1-λ)` (`c = 1` at λ ∈ {0, 1}) is
/// admissible for the members of `Chain(E)` whose nonzero steps are all at
/// least `1/k`; every such `ρ_k` has zero energy.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NullCertificate {
    pub set: Vec<usize>,
    pub lambda: f64,
    pub factor: f64,
    /// Sub-families `k = 1..=k_max`; `k_max >= 1 / (smallest distance)` covers the whole family.
    pub k_max: usize,
    /// At λ ∈ {0, 1}: only chains meeting the set at a charged position
    /// (not solely at the uncharged end) are covered.
    pub endpoint_excluded: bool,
}

impl NullCertificate {
    pub fn density(&self, n: usize, k: usize) -> Vec<f64> {
        let mut rho = vec![0.0; n];
        for &e in &self.set {
            rho[e] = self.factor * k as f64;
        }
        rho
    }

    /// Checks every `ρ_k`: each charged step of length `>= 1/k` touching the
    /// set integrates to at least 1, and the energy vanishes.
    pub fn verify(&self, space: &PointCloudSpace, weights: &[f64], eps: f64) -> Result<bool> {
        let graph = build_epsilon_graph(space, eps)?;
        let in_set = membership(space.len(), &self.set);
        if self.set.iter().any(|&e| weights[e] != 0.0) {
            return Ok(false);
        }
        for k in 1..=self.k_max {
            let rho = self.density(space.len(), k);
            for (a, b, d) in graph.edges() {
                if d < 1.0 / k as f64 {
                    continue;
                }
                for (s, t) in [(a, b), (b, a)] {
                    // A step only certifies when the set point on it is charged.
                    let charged = (in_set[s] && self.lambda > 0.0) || (in_set[t] && self.lambda < 1.0);
                    if charged && step_integral(rho[s], rho[t], self.lambda, d) < 1.0 - 1e-12 {
                        return Ok(false);
                    }
                }
            }
        }
        Ok(true)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModulusReport {
    /// `objective` is the modulus `Σ w ρ^p` (no root).
    #[serde(flatten)]
    pub report: SolveReport,
    /// No member exists: the modulus is 0 with no constraint at all.
    pub empty_family: bool,
    /// Smallest family integral of the returned density.
    #[serde(with = "ext_real")]
    pub min_family_integral: f64,
    pub binding_chains: Vec<Vec<usize>>,
    /// Explicit members dropped for a step longer than eps.
    pub excluded_chains: usize,
    pub certificate: Option<NullCertificate>,
}

fn membership(n: usize, set: &[usize]) -> Vec<bool> {
    let mut m = vec![false; n];
    for &e in set {
        m[e] = true;
    }
    m
}

/// Drops zero-length steps; `None` when nothing is left to integrate over.
fn collapse(space: &PointCloudSpace, points: &[usize]) -> Option<Vec<usize>> {
    let mut out = vec![points[0]];
    for &q in &points[1..] {
        if space.dist(*out.last().unwrap(), q) > 0.0 {
            out.push(q);
        }
    }
    (out.len() >= 2).then_some(out)
}

fn chain_integral(space: &PointCloudSpace, points: &[usize], rho: &[f64], lambda: f64) -> f64 {
    points.windows(2).map(|w| step_integral(rho[w[0]], rho[w[1]], lambda, space.dist(w[0], w[1]))).sum()
}

/// Aggregated coefficients of `ρ ↦ ∫_c ρ`, sorted by point.
fn chain_row(space: &PointCloudSpace, points: &[usize], lambda: f64) -> Vec<(usize, f64)> {
    let mut acc: Vec<(usize, f64)> = Vec::new();
    for w in points.windows(2) {
        let d = space.dist(w[0], w[1]);
        acc.push((w[0], lambda * d));
        acc.push((w[1], (1.0 - lambda) * d));
    }
    acc.sort_by_key(|&(i, _)| i);
    let mut out: Vec<(usize, f64)> = Vec::new();
    for (i, a) in acc {
        match out.last_mut() {
            Some(last) if last.0 == i => last.1 += a,
            _ => out.push((i, a)),
        }
    }
    out.retain(|&(_, a)| a != 0.0);
    out
}

/// Separation oracle: the family members of smallest λ-integral under `rho`
/// (one for graph families, every violated one for explicit lists).
/// Empty when the family has no member.
pub fn separate(
    space: &PointCloudSpace,
    graph: &EpsilonGraph,
    family: &ChainFamily,
    explicit: &[Vec<usize>],
    rho: &[f64],
    lambda: f64,
) -> Vec<(f64, Vec<usize>)> {
    match family {
        ChainFamily::Connect { x, y } => {
            let sp = dijkstra(graph, &[(*x, 0.0)], |i, j, d| step_integral(rho[i], rho[j], lambda, d));
            match sp.path_to(*y) {
                Some(path) => vec![(sp.dist[*y], path)],
                None => Vec::new(),
            }
        }
        ChainFamily::Hit { set } => {
            // Any member contains a nonzero step touching the set, and that
            // step alone is a member that costs no more.
            let in_set = membership(space.len(), set);
            let mut best: Option<(f64, Vec<usize>)> = None;
            for (a, b, d) in graph.edges() {
                if !(in_set[a] || in_set[b]) {
                    continue;
                }
                for (s, t) in [(a, b), (b, a)] {
                    let v = step_integral(rho[s], rho[t], lambda, d);
                    if best.as_ref().is_none_or(|(bv, _)| v < *bv) {
                        best = Some((v, vec![s, t]));
                    }
                }
            }
            best.into_iter().collect()
        }
        ChainFamily::Explicit { .. } => {
            let mut all: Vec<(f64, Vec<usize>)> =
                explicit.iter().map(|c| (chain_integral(space, c, rho, lambda), c.clone())).collect();
            all.sort_by(|a, b| a.0.total_cmp(&b.0));
            all
        }
    }
}

struct Master {
    rows: Vec<LinearRow>,
    chains: Vec<Vec<usize>>,
    seen: HashSet<Vec<(usize, u64)>>,
}

impl Master {
    fn add(&mut self, space: &PointCloudSpace, chain: Vec<usize>, lambda: f64) -> bool {
        let coeffs = chain_row(space, &chain, lambda);
        let key: Vec<(usize, u64)> = coeffs.iter().map(|&(i, a)| (i, a.to_bits())).collect();
        if !self.seen.insert(key) {
            return false;
        }
        self.rows.push(LinearRow::new(coeffs, 1.0));
        self.chains.push(chain);
        true
    }

    fn purge(&mut self, rho: &[f64]) {
        let keep: Vec<bool> = self.rows.iter().map(|r| r.lhs(rho) <= 1.0 + 1e-6).collect();
        let mut k = keep.iter();
        self.rows.retain(|_| *k.next().unwrap());
        let mut k = keep.iter();
        self.chains.retain(|_| *k.next().unwrap());
    }
}

fn class_rows(space: &PointCloudSpace, class: &FunctionClass) -> Result<(Vec<LinearRow>, Vec<usize>)> {
    match *class {
        FunctionClass::AllBorel | FunctionClass::Lipschitz { bound: None } => Ok((Vec::new(), Vec::new())),
        FunctionClass::FiniteAt { x, y } => {
            space.check_index(x)?;
            space.check_index(y)?;
            Ok((Vec::new(), vec![x, y]))
        }
        FunctionClass::Lipschitz { bound: Some(k) } => {
            if !(k >= 0.0 && k.is_finite()) {
                return Err(Error::InvalidArgument(format!("Lipschitz bound must be finite and nonnegative, got {k}")));
            }
            let n = space.len();
            let mut rows = Vec::new();
            for i in 0..n {
                for j in 0..n {
                    if i != j {
                        // ρ_i - ρ_j >= -K d
                        rows.push(LinearRow::new(vec![(i, 1.0), (j, -1.0)], -k * space.dist(i, j)));
                    }
                }
            }
            Ok((rows, Vec::new()))
        }
    }
}

#[allow(clippy::too_many_arguments)]
pub fn chain_modulus(
    space: &PointCloudSpace,
    family: &ChainFamily,
    eps: f64,
    p: f64,
    weights: &[f64],
    class: &FunctionClass,
    lambda: f64,
    opts: &ModulusOptions,
) -> Result<ModulusReport> {
    check_eps(eps)?;
    check_lambda(lambda)?;
    let n = space.len();
    if weights.len() != n {
        return Err(Error::LengthMismatch { expected: n, got: weights.len() });
    }
    if let Some(i) = weights.iter().position(|w| !(w.is_finite() && *w >= 0.0)) {
        return Err(Error::NegativeMass { index: i, value: weights[i] });
    }
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::InvalidArgument(format!("p must be a finite real >= 1, got {p}")));
    }
    let graph = build_epsilon_graph(space, eps)?;
    let mut explicit = Vec::new();
    let mut excluded = 0;
    match family {
        ChainFamily::Connect { x, y } => {
            space.check_index(*x)?;
            space.check_index(*y)?;
            if x == y {
                return Err(Error::InvalidArgument("connect family needs x != y".into()));
            }
        }
        ChainFamily::Hit { set } => {
            if set.is_empty() {
                return Err(Error::InvalidArgument("hit family needs a nonempty set".into()));
            }
            for &e in set {
                space.check_index(e)?;
            }
        }
        ChainFamily::Explicit { chains } => {
            for c in chains {
                if c.len() < 2 {
                    return Err(Error::InvalidArgument("a chain needs at least two points".into()));
                }
                for &q in c {
                    space.check_index(q)?;
                }
                if c.windows(2).any(|w| space.dist(w[0], w[1]) > eps) {
                    excluded += 1;
                    continue;
                }
                match collapse(space, c) {
                    Some(cc) => explicit.push(cc),
                    None => {
                        // A member with no length is never admissible.
                        let mut report = SolveReport::empty(n);
                        report.objective = f64::INFINITY;
                        report.dual_bound = f64::INFINITY;
                        report.status = SolveStatus::InfeasibleDetected;
                        return Ok(ModulusReport {
                            report,
                            empty_family: false,
                            min_family_integral: 0.0,
                            binding_chains: vec![c.clone()],
                            excluded_chains: excluded,
                            certificate: None,
                        });
                    }
                }
            }
        }
    }

    let certificate = match family {
        ChainFamily::Hit { set } if set.iter().all(|&e| weights[e] == 0.0) => {
            let m = lambda.min(1.0 - lambda);
            let sep = space.min_separation();
            Some(NullCertificate {
                set: set.clone(),
                lambda,
                factor: if m > 0.0 { 1.0 / m } else { 1.0 },
                k_max: if sep.is_finite() { (1.0 / sep).ceil().max(1.0) as usize } else { 1 },
                endpoint_excluded: m == 0.0,
            })
        }
        _ => None,
    };

    let (fixed_rows, fixed_zero) = class_rows(space, class)?;
    let start = Instant::now();
    let mut master = Master { rows: Vec::new(), chains: Vec::new(), seen: HashSet::new() };
    let mut rho = vec![0.0; n];
    let mut round_opts = opts.solver;
    round_opts.certify = false;
    let mut rounds = 0;
    let mut min_integral;
    let mut stalled = false;
    loop {
        let found = separate(space, &graph, family, &explicit, &rho, lambda);
        if found.is_empty() {
            let mut report = SolveReport::empty(n);
            report.iterations = rounds as u32;
            return Ok(ModulusReport {
                report,
                empty_family: true,
                min_family_integral: f64::INFINITY,
                binding_chains: Vec::new(),
                excluded_chains: excluded,
                certificate,
            });
        }
        min_integral = found[0].0;
        if min_integral >= 1.0 - opts.sep_tol {
            break;
        }
        let out_of_time = opts.solver.time_budget_ms.is_some_and(|ms| start.elapsed().as_millis() as u64 > ms);
        if rounds >= opts.max_rounds || out_of_time {
            stalled = true;
            break;
        }
        let mut added = false;
        for (v, c) in found {
            if v >= 1.0 - opts.sep_tol {
                break;
            }
            added |= master.add(space, c, lambda);
        }
        if !added {
            // The master already holds the violated cut: numerical floor reached.
            stalled = true;
            break;
        }
        rounds += 1;
        if rounds % opts.purge_every.max(1) == 0 {
            master.purge(&rho);
        }
        rho = solve_master(&master, &fixed_rows, &fixed_zero, weights, p, &round_opts)?.x;
    }
    let mut sol = solve_master(&master, &fixed_rows, &fixed_zero, weights, p, &opts.solver)?;
    if sol.x != rho {
        rho = sol.x.clone();
        min_integral = separate(space, &graph, family, &explicit, &rho, lambda).first().map_or(f64::INFINITY, |f| f.0);
    }
    if stalled || min_integral < 1.0 - opts.sep_tol {
        sol.status = SolveStatus::ToleranceReached;
    }
    let binding_chains = master
        .rows
        .iter()
        .zip(&master.chains)
        .filter(|(r, _)| r.lhs(&rho) <= 1.0 + 1e-9)
        .map(|(_, c)| c.clone())
        .collect();
    let constraints = master.rows.len();
    let mut report = SolveReport::from_value(sol, constraints);
    report.cuts = constraints;
    report.iterations = rounds as u32;
    Ok(ModulusReport {
        report,
        empty_family: false,
        min_family_integral: min_integral,
        binding_chains,
        excluded_chains: excluded,
        certificate,
    })
}

fn solve_master(
    master: &Master,
    fixed_rows: &[LinearRow],
    fixed_zero: &[usize],
    weights: &[f64],
    p: f64,
    opts: &SolverOptions,
) -> Result<crate::program::ProgramSolution> {
    let mut rows = master.rows.clone();
    rows.extend_from_slice(fixed_rows);
    let prog = MinNormProgram { weights: weights.to_vec(), p, rows, fixed_zero: fixed_zero.to_vec() };
    solve_program(&prog, opts)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExceptionalVerdict {
    pub exceptional: bool,
    #[serde(with = "ext_real")]
    pub modulus: f64,
    pub certificate: Option<NullCertificate>,
}

/// Modulus-null test for a family, with the explicit zero-mass certificate
/// when the family is `hit(E)` with `m(E) = 0`.
pub fn is_weak_exceptional(
    space: &PointCloudSpace,
    family: &ChainFamily,
    eps: f64,
    p: f64,
    lambda: f64,
    opts: &ModulusOptions,
) -> Result<ExceptionalVerdict> {
    let r = chain_modulus(space, family, eps, p, space.masses(), &FunctionClass::AllBorel, lambda, opts)?;
    let certificate = match r.certificate {
        Some(c) if c.verify(space, space.masses(), eps)? => Some(c),
        _ => None,
    };
    Ok(ExceptionalVerdict { exceptional: r.report.objective <= 1e-9, modulus: r.report.objective, certificate })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KeithRung {
    pub eps: f64,
    #[serde(with = "ext_real")]
    pub modulus: f64,
    /// `modulus · d(x, y)^(p-1)`.
    #[serde(with = "ext_real")]
    pub scaled: f64,
    pub status: SolveStatus,
    pub empty_family: bool,
}

/// Modulus of `connect(x, y)` against the truncated Riesz measure, per eps.
#[allow(clippy::too_many_arguments)]
pub fn keith_modulus_ladder(
    space: &PointCloudSpace,
    x: usize,
    y: usize,
    l: f64,
    p: f64,
    eps_list: &[f64],
    class: &FunctionClass,
    lambda: f64,
    opts: &ModulusOptions,
) -> Result<Vec<KeithRung>> {
    space.check_index(x)?;
    space.check_index(y)?;
    if x == y {
        return Err(Error::InvalidArgument("x and y must differ".into()));
    }
    let rw = riesz_weights(space, x, y, l)?;
    let weights: Vec<f64> = rw.weights.iter().zip(space.masses()).map(|(r, m)| r * m).collect();
    let scale = space.dist(x, y).powf(p - 1.0);
    eps_list
        .iter()
        .map(|&eps| {
            let r = chain_modulus(space, &ChainFamily::Connect { x, y }, eps, p, &weights, class, lambda, opts)?;
            let m = r.report.objective;
            Ok(KeithRung { eps, modulus: m, scaled: m * scale, status: r.report.status, empty_family: r.empty_family })
        })
        .collect()
}
