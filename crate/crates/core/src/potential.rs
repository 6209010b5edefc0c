//! Chain potentials, the Leibniz gradient and the density-in-energy pipeline.

use serde::{Deserialize, Serialize};

use crate::chain::step_integral;
use crate::error::{check_eps, check_lambda, Error, Result};
use crate::field::{ext_real, ScalarField};
use crate::gradient::{slope_field, verify_upper_gradient, verify_with, Verdict, VerifyOptions};
use crate::shortest::dijkstra;
use crate::space::{build_epsilon_graph, generate_space, MassRule, Metric, PointCloudSpace, SpaceGenerator};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialSpec {
    pub seeds: Vec<usize>,
    /// Boundary values on `seeds`, same order.
    pub values: Vec<f64>,
    #[serde(with = "ext_real::vec")]
    pub g: Vec<f64>,
    pub eps: f64,
    pub lambda: f64,
    #[serde(default, with = "ext_real::option")]
    pub cap: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Potential {
    /// `+inf` at unreachable points when there is no cap.
    #[serde(with = "ext_real::vec")]
    pub values: Vec<f64>,
    /// Points not eps-reachable from the seeds.
    pub unreachable: Vec<usize>,
}

fn check_spec(space: &PointCloudSpace, spec: &PotentialSpec) -> Result<()> {
    check_eps(spec.eps)?;
    check_lambda(spec.lambda)?;
    if spec.seeds.is_empty() {
        return Err(Error::EmptySeedSet);
    }
    if spec.values.len() != spec.seeds.len() {
        return Err(Error::LengthMismatch { expected: spec.seeds.len(), got: spec.values.len() });
    }
    if spec.g.len() != space.len() {
        return Err(Error::LengthMismatch { expected: space.len(), got: spec.g.len() });
    }
    for &a in &spec.seeds {
        space.check_index(a)?;
    }
    if spec.values.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("seed values must be finite".into()));
    }
    if let Some(i) = spec.g.iter().position(|v| v.is_nan() || *v < 0.0) {
        return Err(Error::InvalidArgument(format!("gradient is negative at point {i}")));
    }
    if spec.cap.is_some_and(|m| m.is_nan()) {
        return Err(Error::InvalidArgument("cap is NaN".into()));
    }
    Ok(())
}

/// `min(M, min_a u_A(a) + cheapest chain cost a -> x)`.
pub fn chain_potential(space: &PointCloudSpace, spec: &PotentialSpec) -> Result<Potential> {
    check_spec(space, spec)?;
    let graph = build_epsilon_graph(space, spec.eps)?;
    let sources: Vec<(usize, f64)> = spec.seeds.iter().copied().zip(spec.values.iter().copied()).collect();
    let g = &spec.g;
    let sp = dijkstra(&graph, &sources, |i, j, d| step_integral(g[i], g[j], spec.lambda, d));
    let unreachable = (0..space.len()).filter(|&i| sp.dist[i] == f64::INFINITY).collect();
    let values = match spec.cap {
        Some(m) => sp.dist.iter().map(|&v| v.min(m)).collect(),
        None => sp.dist,
    };
    Ok(Potential { values, unreachable })
}

/// Verifies `g` against its own chain potential: two-sided at λ = 1/2,
/// one-sided otherwise. A rejection is a bug.
pub fn potential_gradient_check(space: &PointCloudSpace, spec: &PotentialSpec, rel_tol: f64) -> Result<Verdict> {
    let pot = chain_potential(space, spec)?;
    // Unreachable points have no eps-neighbour in the seeds' components.
    let u: Vec<f64> = pot.values.iter().map(|&v| if v.is_finite() { v } else { 0.0 }).collect();
    let opts = VerifyOptions { lambda: spec.lambda, one_sided: spec.lambda != 0.5, weak: false, rel_tol };
    verify_with(space, &ScalarField::function(u)?, &ScalarField::gradient(spec.g.clone())?, spec.eps, &opts)
}

/// `|u| sl_eps(φ) + Q_eps(φ) g`, with `Q_eps φ(x) = max |φ|` over the closed eps-ball.
/// `g` must be an eps-upper gradient of `u` (λ = 1/2).
pub fn leibniz_gradient(
    space: &PointCloudSpace,
    u: &ScalarField,
    g: &ScalarField,
    phi: &ScalarField,
    eps: f64,
) -> Result<ScalarField> {
    phi.check_len(space.len())?;
    phi.check_finite()?;
    let verdict = verify_upper_gradient(space, u, g, eps, 0.5)?;
    if !verdict.accepted {
        let v = &verdict.violations[0];
        return Err(Error::InvalidArgument(format!(
            "g is not an eps-upper gradient of u (pair {} -> {})",
            v.from, v.to
        )));
    }
    let sl = slope_field(space, phi, eps)?;
    let out = (0..space.len())
        .map(|x| {
            let q = space.closed_ball(x, eps).map(|y| phi[y].abs()).fold(0.0, f64::max);
            let a = if sl[x] == 0.0 { 0.0 } else { u[x].abs() * sl[x] };
            let b = if q == 0.0 { 0.0 } else { q * g[x] };
            a + b
        })
        .collect();
    ScalarField::gradient(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeedRule {
    /// Every grid point, with `u` sampled there.
    All,
    /// The two endpoints of the interval.
    Endpoints,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EbOptions {
    pub p: f64,
    /// `eps = eps_factor / N`.
    pub eps_factor: f64,
    pub lambda: f64,
    pub seeds: SeedRule,
}

impl Default for EbOptions {
    fn default() -> Self {
        EbOptions { p: 2.0, eps_factor: 2.0, lambda: 0.5, seeds: SeedRule::All }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EbRung {
    /// Intervals; the grid has `n + 1` points.
    pub n: usize,
    pub eps: f64,
    /// `||u_j - u||_{L^p}`.
    pub u_error: f64,
    /// `||sl_eps(u_j) - g||_{L^p}`.
    pub g_error: f64,
    /// `max |u_j - u|`.
    pub max_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EbReport {
    pub rungs: Vec<EbRung>,
    /// Both error columns are nonincreasing down the family.
    pub decreasing: bool,
}

fn lp_norm(space: &PointCloudSpace, f: impl Fn(usize) -> f64, p: f64) -> f64 {
    (0..space.len()).map(|i| space.mass(i) * f(i).abs().powf(p)).sum::<f64>().powf(1.0 / p)
}

/// Potentials of sampled `(u, g)` on uniform grids of `[0, 1]` with `n` intervals each.
pub fn eb_pipeline(
    ns: &[usize],
    u: &dyn Fn(f64) -> f64,
    g: &dyn Fn(f64) -> f64,
    opts: &EbOptions,
) -> Result<EbReport> {
    if !(opts.p >= 1.0 && opts.p.is_finite()) {
        return Err(Error::InvalidArgument(format!("p must be a finite real >= 1, got {}", opts.p)));
    }
    if ns.is_empty() {
        return Err(Error::InvalidArgument("grid list is empty".into()));
    }
    let mut rungs = Vec::with_capacity(ns.len());
    for &n in ns {
        if n == 0 {
            return Err(Error::InvalidArgument("grids need at least one interval".into()));
        }
        let h = 1.0 / n as f64;
        let space =
            generate_space(&SpaceGenerator::Grid { dim: 1, side: n + 1, spacing: h, mass: MassRule::CellVolume })?;
        let xs: Vec<f64> = (0..=n).map(|i| i as f64 / n as f64).collect();
        let us: Vec<f64> = xs.iter().map(|&x| u(x)).collect();
        let gs: Vec<f64> = xs.iter().map(|&x| g(x)).collect();
        if us.iter().chain(&gs).any(|v| !v.is_finite()) || gs.iter().any(|&v| v < 0.0) {
            return Err(Error::InvalidArgument(format!("u and g must be finite with g >= 0 on the grid n = {n}")));
        }
        let seeds: Vec<usize> = match opts.seeds {
            SeedRule::All => (0..=n).collect(),
            SeedRule::Endpoints => vec![0, n],
        };
        let eps = opts.eps_factor * h;
        let spec = PotentialSpec {
            values: seeds.iter().map(|&i| us[i]).collect(),
            seeds,
            g: gs.clone(),
            eps,
            lambda: opts.lambda,
            cap: None,
        };
        let pot = chain_potential(&space, &spec)?;
        let sl = slope_field(&space, &ScalarField::function(pot.values.clone())?, eps)?;
        rungs.push(EbRung {
            n,
            eps,
            u_error: lp_norm(&space, |i| pot.values[i] - us[i], opts.p),
            g_error: lp_norm(&space, |i| sl[i] - gs[i], opts.p),
            max_error: (0..=n).map(|i| (pot.values[i] - us[i]).abs()).fold(0.0, f64::max),
        });
    }
    let decreasing = rungs.windows(2).all(|w| w[1].u_error <= w[0].u_error && w[1].g_error <= w[0].g_error);
    Ok(EbReport { rungs, decreasing })
}
