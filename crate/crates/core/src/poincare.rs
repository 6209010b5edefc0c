//! Riesz-potential measures, Poincare audits, chain width and Minkowski profiles.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::time::Instant;

use serde::Serialize;

use crate::chain::{step_integral, weighted};
use crate::error::{check_eps, check_lambda, Error, Result};
use crate::field::ext_real;
use crate::shortest::dijkstra;
use crate::space::{build_epsilon_graph, joining_scale, Metric, PointCloudSpace};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RieszWeights {
    pub x: usize,
    pub y: usize,
    pub l: f64,
    /// `R(z)` per point; zero at the poles and outside `B_{Ld}(x) ∪ B_{Ld}(y)`.
    pub weights: Vec<f64>,
    /// `Σ R(z) m(z)`.
    pub total: f64,
}

impl RieszWeights {
    /// Point measures `R(z) m(z)`.
    pub fn measure(&self, space: &PointCloudSpace) -> Vec<f64> {
        self.weights.iter().zip(space.masses()).map(|(r, m)| r * m).collect()
    }
}

pub fn riesz_weights(space: &PointCloudSpace, x: usize, y: usize, l: f64) -> Result<RieszWeights> {
    space.check_index(x)?;
    space.check_index(y)?;
    if x == y {
        return Err(Error::InvalidArgument("poles must differ".into()));
    }
    if !(l >= 1.0 && l.is_finite()) {
        return Err(Error::InvalidArgument(format!("L must be a finite real >= 1, got {l}")));
    }
    let reach = l * space.dist(x, y);
    let mut weights = vec![0.0; space.len()];
    for (z, w) in weights.iter_mut().enumerate() {
        if z == x || z == y || (space.dist(x, z) >= reach && space.dist(y, z) >= reach) {
            continue;
        }
        let mut r = 0.0;
        for c in [x, y] {
            let rad = space.dist(c, z);
            let m = space.ball_mass(c, rad);
            if m <= 0.0 {
                return Err(Error::ZeroBallMass { center: c, radius: rad });
            }
            r += rad / m;
        }
        *w = r;
    }
    let total = weights.iter().zip(space.masses()).map(|(r, m)| r * m).sum();
    Ok(RieszWeights { x, y, l, weights, total })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PIWitness {
    Ball { center: usize, radius: f64 },
    Chain { x: usize, y: usize, chain: Vec<usize> },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PICase {
    pub center: usize,
    pub radius: f64,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PIAudit {
    /// Worst `lhs / rhs` over cases with `rhs > 0`; `+inf` when some zero-rhs case has `lhs > 0`.
    #[serde(with = "ext_real")]
    pub constant: f64,
    pub witness: Option<PIWitness>,
    pub unbounded: bool,
    pub cases: Vec<PICase>,
    pub zero_rhs: Vec<PICase>,
    /// (center, radius) pairs whose ball has zero mass.
    pub empty_balls: Vec<(usize, f64)>,
}

/// Distinct pairwise distances and the midpoints between consecutive ones.
pub fn audit_radii(space: &PointCloudSpace) -> Vec<f64> {
    let d = space.distinct_distances();
    let mut out = Vec::with_capacity(2 * d.len());
    for (i, &r) in d.iter().enumerate() {
        if i > 0 {
            out.push(0.5 * (d[i - 1] + r));
        }
        out.push(r);
    }
    out
}

/// Ball Poincare audit: `avg_B |u - u_B|` against `r (avg_{B_{σr}} g^p)^{1/p}`.
pub fn ball_pi_audit(
    space: &PointCloudSpace,
    u: &[f64],
    g: &[f64],
    p: f64,
    dilation: f64,
    radii: Option<&[f64]>,
) -> Result<PIAudit> {
    let n = space.len();
    for f in [u, g] {
        if f.len() != n {
            return Err(Error::LengthMismatch { expected: n, got: f.len() });
        }
    }
    if u.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("u must be finite".into()));
    }
    if g.iter().any(|v| v.is_nan() || *v < 0.0) {
        return Err(Error::InvalidArgument("g must be nonnegative".into()));
    }
    if !(p >= 1.0 && p.is_finite()) || !(dilation >= 1.0 && dilation.is_finite()) {
        return Err(Error::InvalidArgument("need p >= 1 and dilation >= 1".into()));
    }
    let default;
    let radii = match radii {
        Some(r) => r,
        None => {
            default = audit_radii(space);
            &default
        }
    };
    if radii.is_empty() {
        return Err(Error::EmptyRadiusGrid);
    }
    let mut audit = PIAudit {
        constant: 0.0,
        witness: None,
        unbounded: false,
        cases: Vec::new(),
        zero_rhs: Vec::new(),
        empty_balls: Vec::new(),
    };
    for x in 0..n {
        for &r in radii {
            if !(r > 0.0) {
                return Err(Error::InvalidArgument(format!("radii must be positive, got {r}")));
            }
            let ball: Vec<usize> = space.ball(x, r).collect();
            let m: f64 = ball.iter().map(|&z| space.mass(z)).sum();
            if m <= 0.0 {
                audit.empty_balls.push((x, r));
                continue;
            }
            // Centered at a ball member so constant data average exactly.
            let base = u[ball[0]];
            let mean = ball.iter().map(|&z| space.mass(z) * (u[z] - base)).sum::<f64>() / m;
            let lhs = ball.iter().map(|&z| space.mass(z) * (u[z] - base - mean).abs()).sum::<f64>() / m;
            let big = space.ball_mass(x, dilation * r);
            let energy: f64 = space.ball(x, dilation * r).map(|z| weighted(space.mass(z), g[z].powf(p))).sum();
            let rhs = r * (energy / big).powf(1.0 / p);
            let case = PICase { center: x, radius: r, lhs, rhs };
            if rhs > 0.0 {
                let ratio = lhs / rhs;
                if ratio > audit.constant && !audit.unbounded {
                    audit.constant = ratio;
                    audit.witness = Some(PIWitness::Ball { center: x, radius: r });
                }
                audit.cases.push(case);
            } else {
                if lhs > 0.0 && !audit.unbounded {
                    audit.unbounded = true;
                    audit.constant = f64::INFINITY;
                    audit.witness = Some(PIWitness::Ball { center: x, radius: r });
                }
                audit.zero_rhs.push(case);
            }
        }
    }
    Ok(audit)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointwiseCheck {
    pub eps: f64,
    /// `(min ∫_c g)^p` over budgeted chains; a lower bound when `exact` is false.
    #[serde(with = "ext_real")]
    pub lhs: f64,
    #[serde(with = "ext_real")]
    pub rhs: f64,
    pub satisfied: bool,
    pub exact: bool,
    pub chain: Option<Vec<usize>>,
    pub chain_length: f64,
    pub labels_created: usize,
}

#[derive(Debug, Clone, Copy)]
struct Label {
    node: usize,
    cost: f64,
    len: f64,
    parent: Option<usize>,
    alive: bool,
}

#[derive(Debug, PartialEq)]
struct Key {
    cost: f64,
    len: f64,
    node: usize,
    id: usize,
}

impl Eq for Key {}

impl Ord for Key {
    fn cmp(&self, o: &Self) -> Ordering {
        o.cost
            .total_cmp(&self.cost)
            .then_with(|| o.len.total_cmp(&self.len))
            .then_with(|| o.node.cmp(&self.node))
            .then_with(|| o.id.cmp(&self.id))
    }
}

impl PartialOrd for Key {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

/// Resource-constrained shortest chain: minimum `∫_c g` over eps-chains from
/// `x` to `y` of length at most `budget`, by Pareto label setting.
/// Returns `(cost, chain, exact, labels)`; on timeout the cost is the best
/// completed lower bound and the chain is `None`.
#[allow(clippy::too_many_arguments)]
pub fn budgeted_shortest_chain(
    space: &PointCloudSpace,
    x: usize,
    y: usize,
    g: &[f64],
    eps: f64,
    budget: f64,
    lambda: f64,
    time_budget_ms: Option<u64>,
) -> Result<(f64, Option<Vec<usize>>, bool, usize)> {
    let graph = build_epsilon_graph(space, eps)?;
    // Remaining-length lower bounds for pruning.
    let to_y = dijkstra(&graph, &[(y, 0.0)], |_, _, d| d);
    let slack = |len: f64, node: usize| len + to_y.dist[node] <= budget * (1.0 + 1e-12);
    if !slack(0.0, x) {
        return Err(Error::NoChainWithinBudget { from: x, to: y, budget });
    }
    let start = Instant::now();
    let mut labels = vec![Label { node: x, cost: 0.0, len: 0.0, parent: None, alive: true }];
    let mut at: Vec<Vec<usize>> = vec![Vec::new(); space.len()];
    at[x].push(0);
    let mut heap = BinaryHeap::new();
    heap.push(Key { cost: 0.0, len: 0.0, node: x, id: 0 });
    let mut popped = 0usize;
    while let Some(Key { cost, id, .. }) = heap.pop() {
        if !labels[id].alive {
            continue;
        }
        let lab = labels[id];
        if lab.node == y {
            let mut chain = vec![y];
            let mut cur = lab.parent;
            while let Some(c) = cur {
                chain.push(labels[c].node);
                cur = labels[c].parent;
            }
            chain.reverse();
            return Ok((cost, Some(chain), true, labels.len()));
        }
        popped += 1;
        if popped.is_multiple_of(1024) && time_budget_ms.is_some_and(|ms| start.elapsed().as_millis() as u64 > ms) {
            return Ok((cost, None, false, labels.len()));
        }
        for &(j, d) in graph.neighbors(lab.node) {
            let c = lab.cost + step_integral(g[lab.node], g[j], lambda, d);
            let len = lab.len + d;
            if !c.is_finite() || !slack(len, j) {
                continue;
            }
            if at[j].iter().any(|&o| labels[o].cost <= c && labels[o].len <= len) {
                continue;
            }
            for &o in &at[j] {
                if c <= labels[o].cost && len <= labels[o].len {
                    labels[o].alive = false;
                }
            }
            at[j].retain(|&o| labels[o].alive);
            let nid = labels.len();
            labels.push(Label { node: j, cost: c, len, parent: Some(id), alive: true });
            at[j].push(nid);
            heap.push(Key { cost: c, len, node: j, id: nid });
        }
    }
    Err(Error::NoChainWithinBudget { from: x, to: y, budget })
}

#[allow(clippy::too_many_arguments)]
pub fn pointwise_pi_check(
    space: &PointCloudSpace,
    x: usize,
    y: usize,
    g: &[f64],
    p: f64,
    c: f64,
    l: f64,
    lambda: f64,
    eps: Option<f64>,
    time_budget_ms: Option<u64>,
) -> Result<PointwiseCheck> {
    space.check_index(x)?;
    space.check_index(y)?;
    check_lambda(lambda)?;
    if g.len() != space.len() {
        return Err(Error::LengthMismatch { expected: space.len(), got: g.len() });
    }
    if x == y {
        return Err(Error::InvalidArgument("x and y must differ".into()));
    }
    if !(g[x].is_finite() && g[y].is_finite()) {
        return Err(Error::InvalidArgument("g must be finite at x and y".into()));
    }
    if g.iter().any(|v| v.is_nan() || *v < 0.0) {
        return Err(Error::InvalidArgument("g must be nonnegative".into()));
    }
    if !(p >= 1.0 && p.is_finite()) || !(c > 0.0 && c.is_finite()) {
        return Err(Error::InvalidArgument("need p >= 1 and C > 0".into()));
    }
    let eps = match eps {
        Some(e) => {
            check_eps(e)?;
            e
        }
        None => joining_scale(space, x, y)?,
    };
    let rw = riesz_weights(space, x, y, l)?;
    let d = space.dist(x, y);
    let budget = c * d;
    let (cost, chain, exact, labels) = budgeted_shortest_chain(space, x, y, g, eps, budget, lambda, time_budget_ms)?;
    let energy: f64 = (0..space.len()).map(|z| weighted(rw.weights[z] * space.mass(z), g[z].powf(p))).sum();
    let rhs = c * d.powf(p - 1.0) * energy;
    let lhs = cost.powf(p);
    let chain_length = chain.as_ref().map_or(0.0, |ch| ch.windows(2).map(|w| space.dist(w[0], w[1])).sum());
    Ok(PointwiseCheck {
        eps,
        lhs,
        rhs,
        satisfied: exact && lhs <= rhs * (1.0 + 1e-12),
        exact,
        chain,
        chain_length,
        labels_created: labels,
    })
}

fn indicator(n: usize, set: &[usize]) -> Result<Vec<f64>> {
    let mut chi = vec![0.0; n];
    for &a in set {
        if a >= n {
            return Err(Error::IndexOutOfRange { index: a, len: n });
        }
        chi[a] = 1.0;
    }
    Ok(chi)
}

/// `inf ∫_c χ_A` over eps-chains from `x` to `y` (λ = 1/2); `+inf` when they are not eps-connected.
pub fn chain_width(space: &PointCloudSpace, x: usize, y: usize, a: &[usize], eps: f64) -> Result<f64> {
    space.check_index(x)?;
    space.check_index(y)?;
    if x == y {
        return Err(Error::InvalidArgument("x and y must differ".into()));
    }
    let chi = indicator(space.len(), a)?;
    let graph = build_epsilon_graph(space, eps)?;
    let sp = dijkstra(&graph, &[(x, 0.0)], |i, j, d| 0.5 * (chi[i] + chi[j]) * d);
    Ok(sp.dist[y])
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MinkowskiProfile {
    /// `(r, μ(B_r(A) \ A) / r)`.
    pub entries: Vec<(f64, f64)>,
    /// Minimum over the supplied radii, standing in for the lower limit.
    pub minimum: f64,
    pub zero_radii: Vec<f64>,
}

/// Open-shell profile of `A` under the point measure `mu`.
pub fn minkowski_profile(space: &PointCloudSpace, a: &[usize], mu: &[f64], radii: &[f64]) -> Result<MinkowskiProfile> {
    if mu.len() != space.len() {
        return Err(Error::LengthMismatch { expected: space.len(), got: mu.len() });
    }
    if radii.is_empty() {
        return Err(Error::EmptyRadiusGrid);
    }
    let chi = indicator(space.len(), a)?;
    let gap: Vec<f64> = (0..space.len()).map(|z| if chi[z] > 0.0 { 0.0 } else { space.dist_to_set(z, a) }).collect();
    let mut entries = Vec::with_capacity(radii.len());
    let mut zero_radii = Vec::new();
    for &r in radii {
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::InvalidArgument(format!("radii must be positive, got {r}")));
        }
        let shell: f64 = (0..space.len()).filter(|&z| chi[z] == 0.0 && gap[z] < r).map(|z| mu[z]).sum();
        let v = shell / r;
        if v == 0.0 {
            zero_radii.push(r);
        }
        entries.push((r, v));
    }
    let minimum = entries.iter().map(|e| e.1).fold(f64::INFINITY, f64::min);
    Ok(MinkowskiProfile { entries, minimum, zero_radii })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BmcShell {
    pub r: f64,
    /// `m^L(B_r(Ω) \ Ω)`.
    pub shell_measure: f64,
    pub profile: f64,
    #[serde(with = "ext_real")]
    pub width: f64,
    /// `width / shell_measure` when the shell measure is positive.
    #[serde(with = "ext_real::option")]
    pub ratio: Option<f64>,
    /// `width >= r - 2 eps`, checked when `r > 2 eps` and `d(y, Ω) >= r`.
    pub shell_bound: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BmcCandidate {
    pub shells: Vec<BmcShell>,
    pub profile_min: f64,
    pub zero_radii: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BmcAudit {
    pub candidates: Vec<BmcCandidate>,
    /// Smallest profile minimum; witness `(candidate, r)`.
    pub worst_c: f64,
    pub worst_c_witness: Option<(usize, f64)>,
    /// Largest width-to-measure ratio; witness `(candidate, r)`.
    #[serde(with = "ext_real")]
    pub worst_cap_c: f64,
    pub worst_cap_witness: Option<(usize, f64)>,
}

/// Separating-set audit under the Riesz measure `m^L_{x,y}`.
#[allow(clippy::too_many_arguments)]
pub fn bmc_audit(
    space: &PointCloudSpace,
    x: usize,
    y: usize,
    l: f64,
    candidates: &[Vec<usize>],
    eps: f64,
    radii: Option<&[f64]>,
) -> Result<BmcAudit> {
    check_eps(eps)?;
    let rw = riesz_weights(space, x, y, l)?;
    let mu = rw.measure(space);
    let default;
    let radii = match radii {
        Some(r) => r,
        None => {
            let diam = space.diameter();
            default = space.distinct_distances().into_iter().filter(|&r| r <= diam).collect::<Vec<_>>();
            &default
        }
    };
    let mut audit = BmcAudit {
        candidates: Vec::new(),
        worst_c: f64::INFINITY,
        worst_c_witness: None,
        worst_cap_c: 0.0,
        worst_cap_witness: None,
    };
    for (ci, omega) in candidates.iter().enumerate() {
        let chi = indicator(space.len(), omega)?;
        if chi[x] == 0.0 {
            return Err(Error::NotSeparating(format!("candidate {ci} does not contain x")));
        }
        if let Some(z) = space.ball(x, eps).find(|&z| chi[z] == 0.0) {
            return Err(Error::NotSeparating(format!("candidate {ci} misses point {z} of the eps-ball around x")));
        }
        if chi[y] > 0.0 {
            return Err(Error::NotSeparating(format!("candidate {ci} contains y")));
        }
        let profile = minkowski_profile(space, omega, &mu, radii)?;
        let y_gap = space.dist_to_set(y, omega);
        let mut shells = Vec::with_capacity(radii.len());
        for &(r, value) in &profile.entries {
            let shell: Vec<usize> =
                (0..space.len()).filter(|&z| chi[z] == 0.0 && space.dist_to_set(z, omega) < r).collect();
            let measure: f64 = shell.iter().map(|&z| mu[z]).sum();
            let width = chain_width(space, x, y, &shell, eps)?;
            let ratio = (measure > 0.0).then(|| width / measure);
            if let Some(q) = ratio {
                if q > audit.worst_cap_c {
                    audit.worst_cap_c = q;
                    audit.worst_cap_witness = Some((ci, r));
                }
            }
            let shell_bound = (r > 2.0 * eps && y_gap >= r).then_some(width >= r - 2.0 * eps - 1e-12 * r);
            shells.push(BmcShell { r, shell_measure: measure, profile: value, width, ratio, shell_bound });
        }
        if profile.minimum < audit.worst_c {
            audit.worst_c = profile.minimum;
            let at = profile.entries.iter().find(|e| e.1 == profile.minimum).map(|e| e.0).unwrap_or(0.0);
            audit.worst_c_witness = Some((ci, at));
        }
        audit.candidates.push(BmcCandidate { shells, profile_min: profile.minimum, zero_radii: profile.zero_radii });
    }
    Ok(audit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{generate_space, MassRule, SpaceGenerator};

    fn grid(n: usize) -> PointCloudSpace {
        let h = 1.0 / (n - 1) as f64;
        generate_space(&SpaceGenerator::Grid { dim: 1, side: n, spacing: h, mass: MassRule::CellVolume }).unwrap()
    }

    #[test]
    fn riesz_three_points() {
        let s = PointCloudSpace::from_coords(vec![vec![0.0], vec![1.0], vec![2.0]], vec![1.0; 3]).unwrap();
        let r = riesz_weights(&s, 0, 2, 1.0).unwrap();
        assert_eq!(r.weights, vec![0.0, 2.0, 0.0]);
        assert_eq!(r.total, 2.0);
        let z = s.with_masses(vec![0.0, 1.0, 1.0]).unwrap();
        assert_eq!(riesz_weights(&z, 0, 2, 1.0), Err(Error::ZeroBallMass { center: 0, radius: 1.0 }));
    }

    #[test]
    fn riesz_truncation() {
        let s = grid(11);
        let r = riesz_weights(&s, 4, 6, 1.0).unwrap();
        // reach L d = 0.2 around both poles, open balls
        for z in 0..11 {
            let inside = z != 4 && z != 6 && (3..=7).contains(&z);
            assert_eq!(r.weights[z] > 0.0, inside, "{z}");
        }
    }

    #[test]
    fn ball_audit_cases() {
        let s = grid(11);
        let u: Vec<f64> = (0..11).map(|i| i as f64 / 10.0).collect();
        let a = ball_pi_audit(&s, &[3.0; 11], &[1.0; 11], 1.0, 1.0, None).unwrap();
        assert_eq!(a.constant, 0.0);
        let b = ball_pi_audit(&s, &u, &[1.0; 11], 1.0, 1.0, None).unwrap();
        assert!(b.constant > 0.0 && b.constant <= 1.0);
        let c = ball_pi_audit(&s, &u, &[0.0; 11], 1.0, 1.0, None).unwrap();
        assert!(c.unbounded && c.witness.is_some());
    }

    #[test]
    fn pointwise_cases() {
        let s = grid(11);
        let one = vec![1.0; 11];
        let r = pointwise_pi_check(&s, 0, 10, &one, 1.0, 2.0, 2.0, 0.5, None, None).unwrap();
        assert!((r.lhs - 1.0).abs() < 1e-12);
        assert!(r.exact);
        assert!((r.eps - 0.1).abs() < 1e-12);
        assert!(matches!(
            pointwise_pi_check(&s, 0, 10, &one, 1.0, 0.9, 2.0, 0.5, None, None),
            Err(Error::NoChainWithinBudget { .. })
        ));
        let z = pointwise_pi_check(&s, 0, 10, &[0.0; 11], 2.0, 1.0, 1.0, 0.5, None, None).unwrap();
        assert_eq!(z.lhs, 0.0);
        assert!(z.satisfied);
    }

    #[test]
    fn budget_trades_cost_for_length() {
        let m = vec![
            vec![0.0, 1.9, 1.0, 1.5],
            vec![1.9, 0.0, 1.5, 1.0],
            vec![1.0, 1.5, 0.0, 1.0],
            vec![1.5, 1.0, 1.0, 0.0],
        ];
        let s = PointCloudSpace::from_matrix(m, vec![1.0; 4]).unwrap();
        let g = vec![1.0, 1.0, 0.0, 0.0];
        let (direct, chain, ..) = budgeted_shortest_chain(&s, 0, 1, &g, 1.9, 1.9, 0.5, None).unwrap();
        assert_eq!((direct, chain.unwrap()), (1.9, vec![0, 1]));
        let (mid, ..) = budgeted_shortest_chain(&s, 0, 1, &g, 1.9, 2.5, 0.5, None).unwrap();
        assert_eq!(mid, 1.25);
        let (long, chain, ..) = budgeted_shortest_chain(&s, 0, 1, &g, 1.9, 3.0, 0.5, None).unwrap();
        assert_eq!((long, chain.unwrap()), (1.0, vec![0, 2, 3, 1]));
    }

    #[test]
    fn width_examples() {
        let s = grid(11);
        assert!((chain_width(&s, 0, 10, &[4, 5, 6], 0.1).unwrap() - 0.3).abs() < 1e-12);
        assert_eq!(chain_width(&s, 0, 10, &[], 0.1).unwrap(), 0.0);
        let all: Vec<usize> = (0..11).collect();
        assert!((chain_width(&s, 0, 10, &all, 0.1).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(chain_width(&s, 0, 10, &[5], 0.05).unwrap(), f64::INFINITY);
    }

    #[test]
    fn minkowski_examples() {
        let s = grid(11);
        let p = minkowski_profile(&s, &[5], s.masses(), &[0.15, 0.05]).unwrap();
        assert!((p.entries[0].1 - 0.2 / 0.15).abs() < 1e-12);
        assert_eq!(p.entries[1].1, 0.0);
        assert_eq!(p.zero_radii, vec![0.05]);
        let all: Vec<usize> = (0..11).collect();
        assert_eq!(minkowski_profile(&s, &all, s.masses(), &[0.3]).unwrap().minimum, 0.0);
    }

    #[test]
    fn bmc_examples() {
        let s = grid(11);
        let left: Vec<usize> = (0..=5).collect();
        let a = bmc_audit(&s, 0, 10, 2.0, &[left], 0.1, None).unwrap();
        let cand = &a.candidates[0];
        assert!(cand.shells.iter().filter_map(|sh| sh.shell_bound).all(|b| b));
        assert!(cand.shells.iter().any(|sh| sh.shell_bound.is_some()));
        assert!(matches!(bmc_audit(&s, 0, 10, 2.0, &[vec![1, 2]], 0.1, None), Err(Error::NotSeparating(_))));
        let most: Vec<usize> = (0..10).collect();
        let b = bmc_audit(&s, 0, 10, 2.0, &[most], 0.1, None).unwrap();
        assert!(!b.candidates[0].zero_radii.is_empty() || b.candidates[0].profile_min >= 0.0);
    }
}
