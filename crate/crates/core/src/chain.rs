//! Chains: finite point sequences with a step bound, and their λ-integrals.

use serde::{Deserialize, Serialize};

use crate::error::{check_eps, check_lambda, Error, Result};
use crate::space::{Metric, PointCloudSpace};

/// `w * v` with `0 * inf = 0`: a term with zero weight is absent.
#[inline]
pub(crate) fn weighted(w: f64, v: f64) -> f64 {
    if w == 0.0 {
        0.0
    } else {
        w * v
    }
}

/// `[a, b]_λ · d` for one step; zero-length steps contribute nothing.
#[inline]
pub fn step_integral(a: f64, b: f64, lambda: f64, d: f64) -> f64 {
    if d == 0.0 {
        return 0.0;
    }
    (weighted(lambda, a) + weighted(1.0 - lambda, b)) * d
}

/// An eps-chain `q_0, ..., q_N` with `N >= 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Chain {
    points: Vec<usize>,
    eps: f64,
}

impl Chain {
    pub fn new(space: &PointCloudSpace, points: Vec<usize>, eps: f64) -> Result<Self> {
        check_eps(eps)?;
        if points.len() < 2 {
            return Err(Error::InvalidArgument("a chain needs at least two points".into()));
        }
        for &p in &points {
            space.check_index(p)?;
        }
        for (step, w) in points.windows(2).enumerate() {
            let length = space.dist(w[0], w[1]);
            if length > eps {
                return Err(Error::StepTooLong { step, length, eps });
            }
        }
        Ok(Chain { points, eps })
    }

    /// Chain whose step bound is its own largest step.
    pub fn through(space: &PointCloudSpace, points: Vec<usize>) -> Result<Self> {
        for &p in &points {
            space.check_index(p)?;
        }
        let max = points.windows(2).map(|w| space.dist(w[0], w[1])).fold(0.0, f64::max);
        Self::new(space, points, if max > 0.0 { max } else { f64::MIN_POSITIVE })
    }

    pub fn points(&self) -> &[usize] {
        &self.points
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn start(&self) -> usize {
        self.points[0]
    }

    pub fn end(&self) -> usize {
        *self.points.last().unwrap()
    }

    pub fn steps(&self) -> usize {
        self.points.len() - 1
    }

    pub fn length(&self, space: &impl Metric) -> f64 {
        self.points.windows(2).map(|w| space.dist(w[0], w[1])).sum()
    }

    /// `Σ (λ g(q_i) + (1-λ) g(q_{i+1})) d(q_i, q_{i+1})`; `+inf` propagates.
    pub fn lambda_integral(&self, space: &impl Metric, g: &[f64], lambda: f64) -> Result<f64> {
        check_lambda(lambda)?;
        if g.len() != space.len() {
            return Err(Error::LengthMismatch { expected: space.len(), got: g.len() });
        }
        Ok(self
            .points
            .windows(2)
            .map(|w| step_integral(g[w[0]], g[w[1]], lambda, space.dist(w[0], w[1])))
            .sum())
    }

    /// `c ⋆ c'`; the step bound is the larger of the two.
    pub fn concat(&self, other: &Chain) -> Result<Chain> {
        if self.end() != other.start() {
            return Err(Error::EndpointMismatch { end: self.end(), start: other.start() });
        }
        let mut points = self.points.clone();
        points.extend_from_slice(&other.points[1..]);
        Ok(Chain { points, eps: self.eps.max(other.eps) })
    }

    pub fn inverse(&self) -> Chain {
        let mut points = self.points.clone();
        points.reverse();
        Chain { points, eps: self.eps }
    }

    /// Piecewise-constant parametrization on `[0, 1]` by normalized arc length.
    pub fn to_step_curve(&self, space: &impl Metric) -> Result<StepCurve> {
        let total = self.length(space);
        if !(total > 0.0) {
            return Err(Error::ZeroLengthChain);
        }
        let mut breakpoints = Vec::new();
        let mut values = Vec::new();
        let mut acc = 0.0;
        for w in self.points.windows(2) {
            let d = space.dist(w[0], w[1]);
            if d > 0.0 {
                breakpoints.push(acc / total);
                values.push(w[0]);
                acc += d;
            }
        }
        Ok(StepCurve { breakpoints, values, end: self.end() })
    }
}

/// `values[i]` on `[breakpoints[i], breakpoints[i+1])`, the last interval
/// closing at 1 where the curve takes `end`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepCurve {
    pub breakpoints: Vec<f64>,
    pub values: Vec<usize>,
    pub end: usize,
}

impl StepCurve {
    pub fn eval(&self, t: f64) -> usize {
        if t >= 1.0 {
            return self.end;
        }
        let k = self.breakpoints.partition_point(|&b| b <= t);
        self.values[k.saturating_sub(1)]
    }

    pub fn interval_lengths(&self) -> Vec<f64> {
        let n = self.breakpoints.len();
        (0..n).map(|i| if i + 1 < n { self.breakpoints[i + 1] } else { 1.0 } - self.breakpoints[i]).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampledChain {
    pub chain: Chain,
    /// Arc-length parameters requested.
    pub targets: Vec<f64>,
    /// Largest gap between a requested parameter and the snapped sample.
    pub snap_error: f64,
    pub max_step: f64,
}

/// The `(n+2)`-point chain `γ(0), γ(L t/n), γ(L (t+1)/n), ..., γ(L (t+n-1)/n), γ(L)`
/// over a curve given by its samples, each parameter snapped to the nearest
/// sample in arc length (ties to the earlier sample).
pub fn sample_chain_from_curve(space: &PointCloudSpace, curve: &[usize], t: f64, n: usize) -> Result<SampledChain> {
    if curve.len() < 2 {
        return Err(Error::DegenerateCurve("need at least two curve samples".into()));
    }
    if n == 0 || !(0.0..=1.0).contains(&t) {
        return Err(Error::DegenerateCurve(format!("need n >= 1 and t in [0, 1], got n={n}, t={t}")));
    }
    for &p in curve {
        space.check_index(p)?;
    }
    let mut arc = Vec::with_capacity(curve.len());
    arc.push(0.0);
    for w in curve.windows(2) {
        arc.push(arc.last().unwrap() + space.dist(w[0], w[1]));
    }
    let total = *arc.last().unwrap();
    if !(total > 0.0) {
        return Err(Error::DegenerateCurve("curve has zero length".into()));
    }
    let nf = n as f64;
    let mut targets = vec![0.0];
    targets.extend((0..n).map(|i| total * (t + i as f64) / nf));
    targets.push(total);
    let mut snap_error: f64 = 0.0;
    let points = targets
        .iter()
        .map(|&s| {
            let k = arc.partition_point(|&a| a < s);
            let best = if k == 0 {
                0
            } else if k == arc.len() || s - arc[k - 1] <= arc[k] - s {
                k - 1
            } else {
                k
            };
            snap_error = snap_error.max((arc[best] - s).abs());
            curve[best]
        })
        .collect::<Vec<_>>();
    let chain = Chain::through(space, points)?;
    let max_step = chain.points().windows(2).map(|w| space.dist(w[0], w[1])).fold(0.0, f64::max);
    Ok(SampledChain { chain, targets, snap_error, max_step })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{generate_space, MassRule, SpaceGenerator};

    fn line(xs: &[f64]) -> PointCloudSpace {
        PointCloudSpace::from_coords(xs.iter().map(|&x| vec![x]).collect(), vec![1.0; xs.len()]).unwrap()
    }

    fn grid(side: usize) -> PointCloudSpace {
        let h = 1.0 / (side - 1) as f64;
        generate_space(&SpaceGenerator::Grid { dim: 1, side, spacing: h, mass: MassRule::CellVolume }).unwrap()
    }

    #[test]
    fn lambda_integral_values() {
        let s = line(&[0.0, 1.0, 3.0]);
        let c = Chain::new(&s, vec![0, 1, 2], 2.0).unwrap();
        let g = [2.0, 4.0, 6.0];
        assert_eq!(c.lambda_integral(&s, &g, 0.5).unwrap(), 13.0);
        assert_eq!(c.lambda_integral(&s, &g, 1.0).unwrap(), 10.0);
        assert_eq!(c.lambda_integral(&s, &g, 0.0).unwrap(), 16.0);
        assert_eq!(c.inverse().lambda_integral(&s, &g, 1.0).unwrap(), 16.0);
        assert_eq!(c.lambda_integral(&s, &[0.0; 3], 0.3).unwrap(), 0.0);
        assert!(matches!(c.lambda_integral(&s, &g, 1.5), Err(Error::LambdaOutOfRange(_))));
    }

    #[test]
    fn infinity_propagates_inside() {
        let s = line(&[0.0, 1.0, 3.0]);
        let c = Chain::new(&s, vec![0, 1, 2], 2.0).unwrap();
        let g = [1.0, f64::INFINITY, 1.0];
        assert_eq!(c.lambda_integral(&s, &g, 0.5).unwrap(), f64::INFINITY);
        // An infinite endpoint value carries no weight at λ = 1 on the last step.
        let h = [1.0, 1.0, f64::INFINITY];
        assert_eq!(c.lambda_integral(&s, &h, 1.0).unwrap(), 3.0);
    }

    #[test]
    fn step_bound_is_closed() {
        let s = line(&[0.0, 1.0]);
        assert!(Chain::new(&s, vec![0, 1], 1.0).is_ok());
        assert!(matches!(Chain::new(&s, vec![0, 1], 0.5), Err(Error::StepTooLong { step: 0, .. })));
        assert!(Chain::new(&s, vec![0], 1.0).is_err());
    }

    #[test]
    fn concat_requires_matching_ends() {
        let s = line(&[0.0, 1.0, 2.0]);
        let a = Chain::new(&s, vec![0, 1], 1.0).unwrap();
        let b = Chain::new(&s, vec![1, 2], 1.5).unwrap();
        let ab = a.concat(&b).unwrap();
        assert_eq!(ab.points(), &[0, 1, 2]);
        assert_eq!(ab.eps(), 1.5);
        assert_eq!(ab.length(&s), 2.0);
        assert!(matches!(b.concat(&a), Err(Error::EndpointMismatch { end: 2, start: 0 })));
    }

    #[test]
    fn step_curves() {
        let s = line(&[0.0, 1.0, 2.0, 3.0]);
        let c = Chain::new(&s, vec![0, 1, 2, 3], 1.0).unwrap();
        let sc = c.to_step_curve(&s).unwrap();
        assert_eq!(sc.breakpoints, vec![0.0, 1.0 / 3.0, 2.0 / 3.0]);
        assert_eq!(sc.eval(0.5), 1);
        assert_eq!(sc.eval(1.0), 3);

        let two = Chain::new(&s, vec![0, 1], 1.0).unwrap().to_step_curve(&s).unwrap();
        assert_eq!((two.breakpoints.clone(), two.values.clone(), two.end), (vec![0.0], vec![0], 1));

        let t = line(&[0.0, 1.0, 4.0]);
        let uneven = Chain::new(&t, vec![0, 1, 2], 3.0).unwrap().to_step_curve(&t).unwrap();
        assert_eq!(uneven.breakpoints, vec![0.0, 0.25]);
        assert_eq!(uneven.interval_lengths().iter().sum::<f64>(), 1.0);

        let still = Chain::new(&t, vec![1, 1], 1.0).unwrap();
        assert_eq!(still.to_step_curve(&t), Err(Error::ZeroLengthChain));
    }

    #[test]
    fn repeated_points_skip_in_step_curve() {
        let s = line(&[0.0, 1.0, 2.0]);
        let c = Chain::new(&s, vec![0, 0, 1, 1, 2], 1.0).unwrap();
        let sc = c.to_step_curve(&s).unwrap();
        assert_eq!(sc.breakpoints, vec![0.0, 0.5]);
        assert_eq!(sc.values, vec![0, 1]);
    }

    #[test]
    fn sampled_identity_curve() {
        let s = grid(101);
        let curve: Vec<usize> = (0..101).collect();
        let sc = sample_chain_from_curve(&s, &curve, 0.0, 4).unwrap();
        assert_eq!(sc.chain.points(), &[0, 0, 25, 50, 75, 100]);
        let one = vec![1.0; 101];
        assert!((sc.chain.lambda_integral(&s, &one, 0.5).unwrap() - 1.0).abs() < 1e-12);
        assert!(sample_chain_from_curve(&s, &[3, 3], 0.0, 2).is_err());
    }

    #[test]
    fn reversed_curve_reverses_chain() {
        let s = grid(101);
        let curve: Vec<usize> = (0..101).collect();
        let rev: Vec<usize> = curve.iter().rev().copied().collect();
        let g: Vec<f64> = (0..101).map(|i| 1.0 + (i as f64 * 0.07).sin().abs()).collect();
        let a = sample_chain_from_curve(&s, &curve, 0.5, 5).unwrap();
        let b = sample_chain_from_curve(&s, &rev, 0.5, 5).unwrap();
        assert_eq!(b.chain.points(), a.chain.inverse().points());
        let ia = a.chain.lambda_integral(&s, &g, 0.5).unwrap();
        let ib = b.chain.lambda_integral(&s, &g, 0.5).unwrap();
        assert!((ia - ib).abs() <= 1e-12);
    }
}
