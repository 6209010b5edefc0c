use serde::Serialize;

use super::{Metric, PointCloudSpace};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DoublingEstimate {
    /// `max m(B_2r(x)) / m(B_r(x))` over the evaluated (center, radius) pairs.
    pub constant: f64,
    pub witness: Option<(usize, f64)>,
    /// Pairs skipped because the inner ball had zero mass.
    pub skipped: Vec<(usize, f64)>,
}

/// Default radius grid: the distinct pairwise distances.
pub fn default_radii(space: &PointCloudSpace) -> Vec<f64> {
    space.distinct_distances()
}

/// Empirical doubling constant over all centers and the given radii (open balls).
pub fn doubling_constant(space: &PointCloudSpace, radii: &[f64]) -> Result<DoublingEstimate> {
    if radii.is_empty() {
        return Err(Error::EmptyRadiusGrid);
    }
    if let Some(&r) = radii.iter().find(|&&r| !(r > 0.0)) {
        return Err(Error::InvalidArgument(format!("radii must be positive, got {r}")));
    }
    let mut est = DoublingEstimate { constant: 1.0, witness: None, skipped: Vec::new() };
    for x in 0..space.len() {
        // One sweep per center: distances sorted once, ball masses by prefix sums.
        let mut by_dist: Vec<(f64, f64)> = (0..space.len()).map(|z| (space.dist(x, z), space.mass(z))).collect();
        by_dist.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut prefix = Vec::with_capacity(by_dist.len() + 1);
        prefix.push(0.0);
        for &(_, m) in &by_dist {
            prefix.push(prefix.last().unwrap() + m);
        }
        let ball = |r: f64| prefix[by_dist.partition_point(|&(d, _)| d < r)];
        for &r in radii {
            let inner = ball(r);
            if inner <= 0.0 {
                est.skipped.push((x, r));
                continue;
            }
            let ratio = ball(2.0 * r) / inner;
            if ratio > est.constant || est.witness.is_none() && ratio >= est.constant {
                est.constant = ratio;
                est.witness = Some((x, r));
            }
        }
    }
    Ok(est)
}
