//! Finite metric measure spaces.
//!
//! A [`PointCloudSpace`] stores the full symmetric distance matrix and a
//! nonnegative mass per point. Everything downstream (chains, gradients,
//! modulus, Poincare audits) reads the space through [`Metric`] and the mass
//! accessors only; coordinates are carried for generators and output.

mod doubling;
mod generate;
mod graph;
pub mod io;

pub use doubling::{default_radii, doubling_constant, DoublingEstimate};
pub use generate::{generate_space, snowflake, MassRule, SpaceGenerator};
pub use graph::{build_epsilon_graph, chain_components, joining_scale, ComponentPartition, EpsilonGraph};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute slack for metric validation.
pub const METRIC_ABS_TOL: f64 = 1e-12;
/// Relative slack for metric validation.
pub const METRIC_REL_TOL: f64 = 1e-9;

/// Triangle checks are exhaustive up to this many points and sampled above.
const EXHAUSTIVE_TRIANGLE_LIMIT: usize = 300;
const SAMPLED_TRIANGLES: usize = 1_000_000;

/// Read access to a finite metric. Lets larger or sparse variants swap in
/// behind the same algorithms.
pub trait Metric {
    fn len(&self) -> usize;
    fn dist(&self, i: usize, j: usize) -> f64;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointCloudSpace {
    n: usize,
    /// Row-major n x n.
    dist: Vec<f64>,
    mass: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    coords: Option<Vec<Vec<f64>>>,
}

impl Metric for PointCloudSpace {
    fn len(&self) -> usize {
        self.n
    }

    #[inline]
    fn dist(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.n + j]
    }
}

fn within_tol(excess: f64, scale: f64) -> bool {
    excess <= METRIC_ABS_TOL + METRIC_REL_TOL * scale
}

impl PointCloudSpace {
    /// Builds and validates a space from an explicit distance matrix.
    pub fn from_matrix(matrix: Vec<Vec<f64>>, mass: Vec<f64>) -> Result<Self> {
        let n = matrix.len();
        let mut flat = Vec::with_capacity(n * n);
        for row in &matrix {
            if row.len() != n {
                return Err(Error::LengthMismatch { expected: n, got: row.len() });
            }
            flat.extend_from_slice(row);
        }
        Self::from_flat(n, flat, mass)
    }

    /// Builds a space from Euclidean coordinates.
    pub fn from_coords(coords: Vec<Vec<f64>>, mass: Vec<f64>) -> Result<Self> {
        let n = coords.len();
        let mut flat = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                if coords[i].len() != coords[j].len() {
                    return Err(Error::LengthMismatch { expected: coords[i].len(), got: coords[j].len() });
                }
                let d = coords[i]
                    .iter()
                    .zip(&coords[j])
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt();
                flat[i * n + j] = d;
                flat[j * n + i] = d;
            }
        }
        let mut space = Self::from_flat(n, flat, mass)?;
        space.coords = Some(coords);
        Ok(space)
    }

    pub(crate) fn from_flat(n: usize, mut dist: Vec<f64>, mass: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("space must contain at least one point".into()));
        }
        if dist.len() != n * n {
            return Err(Error::LengthMismatch { expected: n * n, got: dist.len() });
        }
        if mass.len() != n {
            return Err(Error::LengthMismatch { expected: n, got: mass.len() });
        }
        for i in 0..n {
            let d = dist[i * n + i];
            if d != 0.0 {
                return Err(Error::InvalidDistance { i, j: i, value: d });
            }
            for j in (i + 1)..n {
                let (dij, dji) = (dist[i * n + j], dist[j * n + i]);
                for (a, b, v) in [(i, j, dij), (j, i, dji)] {
                    if !v.is_finite() || v < 0.0 {
                        return Err(Error::InvalidDistance { i: a, j: b, value: v });
                    }
                }
                if !within_tol((dij - dji).abs(), dij.max(dji)) {
                    return Err(Error::NonSymmetricDistance { i, j, dij, dji });
                }
                if dij == 0.0 || dji == 0.0 {
                    return Err(Error::CoincidentPoints { i, j });
                }
                // Store an exactly symmetric matrix.
                dist[j * n + i] = dij;
            }
        }
        for (index, &m) in mass.iter().enumerate() {
            if !m.is_finite() || m < 0.0 {
                return Err(Error::NegativeMass { index, value: m });
            }
        }
        if mass.iter().sum::<f64>() <= 0.0 {
            return Err(Error::ZeroTotalMass);
        }
        let space = PointCloudSpace { n, dist, mass, labels: None, coords: None };
        space.check_triangles()?;
        Ok(space)
    }

    fn check_triangles(&self) -> Result<()> {
        let n = self.n;
        let mut worst: Option<(usize, usize, usize, f64)> = None;
        let mut check = |i: usize, j: usize, k: usize| {
            let via = self.dist(i, j) + self.dist(j, k);
            let excess = self.dist(i, k) - via;
            if !within_tol(excess, via) && worst.is_none_or(|w| excess > w.3) {
                worst = Some((i, j, k, excess));
            }
        };
        if n <= EXHAUSTIVE_TRIANGLE_LIMIT {
            for i in 0..n {
                for k in (i + 1)..n {
                    for j in 0..n {
                        if j != i && j != k {
                            check(i, j, k);
                        }
                    }
                }
            }
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(0x7269_616e_676c_65);
            for _ in 0..SAMPLED_TRIANGLES {
                let (i, j, k) = (rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n));
                check(i, j, k);
            }
        }
        match worst {
            Some((i, j, k, excess)) => Err(Error::TriangleViolation { i, j, k, excess }),
            None => Ok(()),
        }
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.n {
            return Err(Error::LengthMismatch { expected: self.n, got: labels.len() });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub(crate) fn with_coords_unchecked(mut self, coords: Option<Vec<Vec<f64>>>) -> Self {
        self.coords = coords;
        self
    }

    /// Same metric with replaced masses.
    pub fn with_masses(&self, mass: Vec<f64>) -> Result<Self> {
        if mass.len() != self.n {
            return Err(Error::LengthMismatch { expected: self.n, got: mass.len() });
        }
        for (index, &m) in mass.iter().enumerate() {
            if !m.is_finite() || m < 0.0 {
                return Err(Error::NegativeMass { index, value: m });
            }
        }
        if mass.iter().sum::<f64>() <= 0.0 {
            return Err(Error::ZeroTotalMass);
        }
        Ok(PointCloudSpace { mass, ..self.clone() })
    }

    /// Restriction to the listed points, in the given order.
    pub fn subspace(&self, keep: &[usize]) -> Result<Self> {
        for &k in keep {
            self.check_index(k)?;
        }
        let m = keep.len();
        let mut dist = vec![0.0; m * m];
        for (a, &i) in keep.iter().enumerate() {
            for (b, &j) in keep.iter().enumerate() {
                dist[a * m + b] = self.dist(i, j);
            }
        }
        let mass = keep.iter().map(|&i| self.mass[i]).collect();
        let mut sub = Self::from_flat(m, dist, mass)?;
        sub.labels = self.labels.as_ref().map(|l| keep.iter().map(|&i| l[i].clone()).collect());
        sub.coords = self.coords.as_ref().map(|c| keep.iter().map(|&i| c[i].clone()).collect());
        Ok(sub)
    }

    pub fn mass(&self, i: usize) -> f64 {
        self.mass[i]
    }

    pub fn masses(&self) -> &[f64] {
        &self.mass
    }

    pub fn total_mass(&self) -> f64 {
        self.mass.iter().sum()
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn label(&self, i: usize) -> String {
        match &self.labels {
            Some(l) => l[i].clone(),
            None => i.to_string(),
        }
    }

    pub fn coords(&self) -> Option<&[Vec<f64>]> {
        self.coords.as_deref()
    }

    /// Looks up a point by label, falling back to a numeric index.
    pub fn index_of(&self, id: &str) -> Option<usize> {
        if let Some(labels) = &self.labels {
            if let Some(i) = labels.iter().position(|l| l == id) {
                return Some(i);
            }
        }
        id.parse::<usize>().ok().filter(|&i| i < self.n)
    }

    pub fn check_index(&self, i: usize) -> Result<()> {
        if i < self.n {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange { index: i, len: self.n })
        }
    }

    pub fn distance_matrix(&self) -> Vec<Vec<f64>> {
        self.dist.chunks(self.n).map(|r| r.to_vec()).collect()
    }

    pub fn diameter(&self) -> f64 {
        self.dist.iter().copied().fold(0.0, f64::max)
    }

    /// Smallest distance between distinct points (`+inf` for a single point).
    pub fn min_separation(&self) -> f64 {
        let mut best = f64::INFINITY;
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                best = best.min(self.dist(i, j));
            }
        }
        best
    }

    /// Members of the open ball `B_r(center)`.
    pub fn ball(&self, center: usize, r: f64) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&z| self.dist(center, z) < r)
    }

    /// Members of the closed ball.
    pub fn closed_ball(&self, center: usize, r: f64) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&z| self.dist(center, z) <= r)
    }

    pub fn ball_mass(&self, center: usize, r: f64) -> f64 {
        self.ball(center, r).map(|z| self.mass[z]).sum()
    }

    /// Distance from `z` to a point set (`+inf` for the empty set).
    pub fn dist_to_set(&self, z: usize, set: &[usize]) -> f64 {
        set.iter().map(|&a| self.dist(z, a)).fold(f64::INFINITY, f64::min)
    }

    /// Sorted distinct positive pairwise distances.
    pub fn distinct_distances(&self) -> Vec<f64> {
        let mut d: Vec<f64> = (0..self.n)
            .flat_map(|i| ((i + 1)..self.n).map(move |j| (i, j)))
            .map(|(i, j)| self.dist(i, j))
            .collect();
        d.sort_by(f64::total_cmp);
        d.dedup();
        d
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn collinear_points() {
        let s = PointCloudSpace::from_coords(vec![vec![0.0], vec![1.0], vec![2.0]], vec![1.0; 3]).unwrap();
        assert_eq!(s.len(), 3);
        assert_eq!(s.dist(0, 2), 2.0);
        assert_eq!(s.diameter(), 2.0);
    }

    #[test]
    fn non_symmetric_matrix_rejected() {
        let m = vec![vec![0.0, 1.0], vec![2.0, 0.0]];
        let err = PointCloudSpace::from_matrix(m, vec![1.0, 1.0]).unwrap_err();
        assert!(matches!(err, Error::NonSymmetricDistance { i: 0, j: 1, .. }));
    }

    #[test]
    fn triangle_violation_reported() {
        let m = vec![vec![0.0, 1.0, 5.0], vec![1.0, 0.0, 1.0], vec![5.0, 1.0, 0.0]];
        let err = PointCloudSpace::from_matrix(m, vec![1.0; 3]).unwrap_err();
        match err {
            Error::TriangleViolation { i, j, k, excess } => {
                assert_eq!((i, j, k), (0, 1, 2));
                assert_eq!(excess, 3.0);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn mass_errors() {
        let m = vec![vec![0.0, 1.0], vec![1.0, 0.0]];
        assert!(matches!(
            PointCloudSpace::from_matrix(m.clone(), vec![1.0, -1.0]),
            Err(Error::NegativeMass { index: 1, .. })
        ));
        assert_eq!(PointCloudSpace::from_matrix(m, vec![0.0, 0.0]), Err(Error::ZeroTotalMass));
    }

    #[test]
    fn coincident_points_rejected() {
        let c = vec![vec![0.0], vec![0.0]];
        assert!(matches!(PointCloudSpace::from_coords(c, vec![1.0; 2]), Err(Error::CoincidentPoints { .. })));
    }

    #[test]
    fn open_and_closed_balls() {
        let s = PointCloudSpace::from_coords(vec![vec![0.0], vec![1.0], vec![2.0]], vec![1.0, 2.0, 4.0]).unwrap();
        assert_eq!(s.ball_mass(0, 1.0), 1.0);
        assert_eq!(s.closed_ball(0, 1.0).count(), 2);
        assert_eq!(s.ball_mass(1, 1.5), 7.0);
        assert_eq!(s.distinct_distances(), vec![1.0, 2.0]);
    }

    #[test]
    fn subspace_keeps_metric() {
        let s = PointCloudSpace::from_coords(vec![vec![0.0], vec![1.0], vec![3.0]], vec![1.0; 3]).unwrap();
        let sub = s.subspace(&[2, 0]).unwrap();
        assert_eq!(sub.dist(0, 1), 3.0);
        assert_eq!(sub.coords().unwrap()[0], vec![3.0]);
    }
}
