use serde::{Deserialize, Serialize};

use super::{Metric, PointCloudSpace};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MassRule {
    /// `spacing^dim` per point.
    CellVolume,
    /// The same mass at every point.
    Constant(f64),
}

/// Descriptor for the built-in example spaces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SpaceGenerator {
    /// `side^dim` lattice points with the given spacing, lexicographic order.
    Grid { dim: usize, side: usize, spacing: f64, mass: MassRule },
    /// Points `x_n = n`, `y_n = n + 1/n` with mass `n^-3` each.
    TwoSequence { n_min: u32, n_max: u32 },
    /// A grid whose listed points carry zero mass.
    PuncturedGrid { dim: usize, side: usize, spacing: f64, mass: MassRule, punctures: Vec<usize> },
}

pub fn generate_space(kind: &SpaceGenerator) -> Result<PointCloudSpace> {
    match kind {
        SpaceGenerator::Grid { dim, side, spacing, mass } => grid(*dim, *side, *spacing, *mass, &[]),
        SpaceGenerator::PuncturedGrid { dim, side, spacing, mass, punctures } => {
            grid(*dim, *side, *spacing, *mass, punctures)
        }
        SpaceGenerator::TwoSequence { n_min, n_max } => two_sequence(*n_min, *n_max),
    }
}

fn grid(dim: usize, side: usize, spacing: f64, rule: MassRule, punctures: &[usize]) -> Result<PointCloudSpace> {
    if dim == 0 || side == 0 {
        return Err(Error::BadDescriptor("grid needs dim >= 1 and side >= 1".into()));
    }
    if !(spacing > 0.0 && spacing.is_finite()) {
        return Err(Error::BadDescriptor(format!("grid spacing must be positive, got {spacing}")));
    }
    let n = side
        .checked_pow(dim as u32)
        .filter(|&n| n <= 20_000)
        .ok_or_else(|| Error::BadDescriptor("grid too large".into()))?;
    let per_point = match rule {
        MassRule::CellVolume => spacing.powi(dim as i32),
        MassRule::Constant(m) if m >= 0.0 && m.is_finite() => m,
        MassRule::Constant(m) => return Err(Error::BadDescriptor(format!("invalid grid mass {m}"))),
    };
    let index = |mut p: usize| -> Vec<i64> {
        let mut k = vec![0i64; dim];
        for slot in k.iter_mut().rev() {
            *slot = (p % side) as i64;
            p /= side;
        }
        k
    };
    let lattice: Vec<Vec<i64>> = (0..n).map(index).collect();
    // Distances from integer offsets so that equal offsets give bit-identical lengths.
    let mut dist = vec![0.0; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let sq: i64 = lattice[i].iter().zip(&lattice[j]).map(|(a, b)| (a - b) * (a - b)).sum();
            let d = spacing * (sq as f64).sqrt();
            dist[i * n + j] = d;
            dist[j * n + i] = d;
        }
    }
    let mut mass = vec![per_point; n];
    for &p in punctures {
        if p >= n {
            return Err(Error::BadDescriptor(format!("puncture {p} outside grid of {n} points")));
        }
        mass[p] = 0.0;
    }
    let coords = lattice.iter().map(|k| k.iter().map(|&c| c as f64 * spacing).collect()).collect();
    let labels = (0..n).map(|i| format!("g{i}")).collect();
    PointCloudSpace::from_flat(n, dist, mass)?.with_coords_unchecked(Some(coords)).with_labels(labels)
}

fn two_sequence(n_min: u32, n_max: u32) -> Result<PointCloudSpace> {
    if n_min < 2 || n_max < n_min {
        return Err(Error::BadDescriptor(format!("two_sequence needs 2 <= n_min <= n_max, got {n_min}..{n_max}")));
    }
    let ns: Vec<f64> = (n_min..=n_max).map(f64::from).collect();
    let coords: Vec<f64> = ns.iter().flat_map(|&n| [n, n + 1.0 / n]).collect();
    let m = coords.len();
    let mut dist = vec![0.0; m * m];
    for i in 0..m {
        for j in (i + 1)..m {
            // Within a pair the gap is exactly 1/n; coordinate rounding would
            // otherwise push d(x_3, y_3) above 1/3.
            let d = if j == i + 1 && i % 2 == 0 { 1.0 / ns[i / 2] } else { (coords[i] - coords[j]).abs() };
            dist[i * m + j] = d;
            dist[j * m + i] = d;
        }
    }
    let mass = ns.iter().flat_map(|&n| [1.0 / (n * n * n); 2]).collect();
    let labels = (n_min..=n_max).flat_map(|n| [format!("x{n}"), format!("y{n}")]).collect();
    PointCloudSpace::from_flat(m, dist, mass)?
        .with_coords_unchecked(Some(coords.into_iter().map(|c| vec![c]).collect()))
        .with_labels(labels)
}

/// The snowflaked metric `d^alpha`; masses, labels and coordinates are kept.
pub fn snowflake(space: &PointCloudSpace, alpha: f64) -> Result<PointCloudSpace> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::AlphaOutOfRange(alpha));
    }
    let n = space.len();
    let mut dist = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                dist[i * n + j] = space.dist(i, j).powf(alpha);
            }
        }
    }
    let out = PointCloudSpace::from_flat(n, dist, space.masses().to_vec())?
        .with_coords_unchecked(space.coords().map(<[_]>::to_vec));
    match space.labels() {
        Some(l) => out.with_labels(l.to_vec()),
        None => Ok(out),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_grid(side: usize) -> PointCloudSpace {
        let h = 1.0 / (side - 1) as f64;
        generate_space(&SpaceGenerator::Grid { dim: 1, side, spacing: h, mass: MassRule::CellVolume }).unwrap()
    }

    #[test]
    fn two_sequence_masses() {
        let s = generate_space(&SpaceGenerator::TwoSequence { n_min: 3, n_max: 5 }).unwrap();
        assert_eq!(s.len(), 6);
        let expected = [1.0 / 27.0, 1.0 / 27.0, 1.0 / 64.0, 1.0 / 64.0, 1.0 / 125.0, 1.0 / 125.0];
        assert_eq!(s.masses(), &expected);
        assert_eq!(s.dist(0, 1), 1.0 / 3.0);
        assert_eq!(s.label(3), "y4");
    }

    #[test]
    fn grid_masses_and_coords() {
        let s = generate_space(&SpaceGenerator::Grid { dim: 1, side: 11, spacing: 0.1, mass: MassRule::CellVolume })
            .unwrap();
        assert_eq!(s.len(), 11);
        assert!(s.masses().iter().all(|&m| m == 0.1));
        assert!((s.coords().unwrap()[10][0] - 1.0).abs() < 1e-15);
        assert!((s.diameter() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn two_dimensional_grid() {
        let s = generate_space(&SpaceGenerator::Grid { dim: 2, side: 3, spacing: 1.0, mass: MassRule::Constant(2.0) })
            .unwrap();
        assert_eq!(s.len(), 9);
        assert!((s.dist(0, 8) - 8f64.sqrt()).abs() < 1e-15);
        assert_eq!(s.total_mass(), 18.0);
    }

    #[test]
    fn punctured_grid_zeroes_mass_only() {
        let base = unit_grid(11);
        let p = generate_space(&SpaceGenerator::PuncturedGrid {
            dim: 1,
            side: 11,
            spacing: 0.1,
            mass: MassRule::CellVolume,
            punctures: vec![5],
        })
        .unwrap();
        assert_eq!(p.mass(5), 0.0);
        assert_eq!(p.mass(4), 0.1);
        assert_eq!(p.distance_matrix(), base.distance_matrix());
    }

    #[test]
    fn bad_descriptors() {
        assert!(generate_space(&SpaceGenerator::TwoSequence { n_min: 5, n_max: 3 }).is_err());
        assert!(generate_space(&SpaceGenerator::Grid { dim: 1, side: 3, spacing: -1.0, mass: MassRule::CellVolume })
            .is_err());
    }

    #[test]
    fn snowflake_power_rule() {
        let s = unit_grid(11);
        let f = snowflake(&s, 0.5).unwrap();
        assert!((f.dist(0, 1) - 0.1f64.sqrt()).abs() < 1e-15);
        assert_eq!(f.masses(), s.masses());
        assert!(matches!(snowflake(&s, 1.0), Err(Error::AlphaOutOfRange(_))));
        assert!(matches!(snowflake(&s, 0.0), Err(Error::AlphaOutOfRange(_))));
    }

    #[test]
    fn snowflake_near_one_is_continuous() {
        let s = unit_grid(11);
        let f = snowflake(&s, 0.999).unwrap();
        for i in 0..11 {
            for j in (i + 1)..11 {
                let rel = (f.dist(i, j) - s.dist(i, j)).abs() / s.dist(i, j);
                assert!(rel < 0.01);
            }
        }
    }

    #[test]
    fn snowflake_composes() {
        let s = unit_grid(7);
        let twice = snowflake(&snowflake(&s, 0.5).unwrap(), 0.6).unwrap();
        let once = snowflake(&s, 0.3).unwrap();
        for i in 0..7 {
            for j in 0..7 {
                assert!((twice.dist(i, j) - once.dist(i, j)).abs() <= 1e-12);
            }
        }
    }
}
