//! Bundled example spaces with expected-value manifests.

use serde::Serialize;

use crate::error::Result;
use crate::field::ScalarField;
use crate::space::{generate_space, snowflake, MassRule, Metric, PointCloudSpace, SpaceGenerator};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Expected {
    /// What the value measures, e.g. `gradient_min.objective`.
    pub quantity: String,
    pub formula: String,
    pub value: f64,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Fixture {
    pub name: String,
    pub description: String,
    pub generator: SpaceGenerator,
    /// Snowflake exponent applied after generation.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    pub eps: f64,
    pub p: f64,
    pub lambda: f64,
    pub expected: Vec<Expected>,
}

impl Fixture {
    pub fn space(&self) -> Result<PointCloudSpace> {
        let base = generate_space(&self.generator)?;
        match self.alpha {
            Some(a) => snowflake(&base, a),
            None => Ok(base),
        }
    }

    /// Default function: the first coordinate, or `1` on `x_n` and `0` on `y_n` for the two-sequence space.
    pub fn default_u(&self) -> Result<ScalarField> {
        let space = self.space()?;
        let values = match self.generator {
            SpaceGenerator::TwoSequence { .. } => (0..space.len()).map(|i| if i % 2 == 0 { 1.0 } else { 0.0 }).collect(),
            _ => space.coords().map(|c| c.iter().map(|x| x[0]).collect()).unwrap_or_else(|| vec![0.0; space.len()]),
        };
        ScalarField::function(values)
    }
}

/// `2 Σ_{n=a}^{b} n^-2`.
pub fn two_sequence_objective(n_min: u32, n_max: u32) -> f64 {
    2.0 * (n_min..=n_max).map(|n| 1.0 / (f64::from(n) * f64::from(n))).sum::<f64>()
}

fn grid1d(points: usize) -> SpaceGenerator {
    SpaceGenerator::Grid { dim: 1, side: points, spacing: 1.0 / (points - 1) as f64, mass: MassRule::CellVolume }
}

fn gradient_min(formula: &str, value: f64, tolerance: f64) -> Expected {
    Expected { quantity: "gradient_min.objective".into(), formula: formula.into(), value, tolerance }
}

pub fn fixtures() -> Vec<Fixture> {
    let mut out = vec![Fixture {
        name: "two_sequence_3_50".into(),
        description: "x_n = n, y_n = n + 1/n with mass n^-3, n = 3..50; u = 1 on x_n, 0 on y_n".into(),
        generator: SpaceGenerator::TwoSequence { n_min: 3, n_max: 50 },
        alpha: None,
        eps: 1.0 / 3.0,
        p: 1.0,
        lambda: 0.5,
        expected: vec![gradient_min("2*sum(n=3..50) n^-2", two_sequence_objective(3, 50), 1e-9)],
    }];
    for points in [11, 101, 1001] {
        let h = 1.0 / (points - 1) as f64;
        out.push(Fixture {
            name: format!("grid1d_{points}"),
            description: format!("{points} equally spaced points on [0, 1], mass = spacing; u = x"),
            generator: grid1d(points),
            alpha: None,
            eps: h,
            p: 1.0,
            lambda: 0.5,
            // (points - 1) / 2 disjoint neighbour pairs each need g sum >= 2.
            expected: vec![gradient_min("1", 1.0, 1e-9)],
        });
    }
    for alpha in [0.5, 0.8] {
        let h: f64 = 1.0 / 64.0;
        // The snowflaked spacing as stored in the metric; a separately
        // computed h^alpha can land one ulp below it.
        let eps = generate_space(&grid1d(65)).and_then(|s| snowflake(&s, alpha)).map_or(h.powf(alpha), |s| s.dist(0, 1));
        out.push(Fixture {
            name: format!("snowflake_{alpha}"),
            description: format!("grid1d_65 under the metric d^{alpha}; u = x"),
            generator: grid1d(65),
            alpha: Some(alpha),
            eps,
            p: 1.0,
            lambda: 0.5,
            expected: vec![gradient_min("spacing^(1-alpha)", h.powf(1.0 - alpha), 1e-9)],
        });
    }
    out.push(Fixture {
        name: "punctured_grid".into(),
        description: "grid1d_11 with zero mass at point 5".into(),
        generator: SpaceGenerator::PuncturedGrid {
            dim: 1,
            side: 11,
            spacing: 0.1,
            mass: MassRule::CellVolume,
            punctures: vec![5],
        },
        alpha: None,
        eps: 0.1,
        p: 1.0,
        lambda: 0.5,
        expected: vec![Expected {
            quantity: "modulus(hit:5).objective".into(),
            formula: "0".into(),
            value: 0.0,
            tolerance: 1e-9,
        }],
    });
    out
}

pub fn fixture(name: &str) -> Option<Fixture> {
    fixtures().into_iter().find(|f| f.name == name)
}
