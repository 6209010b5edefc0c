//! Point-cloud documents.
//!
//! JSON:
//! ```json
//! { "points": [{"id": "a", "mass": 1.0, "coords": [0.0]}],
//!   "metric": "euclidean" }
//! ```
//! or `"metric": {"matrix": [[...], ...]}`. CSV: a point table with header
//! `id,mass,x0,x1,...`, or a bare n x n distance matrix plus a masses file.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Metric, PointCloudSpace};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointRecord {
    pub id: String,
    pub mass: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coords: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MetricSpec {
    Named(NamedMetric),
    Matrix { matrix: Vec<Vec<f64>> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NamedMetric {
    Euclidean,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceDocument {
    pub points: Vec<PointRecord>,
    pub metric: MetricSpec,
}

impl SpaceDocument {
    pub fn into_space(self) -> Result<PointCloudSpace> {
        let ids: Vec<String> = self.points.iter().map(|p| p.id.clone()).collect();
        let mass: Vec<f64> = self.points.iter().map(|p| p.mass).collect();
        let space = match self.metric {
            MetricSpec::Named(NamedMetric::Euclidean) => {
                let coords = self
                    .points
                    .into_iter()
                    .enumerate()
                    .map(|(i, p)| p.coords.ok_or_else(|| Error::Parse(format!("point {i} has no coords"))))
                    .collect::<Result<Vec<_>>>()?;
                PointCloudSpace::from_coords(coords, mass)?
            }
            MetricSpec::Matrix { matrix } => {
                let coords: Option<Vec<Vec<f64>>> = self.points.into_iter().map(|p| p.coords).collect();
                PointCloudSpace::from_matrix(matrix, mass)?.with_coords_unchecked(coords)
            }
        };
        space.with_labels(ids)
    }

    /// Document carrying the explicit distance matrix.
    pub fn from_space(space: &PointCloudSpace) -> Self {
        let points = (0..space.len())
            .map(|i| PointRecord {
                id: space.label(i),
                mass: space.mass(i),
                coords: space.coords().map(|c| c[i].clone()),
            })
            .collect();
        SpaceDocument { points, metric: MetricSpec::Matrix { matrix: space.distance_matrix() } }
    }
}

pub fn parse_space_json(text: &str) -> Result<PointCloudSpace> {
    let doc: SpaceDocument = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    doc.into_space()
}

/// Point table with header `id,mass,x0,x1,...` and a Euclidean metric.
pub fn parse_points_csv(text: &str) -> Result<PointCloudSpace> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| Error::Parse(e.to_string()))?.clone();
    if headers.len() < 3 || &headers[0] != "id" || &headers[1] != "mass" {
        return Err(Error::Parse("expected header id,mass,x0,...".into()));
    }
    let mut ids = Vec::new();
    let mut mass = Vec::new();
    let mut coords = Vec::new();
    for (line, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| Error::Parse(e.to_string()))?;
        let num = |k: usize| -> Result<f64> {
            rec.get(k)
                .ok_or_else(|| Error::Parse(format!("row {line}: missing column {k}")))?
                .parse::<f64>()
                .map_err(|e| Error::Parse(format!("row {line}: {e}")))
        };
        ids.push(rec.get(0).unwrap_or_default().to_string());
        mass.push(num(1)?);
        coords.push((2..headers.len()).map(num).collect::<Result<Vec<_>>>()?);
    }
    PointCloudSpace::from_coords(coords, mass)?.with_labels(ids)
}

fn parse_number_rows(text: &str) -> Result<Vec<Vec<f64>>> {
    let mut reader =
        csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_reader(text.as_bytes());
    reader
        .records()
        .map(|rec| {
            let rec = rec.map_err(|e| Error::Parse(e.to_string()))?;
            rec.iter().map(|v| v.parse::<f64>().map_err(|e| Error::Parse(format!("{v:?}: {e}")))).collect()
        })
        .collect()
}

/// Headerless n x n matrix file plus a masses file (one value per row, or one row).
pub fn parse_matrix_csv(matrix: &str, masses: &str) -> Result<PointCloudSpace> {
    let matrix = parse_number_rows(matrix)?;
    let mass: Vec<f64> = parse_number_rows(masses)?.into_iter().flatten().collect();
    PointCloudSpace::from_matrix(matrix, mass)
}

/// Loads a `.json` document or a `.csv` point table.
pub fn load_space(path: &Path) -> Result<PointCloudSpace> {
    let text = std::fs::read_to_string(path)?;
    match path.extension().and_then(|e| e.to_str()) {
        Some("csv") => parse_points_csv(&text),
        _ => parse_space_json(&text),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn euclidean_json() {
        let text = r#"{"points":[{"id":"a","mass":1,"coords":[0]},{"id":"b","mass":1,"coords":[1]},
            {"id":"c","mass":1,"coords":[2]}],"metric":"euclidean"}"#;
        let s = parse_space_json(text).unwrap();
        assert_eq!(s.len(), 3);
        assert_eq!(s.dist(0, 2), 2.0);
        assert_eq!(s.index_of("c"), Some(2));
    }

    #[test]
    fn matrix_json_errors() {
        let text = r#"{"points":[{"id":"a","mass":1},{"id":"b","mass":1}],"metric":{"matrix":[[0,1],[2,0]]}}"#;
        assert!(matches!(parse_space_json(text), Err(Error::NonSymmetricDistance { .. })));
        let bad = r#"{"points":[],"metric":"manhattan"}"#;
        assert!(matches!(parse_space_json(bad), Err(Error::Parse(_))));
        let unknown = r#"{"points":[],"metric":"euclidean","extra":1}"#;
        assert!(matches!(parse_space_json(unknown), Err(Error::Parse(_))));
    }

    #[test]
    fn csv_forms() {
        let s = parse_points_csv("id,mass,x0,x1\np,1.0,0,0\nq,2.0,3,4\n").unwrap();
        assert_eq!(s.dist(0, 1), 5.0);
        assert_eq!(s.mass(1), 2.0);
        let m = parse_matrix_csv("0,1,2\n1,0,1\n2,1,0\n", "1\n1\n1\n").unwrap();
        assert_eq!(m.dist(0, 2), 2.0);
    }

    #[test]
    fn document_round_trip() {
        let s = parse_points_csv("id,mass,x0\na,0.5,0\nb,0.5,0.25\n").unwrap();
        let doc = SpaceDocument::from_space(&s);
        let back = doc.into_space().unwrap();
        assert_eq!(back, s);
    }
}
