//! Input resolution: spaces, fields, point ids, families. Every file read is
//! recorded with its SHA-256 digest.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use epschain::fixtures::{fixture, Fixture};
use epschain::modulus::{ChainFamily, FunctionClass};
use epschain::poincare::riesz_weights;
use epschain::space::io::{parse_matrix_csv, parse_points_csv, parse_space_json};
use epschain::{FieldRole, Metric, PointCloudSpace, ScalarField};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::args::SpaceInput;
use crate::error::{CliError, CliResult};
use crate::expr::Expr;

#[derive(Debug, Default)]
pub struct Inputs {
    digests: BTreeMap<String, String>,
}

pub struct Loaded {
    pub space: PointCloudSpace,
    pub fixture: Option<Fixture>,
}

/// Core errors raised while reading inputs: parse failures become
/// `ConfigParse`, everything else keeps its own code.
fn input_err(e: epschain::Error) -> CliError {
    match e {
        epschain::Error::Parse(m) => CliError::ConfigParse(m),
        e => CliError::Input(e),
    }
}

impl Inputs {
    pub fn digests(&self) -> Vec<(String, String)> {
        self.digests.iter().map(|(k, v)| (k.clone(), v.clone())).collect()
    }

    pub fn read(&mut self, path: &Path) -> CliResult<String> {
        let bytes = std::fs::read(path)
            .map_err(|e| CliError::MissingInput(format!("cannot read {}: {e}", path.display())))?;
        self.digests.insert(path.display().to_string(), hex::encode(Sha256::digest(&bytes)));
        String::from_utf8(bytes).map_err(|_| CliError::ConfigParse(format!("{} is not UTF-8", path.display())))
    }

    pub fn space(&mut self, input: &SpaceInput) -> CliResult<Loaded> {
        let given = [input.space.is_some(), input.matrix.is_some(), input.fixture.is_some()];
        match given.iter().filter(|&&b| b).count() {
            0 => return Err(CliError::MissingInput("one of --space, --matrix/--masses or --fixture is required".into())),
            1 => {}
            _ => return Err(CliError::ConfigParse("--space, --matrix and --fixture are exclusive".into())),
        }
        if let Some(name) = &input.fixture {
            let f = fixture(name).ok_or_else(|| CliError::MissingInput(format!("unknown fixture {name:?}")))?;
            let space = f.space().map_err(input_err)?;
            return Ok(Loaded { space, fixture: Some(f) });
        }
        if let Some(path) = &input.space {
            let text = self.read(path)?;
            let space = match path.extension().and_then(|e| e.to_str()) {
                Some("csv") => parse_points_csv(&text),
                _ => parse_space_json(&text),
            }
            .map_err(input_err)?;
            return Ok(Loaded { space, fixture: None });
        }
        let (Some(matrix), Some(masses)) = (&input.matrix, &input.masses) else {
            return Err(CliError::MissingInput("--matrix needs --masses".into()));
        };
        let (m, w) = (self.read(matrix)?, self.read(masses)?);
        let space = parse_matrix_csv(&m, &w).map_err(input_err)?;
        Ok(Loaded { space, fixture: None })
    }

    /// Field spec: `fixture`, `expr:E`, `values:a,b,...`, `const:c`, `file:P`, or a bare path.
    pub fn field(&mut self, spec: &str, loaded: &Loaded, role: FieldRole) -> CliResult<ScalarField> {
        let space = &loaded.space;
        let n = space.len();
        let values = if spec == "fixture" {
            let f = loaded
                .fixture
                .as_ref()
                .ok_or_else(|| CliError::ConfigParse("field spec \"fixture\" needs --fixture".into()))?;
            f.default_u().map_err(CliError::Input)?.into_values()
        } else if let Some(e) = spec.strip_prefix("expr:") {
            let coords = space.coords().map(|c| c.to_vec()).unwrap_or_default();
            Expr::parse(e)?.eval_points(&coords, space.masses())?
        } else if let Some(list) = spec.strip_prefix("values:") {
            parse_reals(list)?
        } else if let Some(c) = spec.strip_prefix("const:") {
            vec![parse_real(c)?; n]
        } else {
            let path = PathBuf::from(spec.strip_prefix("file:").unwrap_or(spec));
            self.field_file(&path, space)?
        };
        if values.len() != n {
            return Err(CliError::Input(epschain::Error::LengthMismatch { expected: n, got: values.len() }));
        }
        ScalarField::new(role, values).map_err(CliError::Input)
    }

    /// Optional function spec, defaulting to the fixture's function.
    pub fn function(&mut self, spec: Option<&str>, loaded: &Loaded) -> CliResult<ScalarField> {
        match spec {
            Some(s) => self.field(s, loaded, FieldRole::Function),
            None if loaded.fixture.is_some() => self.field("fixture", loaded, FieldRole::Function),
            None => Err(CliError::ConfigParse("missing --u".into())),
        }
    }

    fn field_file(&mut self, path: &Path, space: &PointCloudSpace) -> CliResult<Vec<f64>> {
        let text = self.read(path)?;
        if path.extension().and_then(|e| e.to_str()) == Some("csv") {
            return parse_field_csv(&text, space);
        }
        let v: Value = serde_json::from_str(&text).map_err(|e| CliError::ConfigParse(format!("{}: {e}", path.display())))?;
        let list = match &v {
            Value::Object(o) => o.get("values").ok_or_else(|| CliError::ConfigParse("field file has no \"values\"".into()))?,
            other => other,
        };
        let Value::Array(items) = list else {
            return Err(CliError::ConfigParse("field values must be an array".into()));
        };
        items.iter().map(json_real).collect()
    }

    /// `connect:x,y`, `hit:ids` or `file:chains.json`.
    pub fn family(&mut self, spec: &str, space: &PointCloudSpace) -> CliResult<ChainFamily> {
        if let Some(rest) = spec.strip_prefix("connect:") {
            let ids = ids(space, rest)?;
            let [x, y] = ids[..] else {
                return Err(CliError::ConfigParse(format!("connect needs two points, got {rest:?}")));
            };
            return Ok(ChainFamily::Connect { x, y });
        }
        if let Some(rest) = spec.strip_prefix("hit:") {
            return Ok(ChainFamily::Hit { set: ids(space, rest)? });
        }
        let Some(path) = spec.strip_prefix("file:") else {
            return Err(CliError::ConfigParse(format!("unknown family {spec:?}")));
        };
        let text = self.read(Path::new(path))?;
        let v: Value = serde_json::from_str(&text).map_err(|e| CliError::ConfigParse(format!("{path}: {e}")))?;
        let list = match &v {
            Value::Object(o) => o.get("chains").cloned().unwrap_or(Value::Null),
            other => other.clone(),
        };
        let Value::Array(items) = list else {
            return Err(CliError::ConfigParse("chains file must hold an array of chains".into()));
        };
        let chains = items
            .iter()
            .map(|c| {
                let pts = match c {
                    Value::Object(o) => o.get("points").cloned().unwrap_or(Value::Null),
                    other => other.clone(),
                };
                let Value::Array(pts) = pts else {
                    return Err(CliError::ConfigParse("a chain is an array of ids or {\"points\": [...], \"eps\": e}".into()));
                };
                pts.iter().map(|p| json_id(space, p)).collect()
            })
            .collect::<CliResult<Vec<Vec<usize>>>>()?;
        Ok(ChainFamily::Explicit { chains })
    }
}

pub fn id(space: &PointCloudSpace, s: &str) -> CliResult<usize> {
    let s = s.trim();
    space
        .index_of(s)
        .ok_or_else(|| CliError::Input(epschain::Error::InvalidArgument(format!("unknown point id {s:?}"))))
}

pub fn ids(space: &PointCloudSpace, list: &str) -> CliResult<Vec<usize>> {
    list.split(',').filter(|s| !s.trim().is_empty()).map(|s| id(space, s)).collect()
}

fn json_id(space: &PointCloudSpace, v: &Value) -> CliResult<usize> {
    match v {
        Value::String(s) => id(space, s),
        Value::Number(k) => id(space, &k.to_string()),
        _ => Err(CliError::ConfigParse(format!("bad point id {v}"))),
    }
}

pub fn parse_real(s: &str) -> CliResult<f64> {
    match s.trim() {
        "inf" | "+inf" | "infinity" => Ok(f64::INFINITY),
        "-inf" => Ok(f64::NEG_INFINITY),
        t => t.parse::<f64>().map_err(|e| CliError::ConfigParse(format!("bad number {t:?}: {e}"))),
    }
}

fn parse_reals(list: &str) -> CliResult<Vec<f64>> {
    list.split(',').map(parse_real).collect()
}

fn json_real(v: &Value) -> CliResult<f64> {
    match v {
        Value::Number(k) => k.as_f64().ok_or_else(|| CliError::ConfigParse(format!("bad number {k}"))),
        Value::String(s) => parse_real(s),
        _ => Err(CliError::ConfigParse(format!("bad field value {v}"))),
    }
}

/// One value per row, or `id,value` rows in any order.
fn parse_field_csv(text: &str, space: &PointCloudSpace) -> CliResult<Vec<f64>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut plain = Vec::new();
    let mut keyed: Vec<Option<f64>> = vec![None; space.len()];
    let mut any_keyed = false;
    for rec in reader.records() {
        let rec = rec.map_err(|e| CliError::ConfigParse(e.to_string()))?;
        match rec.len() {
            1 => plain.push(parse_real(&rec[0])?),
            2 => {
                any_keyed = true;
                keyed[id(space, &rec[0])?] = Some(parse_real(&rec[1])?);
            }
            k => return Err(CliError::ConfigParse(format!("field CSV rows have 1 or 2 columns, got {k}"))),
        }
    }
    if !any_keyed {
        return Ok(plain);
    }
    if !plain.is_empty() {
        return Err(CliError::ConfigParse("field CSV mixes plain and keyed rows".into()));
    }
    keyed
        .into_iter()
        .enumerate()
        .map(|(i, v)| v.ok_or_else(|| CliError::ConfigParse(format!("field CSV has no value for point {i}"))))
        .collect()
}

/// `default` (the space's masses) or `riesz:x,y,L`.
pub fn measure(spec: Option<&str>, space: &PointCloudSpace) -> CliResult<Vec<f64>> {
    match spec {
        None | Some("default") => Ok(space.masses().to_vec()),
        Some(s) => {
            let rest = s
                .strip_prefix("riesz:")
                .ok_or_else(|| CliError::ConfigParse(format!("unknown measure {s:?}")))?;
            let parts: Vec<&str> = rest.split(',').collect();
            let [x, y, l] = parts[..] else {
                return Err(CliError::ConfigParse(format!("riesz measure is riesz:x,y,L, got {s:?}")));
            };
            let rw = riesz_weights(space, id(space, x)?, id(space, y)?, parse_real(l)?)?;
            Ok(rw.measure(space))
        }
    }
}

/// `all`, `finite:x,y`, `lip` or `lip:K`.
pub fn class(spec: Option<&str>, space: &PointCloudSpace) -> CliResult<FunctionClass> {
    match spec {
        None | Some("all") => Ok(FunctionClass::AllBorel),
        Some("lip") => Ok(FunctionClass::Lipschitz { bound: None }),
        Some(s) => {
            if let Some(k) = s.strip_prefix("lip:") {
                return Ok(FunctionClass::Lipschitz { bound: Some(parse_real(k)?) });
            }
            if let Some(rest) = s.strip_prefix("finite:") {
                if let [x, y] = ids(space, rest)?[..] {
                    return Ok(FunctionClass::FiniteAt { x, y });
                }
            }
            Err(CliError::ConfigParse(format!("unknown function class {s:?}")))
        }
    }
}
