use std::ops::Index;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldRole {
    Function,
    Gradient,
    Density,
}

/// Per-point extended-real values. Gradients and densities are nonnegative
/// and may be `+inf`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawField")]
pub struct ScalarField {
    pub role: FieldRole,
    #[serde(with = "ext_real::vec")]
    values: Vec<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawField {
    role: FieldRole,
    #[serde(with = "ext_real::vec")]
    values: Vec<f64>,
}

impl TryFrom<RawField> for ScalarField {
    type Error = Error;

    fn try_from(raw: RawField) -> Result<Self> {
        ScalarField::new(raw.role, raw.values)
    }
}

impl ScalarField {
    pub fn new(role: FieldRole, values: Vec<f64>) -> Result<Self> {
        for (i, &v) in values.iter().enumerate() {
            if v.is_nan() {
                return Err(Error::InvalidArgument(format!("NaN at point {i}")));
            }
            if role != FieldRole::Function && v < 0.0 {
                return Err(Error::InvalidArgument(format!("negative {role:?} value {v} at point {i}")));
            }
        }
        Ok(ScalarField { role, values })
    }

    pub fn function(values: Vec<f64>) -> Result<Self> {
        Self::new(FieldRole::Function, values)
    }

    pub fn gradient(values: Vec<f64>) -> Result<Self> {
        Self::new(FieldRole::Gradient, values)
    }

    pub fn density(values: Vec<f64>) -> Result<Self> {
        Self::new(FieldRole::Density, values)
    }

    pub fn constant(role: FieldRole, n: usize, c: f64) -> Result<Self> {
        Self::new(role, vec![c; n])
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn check_len(&self, n: usize) -> Result<()> {
        if self.values.len() == n {
            Ok(())
        } else {
            Err(Error::LengthMismatch { expected: n, got: self.values.len() })
        }
    }

    pub(crate) fn check_finite(&self) -> Result<()> {
        match self.values.iter().position(|v| !v.is_finite()) {
            Some(i) => Err(Error::InvalidArgument(format!("value at point {i} must be finite"))),
            None => Ok(()),
        }
    }
}

impl Index<usize> for ScalarField {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.values[i]
    }
}

/// Serde for extended reals: finite values as JSON numbers, infinities as
/// the strings `"inf"` / `"-inf"`.
pub mod ext_real {
    use serde::de::{self, Deserializer};
    use serde::ser::Serializer;
    use serde::{Deserialize, Serialize};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    fn to_repr(v: f64) -> Repr {
        if v == f64::INFINITY {
            Repr::Text("inf".into())
        } else if v == f64::NEG_INFINITY {
            Repr::Text("-inf".into())
        } else {
            Repr::Num(v)
        }
    }

    fn from_repr<E: de::Error>(r: Repr) -> Result<f64, E> {
        match r {
            Repr::Num(v) => Ok(v),
            Repr::Text(s) => match s.as_str() {
                "inf" | "+inf" | "infinity" => Ok(f64::INFINITY),
                "-inf" | "-infinity" => Ok(f64::NEG_INFINITY),
                _ => Err(E::custom(format!("expected a number or \"inf\", got {s:?}"))),
            },
        }
    }

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        to_repr(*v).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        from_repr(Repr::deserialize(d)?)
    }

    pub mod vec {
        use super::*;

        pub fn serialize<S: Serializer>(v: &[f64], s: S) -> Result<S::Ok, S::Error> {
            s.collect_seq(v.iter().map(|&x| to_repr(x)))
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
            Vec::<Repr>::deserialize(d)?.into_iter().map(from_repr).collect()
        }
    }

    pub mod option {
        use super::*;

        pub fn serialize<S: Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
            v.map(to_repr).serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
            Option::<Repr>::deserialize(d)?.map(from_repr).transpose()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roles_enforce_sign() {
        assert!(ScalarField::gradient(vec![0.0, f64::INFINITY]).is_ok());
        assert!(ScalarField::gradient(vec![-1.0]).is_err());
        assert!(ScalarField::function(vec![-1.0]).is_ok());
        assert!(ScalarField::function(vec![f64::NAN]).is_err());
    }

    #[test]
    fn infinities_round_trip() {
        let g = ScalarField::gradient(vec![1.5, f64::INFINITY]).unwrap();
        let text = serde_json::to_string(&g).unwrap();
        assert_eq!(text, r#"{"role":"gradient","values":[1.5,"inf"]}"#);
        let back: ScalarField = serde_json::from_str(&text).unwrap();
        assert_eq!(back, g);
    }
}
