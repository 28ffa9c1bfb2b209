//! JSON body definitions.
//!
//! ```json
//! { "dimension": 2, "kind": "randers", "matrix": [[1, 0], [0, 1]], "beta": [0, 0.3] }
//! ```
//!
//! Keys per kind (anything else is rejected):
//!
//! | kind             | required            | optional             |
//! |------------------|---------------------|----------------------|
//! | `ball`           |                     | `center`, `radius`   |
//! | `ellipsoid`      | `axes` or `matrix`  | `center`             |
//! | `randers`        | `beta`              | `matrix` (default I) |
//! | `radial2d`       | `fourier`           |                      |
//! | `superellipsoid` | `axes`, `exponent`  |                      |

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{ConvexBody, FourierProfile};
use crate::error::{FunkError, Result};
use crate::{Matrix, Vector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KindName {
    Ball,
    Ellipsoid,
    Randers,
    Radial2d,
    Superellipsoid,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BodySpec {
    pub dimension: usize,
    pub kind: KindName,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub axes: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fourier: Option<FourierProfile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exponent: Option<u32>,
}

fn bad(msg: impl Into<String>) -> FunkError {
    FunkError::Config(msg.into())
}

impl BodySpec {
    pub fn from_json_str(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| bad(format!("body definition: {e}")))
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| bad(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json_str(&text)
    }

    fn allowed(&self) -> &'static [&'static str] {
        match self.kind {
            KindName::Ball => &["center", "radius"],
            KindName::Ellipsoid => &["axes", "matrix", "center"],
            KindName::Randers => &["matrix", "beta"],
            KindName::Radial2d => &["fourier"],
            KindName::Superellipsoid => &["axes", "exponent"],
        }
    }

    fn present(&self) -> Vec<&'static str> {
        let mut keys = Vec::new();
        let flags = [
            ("center", self.center.is_some()),
            ("radius", self.radius.is_some()),
            ("axes", self.axes.is_some()),
            ("matrix", self.matrix.is_some()),
            ("beta", self.beta.is_some()),
            ("fourier", self.fourier.is_some()),
            ("exponent", self.exponent.is_some()),
        ];
        for (key, on) in flags {
            if on {
                keys.push(key);
            }
        }
        keys
    }

    fn vector(&self, key: &str, values: &[f64]) -> Result<Vector> {
        if values.len() != self.dimension {
            return Err(bad(format!(
                "`{key}` has {} entries, expected {}",
                values.len(),
                self.dimension
            )));
        }
        Ok(Vector::from_column_slice(values))
    }

    fn matrix(&self, rows: &[Vec<f64>]) -> Result<Matrix> {
        let n = self.dimension;
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(bad(format!("`matrix` must be {n}×{n}")));
        }
        Ok(Matrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    /// Construct the body this definition describes.
    pub fn build(&self) -> Result<ConvexBody> {
        let allowed = self.allowed();
        for key in self.present() {
            if !allowed.contains(&key) {
                return Err(bad(format!("key `{key}` is not valid for kind {:?}", self.kind)));
            }
        }
        let n = self.dimension;
        if !(2..=4).contains(&n) {
            return Err(FunkError::UnsupportedDimension(n));
        }
        let center = self
            .center
            .as_deref()
            .map(|c| self.vector("center", c))
            .transpose()?;
        match self.kind {
            KindName::Ball => ConvexBody::ball_at(
                center.unwrap_or_else(|| Vector::zeros(n)),
                self.radius.unwrap_or(1.0),
            ),
            KindName::Ellipsoid => match (&self.axes, &self.matrix) {
                (Some(axes), None) => {
                    self.vector("axes", axes)?;
                    ConvexBody::ellipsoid_axes(axes, center)
                }
                (None, Some(rows)) => ConvexBody::ellipsoid(self.matrix(rows)?, center),
                _ => Err(bad("ellipsoid needs exactly one of `axes` or `matrix`")),
            },
            KindName::Randers => {
                let beta = self.beta.as_deref().ok_or_else(|| bad("randers needs `beta`"))?;
                let beta = self.vector("beta", beta)?;
                let a = match &self.matrix {
                    Some(rows) => self.matrix(rows)?,
                    None => Matrix::identity(n, n),
                };
                ConvexBody::randers(a, beta)
            }
            KindName::Radial2d => {
                if n != 2 {
                    return Err(bad("radial2d bodies are planar (dimension 2)"));
                }
                let profile = self.fourier.clone().ok_or_else(|| bad("radial2d needs `fourier`"))?;
                ConvexBody::radial2d(profile)
            }
            KindName::Superellipsoid => {
                let axes = self.axes.as_deref().ok_or_else(|| bad("superellipsoid needs `axes`"))?;
                self.vector("axes", axes)?;
                let exponent = self.exponent.ok_or_else(|| bad("superellipsoid needs `exponent`"))?;
                ConvexBody::superellipsoid(axes, exponent)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::BodyKind;

    #[test]
    fn parses_randers_definition() {
        let spec = BodySpec::from_json_str(
            r#"{"dimension": 2, "kind": "randers", "matrix": [[1,0],[0,1]], "beta": [0, 0.3]}"#,
        )
        .unwrap();
        let body = spec.build().unwrap();
        assert_eq!(body.kind(), BodyKind::Randers);
        let v = Vector::from_vec(vec![0.0, 1.0]);
        assert!((body.minkowski(&v).unwrap() - 1.3).abs() < 1e-15);
    }

    #[test]
    fn rejects_unknown_keys() {
        let err = BodySpec::from_json_str(r#"{"dimension": 2, "kind": "ball", "colour": "red"}"#);
        assert!(err.is_err());
    }

    #[test]
    fn rejects_keys_of_other_kinds() {
        let spec = BodySpec::from_json_str(r#"{"dimension": 2, "kind": "ball", "beta": [0, 0.1]}"#).unwrap();
        assert!(matches!(spec.build(), Err(FunkError::Config(_))));
    }

    #[test]
    fn radial_body_must_be_planar() {
        let spec = BodySpec::from_json_str(r#"{"dimension": 3, "kind": "radial2d", "fourier": {"a0": 1}}"#).unwrap();
        assert!(spec.build().is_err());
    }

    #[test]
    fn wrong_center_length_is_reported() {
        let spec = BodySpec::from_json_str(r#"{"dimension": 3, "kind": "ball", "center": [0, 0]}"#).unwrap();
        assert!(matches!(spec.build(), Err(FunkError::Config(_))));
    }
}
