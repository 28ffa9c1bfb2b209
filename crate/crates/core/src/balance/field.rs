//! Balancing over a sampled family of bodies.
//!
//! A field file gives a rectangular grid of parameters `q` and a body template
//! whose string-valued entries are affine expressions in `q`:
//!
//! ```json
//! {
//!   "grid": [{"min": -0.4, "max": 0.4, "count": 5}, {"min": -0.4, "max": 0.4, "count": 5}],
//!   "body_template": {"dimension": 2, "kind": "ball", "center": ["-x", "-y"]}
//! }
//! ```
//!
//! Each grid point is balanced independently. `F_V(v) = L` of the body
//! translated to its balancing vector `V`.

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{balancing_point_from, Affine, BalanceOptions};
use crate::bodies::{BodySpec, ConvexBody};
use crate::error::{FunkError, Result};
use crate::quadrature::SphereRule;
use crate::{Matrix, Vector};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridAxis {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl GridAxis {
    pub fn value(&self, i: usize) -> f64 {
        if self.count <= 1 {
            self.min
        } else {
            self.min + (self.max - self.min) * i as f64 / (self.count - 1) as f64
        }
    }

    fn spacing(&self) -> f64 {
        if self.count <= 1 {
            0.0
        } else {
            (self.max - self.min) / (self.count - 1) as f64
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSpec {
    pub grid: Vec<GridAxis>,
    pub body_template: Value,
}

fn substitute(value: &Value, key: Option<&str>, q: &[f64]) -> Result<Value> {
    Ok(match value {
        Value::String(s) if key != Some("kind") => {
            let x = s.parse::<Affine>()?.eval(q)?;
            serde_json::Number::from_f64(x)
                .map(Value::Number)
                .ok_or_else(|| FunkError::Config(format!("expression `{s}` is not finite")))?
        }
        Value::Array(items) => Value::Array(items.iter().map(|v| substitute(v, key, q)).collect::<Result<_>>()?),
        Value::Object(map) => Value::Object(
            map.iter()
                .map(|(k, v)| Ok((k.clone(), substitute(v, Some(k), q)?)))
                .collect::<Result<_>>()?,
        ),
        other => other.clone(),
    })
}

impl FieldSpec {
    pub fn from_json_str(text: &str) -> Result<Self> {
        let spec: Self = serde_json::from_str(text).map_err(|e| FunkError::Config(format!("field definition: {e}")))?;
        spec.check()?;
        Ok(spec)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| FunkError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json_str(&text)
    }

    fn check(&self) -> Result<()> {
        if self.grid.is_empty() {
            return Err(FunkError::Config("field grid needs at least one axis".into()));
        }
        for axis in &self.grid {
            if axis.count == 0 || !axis.min.is_finite() || !axis.max.is_finite() {
                return Err(FunkError::Config(format!("bad grid axis {axis:?}")));
            }
        }
        // Parse once at a representative point so template errors surface early.
        self.body_spec(&self.coords(0)).map(|_| ())
    }

    pub fn len(&self) -> usize {
        self.grid.iter().map(|a| a.count).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Multi-index of grid point `index`; the last axis varies fastest.
    pub fn grid_index(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.grid.len()];
        for (k, axis) in self.grid.iter().enumerate().rev() {
            out[k] = index % axis.count;
            index /= axis.count;
        }
        out
    }

    fn flat_index(&self, idx: &[usize]) -> usize {
        idx.iter().zip(&self.grid).fold(0, |acc, (&i, a)| acc * a.count + i)
    }

    pub fn coords(&self, index: usize) -> Vec<f64> {
        self.grid_index(index)
            .iter()
            .zip(&self.grid)
            .map(|(&i, a)| a.value(i))
            .collect()
    }

    pub fn body_spec(&self, q: &[f64]) -> Result<BodySpec> {
        let value = substitute(&self.body_template, None, q)?;
        serde_json::from_value(value).map_err(|e| FunkError::Config(format!("body template: {e}")))
    }

    pub fn body_at(&self, q: &[f64]) -> Result<ConvexBody> {
        self.body_spec(q)?.build()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct FieldOptions {
    pub balance: BalanceOptions,
    /// Start each point from its predecessor's balancing vector (sequential).
    /// Otherwise points start at the origin and run in parallel.
    pub warm_start: bool,
}

impl Default for FieldOptions {
    fn default() -> Self {
        Self {
            balance: BalanceOptions::default(),
            warm_start: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct FieldPoint {
    pub coords: Vec<f64>,
    /// `V(q)`, absent if balancing failed.
    pub balancing: Option<Vector>,
    /// `‖β‖` at `V(q)`.
    pub residual: Option<f64>,
    pub iterations: usize,
    pub error: Option<String>,
    body: Option<ConvexBody>,
}

#[derive(Debug, Clone)]
pub struct BalancedField {
    spec: FieldSpec,
    points: Vec<FieldPoint>,
}

fn failed(coords: Vec<f64>, e: FunkError) -> FieldPoint {
    FieldPoint {
        coords,
        balancing: None,
        residual: None,
        iterations: 0,
        error: Some(e.to_string()),
        body: None,
    }
}

fn solve_point(spec: &FieldSpec, index: usize, rule: &SphereRule, opts: &BalanceOptions, warm: Option<&Vector>) -> FieldPoint {
    let coords = spec.coords(index);
    let body = match spec.body_at(&coords) {
        Ok(b) => b,
        Err(e) => return failed(coords, e),
    };
    let origin = Vector::zeros(body.dimension());
    let start = warm
        .filter(|s| s.len() == body.dimension() && body.check_interior(s, opts.margin).is_ok())
        .cloned()
        .unwrap_or(origin);
    match balancing_point_from(&body, rule, &start, opts).and_then(|r| r.require_converged()) {
        Ok(res) => FieldPoint {
            coords,
            balancing: Some(res.point),
            residual: Some(res.beta_norm),
            iterations: res.iterations,
            error: None,
            body: Some(body),
        },
        Err(e) => failed(coords, e),
    }
}

/// Balance every grid point of `spec`.
pub fn balanced_field(spec: &FieldSpec, rule: &SphereRule, opts: &FieldOptions) -> Result<BalancedField> {
    spec.check()?;
    let count = spec.len();
    let points = if opts.warm_start {
        let mut points: Vec<FieldPoint> = Vec::with_capacity(count);
        let mut last: Option<Vector> = None;
        for index in 0..count {
            let point = solve_point(spec, index, rule, &opts.balance, last.as_ref());
            if let Some(v) = &point.balancing {
                last = Some(v.clone());
            }
            points.push(point);
        }
        points
    } else {
        (0..count)
            .into_par_iter()
            .map(|index| solve_point(spec, index, rule, &opts.balance, None))
            .collect()
    };
    Ok(BalancedField {
        spec: spec.clone(),
        points,
    })
}

impl BalancedField {
    pub fn spec(&self) -> &FieldSpec {
        &self.spec
    }

    pub fn points(&self) -> &[FieldPoint] {
        &self.points
    }

    pub fn failures(&self) -> usize {
        self.points.iter().filter(|p| p.error.is_some()).count()
    }

    /// Largest residual over the successful points.
    pub fn max_residual(&self) -> f64 {
        self.points
            .iter()
            .filter_map(|p| p.residual)
            .fold(0.0, f64::max)
    }

    /// `F_V(v)` at grid point `index`.
    pub fn balanced_norm(&self, index: usize, v: &Vector) -> Result<f64> {
        let point = self
            .points
            .get(index)
            .ok_or_else(|| FunkError::InvalidParameter(format!("grid index {index} out of range")))?;
        match (&point.body, &point.balancing) {
            (Some(body), Some(vp)) => body.translate(vp)?.minkowski(v),
            _ => Err(FunkError::InvalidParameter(format!(
                "grid point {index} has no balancing vector"
            ))),
        }
    }

    /// Finite-difference `∂V/∂q` at grid point `index` (n × grid axes).
    /// Central differences inside, one-sided at the edges; `None` if a
    /// needed neighbor failed. Axes with a single node give zero columns.
    pub fn jacobian(&self, index: usize) -> Option<Matrix> {
        let center = self.points.get(index)?.balancing.as_ref()?;
        let n = center.len();
        let idx = self.spec.grid_index(index);
        let mut jac = Matrix::zeros(n, self.spec.grid.len());
        for (k, axis) in self.spec.grid.iter().enumerate() {
            if axis.count < 2 {
                continue;
            }
            let at = |i: usize| {
                let mut j = idx.clone();
                j[k] = i;
                self.points[self.spec.flat_index(&j)].balancing.clone()
            };
            let (lo, hi) = (idx[k].saturating_sub(1), (idx[k] + 1).min(axis.count - 1));
            let (vlo, vhi) = (at(lo)?, at(hi)?);
            let col = (vhi - vlo) / (axis.spacing() * (hi - lo) as f64);
            jac.set_column(k, &col);
        }
        Some(jac)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::build_rule;

    const BALL_FIELD: &str = r#"{
        "grid": [{"min": -0.3, "max": 0.3, "count": 3}, {"min": -0.3, "max": 0.3, "count": 3}],
        "body_template": {"dimension": 2, "kind": "ball", "center": ["-x", "-y"]}
    }"#;

    #[test]
    fn ball_funk_field_is_minus_identity() {
        let spec = FieldSpec::from_json_str(BALL_FIELD).unwrap();
        let rule = build_rule(2, 256).unwrap();
        let field = balanced_field(&spec, &rule, &FieldOptions::default()).unwrap();
        assert_eq!(field.failures(), 0);
        for (i, p) in field.points().iter().enumerate() {
            let v = p.balancing.as_ref().unwrap();
            assert!((v[0] + p.coords[0]).abs() < 1e-8 && (v[1] + p.coords[1]).abs() < 1e-8);
            let jac = field.jacobian(i).unwrap();
            assert!((jac + Matrix::identity(2, 2)).amax() < 1e-6);
        }
        // Balanced at V the body is the centered unit ball.
        let v = Vector::from_vec(vec![3.0, 4.0]);
        assert!((field.balanced_norm(4, &v).unwrap() - 5.0).abs() < 1e-7);
    }

    #[test]
    fn parallel_matches_warm_start() {
        let spec = FieldSpec::from_json_str(BALL_FIELD).unwrap();
        let rule = build_rule(2, 128).unwrap();
        let a = balanced_field(&spec, &rule, &FieldOptions::default()).unwrap();
        let opts = FieldOptions {
            warm_start: false,
            ..Default::default()
        };
        let b = balanced_field(&spec, &rule, &opts).unwrap();
        for (p, q) in a.points().iter().zip(b.points()) {
            assert_eq!(p.coords, q.coords);
            let d = p.balancing.as_ref().unwrap() - q.balancing.as_ref().unwrap();
            assert!(d.amax() < 1e-9);
        }
    }

    #[test]
    fn failures_are_recorded_per_point() {
        // The origin leaves the body for |x| ≥ 1.
        let text = r#"{
            "grid": [{"min": 0.0, "max": 1.5, "count": 2}],
            "body_template": {"dimension": 2, "kind": "ball", "center": ["x", 0]}
        }"#;
        let spec = FieldSpec::from_json_str(text).unwrap();
        let rule = build_rule(2, 64).unwrap();
        let opts = FieldOptions {
            warm_start: false,
            ..Default::default()
        };
        let field = balanced_field(&spec, &rule, &opts).unwrap();
        assert_eq!(field.failures(), 1);
        assert!(field.points()[1].error.is_some());
    }

    #[test]
    fn template_errors_surface_at_load() {
        let text = r#"{"grid": [{"min": 0, "max": 1, "count": 2}],
                       "body_template": {"dimension": 2, "kind": "ball", "center": ["x*x", 0]}}"#;
        assert!(FieldSpec::from_json_str(text).is_err());
        let text = r#"{"grid": [], "body_template": {}}"#;
        assert!(FieldSpec::from_json_str(text).is_err());
    }
}
