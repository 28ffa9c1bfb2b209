//! Smooth convex bodies containing the origin and their Minkowski functionals.
//!
//! Every body exposes `L`, `∇L` and `Hess L` analytically. Closed-form kinds
//! also provide third derivatives. Translating a quadric (ball, ellipsoid,
//! Randers) gives another quadric. Any other translated body evaluates its
//! gauge by solving `L(c + s·v) = 1` along the ray.

mod config;
mod quadric;
mod radial;
mod superellipsoid;

use std::fmt;

use serde::Serialize;

pub use config::{BodySpec, KindName};
pub use radial::FourierProfile;

use crate::error::{FunkError, Result};
use crate::linalg::{outer, symmetric_eigenvalues, symmetrize, Tensor3};
use crate::quadrature::SphereRule;
use crate::{Matrix, Vector, DEFAULT_MARGIN};

use quadric::Quadric;
use superellipsoid::SuperEllipsoid;

/// The family a body belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BodyKind {
    Ball,
    Ellipsoid,
    Randers,
    Radial2d,
    Superellipsoid,
    /// A non-quadric body seen from a shifted origin.
    Translated,
}

impl fmt::Display for BodyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            BodyKind::Ball => "ball",
            BodyKind::Ellipsoid => "ellipsoid",
            BodyKind::Randers => "randers",
            BodyKind::Radial2d => "radial2d",
            BodyKind::Superellipsoid => "superellipsoid",
            BodyKind::Translated => "translated",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Clone)]
enum Shape {
    Quadric(Quadric),
    Radial(FourierProfile),
    Super(SuperEllipsoid),
    Translated { base: Box<ConvexBody>, offset: Vector },
}

/// Value, gradient and Hessian of `L` at one vector.
#[derive(Debug, Clone)]
pub struct Jet {
    pub value: f64,
    pub gradient: Vector,
    pub hessian: Matrix,
}

/// Outcome of a metric eigenvalue scan.
///
/// `margin` is the worst ratio `λ_min / λ_max` of the metric tensor over the
/// scanned directions.
#[derive(Debug, Clone, Serialize)]
pub struct RegularityReport {
    pub min_metric_eigenvalue: f64,
    pub worst_node: Vec<f64>,
    pub is_strongly_convex: bool,
    pub margin: f64,
}

/// A smooth convex body with the origin in its interior.
#[derive(Debug, Clone)]
pub struct ConvexBody {
    dim: usize,
    kind: BodyKind,
    shape: Shape,
}

const ROOT_REL_TOL: f64 = 1e-13;
const ROOT_MAX_ITER: usize = 200;

fn check_dimension(n: usize) -> Result<()> {
    if (2..=4).contains(&n) {
        Ok(())
    } else {
        Err(FunkError::UnsupportedDimension(n))
    }
}

fn is_zero(v: &Vector) -> bool {
    v.iter().all(|&x| x == 0.0)
}

impl ConvexBody {
    /// Euclidean unit ball.
    pub fn ball(n: usize) -> Result<Self> {
        Self::ball_at(Vector::zeros(n), 1.0)
    }

    /// Euclidean ball of `radius` around `center`; the origin must be interior.
    pub fn ball_at(center: Vector, radius: f64) -> Result<Self> {
        let n = center.len();
        check_dimension(n)?;
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(FunkError::InvalidBody("ball radius must be positive".into()));
        }
        let shape = Matrix::identity(n, n) / (radius * radius);
        Ok(Self {
            dim: n,
            kind: BodyKind::Ball,
            shape: Shape::Quadric(Quadric::from_ellipsoid(shape, center)?),
        })
    }

    /// Axis-aligned ellipsoid with semi-axes `axes` around `center`.
    pub fn ellipsoid_axes(axes: &[f64], center: Option<Vector>) -> Result<Self> {
        if axes.iter().any(|&a| !(a > 0.0 && a.is_finite())) {
            return Err(FunkError::InvalidBody("ellipsoid axes must be positive".into()));
        }
        let shape = Matrix::from_diagonal(&Vector::from_iterator(
            axes.len(),
            axes.iter().map(|a| 1.0 / (a * a)),
        ));
        Self::ellipsoid(shape, center)
    }

    /// Ellipsoid `{x : (x - c)ᵀ A (x - c) ≤ 1}`.
    pub fn ellipsoid(matrix: Matrix, center: Option<Vector>) -> Result<Self> {
        let n = matrix.nrows();
        check_dimension(n)?;
        let center = center.unwrap_or_else(|| Vector::zeros(n));
        Ok(Self {
            dim: n,
            kind: BodyKind::Ellipsoid,
            shape: Shape::Quadric(Quadric::from_ellipsoid(matrix, center)?),
        })
    }

    /// Randers gauge `L(v) = √(vᵀ A v) + b·v` with `bᵀ A⁻¹ b < 1`.
    pub fn randers(a: Matrix, b: Vector) -> Result<Self> {
        let n = a.nrows();
        check_dimension(n)?;
        Ok(Self {
            dim: n,
            kind: BodyKind::Randers,
            shape: Shape::Quadric(Quadric::from_randers(a, b)?),
        })
    }

    /// Planar star body with boundary radius `ρ(θ)`.
    pub fn radial2d(profile: FourierProfile) -> Result<Self> {
        profile.check()?;
        Ok(Self {
            dim: 2,
            kind: BodyKind::Radial2d,
            shape: Shape::Radial(profile),
        })
    }

    pub fn superellipsoid(axes: &[f64], exponent: u32) -> Result<Self> {
        check_dimension(axes.len())?;
        Ok(Self {
            dim: axes.len(),
            kind: BodyKind::Superellipsoid,
            shape: Shape::Super(SuperEllipsoid::new(axes.to_vec(), exponent)?),
        })
    }

    pub fn dimension(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> BodyKind {
        self.kind
    }

    /// Highest derivative order of `L` available in closed form.
    pub fn derivative_order(&self) -> usize {
        match self.shape {
            Shape::Translated { .. } => 2,
            _ => 3,
        }
    }

    /// Center and shape matrix for ball, ellipsoid and Randers bodies.
    pub fn quadric_form(&self) -> Option<(&Vector, &Matrix)> {
        match &self.shape {
            Shape::Quadric(q) => Some((q.center(), q.shape())),
            _ => None,
        }
    }

    /// A direction where the metric tensor degenerates by construction
    /// (flat points of superellipsoids with exponent > 2).
    pub fn degenerate_direction(&self) -> Option<Vector> {
        match &self.shape {
            Shape::Super(s) if s.is_degenerate() => {
                let mut e = Vector::zeros(self.dim);
                e[0] = 1.0;
                Some(e)
            }
            Shape::Translated { base, .. } => base.degenerate_direction(),
            _ => None,
        }
    }

    /// Superellipsoid exponent, if any.
    pub fn exponent(&self) -> Option<u32> {
        match &self.shape {
            Shape::Super(s) => Some(s.exponent()),
            Shape::Translated { base, .. } => base.exponent(),
            _ => None,
        }
    }

    fn check_vector(&self, v: &Vector) -> Result<()> {
        if v.len() != self.dim {
            return Err(FunkError::DimensionMismatch {
                expected: self.dim,
                found: v.len(),
            });
        }
        if v.iter().any(|x| !x.is_finite()) {
            return Err(FunkError::InvalidParameter(format!("non-finite vector {:?}", v.as_slice())));
        }
        if is_zero(v) {
            return Err(FunkError::ZeroVector);
        }
        Ok(())
    }

    /// Minkowski functional `L(v)`; `v/L(v)` lies on the boundary.
    pub fn minkowski(&self, v: &Vector) -> Result<f64> {
        self.check_vector(v)?;
        self.value_unchecked(v)
    }

    /// `L(p)` extended by `L(0) = 0`, for interior tests.
    pub fn gauge(&self, p: &Vector) -> Result<f64> {
        if p.len() != self.dim {
            return Err(FunkError::DimensionMismatch {
                expected: self.dim,
                found: p.len(),
            });
        }
        if is_zero(p) {
            return Ok(0.0);
        }
        self.minkowski(p)
    }

    /// Fails unless `L(p) ≤ 1 - margin`; returns `L(p)`.
    pub fn check_interior(&self, p: &Vector, margin: f64) -> Result<f64> {
        let value = self.gauge(p)?;
        let limit = 1.0 - margin;
        if !(value <= limit) {
            return Err(FunkError::InteriorViolation {
                point: p.iter().copied().collect(),
                value,
                limit,
            });
        }
        Ok(value)
    }

    fn value_unchecked(&self, v: &Vector) -> Result<f64> {
        Ok(match &self.shape {
            Shape::Quadric(q) => q.value(v),
            Shape::Radial(p) => radial::value(p, v),
            Shape::Super(s) => s.value(v),
            Shape::Translated { base, offset } => 1.0 / exit_parameter(base, offset, v)?,
        })
    }

    pub fn gradient(&self, v: &Vector) -> Result<Vector> {
        self.check_vector(v)?;
        Ok(match &self.shape {
            Shape::Quadric(q) => q.gradient(v),
            Shape::Radial(p) => radial::gradient(p, v),
            Shape::Super(s) => s.gradient(v),
            Shape::Translated { base, offset } => {
                let s = exit_parameter(base, offset, v)?;
                let g = base.gradient(&(offset + v * s))?;
                let denom = 1.0 - offset.dot(&g);
                g / denom
            }
        })
    }

    pub fn hessian(&self, v: &Vector) -> Result<Matrix> {
        Ok(self.jet(v)?.hessian)
    }

    /// `L`, `∇L` and `Hess L` in one evaluation.
    pub fn jet(&self, v: &Vector) -> Result<Jet> {
        self.check_vector(v)?;
        Ok(match &self.shape {
            Shape::Quadric(q) => Jet {
                value: q.value(v),
                gradient: q.gradient(v),
                hessian: q.hessian(v),
            },
            Shape::Radial(p) => Jet {
                value: radial::value(p, v),
                gradient: radial::gradient(p, v),
                hessian: radial::hessian(p, v),
            },
            Shape::Super(s) => Jet {
                value: s.value(v),
                gradient: s.gradient(v),
                hessian: s.hessian(v),
            },
            Shape::Translated { base, offset } => translated_jet(base, offset, v)?,
        })
    }

    /// Third partial derivatives `∂³L/∂v^i∂v^j∂v^k`.
    pub fn third_derivative(&self, v: &Vector) -> Result<Tensor3> {
        self.check_vector(v)?;
        match &self.shape {
            Shape::Quadric(q) => Ok(q.third(v)),
            Shape::Radial(p) => Ok(radial::third(p, v)),
            Shape::Super(s) => Ok(s.third(v)),
            Shape::Translated { .. } => Err(FunkError::DerivativeOrder {
                required: 3,
                available: self.derivative_order(),
            }),
        }
    }

    /// The same body with its origin moved to `c` (default interior margin).
    pub fn translate(&self, c: &Vector) -> Result<Self> {
        self.translate_with_margin(c, DEFAULT_MARGIN)
    }

    /// The body `K - c`, whose gauge `L_c` satisfies `L(c + v/L_c(v)) = 1`.
    pub fn translate_with_margin(&self, c: &Vector, margin: f64) -> Result<Self> {
        self.check_interior(c, margin)?;
        if is_zero(c) {
            return Ok(self.clone());
        }
        let shape = match &self.shape {
            Shape::Quadric(q) => Shape::Quadric(q.shifted(c)?),
            Shape::Translated { base, offset } => Shape::Translated {
                base: base.clone(),
                offset: offset + c,
            },
            _ => Shape::Translated {
                base: Box::new(self.clone()),
                offset: c.clone(),
            },
        };
        let kind = match shape {
            Shape::Quadric(_) => self.kind,
            _ => BodyKind::Translated,
        };
        Ok(Self {
            dim: self.dim,
            kind,
            shape,
        })
    }

    /// Scan the metric tensor over the rule's nodes and the coordinate axes.
    pub fn validate(&self, rule: &SphereRule) -> Result<RegularityReport> {
        if rule.dimension() != self.dim {
            return Err(FunkError::DimensionMismatch {
                expected: self.dim,
                found: rule.dimension(),
            });
        }
        let mut directions: Vec<Vector> = rule.nodes().to_vec();
        for i in 0..self.dim {
            for sign in [1.0, -1.0] {
                let mut e = Vector::zeros(self.dim);
                e[i] = sign;
                directions.push(e);
            }
        }
        let mut worst = f64::INFINITY;
        let mut worst_node = directions[0].clone();
        let mut margin = f64::INFINITY;
        for u in &directions {
            let g = crate::metric::metric_matrix(self, u)?;
            let eig = symmetric_eigenvalues(&g);
            let (lo, hi) = (eig[0], eig[eig.len() - 1]);
            if lo < worst {
                worst = lo;
                worst_node = u.clone();
            }
            margin = margin.min(lo / hi);
        }
        Ok(RegularityReport {
            min_metric_eigenvalue: worst,
            worst_node: worst_node.iter().copied().collect(),
            is_strongly_convex: worst > 0.0,
            margin,
        })
    }
}

/// Parameter `s > 0` with `L(offset + s·v) = 1`.
///
/// `h(s) = L(offset + s v) - 1` is convex with `h(0) < 0`; bracket by
/// doubling, then Newton safeguarded by bisection.
fn exit_parameter(base: &ConvexBody, offset: &Vector, v: &Vector) -> Result<f64> {
    let fail = |reason: &str| FunkError::RootFinding {
        direction: v.iter().copied().collect(),
        reason: reason.to_string(),
    };
    let h = |s: f64| -> Result<f64> { Ok(base.gauge(&(offset + v * s))? - 1.0) };
    let lv = base.value_unchecked(v)?;
    let lc = base.gauge(offset)?;
    // Sub-additivity gives h(lo) ≤ 0.
    let mut lo = (1.0 - lc) / lv;
    let mut hi = 2.0 * lo;
    let mut doublings = 0;
    while h(hi)? <= 0.0 {
        lo = hi;
        hi *= 2.0;
        doublings += 1;
        if doublings > 64 {
            return Err(fail("no sign change while bracketing"));
        }
    }
    let mut s = hi;
    for _ in 0..ROOT_MAX_ITER {
        let x = offset + v * s;
        let f = base.gauge(&x)? - 1.0;
        if f == 0.0 {
            return Ok(s);
        }
        if f > 0.0 {
            hi = s;
        } else {
            lo = s;
        }
        let df = base.gradient(&x)?.dot(v);
        let mut next = s - f / df;
        if !(df > 0.0) || !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - s).abs() <= ROOT_REL_TOL * next || hi - lo <= 4.0 * f64::EPSILON * hi {
            return Ok(next);
        }
        s = next;
    }
    Err(fail("iteration limit reached"))
}

/// Implicit differentiation of `L(c + v/t(v)) = 1`:
///
/// ```text
///   ∇t = G / D,   D = 1 - c·G,   G = ∇L(ρ),   ρ = c + v/t
///   Hess t = (I + G cᵀ / D) Hess L(ρ) J / D,   J = (I - (ρ - c) ∇tᵀ) / t
/// ```
fn translated_jet(base: &ConvexBody, offset: &Vector, v: &Vector) -> Result<Jet> {
    let n = v.len();
    let s = exit_parameter(base, offset, v)?;
    let t = 1.0 / s;
    let rho = offset + v * s;
    let inner = base.jet(&rho)?;
    let g = inner.gradient;
    let d = 1.0 - offset.dot(&g);
    let grad = &g / d;
    let identity = Matrix::identity(n, n);
    let j = (&identity - outer(&(v * s), &grad)) / t;
    let left = &identity + outer(&g, offset) / d;
    let hess = left * inner.hessian * j / d;
    Ok(Jet {
        value: t,
        gradient: grad,
        hessian: symmetrize(&hess),
    })
}
