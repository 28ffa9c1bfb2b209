//! Funk functionals and the area function.
//!
//! For an interior point `p` of `K` the Funk functional `F(v_p) = L_p(v)` is
//! defined by `L(p + v/L_p(v)) = 1`. Its indicatrix `∂K_p` is `∂K - p`, and
//! the projection `ρ(v_p) = p + v/L_p(v)` is conformal with factor
//! `1 - p·∇L(ρ)`. The area function is
//!
//! ```text
//!   r(p) = ∫_{∂K_p} 1 μ_p = ∫_{∂K} (1 - p·∇L)^{-(n-1)/2} μ
//! ```
//!
//! (direct and projected routes), and every partial derivative is a moment
//! of `∇F` over `∂K_p`:
//!
//! ```text
//!   ∂^α r(p) = c_|α| ∫_{∂K_p} Π_k (∂F/∂y^k)^{α_k} μ_p,
//!   c_0 = 1,  c_{m+1} = c_m · ((n-1) + 2m) / 2.
//! ```

mod averaged;
mod multiindex;
mod taylor;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use averaged::{associated_randers, averaged_cartan_trace, averaged_metrics, AssociatedKind, AssociatedRanders, AveragedMetrics};
pub use multiindex::MultiIndex;
pub use taylor::{taylor_build, taylor_eval, TaylorCoefficient, TaylorModel, MAX_TAYLOR_ORDER, TAYLOR_DELTA};

use crate::bodies::ConvexBody;
use crate::error::{FunkError, Result};
use crate::linalg::outer;
use crate::metric::volume_weight;
use crate::quadrature::{map_nodes, CompensatedSum, SphereRule};
use crate::{Matrix, Vector, DEFAULT_MARGIN};

/// Largest `|α|` accepted by [`area_derivative`].
pub const MAX_DERIVATIVE_ORDER: usize = 8;

/// A body together with an interior base point.
#[derive(Debug, Clone)]
pub struct FunkContext {
    body: ConvexBody,
    base_point: Vector,
    translated: ConvexBody,
    margin: f64,
}

impl FunkContext {
    pub fn new(body: &ConvexBody, base_point: Vector) -> Result<Self> {
        Self::with_margin(body, base_point, DEFAULT_MARGIN)
    }

    /// Fails if `L(p) > 1 - margin` or the body is degenerate.
    pub fn with_margin(body: &ConvexBody, base_point: Vector, margin: f64) -> Result<Self> {
        if let Some(direction) = body.degenerate_direction() {
            let g = crate::metric::metric_matrix(body, &direction)?;
            return Err(FunkError::Regularity {
                direction: direction.iter().copied().collect(),
                min_eigenvalue: crate::linalg::min_eigenvalue(&g),
            });
        }
        let translated = body.translate_with_margin(&base_point, margin)?;
        Ok(Self {
            body: body.clone(),
            base_point,
            translated,
            margin,
        })
    }

    pub fn body(&self) -> &ConvexBody {
        &self.body
    }

    pub fn base_point(&self) -> &Vector {
        &self.base_point
    }

    /// `K - p`, whose gauge is `L_p`.
    pub fn translated(&self) -> &ConvexBody {
        &self.translated
    }

    pub fn margin(&self) -> f64 {
        self.margin
    }

    pub fn dimension(&self) -> usize {
        self.body.dimension()
    }

    /// `ρ(v_p) = p + v / L_p(v)` and `∇L(ρ)`.
    fn projection(&self, v: &Vector) -> Result<(Vector, Vector)> {
        let t = self.translated.minkowski(v)?;
        let rho = &self.base_point + v / t;
        let g = self.body.gradient(&rho)?;
        Ok((rho, g))
    }
}

/// `F(v_p) = L_p(v)`.
pub fn funk_norm(ctx: &FunkContext, v: &Vector) -> Result<f64> {
    ctx.translated.minkowski(v)
}

/// `∂F/∂y^i = ∂L/∂u^i(ρ) / (1 - p^k ∂L/∂u^k(ρ))`.
pub fn funk_gradient(ctx: &FunkContext, v: &Vector) -> Result<Vector> {
    let (_, g) = ctx.projection(v)?;
    let factor = 1.0 - ctx.base_point.dot(&g);
    Ok(g / factor)
}

/// Conformal factor `1 - p^k ∂L/∂u^k(ρ(v_p))` between `∂K_p` and `∂K`.
pub fn conformal_factor(ctx: &FunkContext, v: &Vector) -> Result<f64> {
    let (_, g) = ctx.projection(v)?;
    Ok(1.0 - ctx.base_point.dot(&g))
}

/// Route used to integrate over `∂K_p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AreaMethod {
    /// Pull back to `∂K` with the conformal density `(1 - p·∇L)^{-(n-1)/2}`.
    Projected,
    /// Integrate over the translated body's own indicatrix.
    #[default]
    Direct,
}

impl fmt::Display for AreaMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AreaMethod::Projected => "projected",
            AreaMethod::Direct => "direct",
        })
    }
}

impl FromStr for AreaMethod {
    type Err = FunkError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "projected" => Ok(AreaMethod::Projected),
            "direct" => Ok(AreaMethod::Direct),
            other => Err(FunkError::Config(format!("unknown area method `{other}`"))),
        }
    }
}

/// Per-node data on `∂K` that does not depend on the base point:
/// quadrature weight times volume density, and `∇L` at the node.
///
/// Evaluating the projected route at many base points (Newton iterations,
/// scans) reuses these.
#[derive(Debug, Clone)]
pub struct IndicatrixSamples {
    dim: usize,
    weights: Vec<f64>,
    gradients: Vec<Vector>,
}

impl IndicatrixSamples {
    pub fn new(body: &ConvexBody, rule: &SphereRule) -> Result<Self> {
        if rule.dimension() != body.dimension() {
            return Err(FunkError::DimensionMismatch {
                expected: body.dimension(),
                found: rule.dimension(),
            });
        }
        let rows = map_nodes(rule, |u| {
            let mut row = vec![volume_weight(body, u)?];
            row.extend(body.gradient(u)?.iter());
            Ok(row)
        })?;
        let weights = rows.iter().zip(rule.weights()).map(|(r, w)| w * r[0]).collect();
        let gradients = rows.iter().map(|r| Vector::from_column_slice(&r[1..])).collect();
        Ok(Self {
            dim: body.dimension(),
            weights,
            gradients,
        })
    }

    pub fn dimension(&self) -> usize {
        self.dim
    }

    /// Node weights and `∇F` on `∂K_p` transported from `∂K`.
    pub fn at(&self, p: &Vector) -> FunkNodes {
        let exponent = -0.5 * (self.dim as f64 - 1.0);
        let mut weights = Vec::with_capacity(self.weights.len());
        let mut gradients = Vec::with_capacity(self.weights.len());
        for (w, g) in self.weights.iter().zip(&self.gradients) {
            let factor = 1.0 - p.dot(g);
            weights.push(w * factor.powf(exponent));
            gradients.push(g / factor);
        }
        FunkNodes {
            dim: self.dim,
            weights,
            gradients,
        }
    }

    /// `r(p)` by the projected route.
    pub fn area(&self, p: &Vector) -> f64 {
        let exponent = -0.5 * (self.dim as f64 - 1.0);
        CompensatedSum::sum_iter(
            self.weights
                .iter()
                .zip(&self.gradients)
                .map(|(w, g)| w * (1.0 - p.dot(g)).powf(exponent)),
        )
    }
}

/// Quadrature nodes on `∂K_p`: weights of `μ_p` and `∇F` at each node.
#[derive(Debug, Clone)]
pub struct FunkNodes {
    dim: usize,
    weights: Vec<f64>,
    gradients: Vec<Vector>,
}

impl FunkNodes {
    /// Nodes for `ctx` by the requested route.
    pub fn build(ctx: &FunkContext, rule: &SphereRule, method: AreaMethod) -> Result<Self> {
        match method {
            AreaMethod::Projected => Ok(IndicatrixSamples::new(ctx.body(), rule)?.at(ctx.base_point())),
            AreaMethod::Direct => Self::direct(ctx, rule),
        }
    }

    fn direct(ctx: &FunkContext, rule: &SphereRule) -> Result<Self> {
        let translated = ctx.translated();
        if rule.dimension() != translated.dimension() {
            return Err(FunkError::DimensionMismatch {
                expected: translated.dimension(),
                found: rule.dimension(),
            });
        }
        let rows = map_nodes(rule, |u| {
            let mut row = vec![volume_weight(translated, u)?];
            row.extend(funk_gradient(ctx, u)?.iter());
            Ok(row)
        })?;
        Ok(Self {
            dim: ctx.dimension(),
            weights: rows.iter().zip(rule.weights()).map(|(r, w)| w * r[0]).collect(),
            gradients: rows.iter().map(|r| Vector::from_column_slice(&r[1..])).collect(),
        })
    }

    pub fn area(&self) -> f64 {
        CompensatedSum::sum_iter(self.weights.iter().copied())
    }

    /// `∫_{∂K_p} Π (∂F/∂y^k)^{α_k} μ_p`.
    pub fn moment(&self, alpha: &MultiIndex) -> f64 {
        CompensatedSum::sum_iter(
            self.weights
                .iter()
                .zip(&self.gradients)
                .map(|(w, g)| w * alpha.monomial(g)),
        )
    }

    /// `β_i = ∫_{∂K_p} ∂F/∂y^i μ_p`.
    pub fn first_moments(&self) -> Vector {
        Vector::from_fn(self.dim, |i, _| {
            CompensatedSum::sum_iter(self.weights.iter().zip(&self.gradients).map(|(w, g)| w * g[i]))
        })
    }

    /// `∫_{∂K_p} ∇F ⊗ ∇F μ_p`.
    pub fn second_moments(&self) -> Matrix {
        let n = self.dim;
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v = CompensatedSum::sum_iter(
                    self.weights.iter().zip(&self.gradients).map(|(w, g)| w * g[i] * g[j]),
                );
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        m
    }
}

/// `c_m = Π_{j<m} ((n-1) + 2j) / 2`.
pub fn cm_coefficient(n: usize, m: usize) -> f64 {
    (0..m).fold(1.0, |acc, j| acc * ((n as f64 - 1.0) + 2.0 * j as f64) / 2.0)
}

/// `r(p)` by either route.
pub fn area(ctx: &FunkContext, rule: &SphereRule, method: AreaMethod) -> Result<f64> {
    match method {
        AreaMethod::Projected => Ok(IndicatrixSamples::new(ctx.body(), rule)?.area(ctx.base_point())),
        AreaMethod::Direct => crate::quadrature::indicatrix_integral(ctx.translated(), |_| 1.0, rule),
    }
}

fn check_alpha(ctx: &FunkContext, alpha: &MultiIndex) -> Result<()> {
    if alpha.len() != ctx.dimension() {
        return Err(FunkError::DimensionMismatch {
            expected: ctx.dimension(),
            found: alpha.len(),
        });
    }
    Ok(())
}

/// `∂^α r(p)`, integrated over `∂K_p` (direct route).
pub fn area_derivative(ctx: &FunkContext, rule: &SphereRule, alpha: &MultiIndex) -> Result<f64> {
    area_derivative_with(ctx, rule, alpha, AreaMethod::Direct)
}

pub fn area_derivative_with(ctx: &FunkContext, rule: &SphereRule, alpha: &MultiIndex, method: AreaMethod) -> Result<f64> {
    check_alpha(ctx, alpha)?;
    if alpha.order() > MAX_DERIVATIVE_ORDER {
        return Err(FunkError::OrderCap {
            order: alpha.order(),
            cap: MAX_DERIVATIVE_ORDER,
        });
    }
    let nodes = FunkNodes::build(ctx, rule, method)?;
    Ok(cm_coefficient(ctx.dimension(), alpha.order()) * nodes.moment(alpha))
}

/// Many derivatives from one pass over the nodes (no order cap).
pub fn area_derivatives(ctx: &FunkContext, rule: &SphereRule, alphas: &[MultiIndex], method: AreaMethod) -> Result<Vec<f64>> {
    for alpha in alphas {
        check_alpha(ctx, alpha)?;
    }
    let nodes = FunkNodes::build(ctx, rule, method)?;
    let n = ctx.dimension();
    Ok(alphas
        .iter()
        .map(|a| cm_coefficient(n, a.order()) * nodes.moment(a))
        .collect())
}

/// `∂r/∂u^i = ((n-1)/2) ∫_{∂K_p} ∂F/∂y^i μ_p`.
pub fn area_gradient(ctx: &FunkContext, rule: &SphereRule) -> Result<Vector> {
    area_gradient_with(ctx, rule, AreaMethod::Direct)
}

pub fn area_gradient_with(ctx: &FunkContext, rule: &SphereRule, method: AreaMethod) -> Result<Vector> {
    let nodes = FunkNodes::build(ctx, rule, method)?;
    Ok(nodes.first_moments() * cm_coefficient(ctx.dimension(), 1))
}

/// `∂²r/∂u^i∂u^j = ((n²-1)/4) ∫_{∂K_p} ∂F/∂y^i ∂F/∂y^j μ_p`.
pub fn area_hessian(ctx: &FunkContext, rule: &SphereRule) -> Result<Matrix> {
    area_hessian_with(ctx, rule, AreaMethod::Direct)
}

pub fn area_hessian_with(ctx: &FunkContext, rule: &SphereRule, method: AreaMethod) -> Result<Matrix> {
    let nodes = FunkNodes::build(ctx, rule, method)?;
    Ok(nodes.second_moments() * cm_coefficient(ctx.dimension(), 2))
}

/// `∫_{∂K_p} ∇F ⊗ ∇F μ_p` from a metric-free node set (used by tests of
/// the Hessian/γ₃ proportionality).
pub fn gradient_outer_moment(ctx: &FunkContext, rule: &SphereRule) -> Result<Matrix> {
    Ok(FunkNodes::build(ctx, rule, AreaMethod::Direct)?.second_moments())
}

/// Ratios `g_ρ(w, w) / g_{v_p}(w, w)` over a basis of `T_ρ ∂K`.
///
/// All entries equal [`conformal_factor`] when the projection is conformal.
pub fn conformal_ratios(ctx: &FunkContext, v: &Vector) -> Result<Vec<f64>> {
    let (rho, g) = ctx.projection(v)?;
    let v_unit = &rho - ctx.base_point();
    let g_rho = crate::metric::metric_matrix(ctx.body(), &rho)?;
    let g_vp = crate::metric::metric_matrix(ctx.translated(), &v_unit)?;
    let n = ctx.dimension();
    let normal = &g / g.norm();
    let mut ratios = Vec::with_capacity(2 * n);
    let mut basis: Vec<Vector> = Vec::new();
    for i in 0..n {
        let mut e = Vector::zeros(n);
        e[i] = 1.0;
        let mut w = &e - &normal * normal.dot(&e);
        for b in &basis {
            w -= b * b.dot(&w);
        }
        if w.norm() > 1e-6 {
            basis.push(w.normalize());
        }
    }
    for (a, w) in basis.iter().enumerate() {
        ratios.push(w.dot(&(&g_rho * w)) / w.dot(&(&g_vp * w)));
        // mixed pairs probe the off-diagonal part as well
        if let Some(z) = basis.get(a + 1) {
            let s = w + z;
            ratios.push(s.dot(&(&g_rho * &s)) / s.dot(&(&g_vp * &s)));
        }
    }
    Ok(ratios)
}

pub(crate) fn outer_self(v: &Vector) -> Matrix {
    outer(v, v)
}
