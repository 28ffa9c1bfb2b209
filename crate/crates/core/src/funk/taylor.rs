//! Truncated Taylor models of the area function around an interior center.

use serde::Serialize;

use super::{area_derivatives, AreaMethod, FunkContext, MultiIndex};
use crate::bodies::ConvexBody;
use crate::error::{FunkError, Result};
use crate::quadrature::{CompensatedSum, SphereRule};
use crate::Vector;

/// Safety gap for the validity guard: the shifted argument `q` must satisfy
/// `L_c(q) ≤ 1 - δ` and `L_c(-q) ≤ 1 - δ`.
pub const TAYLOR_DELTA: f64 = 1e-3;

/// Largest order accepted by [`taylor_build`].
pub const MAX_TAYLOR_ORDER: usize = 24;

#[derive(Debug, Clone, Serialize)]
pub struct TaylorCoefficient {
    pub alpha: MultiIndex,
    /// `∂^α r(center) / α!`
    pub value: f64,
}

/// `r(p) ≈ Σ_{|α| ≤ M} (∂^α r(c) / α!) (p - c)^α`.
#[derive(Debug, Clone)]
pub struct TaylorModel {
    center: Vector,
    order: usize,
    coefficients: Vec<TaylorCoefficient>,
    /// The body seen from the center, for the validity guard.
    local: ConvexBody,
    delta: f64,
}

/// Coefficients `(1/α!) ∂^α r(center)` for all `|α| ≤ order`, in graded
/// lexicographic order.
pub fn taylor_build(body: &ConvexBody, center: &Vector, order: usize, rule: &SphereRule) -> Result<TaylorModel> {
    if order > MAX_TAYLOR_ORDER {
        return Err(FunkError::OrderCap {
            order,
            cap: MAX_TAYLOR_ORDER,
        });
    }
    let ctx = FunkContext::new(body, center.clone())?;
    let alphas = MultiIndex::graded_lex(body.dimension(), order);
    let derivatives = area_derivatives(&ctx, rule, &alphas, AreaMethod::Direct)?;
    let coefficients = alphas
        .into_iter()
        .zip(derivatives)
        .map(|(alpha, d)| {
            let value = d / alpha.factorial() as f64;
            TaylorCoefficient { alpha, value }
        })
        .collect();
    Ok(TaylorModel {
        center: center.clone(),
        order,
        local: ctx.translated().clone(),
        coefficients,
        delta: TAYLOR_DELTA,
    })
}

impl TaylorModel {
    pub fn center(&self) -> &Vector {
        &self.center
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coefficients(&self) -> &[TaylorCoefficient] {
        &self.coefficients
    }

    pub fn coefficient(&self, alpha: &MultiIndex) -> Option<f64> {
        self.coefficients.iter().find(|c| &c.alpha == alpha).map(|c| c.value)
    }

    /// Checks the validity region; returns the shifted argument `q = p - c`.
    pub fn check_domain(&self, p: &Vector) -> Result<Vector> {
        let q = p - &self.center;
        let forward = self.local.gauge(&q)?;
        let backward = self.local.gauge(&-&q)?;
        let limit = 1.0 - self.delta;
        if forward > limit || backward > limit {
            return Err(FunkError::OutsideTaylorDomain {
                point: p.iter().copied().collect(),
                forward,
                backward,
                limit,
            });
        }
        Ok(q)
    }

    /// Full truncated series at `p`.
    pub fn eval(&self, p: &Vector) -> Result<f64> {
        self.eval_truncated(p, self.order)
    }

    /// Series using only terms with `|α| ≤ order`.
    pub fn eval_truncated(&self, p: &Vector, order: usize) -> Result<f64> {
        let q = self.check_domain(p)?;
        Ok(CompensatedSum::sum_iter(
            self.coefficients
                .iter()
                .filter(|c| c.alpha.order() <= order)
                .map(|c| c.value * c.alpha.monomial(&q)),
        ))
    }
}

/// `taylor_eval` as a free function.
pub fn taylor_eval(model: &TaylorModel, p: &Vector) -> Result<f64> {
    model.eval(p)
}
