//! Balancing points: the unique interior minimizer of the area function.
//!
//! `r` is strictly convex and diverges at the boundary, so damped Newton
//! with a decrease-enforcing backtracking line search started at the origin
//! converges to the minimizer. Gradient and Hessian are the exact moment
//! formulas evaluated on the projected route, whose per-node data is built
//! once per body and reused across iterations.

mod expr;
mod field;

use serde::Serialize;

pub use expr::Affine;
pub use field::{balanced_field, BalancedField, FieldOptions, FieldPoint, FieldSpec, GridAxis};

use crate::bodies::ConvexBody;
use crate::error::{FunkError, Result};
use crate::funk::{cm_coefficient, AreaMethod, FunkContext, FunkNodes, IndicatrixSamples};
use crate::linalg::{solve_spd, symmetric_eigenvalues};
use crate::quadrature::SphereRule;
use crate::{Matrix, Vector, DEFAULT_MARGIN};

#[derive(Debug, Clone, Copy)]
pub struct BalanceOptions {
    /// Stop once `‖∇r‖ ≤ tol`.
    pub tol: f64,
    pub max_iter: usize,
    /// Iterates must satisfy `L(p) ≤ 1 - margin`.
    pub margin: f64,
}

impl Default for BalanceOptions {
    fn default() -> Self {
        Self {
            tol: 1e-9,
            max_iter: 100,
            margin: DEFAULT_MARGIN,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StepKind {
    Newton,
    /// Hessian solve failed; steepest descent instead.
    Gradient,
}

/// One accepted iterate.
#[derive(Debug, Clone, Serialize)]
pub struct BalanceStep {
    pub iteration: usize,
    pub point: Vec<f64>,
    pub area: f64,
    pub grad_norm: f64,
    pub step_scale: f64,
    pub kind: StepKind,
}

#[derive(Debug, Clone)]
pub struct BalanceResult {
    pub point: Vector,
    pub iterations: usize,
    pub grad_norm: f64,
    /// `‖β‖` at `point`, recomputed on the direct route.
    pub beta_norm: f64,
    pub area: f64,
    /// Ascending eigenvalues of `Hess r` at `point`.
    pub hessian_eigenvalues: Vec<f64>,
    pub hessian_min_eigenvalue: f64,
    pub converged: bool,
    pub trace: Vec<BalanceStep>,
}

impl BalanceResult {
    /// Turn a non-converged run into [`FunkError::NotConverged`].
    pub fn require_converged(self) -> Result<Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(FunkError::NotConverged {
                iterations: self.iterations,
                grad_norm: self.grad_norm,
            })
        }
    }
}

fn derivatives_at(samples: &IndicatrixSamples, p: &Vector) -> (f64, Vector, Matrix) {
    let n = samples.dimension();
    let nodes = samples.at(p);
    (
        nodes.area(),
        nodes.first_moments() * cm_coefficient(n, 1),
        nodes.second_moments() * cm_coefficient(n, 2),
    )
}

/// Minimize `r` starting from the origin of the body's frame.
pub fn balancing_point(body: &ConvexBody, rule: &SphereRule, opts: &BalanceOptions) -> Result<BalanceResult> {
    balancing_point_from(body, rule, &Vector::zeros(body.dimension()), opts)
}

/// Minimize `r` from an explicit interior start (warm start).
pub fn balancing_point_from(body: &ConvexBody, rule: &SphereRule, start: &Vector, opts: &BalanceOptions) -> Result<BalanceResult> {
    if !(opts.tol > 0.0) {
        return Err(FunkError::InvalidParameter(format!("tolerance must be positive (got {})", opts.tol)));
    }
    // Rejects degenerate bodies and non-interior starts up front.
    FunkContext::with_margin(body, start.clone(), opts.margin)?;
    let samples = IndicatrixSamples::new(body, rule)?;
    let limit = 1.0 - opts.margin;

    let mut p = start.clone();
    let (mut r, mut grad, mut hess) = derivatives_at(&samples, &p);
    let mut trace = vec![BalanceStep {
        iteration: 0,
        point: p.iter().copied().collect(),
        area: r,
        grad_norm: grad.norm(),
        step_scale: 0.0,
        kind: StepKind::Newton,
    }];
    let mut iterations = 0;
    let mut converged = grad.norm() <= opts.tol;

    while !converged && iterations < opts.max_iter {
        let (direction, kind) = match solve_spd(&hess, &-&grad) {
            Some(d) if d.iter().all(|x| x.is_finite()) => (d, StepKind::Newton),
            _ => (-&grad, StepKind::Gradient),
        };
        let g_norm = grad.norm();
        let mut scale = 1.0;
        let mut accepted = None;
        for _ in 0..60 {
            let candidate = &p + &direction * scale;
            if body.gauge(&candidate)? <= limit {
                let (rc, gc, hc) = derivatives_at(&samples, &candidate);
                let decreased = rc < r;
                // Near the optimum r changes below its rounding level; accept
                // steps that still reduce the gradient there.
                let flat = (rc - r).abs() <= 8.0 * f64::EPSILON * r.abs() && gc.norm() < g_norm;
                if decreased || flat {
                    accepted = Some((candidate, rc, gc, hc));
                    break;
                }
            }
            scale *= 0.5;
        }
        let Some((candidate, rc, gc, hc)) = accepted else {
            break;
        };
        iterations += 1;
        p = candidate;
        r = rc;
        grad = gc;
        hess = hc;
        trace.push(BalanceStep {
            iteration: iterations,
            point: p.iter().copied().collect(),
            area: r,
            grad_norm: grad.norm(),
            step_scale: scale,
            kind,
        });
        converged = grad.norm() <= opts.tol;
    }

    let eigenvalues = symmetric_eigenvalues(&hess);
    let beta_norm = balance_residual_with_margin(body, &p, rule, opts.margin)?;
    Ok(BalanceResult {
        grad_norm: grad.norm(),
        point: p,
        iterations,
        beta_norm,
        area: r,
        hessian_min_eigenvalue: eigenvalues[0],
        hessian_eigenvalues: eigenvalues,
        converged,
        trace,
    })
}

/// Center `-β♯ / (1 - ‖β♯‖²)` of a Randers indicatrix, `β♯ = A⁻¹ b`,
/// `‖β♯‖² = bᵀ A⁻¹ b`.
pub fn randers_center(a: &Matrix, b: &Vector) -> Result<Vector> {
    let sharp = solve_spd(a, b)
        .ok_or_else(|| FunkError::InvalidParameter("Randers matrix must be positive definite".into()))?;
    let norm2 = b.dot(&sharp);
    if !(norm2 < 1.0) {
        return Err(FunkError::InvalidParameter(format!(
            "‖β♯‖² = {norm2} must be < 1"
        )));
    }
    Ok(-sharp / (1.0 - norm2))
}

/// `‖β_p‖` with `β_p = ∫_{∂K_p} ∇F μ_p` (direct route).
pub fn balance_residual(body: &ConvexBody, p: &Vector, rule: &SphereRule) -> Result<f64> {
    balance_residual_with_margin(body, p, rule, DEFAULT_MARGIN)
}

fn balance_residual_with_margin(body: &ConvexBody, p: &Vector, rule: &SphereRule, margin: f64) -> Result<f64> {
    let ctx = FunkContext::with_margin(body, p.clone(), margin)?;
    Ok(beta(&ctx, rule)?.norm())
}

/// The averaged one-form `β` at the context's base point.
pub fn beta(ctx: &FunkContext, rule: &SphereRule) -> Result<Vector> {
    Ok(FunkNodes::build(ctx, rule, AreaMethod::Direct)?.first_moments())
}
