//! Riemann–Finsler metric data derived from a Minkowski functional.
//!
//! With `E = L²/2`:
//!
//! * `g = Hess E = L·Hess L + ∇L ⊗ ∇L`,
//! * `m = g - ∇L ⊗ ∇L` (angular metric, kills the radial direction),
//! * `C_ijk = ½ ∂g_ij/∂y^k` and its trace `C_i = g^{jk} C_ijk`.

use serde::Serialize;

use crate::bodies::ConvexBody;
use crate::error::{FunkError, Result};
use crate::linalg::{log_det_spd, min_eigenvalue, outer, Tensor3};
use crate::{Matrix, Vector};

#[derive(Debug, Clone)]
pub struct MetricSample {
    pub direction: Vector,
    pub g: Matrix,
    pub grad_l: Vector,
    pub l: f64,
}

#[derive(Debug, Clone)]
pub struct AngularSample {
    pub m: Matrix,
}

/// How the Cartan tensor is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CartanMode {
    /// From analytic third derivatives of `L`.
    Analytic,
    /// Central differences of `g` with one Richardson step. Test oracle only.
    FiniteDifference,
}

#[derive(Debug, Clone)]
pub struct CartanTrace {
    pub covector: Vector,
    pub mode: CartanMode,
}

const FD_RELATIVE_STEP: f64 = 1e-4;

fn to_vec(v: &Vector) -> Vec<f64> {
    v.iter().copied().collect()
}

/// `g_ij(v)` without a definiteness check.
pub fn metric_matrix(body: &ConvexBody, v: &Vector) -> Result<Matrix> {
    let jet = body.jet(v)?;
    Ok(jet.hessian * jet.value + outer(&jet.gradient, &jet.gradient))
}

fn regularity_error(v: &Vector, g: &Matrix) -> FunkError {
    FunkError::Regularity {
        direction: to_vec(v),
        min_eigenvalue: min_eigenvalue(g),
    }
}

/// Metric tensor at `v`; fails when `g` is not positive definite.
pub fn metric_tensor(body: &ConvexBody, v: &Vector) -> Result<MetricSample> {
    let jet = body.jet(v)?;
    let g = &jet.hessian * jet.value + outer(&jet.gradient, &jet.gradient);
    if log_det_spd(&g).is_none() {
        return Err(regularity_error(v, &g));
    }
    Ok(MetricSample {
        direction: v.clone(),
        g,
        grad_l: jet.gradient,
        l: jet.value,
    })
}

pub fn angular_metric(body: &ConvexBody, v: &Vector) -> Result<AngularSample> {
    let sample = metric_tensor(body, v)?;
    let m = &sample.g - outer(&sample.grad_l, &sample.grad_l);
    Ok(AngularSample { m })
}

fn analytic_cartan(body: &ConvexBody, v: &Vector) -> Result<Tensor3> {
    let n = body.dimension();
    let third = body.third_derivative(v)?;
    let jet = body.jet(v)?;
    let (l, dl, h) = (jet.value, &jet.gradient, &jet.hessian);
    let mut c = Tensor3::zeros(n);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let dg = dl[k] * h[(i, j)] + l * third.get(i, j, k) + h[(i, k)] * dl[j] + dl[i] * h[(j, k)];
                c.set(i, j, k, 0.5 * dg);
            }
        }
    }
    Ok(c)
}

fn fd_cartan(body: &ConvexBody, v: &Vector) -> Result<Tensor3> {
    let n = body.dimension();
    let step = FD_RELATIVE_STEP * v.norm();
    let central = |k: usize, h: f64| -> Result<Matrix> {
        let mut plus = v.clone();
        let mut minus = v.clone();
        plus[k] += h;
        minus[k] -= h;
        Ok((metric_matrix(body, &plus)? - metric_matrix(body, &minus)?) / (2.0 * h))
    };
    let mut c = Tensor3::zeros(n);
    for k in 0..n {
        let coarse = central(k, step)?;
        let fine = central(k, 0.5 * step)?;
        let dg = (fine * 4.0 - coarse) / 3.0;
        for i in 0..n {
            for j in 0..n {
                c.set(i, j, k, 0.5 * dg[(i, j)]);
            }
        }
    }
    Ok(c)
}

/// Lowered Cartan tensor `C_ijk`, checked against `y^k C_ijk = 0`.
pub fn cartan_tensor(body: &ConvexBody, v: &Vector, mode: CartanMode) -> Result<Tensor3> {
    let (c, tol) = match mode {
        CartanMode::Analytic => (analytic_cartan(body, v)?, 1e-8),
        CartanMode::FiniteDifference => (fd_cartan(body, v)?, 1e-4),
    };
    // y^k C_ijk is zero-homogeneous; compare against the tensor's own scale.
    let residual = c.contract_last(v).amax();
    let scale = 1.0 + v.norm() * c.max_abs();
    if residual > tol * scale {
        return Err(FunkError::CartanConsistency {
            direction: to_vec(v),
            residual,
        });
    }
    Ok(c)
}

/// Cartan trace `C_i = g^{jk} C_ijk`.
pub fn cartan_trace(body: &ConvexBody, v: &Vector, mode: CartanMode) -> Result<CartanTrace> {
    let sample = metric_tensor(body, v)?;
    let g_inv = sample
        .g
        .clone()
        .cholesky()
        .ok_or_else(|| regularity_error(v, &sample.g))?
        .inverse();
    let c = cartan_tensor(body, v, mode)?;
    let n = body.dimension();
    let covector = Vector::from_fn(n, |i, _| {
        let mut acc = 0.0;
        for j in 0..n {
            for k in 0..n {
                acc += g_inv[(j, k)] * c.get(i, j, k);
            }
        }
        acc
    });
    Ok(CartanTrace { covector, mode })
}

/// Density `φⁿ √det g` with `φ(u) = |u| / L(u)`, converting the Euclidean
/// sphere measure into the indicatrix measure `μ`.
pub fn volume_weight(body: &ConvexBody, u: &Vector) -> Result<f64> {
    let sample = metric_tensor(body, u)?;
    volume_weight_from(body.dimension(), u, &sample)
}

pub(crate) fn volume_weight_from(n: usize, u: &Vector, sample: &MetricSample) -> Result<f64> {
    let log_det = log_det_spd(&sample.g).ok_or_else(|| regularity_error(u, &sample.g))?;
    let log_phi = u.norm().ln() - sample.l.ln();
    Ok((n as f64 * log_phi + 0.5 * log_det).exp())
}
