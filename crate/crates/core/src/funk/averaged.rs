//! Averaged inner products and the associated Randers functionals.

use super::{outer_self, FunkContext};
use crate::error::Result;
use crate::metric::{cartan_trace, metric_tensor, volume_weight_from, CartanMode};
use crate::quadrature::{map_nodes, reduce_rows, SphereRule};
use crate::{Matrix, Vector};

/// `γ₁ = ∫ g μ_p`, `γ₂ = ∫ m μ_p`, `γ₃ = ∫ ∇F ⊗ ∇F μ_p`, the area and
/// `β = ∫ ∇F μ_p`, all over `∂K_p`.
#[derive(Debug, Clone)]
pub struct AveragedMetrics {
    pub gamma1: Matrix,
    pub gamma2: Matrix,
    pub gamma3: Matrix,
    pub area: f64,
    pub beta: Vector,
}

/// Which averaged metric the Randers functional is built on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AssociatedKind {
    F1,
    F3,
}

/// `F_k(v) = √(Γ_k(v, v)) + β(v) / area`, `Γ_k = γ_k / area`.
#[derive(Debug, Clone)]
pub struct AssociatedRanders {
    pub gamma: Matrix,
    pub beta: Vector,
}

impl AssociatedRanders {
    pub fn eval(&self, v: &Vector) -> f64 {
        v.dot(&(&self.gamma * v)).sqrt() + self.beta.dot(v)
    }
}

fn unpack(n: usize, flat: &[f64]) -> Matrix {
    Matrix::from_fn(n, n, |i, j| flat[i * n + j])
}

/// Integrates `g`, `m`, `∇F ⊗ ∇F`, `1` and `∇F` over the translated body's
/// indicatrix in one pass.
pub fn averaged_metrics(ctx: &FunkContext, rule: &SphereRule) -> Result<AveragedMetrics> {
    let body = ctx.translated();
    let n = body.dimension();
    let nn = n * n;
    let width = 3 * nn + 1 + n;
    let rows = map_nodes(rule, |u| {
        let sample = metric_tensor(body, u)?;
        let density = volume_weight_from(n, u, &sample)?;
        let grad_outer = outer_self(&sample.grad_l);
        let angular = &sample.g - &grad_outer;
        let mut row = Vec::with_capacity(width);
        for m in [&sample.g, &angular, &grad_outer] {
            for i in 0..n {
                for j in 0..n {
                    row.push(density * m[(i, j)]);
                }
            }
        }
        row.push(density);
        row.extend(sample.grad_l.iter().map(|x| density * x));
        Ok(row)
    })?;
    let rows: Vec<Vec<f64>> = rows
        .into_iter()
        .zip(rule.weights())
        .map(|(row, w)| row.into_iter().map(|x| x * w).collect())
        .collect();
    let sums = reduce_rows(&rows, width);
    Ok(AveragedMetrics {
        gamma1: unpack(n, &sums[0..nn]),
        gamma2: unpack(n, &sums[nn..2 * nn]),
        gamma3: unpack(n, &sums[2 * nn..3 * nn]),
        area: sums[3 * nn],
        beta: Vector::from_column_slice(&sums[3 * nn + 1..]),
    })
}

/// `F₁` or `F₃` at the context's base point.
pub fn associated_randers(ctx: &FunkContext, rule: &SphereRule, which: AssociatedKind) -> Result<AssociatedRanders> {
    let avg = averaged_metrics(ctx, rule)?;
    let gamma = match which {
        AssociatedKind::F1 => &avg.gamma1,
        AssociatedKind::F3 => &avg.gamma3,
    };
    Ok(AssociatedRanders {
        gamma: gamma / avg.area,
        beta: &avg.beta / avg.area,
    })
}

/// `∫_{∂K_p} F·C_i μ_p`, the left-hand side of the Cartan-trace identity
/// `v^i ∫ F C_i μ = (n-1) β(v)`.
pub fn averaged_cartan_trace(ctx: &FunkContext, rule: &SphereRule, mode: CartanMode) -> Result<Vector> {
    let body = ctx.translated();
    let n = body.dimension();
    let rows = map_nodes(rule, |u| {
        let sample = metric_tensor(body, u)?;
        let density = volume_weight_from(n, u, &sample)?;
        let trace = cartan_trace(body, u, mode)?;
        Ok(trace.covector.iter().map(|c| density * sample.l * c).collect())
    })?;
    let rows: Vec<Vec<f64>> = rows
        .into_iter()
        .zip(rule.weights())
        .map(|(row, w)| row.into_iter().map(|x| x * w).collect())
        .collect();
    Ok(Vector::from_vec(reduce_rows(&rows, n)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bodies::ConvexBody;
    use crate::quadrature::build_rule;
    use std::f64::consts::PI;

    #[test]
    fn ball_averages_at_origin() {
        let rule = build_rule(3, 24).unwrap();
        let ctx = FunkContext::new(&ConvexBody::ball(3).unwrap(), Vector::zeros(3)).unwrap();
        let avg = averaged_metrics(&ctx, &rule).unwrap();
        let id = Matrix::identity(3, 3);
        assert!((&avg.gamma1 - &id * (4.0 * PI)).amax() < 1e-12);
        assert!((&avg.gamma2 - &id * (8.0 * PI / 3.0)).amax() < 1e-12);
        assert!((&avg.gamma3 - &id * (4.0 * PI / 3.0)).amax() < 1e-12);
        assert!(avg.beta.amax() < 1e-14);

        let v = Vector::from_vec(vec![0.3, -1.2, 0.5]);
        let f1 = associated_randers(&ctx, &rule, AssociatedKind::F1).unwrap();
        let f3 = associated_randers(&ctx, &rule, AssociatedKind::F3).unwrap();
        assert!((f1.eval(&v) - v.norm()).abs() < 1e-13);
        assert!((f3.eval(&v) - v.norm() / 3f64.sqrt()).abs() < 1e-13);
    }
}
