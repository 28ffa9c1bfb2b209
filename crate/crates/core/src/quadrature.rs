//! Quadrature on the Euclidean unit sphere and indicatrix integrals.
//!
//! For a zero-homogeneous `f`, the integral over the indicatrix `∂K` with its
//! induced Finsler volume `μ` transfers to the unit sphere:
//!
//! ```text
//!   ∫_{∂K} f μ = ∫_{S^{n-1}} φⁿ √det g · f dσ,    φ(u) = |u| / L(u),
//!   ∫_K f dμ  = (1/n) ∫_{∂K} f μ.
//! ```
//!
//! Node values are computed in parallel, then reduced in node order with a
//! compensated sum so results do not depend on the thread count.

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::bodies::ConvexBody;
use crate::error::{FunkError, Result};
use crate::metric::volume_weight;
use crate::Vector;

/// Default resolutions for deterministic rules.
pub const DEFAULT_RESOLUTION_2D: usize = 256;
pub const DEFAULT_RESOLUTION_3D: usize = 64;
/// Seed used when `build_rule` falls back to Monte Carlo (n = 4).
pub const DEFAULT_MC_SEED: u64 = 0x5eed_f00d;

pub fn default_resolution(n: usize) -> usize {
    if n == 2 {
        DEFAULT_RESOLUTION_2D
    } else {
        DEFAULT_RESOLUTION_3D
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum RuleKind {
    /// Equispaced angles on the circle.
    Trapezoid { points: usize },
    /// Gauss–Legendre in `cos θ` times trapezoid in the azimuth.
    GaussProduct { polar: usize, azimuthal: usize },
    /// Normalized Gaussian samples with equal weights.
    MonteCarlo { samples: usize, seed: u64 },
}

/// Nodes and weights on `S^{n-1}`.
#[derive(Debug, Clone)]
pub struct SphereRule {
    dim: usize,
    nodes: Vec<Vector>,
    weights: Vec<f64>,
    kind: RuleKind,
    degree: Option<usize>,
}

impl SphereRule {
    pub fn dimension(&self) -> usize {
        self.dim
    }

    pub fn nodes(&self) -> &[Vector] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn kind(&self) -> &RuleKind {
        &self.kind
    }

    /// Highest total degree of polynomials integrated exactly (`None` for
    /// Monte Carlo rules).
    pub fn degree(&self) -> Option<usize> {
        self.degree
    }

    pub fn is_monte_carlo(&self) -> bool {
        matches!(self.kind, RuleKind::MonteCarlo { .. })
    }

    /// The same nodes in a different order (used to test order independence).
    pub fn permuted(&self, order: &[usize]) -> Self {
        assert_eq!(order.len(), self.len());
        Self {
            dim: self.dim,
            nodes: order.iter().map(|&i| self.nodes[i].clone()).collect(),
            weights: order.iter().map(|&i| self.weights[i]).collect(),
            kind: self.kind.clone(),
            degree: self.degree,
        }
    }
}

/// Euclidean area `ω_{n-1}` of the unit sphere in `Rⁿ`.
pub fn sphere_area(n: usize) -> f64 {
    match n {
        1 => 2.0,
        2 => 2.0 * PI,
        _ => sphere_area(n - 2) * 2.0 * PI / (n as f64 - 2.0),
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`, ascending.
pub fn gauss_legendre(count: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; count];
    let mut w = vec![0.0; count];
    let nf = count as f64;
    for i in 0..count.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p1, mut p2) = (1.0, 0.0);
            for j in 1..=count {
                let p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j as f64 - 1.0) * z * p2 - (j as f64 - 1.0) * p3) / j as f64;
            }
            dp = nf * (z * p1 - p2) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() <= 1e-16 {
                break;
            }
        }
        let weight = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[count - 1 - i] = z;
        w[i] = weight;
        w[count - 1 - i] = weight;
    }
    (x, w)
}

/// Deterministic rule for `n ∈ {2, 3}`; `n = 4` falls back to a seeded Monte
/// Carlo rule with `resolution³` samples.
pub fn build_rule(n: usize, resolution: usize) -> Result<SphereRule> {
    if resolution < 8 {
        return Err(FunkError::InvalidParameter(format!(
            "rule resolution must be at least 8 (got {resolution})"
        )));
    }
    match n {
        2 => {
            let h = 2.0 * PI / resolution as f64;
            let nodes = (0..resolution)
                .map(|k| {
                    let (s, c) = (h * k as f64).sin_cos();
                    Vector::from_vec(vec![c, s])
                })
                .collect();
            Ok(SphereRule {
                dim: 2,
                nodes,
                weights: vec![h; resolution],
                kind: RuleKind::Trapezoid { points: resolution },
                degree: Some(resolution - 1),
            })
        }
        3 => {
            let (xs, ws) = gauss_legendre(resolution);
            let azimuthal = 2 * resolution;
            let h = 2.0 * PI / azimuthal as f64;
            let mut nodes = Vec::with_capacity(resolution * azimuthal);
            let mut weights = Vec::with_capacity(resolution * azimuthal);
            for (x, w) in xs.iter().zip(&ws) {
                let sin_theta = (1.0 - x * x).sqrt();
                for j in 0..azimuthal {
                    let (s, c) = (h * j as f64).sin_cos();
                    nodes.push(Vector::from_vec(vec![sin_theta * c, sin_theta * s, *x]));
                    weights.push(w * h);
                }
            }
            Ok(SphereRule {
                dim: 3,
                nodes,
                weights,
                kind: RuleKind::GaussProduct {
                    polar: resolution,
                    azimuthal,
                },
                degree: Some(2 * resolution - 1),
            })
        }
        4 => monte_carlo_rule(4, resolution.pow(3), DEFAULT_MC_SEED),
        _ => Err(FunkError::UnsupportedDimension(n)),
    }
}

/// Equal-weight rule from normalized standard Gaussian samples
/// (`ChaCha8Rng::seed_from_u64(seed)`).
pub fn monte_carlo_rule(n: usize, samples: usize, seed: u64) -> Result<SphereRule> {
    if !(2..=4).contains(&n) {
        return Err(FunkError::UnsupportedDimension(n));
    }
    if samples == 0 {
        return Err(FunkError::InvalidParameter("Monte Carlo rule needs samples".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut nodes = Vec::with_capacity(samples);
    while nodes.len() < samples {
        let v = Vector::from_fn(n, |_, _| StandardNormal.sample(&mut rng));
        let norm = v.norm();
        if norm > 1e-12 {
            nodes.push(v / norm);
        }
    }
    Ok(SphereRule {
        dim: n,
        nodes,
        weights: vec![sphere_area(n) / samples as f64; samples],
        kind: RuleKind::MonteCarlo { samples, seed },
        degree: None,
    })
}

/// Neumaier's variant of Kahan summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.compensation += (self.sum - t) + value;
        } else {
            self.compensation += (value - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }

    pub fn sum_iter<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
        let mut acc = Self::new();
        for x in iter {
            acc.add(x);
        }
        acc.value()
    }
}

/// Integral with an optional Monte Carlo standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntegralEstimate {
    pub value: f64,
    pub standard_error: Option<f64>,
}

/// Reduce per-node rows (already multiplied by their weights) component-wise
/// in node order.
pub(crate) fn reduce_rows(rows: &[Vec<f64>], width: usize) -> Vec<f64> {
    (0..width)
        .map(|c| CompensatedSum::sum_iter(rows.iter().map(|r| r[c])))
        .collect()
}

/// Evaluate `f` at every node in parallel; rows come back in node order.
pub(crate) fn map_nodes<F>(rule: &SphereRule, f: F) -> Result<Vec<Vec<f64>>>
where
    F: Fn(&Vector) -> Result<Vec<f64>> + Sync,
{
    rule.nodes.par_iter().map(&f).collect()
}

/// `∫_{S^{n-1}} f dσ` with the rule itself (no body).
pub fn sphere_integral<F>(rule: &SphereRule, f: F) -> f64
where
    F: Fn(&Vector) -> f64 + Sync,
{
    let values: Vec<f64> = rule
        .nodes
        .par_iter()
        .zip(rule.weights.par_iter())
        .map(|(u, w)| w * f(u))
        .collect();
    CompensatedSum::sum_iter(values)
}

/// `∫_{∂K} f μ` for a vector of zero-homogeneous integrands at once.
/// `f(u, out)` fills `out` (length `width`) at the unit node `u`.
pub fn indicatrix_integral_many<F>(body: &ConvexBody, rule: &SphereRule, width: usize, f: F) -> Result<Vec<f64>>
where
    F: Fn(&Vector, &mut [f64]) -> Result<()> + Sync,
{
    check_rule(body, rule)?;
    let rows = map_nodes(rule, |u| {
        let mut out = vec![0.0; width];
        f(u, &mut out)?;
        Ok(out)
    })?;
    let weighted: Result<Vec<Vec<f64>>> = rows
        .into_iter()
        .zip(rule.nodes.iter().zip(&rule.weights))
        .map(|(mut row, (u, w))| {
            let density = w * volume_weight(body, u)?;
            row.iter_mut().for_each(|x| *x *= density);
            Ok(row)
        })
        .collect();
    Ok(reduce_rows(&weighted?, width))
}

fn check_rule(body: &ConvexBody, rule: &SphereRule) -> Result<()> {
    if rule.dimension() != body.dimension() {
        return Err(FunkError::DimensionMismatch {
            expected: body.dimension(),
            found: rule.dimension(),
        });
    }
    Ok(())
}

/// `∫_{∂K} f μ` via the sphere transfer.
pub fn indicatrix_integral<F>(body: &ConvexBody, f: F, rule: &SphereRule) -> Result<f64>
where
    F: Fn(&Vector) -> f64 + Sync,
{
    Ok(indicatrix_estimate(body, f, rule)?.value)
}

/// Like [`indicatrix_integral`], with a standard error for Monte Carlo rules.
pub fn indicatrix_estimate<F>(body: &ConvexBody, f: F, rule: &SphereRule) -> Result<IntegralEstimate>
where
    F: Fn(&Vector) -> f64 + Sync,
{
    check_rule(body, rule)?;
    let rows = map_nodes(rule, |u| Ok(vec![volume_weight(body, u)? * f(u)]))?;
    let terms: Vec<f64> = rows.iter().zip(&rule.weights).map(|(r, w)| r[0] * w).collect();
    let value = CompensatedSum::sum_iter(terms.iter().copied());
    let standard_error = if rule.is_monte_carlo() {
        let n = terms.len() as f64;
        let area = sphere_area(rule.dim);
        let mean = value / area;
        let var = CompensatedSum::sum_iter(rows.iter().map(|r| (r[0] - mean).powi(2))) / (n - 1.0).max(1.0);
        Some(area * (var / n).sqrt())
    } else {
        None
    };
    Ok(IntegralEstimate { value, standard_error })
}

/// `∫_K f dμ = (1/n) ∫_{∂K} f μ`.
pub fn body_integral<F>(body: &ConvexBody, f: F, rule: &SphereRule) -> Result<f64>
where
    F: Fn(&Vector) -> f64 + Sync,
{
    Ok(indicatrix_integral(body, f, rule)? / body.dimension() as f64)
}
