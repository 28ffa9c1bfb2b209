//! Independent oracles: closed forms, 1-D quadrature, Monte Carlo body
//! integrals and finite differences.
//!
//! None of these use the sphere rules of [`crate::quadrature`].
//!
//! Monte Carlo contract: the sample set is split into [`MC_SHARDS`] shards.
//! Shard `k` draws from `ChaCha8Rng::seed_from_u64(seed)` on stream `k`, and
//! shard sums are combined in shard order, so a given seed gives the same
//! estimate on every platform and thread count.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::bodies::ConvexBody;
use crate::error::{FunkError, Result};
use crate::linalg::log_det_spd;
use crate::metric::metric_matrix;
use crate::quadrature::CompensatedSum;
use crate::{Matrix, Vector};

pub const MC_SHARDS: u64 = 64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleConfig {
    pub seed: u64,
    pub sample_count: usize,
    pub fd_step: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            seed: 0x0bad_5eed,
            sample_count: 1_000_000,
            fd_step: 1e-3,
        }
    }
}

impl OracleConfig {
    pub fn new(seed: u64, sample_count: usize, fd_step: f64) -> Result<Self> {
        let cfg = Self {
            seed,
            sample_count,
            fd_step,
        };
        cfg.check()?;
        Ok(cfg)
    }

    fn check(&self) -> Result<()> {
        if self.sample_count < 10_000 {
            return Err(FunkError::InvalidParameter(format!(
                "sample_count must be at least 10^4 (got {})",
                self.sample_count
            )));
        }
        if !(self.fd_step > 0.0 && self.fd_step <= 1e-2) {
            return Err(FunkError::InvalidParameter(format!(
                "fd_step must lie in (0, 1e-2] (got {})",
                self.fd_step
            )));
        }
        Ok(())
    }
}

/// `r(s·e)` for the unit ball in dimension 2 or 3.
///
/// n = 3: `(2π/s) ln((1+s)/(1-s))`. n = 2: `∫₀^{2π} (1 - s sin t)^{-1/2} dt`
/// by the periodic midpoint rule, doubling until successive values agree to
/// 1e-12 relative.
pub fn ball_funk_area_closed(n: usize, s: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&s) {
        return Err(FunkError::InvalidParameter(format!("need 0 ≤ s < 1 (got {s})")));
    }
    match n {
        3 => {
            if s < 1e-4 {
                // 4π (1 + s²/3 + s⁴/5 + s⁶/7)
                let s2 = s * s;
                Ok(4.0 * PI * (1.0 + s2 / 3.0 + s2 * s2 / 5.0 + s2 * s2 * s2 / 7.0))
            } else {
                // ln((1+s)/(1-s)) = 2 atanh(s)
                Ok(2.0 * PI / s * 2.0 * s.atanh())
            }
        }
        2 => {
            let f = |t: f64| (1.0 - s * t.sin()).powf(-0.5);
            let midpoint = |count: usize| {
                let h = 2.0 * PI / count as f64;
                h * CompensatedSum::sum_iter((0..count).map(|k| f((k as f64 + 0.5) * h)))
            };
            let mut count = 64;
            let mut prev = midpoint(count);
            while count < 1 << 24 {
                count *= 2;
                let next = midpoint(count);
                if (next - prev).abs() <= 1e-12 * next.abs() {
                    return Ok(next);
                }
                prev = next;
            }
            Err(FunkError::NotConverged {
                iterations: count,
                grad_norm: f64::NAN,
            })
        }
        other => Err(FunkError::UnsupportedDimension(other)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub estimate: f64,
    pub standard_error: f64,
    pub acceptance: f64,
}

/// Axis-aligned box containing `K`, from boundary points along random
/// directions, padded by 5% of the largest half-width.
fn bounding_box(body: &ConvexBody, seed: u64) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = body.dimension();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let mut lo = vec![0.0f64; n];
    let mut hi = vec![0.0f64; n];
    let mut push = |u: &Vector| -> Result<()> {
        let x = u / body.minkowski(u)?;
        for i in 0..n {
            lo[i] = lo[i].min(x[i]);
            hi[i] = hi[i].max(x[i]);
        }
        Ok(())
    };
    for i in 0..n {
        for sign in [1.0, -1.0] {
            let mut e = Vector::zeros(n);
            e[i] = sign;
            push(&e)?;
        }
    }
    for _ in 0..4096 {
        let u = Vector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal));
        if u.norm() > 1e-12 {
            push(&u)?;
        }
    }
    let pad = 0.05 * lo.iter().chain(&hi).fold(0.0f64, |m, x| m.max(x.abs()));
    Ok((lo.iter().map(|x| x - pad).collect(), hi.iter().map(|x| x + pad).collect()))
}

/// `∫_K f √det g dx` by rejection sampling in a bounding box.
pub fn montecarlo_body_integral<F>(body: &ConvexBody, f: F, cfg: &OracleConfig) -> Result<McEstimate>
where
    F: Fn(&Vector) -> f64 + Sync,
{
    cfg.check()?;
    let n = body.dimension();
    let (lo, hi) = bounding_box(body, cfg.seed)?;
    let volume: f64 = lo.iter().zip(&hi).map(|(a, b)| b - a).product();
    let total = cfg.sample_count as u64;

    let shards: Vec<(f64, f64, u64)> = (0..MC_SHARDS)
        .into_par_iter()
        .map(|k| -> Result<(f64, f64, u64)> {
            let count = total / MC_SHARDS + u64::from(k < total % MC_SHARDS);
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(k);
            let mut sum = CompensatedSum::new();
            let mut sum_sq = CompensatedSum::new();
            let mut accepted = 0u64;
            let mut x = Vector::zeros(n);
            for _ in 0..count {
                for i in 0..n {
                    x[i] = lo[i] + (hi[i] - lo[i]) * rng.random::<f64>();
                }
                if x.iter().all(|&c| c == 0.0) || body.minkowski(&x)? > 1.0 {
                    continue;
                }
                accepted += 1;
                let g: Matrix = metric_matrix(body, &x)?;
                let log_det = log_det_spd(&g).ok_or_else(|| FunkError::Regularity {
                    direction: x.iter().copied().collect(),
                    min_eigenvalue: crate::linalg::min_eigenvalue(&g),
                })?;
                let y = f(&x) * (0.5 * log_det).exp();
                sum.add(y);
                sum_sq.add(y * y);
            }
            Ok((sum.value(), sum_sq.value(), accepted))
        })
        .collect::<Result<_>>()?;

    let sum = CompensatedSum::sum_iter(shards.iter().map(|s| s.0));
    let sum_sq = CompensatedSum::sum_iter(shards.iter().map(|s| s.1));
    let accepted: u64 = shards.iter().map(|s| s.2).sum();
    let acceptance = accepted as f64 / total as f64;
    if acceptance < 1e-3 {
        return Err(FunkError::BoundingBox(acceptance));
    }
    let m = total as f64;
    let mean = sum / m;
    let var = (sum_sq / m - mean * mean).max(0.0) * m / (m - 1.0);
    Ok(McEstimate {
        estimate: volume * mean,
        standard_error: volume * (var / m).sqrt(),
        acceptance,
    })
}

/// A finite-difference value with an error indicator: the difference
/// between the Richardson-extrapolated and the coarse estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct FdEstimate<T> {
    pub value: T,
    pub error: f64,
}

fn step_for(x: f64, cfg: &OracleConfig) -> Result<f64> {
    let h = cfg.fd_step * x.abs().max(1.0);
    if x + 0.5 * h == x || x - 0.5 * h == x {
        return Err(FunkError::StepUnderflow(h));
    }
    Ok(h)
}

fn central(f: &dyn Fn(f64) -> Result<f64>, x: f64, h: f64, order: u8) -> Result<f64> {
    match order {
        1 => Ok((f(x + h)? - f(x - h)?) / (2.0 * h)),
        _ => Ok((f(x + h)? - 2.0 * f(x)? + f(x - h)?) / (h * h)),
    }
}

/// First or second derivative of a scalar function of one variable.
pub fn fd_scalar<F>(f: F, x: f64, order: u8, cfg: &OracleConfig) -> Result<FdEstimate<f64>>
where
    F: Fn(f64) -> Result<f64>,
{
    if !(order == 1 || order == 2) {
        return Err(FunkError::InvalidParameter(format!("derivative order must be 1 or 2 (got {order})")));
    }
    cfg.check()?;
    let h = step_for(x, cfg)?;
    let coarse = central(&f, x, h, order)?;
    let fine = central(&f, x, 0.5 * h, order)?;
    let value = (4.0 * fine - coarse) / 3.0;
    Ok(FdEstimate {
        value,
        error: (value - coarse).abs(),
    })
}

/// Derivative of `f` at `p` along coordinate `i`.
fn partial<F>(f: &F, p: &Vector, i: usize, cfg: &OracleConfig) -> Result<FdEstimate<Vector>>
where
    F: Fn(&Vector) -> Result<Vector>,
{
    let h = step_for(p[i], cfg)?;
    let at = |t: f64| {
        let mut q = p.clone();
        q[i] += t;
        f(&q)
    };
    let diff = |h: f64| -> Result<Vector> { Ok((at(h)? - at(-h)?) / (2.0 * h)) };
    let coarse = diff(h)?;
    let fine = diff(0.5 * h)?;
    let value = (&fine * 4.0 - &coarse) / 3.0;
    let error = (&value - &coarse).amax();
    Ok(FdEstimate { value, error })
}

/// Jacobian `∂f_i/∂x_j` of a vector field.
pub fn fd_jacobian<F>(f: F, p: &Vector, cfg: &OracleConfig) -> Result<FdEstimate<Matrix>>
where
    F: Fn(&Vector) -> Result<Vector>,
{
    cfg.check()?;
    let mut cols = Vec::with_capacity(p.len());
    let mut error = 0.0f64;
    for j in 0..p.len() {
        let col = partial(&f, p, j, cfg)?;
        error = error.max(col.error);
        cols.push(col.value);
    }
    let m = cols.first().map_or(0, |c| c.len());
    Ok(FdEstimate {
        value: Matrix::from_fn(m, p.len(), |i, j| cols[j][i]),
        error,
    })
}

/// Gradient of a scalar field.
pub fn fd_gradient<F>(f: F, p: &Vector, cfg: &OracleConfig) -> Result<FdEstimate<Vector>>
where
    F: Fn(&Vector) -> Result<f64>,
{
    let jac = fd_jacobian(|q| Ok(Vector::from_element(1, f(q)?)), p, cfg)?;
    Ok(FdEstimate {
        value: jac.value.row(0).transpose(),
        error: jac.error,
    })
}

/// Hessian of a scalar field from second and mixed central differences.
pub fn fd_hessian<F>(f: F, p: &Vector, cfg: &OracleConfig) -> Result<FdEstimate<Matrix>>
where
    F: Fn(&Vector) -> Result<f64>,
{
    cfg.check()?;
    let n = p.len();
    let steps: Vec<f64> = p.iter().map(|&x| step_for(x, cfg)).collect::<Result<_>>()?;
    let at = |i: usize, j: usize, si: f64, sj: f64| {
        let mut q = p.clone();
        q[i] += si;
        q[j] += sj;
        f(&q)
    };
    let f0 = f(p)?;
    let estimate = |scale: f64| -> Result<Matrix> {
        let mut h = Matrix::zeros(n, n);
        for i in 0..n {
            let hi = steps[i] * scale;
            let mut q = p.clone();
            q[i] += hi;
            let fp = f(&q)?;
            q[i] -= 2.0 * hi;
            let fm = f(&q)?;
            h[(i, i)] = (fp - 2.0 * f0 + fm) / (hi * hi);
            for j in 0..i {
                let hj = steps[j] * scale;
                let v = (at(i, j, hi, hj)? - at(i, j, hi, -hj)? - at(i, j, -hi, hj)? + at(i, j, -hi, -hj)?) / (4.0 * hi * hj);
                h[(i, j)] = v;
                h[(j, i)] = v;
            }
        }
        Ok(h)
    };
    let coarse = estimate(1.0)?;
    let fine = estimate(0.5)?;
    let value = (&fine * 4.0 - &coarse) / 3.0;
    let error = (&value - &coarse).amax();
    Ok(FdEstimate { value, error })
}
