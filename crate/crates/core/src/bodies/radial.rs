//! Planar star bodies with boundary `r = ρ(θ)` given by a finite Fourier series.

use serde::{Deserialize, Serialize};

use crate::error::{FunkError, Result};
use crate::linalg::Tensor3;
use crate::{Matrix, Vector};

/// `ρ(θ) = a0 + Σ_k a_k cos kθ + b_k sin kθ`, `k = 1, 2, …`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FourierProfile {
    pub a0: f64,
    #[serde(default)]
    pub a: Vec<f64>,
    #[serde(default)]
    pub b: Vec<f64>,
}

impl FourierProfile {
    pub fn new(a0: f64, a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        let profile = Self { a0, a, b };
        profile.check()?;
        Ok(profile)
    }

    pub(crate) fn check(&self) -> Result<()> {
        let harmonics = self.a.len().max(self.b.len());
        let bound: f64 = (0..harmonics)
            .map(|k| {
                let a = self.a.get(k).copied().unwrap_or(0.0);
                let b = self.b.get(k).copied().unwrap_or(0.0);
                a.hypot(b)
            })
            .sum();
        let finite = self.a0.is_finite() && self.a.iter().chain(&self.b).all(|x| x.is_finite());
        if !finite || self.a0 <= bound {
            return Err(FunkError::InvalidBody(format!(
                "radial profile must stay positive: a0 = {} but harmonics reach {bound}",
                self.a0
            )));
        }
        Ok(())
    }

    /// `[ρ, ρ', ρ'', ρ''']` at `theta`.
    pub fn derivatives(&self, theta: f64) -> [f64; 4] {
        let mut out = [self.a0, 0.0, 0.0, 0.0];
        let harmonics = self.a.len().max(self.b.len());
        for idx in 0..harmonics {
            let k = (idx + 1) as f64;
            let a = self.a.get(idx).copied().unwrap_or(0.0);
            let b = self.b.get(idx).copied().unwrap_or(0.0);
            let (s, c) = (k * theta).sin_cos();
            let even = a * c + b * s;
            let odd = -a * s + b * c;
            out[0] += even;
            out[1] += k * odd;
            out[2] -= k * k * even;
            out[3] -= k * k * k * odd;
        }
        out
    }

    pub fn radius(&self, theta: f64) -> f64 {
        self.derivatives(theta)[0]
    }
}

/// Polar frame quantities for `L(v) = |v| σ(θ)`, `σ = 1/ρ`.
struct Polar {
    r: f64,
    radial: [f64; 2],
    angular: [f64; 2],
    /// `[σ, σ', σ'', σ''']`
    sigma: [f64; 4],
}

fn polar(profile: &FourierProfile, v: &Vector) -> Polar {
    let r = v[0].hypot(v[1]);
    let theta = v[1].atan2(v[0]);
    let (s, c) = theta.sin_cos();
    let [p0, p1, p2, p3] = profile.derivatives(theta);
    let s0 = 1.0 / p0;
    let s1 = -p1 / (p0 * p0);
    let s2 = -p2 / (p0 * p0) + 2.0 * p1 * p1 / (p0 * p0 * p0);
    let s3 = -p3 / (p0 * p0) + 6.0 * p1 * p2 / (p0 * p0 * p0) - 6.0 * p1 * p1 * p1 / (p0 * p0 * p0 * p0);
    Polar {
        r,
        radial: [c, s],
        angular: [-s, c],
        sigma: [s0, s1, s2, s3],
    }
}

pub(crate) fn value(profile: &FourierProfile, v: &Vector) -> f64 {
    let theta = v[1].atan2(v[0]);
    v[0].hypot(v[1]) / profile.radius(theta)
}

pub(crate) fn gradient(profile: &FourierProfile, v: &Vector) -> Vector {
    let p = polar(profile, v);
    Vector::from_fn(2, |i, _| p.sigma[0] * p.radial[i] + p.sigma[1] * p.angular[i])
}

pub(crate) fn hessian(profile: &FourierProfile, v: &Vector) -> Matrix {
    // Degree-one homogeneous in the plane: Hess L = (σ + σ'') / r · θ̂ θ̂ᵀ.
    let p = polar(profile, v);
    let k = (p.sigma[0] + p.sigma[2]) / p.r;
    Matrix::from_fn(2, 2, |i, j| k * p.angular[i] * p.angular[j])
}

pub(crate) fn third(profile: &FourierProfile, v: &Vector) -> Tensor3 {
    let p = polar(profile, v);
    let k = p.sigma[0] + p.sigma[2];
    let dk = p.sigma[1] + p.sigma[3];
    let r2 = p.r * p.r;
    let (e, t) = (p.radial, p.angular);
    let mut out = Tensor3::zeros(2);
    for i in 0..2 {
        for j in 0..2 {
            for l in 0..2 {
                let val = (dk * t[i] * t[j] * t[l]
                    - k * (e[l] * t[i] * t[j] + e[i] * t[j] * t[l] + e[j] * t[i] * t[l]))
                    / r2;
                out.set(i, j, l, val);
            }
        }
    }
    out
}
