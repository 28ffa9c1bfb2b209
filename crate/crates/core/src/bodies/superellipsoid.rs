//! `L(v) = (Σ |v_i / a_i|^p)^(1/p)` for even `p = 2m`, `m ≤ 4`.

use crate::error::{FunkError, Result};
use crate::linalg::Tensor3;
use crate::{Matrix, Vector};

#[derive(Debug, Clone)]
pub(crate) struct SuperEllipsoid {
    axes: Vec<f64>,
    exponent: u32,
}

/// Sum `S`, its first, second and third (diagonal) partials.
struct Power {
    sum: f64,
    d1: Vec<f64>,
    d2: Vec<f64>,
    d3: Vec<f64>,
}

impl SuperEllipsoid {
    pub(crate) fn new(axes: Vec<f64>, exponent: u32) -> Result<Self> {
        if !matches!(exponent, 2 | 4 | 6 | 8) {
            return Err(FunkError::InvalidBody(format!(
                "superellipsoid exponent must be one of 2, 4, 6, 8 (got {exponent})"
            )));
        }
        if axes.iter().any(|&a| !(a > 0.0 && a.is_finite())) {
            return Err(FunkError::InvalidBody("superellipsoid axes must be positive".into()));
        }
        Ok(Self { axes, exponent })
    }

    pub(crate) fn exponent(&self) -> u32 {
        self.exponent
    }

    /// Exponents above 2 flatten the boundary at the axis points, where
    /// the metric tensor loses rank.
    pub(crate) fn is_degenerate(&self) -> bool {
        self.exponent > 2
    }

    fn power(&self, v: &Vector) -> Power {
        let p = self.exponent as i32;
        let pf = p as f64;
        let n = self.axes.len();
        let mut out = Power {
            sum: 0.0,
            d1: vec![0.0; n],
            d2: vec![0.0; n],
            d3: vec![0.0; n],
        };
        for i in 0..n {
            let a = self.axes[i];
            let x = v[i] / a;
            out.sum += x.powi(p);
            out.d1[i] = pf * x.powi(p - 1) / a;
            out.d2[i] = pf * (pf - 1.0) * x.powi(p - 2) / (a * a);
            out.d3[i] = if p > 2 {
                pf * (pf - 1.0) * (pf - 2.0) * x.powi(p - 3) / (a * a * a)
            } else {
                0.0
            };
        }
        out
    }

    /// `h(S) = S^q` and its derivatives, `q = 1/p`.
    fn outer_derivatives(&self, s: f64) -> [f64; 4] {
        let q = 1.0 / self.exponent as f64;
        let h = s.powf(q);
        [
            h,
            q * h / s,
            q * (q - 1.0) * h / (s * s),
            q * (q - 1.0) * (q - 2.0) * h / (s * s * s),
        ]
    }

    pub(crate) fn value(&self, v: &Vector) -> f64 {
        // Scale first so large or tiny vectors do not overflow S.
        let scale = v.amax();
        let u = v / scale;
        scale * self.power(&u).sum.powf(1.0 / self.exponent as f64)
    }

    pub(crate) fn gradient(&self, v: &Vector) -> Vector {
        let u = v / v.amax();
        let pw = self.power(&u);
        let h = self.outer_derivatives(pw.sum);
        Vector::from_iterator(u.len(), pw.d1.iter().map(|d| h[1] * d))
    }

    pub(crate) fn hessian(&self, v: &Vector) -> Matrix {
        let scale = v.amax();
        let u = v / scale;
        let pw = self.power(&u);
        let h = self.outer_derivatives(pw.sum);
        let n = u.len();
        let mut m = Matrix::from_fn(n, n, |i, j| h[2] * pw.d1[i] * pw.d1[j]);
        for i in 0..n {
            m[(i, i)] += h[1] * pw.d2[i];
        }
        m / scale
    }

    pub(crate) fn third(&self, v: &Vector) -> Tensor3 {
        let scale = v.amax();
        let u = v / scale;
        let pw = self.power(&u);
        let h = self.outer_derivatives(pw.sum);
        let n = u.len();
        let d1 = &pw.d1;
        let d2 = |i: usize, j: usize| if i == j { pw.d2[i] } else { 0.0 };
        let mut t = Tensor3::zeros(n);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let mut val = h[3] * d1[i] * d1[j] * d1[k]
                        + h[2] * (d2(i, j) * d1[k] + d2(i, k) * d1[j] + d2(j, k) * d1[i]);
                    if i == j && j == k {
                        val += h[1] * pw.d3[i];
                    }
                    t.set(i, j, k, val / (scale * scale));
                }
            }
        }
        t
    }
}
