//! Ellipsoids with arbitrary interior center.
//!
//! An ellipsoid `{x : (x - c)ᵀ S (x - c) ≤ 1}` containing the origin has a
//! Randers-type gauge `L(v) = √(vᵀ M v) + w·v` with
//!
//! ```text
//!   κ = 1 - cᵀ S c,   M = (κ S + (S c)(S c)ᵀ) / κ²,   w = -S c / κ,
//! ```
//!
//! and conversely a Randers gauge `√(vᵀ A v) + b·v` with `bᵀ A⁻¹ b < 1` has an
//! ellipsoidal indicatrix with `Q = A - b bᵀ`, center `-Q⁻¹ b` and shape
//! `Q / (1 + bᵀ Q⁻¹ b)`. Both views are stored so that translation stays exact.

use crate::error::{FunkError, Result};
use crate::linalg::{is_spd, outer, solve_spd, Tensor3};
use crate::{Matrix, Vector};

#[derive(Debug, Clone)]
pub(crate) struct Quadric {
    m: Matrix,
    w: Vector,
    /// `M - w wᵀ`, used for the cancellation-free branch of `L`.
    q: Matrix,
    shape: Matrix,
    center: Vector,
}

fn check_symmetric(a: &Matrix, what: &str) -> Result<()> {
    if !a.is_square() {
        return Err(FunkError::InvalidBody(format!("{what} must be square")));
    }
    let scale = a.amax().max(1.0);
    if (a - a.transpose()).amax() > 1e-12 * scale {
        return Err(FunkError::InvalidBody(format!("{what} must be symmetric")));
    }
    if !is_spd(a) {
        return Err(FunkError::InvalidBody(format!(
            "{what} must be positive definite"
        )));
    }
    Ok(())
}

impl Quadric {
    pub(crate) fn from_ellipsoid(shape: Matrix, center: Vector) -> Result<Self> {
        check_symmetric(&shape, "ellipsoid matrix")?;
        if center.len() != shape.nrows() {
            return Err(FunkError::DimensionMismatch {
                expected: shape.nrows(),
                found: center.len(),
            });
        }
        let sc = &shape * &center;
        let kappa = 1.0 - center.dot(&sc);
        if !(kappa > 0.0) {
            return Err(FunkError::InvalidBody(
                "the origin must lie in the interior of the ellipsoid".into(),
            ));
        }
        let (m, w) = if center.iter().all(|&x| x == 0.0) {
            (shape.clone(), Vector::zeros(center.len()))
        } else {
            (
                (&shape * kappa + outer(&sc, &sc)) / (kappa * kappa),
                -&sc / kappa,
            )
        };
        let q = &shape / kappa;
        Ok(Self {
            m,
            w,
            q,
            shape,
            center,
        })
    }

    pub(crate) fn from_randers(a: Matrix, b: Vector) -> Result<Self> {
        check_symmetric(&a, "Randers matrix")?;
        if b.len() != a.nrows() {
            return Err(FunkError::DimensionMismatch {
                expected: a.nrows(),
                found: b.len(),
            });
        }
        let a_inv_b = solve_spd(&a, &b).expect("checked SPD");
        let norm2 = b.dot(&a_inv_b);
        if !(norm2 < 1.0) {
            return Err(FunkError::InvalidBody(format!(
                "Randers one-form too large: bᵀA⁻¹b = {norm2} must be < 1"
            )));
        }
        let q = &a - outer(&b, &b);
        let q_inv_b = solve_spd(&q, &b).ok_or_else(|| {
            FunkError::InvalidBody("A - b bᵀ is not positive definite".into())
        })?;
        let center = -&q_inv_b;
        let shape = &q / (1.0 + b.dot(&q_inv_b));
        Ok(Self {
            m: a,
            w: b,
            q,
            shape,
            center,
        })
    }

    pub(crate) fn dim(&self) -> usize {
        self.w.len()
    }

    pub(crate) fn center(&self) -> &Vector {
        &self.center
    }

    pub(crate) fn shape(&self) -> &Matrix {
        &self.shape
    }

    /// Same ellipsoid seen from `offset` as the new origin.
    pub(crate) fn shifted(&self, offset: &Vector) -> Result<Self> {
        Self::from_ellipsoid(self.shape.clone(), &self.center - offset)
    }

    pub(crate) fn value(&self, v: &Vector) -> f64 {
        let a = v.dot(&(&self.m * v)).sqrt();
        let lin = self.w.dot(v);
        if lin >= 0.0 {
            a + lin
        } else {
            // a + lin = (a² - lin²) / (a - lin) = vᵀ(M - wwᵀ)v / (a - lin)
            v.dot(&(&self.q * v)) / (a - lin)
        }
    }

    pub(crate) fn gradient(&self, v: &Vector) -> Vector {
        let mv = &self.m * v;
        let a = v.dot(&mv).sqrt();
        mv / a + &self.w
    }

    pub(crate) fn hessian(&self, v: &Vector) -> Matrix {
        let mv = &self.m * v;
        let a2 = v.dot(&mv);
        let a = a2.sqrt();
        (&self.m - outer(&mv, &mv) / a2) / a
    }

    pub(crate) fn third(&self, v: &Vector) -> Tensor3 {
        let n = self.dim();
        let mv = &self.m * v;
        let a2 = v.dot(&mv);
        let a = a2.sqrt();
        let a3 = a2 * a;
        let a5 = a3 * a2;
        let mut t = Tensor3::zeros(n);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let val = -(self.m[(i, j)] * mv[k] + self.m[(i, k)] * mv[j] + self.m[(j, k)] * mv[i])
                        / a3
                        + 3.0 * mv[i] * mv[j] * mv[k] / a5;
                    t.set(i, j, k, val);
                }
            }
        }
        t
    }
}
