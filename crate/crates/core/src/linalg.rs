//! Small dense helpers on top of nalgebra.

use nalgebra::{Cholesky, SymmetricEigen};

use crate::{Matrix, Vector};

/// Fully symmetric (by construction, not enforced) rank-3 array `T[i][j][k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor3 {
    dim: usize,
    data: Vec<f64>,
}

impl Tensor3 {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![0.0; dim * dim * dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.data[(i * self.dim + j) * self.dim + k]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, k: usize, value: f64) {
        self.data[(i * self.dim + j) * self.dim + k] = value;
    }

    /// Contract the last slot with `v`: `(T v)_ij = T_ijk v^k`.
    pub fn contract_last(&self, v: &Vector) -> Matrix {
        let n = self.dim;
        Matrix::from_fn(n, n, |i, j| (0..n).map(|k| self.get(i, j, k) * v[k]).sum())
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// Largest pairwise deviation from full index symmetry.
    pub fn asymmetry(&self) -> f64 {
        let n = self.dim;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let t = self.get(i, j, k);
                    worst = worst
                        .max((t - self.get(j, i, k)).abs())
                        .max((t - self.get(i, k, j)).abs())
                        .max((t - self.get(k, j, i)).abs());
                }
            }
        }
        worst
    }
}

/// `a ⊗ b` as a matrix.
pub fn outer(a: &Vector, b: &Vector) -> Matrix {
    a * b.transpose()
}

/// `(m + mᵀ) / 2`.
pub fn symmetrize(m: &Matrix) -> Matrix {
    (m + m.transpose()) * 0.5
}

/// Eigenvalues of a symmetric matrix in ascending order.
pub fn symmetric_eigenvalues(m: &Matrix) -> Vec<f64> {
    let mut values: Vec<f64> = SymmetricEigen::new(symmetrize(m)).eigenvalues.iter().copied().collect();
    values.sort_by(|a, b| a.total_cmp(b));
    values
}

pub fn min_eigenvalue(m: &Matrix) -> f64 {
    symmetric_eigenvalues(m)[0]
}

/// `log det m` for a symmetric positive-definite matrix, `None` if the
/// Cholesky factorization breaks down.
pub fn log_det_spd(m: &Matrix) -> Option<f64> {
    let chol = Cholesky::new(m.clone())?;
    let l = chol.l_dirty();
    let mut acc = 0.0;
    for i in 0..m.nrows() {
        let d = l[(i, i)];
        if !(d > 0.0) {
            return None;
        }
        acc += d.ln();
    }
    Some(2.0 * acc)
}

pub fn is_spd(m: &Matrix) -> bool {
    log_det_spd(m).is_some()
}

/// Solve `m x = rhs` for SPD `m`; `None` when `m` is not positive definite.
pub fn solve_spd(m: &Matrix, rhs: &Vector) -> Option<Vector> {
    Cholesky::new(m.clone()).map(|c| c.solve(rhs))
}

/// Componentwise relative error of `a` against `b` in the max norm,
/// scaled by `max(‖b‖∞, floor)`.
pub fn rel_err_vec(a: &Vector, b: &Vector, floor: f64) -> f64 {
    let scale = b.amax().max(floor);
    (a - b).amax() / scale
}

pub fn rel_err_mat(a: &Matrix, b: &Matrix, floor: f64) -> f64 {
    let scale = b.amax().max(floor);
    (a - b).amax() / scale
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_det_matches_determinant() {
        let m = Matrix::from_row_slice(3, 3, &[4.0, 1.0, 0.5, 1.0, 3.0, 0.2, 0.5, 0.2, 2.0]);
        let ld = log_det_spd(&m).unwrap();
        assert!((ld.exp() - m.determinant()).abs() < 1e-12 * m.determinant());
    }

    #[test]
    fn indefinite_matrix_has_no_log_det() {
        let m = Matrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        assert!(log_det_spd(&m).is_none());
        assert!((min_eigenvalue(&m) + 1.0).abs() < 1e-14);
    }

    #[test]
    fn tensor_contraction() {
        let mut t = Tensor3::zeros(2);
        t.set(0, 0, 1, 2.0);
        t.set(1, 1, 0, -1.0);
        let c = t.contract_last(&Vector::from_vec(vec![3.0, 5.0]));
        assert_eq!(c[(0, 0)], 10.0);
        assert_eq!(c[(1, 1)], -3.0);
    }
}
