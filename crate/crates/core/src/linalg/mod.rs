//! Dense and sparse numerical kernels shared by the engine and the oracle.

pub mod expm;
pub mod expmv;
pub mod lanczos;
pub mod sparse;

use faer::{Mat, Side};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub use sparse::{CsrMatrix, Scalar};

/// Eigenvalues of a general real matrix.
pub fn eigenvalues_real(m: &Mat<f64>) -> Result<Vec<Complex64>> {
    m.eigenvalues().map_err(|e| Error::LinearAlgebra(format!("real eigenvalue solve failed: {e:?}")))
}

/// Eigenvalues of a general complex matrix.
pub fn eigenvalues_complex(m: &Mat<Complex64>) -> Result<Vec<Complex64>> {
    m.eigenvalues().map_err(|e| Error::LinearAlgebra(format!("complex eigenvalue solve failed: {e:?}")))
}

/// Eigenvalues of a real symmetric matrix, ascending.
pub fn eigenvalues_symmetric(m: &Mat<f64>) -> Result<Vec<f64>> {
    m.self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| Error::LinearAlgebra(format!("symmetric eigenvalue solve failed: {e:?}")))
}

/// Sorts by descending real part, then descending imaginary part.
pub fn sort_descending(values: &mut [Complex64]) {
    values.sort_by(|a, b| b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im)));
}

pub fn norm_one_dense(m: &Mat<f64>) -> f64 {
    (0..m.ncols()).map(|j| (0..m.nrows()).map(|i| m[(i, j)].abs()).sum::<f64>()).fold(0.0, f64::max)
}

pub fn norm_inf_dense(m: &Mat<f64>) -> f64 {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)].abs()).sum::<f64>()).fold(0.0, f64::max)
}

pub fn dense_matvec(m: &Mat<f64>, x: &[f64]) -> Vec<f64> {
    let mut y = vec![0.0; m.nrows()];
    for j in 0..m.ncols() {
        let xj = x[j];
        if xj != 0.0 {
            let col = m.col(j);
            for (i, yi) in y.iter_mut().enumerate() {
                *yi += col[i] * xj;
            }
        }
    }
    y
}

/// LU factorization with partial pivoting, reusable across right-hand sides.
pub struct DenseLu {
    lu: faer::linalg::solvers::PartialPivLu<f64>,
    n: usize,
}

impl DenseLu {
    pub fn new(a: &Mat<f64>) -> Result<Self> {
        if a.ncols() != a.nrows() {
            return Err(Error::DimensionMismatch { expected: a.nrows(), actual: a.ncols() });
        }
        Ok(Self { lu: a.partial_piv_lu(), n: a.nrows() })
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        use faer::linalg::solvers::Solve;
        if b.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, actual: b.len() });
        }
        let rhs = Mat::<f64>::from_fn(self.n, 1, |i, _| b[i]);
        let sol = self.lu.solve(&rhs);
        let x: Vec<f64> = (0..self.n).map(|i| sol[(i, 0)]).collect();
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::LinearAlgebra("singular system in dense solve".into()));
        }
        Ok(x)
    }
}

/// Solves `A x = b` by LU with partial pivoting.
pub fn solve_dense(a: &Mat<f64>, b: &[f64]) -> Result<Vec<f64>> {
    if b.len() != a.nrows() {
        return Err(Error::DimensionMismatch { expected: a.nrows(), actual: b.len() });
    }
    DenseLu::new(a)?.solve(b)
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// `max` that returns NaN when either argument is NaN.
pub fn nan_max(a: f64, b: f64) -> f64 {
    if a.is_nan() || b.is_nan() {
        f64::NAN
    } else {
        a.max(b)
    }
}

/// Largest magnitude; NaN if any entry is NaN.
pub fn max_abs(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, v| nan_max(m, v.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_eigenvalues_of_path_graph() {
        let m = Mat::<f64>::from_fn(3, 3, |i, j| match i.abs_diff(j) {
            0 => -2.0,
            1 => 1.0,
            _ => 0.0,
        });
        let ev = eigenvalues_symmetric(&m).unwrap();
        let s = std::f64::consts::SQRT_2;
        for (got, want) in ev.iter().zip([-2.0 - s, -2.0, -2.0 + s]) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn dense_solve_roundtrip() {
        let a = Mat::<f64>::from_fn(3, 3, |i, j| if i == j { 4.0 } else { 1.0 / (1 + i + j) as f64 });
        let x = [1.0, -2.0, 0.5];
        let b = dense_matvec(&a, &x);
        let got = solve_dense(&a, &b).unwrap();
        for (g, w) in got.iter().zip(x) {
            assert!((g - w).abs() < 1e-13);
        }
    }
}
