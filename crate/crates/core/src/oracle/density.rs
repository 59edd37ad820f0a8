use faer::{Mat, Side};
use num_complex::Complex64;

use super::operators::{trace_product, Observable};
use crate::error::{Error, Result};
use crate::linalg::nan_max;

/// Dense `2^N × 2^N` density matrix in the `s³` product basis, stored column-major.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    n: usize,
    data: Vec<Complex64>,
}

/// Tolerances for the physical-state checks.
#[derive(Clone, Copy, Debug)]
pub struct StateTolerance {
    pub hermiticity: f64,
    pub trace: f64,
    pub positivity: f64,
}

impl Default for StateTolerance {
    fn default() -> Self {
        Self { hermiticity: 1e-12, trace: 1e-12, positivity: 1e-10 }
    }
}

impl DensityMatrix {
    pub fn from_column_major(n: usize, data: Vec<Complex64>) -> Result<Self> {
        let dim = 1usize << n;
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch { expected: dim * dim, actual: data.len() });
        }
        Ok(Self { n, data })
    }

    /// `𝟙 / 2^N`.
    pub fn maximally_mixed(n: usize) -> Self {
        let dim = 1usize << n;
        let mut data = vec![Complex64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            data[i * dim + i] = Complex64::new(1.0 / dim as f64, 0.0);
        }
        Self { n, data }
    }

    /// `|ψ⟩⟨ψ|` for a normalized ket.
    pub fn pure(n: usize, ket: &[Complex64]) -> Result<Self> {
        let dim = 1usize << n;
        if ket.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, actual: ket.len() });
        }
        let data = (0..dim * dim).map(|k| ket[k % dim] * ket[k / dim].conj()).collect();
        Ok(Self { n, data })
    }

    pub fn n_sites(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i + j * self.dim()]
    }

    /// Column-stacked `vec(ρ)`.
    pub fn as_vec(&self) -> &[Complex64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<Complex64> {
        self.data
    }

    pub fn to_mat(&self) -> Mat<Complex64> {
        Mat::from_fn(self.dim(), self.dim(), |i, j| self.get(i, j))
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim()).map(|i| self.get(i, i)).sum()
    }

    pub fn hermiticity_error(&self) -> f64 {
        let d = self.dim();
        let mut worst: f64 = 0.0;
        for i in 0..d {
            for j in i..d {
                worst = nan_max(worst, (self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        let m = self.to_mat();
        let herm = Mat::<Complex64>::from_fn(m.nrows(), m.ncols(), |i, j| (m[(i, j)] + m[(j, i)].conj()) * 0.5);
        let vals = herm
            .self_adjoint_eigenvalues(Side::Lower)
            .map_err(|e| Error::LinearAlgebra(format!("density eigenvalues failed: {e:?}")))?;
        Ok(vals.into_iter().fold(f64::INFINITY, f64::min))
    }

    /// Hermiticity, unit trace and positivity within `tol`.
    pub fn check(&self, tol: &StateTolerance) -> Result<()> {
        if self.data.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::NonFinite("density matrix"));
        }
        let h = self.hermiticity_error();
        if !(h <= tol.hermiticity) {
            return Err(Error::InvariantViolation(format!("hermiticity error {h:e}")));
        }
        let t = (self.trace() - Complex64::new(1.0, 0.0)).norm();
        if !(t <= tol.trace) {
            return Err(Error::InvariantViolation(format!("trace error {t:e}")));
        }
        let m = self.min_eigenvalue()?;
        if m < -tol.positivity {
            return Err(Error::InvariantViolation(format!("negative eigenvalue {m:e}")));
        }
        Ok(())
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.data.iter().zip(&other.data).fold(0.0, |m, (a, b)| nan_max(m, (a - b).norm()))
    }
}

/// `tr(ρ O)`.
pub fn expectation(rho: &DensityMatrix, obs: &Observable) -> Result<Complex64> {
    if let Some(s) = obs.max_site() {
        if s >= rho.n_sites() {
            return Err(Error::InvalidParameter {
                name: "observable",
                reason: format!("site {s} out of range for {} sites", rho.n_sites()),
            });
        }
    }
    Ok(trace_product(rho.as_vec(), rho.n_sites(), obs))
}

/// Binomial mixture of the totally symmetric Dicke states, `2^{-N} Σ_n C(N,n) |D(N,n)⟩⟨D(N,n)|`.
///
/// Each Dicke projector spreads `1/C(N,n)` uniformly over its weight-`n` block, so every
/// element between equal-weight basis states equals `2^{-N}`.
pub fn dicke_ensemble(n: usize) -> Result<DensityMatrix> {
    if n > super::lindblad::MATRIX_FREE_MAX_SITES {
        return Err(Error::CapExceeded(format!("{n} sites exceeds the oracle limit")));
    }
    let dim = 1usize << n;
    let w = Complex64::new(1.0 / dim as f64, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let data =
        (0..dim * dim).map(|k| if (k % dim).count_ones() == (k / dim).count_ones() { w } else { zero }).collect();
    DensityMatrix::from_column_major(n, data)
}
