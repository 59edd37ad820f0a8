use faer::{Mat, Side};

use super::dot;
use crate::error::{Error, Result};

/// Block Lanczos with full reorthogonalization for the algebraically largest
/// eigenvalues of a real symmetric operator.
#[derive(Clone, Copy, Debug)]
pub struct Lanczos {
    pub block: usize,
    pub max_basis: usize,
    pub tol: f64,
    /// Basis size of the first convergence check; later checks are spaced geometrically.
    pub first_check: usize,
}

impl Default for Lanczos {
    fn default() -> Self {
        Self { block: 4, max_basis: 2400, tol: 1e-11, first_check: 40 }
    }
}

#[derive(Clone, Debug)]
pub struct LanczosResult {
    /// Descending Ritz values.
    pub values: Vec<f64>,
    /// Residual norms `‖A u − θ u‖` matching `values`.
    pub residuals: Vec<f64>,
    pub basis_size: usize,
}

struct SplitMix(u64);

impl SplitMix {
    fn next_f64(&mut self) -> f64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^= z >> 31;
        (z >> 11) as f64 / (1u64 << 53) as f64 - 0.5
    }
}

fn orthogonalize(w: &mut [f64], basis: &[Vec<f64>]) {
    for _ in 0..2 {
        for q in basis {
            let c = dot(q, w);
            for (x, y) in w.iter_mut().zip(q) {
                *x -= c * y;
            }
        }
    }
}

impl Lanczos {
    /// `apply(x, y)` writes `A x` into `y`; `scale` is a bound on `‖A‖`.
    pub fn largest(&self, n: usize, k: usize, scale: f64, apply: impl Fn(&[f64], &mut [f64])) -> Result<LanczosResult> {
        if k == 0 || k > n {
            return Err(Error::InvalidParameter { name: "k", reason: format!("need 1 <= k <= {n}") });
        }
        let b = self.block.max(1).min(n);
        let max_basis = self.max_basis.min(n).max(k + b);
        let threshold = self.tol * scale.max(f64::MIN_POSITIVE);
        let mut rng = SplitMix(0x5EED_1A2C);

        let mut basis: Vec<Vec<f64>> = Vec::new();
        let mut t_entries: Vec<(usize, usize, f64)> = Vec::new();
        let mut current = self.fresh_block(n, b, &basis, &mut rng);
        let mut prev_start = 0usize;
        let mut next_check = self.first_check.max(k + b);
        let mut w = vec![0.0; n];

        loop {
            let start = basis.len();
            let width = current.len();
            basis.append(&mut current);
            let mut block_out: Vec<Vec<f64>> = Vec::with_capacity(width);
            for j in start..start + width {
                apply(&basis[j], &mut w);
                for i in prev_start..start + width {
                    let c = dot(&basis[i], &w);
                    if i >= j {
                        t_entries.push((i, j, c));
                        if i != j {
                            t_entries.push((j, i, c));
                        }
                    }
                }
                let mut r = w.clone();
                orthogonalize(&mut r, &basis);
                block_out.push(r);
            }
            // QR of the residual block gives the next basis block and the coupling.
            let mut next: Vec<Vec<f64>> = Vec::new();
            let mut coupling: Vec<(usize, usize, f64)> = Vec::new();
            let next_start = basis.len();
            for (c, mut r) in block_out.into_iter().enumerate() {
                for (q_idx, q) in next.iter().enumerate() {
                    let proj = dot(q, &r);
                    coupling.push((next_start + q_idx, start + c, proj));
                    for (x, y) in r.iter_mut().zip(q) {
                        *x -= proj * y;
                    }
                }
                orthogonalize(&mut r, &basis);
                let nr = dot(&r, &r).sqrt();
                if nr > threshold * 1e-3 && basis.len() + next.len() < n {
                    for x in &mut r {
                        *x /= nr;
                    }
                    coupling.push((next_start + next.len(), start + c, nr));
                    next.push(r);
                }
            }
            let invariant = next.is_empty();
            let full = basis.len() + next.len() > max_basis || basis.len() >= n;
            if basis.len() >= next_check || invariant || full {
                next_check = (basis.len() + basis.len() / 4).max(basis.len() + 4 * b);
                let result = self.ritz(&basis, &t_entries, &coupling, next_start, next.len(), k)?;
                let done = invariant || result.residuals.iter().all(|r| *r <= threshold);
                if done {
                    return Ok(result);
                }
                if full {
                    let worst = result.residuals.iter().cloned().fold(0.0, f64::max);
                    return Err(Error::NoConvergence {
                        solver: "block lanczos",
                        detail: format!(
                            "basis limit {} reached; worst residual {worst:e} > {threshold:e}; ritz values {:?}",
                            max_basis, result.values
                        ),
                    });
                }
            }
            for (i, j, v) in coupling {
                t_entries.push((i, j, v));
                t_entries.push((j, i, v));
            }
            prev_start = start;
            current = next;
        }
    }

    fn fresh_block(&self, n: usize, b: usize, basis: &[Vec<f64>], rng: &mut SplitMix) -> Vec<Vec<f64>> {
        let mut out: Vec<Vec<f64>> = Vec::with_capacity(b);
        for _ in 0..b {
            let mut v: Vec<f64> = (0..n).map(|_| rng.next_f64()).collect();
            orthogonalize(&mut v, basis);
            orthogonalize(&mut v, &out);
            let nv = dot(&v, &v).sqrt();
            for x in &mut v {
                *x /= nv;
            }
            out.push(v);
        }
        out
    }

    fn ritz(
        &self,
        basis: &[Vec<f64>],
        t_entries: &[(usize, usize, f64)],
        coupling: &[(usize, usize, f64)],
        next_start: usize,
        next_len: usize,
        k: usize,
    ) -> Result<LanczosResult> {
        let m = basis.len();
        let mut t = Mat::<f64>::zeros(m, m);
        for &(i, j, v) in t_entries {
            if i < m && j < m {
                t[(i, j)] = v;
            }
        }
        let eig = t
            .self_adjoint_eigen(Side::Lower)
            .map_err(|e| Error::LinearAlgebra(format!("projected eigenproblem failed: {e:?}")))?;
        let s = eig.S().column_vector();
        let u = eig.U();
        let kk = k.min(m);
        let mut values = Vec::with_capacity(kk);
        let mut residuals = Vec::with_capacity(kk);
        for idx in (m - kk..m).rev() {
            values.push(s[idx]);
            let mut res = vec![0.0; next_len];
            for &(row, col, v) in coupling {
                res[row - next_start] += v * u[(col, idx)];
            }
            residuals.push(dot(&res, &res).sqrt());
        }
        Ok(LanczosResult { values, residuals, basis_size: m })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::CsrMatrix;

    fn path_laplacian(n: usize) -> CsrMatrix<f64> {
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, -2.0));
            if i + 1 < n {
                t.push((i, i + 1, 1.0));
                t.push((i + 1, i, 1.0));
            }
        }
        CsrMatrix::from_triplets(n, n, t)
    }

    #[test]
    fn matches_analytic_path_spectrum() {
        let n = 400;
        let a = path_laplacian(n);
        let res = Lanczos::default().largest(n, 3, 4.0, |x, y| a.mul_vec_into(x, y)).unwrap();
        for (i, v) in res.values.iter().enumerate() {
            let theta = std::f64::consts::PI * (i + 1) as f64 / (n + 1) as f64;
            let exact = -2.0 + 2.0 * theta.cos();
            assert!((v - exact).abs() < 1e-9, "{v} vs {exact}");
        }
    }

    #[test]
    fn resolves_degenerate_pairs() {
        // Ring spectrum -4 sin^2(pi j / n) is doubly degenerate for 0 < j < n/2.
        let n = 300;
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, -2.0));
            t.push((i, (i + 1) % n, 1.0));
            t.push(((i + 1) % n, i, 1.0));
        }
        let a = CsrMatrix::from_triplets(n, n, t);
        let res = Lanczos::default().largest(n, 3, 4.0, |x, y| a.mul_vec_into(x, y)).unwrap();
        let s = (std::f64::consts::PI / n as f64).sin();
        assert!(res.values[0].abs() < 1e-9);
        assert!((res.values[1] + 4.0 * s * s).abs() < 1e-9);
        assert!((res.values[2] + 4.0 * s * s).abs() < 1e-9);
    }

    #[test]
    fn small_operator_reaches_invariant_subspace() {
        let a = path_laplacian(5);
        let res = Lanczos::default().largest(5, 5, 4.0, |x, y| a.mul_vec_into(x, y)).unwrap();
        assert_eq!(res.values.len(), 5);
        assert!((res.values[4] - (-2.0 - 3f64.sqrt())).abs() < 1e-10);
    }
}
