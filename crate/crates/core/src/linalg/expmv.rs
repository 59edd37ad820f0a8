use super::sparse::Scalar;
use crate::error::{Error, Result};

/// Truncated-Taylor action of a matrix exponential, `exp(t A) v`.
///
/// The interval is split into substeps with `h ‖A‖ ≤ theta`; each substep sums
/// Taylor terms until two consecutive terms fall below `tol` relative to the
/// partial sum.
#[derive(Clone, Copy, Debug)]
pub struct Expmv {
    pub tol: f64,
    pub theta: f64,
    pub max_terms: usize,
}

impl Default for Expmv {
    fn default() -> Self {
        Self { tol: 1e-16, theta: 1.0, max_terms: 60 }
    }
}

fn inf_norm<T: Scalar>(v: &[T]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.magnitude()))
}

impl Expmv {
    /// `apply(x, y)` must write `A x` into `y`; `norm` bounds `‖A‖∞`.
    pub fn apply<T: Scalar>(&self, apply: impl Fn(&[T], &mut [T]), norm: f64, t: f64, v: &[T]) -> Result<Vec<T>> {
        if !(t.is_finite() && norm.is_finite()) {
            return Err(Error::NonFinite("expmv step"));
        }
        if t < 0.0 {
            return Err(Error::InvalidParameter { name: "t", reason: "negative propagation time".into() });
        }
        let mut f = v.to_vec();
        if t == 0.0 || norm == 0.0 {
            return Ok(f);
        }
        let steps = ((t * norm) / self.theta).ceil().max(1.0) as usize;
        let h = t / steps as f64;
        let mut term = vec![T::zero(); v.len()];
        let mut next = vec![T::zero(); v.len()];
        for _ in 0..steps {
            term.copy_from_slice(&f);
            let mut small = 0;
            let mut converged = false;
            for k in 1..=self.max_terms {
                apply(&term, &mut next);
                let c = T::from_real(h / k as f64);
                for (dst, src) in term.iter_mut().zip(&next) {
                    *dst = c * *src;
                }
                for (acc, x) in f.iter_mut().zip(&term) {
                    *acc += *x;
                }
                let fnorm = inf_norm(&f);
                if inf_norm(&term) <= self.tol * fnorm.max(f64::MIN_POSITIVE) {
                    small += 1;
                    if small == 2 {
                        converged = true;
                        break;
                    }
                } else {
                    small = 0;
                }
            }
            if !converged {
                return Err(Error::NoConvergence {
                    solver: "taylor expmv",
                    detail: format!("series not converged in {} terms at h = {h:e}", self.max_terms),
                });
            }
            if f.iter().any(|x| !x.is_finite()) {
                return Err(Error::NonFinite("expmv state"));
            }
        }
        Ok(f)
    }

    /// Propagates `v` to each of the ascending `times`, starting at zero.
    pub fn trajectory<T: Scalar>(
        &self,
        apply: impl Fn(&[T], &mut [T]),
        norm: f64,
        v: &[T],
        times: &[f64],
    ) -> Result<Vec<Vec<T>>> {
        let mut out = Vec::with_capacity(times.len());
        let mut current = v.to_vec();
        let mut now = 0.0;
        for &t in times {
            if t < now {
                return Err(Error::InvalidParameter { name: "times", reason: "not ascending from zero".into() });
            }
            current = self.apply(&apply, norm, t - now, &current)?;
            now = t;
            out.push(current.clone());
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::CsrMatrix;

    #[test]
    fn decay_and_rotation() {
        let a = CsrMatrix::from_triplets(3, 3, vec![(0, 0, -1.0), (1, 2, -1.0), (2, 1, 1.0)]);
        let out = Expmv::default().apply(|x, y| a.mul_vec_into(x, y), a.norm_inf(), 7.0, &[1.0, 1.0, 0.0]).unwrap();
        assert!((out[0] - (-7f64).exp()).abs() < 1e-15);
        assert!((out[1] - 7f64.cos()).abs() < 1e-13);
        assert!((out[2] - 7f64.sin()).abs() < 1e-13);
    }

    #[test]
    fn zero_time_is_identity() {
        let a = CsrMatrix::from_triplets(1, 1, vec![(0, 0, -3.0)]);
        let out = Expmv::default().apply(|x, y| a.mul_vec_into(x, y), 3.0, 0.0, &[2.0]).unwrap();
        assert_eq!(out, vec![2.0]);
    }
}
