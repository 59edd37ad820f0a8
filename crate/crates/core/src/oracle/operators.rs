use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::jump_algebra::{s_minus, s_plus, spin, Op};
use crate::linalg::CsrMatrix;

/// Bit of site `x` in a basis index; site 0 is the most significant bit and bit value 0 is `|↑⟩`.
pub(crate) fn bit(index: usize, n: usize, x: usize) -> usize {
    (index >> (n - 1 - x)) & 1
}

fn with_bit(index: usize, n: usize, x: usize, b: usize) -> usize {
    let shift = n - 1 - x;
    (index & !(1 << shift)) | (b << shift)
}

/// Embeds a 2×2 operator on site `x` or a 4×4 operator on the ordered pair `sites` into `2^n` dimensions.
pub fn embed(op: &Op, sites: &[usize], n: usize) -> Result<CsrMatrix<Complex64>> {
    let k = sites.len();
    if op.dim() != 1 << k {
        return Err(Error::DimensionMismatch { expected: 1 << k, actual: op.dim() });
    }
    if sites.iter().any(|&s| s >= n) || (k == 2 && sites[0] == sites[1]) {
        return Err(Error::InvalidParameter { name: "sites", reason: format!("{sites:?} invalid for {n} sites") });
    }
    let dim = 1usize << n;
    let mut trip = Vec::new();
    for col in 0..dim {
        let local_in = sites.iter().fold(0, |acc, &s| (acc << 1) | bit(col, n, s));
        for local_out in 0..op.dim() {
            let v = op.get(local_out, local_in);
            if v == Complex64::new(0.0, 0.0) {
                continue;
            }
            let mut row = col;
            for (pos, &s) in sites.iter().enumerate() {
                row = with_bit(row, n, s, (local_out >> (k - 1 - pos)) & 1);
            }
            trip.push((row, col, v));
        }
    }
    Ok(CsrMatrix::from_triplets(dim, dim, trip))
}

/// Sum of weighted products of single-site operators.
#[derive(Clone, Debug)]
pub struct Observable {
    terms: Vec<(Complex64, Vec<(usize, Op)>)>,
}

impl Observable {
    pub fn zero() -> Self {
        Self { terms: Vec::new() }
    }

    pub fn term(mut self, coef: f64, factors: Vec<(usize, Op)>) -> Self {
        self.terms.push((Complex64::new(coef, 0.0), factors));
        self
    }

    /// `s^α_x`.
    pub fn spin(x: usize, alpha: usize) -> Self {
        Self::zero().term(1.0, vec![(x, spin(alpha))])
    }

    /// `s⁺_x s⁻_y + s⁻_x s⁺_y`.
    pub fn c(x: usize, y: usize) -> Self {
        Self::zero().term(1.0, vec![(x, s_plus()), (y, s_minus())]).term(1.0, vec![(x, s_minus()), (y, s_plus())])
    }

    /// `s³_x s³_y`.
    pub fn d(x: usize, y: usize) -> Self {
        Self::zero().term(1.0, vec![(x, spin(3)), (y, spin(3))])
    }

    /// `s²_x s³_y + s³_x s²_y`.
    pub fn e(x: usize, y: usize) -> Self {
        Self::zero().term(1.0, vec![(x, spin(2)), (y, spin(3))]).term(1.0, vec![(x, spin(3)), (y, spin(2))])
    }

    /// `s²_x s²_y`.
    pub fn f(x: usize, y: usize) -> Self {
        Self::zero().term(1.0, vec![(x, spin(2)), (y, spin(2))])
    }

    pub fn max_site(&self) -> Option<usize> {
        self.terms.iter().flat_map(|(_, f)| f.iter().map(|(s, _)| *s)).max()
    }

    /// Factors merged per site, left to right.
    pub(crate) fn merged_terms(&self) -> Vec<(Complex64, Vec<(usize, Op)>)> {
        self.terms
            .iter()
            .map(|(c, factors)| {
                let mut merged: Vec<(usize, Op)> = Vec::new();
                for (s, op) in factors {
                    match merged.iter_mut().find(|(t, _)| t == s) {
                        Some((_, acc)) => *acc = &*acc * op,
                        None => merged.push((*s, op.clone())),
                    }
                }
                (*c, merged)
            })
            .collect()
    }
}

/// `tr(ρ O)` for a column-major `ρ` of dimension `2^n`.
pub(crate) fn trace_product(rho: &[Complex64], n: usize, obs: &Observable) -> Complex64 {
    let dim = 1usize << n;
    let mut total = Complex64::new(0.0, 0.0);
    for (coef, factors) in obs.merged_terms() {
        let k = factors.len();
        let mut acc = Complex64::new(0.0, 0.0);
        // tr(ρO) = Σ_{i,j} ρ_ij O_ji.
        for i in 0..dim {
            for outs in 0..1usize << k {
                let mut j = i;
                let mut amp = Complex64::new(1.0, 0.0);
                for (pos, (s, op)) in factors.iter().enumerate() {
                    let b_out = (outs >> (k - 1 - pos)) & 1;
                    amp *= op.get(b_out, bit(i, n, *s));
                    j = with_bit(j, n, *s, b_out);
                }
                if amp != Complex64::new(0.0, 0.0) {
                    acc += rho[i + j * dim] * amp;
                }
            }
        }
        total += coef * acc;
    }
    total
}
