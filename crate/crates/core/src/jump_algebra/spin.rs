use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub(crate) const I: Complex64 = Complex64::new(0.0, 1.0);

/// Small dense complex operator, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Op {
    n: usize,
    data: Vec<Complex64>,
}

impl Op {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![ZERO; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = ONE;
        }
        m
    }

    pub fn from_rows(rows: &[&[Complex64]]) -> Self {
        let n = rows.len();
        let mut m = Self::zeros(n);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), n);
            m.data[i * n..(i + 1) * n].copy_from_slice(r);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.n + j] = v;
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self { n: self.n, data: self.data.iter().map(|v| v * c).collect() }
    }

    pub fn adjoint(&self) -> Self {
        let n = self.n;
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.data[j * n + i] = self.data[i * n + j].conj();
            }
        }
        m
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.n).map(|i| self.data[i * self.n + i]).sum()
    }

    pub fn kron(&self, other: &Self) -> Self {
        let (a, b) = (self.n, other.n);
        let n = a * b;
        let mut m = Self::zeros(n);
        for i1 in 0..a {
            for j1 in 0..a {
                let x = self.get(i1, j1);
                if x == ZERO {
                    continue;
                }
                for i2 in 0..b {
                    for j2 in 0..b {
                        m.data[(i1 * b + i2) * n + j1 * b + j2] = x * other.get(i2, j2);
                    }
                }
            }
        }
        m
    }

    pub fn commutator(&self, other: &Self) -> Self {
        &(self * other) - &(other * self)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.norm()))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (self - other).max_abs()
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        (0..self.n).map(|i| (0..self.n).map(|j| self.get(i, j) * v[j]).sum()).collect()
    }
}

impl Add for &Op {
    type Output = Op;
    fn add(self, rhs: &Op) -> Op {
        assert_eq!(self.n, rhs.n);
        Op { n: self.n, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect() }
    }
}

impl Sub for &Op {
    type Output = Op;
    fn sub(self, rhs: &Op) -> Op {
        assert_eq!(self.n, rhs.n);
        Op { n: self.n, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect() }
    }
}

impl Mul for &Op {
    type Output = Op;
    fn mul(self, rhs: &Op) -> Op {
        assert_eq!(self.n, rhs.n);
        let n = self.n;
        let mut m = Op::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == ZERO {
                    continue;
                }
                for j in 0..n {
                    m.data[i * n + j] += a * rhs.data[k * n + j];
                }
            }
        }
        m
    }
}

/// Spin-1/2 operators in the basis (|↑⟩, |↓⟩).
pub fn spin(alpha: usize) -> Op {
    let h = Complex64::new(0.5, 0.0);
    let ih = Complex64::new(0.0, 0.5);
    match alpha {
        1 => Op::from_rows(&[&[ZERO, h], &[h, ZERO]]),
        2 => Op::from_rows(&[&[ZERO, -ih], &[ih, ZERO]]),
        3 => Op::from_rows(&[&[h, ZERO], &[ZERO, -h]]),
        _ => panic!("spin component must be 1, 2 or 3"),
    }
}

/// Raising operator `|↑⟩⟨↓|`.
pub fn s_plus() -> Op {
    Op::from_rows(&[&[ZERO, ONE], &[ZERO, ZERO]])
}

/// Lowering operator `|↓⟩⟨↑|`.
pub fn s_minus() -> Op {
    Op::from_rows(&[&[ZERO, ZERO], &[ONE, ZERO]])
}

/// Single-site basis `{𝟙, s¹, s², s³}` indexed 0..4.
pub fn site_basis(mu: usize) -> Op {
    if mu == 0 {
        Op::identity(2)
    } else {
        spin(mu)
    }
}

/// `tr(b_μ b_μ)` for the single-site basis.
pub fn basis_norm(mu: usize) -> f64 {
    if mu == 0 {
        2.0
    } else {
        0.5
    }
}

/// Two-site product `b_μ ⊗ b_ν` (first factor is site x).
pub fn pair_basis(mu: usize, nu: usize) -> Op {
    site_basis(mu).kron(&site_basis(nu))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn su2_algebra() {
        // [s¹, s²] = i s³ and cyclic.
        for (a, b, c) in [(1, 2, 3), (2, 3, 1), (3, 1, 2)] {
            let lhs = spin(a).commutator(&spin(b));
            assert!(lhs.max_abs_diff(&spin(c).scale(I)) < 1e-15);
        }
        let sp = &spin(1) + &spin(2).scale(I);
        assert!(sp.max_abs_diff(&s_plus()) < 1e-15);
    }
}
