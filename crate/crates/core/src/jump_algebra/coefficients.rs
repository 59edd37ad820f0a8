use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::spin::{spin, Op, I, ONE, ZERO};
use crate::error::{Error, Result};

pub type C3 = [Complex64; 3];

/// `L_x = l0 𝟙 + Σ_α l^α s^α_x` with real `l0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalJumpCoefficients {
    pub l0: f64,
    pub l: C3,
}

/// `L_xy = l0 𝟙 + i Σ_α l^α (s^α_x + s^α_y) + Σ_{αβ} l^{(αβ)} s^α_x s^β_y` with
/// `a^α = l^{(αα)}` and `b = (l^{(23)}, l^{(31)}, l^{(12)})`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymmetricBilocalCoefficients {
    pub l0: f64,
    pub l: C3,
    pub a: C3,
    pub b: C3,
}

/// `L_xy = i Σ_α l^α (s^α_x − s^α_y) + Σ_{αβ} l^{[αβ]} s^α_x s^β_y` with
/// `k = (l^{[23]}, l^{[31]}, l^{[12]})`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AntisymmetricBilocalCoefficients {
    pub l: C3,
    pub k: C3,
}

#[derive(Clone, Debug, PartialEq)]
pub enum JumpKind {
    Local(LocalJumpCoefficients),
    Symmetric(SymmetricBilocalCoefficients),
    Antisymmetric(AntisymmetricBilocalCoefficients),
    /// Explicit two-site matrix; accepted only by the exact solver.
    Raw(Op),
}

#[derive(Clone, Debug, PartialEq)]
pub struct JumpOperatorSpec {
    pub kind: JumpKind,
    pub rate: f64,
}

fn pair_term(alpha: usize, beta: usize) -> Op {
    spin(alpha).kron(&spin(beta))
}

/// Full symmetric coefficient matrix `l^{(αβ)}` from `a` and `b`.
fn symmetric_matrix(a: &C3, b: &C3) -> [[Complex64; 3]; 3] {
    [[a[0], b[2], b[1]], [b[2], a[1], b[0]], [b[1], b[0], a[2]]]
}

fn antisymmetric_matrix(k: &C3) -> [[Complex64; 3]; 3] {
    [[ZERO, k[2], -k[1]], [-k[2], ZERO, k[0]], [k[1], -k[0], ZERO]]
}

fn bilinear(m: &[[Complex64; 3]; 3]) -> Op {
    let mut out = Op::zeros(4);
    for (alpha, row) in m.iter().enumerate() {
        for (beta, &c) in row.iter().enumerate() {
            if c != ZERO {
                out = &out + &pair_term(alpha + 1, beta + 1).scale(c);
            }
        }
    }
    out
}

impl LocalJumpCoefficients {
    pub fn matrix(&self) -> Op {
        (0..3).fold(Op::identity(2).scale(ONE * self.l0), |acc, a| &acc + &spin(a + 1).scale(self.l[a]))
    }
}

impl SymmetricBilocalCoefficients {
    pub fn matrix(&self) -> Op {
        let id2 = Op::identity(2);
        let mut out = Op::identity(4).scale(ONE * self.l0);
        for a in 0..3 {
            let s = spin(a + 1);
            let sum = &s.kron(&id2) + &id2.kron(&s);
            out = &out + &sum.scale(I * self.l[a]);
        }
        &out + &bilinear(&symmetric_matrix(&self.a, &self.b))
    }

    fn coefficients(&self) -> Vec<Complex64> {
        let mut v = vec![ONE * self.l0];
        v.extend(self.l.iter().chain(&self.a).chain(&self.b));
        v
    }
}

impl AntisymmetricBilocalCoefficients {
    pub fn matrix(&self) -> Op {
        let id2 = Op::identity(2);
        let mut out = Op::zeros(4);
        for a in 0..3 {
            let s = spin(a + 1);
            let diff = &s.kron(&id2) - &id2.kron(&s);
            out = &out + &diff.scale(I * self.l[a]);
        }
        &out + &bilinear(&antisymmetric_matrix(&self.k))
    }

    /// Removes the free global phase by making the largest-magnitude coefficient
    /// real and positive (first one wins on ties).
    pub fn canonical(&self) -> Self {
        let all: Vec<Complex64> = self.l.iter().chain(&self.k).copied().collect();
        let mut best = ZERO;
        for c in all {
            if c.norm() > best.norm() * (1.0 + 1e-12) {
                best = c;
            }
        }
        if best == ZERO {
            return *self;
        }
        let phase = best.conj() / best.norm();
        Self { l: self.l.map(|c| c * phase), k: self.k.map(|c| c * phase) }
    }
}

impl JumpOperatorSpec {
    pub fn new(kind: JumpKind, rate: f64) -> Result<Self> {
        if !(rate.is_finite() && rate >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "rate",
                reason: format!("must be finite and >= 0, got {rate}"),
            });
        }
        if let JumpKind::Raw(m) = &kind {
            if m.dim() != 4 && m.dim() != 2 {
                return Err(Error::InvalidParameter {
                    name: "raw_matrix",
                    reason: format!("expected a 2x2 or 4x4 matrix, got {0}x{0}", m.dim()),
                });
            }
        }
        Ok(Self { kind, rate })
    }

    pub fn is_bilocal(&self) -> bool {
        match &self.kind {
            JumpKind::Local(_) => false,
            JumpKind::Raw(m) => m.dim() == 4,
            _ => true,
        }
    }

    /// Matrix of the jump operator: 2×2 for local, 4×4 for bilocal kinds.
    pub fn matrix(&self) -> Op {
        match &self.kind {
            JumpKind::Local(c) => c.matrix(),
            JumpKind::Symmetric(c) => c.matrix(),
            JumpKind::Antisymmetric(c) => c.matrix(),
            JumpKind::Raw(m) => m.clone(),
        }
    }

    pub fn all_finite(&self) -> bool {
        let ok = |v: &[Complex64]| v.iter().all(|c| c.re.is_finite() && c.im.is_finite());
        match &self.kind {
            JumpKind::Local(c) => c.l0.is_finite() && ok(&c.l),
            JumpKind::Symmetric(c) => ok(&c.coefficients()),
            JumpKind::Antisymmetric(c) => ok(&c.l) && ok(&c.k),
            JumpKind::Raw(m) => m.max_abs().is_finite(),
        }
    }
}
