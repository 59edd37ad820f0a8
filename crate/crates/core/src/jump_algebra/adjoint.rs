use num_complex::Complex64;

use super::coefficients::{JumpOperatorSpec, LocalJumpCoefficients, C3};
use super::spin::{basis_norm, pair_basis, site_basis, spin, Op, ONE, ZERO};
use crate::error::{Error, Result};

/// `L†[T, L] + [L†, T] L`; the dual dissipator is `γ/2` times this.
pub fn dissipator_bracket(l: &Op, target: &Op) -> Op {
    let ld = l.adjoint();
    &(&ld * &target.commutator(l)) + &(&ld.commutator(target) * l)
}

/// Operator supported on a bond `(x, y)`, built from at most one spin component per site.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpinTarget {
    Identity,
    X(usize),
    Y(usize),
    XY(usize, usize),
}

impl SpinTarget {
    pub fn matrix(self) -> Op {
        let (mu, nu) = match self {
            Self::Identity => (0, 0),
            Self::X(a) => (a, 0),
            Self::Y(a) => (0, a),
            Self::XY(a, b) => (a, b),
        };
        pair_basis(mu, nu)
    }
}

/// Coefficients of a two-site operator in the basis `{𝟙, s^α_x, s^α_y, s^α_x s^β_y}`.
#[derive(Clone, Debug, PartialEq)]
pub struct AdjointExpansion {
    pub identity: Complex64,
    pub site_x: C3,
    pub site_y: C3,
    pub pair: [C3; 3],
}

impl AdjointExpansion {
    pub fn from_op(op: &Op) -> Self {
        let coeff = |mu: usize, nu: usize| (&pair_basis(mu, nu) * op).trace() / (basis_norm(mu) * basis_norm(nu));
        let mut out = Self { identity: coeff(0, 0), site_x: [ZERO; 3], site_y: [ZERO; 3], pair: [[ZERO; 3]; 3] };
        for a in 0..3 {
            out.site_x[a] = coeff(a + 1, 0);
            out.site_y[a] = coeff(0, a + 1);
            for b in 0..3 {
                out.pair[a][b] = coeff(a + 1, b + 1);
            }
        }
        out
    }

    pub fn to_op(&self) -> Op {
        let mut op = pair_basis(0, 0).scale(self.identity);
        for a in 0..3 {
            op = &op + &pair_basis(a + 1, 0).scale(self.site_x[a]);
            op = &op + &pair_basis(0, a + 1).scale(self.site_y[a]);
            for b in 0..3 {
                op = &op + &pair_basis(a + 1, b + 1).scale(self.pair[a][b]);
            }
        }
        op
    }

    /// Largest two-spin coefficient magnitude.
    pub fn max_pair(&self) -> f64 {
        self.pair.iter().flatten().fold(0.0, |m, c| m.max(c.norm()))
    }

    /// A Hermitian operator has real coefficients in this Hermitian basis.
    pub fn is_hermitian(&self, tol: f64) -> bool {
        std::iter::once(&self.identity)
            .chain(&self.site_x)
            .chain(&self.site_y)
            .chain(self.pair.iter().flatten())
            .all(|c| c.im.abs() <= tol)
    }
}

/// Expands the bracket `L†[T, L] + [L†, T] L` of a bilocal jump operator.
pub fn bilocal_adjoint_action(spec: &JumpOperatorSpec, target: SpinTarget) -> Result<AdjointExpansion> {
    if !spec.is_bilocal() {
        return Err(Error::InvalidParameter { name: "spec", reason: "bilocal jump operator required".into() });
    }
    let l = spec.matrix();
    Ok(AdjointExpansion::from_op(&dissipator_bracket(&l, &target.matrix())))
}

/// Largest two-spin coefficient generated from any single-spin target; zero iff
/// the one-point hierarchy closes.
pub fn single_spin_pair_residual(spec: &JumpOperatorSpec) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for a in 1..=3 {
        for t in [SpinTarget::X(a), SpinTarget::Y(a)] {
            worst = worst.max(bilocal_adjoint_action(spec, t)?.max_pair());
        }
    }
    Ok(worst)
}

fn levi_civita(a: usize, b: usize, c: usize) -> f64 {
    match (a, b, c) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
        _ => 0.0,
    }
}

/// `(1/γ) L*_x s^α = m^α 𝟙 + Σ_β m^{αβ} s^β` in closed form.
pub fn local_adjoint_coefficients(c: &LocalJumpCoefficients) -> ([f64; 3], [[f64; 3]; 3]) {
    let l = &c.l;
    let norm2: f64 = l.iter().map(|v| v.norm_sqr()).sum();
    let mut vec = [0.0; 3];
    let mut mat = [[0.0; 3]; 3];
    for a in 0..3 {
        for b in 0..3 {
            for g in 0..3 {
                vec[a] += 0.25 * levi_civita(a, b, g) * (l[b].conj() * l[g]).im;
                mat[a][b] += c.l0 * levi_civita(a, b, g) * l[g].im;
            }
            mat[a][b] += 0.5 * ((l[a].conj() * l[b]).re - if a == b { norm2 } else { 0.0 });
        }
    }
    (vec, mat)
}

/// Same coefficients by explicit 2×2 algebra.
pub fn local_adjoint_brute(c: &LocalJumpCoefficients) -> ([Complex64; 3], [[Complex64; 3]; 3]) {
    let l = c.matrix();
    let mut vec = [ZERO; 3];
    let mut mat = [[ZERO; 3]; 3];
    for a in 0..3 {
        let x = dissipator_bracket(&l, &spin(a + 1)).scale(ONE * 0.5);
        vec[a] = (&site_basis(0) * &x).trace() / basis_norm(0);
        for b in 0..3 {
            mat[a][b] = (&site_basis(b + 1) * &x).trace() / basis_norm(b + 1);
        }
    }
    (vec, mat)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jump_algebra::builtin::{builtin, BuiltinJump};

    fn approx(a: Complex64, b: f64) -> bool {
        (a - Complex64::new(b, 0.0)).norm() < 1e-14
    }

    #[test]
    fn dephasing_and_decay_examples() {
        let deph = LocalJumpCoefficients { l0: 0.0, l: [ZERO, ZERO, ONE] };
        let (v, m) = local_adjoint_coefficients(&deph);
        assert_eq!(v, [0.0; 3]);
        assert_eq!(m, [[-0.5, 0.0, 0.0], [0.0, -0.5, 0.0], [0.0, 0.0, 0.0]]);

        let decay = LocalJumpCoefficients { l0: 0.0, l: [ONE, Complex64::new(0.0, -1.0), ZERO] };
        let (v, m) = local_adjoint_coefficients(&decay);
        assert_eq!(v, [0.0, 0.0, -0.5]);
        assert_eq!(m, [[-0.5, 0.0, 0.0], [0.0, -0.5, 0.0], [0.0, 0.0, -1.0]]);
        let (bv, bm) = local_adjoint_brute(&decay);
        for a in 0..3 {
            assert!(approx(bv[a], v[a]));
            for b in 0..3 {
                assert!(approx(bm[a][b], m[a][b]));
            }
        }

        let ident = LocalJumpCoefficients { l0: 1.0, l: [ZERO; 3] };
        assert_eq!(local_adjoint_coefficients(&ident), ([0.0; 3], [[0.0; 3]; 3]));
    }

    #[test]
    fn q_diffuses_single_spins() {
        let q = builtin(BuiltinJump::Q);
        for a in 1..=3 {
            let e = bilocal_adjoint_action(&q, SpinTarget::X(a)).unwrap();
            for b in 0..3 {
                let want = if b + 1 == a { 0.5 } else { 0.0 };
                assert!(approx(e.site_y[b], want) && approx(e.site_x[b], -want));
            }
            assert!(e.max_pair() < 1e-15);
            assert!(e.identity.norm() < 1e-15);
        }
    }

    #[test]
    fn q_annihilates_the_diagonal_channels() {
        let q = builtin(BuiltinJump::Q);
        // C_xx = 4 D_xx = 𝟙 on a single site.
        let e = bilocal_adjoint_action(&q, SpinTarget::Identity).unwrap();
        assert!(e.to_op().max_abs() < 1e-15);
    }

    #[test]
    fn expansion_roundtrip_and_hermiticity() {
        let p = builtin(BuiltinJump::PSinglet);
        for t in [SpinTarget::X(1), SpinTarget::XY(2, 3), SpinTarget::Y(3)] {
            let e = bilocal_adjoint_action(&p, t).unwrap();
            assert!(e.is_hermitian(1e-14));
            let back = AdjointExpansion::from_op(&e.to_op());
            assert_eq!(back.pair.len(), 3);
            assert!(e.to_op().max_abs_diff(&back.to_op()) < 1e-14);
        }
    }

    #[test]
    fn local_specs_are_rejected_by_bilocal_action() {
        let s = builtin(BuiltinJump::SMinus);
        assert!(bilocal_adjoint_action(&s, SpinTarget::X(1)).is_err());
    }
}
