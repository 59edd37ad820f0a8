use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::adjoint::single_spin_pair_residual;
use super::coefficients::{
    AntisymmetricBilocalCoefficients, JumpKind, JumpOperatorSpec, SymmetricBilocalCoefficients, C3,
};
use crate::linalg::nan_max;

pub const DEFAULT_CLOSURE_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionResidual {
    pub family: String,
    pub indices: Vec<usize>,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClosureReport {
    pub residuals: Vec<ConditionResidual>,
    pub max_residual: f64,
    pub tol: f64,
    pub passed: bool,
    /// Largest two-spin coefficient of the adjoint action on single spins.
    pub brute_force_max_m2: f64,
    pub brute_force_passed: bool,
    /// Whether the coefficient conditions and the brute-force criterion agree.
    pub consistent: bool,
}

impl ClosureReport {
    fn finish(residuals: Vec<ConditionResidual>, tol: f64, spec: &JumpOperatorSpec) -> Self {
        let max_residual = residuals.iter().fold(0.0, |m: f64, r| nan_max(m, r.residual.abs()));
        let passed = max_residual < tol;
        let brute = single_spin_pair_residual(spec).expect("bilocal spec");
        let brute_force_passed = brute < tol;
        Self {
            residuals,
            max_residual,
            tol,
            passed,
            brute_force_max_m2: brute,
            brute_force_passed,
            consistent: passed == brute_force_passed,
        }
    }
}

fn eps(a: usize, b: usize, c: usize) -> f64 {
    match (a, b, c) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
        _ => 0.0,
    }
}

/// `Im(conj(u) v)`.
fn im(u: Complex64, v: Complex64) -> f64 {
    (u.conj() * v).im
}

struct Collector(Vec<ConditionResidual>);

impl Collector {
    fn push(&mut self, family: &str, indices: &[usize], residual: f64) {
        self.0.push(ConditionResidual { family: family.to_string(), indices: indices.to_vec(), residual });
    }
}

/// Evaluates the seven families of symmetric closure conditions as `lhs − rhs`.
pub fn symmetric_condition_residuals(c: &SymmetricBilocalCoefficients) -> Vec<ConditionResidual> {
    let (l0, l, a, b): (f64, &C3, &C3, &C3) = (c.l0, &c.l, &c.a, &c.b);
    let mut out = Collector(Vec::new());
    let r3 = 0..3;
    for al in r3.clone() {
        for be in r3.clone() {
            for ga in be + 1..3 {
                if al == be || al == ga {
                    continue;
                }
                let lhs = im(l[al], a[al]);
                let rhs = -0.5 * (im(l[al], a[be]) + im(l[al], a[ga]) + im(l[be], b[ga]) + im(l[ga], b[be]));
                out.push("a", &[al, be, ga], lhs - rhs);
            }
        }
    }
    for al in r3.clone() {
        for be in r3.clone() {
            let sum = |f: &dyn Fn(usize) -> f64| (0..3).map(|g| eps(al, be, g) * f(g)).sum::<f64>();
            let rhs_b = 0.25 * sum(&|g| im(l[g], a[al]) + im(l[g], a[be]) - im(l[al], b[be]) - im(l[be], b[al]));
            out.push("b", &[al, be], im(l[al], l[be]) - rhs_b);

            let rhs_c = 2.0 * sum(&|_| im(l[al], b[al]) + im(l[be], b[be]));
            out.push("c", &[al, be], im(a[al], a[be]) - rhs_c);

            let mut rhs_d = -2.0 * sum(&|g| im(l[al], b[g]));
            if al == be {
                for g in r3.clone() {
                    for d in r3.clone() {
                        rhs_d -= eps(al, g, d) * (im(l[al], a[g]) + im(l[g], b[d]));
                    }
                }
            }
            out.push("d", &[al, be], im(a[al], b[be]) - rhs_d);

            let rhs_e = sum(&|g| im(l[g], a[al]) + im(l[g], a[be]) + im(l[al], b[be]) + im(l[be], b[al]));
            out.push("e", &[al, be], im(b[al], b[be]) - rhs_e);
        }
    }
    for al in r3.clone() {
        let mut rhs_f = 0.0;
        let mut rhs_g = 0.0;
        for be in r3.clone() {
            for ga in r3.clone() {
                let e = eps(al, be, ga);
                rhs_f += -0.5 * e * im(l[be], b[be]);
                rhs_g += -0.25 * e * (im(l[al], a[be]) - im(l[be], b[ga]));
            }
        }
        out.push("f", &[al], l0 * a[al].im - rhs_f);
        out.push("g", &[al], l0 * b[al].im - rhs_g);
    }
    out.0
}

/// Evaluates `Im(l̄^α k^β) = Im(l̄^α l^β) = Im(k̄^α k^β) = 0`.
pub fn antisymmetric_condition_residuals(c: &AntisymmetricBilocalCoefficients) -> Vec<ConditionResidual> {
    let mut out = Collector(Vec::new());
    for al in 0..3 {
        for be in 0..3 {
            out.push("lk", &[al, be], im(c.l[al], c.k[be]));
            out.push("ll", &[al, be], im(c.l[al], c.l[be]));
            out.push("kk", &[al, be], im(c.k[al], c.k[be]));
        }
    }
    out.0
}

pub fn check_closure_symmetric(c: &SymmetricBilocalCoefficients, tol: f64) -> ClosureReport {
    let spec = JumpOperatorSpec { kind: JumpKind::Symmetric(*c), rate: 1.0 };
    ClosureReport::finish(symmetric_condition_residuals(c), tol, &spec)
}

pub fn check_closure_antisymmetric(c: &AntisymmetricBilocalCoefficients, tol: f64) -> ClosureReport {
    let spec = JumpOperatorSpec { kind: JumpKind::Antisymmetric(*c), rate: 1.0 };
    ClosureReport::finish(antisymmetric_condition_residuals(c), tol, &spec)
}

/// Uniform field plus nearest-neighbour exchange `Σ J^{αβ} s^α_x s^β_y`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct GeneralHamiltonian {
    pub h: [f64; 3],
    pub j: [[f64; 3]; 3],
}

/// Uniform single-site field `Σ_x Σ_α h^α s^α_x`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LocalFieldHamiltonian {
    pub h: [f64; 3],
}

/// True when the exchange part vanishes within `tol`, so the hierarchy stays closed.
pub fn check_hamiltonian_closure(h: &GeneralHamiltonian, tol: f64) -> bool {
    h.j.iter().flatten().all(|v| v.abs() <= tol)
}

impl GeneralHamiltonian {
    pub fn local_part(&self, tol: f64) -> Option<LocalFieldHamiltonian> {
        check_hamiltonian_closure(self, tol).then_some(LocalFieldHamiltonian { h: self.h })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jump_algebra::builtin::{builtin, BuiltinJump};
    use crate::jump_algebra::spin::{I, ONE, ZERO};

    fn symmetric(spec: JumpOperatorSpec) -> SymmetricBilocalCoefficients {
        match spec.kind {
            JumpKind::Symmetric(c) => c,
            _ => unreachable!(),
        }
    }

    #[test]
    fn projectors_and_q_close() {
        for b in [BuiltinJump::PSinglet, BuiltinJump::PTriplet] {
            let r = check_closure_symmetric(&symmetric(builtin(b)), DEFAULT_CLOSURE_TOL);
            assert!(r.passed && r.brute_force_passed && r.consistent, "{b}");
        }
        let JumpKind::Antisymmetric(q) = builtin(BuiltinJump::Q).kind else { unreachable!() };
        let r = check_closure_antisymmetric(&q, DEFAULT_CLOSURE_TOL);
        assert!(r.passed && r.consistent);
        // Unphased Q coefficients still satisfy the conditions.
        let raw = AntisymmetricBilocalCoefficients { l: [ZERO, ZERO, -I * 0.5], k: [ZERO, ZERO, I] };
        assert!(check_closure_antisymmetric(&raw, DEFAULT_CLOSURE_TOL).passed);
    }

    #[test]
    fn imaginary_field_term_breaks_closure() {
        let c = SymmetricBilocalCoefficients { l0: 0.0, l: [I, ZERO, ZERO], a: [ONE, ZERO, ZERO], b: [ZERO; 3] };
        let res = symmetric_condition_residuals(&c);
        let first = res.iter().find(|r| r.family == "a" && r.indices[0] == 0).unwrap();
        assert!((first.residual + 1.0).abs() < 1e-15);
        let r = check_closure_symmetric(&c, DEFAULT_CLOSURE_TOL);
        assert!(!r.passed && !r.brute_force_passed && r.consistent);
    }

    #[test]
    fn complex_antisymmetric_pair_fails() {
        let c = AntisymmetricBilocalCoefficients { l: [ONE, I, ZERO], k: [ZERO; 3] };
        let r = check_closure_antisymmetric(&c, DEFAULT_CLOSURE_TOL);
        assert!(!r.passed && r.consistent);
        assert!((r.max_residual - 1.0).abs() < 1e-15);
    }

    #[test]
    fn hamiltonian_closure() {
        let field = GeneralHamiltonian { h: [0.0, 0.0, 1.0], j: [[0.0; 3]; 3] };
        assert!(check_hamiltonian_closure(&field, 1e-12));
        let mut xx = GeneralHamiltonian::default();
        xx.j[0][0] = 1.0;
        assert!(!check_hamiltonian_closure(&xx, 1e-12));
        let tiny = GeneralHamiltonian { h: [1.0; 3], j: [[1e-18; 3]; 3] };
        assert!(check_hamiltonian_closure(&tiny, 1e-12));
        assert!(tiny.local_part(1e-12).is_some());
    }
}
