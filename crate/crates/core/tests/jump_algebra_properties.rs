use num_complex::Complex64;
use proptest::prelude::*;
use spincool_core::jump_algebra::{
    bilocal_adjoint_action, builtin, check_closure_antisymmetric, check_closure_symmetric, local_adjoint_brute,
    local_adjoint_coefficients, AntisymmetricBilocalCoefficients, BuiltinJump, JumpKind, JumpOperatorSpec,
    LocalJumpCoefficients, SpinTarget, SymmetricBilocalCoefficients, C3, DEFAULT_CLOSURE_TOL,
};

fn disk() -> impl Strategy<Value = Complex64> {
    (0.0..1.0f64, 0.0..std::f64::consts::TAU).prop_map(|(r, phi)| Complex64::from_polar(r.sqrt(), phi))
}

fn c3() -> impl Strategy<Value = C3> {
    [disk(), disk(), disk()]
}

/// Mostly generic coefficients, with a share of sparse real ones that often close.
fn sparse_c3() -> impl Strategy<Value = C3> {
    prop_oneof![c3(), [-2i32..=2, -2i32..=2, -2i32..=2].prop_map(|v| v.map(|k| Complex64::new(0.5 * k as f64, 0.0)))]
}

fn symmetric() -> impl Strategy<Value = SymmetricBilocalCoefficients> {
    (-1.0..1.0f64, sparse_c3(), sparse_c3(), sparse_c3()).prop_map(|(l0, l, a, b)| SymmetricBilocalCoefficients {
        l0,
        l,
        a,
        b,
    })
}

fn antisymmetric() -> impl Strategy<Value = AntisymmetricBilocalCoefficients> {
    (sparse_c3(), sparse_c3()).prop_map(|(l, k)| AntisymmetricBilocalCoefficients { l, k })
}

fn targets() -> Vec<SpinTarget> {
    let mut t = vec![SpinTarget::Identity];
    for a in 1..=3 {
        t.extend([SpinTarget::X(a), SpinTarget::Y(a)]);
    }
    t
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn symmetric_verdict_matches_brute_force(c in symmetric()) {
        let r = check_closure_symmetric(&c, DEFAULT_CLOSURE_TOL);
        prop_assert!(r.consistent, "{:?}", r);
    }

    #[test]
    fn antisymmetric_verdict_matches_brute_force(c in antisymmetric()) {
        let r = check_closure_antisymmetric(&c, DEFAULT_CLOSURE_TOL);
        prop_assert!(r.consistent, "{:?}", r);
    }

    #[test]
    fn local_coefficients_match_matrix_expansion(l0 in -1.0..1.0f64, l in c3()) {
        let c = LocalJumpCoefficients { l0, l };
        let (vec, mat) = local_adjoint_coefficients(&c);
        let (bv, bm) = local_adjoint_brute(&c);
        for a in 0..3 {
            prop_assert!((Complex64::new(vec[a], 0.0) - bv[a]).norm() < 1e-12);
            for b in 0..3 {
                prop_assert!((Complex64::new(mat[a][b], 0.0) - bm[a][b]).norm() < 1e-12);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn dissipator_preserves_trace_and_hermiticity(c in symmetric(), d in antisymmetric()) {
        for kind in [JumpKind::Symmetric(c), JumpKind::Antisymmetric(d)] {
            let spec = JumpOperatorSpec::new(kind, 1.0).unwrap();
            prop_assert!(bilocal_adjoint_action(&spec, SpinTarget::Identity).unwrap().to_op().max_abs() < 1e-13);
            for t in targets() {
                prop_assert!(bilocal_adjoint_action(&spec, t).unwrap().is_hermitian(1e-12));
            }
        }
    }
}

#[test]
fn builtin_operators_annihilate_identity() {
    for b in BuiltinJump::ALL {
        let spec = builtin(b);
        if spec.is_bilocal() {
            assert!(bilocal_adjoint_action(&spec, SpinTarget::Identity).unwrap().to_op().max_abs() < 1e-15, "{b}");
        }
    }
}
