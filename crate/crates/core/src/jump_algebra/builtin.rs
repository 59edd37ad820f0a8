use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::coefficients::{
    AntisymmetricBilocalCoefficients, JumpKind, JumpOperatorSpec, LocalJumpCoefficients, SymmetricBilocalCoefficients,
};
use super::spin::{s_minus, s_plus, Op, I, ONE, ZERO};
use crate::error::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BuiltinJump {
    Q,
    PSinglet,
    PTriplet,
    SPlus,
    SMinus,
}

impl BuiltinJump {
    pub const ALL: [Self; 5] = [Self::Q, Self::PSinglet, Self::PTriplet, Self::SPlus, Self::SMinus];

    pub fn name(self) -> &'static str {
        match self {
            Self::Q => "q",
            Self::PSinglet => "p_singlet",
            Self::PTriplet => "p_triplet",
            Self::SPlus => "s_plus",
            Self::SMinus => "s_minus",
        }
    }
}

impl fmt::Display for BuiltinJump {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BuiltinJump {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        Self::ALL
            .into_iter()
            .find(|b| b.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidParameter { name: "builtin", reason: format!("unknown jump operator `{s}`") })
    }
}

/// `½(s⁺_x + s⁺_y)(s⁻_x − s⁻_y)` assembled directly from ladder operators.
pub fn q_matrix() -> Op {
    let id = Op::identity(2);
    let plus = &s_plus().kron(&id) + &id.kron(&s_plus());
    let minus = &s_minus().kron(&id) - &id.kron(&s_minus());
    (&plus * &minus).scale(ONE * 0.5)
}

/// Canonical coefficients of `Q` up to the global phase `−i`.
pub fn q_coefficients() -> AntisymmetricBilocalCoefficients {
    AntisymmetricBilocalCoefficients { l: [ZERO, ZERO, Complex64::new(-0.5, 0.0)], k: [ZERO, ZERO, ONE] }
}

/// Canonical form of a built-in jump operator with unit rate.
pub fn builtin(which: BuiltinJump) -> JumpOperatorSpec {
    let kind = match which {
        BuiltinJump::Q => {
            let c = q_coefficients();
            let direct = q_matrix();
            assert!(c.matrix().scale(I).max_abs_diff(&direct) < 1e-15, "Q coefficients disagree with Q");
            assert!((&direct * &direct).max_abs() < 1e-15, "Q must square to zero");
            JumpKind::Antisymmetric(c)
        }
        BuiltinJump::PSinglet => {
            JumpKind::Symmetric(SymmetricBilocalCoefficients { l0: 0.25, l: [ZERO; 3], a: [-ONE; 3], b: [ZERO; 3] })
        }
        BuiltinJump::PTriplet => {
            JumpKind::Symmetric(SymmetricBilocalCoefficients { l0: 0.75, l: [ZERO; 3], a: [ONE; 3], b: [ZERO; 3] })
        }
        BuiltinJump::SPlus => JumpKind::Local(LocalJumpCoefficients { l0: 0.0, l: [ONE, I, ZERO] }),
        BuiltinJump::SMinus => JumpKind::Local(LocalJumpCoefficients { l0: 0.0, l: [ONE, -I, ZERO] }),
    };
    JumpOperatorSpec { kind, rate: 1.0 }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ket(v: [f64; 4]) -> Vec<Complex64> {
        v.iter().map(|&x| Complex64::new(x, 0.0)).collect()
    }

    #[test]
    fn q_maps_singlet_to_triplet_zero() {
        let q = builtin(BuiltinJump::Q).matrix();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let singlet = ket([0.0, r, -r, 0.0]);
        let t0 = ket([0.0, r, r, 0.0]);
        let image = q.apply(&singlet);
        // Proportional to t0 with unit modulus.
        let overlap: Complex64 = t0.iter().zip(&image).map(|(a, b)| a.conj() * b).sum();
        assert!((overlap.norm() - 1.0).abs() < 1e-15);
        let resid: f64 = image.iter().zip(&t0).map(|(a, b)| (a - overlap * b).norm()).sum();
        assert!(resid < 1e-15);
        assert!(q.apply(&t0).iter().all(|c| c.norm() < 1e-15));
        assert!((&q * &q).max_abs() < 1e-15);
    }

    #[test]
    fn projectors_complete() {
        let s = builtin(BuiltinJump::PSinglet).matrix();
        let t = builtin(BuiltinJump::PTriplet).matrix();
        assert!((&s + &t).max_abs_diff(&Op::identity(4)) < 1e-15);
        assert!((&s * &s).max_abs_diff(&s) < 1e-15);
    }

    #[test]
    fn ladder_builtins_match_ladder_matrices() {
        assert!(builtin(BuiltinJump::SPlus).matrix().max_abs_diff(&s_plus()) < 1e-15);
        assert!(builtin(BuiltinJump::SMinus).matrix().max_abs_diff(&s_minus()) < 1e-15);
        assert_eq!("P_SINGLET".parse::<BuiltinJump>().unwrap(), BuiltinJump::PSinglet);
    }
}
