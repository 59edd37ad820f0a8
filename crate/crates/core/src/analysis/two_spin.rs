use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oracle::DensityMatrix;

/// Closed-form state of two spins coupled by a single cooling bond in a field `η`,
/// starting from the maximally mixed state.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoSpinReference {
    pub eta: f64,
    pub tau: f64,
    pub c: [f64; 4],
    /// Density matrix in the product basis `|↑↑⟩, |↑↓⟩, |↓↑⟩, |↓↓⟩`.
    pub rho: DensityMatrix,
    /// `⟨s⁺s⁻ + s⁻s⁺⟩`.
    pub correlation_c: f64,
}

/// Populations of `|t₊⟩, |t₋⟩, |t₀⟩, |s⟩`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwoSpinDiagonal {
    pub t_plus: f64,
    pub t_minus: f64,
    pub t_zero: f64,
    pub singlet: f64,
}

pub fn two_spin_coefficients(eta: f64, tau: f64) -> [f64; 4] {
    let e2 = 4.0 * eta * eta;
    let decay = (-tau).exp();
    let (s, c) = (2.0 * eta * tau).sin_cos();
    let osc = c + 2.0 * eta * s;
    [
        5.0 * (1.0 + e2) - e2 * decay - osc,
        3.0 * (1.0 + e2) - 2.0 * (1.0 + 0.5 * e2) * decay + osc,
        1.0 + e2 - e2 * decay - osc,
        -2.0 * eta * decay + 2.0 * eta * c - s,
    ]
}

pub fn two_spin_diagonal(eta: f64, tau: f64) -> TwoSpinDiagonal {
    let [c1, c2, _, _] = two_spin_coefficients(eta, tau);
    let d = 1.0 + 4.0 * eta * eta;
    TwoSpinDiagonal {
        t_plus: c1 / (16.0 * d),
        t_minus: c1 / (16.0 * d),
        t_zero: c2 / (8.0 * d),
        singlet: 0.25 * (-tau).exp(),
    }
}

pub fn two_spin_reference(eta: f64, tau: f64) -> Result<TwoSpinReference> {
    if !(eta.is_finite() && tau.is_finite() && tau >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "tau",
            reason: format!("need finite eta and tau >= 0, got {eta}, {tau}"),
        });
    }
    let c = two_spin_coefficients(eta, tau);
    let d = 1.0 + 4.0 * eta * eta;
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let z = Complex64::new(0.0, 0.0);
    let re = |v: f64| Complex64::new(v, 0.0);
    let t_plus = [re(1.0), z, z, z];
    let t_minus = [z, z, z, re(1.0)];
    let t_zero = [z, re(r), re(r), z];
    let singlet = [z, re(r), re(-r), z];

    let mut rho = [[z; 4]; 4];
    let mut add = |w: Complex64, ket: &[Complex64; 4], bra: &[Complex64; 4]| {
        for i in 0..4 {
            for j in 0..4 {
                rho[i][j] += w * ket[i] * bra[j].conj();
            }
        }
    };
    add(re(0.25 * (-tau).exp()), &singlet, &singlet);
    add(re(c[0] / (16.0 * d)), &t_plus, &t_plus);
    add(re(c[0] / (16.0 * d)), &t_minus, &t_minus);
    add(re(c[1] / (8.0 * d)), &t_zero, &t_zero);
    add(re(c[2] / (16.0 * d)), &t_plus, &t_minus);
    add(re(c[2] / (16.0 * d)), &t_minus, &t_plus);
    let coh = Complex64::new(0.0, c[3] / (8.0 * std::f64::consts::SQRT_2 * d));
    add(coh, &t_plus, &t_zero);
    add(coh, &t_minus, &t_zero);
    add(-coh, &t_zero, &t_plus);
    add(-coh, &t_zero, &t_minus);

    let data = (0..16).map(|k| rho[k % 4][k / 4]).collect();
    let diag = two_spin_diagonal(eta, tau);
    Ok(TwoSpinReference {
        eta,
        tau,
        c,
        rho: DensityMatrix::from_column_major(2, data)?,
        correlation_c: diag.t_zero - diag.singlet,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::StateTolerance;

    #[test]
    fn zero_field_maps_singlet_to_triplet() {
        for tau in [0.0, 0.7, 5.0] {
            let d = two_spin_diagonal(0.0, tau);
            let e = (-tau).exp();
            assert!((d.t_plus - 0.25).abs() < 1e-15 && (d.t_minus - 0.25).abs() < 1e-15);
            assert!((d.t_zero - (2.0 - e) / 4.0).abs() < 1e-15);
            assert!((d.singlet - e / 4.0).abs() < 1e-15);
        }
    }

    #[test]
    fn starts_maximally_mixed_and_stays_physical() {
        let r0 = two_spin_reference(0.8, 0.0).unwrap();
        assert!(r0.rho.max_abs_diff(&DensityMatrix::maximally_mixed(2)) < 1e-15);
        for eta in [0.0, 0.1, 1.0, 10.0] {
            for tau in [0.3, 2.0, 17.0] {
                two_spin_reference(eta, tau).unwrap().rho.check(&StateTolerance::default()).unwrap();
            }
        }
    }
}
