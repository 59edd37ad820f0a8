use faer::Mat;

use super::norm_one_dense;
use crate::error::{Error, Result};

const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

const THETA13: f64 = 5.371920351148152;

/// Matrix exponential by scaling and squaring with a degree-13 Padé approximant.
pub fn expm(a: &Mat<f64>) -> Result<Mat<f64>> {
    use faer::linalg::solvers::Solve;
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::DimensionMismatch { expected: n, actual: a.ncols() });
    }
    let norm = norm_one_dense(a);
    if !norm.is_finite() {
        return Err(Error::NonFinite("expm input"));
    }
    let squarings = if norm > THETA13 { (norm / THETA13).log2().ceil() as i32 } else { 0 };
    let scale = 2f64.powi(-squarings);
    let a1 = Mat::<f64>::from_fn(n, n, |i, j| a[(i, j)] * scale);
    let ident = Mat::<f64>::identity(n, n);
    let a2 = &a1 * &a1;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let b = &PADE13;

    let u_inner = &a6 * (b[13] * &a6 + b[11] * &a4 + b[9] * &a2) + b[7] * &a6 + b[5] * &a4 + b[3] * &a2 + b[1] * &ident;
    let u = &a1 * u_inner;
    let v = &a6 * (b[12] * &a6 + b[10] * &a4 + b[8] * &a2) + b[6] * &a6 + b[4] * &a4 + b[2] * &a2 + b[0] * &ident;

    let p = &v + &u;
    let q = &v - &u;
    let mut r = q.partial_piv_lu().solve(&p);
    for _ in 0..squarings {
        r = &r * &r;
    }
    if (0..n).any(|j| (0..n).any(|i| !r[(i, j)].is_finite())) {
        return Err(Error::NonFinite("expm output"));
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rotation_generator() {
        let t = 2.5;
        let a = Mat::<f64>::from_fn(2, 2, |i, j| match (i, j) {
            (0, 1) => -t,
            (1, 0) => t,
            _ => 0.0,
        });
        let e = expm(&a).unwrap();
        assert!((e[(0, 0)] - t.cos()).abs() < 1e-13);
        assert!((e[(1, 0)] - t.sin()).abs() < 1e-13);
    }

    #[test]
    fn nilpotent_and_large_norm() {
        let a = Mat::<f64>::from_fn(2, 2, |i, j| if (i, j) == (0, 1) { 3.0 } else { 0.0 });
        let e = expm(&a).unwrap();
        assert!((e[(0, 1)] - 3.0).abs() < 1e-14);
        let d = Mat::<f64>::from_fn(2, 2, |i, j| if i == j { -40.0 * (i + 1) as f64 } else { 0.0 });
        let e = expm(&d).unwrap();
        assert!((e[(0, 0)] / (-40f64).exp() - 1.0).abs() < 1e-11);
        assert!((e[(1, 1)] / (-80f64).exp() - 1.0).abs() < 1e-11);
    }
}
