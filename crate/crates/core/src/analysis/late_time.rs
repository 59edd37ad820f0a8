use faer::Mat;
use serde::{Deserialize, Serialize};

use super::scaling::golden_min;
use crate::correlation::{CorrelationState, Generator, Propagator};
use crate::error::{Error, Result};
use crate::linalg::solve_dense;

/// Transients are discarded before `discard_gaps / Δ`.
pub const DEFAULT_DISCARD_GAPS: f64 = 25.0;
const MIN_SAMPLES: usize = 16;

/// `x(τ) ≈ mean + amplitude · cos(ω τ − phase)` at late times.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LateTimeFit {
    pub mean: f64,
    pub amplitude: f64,
    pub omega: f64,
    pub phase: f64,
    /// Root-mean-square deviation of the samples from the fitted sinusoid.
    pub residual: f64,
    pub samples: usize,
    pub t_start: f64,
}

/// Offset, cosine and sine coefficients plus residual sum of squares at frequency `w`.
fn sinusoid_lsq(t: &[f64], x: &[f64], w: f64) -> Result<([f64; 3], f64)> {
    let basis = |ti: f64| [1.0, (w * ti).cos(), (w * ti).sin()];
    let mut ata = Mat::<f64>::zeros(3, 3);
    let mut atb = vec![0.0; 3];
    for (&ti, &xi) in t.iter().zip(x) {
        let b = basis(ti);
        for i in 0..3 {
            atb[i] += b[i] * xi;
            for j in 0..3 {
                ata[(i, j)] += b[i] * b[j];
            }
        }
    }
    if w == 0.0 {
        let mean = atb[0] / t.len() as f64;
        let rss = x.iter().map(|v| (v - mean).powi(2)).sum();
        return Ok(([mean, 0.0, 0.0], rss));
    }
    let c = solve_dense(&ata, &atb)?;
    let rss = t
        .iter()
        .zip(x)
        .map(|(&ti, &xi)| {
            let b = basis(ti);
            (xi - c[0] - c[1] * b[1] - c[2] * b[2]).powi(2)
        })
        .sum();
    Ok(([c[0], c[1], c[2]], rss))
}

/// Frequency with the largest periodogram power, refined by minimizing the fit residual.
fn dominant_frequency(t: &[f64], x: &[f64]) -> Result<f64> {
    let n = t.len();
    let span = t[n - 1] - t[0];
    let mean = x.iter().sum::<f64>() / n as f64;
    let variance: f64 = x.iter().map(|v| (v - mean).powi(2)).sum();
    if variance <= f64::MIN_POSITIVE {
        return Ok(0.0);
    }
    let base = 2.0 * std::f64::consts::PI / span;
    let power = |w: f64| {
        let (mut c, mut s) = (0.0, 0.0);
        for (&ti, &xi) in t.iter().zip(x) {
            c += (xi - mean) * (w * ti).cos();
            s += (xi - mean) * (w * ti).sin();
        }
        c * c + s * s
    };
    let k_best = (1..=n / 2).max_by(|&a, &b| power(a as f64 * base).total_cmp(&power(b as f64 * base))).unwrap_or(1);
    let lo = (k_best as f64 - 1.0).max(0.25) * base;
    let hi = (k_best as f64 + 1.0) * base;
    let cost = |w: f64| sinusoid_lsq(t, x, w).map(|r| r.1).unwrap_or(f64::INFINITY);
    Ok(golden_min(cost, lo, hi, 1e-12 * hi))
}

/// Mean, amplitude, frequency and phase of `values` after discarding `τ < discard_gaps/Δ`.
pub fn late_time_fit(times: &[f64], values: &[f64], gap: f64, discard_gaps: f64) -> Result<LateTimeFit> {
    if times.len() != values.len() {
        return Err(Error::DimensionMismatch { expected: times.len(), actual: values.len() });
    }
    if !(gap.is_finite() && gap > 0.0) {
        return Err(Error::InvalidParameter { name: "gap", reason: format!("must be positive, got {gap}") });
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter { name: "times", reason: "must increase strictly".into() });
    }
    let t_start = discard_gaps / gap;
    let first = times.partition_point(|&t| t < t_start);
    let (t, x) = (&times[first..], &values[first..]);
    if t.len() < MIN_SAMPLES {
        return Err(Error::InsufficientData(format!(
            "horizon {:e} leaves {} samples beyond τ = {t_start:e}, need {MIN_SAMPLES}",
            times.last().copied().unwrap_or(0.0),
            t.len()
        )));
    }
    let omega = dominant_frequency(t, x)?;
    let ([mean, a, b], rss) = sinusoid_lsq(t, x, omega)?;
    Ok(LateTimeFit {
        mean,
        amplitude: a.hypot(b),
        omega,
        phase: b.atan2(a),
        residual: (rss / t.len() as f64).sqrt(),
        samples: t.len(),
        t_start,
    })
}

/// [`late_time_fit`] with the default transient cut.
pub fn late_time_average(times: &[f64], values: &[f64], gap: f64) -> Result<LateTimeFit> {
    late_time_fit(times, values, gap, DEFAULT_DISCARD_GAPS)
}

/// Condensate fraction sampled at `t0 + k·dt`.
pub fn condensate_trajectory(
    g: &Generator,
    init: &CorrelationState,
    t0: f64,
    dt: f64,
    count: usize,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let (w, c) = g.condensate_weights();
    let values = Propagator::new(g, init)?.functional_uniform(&w, t0, dt, count)?;
    let times = (0..count).map(|k| t0 + k as f64 * dt).collect();
    Ok((times, values.into_iter().map(|v| v + c).collect()))
}

/// Pair-correlation amplitude `g(η, N)` from the condensate oscillation amplitude.
pub fn pair_amplitude(condensate_amplitude: f64, n_sites: usize) -> f64 {
    let n = n_sites as f64;
    condensate_amplitude * n / (2.0 * (n - 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_damped_sinusoid() {
        let times: Vec<f64> = (0..4000).map(|k| k as f64 * 0.37).collect();
        let values: Vec<f64> =
            times.iter().map(|&t| 0.4 + 0.02 * (0.9 * t - 1.1).cos() + 0.3 * (-0.5 * t).exp()).collect();
        let fit = late_time_average(&times, &values, 0.5).unwrap();
        assert!((fit.mean - 0.4).abs() < 1e-12);
        assert!((fit.amplitude - 0.02).abs() < 1e-12);
        assert!((fit.omega - 0.9).abs() < 1e-10);
        assert!((fit.phase - 1.1).abs() < 1e-9);
    }

    #[test]
    fn constant_signal_has_no_amplitude() {
        let times: Vec<f64> = (0..100).map(|k| k as f64).collect();
        let fit = late_time_average(&times, &vec![0.25; 100], 1.0).unwrap();
        assert_eq!(fit.amplitude, 0.0);
        assert!((fit.mean - 0.25).abs() < 1e-15);
    }

    #[test]
    fn short_horizon_is_rejected() {
        let times: Vec<f64> = (0..100).map(|k| k as f64).collect();
        assert!(matches!(late_time_average(&times, &times, 0.2), Err(Error::InsufficientData(_))));
    }
}
