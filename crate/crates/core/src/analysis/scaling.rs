use serde::{Deserialize, Serialize};

use crate::correlation::Scenario;
use crate::error::{Error, Result};
use crate::lattice::{BoundaryCondition, GeometryKind};

/// One finite-size gap measurement.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapEntry {
    pub geometry: GeometryKind,
    pub bc: BoundaryCondition,
    pub n_sites: usize,
    pub extent: usize,
    pub gap: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapSeries {
    pub scenario: Scenario,
    pub entries: Vec<GapEntry>,
}

impl GapSeries {
    pub fn new(scenario: Scenario) -> Self {
        Self { scenario, entries: Vec::new() }
    }

    pub fn push(&mut self, entry: GapEntry) -> Result<()> {
        if !(entry.gap.is_finite() && entry.gap > 0.0) {
            return Err(Error::InvalidParameter {
                name: "gap",
                reason: format!("must be positive, got {}", entry.gap),
            });
        }
        let expected = entry.extent.pow(entry.geometry.dim() as u32) * entry.geometry.basis();
        if entry.n_sites != expected {
            return Err(Error::InvalidParameter {
                name: "n_sites",
                reason: format!(
                    "{} with L = {} has {expected} sites, got {}",
                    entry.geometry, entry.extent, entry.n_sites
                ),
            });
        }
        if let Some(last) = self.entries.last() {
            if entry.extent <= last.extent {
                return Err(Error::InvalidParameter {
                    name: "extent",
                    reason: "sizes must increase monotonically".into(),
                });
            }
        }
        self.entries.push(entry);
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScalingModel {
    /// `Δ⁻¹ = A·L^z`
    PowerLaw,
    /// `Δ⁻¹ = A·L²·ln(L/L₀)`
    PowerLog,
}

impl ScalingModel {
    pub fn name(self) -> &'static str {
        match self {
            Self::PowerLaw => "power_law",
            Self::PowerLog => "power_log",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub model: ScalingModel,
    /// Fitted `z` for the power law, fixed at 2 for the log model.
    pub z: f64,
    pub amplitude: f64,
    /// `L₀` of the log model; `None` for the power law.
    pub log_scale: Option<f64>,
    /// Root-mean-square of `ln Δ_fit − ln Δ` over the window.
    pub residual: f64,
    /// `Δ_fit/Δ − 1` per size in the window.
    pub relative_residuals: Vec<f64>,
    /// Sizes `L` used in the fit.
    pub window: Vec<usize>,
}

impl ScalingFit {
    pub fn predict_inverse_gap(&self, l: f64) -> f64 {
        match self.model {
            ScalingModel::PowerLaw => self.amplitude * l.powf(self.z),
            ScalingModel::PowerLog => self.amplitude * l * l * (l / self.log_scale.unwrap_or(1.0)).ln(),
        }
    }
}

pub const MIN_FIT_POINTS: usize = 4;

/// Largest-size entries with `L ≥ L_max/√10`.
pub fn half_decade_window(series: &GapSeries) -> Vec<GapEntry> {
    let Some(l_max) = series.entries.iter().map(|e| e.extent).max() else {
        return Vec::new();
    };
    let lo = l_max as f64 / 10f64.sqrt();
    series.entries.iter().filter(|e| e.extent as f64 >= lo).copied().collect()
}

fn line_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

fn rms(r: &[f64]) -> f64 {
    (r.iter().map(|v| v * v).sum::<f64>() / r.len() as f64).sqrt()
}

/// Least-squares fit of `ln Δ⁻¹` over the half-decade window at the largest sizes.
pub fn fit_gap_scaling(series: &GapSeries, model: ScalingModel) -> Result<ScalingFit> {
    fit_window(&half_decade_window(series), model)
}

/// Least-squares fit of `ln Δ⁻¹` over exactly the given entries.
pub fn fit_window(entries: &[GapEntry], model: ScalingModel) -> Result<ScalingFit> {
    if entries.len() < MIN_FIT_POINTS {
        return Err(Error::InsufficientData(format!(
            "{} sizes in the fit window, need at least {MIN_FIT_POINTS}",
            entries.len()
        )));
    }
    if entries.windows(2).any(|w| w[1].extent <= w[0].extent) {
        return Err(Error::InvalidParameter { name: "series", reason: "sizes must increase monotonically".into() });
    }
    let ls: Vec<f64> = entries.iter().map(|e| e.extent as f64).collect();
    let y: Vec<f64> = entries.iter().map(|e| -e.gap.ln()).collect();
    let x: Vec<f64> = ls.iter().map(|l| l.ln()).collect();
    let (z, amplitude, log_scale, resid) = match model {
        ScalingModel::PowerLaw => {
            let (z, c) = line_fit(&x, &y);
            let r: Vec<f64> = x.iter().zip(&y).map(|(xi, yi)| z * xi + c - yi).collect();
            (z, c.exp(), None, r)
        }
        ScalingModel::PowerLog => {
            let (s, c) = power_log_fit(&x, &y);
            let r: Vec<f64> = x.iter().zip(&y).map(|(xi, yi)| c + 2.0 * xi + (xi - s).ln() - yi).collect();
            (2.0, c.exp(), Some(s.exp()), r)
        }
    };
    Ok(ScalingFit {
        model,
        z,
        amplitude,
        log_scale,
        residual: rms(&resid),
        relative_residuals: resid.iter().map(|r| (-r).exp_m1()).collect(),
        window: entries.iter().map(|e| e.extent).collect(),
    })
}

/// Minimizes `Σ (c + 2x + ln(x − s) − y)²` over `c` and `s < min x`.
fn power_log_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let x_min = x.iter().cloned().fold(f64::INFINITY, f64::min);
    // `u = ln(x_min − s)` maps the admissible half-line onto the reals.
    let eval = |u: f64| {
        let s = x_min - u.exp();
        let d: Vec<f64> = x.iter().zip(y).map(|(xi, yi)| yi - 2.0 * xi - (xi - s).ln()).collect();
        let c = d.iter().sum::<f64>() / d.len() as f64;
        let cost: f64 = d.iter().map(|v| (v - c) * (v - c)).sum();
        (cost, s, c)
    };
    let grid: Vec<f64> = (0..=400).map(|k| -12.0 + 24.0 * k as f64 / 400.0).collect();
    let best = grid.iter().enumerate().min_by(|a, b| eval(*a.1).0.total_cmp(&eval(*b.1).0)).map(|(i, _)| i).unwrap();
    let lo = grid[best.saturating_sub(1)];
    let hi = grid[(best + 1).min(grid.len() - 1)];
    let u = golden_min(|u| eval(u).0, lo, hi, 1e-12);
    let (_, s, c) = eval(u);
    (s, c)
}

/// Golden-section minimization of a unimodal function on `[a, b]`.
pub fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(kind: GeometryKind, sizes: &[usize], gap: impl Fn(f64) -> f64) -> GapSeries {
        let mut s = GapSeries::new(Scenario::Pure);
        for &l in sizes {
            let n = l.pow(kind.dim() as u32) * kind.basis();
            s.push(GapEntry {
                geometry: kind,
                bc: BoundaryCondition::Periodic,
                n_sites: n,
                extent: l,
                gap: gap(l as f64),
            })
            .unwrap();
        }
        s
    }

    #[test]
    fn exact_power_law() {
        let s = series(GeometryKind::Chain, &[16, 24, 32, 48, 64, 96, 128, 192, 256], |l| l.powi(-2));
        let fit = fit_gap_scaling(&s, ScalingModel::PowerLaw).unwrap();
        assert!((fit.z - 2.0).abs() < 1e-12);
        assert!(fit.residual < 1e-13);
        assert_eq!(fit.window, vec![96, 128, 192, 256]);
    }

    #[test]
    fn exact_log_model_recovered() {
        let s = series(GeometryKind::Square, &[8, 12, 16, 24, 32, 48, 64], |l| 1.0 / (0.3 * l * l * (l / 1.7).ln()));
        let log = fit_gap_scaling(&s, ScalingModel::PowerLog).unwrap();
        assert!(log.residual < 1e-9, "{}", log.residual);
        assert!((log.log_scale.unwrap() - 1.7).abs() < 1e-6);
        assert!((log.amplitude - 0.3).abs() < 1e-7);
        let pow = fit_gap_scaling(&s, ScalingModel::PowerLaw).unwrap();
        assert!(pow.z > 2.0 && pow.residual > log.residual);
    }

    #[test]
    fn rejects_short_window_and_bad_entries() {
        let s = series(GeometryKind::Chain, &[16, 32, 64], |l| l.powi(-2));
        assert!(matches!(fit_gap_scaling(&s, ScalingModel::PowerLaw), Err(Error::InsufficientData(_))));
        let mut s = GapSeries::new(Scenario::Pure);
        let e =
            GapEntry { geometry: GeometryKind::Chain, bc: BoundaryCondition::Open, n_sites: 8, extent: 8, gap: 0.1 };
        s.push(e).unwrap();
        assert!(s.push(e).is_err());
        assert!(s.push(GapEntry { extent: 9, n_sites: 10, ..e }).is_err());
        assert!(s.push(GapEntry { extent: 9, n_sites: 9, gap: 0.0, ..e }).is_err());
    }

    #[test]
    fn golden_section_finds_parabola_vertex() {
        let x = golden_min(|x| (x - 0.3).powi(2), -2.0, 5.0, 1e-10);
        assert!((x - 0.3).abs() < 1e-9);
    }
}
