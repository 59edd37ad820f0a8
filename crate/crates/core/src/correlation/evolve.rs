use faer::Mat;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::generator::Generator;
use super::state::{ChannelLayout, CorrelationState, Scenario};
use crate::error::{Error, Result};
use crate::linalg::expm::expm;
use crate::linalg::expmv::Expmv;
use crate::linalg::{dense_matvec, CsrMatrix};

/// Largest augmented dimension propagated with dense methods.
pub const DENSE_PROPAGATION_MAX: usize = 2500;
/// Agreement required between the spectral propagator and a Taylor reference.
const EIGEN_VALIDATION_TOL: f64 = 1e-13;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PropagationMethod {
    /// Spectral when it validates, otherwise dense exponential, Krylov above the dense limit.
    #[default]
    Auto,
    Eigen,
    Expm,
    Taylor,
}

#[derive(Clone, Debug)]
enum Kernel {
    /// `v(τ) = Re Σ_j modes_j e^{λ_j τ}`.
    Eigen {
        values: Vec<Complex64>,
        modes: Mat<Complex64>,
    },
    Expm {
        a: Mat<f64>,
    },
    Taylor,
}

/// Solution operator for one generator and one initial state.
///
/// The drive is folded into an extra constant component so that
/// `(v, 1)(τ) = exp(τ A) (v₀, 1)` with `A = [[M, b], [0, 0]]`.
#[derive(Clone, Debug)]
pub struct Propagator {
    scenario: Scenario,
    layout: ChannelLayout,
    augmented: CsrMatrix<f64>,
    v0: Vec<f64>,
    kernel: Kernel,
}

fn augmented_matrix(g: &Generator) -> CsrMatrix<f64> {
    let n = g.dim();
    let mut trip: Vec<_> = g.matrix().triplets().collect();
    trip.extend(g.drive().iter().enumerate().filter(|(_, b)| **b != 0.0).map(|(i, &b)| (i, n, b)));
    CsrMatrix::from_triplets(n + 1, n + 1, trip)
}

fn check_times(times: &[f64]) -> Result<()> {
    if times.iter().any(|t| !t.is_finite()) {
        return Err(Error::NonFinite("times"));
    }
    if times.first().is_some_and(|&t| t < 0.0) || times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidParameter { name: "times", reason: "must be ascending and nonnegative".into() });
    }
    Ok(())
}

/// Relative max-norm difference; infinite when either side is not finite.
fn rel_diff(a: &[f64], b: &[f64]) -> f64 {
    if a.iter().chain(b).any(|v| !v.is_finite()) {
        return f64::INFINITY;
    }
    let scale = b.iter().fold(1.0f64, |m, x| m.max(x.abs()));
    a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs())) / scale
}

impl Propagator {
    pub fn new(g: &Generator, init: &CorrelationState) -> Result<Self> {
        Self::with_method(g, init, PropagationMethod::Auto)
    }

    pub fn with_method(g: &Generator, init: &CorrelationState, method: PropagationMethod) -> Result<Self> {
        g.check_state(init)?;
        let mut v0 = init.values.clone();
        v0.push(1.0);
        let augmented = augmented_matrix(g);
        let mut p = Self { scenario: g.scenario(), layout: g.layout().clone(), augmented, v0, kernel: Kernel::Taylor };
        let dense_ok = p.v0.len() <= DENSE_PROPAGATION_MAX;
        p.kernel = match method {
            PropagationMethod::Taylor => Kernel::Taylor,
            PropagationMethod::Expm => Kernel::Expm { a: p.augmented.to_dense() },
            PropagationMethod::Eigen => p.eigen_kernel()?,
            PropagationMethod::Auto if !dense_ok => Kernel::Taylor,
            PropagationMethod::Auto => match p.eigen_kernel() {
                Ok(k) => k,
                Err(_) => Kernel::Expm { a: p.augmented.to_dense() },
            },
        };
        Ok(p)
    }

    fn eigen_kernel(&self) -> Result<Kernel> {
        use faer::linalg::solvers::Solve;
        let n = self.v0.len();
        let dense = self.augmented.to_dense();
        let evd = dense.eigen().map_err(|e| Error::LinearAlgebra(format!("eigendecomposition failed: {e:?}")))?;
        let vecs = evd.U();
        let values: Vec<Complex64> = (0..n).map(|j| evd.S()[j]).collect();
        let rhs = Mat::<Complex64>::from_fn(n, 1, |i, _| Complex64::new(self.v0[i], 0.0));
        let coeffs = vecs.partial_piv_lu().solve(&rhs);
        let modes = Mat::<Complex64>::from_fn(n, n, |i, j| vecs[(i, j)] * coeffs[(j, 0)]);
        let kernel = Kernel::Eigen { values, modes };
        for tau in [0.0, 1.0, 10.0] {
            let reference = self.taylor(&[tau])?.pop().expect("one time");
            let err = rel_diff(&Self::eval_eigen(&kernel, tau), &reference);
            if !(err <= EIGEN_VALIDATION_TOL) {
                return Err(Error::LinearAlgebra(format!(
                    "spectral propagator disagrees with Taylor reference by {err:e} at tau={tau}"
                )));
            }
        }
        Ok(kernel)
    }

    fn eval_eigen(kernel: &Kernel, tau: f64) -> Vec<f64> {
        let Kernel::Eigen { values, modes } = kernel else { unreachable!() };
        let phases: Vec<Complex64> = values.iter().map(|l| (l * tau).exp()).collect();
        (0..modes.nrows()).map(|i| (0..modes.ncols()).map(|j| (modes[(i, j)] * phases[j]).re).sum()).collect()
    }

    fn taylor(&self, times: &[f64]) -> Result<Vec<Vec<f64>>> {
        let a = &self.augmented;
        Expmv::default().trajectory(|x, y| a.mul_vec_into(x, y), a.norm_inf(), &self.v0, times)
    }

    pub fn method(&self) -> PropagationMethod {
        match self.kernel {
            Kernel::Eigen { .. } => PropagationMethod::Eigen,
            Kernel::Expm { .. } => PropagationMethod::Expm,
            Kernel::Taylor => PropagationMethod::Taylor,
        }
    }

    fn raw(&self, times: &[f64]) -> Result<Vec<Vec<f64>>> {
        check_times(times)?;
        let out = match &self.kernel {
            k @ Kernel::Eigen { .. } => times.iter().map(|&t| Self::eval_eigen(k, t)).collect(),
            Kernel::Expm { a } => times
                .iter()
                .map(|&t| {
                    let scaled = Mat::<f64>::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)] * t);
                    Ok(dense_matvec(&expm(&scaled)?, &self.v0))
                })
                .collect::<Result<Vec<_>>>()?,
            Kernel::Taylor => self.taylor(times)?,
        };
        Ok(out)
    }

    fn wrap(&self, tau: f64, mut aug: Vec<f64>) -> Result<CorrelationState> {
        aug.pop();
        if tau == 0.0 {
            aug.copy_from_slice(&self.v0[..self.v0.len() - 1]);
        }
        if aug.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("propagated state"));
        }
        Ok(CorrelationState { scenario: self.scenario, tau, layout: self.layout.clone(), values: aug })
    }

    pub fn states(&self, times: &[f64]) -> Result<Vec<CorrelationState>> {
        let raw = self.raw(times)?;
        times.iter().zip(raw).map(|(&t, v)| self.wrap(t, v)).collect()
    }

    pub fn state_at(&self, tau: f64) -> Result<CorrelationState> {
        self.states(&[tau]).map(|mut v| v.remove(0))
    }

    /// Values at `t0 + k·dt` for `k < count`; dense kernels take one exponential per step size.
    fn uniform_raw(&self, t0: f64, dt: f64, count: usize) -> Result<Vec<Vec<f64>>> {
        if !(t0.is_finite() && dt.is_finite() && t0 >= 0.0 && dt > 0.0) {
            return Err(Error::InvalidParameter {
                name: "grid",
                reason: format!("need t0 >= 0 and dt > 0, got {t0}, {dt}"),
            });
        }
        match &self.kernel {
            Kernel::Expm { a } => {
                let scaled = |t: f64| Mat::<f64>::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)] * t);
                let step = expm(&scaled(dt))?;
                let mut v = if t0 == 0.0 { self.v0.clone() } else { dense_matvec(&expm(&scaled(t0))?, &self.v0) };
                let mut out = Vec::with_capacity(count);
                for _ in 0..count {
                    let next = dense_matvec(&step, &v);
                    out.push(std::mem::replace(&mut v, next));
                }
                Ok(out)
            }
            _ => self.raw(&(0..count).map(|k| t0 + k as f64 * dt).collect::<Vec<_>>()),
        }
    }

    pub fn states_uniform(&self, t0: f64, dt: f64, count: usize) -> Result<Vec<CorrelationState>> {
        let raw = self.uniform_raw(t0, dt, count)?;
        raw.into_iter().enumerate().map(|(k, v)| self.wrap(t0 + k as f64 * dt, v)).collect()
    }

    /// [`Propagator::functional`] on the grid `t0 + k·dt`.
    pub fn functional_uniform(&self, weights: &[f64], t0: f64, dt: f64, count: usize) -> Result<Vec<f64>> {
        if matches!(self.kernel, Kernel::Eigen { .. }) {
            let times: Vec<f64> = (0..count).map(|k| t0 + k as f64 * dt).collect();
            return self.functional(weights, &times);
        }
        let n = self.v0.len() - 1;
        if weights.len() != n {
            return Err(Error::DimensionMismatch { expected: n, actual: weights.len() });
        }
        Ok(self
            .uniform_raw(t0, dt, count)?
            .iter()
            .map(|v| v[..n].iter().zip(weights).map(|(a, b)| a * b).sum())
            .collect())
    }

    /// `w·v(τ)` at each time; linear in the number of modes per time for the spectral kernel.
    pub fn functional(&self, weights: &[f64], times: &[f64]) -> Result<Vec<f64>> {
        let n = self.v0.len() - 1;
        if weights.len() != n {
            return Err(Error::DimensionMismatch { expected: n, actual: weights.len() });
        }
        check_times(times)?;
        if let Kernel::Eigen { values, modes } = &self.kernel {
            let proj: Vec<Complex64> =
                (0..modes.ncols()).map(|j| (0..n).map(|i| modes[(i, j)] * weights[i]).sum()).collect();
            return Ok(times
                .iter()
                .map(|&t| proj.iter().zip(values).map(|(p, l)| (p * (l * t).exp()).re).sum())
                .collect());
        }
        Ok(self.raw(times)?.iter().map(|v| v[..n].iter().zip(weights).map(|(a, b)| a * b).sum()).collect())
    }
}

/// Evolves `init` under `g` to each ascending time.
pub fn evolve(g: &Generator, init: &CorrelationState, times: &[f64]) -> Result<Vec<CorrelationState>> {
    check_times(times)?;
    Propagator::new(g, init)?.states(times)
}

/// `count` geometrically spaced times from `first` to `last`, preceded by zero.
pub fn geometric_times(first: f64, last: f64, count: usize) -> Vec<f64> {
    let mut out = vec![0.0];
    if count == 1 {
        out.push(last);
    } else if count > 1 {
        let ratio = (last / first).powf(1.0 / (count - 1) as f64);
        out.extend((0..count).map(|k| if k + 1 == count { last } else { first * ratio.powi(k as i32) }));
    }
    out
}
