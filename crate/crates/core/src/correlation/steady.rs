use faer::Mat;

use super::generator::Generator;
use super::state::{CorrelationState, Scenario};
use crate::error::{Error, Result};
use crate::linalg::{dot, max_abs, solve_dense};

/// Largest bordered system solved densely.
pub const STEADY_DENSE_MAX: usize = 6000;

/// Fixed point `M v = −b` reached from `init`.
///
/// Conserved sums take their values from `init`; when the generator has none the
/// result is independent of it. A nonzero field produces a limit cycle instead.
pub fn steady_state(g: &Generator, init: &CorrelationState) -> Result<CorrelationState> {
    if let Scenario::Field { eta } = g.scenario() {
        if eta != 0.0 {
            return Err(Error::LimitCycle);
        }
    }
    g.check_state(init)?;
    let n = g.dim();
    let conserved = g.conserved();
    let total = n + conserved.len();
    if total > STEADY_DENSE_MAX {
        return Err(Error::CapExceeded(format!("steady-state system of size {total} exceeds {STEADY_DENSE_MAX}")));
    }
    let mut a = Mat::<f64>::zeros(total, total);
    for (i, j, v) in g.matrix().triplets() {
        a[(i, j)] = v;
    }
    let mut rhs: Vec<f64> = g.drive().iter().map(|b| -b).collect();
    for (k, q) in conserved.iter().enumerate() {
        for (i, &w) in q.weights.iter().enumerate() {
            a[(n + k, i)] = w;
            a[(i, n + k)] = w;
        }
        rhs.push(dot(&q.weights, &init.values));
    }
    let sol = solve_dense(&a, &rhs)?;
    let values = sol[..n].to_vec();
    let residual = max_abs(&g.rate(&values));
    let scale = max_abs(g.drive()).max(1.0);
    if !(residual <= 1e-10 * scale) {
        return Err(Error::NoConvergence { solver: "steady state", detail: format!("residual {residual:e}") });
    }
    // Multipliers vanish when the fixed point is consistent with the constraints.
    let multiplier = max_abs(&sol[n..]);
    if !(multiplier <= 1e-8) {
        return Err(Error::InvariantViolation(format!("conserved-sum multiplier {multiplier:e} is nonzero")));
    }
    Ok(CorrelationState { scenario: g.scenario(), tau: f64::INFINITY, layout: g.layout().clone(), values })
}
