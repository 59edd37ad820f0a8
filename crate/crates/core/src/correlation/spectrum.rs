use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::generator::Generator;
use super::state::Channel;
use crate::error::{Error, Result};
use crate::linalg::lanczos::Lanczos;
use crate::linalg::{eigenvalues_real, eigenvalues_symmetric, nan_max, sort_descending, CsrMatrix};

/// Largest block handled by dense diagonalization.
pub const DENSE_MAX: usize = 4000;
/// Zero modes satisfy `|Re λ| ≤ ZERO_REL_TOL · ‖M‖∞`.
pub const ZERO_REL_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumResult {
    /// Leading eigenvalues, descending real part then descending imaginary part.
    pub eigenvalues: Vec<Complex64>,
    /// `−max{Re λ : Re λ < −tol_zero}` over every computed eigenvalue.
    pub gap: f64,
    /// Eigenvalues with `|Re λ| ≤ tol_zero` among those computed.
    pub zero_modes: usize,
    pub tol_zero: f64,
    /// Solver used for each invariant channel block.
    pub blocks: Vec<BlockReport>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockReport {
    pub channels: Vec<Channel>,
    pub dim: usize,
    pub method: String,
    pub max_residual: Option<f64>,
}

/// Groups channels into strongly connected components of the coupling graph.
fn channel_blocks(g: &Generator) -> Vec<Vec<Channel>> {
    let layout = g.layout();
    let chans = &layout.channels;
    let n = chans.len();
    let pos = |i: usize| chans.iter().position(|&c| c == layout.channel_at(i)).expect("channel");
    let mut reach = vec![vec![false; n]; n];
    for (i, row) in reach.iter_mut().enumerate() {
        row[i] = true;
    }
    for (r, c, v) in g.matrix().triplets() {
        if v != 0.0 {
            reach[pos(r)][pos(c)] = true;
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if reach[i][k] && reach[k][j] {
                    reach[i][j] = true;
                }
            }
        }
    }
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for i in 0..n {
        if seen[i] {
            continue;
        }
        let comp: Vec<usize> = (0..n).filter(|&j| reach[i][j] && reach[j][i]).collect();
        comp.iter().for_each(|&j| seen[j] = true);
        out.push(comp.into_iter().map(|j| chans[j]).collect());
    }
    out
}

fn block_indices(g: &Generator, channels: &[Channel]) -> Vec<usize> {
    channels.iter().flat_map(|&ch| g.layout().range(ch).expect("channel")).collect()
}

fn submatrix(m: &CsrMatrix<f64>, idx: &[usize]) -> CsrMatrix<f64> {
    let mut local = vec![usize::MAX; m.nrows()];
    for (k, &i) in idx.iter().enumerate() {
        local[i] = k;
    }
    let mut trip = Vec::new();
    for (k, &i) in idx.iter().enumerate() {
        for (j, v) in m.row(i) {
            if local[j] != usize::MAX {
                trip.push((k, local[j], v));
            }
        }
    }
    CsrMatrix::from_triplets(idx.len(), idx.len(), trip)
}

/// `W^{1/2} M W^{-1/2}` when it is symmetric to working precision.
fn symmetrized(block: &CsrMatrix<f64>, weights: &[f64]) -> Option<CsrMatrix<f64>> {
    let s: Vec<f64> = weights.iter().map(|w| w.sqrt()).collect();
    let trip: Vec<_> = block.triplets().map(|(i, j, v)| (i, j, v * s[i] / s[j])).collect();
    let sym = CsrMatrix::from_triplets(block.nrows(), block.ncols(), trip);
    sym.is_symmetric(1e-13 * block.norm_inf().max(1.0)).then_some(sym)
}

fn block_spectrum(
    block: &CsrMatrix<f64>,
    weights: &[f64],
    single: bool,
    k: usize,
) -> Result<(Vec<Complex64>, BlockReport)> {
    let n = block.nrows();
    let report = |method: &str, res: Option<f64>| BlockReport {
        channels: Vec::new(),
        dim: n,
        method: method.into(),
        max_residual: res,
    };
    if single {
        if let Some(sym) = symmetrized(block, weights) {
            if n <= DENSE_MAX {
                let vals = eigenvalues_symmetric(&sym.to_dense())?;
                return Ok((
                    vals.into_iter().map(|v| Complex64::new(v, 0.0)).collect(),
                    report("dense_symmetric", None),
                ));
            }
            let want = (k + 2).min(n);
            let res = Lanczos::default().largest(n, want, sym.norm_inf(), |x, y| sym.mul_vec_into(x, y))?;
            let worst = res.residuals.iter().fold(0.0, |m, &r| nan_max(m, r));
            let vals = res.values.into_iter().map(|v| Complex64::new(v, 0.0)).collect();
            return Ok((vals, report("block_lanczos", Some(worst))));
        }
    }
    if n > DENSE_MAX {
        return Err(Error::CapExceeded(format!(
            "non-symmetric block of dimension {n} exceeds the dense limit {DENSE_MAX}; use a symmetry-reduced pair mode"
        )));
    }
    Ok((eigenvalues_real(&block.to_dense())?, report("dense_general", None)))
}

/// The `k` eigenvalues of `M` with largest real part and the dissipative gap.
pub fn leading_spectrum(g: &Generator, k: usize) -> Result<SpectrumResult> {
    let dim = g.dim();
    if k == 0 || k > dim {
        return Err(Error::InvalidParameter { name: "k", reason: format!("need 1 <= k <= {dim}") });
    }
    let tol_zero = ZERO_REL_TOL * g.norm_inf();
    let mult = g.multiplicities();
    let mut all = Vec::new();
    let mut blocks = Vec::new();
    for channels in channel_blocks(g) {
        let idx = block_indices(g, &channels);
        let sub = submatrix(g.matrix(), &idx);
        let w: Vec<f64> = idx.iter().map(|&i| mult[i]).collect();
        let (vals, mut report) = block_spectrum(&sub, &w, channels.len() == 1, k)?;
        report.channels = channels;
        all.extend(vals);
        blocks.push(report);
    }
    finish(all, k, tol_zero, blocks)
}

/// Every eigenvalue of `M` from one dense diagonalization.
pub fn dense_spectrum(g: &Generator) -> Result<SpectrumResult> {
    let dim = g.dim();
    if dim > DENSE_MAX {
        return Err(Error::CapExceeded(format!("dimension {dim} exceeds dense limit {DENSE_MAX}")));
    }
    let vals = eigenvalues_real(&g.matrix().to_dense())?;
    let report =
        BlockReport { channels: g.layout().channels.clone(), dim, method: "dense_general".into(), max_residual: None };
    finish(vals, dim, ZERO_REL_TOL * g.norm_inf(), vec![report])
}

fn finish(mut all: Vec<Complex64>, k: usize, tol_zero: f64, blocks: Vec<BlockReport>) -> Result<SpectrumResult> {
    sort_descending(&mut all);
    let zero_modes = all.iter().filter(|l| l.re.abs() <= tol_zero).count();
    let gap = all.iter().filter(|l| l.re < -tol_zero).map(|l| -l.re).fold(f64::INFINITY, f64::min);
    if !gap.is_finite() {
        return Err(Error::InsufficientData("no decaying eigenvalue among those computed".into()));
    }
    all.truncate(k);
    Ok(SpectrumResult { eigenvalues: all, gap, zero_modes, tol_zero, blocks })
}
