use num_complex::Complex64;

use super::density::{DensityMatrix, StateTolerance};
use super::operators::embed;
use crate::correlation::Scenario;
use crate::error::{Error, Result};
use crate::jump_algebra::{builtin, spin, BuiltinJump, JumpOperatorSpec, LocalFieldHamiltonian, Op};
use crate::lattice::Lattice;
use crate::linalg::expmv::Expmv;
use crate::linalg::{eigenvalues_complex, sort_descending, CsrMatrix};

/// Largest system with an assembled superoperator.
pub const SUPEROPERATOR_MAX_SITES: usize = 6;
/// Largest system with a fully diagonalized superoperator.
pub const DENSE_GAP_MAX_SITES: usize = 5;
/// Largest system propagated matrix-free.
pub const MATRIX_FREE_MAX_SITES: usize = 10;
/// Largest system whose positivity is verified at every output time.
const POSITIVITY_CHECK_MAX_SITES: usize = 8;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Placement {
    PerSite,
    PerEdge,
}

#[derive(Clone, Debug)]
pub struct Process {
    pub jump: JumpOperatorSpec,
    pub placement: Placement,
}

#[derive(Clone, Debug)]
pub struct LindbladSpec {
    pub lattice: Lattice,
    pub hamiltonian: LocalFieldHamiltonian,
    pub processes: Vec<Process>,
}

impl LindbladSpec {
    pub fn new(lattice: Lattice, hamiltonian: LocalFieldHamiltonian, processes: Vec<Process>) -> Result<Self> {
        for p in &processes {
            let want = match p.placement {
                Placement::PerSite => 2,
                Placement::PerEdge => 4,
            };
            if p.jump.matrix().dim() != want {
                return Err(Error::InvalidParameter {
                    name: "placement",
                    reason: format!(
                        "jump matrix of dimension {} cannot be placed {:?}",
                        p.jump.matrix().dim(),
                        p.placement
                    ),
                });
            }
            if !p.jump.all_finite() {
                return Err(Error::NonFinite("jump operator"));
            }
        }
        if hamiltonian.h.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("hamiltonian"));
        }
        let spec = Self { lattice, hamiltonian, processes };
        spec.require(MATRIX_FREE_MAX_SITES)?;
        Ok(spec)
    }

    /// Lindbladian of one of the studied scenarios with unit cooling rate.
    pub fn for_scenario(lattice: &Lattice, scenario: Scenario) -> Result<Self> {
        scenario.validate()?;
        let mut processes = vec![Process { jump: builtin(BuiltinJump::Q), placement: Placement::PerEdge }];
        let mut h = [0.0; 3];
        match scenario {
            Scenario::Pure => {}
            Scenario::Field { eta } => h[0] = eta,
            Scenario::Thermal { kappa_over_gamma: kappa, n_t } => {
                for (which, rate) in [(BuiltinJump::SPlus, kappa * n_t), (BuiltinJump::SMinus, kappa * (n_t + 1.0))] {
                    if rate > 0.0 {
                        let mut jump = builtin(which);
                        jump.rate = rate;
                        processes.push(Process { jump, placement: Placement::PerSite });
                    }
                }
            }
        }
        Self::new(lattice.clone(), LocalFieldHamiltonian { h }, processes)
    }

    pub fn n_sites(&self) -> usize {
        self.lattice.n_sites()
    }

    fn require(&self, cap: usize) -> Result<()> {
        let n = self.n_sites();
        if n > cap {
            return Err(Error::CapExceeded(format!("{n} sites exceeds the limit of {cap} for this operation")));
        }
        Ok(())
    }

    /// Embedded jump operators with their rates.
    fn jumps(&self) -> Result<Vec<(f64, CsrMatrix<Complex64>)>> {
        let n = self.n_sites();
        let mut out = Vec::new();
        for p in &self.processes {
            if p.jump.rate == 0.0 {
                continue;
            }
            let m = p.jump.matrix();
            match p.placement {
                Placement::PerSite => {
                    for x in 0..n {
                        out.push((p.jump.rate, embed(&m, &[x], n)?));
                    }
                }
                Placement::PerEdge => {
                    for &(x, y) in self.lattice.edges() {
                        out.push((p.jump.rate, embed(&m, &[x, y], n)?));
                    }
                }
            }
        }
        Ok(out)
    }

    fn hamiltonian_matrix(&self) -> Result<CsrMatrix<Complex64>> {
        let n = self.n_sites();
        let dim = 1usize << n;
        let mut h = CsrMatrix::from_triplets(dim, dim, Vec::new());
        for (a, &coef) in self.hamiltonian.h.iter().enumerate() {
            if coef == 0.0 {
                continue;
            }
            let local: Op = spin(a + 1).scale(Complex64::new(coef, 0.0));
            for x in 0..n {
                h = h.add(&embed(&local, &[x], n)?);
            }
        }
        Ok(h)
    }
}

/// Matrix-free action `ρ ↦ Gρ + ρG† + Σ γ LρL†` with `G = −iH − ½ Σ γ L†L`.
#[derive(Clone, Debug)]
pub struct LindbladAction {
    dim: usize,
    g: CsrMatrix<Complex64>,
    g_adj: CsrMatrix<Complex64>,
    jumps: Vec<(f64, CsrMatrix<Complex64>, CsrMatrix<Complex64>)>,
    norm_bound: f64,
}

impl LindbladAction {
    pub fn new(spec: &LindbladSpec) -> Result<Self> {
        spec.require(MATRIX_FREE_MAX_SITES)?;
        let dim = 1usize << spec.n_sites();
        let mut g = spec.hamiltonian_matrix()?.scale(Complex64::new(0.0, -1.0));
        let mut jumps = Vec::new();
        let mut norm_bound = 0.0;
        for (rate, l) in spec.jumps()? {
            let ladj = l.adjoint();
            g = g.add(&ladj.matmul(&l).scale(Complex64::new(-0.5 * rate, 0.0)));
            norm_bound += rate * l.norm_inf() * l.norm_one();
            jumps.push((rate, l, ladj));
        }
        norm_bound += 2.0 * g.norm_inf().max(g.norm_one());
        Ok(Self { dim, g_adj: g.adjoint(), g, jumps, norm_bound })
    }

    pub fn dim(&self) -> usize {
        self.dim * self.dim
    }

    /// Bound on the induced ∞-norm of the superoperator.
    pub fn norm_bound(&self) -> f64 {
        self.norm_bound
    }

    /// `out += A X` for column-major `X`.
    fn left(&self, a: &CsrMatrix<Complex64>, x: &[Complex64], out: &mut [Complex64], scale: Complex64) {
        let d = self.dim;
        for c in 0..d {
            let col = &x[c * d..(c + 1) * d];
            let dst = &mut out[c * d..(c + 1) * d];
            for (r, slot) in dst.iter_mut().enumerate() {
                let mut acc = ZERO;
                for (k, v) in a.row(r) {
                    acc += v * col[k];
                }
                *slot += scale * acc;
            }
        }
    }

    /// `out += X B` for column-major `X`.
    fn right(&self, b: &CsrMatrix<Complex64>, x: &[Complex64], out: &mut [Complex64], scale: Complex64) {
        let d = self.dim;
        for k in 0..d {
            let src = &x[k * d..(k + 1) * d];
            for (c, v) in b.row(k) {
                let w = scale * v;
                let dst = &mut out[c * d..(c + 1) * d];
                for (o, s) in dst.iter_mut().zip(src) {
                    *o += w * s;
                }
            }
        }
    }

    pub fn apply(&self, x: &[Complex64], out: &mut [Complex64]) {
        out.iter_mut().for_each(|v| *v = ZERO);
        let one = Complex64::new(1.0, 0.0);
        self.left(&self.g, x, out, one);
        self.right(&self.g_adj, x, out, one);
        let mut tmp = vec![ZERO; x.len()];
        for (rate, l, ladj) in &self.jumps {
            tmp.iter_mut().for_each(|v| *v = ZERO);
            self.left(l, x, &mut tmp, one);
            self.right(ladj, &tmp, out, Complex64::new(*rate, 0.0));
        }
    }
}

/// Column-stacked superoperator `I⊗G + Ḡ⊗I + Σ γ L̄⊗L`.
pub fn build_superoperator(spec: &LindbladSpec) -> Result<CsrMatrix<Complex64>> {
    spec.require(SUPEROPERATOR_MAX_SITES)?;
    let action = LindbladAction::new(spec)?;
    let id = CsrMatrix::<Complex64>::identity(action.dim);
    let mut s = id.kron(&action.g).add(&action.g.conj().kron(&id));
    for (rate, l, _) in &action.jumps {
        s = s.add(&l.conj().kron(l).scale(Complex64::new(*rate, 0.0)));
    }
    Ok(s)
}

/// Propagates `rho0` to each ascending time and verifies the state invariants.
pub fn evolve_exact(spec: &LindbladSpec, rho0: &DensityMatrix, times: &[f64]) -> Result<Vec<DensityMatrix>> {
    let action = LindbladAction::new(spec)?;
    let n = spec.n_sites();
    if rho0.n_sites() != n {
        return Err(Error::DimensionMismatch { expected: n, actual: rho0.n_sites() });
    }
    let raw = Expmv::default().trajectory(|x, y| action.apply(x, y), action.norm_bound(), rho0.as_vec(), times)?;
    let tol = StateTolerance::default();
    raw.into_iter()
        .map(|v| {
            let rho = DensityMatrix::from_column_major(n, v)?;
            if n <= POSITIVITY_CHECK_MAX_SITES {
                rho.check(&tol)?;
            } else {
                let t = (rho.trace() - Complex64::new(1.0, 0.0)).norm();
                if !(t <= tol.trace && rho.hermiticity_error() <= tol.hermiticity) {
                    return Err(Error::InvariantViolation(format!("trace or hermiticity drift (trace error {t:e})")));
                }
            }
            Ok(rho)
        })
        .collect()
}

/// Every eigenvalue of the superoperator, descending by real part.
pub fn lindbladian_spectrum(spec: &LindbladSpec) -> Result<Vec<Complex64>> {
    spec.require(DENSE_GAP_MAX_SITES)?;
    let s = build_superoperator(spec)?;
    let mut vals = eigenvalues_complex(&s.to_dense())?;
    sort_descending(&mut vals);
    Ok(vals)
}

/// `−max{Re λ : Re λ < −tol}` with `tol = 1e−10 ‖𝓛‖∞`.
pub fn lindbladian_gap(spec: &LindbladSpec) -> Result<f64> {
    let tol = 1e-10 * build_superoperator(spec)?.norm_inf();
    let gap =
        lindbladian_spectrum(spec)?.into_iter().filter(|l| l.re < -tol).map(|l| -l.re).fold(f64::INFINITY, f64::min);
    if gap.is_finite() {
        Ok(gap)
    } else {
        Err(Error::InsufficientData("superoperator has no decaying mode".into()))
    }
}
