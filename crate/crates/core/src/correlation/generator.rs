use serde::{Deserialize, Serialize};

use super::state::{Channel, ChannelLayout, CorrelationState, Scenario};
use crate::error::{Error, Result};
use crate::lattice::{Lattice, LatticeDescription, PairIndex, PairMode};
use crate::linalg::CsrMatrix;

/// Affine map `dv/dτ = M v + b` over the off-diagonal channel values.
#[derive(Clone, Debug)]
pub struct Generator {
    scenario: Scenario,
    index: PairIndex,
    lattice: LatticeDescription,
    layout: ChannelLayout,
    m: CsrMatrix<f64>,
    b: Vec<f64>,
}

/// Linear functional `w·v` left invariant by a generator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConservedQuantity {
    pub name: String,
    pub weights: Vec<f64>,
}

struct Assembler<'a> {
    lattice: &'a Lattice,
    index: &'a PairIndex,
    layout: &'a ChannelLayout,
    triplets: Vec<(usize, usize, f64)>,
    b: Vec<f64>,
}

impl Assembler<'_> {
    /// Adds `coef · X_uv` to `row`; coincident sites contribute the fixed diagonal to the drive.
    fn pair(&mut self, row: usize, ch: Channel, u: usize, v: usize, coef: f64) {
        match self.index.class_of(u, v) {
            Some(c) => self.triplets.push((row, self.layout.offset(ch).expect("channel") + c, coef)),
            None => self.b[row] += coef * ch.diagonal(),
        }
    }

    fn site(&mut self, row: usize, u: usize, coef: f64) {
        let col = self.layout.offset(Channel::S3).expect("S3 channel") + self.index.site_class(u);
        self.triplets.push((row, col, coef));
    }

    /// `¼(Δ_x + Δ_y) X_xy`.
    fn pair_laplacian(&mut self, row: usize, ch: Channel, x: usize, y: usize) {
        let lat = self.lattice;
        for &z in lat.neighbors(x) {
            self.pair(row, ch, z, y, 0.25);
        }
        for &z in lat.neighbors(y) {
            self.pair(row, ch, x, z, 0.25);
        }
        let deg = (lat.coordination(x) + lat.coordination(y)) as f64;
        self.pair(row, ch, x, y, -0.25 * deg);
    }

    fn pair_row(&mut self, scenario: &Scenario, ch: Channel, row: usize, x: usize, y: usize) {
        self.pair_laplacian(row, ch, x, y);
        let bond = self.lattice.adjacent(x, y);
        match ch {
            Channel::C => {
                if bond {
                    self.pair(row, Channel::C, x, y, -0.5);
                    self.pair(row, Channel::D, x, y, -2.0);
                }
            }
            Channel::D => {
                if bond {
                    self.pair(row, Channel::D, x, y, 0.5);
                    self.b[row] -= 0.5 * Channel::D.diagonal();
                }
            }
            Channel::E => {
                if bond {
                    self.pair(row, Channel::E, x, y, 0.5);
                }
            }
            Channel::F => {
                if bond {
                    self.pair(row, Channel::F, x, y, 0.5);
                    self.pair(row, Channel::D, x, y, -0.5);
                    self.pair(row, Channel::C, x, y, -0.25);
                }
            }
            Channel::S3 => unreachable!("site channel"),
        }
        match *scenario {
            Scenario::Pure => {}
            Scenario::Field { eta } => {
                if eta != 0.0 {
                    match ch {
                        Channel::C => self.pair(row, Channel::E, x, y, -2.0 * eta),
                        Channel::D => self.pair(row, Channel::E, x, y, eta),
                        Channel::E => {
                            self.pair(row, Channel::F, x, y, 2.0 * eta);
                            self.pair(row, Channel::D, x, y, -2.0 * eta);
                        }
                        Channel::F => self.pair(row, Channel::E, x, y, -eta),
                        Channel::S3 => {}
                    }
                }
            }
            Scenario::Thermal { kappa_over_gamma: kappa, n_t } => {
                let k = kappa * (2.0 * n_t + 1.0);
                match ch {
                    Channel::C => self.pair(row, Channel::C, x, y, -k),
                    Channel::D => {
                        self.pair(row, Channel::D, x, y, -2.0 * k);
                        self.site(row, x, -0.5 * kappa);
                        self.site(row, y, -0.5 * kappa);
                    }
                    _ => {}
                }
            }
        }
    }

    fn site_row(&mut self, scenario: &Scenario, row: usize, x: usize) {
        let lat = self.lattice;
        for &z in lat.neighbors(x) {
            self.site(row, z, 0.25);
        }
        self.site(row, x, -0.25 * lat.coordination(x) as f64);
        if let Scenario::Thermal { kappa_over_gamma: kappa, n_t } = *scenario {
            self.site(row, x, -kappa * (2.0 * n_t + 1.0));
            self.b[row] -= 0.5 * kappa;
        }
    }
}

/// Assembles the generator of `scenario` on `lattice` with pairs reduced according to `mode`.
pub fn build_generator(lattice: &Lattice, scenario: Scenario, mode: PairMode) -> Result<Generator> {
    scenario.validate()?;
    if !lattice.is_connected() {
        return Err(Error::InvalidLattice("lattice must be connected".into()));
    }
    let index = PairIndex::new(lattice, mode)?;
    let layout = ChannelLayout::new(&scenario, &index);
    let dim = layout.dim();
    let mut asm = Assembler { lattice, index: &index, layout: &layout, triplets: Vec::new(), b: vec![0.0; dim] };
    for &ch in &layout.channels {
        let offset = layout.offset(ch).expect("channel");
        if ch.is_site() {
            for c in 0..index.n_site_classes() {
                asm.site_row(&scenario, offset + c, index.site_representative(c));
            }
        } else {
            for (c, &(x, y)) in index.representatives().iter().enumerate() {
                asm.pair_row(&scenario, ch, offset + c, x, y);
            }
        }
    }
    let Assembler { triplets, b, .. } = asm;
    let m = CsrMatrix::from_triplets(dim, dim, triplets);
    if !m.all_finite() || b.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("generator entries"));
    }
    Ok(Generator { scenario, index, lattice: lattice.description(), layout, m, b })
}

pub fn build_generator_pure(lattice: &Lattice, mode: PairMode) -> Result<Generator> {
    build_generator(lattice, Scenario::Pure, mode)
}

pub fn build_generator_field(lattice: &Lattice, eta: f64, mode: PairMode) -> Result<Generator> {
    build_generator(lattice, Scenario::Field { eta }, mode)
}

pub fn build_generator_thermal(
    lattice: &Lattice,
    kappa_over_gamma: f64,
    n_t: f64,
    mode: PairMode,
) -> Result<Generator> {
    build_generator(lattice, Scenario::Thermal { kappa_over_gamma, n_t }, mode)
}

impl Generator {
    pub fn scenario(&self) -> Scenario {
        self.scenario
    }

    pub fn index(&self) -> &PairIndex {
        &self.index
    }

    pub fn lattice(&self) -> &LatticeDescription {
        &self.lattice
    }

    pub fn layout(&self) -> &ChannelLayout {
        &self.layout
    }

    pub fn matrix(&self) -> &CsrMatrix<f64> {
        &self.m
    }

    pub fn drive(&self) -> &[f64] {
        &self.b
    }

    pub fn dim(&self) -> usize {
        self.layout.dim()
    }

    pub fn norm_inf(&self) -> f64 {
        self.m.norm_inf()
    }

    /// `M v + b`.
    pub fn rate(&self, v: &[f64]) -> Vec<f64> {
        let mut out = self.m.mul_vec(v);
        out.iter_mut().zip(&self.b).for_each(|(o, b)| *o += b);
        out
    }

    /// Weight of each flat index in sums over all ordered pairs or all sites.
    pub fn multiplicities(&self) -> Vec<f64> {
        let mut w = vec![0.0; self.dim()];
        for &ch in &self.layout.channels {
            let r = self.layout.range(ch).expect("channel");
            let src = if ch.is_site() { self.index.site_multiplicities() } else { self.index.multiplicities() };
            w[r].copy_from_slice(src);
        }
        w
    }

    fn channel_weights(&self, terms: &[(Channel, f64)]) -> Vec<f64> {
        let mult = self.multiplicities();
        let mut w = vec![0.0; self.dim()];
        for &(ch, s) in terms {
            for i in self.layout.range(ch).expect("channel") {
                w[i] += s * mult[i];
            }
        }
        w
    }

    /// Uniform sums preserved by the dynamics.
    pub fn conserved(&self) -> Vec<ConservedQuantity> {
        let q = |name: &str, terms: &[(Channel, f64)]| ConservedQuantity {
            name: name.to_string(),
            weights: self.channel_weights(terms),
        };
        match self.scenario {
            Scenario::Pure => vec![q("sum_D", &[(Channel::D, 1.0)])],
            Scenario::Field { eta: 0.0 } => vec![
                q("sum_D", &[(Channel::D, 1.0)]),
                q("sum_C_minus_4F", &[(Channel::C, 1.0), (Channel::F, -4.0)]),
                q("sum_E", &[(Channel::E, 1.0)]),
            ],
            Scenario::Field { .. } => Vec::new(),
            Scenario::Thermal { kappa_over_gamma: 0.0, .. } => {
                vec![q("sum_D", &[(Channel::D, 1.0)]), q("sum_S3", &[(Channel::S3, 1.0)])]
            }
            Scenario::Thermal { .. } => Vec::new(),
        }
    }

    pub fn check_state(&self, state: &CorrelationState) -> Result<()> {
        if state.layout != self.layout {
            return Err(Error::DimensionMismatch { expected: self.dim(), actual: state.dim() });
        }
        if state.values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("initial state"));
        }
        Ok(())
    }

    /// Zero-momentum component `(1/N²) Σ_{x,y} C_xy`.
    pub fn condensate(&self, state: &CorrelationState) -> f64 {
        self.index.uniform_mode_weight(state.channel(Channel::C).expect("C channel"), Channel::C.diagonal())
    }

    /// `(w, c)` with `condensate(v) = w·v + c`.
    pub fn condensate_weights(&self) -> (Vec<f64>, f64) {
        let n = self.index.n_sites() as f64;
        let mut w = vec![0.0; self.dim()];
        let r = self.layout.range(Channel::C).expect("C channel");
        for (wi, m) in w[r].iter_mut().zip(self.index.multiplicities()) {
            *wi = m / (n * n);
        }
        (w, Channel::C.diagonal() / n)
    }

    /// Full row-major `N × N` matrix of a pair channel, or the per-site vector of `S3`.
    pub fn expand(&self, state: &CorrelationState, ch: Channel) -> Option<Vec<f64>> {
        let vals = state.channel(ch)?;
        Some(if ch.is_site() { self.index.expand_sites(vals) } else { self.index.expand(vals, ch.diagonal()) })
    }
}
