use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::geometry::Lattice;
use crate::error::{Error, Result};

/// How symmetric pair channels are reduced to a dense index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairMode {
    /// One entry per unordered pair of distinct sites.
    FullPairs,
    /// One entry per orbit of ordered pairs under lattice translations and
    /// site exchange. Requires periodic boundaries.
    Displacement,
    /// One entry per orbit under translations and the full point group.
    /// Only valid for states and dynamics that share the point-group symmetry.
    PointGroup,
}

impl PairMode {
    pub fn name(self) -> &'static str {
        match self {
            Self::FullPairs => "full_pairs",
            Self::Displacement => "displacement",
            Self::PointGroup => "point_group",
        }
    }
}

impl fmt::Display for PairMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PairMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "full_pairs" | "full" => Ok(Self::FullPairs),
            "displacement" => Ok(Self::Displacement),
            "point_group" => Ok(Self::PointGroup),
            other => Err(Error::InvalidParameter { name: "pair_mode", reason: format!("unknown mode `{other}`") }),
        }
    }
}

type Key = [i64; 5];
type PointOp = [[i64; 3]; 3];

/// Dense indexing of symmetric two-site channels and single-site channels.
#[derive(Clone, Debug)]
pub struct PairIndex {
    mode: PairMode,
    n_sites: usize,
    basis: usize,
    dim: usize,
    extent: i64,
    reps: Vec<(usize, usize)>,
    mult: Vec<f64>,
    lookup: HashMap<Key, usize>,
    ops: Vec<PointOp>,
    site_class: Vec<usize>,
    site_reps: Vec<usize>,
    site_mult: Vec<f64>,
}

fn apply_op(op: &PointOp, r: [i64; 3]) -> [i64; 3] {
    let mut out = [0; 3];
    for (i, row) in op.iter().enumerate() {
        out[i] = row[0] * r[0] + row[1] * r[1] + row[2] * r[2];
    }
    out
}

/// Integer matrices with entries in {-1, 0, 1} mapping the neighbour-offset set onto itself.
fn point_group(lattice: &Lattice) -> Vec<PointOp> {
    let d = lattice.dim();
    let mut offsets: Vec<[i64; 3]> = Vec::new();
    for h in lattice.kind().half_offsets() {
        offsets.push(*h);
        offsets.push([-h[0], -h[1], -h[2]]);
    }
    offsets.sort_unstable();
    let entries = d * d;
    let mut ops = Vec::new();
    for code in 0..3usize.pow(entries as u32) {
        let mut op = [[0i64; 3]; 3];
        let mut c = code;
        for i in 0..d {
            for j in 0..d {
                op[i][j] = (c % 3) as i64 - 1;
                c /= 3;
            }
        }
        let mut image: Vec<[i64; 3]> = offsets.iter().map(|&o| apply_op(&op, o)).collect();
        image.sort_unstable();
        if image == offsets {
            ops.push(op);
        }
    }
    ops
}

impl PairIndex {
    pub fn new(lattice: &Lattice, mode: PairMode) -> Result<Self> {
        let n = lattice.n_sites();
        let basis = lattice.basis();
        let mut index = Self {
            mode,
            n_sites: n,
            basis,
            dim: lattice.dim(),
            extent: lattice.extent() as i64,
            reps: Vec::new(),
            mult: Vec::new(),
            lookup: HashMap::new(),
            ops: Vec::new(),
            site_class: Vec::new(),
            site_reps: Vec::new(),
            site_mult: Vec::new(),
        };
        match mode {
            PairMode::FullPairs => {
                for x in 0..n {
                    for y in x + 1..n {
                        index.reps.push((x, y));
                    }
                }
                index.mult = vec![2.0; index.reps.len()];
                index.site_class = (0..n).collect();
                index.site_reps = (0..n).collect();
                index.site_mult = vec![1.0; n];
            }
            PairMode::Displacement | PairMode::PointGroup => {
                if !lattice.is_periodic() {
                    return Err(Error::UnsupportedPairMode {
                        mode: mode.name(),
                        reason: "translation reduction needs periodic boundaries".into(),
                    });
                }
                if mode == PairMode::PointGroup {
                    if !lattice.kind().is_bravais() {
                        return Err(Error::UnsupportedPairMode {
                            mode: mode.name(),
                            reason: format!("{} is not a Bravais lattice", lattice.kind()),
                        });
                    }
                    index.ops = point_group(lattice);
                }
                let cells = lattice.n_cells() as f64;
                let mut counts: Vec<f64> = Vec::new();
                for sx in 0..basis {
                    let x = lattice.site(0, sx);
                    for y in 0..n {
                        if y == x {
                            continue;
                        }
                        let key = index.key(x, y);
                        let next = index.reps.len();
                        let c = *index.lookup.entry(key).or_insert(next);
                        if c == next {
                            index.reps.push((x, y));
                            counts.push(0.0);
                        }
                        counts[c] += 1.0;
                    }
                }
                index.mult = counts.into_iter().map(|k| k * cells).collect();
                index.site_class = (0..n).map(|x| x % basis).collect();
                index.site_reps = (0..basis).collect();
                index.site_mult = vec![cells; basis];
            }
        }
        Ok(index)
    }

    fn coords(&self, x: usize) -> [i64; 3] {
        let mut cell = x / self.basis;
        let mut out = [0i64; 3];
        for k in (0..self.dim).rev() {
            out[k] = cell as i64 % self.extent;
            cell /= self.extent as usize;
        }
        out
    }

    fn wrap(&self, mut r: [i64; 3]) -> [i64; 3] {
        for v in r.iter_mut().take(self.dim) {
            *v = v.rem_euclid(self.extent);
        }
        r
    }

    fn key(&self, x: usize, y: usize) -> Key {
        let (cx, cy) = (self.coords(x), self.coords(y));
        let r = [cy[0] - cx[0], cy[1] - cx[1], cy[2] - cx[2]];
        let (sx, sy) = ((x % self.basis) as i64, (y % self.basis) as i64);
        match self.mode {
            PairMode::PointGroup => self
                .ops
                .iter()
                .map(|op| {
                    let g = self.wrap(apply_op(op, r));
                    [0, 0, g[0], g[1], g[2]]
                })
                .min()
                .expect("point group contains the identity"),
            _ => {
                let f = self.wrap(r);
                let b = self.wrap([-r[0], -r[1], -r[2]]);
                std::cmp::min([sx, sy, f[0], f[1], f[2]], [sy, sx, b[0], b[1], b[2]])
            }
        }
    }

    pub fn mode(&self) -> PairMode {
        self.mode
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    /// Number of pair classes per channel.
    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    /// Class of the pair `(x, y)`, or `None` on the diagonal.
    pub fn class_of(&self, x: usize, y: usize) -> Option<usize> {
        if x == y {
            return None;
        }
        match self.mode {
            PairMode::FullPairs => {
                let (a, b) = (x.min(y), x.max(y));
                let n = self.n_sites;
                Some(a * (2 * n - a - 1) / 2 + (b - a - 1))
            }
            _ => Some(self.lookup[&self.key(x, y)]),
        }
    }

    pub fn representative(&self, class: usize) -> (usize, usize) {
        self.reps[class]
    }

    pub fn representatives(&self) -> &[(usize, usize)] {
        &self.reps
    }

    /// Number of ordered pairs `(x, y)`, `x != y`, in each class.
    pub fn multiplicities(&self) -> &[f64] {
        &self.mult
    }

    pub fn n_site_classes(&self) -> usize {
        self.site_reps.len()
    }

    pub fn site_class(&self, x: usize) -> usize {
        self.site_class[x]
    }

    pub fn site_representative(&self, class: usize) -> usize {
        self.site_reps[class]
    }

    pub fn site_multiplicities(&self) -> &[f64] {
        &self.site_mult
    }

    /// Pulls class values back to a row-major `N × N` matrix.
    pub fn expand(&self, values: &[f64], diagonal: f64) -> Vec<f64> {
        let n = self.n_sites;
        let mut out = vec![diagonal; n * n];
        for x in 0..n {
            for y in 0..n {
                if let Some(c) = self.class_of(x, y) {
                    out[x * n + y] = values[c];
                }
            }
        }
        out
    }

    /// Reads class values off a row-major `N × N` matrix at the representatives.
    pub fn reduce(&self, matrix: &[f64]) -> Vec<f64> {
        let n = self.n_sites;
        self.reps.iter().map(|&(x, y)| matrix[x * n + y]).collect()
    }

    pub fn expand_sites(&self, values: &[f64]) -> Vec<f64> {
        self.site_class.iter().map(|&c| values[c]).collect()
    }

    pub fn reduce_sites(&self, per_site: &[f64]) -> Vec<f64> {
        self.site_reps.iter().map(|&x| per_site[x]).collect()
    }

    /// Uniform double average `(1/N²) Σ_{x,y} C_xy` including the diagonal.
    pub fn uniform_mode_weight(&self, values: &[f64], diagonal: f64) -> f64 {
        let n = self.n_sites as f64;
        let off: f64 = values.iter().zip(&self.mult).map(|(v, m)| v * m).sum();
        (n * diagonal + off) / (n * n)
    }
}

/// Free-function form of [`PairIndex::uniform_mode_weight`].
pub fn uniform_mode_weight(index: &PairIndex, values: &[f64], diagonal: f64) -> f64 {
    index.uniform_mode_weight(values, diagonal)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{BoundaryCondition, GeometryKind, LatticeGeometry};

    fn lat(kind: GeometryKind, l: usize, bc: BoundaryCondition) -> Lattice {
        Lattice::new(LatticeGeometry::new(kind, l), bc).unwrap()
    }

    #[test]
    fn multiplicities_cover_all_ordered_pairs() {
        for (kind, l) in [
            (GeometryKind::Chain, 7),
            (GeometryKind::Square, 4),
            (GeometryKind::Triangular, 3),
            (GeometryKind::Honeycomb, 3),
            (GeometryKind::Cubic, 3),
        ] {
            let g = lat(kind, l, BoundaryCondition::Periodic);
            let n = g.n_sites() as f64;
            for mode in [PairMode::FullPairs, PairMode::Displacement, PairMode::PointGroup] {
                let Ok(p) = PairIndex::new(&g, mode) else {
                    assert!(mode == PairMode::PointGroup && kind == GeometryKind::Honeycomb);
                    continue;
                };
                let total: f64 = p.multiplicities().iter().sum();
                assert_eq!(total, n * (n - 1.0), "{kind} {mode}");
                let sites: f64 = p.site_multiplicities().iter().sum();
                assert_eq!(sites, n);
            }
        }
    }

    #[test]
    fn point_group_orders() {
        for (kind, l, order) in [
            (GeometryKind::Chain, 5, 2),
            (GeometryKind::Square, 4, 8),
            (GeometryKind::Triangular, 4, 12),
            (GeometryKind::Cubic, 3, 48),
        ] {
            let g = lat(kind, l, BoundaryCondition::Periodic);
            assert_eq!(point_group(&g).len(), order, "{kind}");
        }
    }

    #[test]
    fn class_lookup_is_symmetric_and_consistent() {
        let g = lat(GeometryKind::Honeycomb, 3, BoundaryCondition::Periodic);
        let p = PairIndex::new(&g, PairMode::Displacement).unwrap();
        let n = g.n_sites();
        let mut counts = vec![0.0; p.len()];
        for x in 0..n {
            for y in 0..n {
                if x != y {
                    let c = p.class_of(x, y).unwrap();
                    assert_eq!(Some(c), p.class_of(y, x));
                    counts[c] += 1.0;
                }
            }
        }
        assert_eq!(counts, p.multiplicities());
        for (c, &(x, y)) in p.representatives().iter().enumerate() {
            assert_eq!(p.class_of(x, y), Some(c));
        }
    }

    #[test]
    fn expand_then_reduce_is_identity() {
        let g = lat(GeometryKind::Square, 4, BoundaryCondition::Periodic);
        for mode in [PairMode::FullPairs, PairMode::Displacement, PairMode::PointGroup] {
            let p = PairIndex::new(&g, mode).unwrap();
            let v: Vec<f64> = (0..p.len()).map(|i| i as f64 * 0.25 - 1.0).collect();
            assert_eq!(p.reduce(&p.expand(&v, 1.0)), v);
        }
    }

    #[test]
    fn uniform_mode_examples() {
        let g = lat(GeometryKind::Square, 4, BoundaryCondition::Periodic);
        for mode in [PairMode::FullPairs, PairMode::Displacement] {
            let p = PairIndex::new(&g, mode).unwrap();
            let zeros = vec![0.0; p.len()];
            assert!((p.uniform_mode_weight(&zeros, 1.0) - 1.0 / 16.0).abs() < 1e-15);
            let halves = vec![0.5; p.len()];
            assert!((p.uniform_mode_weight(&halves, 1.0) - 17.0 / 32.0).abs() < 1e-15);
            let ones = vec![1.0; p.len()];
            assert!((p.uniform_mode_weight(&ones, 1.0) - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn reduced_modes_need_periodic_lattices() {
        let g = lat(GeometryKind::Square, 4, BoundaryCondition::Open);
        assert!(PairIndex::new(&g, PairMode::Displacement).is_err());
        let h = lat(GeometryKind::Honeycomb, 3, BoundaryCondition::Periodic);
        assert!(PairIndex::new(&h, PairMode::PointGroup).is_err());
    }
}
