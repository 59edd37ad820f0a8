use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::CsrMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeometryKind {
    Chain,
    Square,
    Triangular,
    Honeycomb,
    Cubic,
}

impl GeometryKind {
    pub fn dim(self) -> usize {
        match self {
            Self::Chain => 1,
            Self::Square | Self::Triangular | Self::Honeycomb => 2,
            Self::Cubic => 3,
        }
    }

    /// Sites per unit cell.
    pub fn basis(self) -> usize {
        if self == Self::Honeycomb {
            2
        } else {
            1
        }
    }

    pub fn is_bravais(self) -> bool {
        self.basis() == 1
    }

    /// Half of the nearest-neighbour offsets of a Bravais lattice; the other
    /// half are their negatives.
    pub fn half_offsets(self) -> &'static [[i64; 3]] {
        match self {
            Self::Chain => &[[1, 0, 0]],
            Self::Square => &[[1, 0, 0], [0, 1, 0]],
            Self::Triangular => &[[1, 0, 0], [0, 1, 0], [1, -1, 0]],
            Self::Cubic => &[[1, 0, 0], [0, 1, 0], [0, 0, 1]],
            Self::Honeycomb => &[],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Chain => "chain",
            Self::Square => "square",
            Self::Triangular => "triangular",
            Self::Honeycomb => "honeycomb",
            Self::Cubic => "cubic",
        }
    }
}

impl fmt::Display for GeometryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GeometryKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "chain" => Self::Chain,
            "square" => Self::Square,
            "triangular" => Self::Triangular,
            "honeycomb" => Self::Honeycomb,
            "cubic" => Self::Cubic,
            other => return Err(Error::InvalidLattice(format!("unknown geometry `{other}`"))),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LatticeGeometry {
    pub kind: GeometryKind,
    /// Unit cells per direction.
    pub extent: usize,
}

impl LatticeGeometry {
    pub fn new(kind: GeometryKind, extent: usize) -> Self {
        Self { kind, extent }
    }

    pub fn n_cells(&self) -> usize {
        self.extent.pow(self.kind.dim() as u32)
    }

    pub fn n_sites(&self) -> usize {
        self.n_cells() * self.kind.basis()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryCondition {
    Periodic,
    Open,
}

impl BoundaryCondition {
    pub fn name(self) -> &'static str {
        match self {
            Self::Periodic => "periodic",
            Self::Open => "open",
        }
    }
}

impl fmt::Display for BoundaryCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BoundaryCondition {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "periodic" | "pbc" => Ok(Self::Periodic),
            "open" | "obc" => Ok(Self::Open),
            other => Err(Error::InvalidLattice(format!("unknown boundary condition `{other}`"))),
        }
    }
}

/// Serializable summary used in run manifests.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatticeDescription {
    pub geometry: GeometryKind,
    #[serde(rename = "L")]
    pub extent: usize,
    pub bc: BoundaryCondition,
    #[serde(rename = "N")]
    pub n_sites: usize,
    pub edges: Vec<[usize; 2]>,
}

/// Finite nearest-neighbour lattice. Sites are numbered `cell * basis + sublattice`
/// with cells in row-major order (last coordinate fastest).
#[derive(Clone, Debug)]
pub struct Lattice {
    geometry: LatticeGeometry,
    bc: BoundaryCondition,
    edges: Vec<(usize, usize)>,
    neighbors: Vec<Vec<usize>>,
}

impl Lattice {
    pub fn new(geometry: LatticeGeometry, bc: BoundaryCondition) -> Result<Self> {
        let kind = geometry.kind;
        let l = geometry.extent;
        if l < 2 {
            return Err(Error::InvalidLattice(format!("{kind} needs L >= 2, got {l}")));
        }
        let mut lattice = Self { geometry, bc, edges: Vec::new(), neighbors: vec![Vec::new(); geometry.n_sites()] };
        let mut seen = HashSet::new();
        for cell in 0..geometry.n_cells() {
            let c = lattice.cell_coords(cell);
            if kind == GeometryKind::Honeycomb {
                let a = lattice.site(cell, 0);
                for shift in [[0, 0, 0], [-1, 0, 0], [0, -1, 0]] {
                    if let Some(target) = lattice.shifted_cell(c, shift) {
                        lattice.push_edge(&mut seen, a, lattice.site(target, 1))?;
                    }
                }
            } else {
                for &h in kind.half_offsets() {
                    if let Some(target) = lattice.shifted_cell(c, h) {
                        lattice.push_edge(&mut seen, cell, target)?;
                    }
                }
            }
        }
        lattice.edges.sort_unstable();
        for nb in &mut lattice.neighbors {
            nb.sort_unstable();
        }
        Ok(lattice)
    }

    fn push_edge(&mut self, seen: &mut HashSet<(usize, usize)>, x: usize, y: usize) -> Result<()> {
        let g = self.geometry;
        if x == y {
            return Err(Error::InvalidLattice(format!(
                "{} with L = {} and {} boundaries wraps a bond onto site {x} itself",
                g.kind, g.extent, self.bc
            )));
        }
        let e = (x.min(y), x.max(y));
        if !seen.insert(e) {
            return Err(Error::InvalidLattice(format!(
                "{} with L = {} and {} boundaries produces the bond ({}, {}) twice",
                g.kind, g.extent, self.bc, e.0, e.1
            )));
        }
        self.edges.push(e);
        self.neighbors[x].push(y);
        self.neighbors[y].push(x);
        Ok(())
    }

    fn shifted_cell(&self, c: [i64; 3], shift: [i64; 3]) -> Option<usize> {
        let l = self.geometry.extent as i64;
        let mut out = [0i64; 3];
        for k in 0..self.dim() {
            let v = c[k] + shift[k];
            out[k] = match self.bc {
                BoundaryCondition::Periodic => v.rem_euclid(l),
                BoundaryCondition::Open if (0..l).contains(&v) => v,
                BoundaryCondition::Open => return None,
            };
        }
        Some(self.cell_index(out))
    }

    pub fn geometry(&self) -> LatticeGeometry {
        self.geometry
    }

    pub fn kind(&self) -> GeometryKind {
        self.geometry.kind
    }

    pub fn extent(&self) -> usize {
        self.geometry.extent
    }

    pub fn bc(&self) -> BoundaryCondition {
        self.bc
    }

    pub fn is_periodic(&self) -> bool {
        self.bc == BoundaryCondition::Periodic
    }

    pub fn dim(&self) -> usize {
        self.geometry.kind.dim()
    }

    pub fn n_sites(&self) -> usize {
        self.neighbors.len()
    }

    pub fn n_cells(&self) -> usize {
        self.geometry.n_cells()
    }

    pub fn basis(&self) -> usize {
        self.geometry.kind.basis()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, x: usize) -> &[usize] {
        &self.neighbors[x]
    }

    pub fn coordination(&self, x: usize) -> usize {
        self.neighbors[x].len()
    }

    pub fn adjacent(&self, x: usize, y: usize) -> bool {
        self.neighbors[x].binary_search(&y).is_ok()
    }

    pub fn cell_of(&self, x: usize) -> usize {
        x / self.basis()
    }

    pub fn sublattice(&self, x: usize) -> usize {
        x % self.basis()
    }

    pub fn site(&self, cell: usize, sublattice: usize) -> usize {
        cell * self.basis() + sublattice
    }

    pub fn cell_coords(&self, cell: usize) -> [i64; 3] {
        let l = self.geometry.extent;
        let d = self.dim();
        let mut out = [0i64; 3];
        let mut rest = cell;
        for k in (0..d).rev() {
            out[k] = (rest % l) as i64;
            rest /= l;
        }
        out
    }

    /// Row-major cell index of coordinates, wrapped into `0..L`.
    pub fn cell_index(&self, c: [i64; 3]) -> usize {
        let l = self.geometry.extent as i64;
        (0..self.dim()).fold(0usize, |acc, k| acc * l as usize + c[k].rem_euclid(l) as usize)
    }

    /// Sparse graph Laplacian with `+1` on bonds and `-n_c` on the diagonal.
    pub fn laplacian(&self) -> CsrMatrix<f64> {
        let mut t = Vec::with_capacity(2 * self.edges.len() + self.n_sites());
        for &(x, y) in &self.edges {
            t.push((x, y, 1.0));
            t.push((y, x, 1.0));
        }
        for x in 0..self.n_sites() {
            t.push((x, x, -(self.coordination(x) as f64)));
        }
        CsrMatrix::from_triplets(self.n_sites(), self.n_sites(), t)
    }

    pub fn is_connected(&self) -> bool {
        let n = self.n_sites();
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(x) = stack.pop() {
            for &y in &self.neighbors[x] {
                if !seen[y] {
                    seen[y] = true;
                    count += 1;
                    stack.push(y);
                }
            }
        }
        count == n
    }

    pub fn description(&self) -> LatticeDescription {
        LatticeDescription {
            geometry: self.kind(),
            extent: self.extent(),
            bc: self.bc,
            n_sites: self.n_sites(),
            edges: self.edges.iter().map(|&(x, y)| [x, y]).collect(),
        }
    }
}

/// Builds a lattice from a geometry and a boundary condition.
pub fn build_lattice(geometry: LatticeGeometry, bc: BoundaryCondition) -> Result<Lattice> {
    Lattice::new(geometry, bc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::eigenvalues_symmetric;

    fn lat(kind: GeometryKind, l: usize, bc: BoundaryCondition) -> Result<Lattice> {
        Lattice::new(LatticeGeometry::new(kind, l), bc)
    }

    #[test]
    fn ring_of_four() {
        let g = lat(GeometryKind::Chain, 4, BoundaryCondition::Periodic).unwrap();
        assert_eq!(g.n_sites(), 4);
        assert_eq!(g.edges().len(), 4);
        assert!((0..4).all(|x| g.coordination(x) == 2));
        let ev = eigenvalues_symmetric(&g.laplacian().to_dense()).unwrap();
        for (a, b) in ev.iter().zip([-4.0, -2.0, -2.0, 0.0]) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn open_square_counts() {
        let g = lat(GeometryKind::Square, 3, BoundaryCondition::Open).unwrap();
        assert_eq!(g.n_sites(), 9);
        assert_eq!(g.edges().len(), 12);
        assert_eq!(g.coordination(0), 2);
        assert_eq!(g.coordination(4), 4);
    }

    #[test]
    fn honeycomb_two_by_two() {
        let g = lat(GeometryKind::Honeycomb, 2, BoundaryCondition::Periodic).unwrap();
        assert_eq!(g.n_sites(), 8);
        assert_eq!(g.edges().len(), 12);
        assert!((0..8).all(|x| g.coordination(x) == 3));
        // Bipartite: every bond joins the two sublattices.
        assert!(g.edges().iter().all(|&(x, y)| g.sublattice(x) != g.sublattice(y)));
    }

    #[test]
    fn open_chain_spectrum() {
        let g = lat(GeometryKind::Chain, 3, BoundaryCondition::Open).unwrap();
        let ev = eigenvalues_symmetric(&g.laplacian().to_dense()).unwrap();
        for (a, b) in ev.iter().zip([-3.0, -1.0, 0.0]) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn periodic_coordination_numbers() {
        for (kind, l, nc) in [
            (GeometryKind::Chain, 5, 2),
            (GeometryKind::Square, 4, 4),
            (GeometryKind::Triangular, 3, 6),
            (GeometryKind::Honeycomb, 3, 3),
            (GeometryKind::Cubic, 3, 6),
        ] {
            let g = lat(kind, l, BoundaryCondition::Periodic).unwrap();
            assert!((0..g.n_sites()).all(|x| g.coordination(x) == nc), "{kind}");
            assert!(g.is_connected());
        }
    }

    #[test]
    fn doubled_bonds_are_rejected() {
        for (kind, l) in [
            (GeometryKind::Chain, 2),
            (GeometryKind::Square, 2),
            (GeometryKind::Triangular, 2),
            (GeometryKind::Cubic, 2),
        ] {
            let err = lat(kind, l, BoundaryCondition::Periodic).unwrap_err();
            assert!(matches!(err, Error::InvalidLattice(_)), "{kind}");
        }
        assert!(lat(GeometryKind::Chain, 1, BoundaryCondition::Open).is_err());
        assert!(lat(GeometryKind::Triangular, 2, BoundaryCondition::Open).is_ok());
    }

    #[test]
    fn description_roundtrips_through_json() {
        let g = lat(GeometryKind::Chain, 4, BoundaryCondition::Open).unwrap();
        let json = serde_json::to_string(&g.description()).unwrap();
        assert!(json.contains("\"L\":4") && json.contains("\"N\":4") && json.contains("\"bc\":\"open\""));
        let back: LatticeDescription = serde_json::from_str(&json).unwrap();
        assert_eq!(back, g.description());
    }
}
