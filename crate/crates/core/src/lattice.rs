//! Qubit connectivity: open chains and rectangular grids with row-major site
//! indexing, plus the nearest- and next-nearest-neighbour coupling sets.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LatticeKind {
    Chain,
    Grid,
}

/// Residual-coupling class of an edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EdgeKind {
    /// Manhattan distance 1.
    Nn,
    /// Diagonal neighbours on grids, distance-2 pairs on chains.
    Nnn,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub i: usize,
    pub j: usize,
    pub kind: EdgeKind,
}

/// Immutable lattice description. Sites are numbered `0..n_sites` row-major.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LatticeSpec {
    kind: LatticeKind,
    n_rows: usize,
    n_cols: usize,
}

impl LatticeSpec {
    pub fn chain(n_sites: usize) -> Result<Self> {
        if n_sites < 2 {
            return Err(Error::InvalidLattice(format!(
                "chain needs at least 2 sites, got {n_sites}"
            )));
        }
        Ok(Self {
            kind: LatticeKind::Chain,
            n_rows: 1,
            n_cols: n_sites,
        })
    }

    pub fn grid(rows: usize, cols: usize) -> Result<Self> {
        if rows < 2 || cols < 2 {
            return Err(Error::InvalidLattice(format!(
                "grid needs at least 2x2 sites, got {rows}x{cols}"
            )));
        }
        Ok(Self {
            kind: LatticeKind::Grid,
            n_rows: rows,
            n_cols: cols,
        })
    }

    pub fn kind(&self) -> LatticeKind {
        self.kind
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn n_sites(&self) -> usize {
        self.n_rows * self.n_cols
    }

    /// Row-major `(row, col)` of site `i`.
    pub fn site_coords(&self, i: usize) -> Result<(usize, usize)> {
        if i >= self.n_sites() {
            return Err(Error::SiteOutOfRange {
                index: i,
                n_sites: self.n_sites(),
            });
        }
        Ok((i / self.n_cols, i % self.n_cols))
    }

    pub fn site_index(&self, row: usize, col: usize) -> usize {
        row * self.n_cols + col
    }

    /// Edges of one kind, sorted by `(i, j)` with `i < j`.
    pub fn edges(&self, kind: EdgeKind) -> Vec<Edge> {
        let mut out = Vec::new();
        let (rows, cols) = (self.n_rows, self.n_cols);
        match (self.kind, kind) {
            (LatticeKind::Chain, EdgeKind::Nn) => {
                out.extend((0..cols - 1).map(|i| Edge { i, j: i + 1, kind }));
            }
            (LatticeKind::Chain, EdgeKind::Nnn) => {
                out.extend((0..cols.saturating_sub(2)).map(|i| Edge { i, j: i + 2, kind }));
            }
            (LatticeKind::Grid, EdgeKind::Nn) => {
                for r in 0..rows {
                    for c in 0..cols {
                        let i = self.site_index(r, c);
                        if c + 1 < cols {
                            out.push(Edge { i, j: i + 1, kind });
                        }
                        if r + 1 < rows {
                            out.push(Edge { i, j: i + cols, kind });
                        }
                    }
                }
            }
            (LatticeKind::Grid, EdgeKind::Nnn) => {
                for r in 0..rows - 1 {
                    for c in 0..cols {
                        let i = self.site_index(r, c);
                        if c > 0 {
                            out.push(Edge {
                                i,
                                j: self.site_index(r + 1, c - 1),
                                kind,
                            });
                        }
                        if c + 1 < cols {
                            out.push(Edge {
                                i,
                                j: self.site_index(r + 1, c + 1),
                                kind,
                            });
                        }
                    }
                }
            }
        }
        out.sort();
        out
    }

    /// Union of the requested edge kinds, sorted by `(i, j)`.
    pub fn edges_of(&self, kinds: &[EdgeKind]) -> Vec<Edge> {
        let mut out: Vec<Edge> = Vec::new();
        let mut seen = kinds.to_vec();
        seen.sort();
        seen.dedup();
        for k in seen {
            out.extend(self.edges(k));
        }
        out.sort_by_key(|e| (e.i, e.j, e.kind));
        out
    }
}
