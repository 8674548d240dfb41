use std::io::{self, Write};
use std::sync::Arc;

use rayon::prelude::*;

use super::{FockBasis, ModelParams, SitePotential};
use crate::error::{Error, Result};
use crate::lattice::{EdgeKind, LatticeSpec};
use crate::sparse::CsrMatrix;
use crate::state::StateVector;

/// Real symmetric Hamiltonian `H / 2π` in MHz over a Fock basis.
#[derive(Debug, Clone)]
pub struct SparseHamiltonian {
    basis: Arc<FockBasis>,
    matrix: CsrMatrix,
}

impl SparseHamiltonian {
    /// Wraps an existing symmetric matrix.
    pub fn from_matrix(basis: Arc<FockBasis>, matrix: CsrMatrix) -> Result<Self> {
        let dim = basis.dimension();
        if matrix.n_rows() != dim || matrix.n_cols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: matrix.n_rows(),
            });
        }
        if matrix.max_asymmetry() != 0.0 {
            return Err(Error::InvalidParams("Hamiltonian matrix is not symmetric".into()));
        }
        Ok(Self { basis, matrix })
    }

    pub fn zero(basis: Arc<FockBasis>) -> Self {
        let matrix = CsrMatrix::zeros(basis.dimension());
        Self { basis, matrix }
    }

    pub fn basis(&self) -> &Arc<FockBasis> {
        &self.basis
    }

    pub fn matrix(&self) -> &CsrMatrix {
        &self.matrix
    }

    pub fn dimension(&self) -> usize {
        self.basis.dimension()
    }

    /// Diagonal part: detuning plus anharmonicity energy of each basis state.
    pub fn diagonal(&self) -> Vec<f64> {
        self.matrix.diagonal()
    }

    /// Writes `row col value` lines, 0-indexed, after a `%` size header.
    pub fn write_triplets<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(
            out,
            "% {} {} {}",
            self.matrix.n_rows(),
            self.matrix.n_cols(),
            self.matrix.nnz()
        )?;
        for i in 0..self.matrix.n_rows() {
            for (j, v) in self.matrix.row(i) {
                writeln!(out, "{i} {j} {v:e}")?;
            }
        }
        Ok(())
    }
}

/// Assembles the Bose-Hubbard Hamiltonian in the rotating frame:
/// `Σ δ_i n_i + Σ (V/2) n_i (n_i − 1) + h Σ_edges (a_i† a_j + a_i a_j†)`.
pub fn build_hamiltonian(
    params: &ModelParams,
    lattice: &LatticeSpec,
    potential: &SitePotential,
    basis: &Arc<FockBasis>,
    edge_kinds: &[EdgeKind],
) -> Result<SparseHamiltonian> {
    params.validate()?;
    let n_sites = lattice.n_sites();
    if potential.len() != n_sites {
        return Err(Error::DimensionMismatch {
            expected: n_sites,
            actual: potential.len(),
        });
    }
    if basis.n_sites() != n_sites {
        return Err(Error::DimensionMismatch {
            expected: n_sites,
            actual: basis.n_sites(),
        });
    }
    if basis.local_dim() != params.local_dim {
        return Err(Error::BasisMismatch(format!(
            "basis local dimension {} differs from model {}",
            basis.local_dim(),
            params.local_dim
        )));
    }

    let edges = lattice.edges_of(edge_kinds);
    let detuning = potential.values();
    let half_v = params.anharmonicity / 2.0;
    let h = params.h;
    let top = basis.local_dim() - 1;

    let rows: Vec<Vec<(usize, f64)>> = (0..basis.dimension())
        .into_par_iter()
        .map(|k| {
            let code = basis.code(k);
            let occ: Vec<usize> = (0..n_sites).map(|s| basis.occupation(code, s)).collect();
            let mut row = Vec::with_capacity(1 + 2 * edges.len());
            let diag: f64 = occ
                .iter()
                .zip(detuning)
                .map(|(&n, &d)| {
                    let n = n as f64;
                    d * n + half_v * n * (n - 1.0)
                })
                .sum();
            row.push((k, diag));
            if h != 0.0 {
                for e in &edges {
                    // a_from moves one excitation onto `to`.
                    for (from, to) in [(e.i, e.j), (e.j, e.i)] {
                        let (nf, nt) = (occ[from], occ[to]);
                        if nf == 0 || nt == top {
                            continue;
                        }
                        let target = code - basis.place(from) + basis.place(to);
                        let col = basis
                            .rank_code(target)
                            .expect("hopping conserves the excitation number");
                        row.push((col, h * ((nf * (nt + 1)) as f64).sqrt()));
                    }
                }
            }
            row
        })
        .collect();

    let matrix = CsrMatrix::from_rows(basis.dimension(), rows)?;
    Ok(SparseHamiltonian {
        basis: Arc::clone(basis),
        matrix,
    })
}

/// Alternating occupations `0101…` in site order.
pub fn neel_occupations(n_sites: usize) -> Vec<usize> {
    (0..n_sites).map(|i| i % 2).collect()
}

/// Product state `|0101…⟩` with site 0 empty.
pub fn neel_state(basis: &Arc<FockBasis>) -> Result<StateVector> {
    let occ = neel_occupations(basis.n_sites());
    StateVector::product(Arc::clone(basis), &occ)
}
