#![allow(dead_code)]

use std::sync::Arc;

use mbl_core::model::build_hamiltonian;
use mbl_core::{EdgeKind, FockBasis, LatticeSpec, ModelParams, Sector, SparseHamiltonian, StateVector};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn params(r: f64, local_dim: usize) -> ModelParams {
    ModelParams {
        local_dim,
        ..ModelParams::with_ratio(r)
    }
}

pub fn hamiltonian(
    lattice: &LatticeSpec,
    params: &ModelParams,
    sector: Sector,
    edges: &[EdgeKind],
) -> SparseHamiltonian {
    let basis = Arc::new(FockBasis::new(lattice.n_sites(), params.local_dim, sector).unwrap());
    let pot = params.potential(lattice).unwrap();
    build_hamiltonian(params, lattice, &pot, &basis, edges).unwrap()
}

/// Dense Bose-Hubbard matrix over all `d^n` occupation strings, written out
/// directly from the second-quantized form with site 0 as the leading digit.
pub fn brute_force_full(lattice: &LatticeSpec, params: &ModelParams, edges: &[EdgeKind]) -> DMatrix<f64> {
    let n = lattice.n_sites();
    let d = params.local_dim;
    let dim = d.pow(n as u32);
    let pot = params.potential(lattice).unwrap();
    let digits = |mut c: usize| {
        let mut occ = vec![0; n];
        for s in (0..n).rev() {
            occ[s] = c % d;
            c /= d;
        }
        occ
    };
    let code = |occ: &[usize]| occ.iter().fold(0, |acc, &x| acc * d + x);
    let mut h = DMatrix::zeros(dim, dim);
    for c in 0..dim {
        let occ = digits(c);
        h[(c, c)] = (0..n)
            .map(|i| {
                let ni = occ[i] as f64;
                pot.values()[i] * ni + 0.5 * params.anharmonicity * ni * (ni - 1.0)
            })
            .sum();
        for e in lattice.edges_of(edges) {
            for (from, to) in [(e.i, e.j), (e.j, e.i)] {
                if occ[from] > 0 && occ[to] + 1 < d {
                    let mut next = occ.clone();
                    next[from] -= 1;
                    next[to] += 1;
                    let amp = ((occ[from] * (occ[to] + 1)) as f64).sqrt();
                    h[(code(&next), c)] += params.h * amp;
                }
            }
        }
    }
    h
}

pub fn random_state(basis: &Arc<FockBasis>, seed: u64) -> StateVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let amps = (0..basis.dimension())
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    let mut psi = StateVector::new(basis.clone(), amps).unwrap();
    psi.normalize().unwrap();
    psi
}

pub fn dense_apply(m: &DMatrix<f64>, v: &[Complex64]) -> Vec<Complex64> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| v[j] * m[(i, j)]).sum())
        .collect()
}

pub fn l2(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
}
