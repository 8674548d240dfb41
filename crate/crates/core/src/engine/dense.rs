use std::f64::consts::TAU;

use nalgebra::{DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::SparseHamiltonian;
use crate::state::StateVector;

/// Largest dimension accepted by the dense evolution oracle.
pub const DENSE_ORACLE_LIMIT: usize = 4096;

/// Reference evolution through a full eigendecomposition of `H`.
pub fn evolve_dense_oracle(h: &SparseHamiltonian, psi0: &StateVector, t: f64) -> Result<StateVector> {
    psi0.check_basis(h.basis())?;
    let dim = h.dimension();
    if dim > DENSE_ORACLE_LIMIT {
        return Err(Error::GuardExceeded {
            what: "dense evolution oracle",
            dimension: dim,
            limit: DENSE_ORACLE_LIMIT,
        });
    }
    if t == 0.0 {
        return Ok(psi0.clone());
    }
    let eig = SymmetricEigen::new(h.matrix().to_dense());
    let q = &eig.eigenvectors;
    let re = DVector::from_iterator(dim, psi0.amplitudes().iter().map(|a| a.re));
    let im = DVector::from_iterator(dim, psi0.amplitudes().iter().map(|a| a.im));
    let (pr, pi) = (q.tr_mul(&re), q.tr_mul(&im));
    let mut rot_re = DVector::zeros(dim);
    let mut rot_im = DVector::zeros(dim);
    for k in 0..dim {
        let c = Complex64::new(pr[k], pi[k]) * Complex64::from_polar(1.0, -TAU * eig.eigenvalues[k] * t);
        rot_re[k] = c.re;
        rot_im[k] = c.im;
    }
    let (out_re, out_im) = (q * rot_re, q * rot_im);
    let amps = (0..dim).map(|i| Complex64::new(out_re[i], out_im[i])).collect();
    StateVector::new(psi0.basis().clone(), amps)
}
