use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::FockBasis;

/// Complex amplitudes over a specific Fock basis.
#[derive(Debug, Clone)]
pub struct StateVector {
    basis: Arc<FockBasis>,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    pub fn new(basis: Arc<FockBasis>, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != basis.dimension() {
            return Err(Error::DimensionMismatch {
                expected: basis.dimension(),
                actual: amplitudes.len(),
            });
        }
        Ok(Self { basis, amplitudes })
    }

    /// Unit vector on basis index `k`.
    pub fn basis_state(basis: Arc<FockBasis>, k: usize) -> Result<Self> {
        if k >= basis.dimension() {
            return Err(Error::DimensionMismatch {
                expected: basis.dimension(),
                actual: k + 1,
            });
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); basis.dimension()];
        amplitudes[k] = Complex64::new(1.0, 0.0);
        Ok(Self { basis, amplitudes })
    }

    /// Product state with the given site occupations.
    pub fn product(basis: Arc<FockBasis>, occupations: &[usize]) -> Result<Self> {
        let k = basis.rank(occupations)?;
        Self::basis_state(basis, k)
    }

    pub fn basis(&self) -> &Arc<FockBasis> {
        &self.basis
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn dimension(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm_sqr(&self) -> f64 {
        norm_sqr(&self.amplitudes)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Rescales to unit norm; fails on a zero or non-finite norm.
    pub fn normalize(&mut self) -> Result<()> {
        let n = self.norm();
        if !n.is_finite() || n == 0.0 {
            return Err(Error::InvalidNorm(n));
        }
        let inv = 1.0 / n;
        self.amplitudes.iter_mut().for_each(|a| *a *= inv);
        Ok(())
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        self.check_same_space(other)?;
        Ok(inner(&self.amplitudes, &other.amplitudes))
    }

    pub fn check_same_space(&self, other: &StateVector) -> Result<()> {
        self.check_basis(other.basis())
    }

    pub fn check_basis(&self, basis: &FockBasis) -> Result<()> {
        if !self.basis.same_space(basis) {
            return Err(Error::BasisMismatch(format!(
                "{:?}/d={} vs {:?}/d={}",
                self.basis.sector(),
                self.basis.local_dim(),
                basis.sector(),
                basis.local_dim()
            )));
        }
        Ok(())
    }

    /// Euclidean distance to another state on the same basis.
    pub fn distance(&self, other: &StateVector) -> Result<f64> {
        self.check_same_space(other)?;
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt())
    }

    /// `⟨N⟩`, the mean total occupation.
    pub fn mean_occupation(&self) -> f64 {
        self.amplitudes
            .iter()
            .enumerate()
            .map(|(k, a)| a.norm_sqr() * self.basis.total_occupation(k) as f64)
            .sum()
    }
}

pub(crate) fn norm_sqr(v: &[Complex64]) -> f64 {
    v.iter().map(|a| a.norm_sqr()).sum()
}

pub(crate) fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}
