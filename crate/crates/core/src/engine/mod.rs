//! Time evolution `ψ(t) = exp(−i 2π H t) ψ(0)` with `H` in MHz and `t` in μs.

mod chebyshev;
mod dense;
mod krylov;

pub use chebyshev::bessel_j_sequence;
pub use dense::{evolve_dense_oracle, DENSE_ORACLE_LIMIT};
pub use krylov::KrylovStats;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::SparseHamiltonian;
use crate::sparse::CsrMatrix;
use crate::state::StateVector;

/// Default layer / gate duration in μs: the full swap time `1/(4h)` at `h = 5` MHz.
pub const DEFAULT_GATE_TIME_US: f64 = 0.05;

/// Largest norm drift repaired by renormalization after a unitary evolution.
pub const RENORMALIZE_LIMIT: f64 = 1e-8;

/// A linear map on complex vectors.
pub trait LinearOperator: Sync {
    fn dim(&self) -> usize;
    /// `y = A x`.
    fn apply(&self, x: &[Complex64], y: &mut [Complex64]);
}

impl LinearOperator for CsrMatrix {
    fn dim(&self) -> usize {
        self.n_rows()
    }

    fn apply(&self, x: &[Complex64], y: &mut [Complex64]) {
        self.matvec_into(x, y);
    }
}

/// Hermitian propagation scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    /// Lanczos with full reorthogonalization and adaptive sub-stepping.
    Lanczos,
    /// Chebyshev expansion over the Gershgorin interval.
    Chebyshev,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagatorConfig {
    pub krylov_dim: usize,
    pub step_tolerance: f64,
    pub max_substeps: usize,
    pub method: Method,
}

impl Default for PropagatorConfig {
    fn default() -> Self {
        Self {
            krylov_dim: 30,
            step_tolerance: 1e-10,
            max_substeps: 4096,
            method: Method::Lanczos,
        }
    }
}

impl PropagatorConfig {
    pub fn with_method(method: Method) -> Self {
        Self {
            method,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.krylov_dim < 2 {
            return Err(Error::InvalidParams("krylov_dim must be >= 2".into()));
        }
        if !(self.step_tolerance > 0.0) {
            return Err(Error::InvalidParams("step_tolerance must be positive".into()));
        }
        if self.max_substeps == 0 {
            return Err(Error::InvalidParams("max_substeps must be positive".into()));
        }
        Ok(())
    }
}

/// Exact sparse product `H ψ`.
pub fn apply_h(h: &SparseHamiltonian, psi: &StateVector) -> Result<Vec<Complex64>> {
    psi.check_basis(h.basis())?;
    Ok(h.matrix().matvec(psi.amplitudes()))
}

/// `⟨ψ|H|ψ⟩`.
pub fn energy(h: &SparseHamiltonian, psi: &StateVector) -> Result<f64> {
    let hpsi = apply_h(h, psi)?;
    Ok(crate::state::inner(psi.amplitudes(), &hpsi).re)
}

fn check_time(t: f64) -> Result<()> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::InvalidParams(format!("time must be finite and >= 0, got {t}")));
    }
    Ok(())
}

/// Unitary evolution for time `t`, followed by renormalization when the
/// accumulated norm drift is below [`RENORMALIZE_LIMIT`].
pub fn evolve(h: &SparseHamiltonian, psi0: &StateVector, t: f64, cfg: &PropagatorConfig) -> Result<StateVector> {
    psi0.check_basis(h.basis())?;
    check_time(t)?;
    cfg.validate()?;
    let n0 = psi0.norm();
    if (n0 - 1.0).abs() > RENORMALIZE_LIMIT {
        return Err(Error::InvalidNorm(n0));
    }
    if t == 0.0 {
        return Ok(psi0.clone());
    }
    let amps = propagate_unitary(h.matrix(), psi0.amplitudes(), t, cfg)?;
    let mut out = StateVector::new(psi0.basis().clone(), amps)?;
    let drift = (out.norm() - 1.0).abs();
    if drift >= RENORMALIZE_LIMIT {
        return Err(Error::NormDrift { drift });
    }
    out.normalize()?;
    Ok(out)
}

/// `exp(−i 2π H t) v` for a real symmetric matrix, no normalization.
pub(crate) fn propagate_unitary(
    h: &CsrMatrix,
    v: &[Complex64],
    t: f64,
    cfg: &PropagatorConfig,
) -> Result<Vec<Complex64>> {
    match cfg.method {
        Method::Lanczos => Ok(krylov::expv(h, v, t, cfg, true)?.0),
        Method::Chebyshev => Ok(chebyshev::propagate(h, v, t, cfg.step_tolerance).0),
    }
}

/// `exp(−i 2π A t) v` for a general operator via Arnoldi sub-stepping.
pub fn propagate_general(
    op: &dyn LinearOperator,
    v: &[Complex64],
    t: f64,
    cfg: &PropagatorConfig,
) -> Result<(Vec<Complex64>, KrylovStats)> {
    check_time(t)?;
    cfg.validate()?;
    if v.len() != op.dim() {
        return Err(Error::DimensionMismatch {
            expected: op.dim(),
            actual: v.len(),
        });
    }
    krylov::expv(op, v, t, cfg, false)
}

/// `exp(−i 2π H t) v` via Lanczos, exposing iteration statistics.
pub fn propagate_lanczos(
    h: &CsrMatrix,
    v: &[Complex64],
    t: f64,
    cfg: &PropagatorConfig,
) -> Result<(Vec<Complex64>, KrylovStats)> {
    check_time(t)?;
    cfg.validate()?;
    krylov::expv(h, v, t, cfg, true)
}
