//! Quantum-trajectory (Monte Carlo wavefunction) evolution with T1
//! relaxation and pure dephasing.
//!
//! Between jumps the state follows `H_eff = H − (i / 4π) Σ_k L_k† L_k`, so
//! that `exp(−i 2π H_eff t)` damps with the jump rates in 1/μs. A jump fires
//! when the no-jump norm² falls to a uniform threshold `u`; the crossing time
//! is located by bisection, the jump channel is drawn with weight
//! `‖L_k ψ‖²`, and a fresh threshold is drawn.

use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::engine::{self, LinearOperator, PropagatorConfig};
use crate::error::{Error, Result};
use crate::model::{FockBasis, SparseHamiltonian};
use crate::sparse::CsrMatrix;
use crate::state::{norm_sqr, StateVector};

/// Coherence times in μs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseParams {
    t1: f64,
    t2: f64,
}

impl NoiseParams {
    /// Infinite times switch the corresponding channel off.
    pub fn new(t1: f64, t2: f64) -> Result<Self> {
        if !(t1 > 0.0) || !(t2 > 0.0) {
            return Err(Error::InvalidNoise(format!("T1={t1}, T2={t2} must be positive")));
        }
        if t2 > 2.0 * t1 {
            return Err(Error::InvalidNoise(format!("T2={t2} exceeds 2*T1={}", 2.0 * t1)));
        }
        Ok(Self { t1, t2 })
    }

    pub fn t1(&self) -> f64 {
        self.t1
    }

    pub fn t2(&self) -> f64 {
        self.t2
    }

    /// Relaxation rate `1/T1` in 1/μs.
    pub fn gamma1(&self) -> f64 {
        1.0 / self.t1
    }

    /// Pure dephasing rate `1/T2 − 1/(2 T1)` in 1/μs.
    pub fn gamma_phi(&self) -> f64 {
        (1.0 / self.t2 - 0.5 / self.t1).max(0.0)
    }
}

/// Noise strength table: `ns = 0` is unitary, `1` and `2` are fixed (T1, T2) pairs.
pub fn noise_from_ns(ns: u32) -> Result<Option<NoiseParams>> {
    match ns {
        0 => Ok(None),
        1 => NoiseParams::new(50.0, 69.0).map(Some),
        2 => NoiseParams::new(25.0, 34.5).map(Some),
        other => Err(Error::InvalidNoise(format!("unsupported noise strength ns={other}"))),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JumpKind {
    Relaxation,
    Dephasing,
}

#[derive(Debug, Clone)]
pub struct JumpOperator {
    pub kind: JumpKind,
    pub site: usize,
    pub matrix: CsrMatrix,
}

/// `√γ1 a_j` and `√(γφ/2) Z_j` per site; channels with zero rate are omitted.
///
/// `Z_j = I − 2 min(n_j, 1)` dephases the lowest two levels when `d > 2`.
pub fn jump_operators(params: &NoiseParams, basis: &FockBasis) -> Result<Vec<JumpOperator>> {
    if !basis.is_full_space() {
        return Err(Error::BasisMismatch("jump operators need the full Fock space".into()));
    }
    let dim = basis.dimension();
    let mut out = Vec::new();
    let relax = params.gamma1().sqrt();
    let dephase = (params.gamma_phi() / 2.0).sqrt();
    for site in 0..basis.n_sites() {
        if relax > 0.0 {
            let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); dim];
            for k in 0..dim {
                let code = basis.code(k);
                let n = basis.occupation(code, site);
                if n > 0 {
                    let target = basis
                        .rank_code(code - basis.place(site))
                        .expect("full space contains every code");
                    rows[target].push((k, relax * (n as f64).sqrt()));
                }
            }
            out.push(JumpOperator {
                kind: JumpKind::Relaxation,
                site,
                matrix: CsrMatrix::from_rows(dim, rows)?,
            });
        }
        if dephase > 0.0 {
            let diag: Vec<f64> = (0..dim)
                .map(|k| {
                    let n = basis.occupation(basis.code(k), site);
                    dephase * if n == 0 { 1.0 } else { -1.0 }
                })
                .collect();
            out.push(JumpOperator {
                kind: JumpKind::Dephasing,
                site,
                matrix: CsrMatrix::from_diagonal(&diag),
            });
        }
    }
    Ok(out)
}

/// Per-trajectory settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryConfig {
    pub n_traj: usize,
    pub seed: u64,
    /// Jump-search substep in μs; the crossing time is resolved to `dt / 100`.
    pub dt: f64,
}

impl TrajectoryConfig {
    /// Defaults: 200 trajectories and `dt = τ / 50`.
    pub fn for_layer(tau: f64, seed: u64) -> Self {
        Self {
            n_traj: 200,
            seed,
            dt: tau / 50.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_traj == 0 {
            return Err(Error::InvalidNoise("n_traj must be >= 1".into()));
        }
        if !(self.dt > 0.0) {
            return Err(Error::InvalidNoise("dt must be positive".into()));
        }
        Ok(())
    }

    /// Independent counter-based stream for trajectory `index`.
    pub fn stream(&self, index: usize) -> ChaCha8Rng {
        trajectory_rng(self.seed, index)
    }
}

pub fn trajectory_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// How the no-jump propagator is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoJumpScheme {
    /// Factor `exp(−Γt/2) exp(−i2πHt)` when the decay operator is diagonal
    /// and commutes with `H`, Arnoldi otherwise.
    Auto,
    /// Always run Arnoldi on `H_eff`.
    Arnoldi,
}

struct EffectiveHamiltonian<'a> {
    h: &'a CsrMatrix,
    decay: &'a CsrMatrix,
}

impl LinearOperator for EffectiveHamiltonian<'_> {
    fn dim(&self) -> usize {
        self.h.n_rows()
    }

    fn apply(&self, x: &[Complex64], y: &mut [Complex64]) {
        self.h.matvec_into(x, y);
        let g = self.decay.matvec(x);
        let coeff = Complex64::new(0.0, -1.0 / (4.0 * std::f64::consts::PI));
        for (yi, gi) in y.iter_mut().zip(g) {
            *yi += coeff * gi;
        }
    }
}

/// Reusable trajectory propagator for one Hamiltonian and noise model.
pub struct TrajectoryPropagator {
    basis: Arc<FockBasis>,
    h: CsrMatrix,
    jumps: Vec<JumpOperator>,
    decay: CsrMatrix,
    /// Diagonal of the decay operator when the factorized scheme applies.
    commuting_decay: Option<Vec<f64>>,
    cfg: PropagatorConfig,
    resolution: f64,
}

impl TrajectoryPropagator {
    pub fn new(
        h: &SparseHamiltonian,
        params: &NoiseParams,
        cfg: PropagatorConfig,
        dt: f64,
        scheme: NoJumpScheme,
    ) -> Result<Self> {
        if !(dt > 0.0) {
            return Err(Error::InvalidNoise("dt must be positive".into()));
        }
        cfg.validate()?;
        let jumps = jump_operators(params, h.basis())?;
        let dim = h.dimension();
        let mut decay = CsrMatrix::zeros(dim);
        for j in &jumps {
            decay = decay.add(&j.matrix.gram())?;
        }
        let commuting_decay = match scheme {
            NoJumpScheme::Arnoldi => None,
            NoJumpScheme::Auto => commuting_diagonal(h.matrix(), &decay),
        };
        Ok(Self {
            basis: h.basis().clone(),
            h: h.matrix().clone(),
            jumps,
            decay,
            commuting_decay,
            cfg,
            resolution: dt / 100.0,
        })
    }

    pub fn jumps(&self) -> &[JumpOperator] {
        &self.jumps
    }

    pub fn uses_factorized_decay(&self) -> bool {
        self.commuting_decay.is_some()
    }

    /// Unnormalized `exp(−i 2π H_eff s) v`.
    pub fn no_jump(&self, v: &[Complex64], s: f64) -> Result<Vec<Complex64>> {
        match &self.commuting_decay {
            Some(gamma) => {
                let mut w = engine::propagate_unitary(&self.h, v, s, &self.cfg)?;
                for (wi, g) in w.iter_mut().zip(gamma) {
                    *wi *= (-0.5 * g * s).exp();
                }
                Ok(w)
            }
            None => {
                let op = EffectiveHamiltonian {
                    h: &self.h,
                    decay: &self.decay,
                };
                Ok(engine::propagate_general(&op, v, s, &self.cfg)?.0)
            }
        }
    }

    /// No-jump probability `‖exp(−i 2π H_eff t) ψ‖²` over a window.
    pub fn window_norm_sqr(&self, psi: &StateVector, t: f64) -> Result<f64> {
        psi.check_basis(&self.basis)?;
        self.norm_sqr_after(psi.amplitudes(), t)
    }

    /// `‖exp(−i 2π H_eff s) v‖²`.
    fn norm_sqr_after(&self, v: &[Complex64], s: f64) -> Result<f64> {
        match &self.commuting_decay {
            // Weights inside each decay eigenspace are conserved by H.
            Some(gamma) => Ok(v.iter().zip(gamma).map(|(x, g)| x.norm_sqr() * (-g * s).exp()).sum()),
            None => Ok(norm_sqr(&self.no_jump(v, s)?)),
        }
    }

    /// One stochastic trajectory segment of duration `t` from a normalized state.
    pub fn evolve<R: Rng + ?Sized>(&self, psi0: &StateVector, t: f64, rng: &mut R) -> Result<StateVector> {
        let threshold: f64 = rng.random();
        self.evolve_from(psi0, t, threshold, rng)
    }

    /// As [`Self::evolve`] with the first jump threshold already drawn.
    ///
    /// The segment stays jump-free exactly when
    /// `threshold < window_norm_sqr(psi0, t)`, which lets callers share that
    /// branch between trajectories.
    pub fn evolve_from<R: Rng + ?Sized>(
        &self,
        psi0: &StateVector,
        t: f64,
        threshold: f64,
        rng: &mut R,
    ) -> Result<StateVector> {
        psi0.check_basis(&self.basis)?;
        if !(t >= 0.0 && t.is_finite()) {
            return Err(Error::InvalidParams(format!("time must be finite and >= 0, got {t}")));
        }
        let n0 = psi0.norm_sqr();
        if !((n0 - 1.0).abs() <= 1e-8) {
            return Err(Error::InvalidNorm(n0.sqrt()));
        }
        let mut psi = psi0.amplitudes().to_vec();
        let mut remaining = t;
        let mut threshold = threshold;
        while remaining > 0.0 {
            let end = self.norm_sqr_after(&psi, remaining)?;
            if end > threshold {
                psi = self.no_jump(&psi, remaining)?;
                renormalize(&mut psi)?;
                break;
            }
            let (mut lo, mut hi) = (0.0, remaining);
            while hi - lo > self.resolution {
                let mid = 0.5 * (lo + hi);
                if self.norm_sqr_after(&psi, mid)? > threshold {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            psi = self.no_jump(&psi, hi)?;
            renormalize(&mut psi)?;
            psi = self.jump(&psi, rng)?;
            remaining -= hi;
            threshold = rng.random();
        }
        StateVector::new(self.basis.clone(), psi)
    }

    fn jump<R: Rng + ?Sized>(&self, psi: &[Complex64], rng: &mut R) -> Result<Vec<Complex64>> {
        let candidates: Vec<Vec<Complex64>> = self.jumps.iter().map(|j| j.matrix.matvec(psi)).collect();
        let weights: Vec<f64> = candidates.iter().map(|c| norm_sqr(c)).collect();
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) {
            return Err(Error::InvalidNorm(0.0));
        }
        let mut pick = rng.random::<f64>() * total;
        let mut chosen = weights.len() - 1;
        for (k, w) in weights.iter().enumerate() {
            if pick < *w {
                chosen = k;
                break;
            }
            pick -= w;
        }
        while weights[chosen] == 0.0 {
            chosen -= 1;
        }
        let mut out = candidates.into_iter().nth(chosen).expect("index in range");
        renormalize(&mut out)?;
        Ok(out)
    }
}

fn renormalize(v: &mut [Complex64]) -> Result<()> {
    let n = norm_sqr(v).sqrt();
    if !(n > 0.0 && n.is_finite()) {
        return Err(Error::InvalidNorm(n));
    }
    v.iter_mut().for_each(|x| *x /= n);
    Ok(())
}

fn commuting_diagonal(h: &CsrMatrix, decay: &CsrMatrix) -> Option<Vec<f64>> {
    if !decay.is_diagonal() {
        return None;
    }
    let gamma = decay.diagonal();
    // Site sums taken in different orders differ in the last bits.
    let tol = 1e-12 * gamma.iter().fold(0.0f64, |m, g| m.max(g.abs()));
    for i in 0..h.n_rows() {
        for (j, v) in h.row(i) {
            if v != 0.0 && (gamma[i] - gamma[j]).abs() > tol {
                return None;
            }
        }
    }
    Some(gamma)
}

/// Trajectory evolution for time `t`; without noise this is [`engine::evolve`].
pub fn evolve_trajectory<R: Rng + ?Sized>(
    h: &SparseHamiltonian,
    psi0: &StateVector,
    t: f64,
    params: Option<&NoiseParams>,
    cfg: &PropagatorConfig,
    dt: f64,
    rng: &mut R,
) -> Result<StateVector> {
    match params {
        None => engine::evolve(h, psi0, t, cfg),
        Some(p) => TrajectoryPropagator::new(h, p, *cfg, dt, NoJumpScheme::Auto)?.evolve(psi0, t, rng),
    }
}

/// Sample mean and standard error of `|⟨ref|ψ⟩|²` over trajectories.
pub fn average_fidelity(trajectories: &[StateVector], reference: &StateVector) -> Result<(f64, f64)> {
    let values = trajectories
        .iter()
        .map(|s| Ok(reference.inner(s)?.norm_sqr()))
        .collect::<Result<Vec<f64>>>()?;
    mean_and_stderr(&values)
}

/// Sample mean and `s / √n` with the unbiased sample deviation; a single
/// sample has zero standard error.
pub fn mean_and_stderr(values: &[f64]) -> Result<(f64, f64)> {
    if values.is_empty() {
        return Err(Error::EmptyInput("no samples"));
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() == 1 {
        return Ok((mean, 0.0));
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Ok((mean, (var / n).sqrt()))
}
