use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;

use super::gates::apply_gate;
use super::{CircuitSpec, Layer};
use crate::engine::{self, PropagatorConfig};
use crate::error::{Error, Result};
use crate::model::SparseHamiltonian;
use crate::noise::{mean_and_stderr, NoJumpScheme, NoiseParams, TrajectoryConfig, TrajectoryPropagator};
use crate::observables::fidelity;
use crate::state::StateVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExecutionMode {
    /// Gates only.
    Ideal,
    /// Gates followed by residual evolution for the layer duration. With
    /// `compensate_diagonal` the known single-site phases `exp(−i2πDτ)` of
    /// the diagonal part `D` are undone after each window.
    Device { compensate_diagonal: bool },
}

/// Fidelity to the ideal circuit after `depth` layers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DepthFidelity {
    pub depth: usize,
    pub mean: f64,
    pub stderr: f64,
}

fn apply_layer(psi: &mut StateVector, layer: &Layer, circuit: &CircuitSpec) -> Result<()> {
    for (q, &g) in layer.single_gates.iter().enumerate() {
        apply_gate(psi, g, &[q])?;
    }
    for &(i, j) in &layer.pairs {
        apply_gate(psi, circuit.two_qubit_gate, &[i, j])?;
    }
    Ok(())
}

fn check_input(circuit: &CircuitSpec, psi0: &StateVector) -> Result<()> {
    circuit.validate()?;
    let basis = psi0.basis();
    if !basis.is_full_space() {
        return Err(Error::BasisMismatch("circuits need the full Fock space".into()));
    }
    if basis.n_sites() != circuit.n_sites {
        return Err(Error::InvalidCircuit(format!(
            "circuit over {} sites, state over {}",
            circuit.n_sites,
            basis.n_sites()
        )));
    }
    Ok(())
}

/// State after each layer of the noiseless gate sequence.
pub fn run_ideal(circuit: &CircuitSpec, psi0: &StateVector) -> Result<Vec<StateVector>> {
    check_input(circuit, psi0)?;
    let mut psi = psi0.clone();
    let mut out = Vec::with_capacity(circuit.depth());
    for layer in &circuit.layers {
        apply_layer(&mut psi, layer, circuit)?;
        out.push(psi.clone());
    }
    Ok(out)
}

/// Residual-evolution window applied after each layer's gates.
pub struct LayerErrorModel<'a> {
    h_res: &'a SparseHamiltonian,
    tau: f64,
    compensation: Option<Vec<Complex64>>,
    cfg: PropagatorConfig,
}

impl<'a> LayerErrorModel<'a> {
    pub fn new(
        h_res: &'a SparseHamiltonian,
        tau: f64,
        compensate_diagonal: bool,
        cfg: PropagatorConfig,
    ) -> Result<Self> {
        if !h_res.basis().is_full_space() {
            return Err(Error::BasisMismatch(
                "device mode needs a full-space Hamiltonian".into(),
            ));
        }
        cfg.validate()?;
        let compensation = compensate_diagonal.then(|| {
            h_res
                .diagonal()
                .iter()
                .map(|d| Complex64::from_polar(1.0, TAU * d * tau))
                .collect()
        });
        Ok(Self {
            h_res,
            tau,
            compensation,
            cfg,
        })
    }

    fn compensate(&self, psi: &mut StateVector) {
        if let Some(phases) = &self.compensation {
            for (a, p) in psi.amplitudes_mut().iter_mut().zip(phases) {
                *a *= p;
            }
        }
    }

    /// Noiseless window `U_err ψ`.
    pub fn apply(&self, psi: &StateVector) -> Result<StateVector> {
        let mut out = engine::evolve(self.h_res, psi, self.tau, &self.cfg)?;
        self.compensate(&mut out);
        Ok(out)
    }

    fn apply_noisy<R: Rng>(
        &self,
        prop: &TrajectoryPropagator,
        psi: &StateVector,
        threshold: Option<f64>,
        rng: &mut R,
    ) -> Result<StateVector> {
        let mut out = match threshold {
            Some(u) => prop.evolve_from(psi, self.tau, u, rng)?,
            None => prop.evolve(psi, self.tau, rng)?,
        };
        self.compensate(&mut out);
        Ok(out)
    }
}

/// State after each layer with gates interleaved with residual evolution.
pub fn run_device(
    circuit: &CircuitSpec,
    psi0: &StateVector,
    h_res: &SparseHamiltonian,
    mode: ExecutionMode,
    cfg: &PropagatorConfig,
) -> Result<Vec<StateVector>> {
    let compensate = match mode {
        ExecutionMode::Ideal => return run_ideal(circuit, psi0),
        ExecutionMode::Device { compensate_diagonal } => compensate_diagonal,
    };
    check_input(circuit, psi0)?;
    psi0.check_basis(h_res.basis())?;
    let model = LayerErrorModel::new(h_res, circuit.layer_duration, compensate, *cfg)?;
    let mut psi = psi0.clone();
    let mut out = Vec::with_capacity(circuit.depth());
    for layer in &circuit.layers {
        apply_layer(&mut psi, layer, circuit)?;
        psi = model.apply(&psi)?;
        out.push(psi.clone());
    }
    Ok(out)
}

/// Mean fidelity to the ideal circuit at every depth.
///
/// Without noise a single deterministic run is made and the standard error
/// is zero. With noise, `traj.n_traj` trajectories run in parallel on
/// independent RNG streams; trajectories follow a shared no-jump branch
/// until their first jump, so only the branching ones are propagated.
pub fn xeb_fidelity_curve(
    circuit: &CircuitSpec,
    psi0: &StateVector,
    h_res: &SparseHamiltonian,
    mode: ExecutionMode,
    noise: Option<&NoiseParams>,
    traj: &TrajectoryConfig,
    cfg: &PropagatorConfig,
) -> Result<Vec<DepthFidelity>> {
    let ideal = run_ideal(circuit, psi0)?;
    let deterministic = |states: Vec<StateVector>| -> Result<Vec<DepthFidelity>> {
        states
            .iter()
            .zip(&ideal)
            .enumerate()
            .map(|(k, (s, i))| {
                Ok(DepthFidelity {
                    depth: k + 1,
                    mean: fidelity(i, s)?,
                    stderr: 0.0,
                })
            })
            .collect()
    };
    let compensate = match (mode, noise) {
        (ExecutionMode::Device { compensate_diagonal }, Some(_)) => compensate_diagonal,
        _ => return deterministic(run_device(circuit, psi0, h_res, mode, cfg)?),
    };
    let params = noise.expect("matched above");
    traj.validate()?;
    psi0.check_basis(h_res.basis())?;
    let model = LayerErrorModel::new(h_res, circuit.layer_duration, compensate, *cfg)?;
    let prop = TrajectoryPropagator::new(h_res, params, *cfg, traj.dt, NoJumpScheme::Auto)?;

    // Shared no-jump branch: state after each layer's gates, the window's
    // no-jump probability, and the normalized state after the window.
    let mut gated = Vec::with_capacity(circuit.depth());
    let mut stay = Vec::with_capacity(circuit.depth());
    let mut trunk_fid = Vec::with_capacity(circuit.depth());
    let mut psi = psi0.clone();
    for (layer, reference) in circuit.layers.iter().zip(&ideal) {
        apply_layer(&mut psi, layer, circuit)?;
        stay.push(prop.window_norm_sqr(&psi, circuit.layer_duration)?);
        let mut next = StateVector::new(
            psi.basis().clone(),
            prop.no_jump(psi.amplitudes(), circuit.layer_duration)?,
        )?;
        next.normalize()?;
        model.compensate(&mut next);
        gated.push(std::mem::replace(&mut psi, next));
        trunk_fid.push(fidelity(reference, &psi)?);
    }

    let per_traj: Vec<Vec<f64>> = (0..traj.n_traj)
        .into_par_iter()
        .map(|k| -> Result<Vec<f64>> {
            let mut rng = traj.stream(k);
            let mut fids = Vec::with_capacity(circuit.depth());
            let mut own: Option<StateVector> = None;
            for (l, layer) in circuit.layers.iter().enumerate() {
                let next = match own.take() {
                    None => {
                        let u: f64 = rng.random();
                        if u < stay[l] {
                            fids.push(trunk_fid[l]);
                            continue;
                        }
                        model.apply_noisy(&prop, &gated[l], Some(u), &mut rng)?
                    }
                    Some(mut s) => {
                        apply_layer(&mut s, layer, circuit)?;
                        model.apply_noisy(&prop, &s, None, &mut rng)?
                    }
                };
                fids.push(fidelity(&ideal[l], &next)?);
                own = Some(next);
            }
            Ok(fids)
        })
        .collect::<Result<_>>()?;

    (0..circuit.depth())
        .map(|l| {
            let column: Vec<f64> = per_traj.iter().map(|f| f[l]).collect();
            let (mean, stderr) = mean_and_stderr(&column)?;
            Ok(DepthFidelity {
                depth: l + 1,
                mean,
                stderr,
            })
        })
        .collect()
}
