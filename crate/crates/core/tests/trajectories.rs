mod common;

use std::sync::Arc;

use common::*;
use mbl_core::engine::{evolve, PropagatorConfig};
use mbl_core::noise::{
    average_fidelity, evolve_trajectory, trajectory_rng, NoJumpScheme, NoiseParams, TrajectoryPropagator,
};
use mbl_core::sparse::CsrMatrix;
use mbl_core::{EdgeKind, FockBasis, LatticeSpec, Sector, SparseHamiltonian, StateVector};
use num_complex::Complex64;

const N_TRAJ: usize = 1000;
const SAMPLE_TIMES: [f64; 5] = [5.0, 15.0, 30.0, 50.0, 80.0];

fn qubit() -> Arc<FockBasis> {
    Arc::new(FockBasis::new(1, 2, Sector::FullSpace).unwrap())
}

fn mean_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Samples `f(ψ(t))` over independent trajectories of an idle qubit.
fn sample(params: &NoiseParams, psi0: &StateVector, t: f64, f: impl Fn(&StateVector) -> f64) -> (f64, f64) {
    let h = SparseHamiltonian::zero(qubit());
    let prop = TrajectoryPropagator::new(&h, params, PropagatorConfig::default(), 0.001, NoJumpScheme::Auto).unwrap();
    let values: Vec<f64> = (0..N_TRAJ)
        .map(|k| {
            let mut rng = trajectory_rng(17 ^ t.to_bits(), k);
            f(&prop.evolve(psi0, t, &mut rng).unwrap())
        })
        .collect();
    mean_stderr(&values)
}

#[test]
fn t1_decay_matches_exponential() {
    let p = NoiseParams::new(50.0, 100.0).unwrap();
    let excited = StateVector::basis_state(qubit(), 1).unwrap();
    for t in SAMPLE_TIMES {
        let (mean, se) = sample(&p, &excited, t, |s| s.amplitudes()[1].norm_sqr());
        let expected = (-t / 50.0).exp();
        println!("T1 t={t}: {mean:.4} ± {se:.4} vs {expected:.4}");
        assert!(
            (mean - expected).abs() <= 3.0 * se,
            "t={t}: {mean} vs {expected} (se {se})"
        );
    }
}

#[test]
fn t2_coherence_matches_exponential() {
    let p = NoiseParams::new(50.0, 69.0).unwrap();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let plus = StateVector::new(qubit(), vec![Complex64::new(s, 0.0), Complex64::new(s, 0.0)]).unwrap();
    for t in SAMPLE_TIMES {
        let (mean, se) = sample(&p, &plus, t, |st| {
            let a = st.amplitudes();
            (a[0] * a[1].conj()).re
        });
        let expected = 0.5 * (-t / 69.0).exp();
        println!("T2 t={t}: {mean:.4} ± {se:.4} vs {expected:.4}");
        assert!(
            (mean - expected).abs() <= 3.0 * se,
            "t={t}: {mean} vs {expected} (se {se})"
        );
    }
}

#[test]
fn zero_rates_reduce_to_unitary_evolution() {
    let lattice = LatticeSpec::chain(6).unwrap();
    let h = hamiltonian(&lattice, &params(0.3, 2), Sector::FullSpace, &[EdgeKind::Nn]);
    let psi = random_state(h.basis(), 5);
    let cfg = PropagatorConfig::default();
    let off = NoiseParams::new(f64::INFINITY, f64::INFINITY).unwrap();
    let mut rng = trajectory_rng(1, 0);
    let noisy = evolve_trajectory(&h, &psi, 0.4, Some(&off), &cfg, 0.001, &mut rng).unwrap();
    let clean = evolve(&h, &psi, 0.4, &cfg).unwrap();
    assert!(noisy.distance(&clean).unwrap() <= 1e-9);
    let none = evolve_trajectory(&h, &psi, 0.4, None, &cfg, 0.001, &mut rng).unwrap();
    assert_eq!(none.amplitudes(), clean.amplitudes());
}

#[test]
fn factorized_and_arnoldi_no_jump_agree() {
    let lattice = LatticeSpec::chain(5).unwrap();
    let h = hamiltonian(&lattice, &params(0.5, 2), Sector::FullSpace, &[EdgeKind::Nn]);
    let psi = random_state(h.basis(), 9);
    let p = NoiseParams::new(2.0, 3.0).unwrap();
    let cfg = PropagatorConfig::default();
    let fast = TrajectoryPropagator::new(&h, &p, cfg, 0.001, NoJumpScheme::Auto).unwrap();
    let slow = TrajectoryPropagator::new(&h, &p, cfg, 0.001, NoJumpScheme::Arnoldi).unwrap();
    assert!(fast.uses_factorized_decay() && !slow.uses_factorized_decay());
    let a = fast.no_jump(psi.amplitudes(), 0.3).unwrap();
    let b = slow.no_jump(psi.amplitudes(), 0.3).unwrap();
    assert!(l2(&a, &b) <= 1e-8);
    let (mut r1, mut r2) = (trajectory_rng(3, 0), trajectory_rng(3, 0));
    let ta = fast.evolve(&psi, 2.0, &mut r1).unwrap();
    let tb = slow.evolve(&psi, 2.0, &mut r2).unwrap();
    assert!(ta.distance(&tb).unwrap() <= 1e-6);
}

#[test]
fn non_commuting_decay_uses_arnoldi() {
    // A transverse field breaks number conservation, so Σ L†L no longer commutes with H.
    let basis = Arc::new(FockBasis::new(2, 2, Sector::FullSpace).unwrap());
    let rows = vec![
        vec![(1, 1.0), (2, 1.0)],
        vec![(0, 1.0), (3, 1.0)],
        vec![(0, 1.0), (3, 1.0)],
        vec![(1, 1.0), (2, 1.0)],
    ];
    let h = SparseHamiltonian::from_matrix(basis.clone(), CsrMatrix::from_rows(4, rows).unwrap()).unwrap();
    let p = NoiseParams::new(1.0, 2.0).unwrap();
    let prop = TrajectoryPropagator::new(&h, &p, PropagatorConfig::default(), 0.001, NoJumpScheme::Auto).unwrap();
    assert!(!prop.uses_factorized_decay());
    let psi = StateVector::basis_state(basis, 0).unwrap();
    let out = prop.evolve(&psi, 1.0, &mut trajectory_rng(0, 0)).unwrap();
    assert!((out.norm() - 1.0).abs() <= 1e-9);
}

#[test]
fn window_norm_is_a_probability_and_jumps_renormalize() {
    let lattice = LatticeSpec::chain(4).unwrap();
    let h = hamiltonian(&lattice, &params(0.3, 2), Sector::FullSpace, &[EdgeKind::Nn]);
    let p = NoiseParams::new(0.5, 0.7).unwrap();
    let prop = TrajectoryPropagator::new(&h, &p, PropagatorConfig::default(), 0.001, NoJumpScheme::Auto).unwrap();
    let psi = random_state(h.basis(), 1);
    let mut last = 1.0;
    for k in 1..=10 {
        let w = prop.window_norm_sqr(&psi, 0.1 * k as f64).unwrap();
        assert!(w > 0.0 && w <= last + 1e-15);
        last = w;
    }
    let outs: Vec<StateVector> = (0..50)
        .map(|k| prop.evolve(&psi, 1.0, &mut trajectory_rng(8, k)).unwrap())
        .collect();
    for s in &outs {
        assert!((s.norm() - 1.0).abs() <= 1e-9);
    }
    let (mean, se) = average_fidelity(&outs, &psi).unwrap();
    assert!((0.0..=1.0).contains(&mean) && se >= 0.0);
}

#[test]
fn trajectory_results_ignore_execution_order() {
    let lattice = LatticeSpec::chain(4).unwrap();
    let h = hamiltonian(&lattice, &params(0.3, 2), Sector::FullSpace, &[EdgeKind::Nn]);
    let p = NoiseParams::new(1.0, 1.5).unwrap();
    let prop = TrajectoryPropagator::new(&h, &p, PropagatorConfig::default(), 0.001, NoJumpScheme::Auto).unwrap();
    let psi = mbl_core::model::neel_state(h.basis()).unwrap();
    let run = |k: usize| prop.evolve(&psi, 0.5, &mut trajectory_rng(42, k)).unwrap();
    let forward: Vec<StateVector> = (0..20).map(run).collect();
    let mut backward: Vec<StateVector> = (0..20).rev().map(run).collect();
    backward.reverse();
    for (a, b) in forward.iter().zip(&backward) {
        assert_eq!(a.amplitudes(), b.amplitudes());
    }
}

#[test]
fn average_fidelity_examples() {
    let basis = qubit();
    let zero = StateVector::basis_state(basis.clone(), 0).unwrap();
    let one = StateVector::basis_state(basis, 1).unwrap();
    assert_eq!(
        average_fidelity(&[zero.clone(), zero.clone()], &zero).unwrap(),
        (1.0, 0.0)
    );
    assert_eq!(
        average_fidelity(&[one.clone(), one.clone()], &zero).unwrap(),
        (0.0, 0.0)
    );
    assert_eq!(average_fidelity(&[zero.clone(), one], &zero).unwrap(), (0.5, 0.5));
    assert!(average_fidelity(&[], &zero).is_err());
}
