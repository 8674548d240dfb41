mod common;

use std::sync::Arc;

use common::*;
use mbl_core::engine::{evolve, evolve_dense_oracle, propagate_lanczos, Method, PropagatorConfig};
use mbl_core::model::{build_hamiltonian, neel_state};
use mbl_core::{EdgeKind, FockBasis, LatticeSpec, ModelParams, Sector, SitePotential, StateVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn krylov_matches_dense_on_random_small_systems() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let lattices = [
        LatticeSpec::chain(4).unwrap(),
        LatticeSpec::chain(6).unwrap(),
        LatticeSpec::chain(8).unwrap(),
        LatticeSpec::grid(2, 3).unwrap(),
        LatticeSpec::grid(2, 4).unwrap(),
    ];
    let mut worst: f64 = 0.0;
    for case in 0..20 {
        let lattice = &lattices[case % lattices.len()];
        let n = lattice.n_sites();
        let d = if case % 3 == 0 { 3 } else { 2 };
        let r = 10f64.powf(rng.random_range(-1.5..0.5));
        let sector = if d == 2 && n <= 6 && case % 2 == 0 {
            Sector::FullSpace
        } else {
            Sector::FixedNumber(n / 2)
        };
        let edges: &[EdgeKind] = if case % 4 == 1 {
            &[EdgeKind::Nn, EdgeKind::Nnn]
        } else {
            &[EdgeKind::Nn]
        };
        let h = hamiltonian(lattice, &params(r, d), sector, edges);
        let psi = random_state(h.basis(), rng.random());
        let t = rng.random_range(0.01..2.0);
        let exact = evolve_dense_oracle(&h, &psi, t).unwrap();
        for method in [Method::Lanczos, Method::Chebyshev] {
            let approx = evolve(&h, &psi, t, &PropagatorConfig::with_method(method)).unwrap();
            let dist = approx.distance(&exact).unwrap();
            worst = worst.max(dist);
            assert!(dist <= 1e-8, "case {case} {method:?}: distance {dist:e}");
        }
    }
    println!("worst Krylov/dense distance {worst:e}");
}

#[test]
fn two_site_swap_at_quarter_period() {
    let lattice = LatticeSpec::chain(2).unwrap();
    let basis = Arc::new(FockBasis::new(2, 2, Sector::FixedNumber(1)).unwrap());
    let p = ModelParams::with_ratio(1.0);
    let h = build_hamiltonian(&p, &lattice, &SitePotential(vec![0.0, 0.0]), &basis, &[EdgeKind::Nn]).unwrap();
    let psi = StateVector::product(basis.clone(), &[1, 0]).unwrap();
    let t = 1.0 / (4.0 * p.h);
    let expected = [Complex64::new(0.0, -1.0), Complex64::new(0.0, 0.0)];
    for method in [Method::Lanczos, Method::Chebyshev] {
        let out = evolve(&h, &psi, t, &PropagatorConfig::with_method(method)).unwrap();
        // basis order is |01⟩, |10⟩
        assert!(l2(out.amplitudes(), &expected) <= 1e-8, "{method:?}");
    }
    let dense = evolve_dense_oracle(&h, &psi, t).unwrap();
    assert!(l2(dense.amplitudes(), &expected) <= 1e-12);
}

#[test]
fn eight_site_deep_localized_chain_matches_dense() {
    let lattice = LatticeSpec::chain(8).unwrap();
    let h = hamiltonian(&lattice, &params(0.03, 2), Sector::FixedNumber(4), &[EdgeKind::Nn]);
    let psi = neel_state(h.basis()).unwrap();
    let exact = evolve_dense_oracle(&h, &psi, 2.5).unwrap();
    let out = evolve(&h, &psi, 2.5, &PropagatorConfig::default()).unwrap();
    assert!(out.distance(&exact).unwrap() <= 1e-8);
}

#[test]
fn lanczos_reports_work() {
    let lattice = LatticeSpec::chain(6).unwrap();
    let h = hamiltonian(&lattice, &params(0.3, 2), Sector::FixedNumber(3), &[EdgeKind::Nn]);
    let psi = neel_state(h.basis()).unwrap();
    let (v, stats) = propagate_lanczos(h.matrix(), psi.amplitudes(), 0.5, &PropagatorConfig::default()).unwrap();
    assert!(stats.substeps >= 1 && stats.matvecs >= stats.substeps);
    let exact = evolve_dense_oracle(&h, &psi, 0.5).unwrap();
    assert!(l2(&v, exact.amplitudes()) <= 1e-8);
}

#[test]
fn dense_oracle_guard() {
    let lattice = LatticeSpec::chain(15).unwrap();
    let h = hamiltonian(&lattice, &params(1.0, 2), Sector::FixedNumber(7), &[EdgeKind::Nn]);
    let psi = neel_state(h.basis()).unwrap();
    assert_eq!(h.dimension(), 6435);
    assert!(evolve_dense_oracle(&h, &psi, 0.1).is_err());
}
