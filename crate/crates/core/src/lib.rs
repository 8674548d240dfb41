//! Exact simulation of superconducting-qubit lattices as Bose-Hubbard systems
//! with quasiperiodic frequency assignment.
//!
//! The crate covers lattice geometry, Fock bases and sparse Hamiltonians,
//! Krylov time evolution, observables (fidelity, IPR, Rényi-2 entropy, level
//! statistics), seeded XEB-style random circuits and quantum-trajectory noise.

// `!(x > 0.0)` style guards are used on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod circuits;
pub mod engine;
pub mod error;
pub mod lattice;
pub mod model;
pub mod noise;
pub mod observables;
pub mod sparse;
pub mod state;

pub use error::{Error, Result};
pub use lattice::{Edge, EdgeKind, LatticeKind, LatticeSpec};
pub use model::{FockBasis, ModelParams, Sector, SitePotential, SparseHamiltonian};
pub use state::StateVector;
