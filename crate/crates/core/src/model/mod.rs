//! Bose-Hubbard model of a qubit lattice in the frame rotating at the base
//! qubit frequency.
//!
//! On-site detunings come from a quasiperiodic potential of amplitude
//! `W = h / r`. Matrix elements are ordinary frequencies in MHz; propagators
//! apply the `2π`.

mod basis;
mod hamiltonian;
mod potential;

pub use basis::{FockBasis, Sector, MAX_FULL_DIMENSION};
pub use hamiltonian::{build_hamiltonian, neel_occupations, neel_state, SparseHamiltonian};
pub use potential::{quasiperiodic_1d, quasiperiodic_2d, SitePotential};

use crate::error::{Error, Result};
use crate::lattice::{LatticeKind, LatticeSpec};

/// `(√5 − 1) / 2`, the 1D and row wavenumber.
pub const ALPHA_GOLDEN: f64 = 0.618_033_988_749_894_9;
/// `(√7 − 1) / 2`, the column wavenumber on grids.
pub const ALPHA_SQRT7: f64 = 0.822_875_655_532_295_2;
pub const DEFAULT_W_BASE_GHZ: f64 = 4.889;
pub const DEFAULT_COUPLING_MHZ: f64 = 5.0;
pub const DEFAULT_ANHARMONICITY_MHZ: f64 = -200.0;

#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    /// Frame frequency; drops out of the rotating-frame dynamics.
    pub w_base_ghz: f64,
    /// Residual coupling `h` in MHz.
    pub h: f64,
    /// `r = h / W`.
    pub r: f64,
    /// Uniform anharmonicity `V` in MHz.
    pub anharmonicity: f64,
    pub local_dim: usize,
    /// Wavenumber along the chain, or along rows of a grid.
    pub alpha_x: f64,
    /// Wavenumber along grid columns.
    pub alpha_y: f64,
    /// Phase offset of the 1D potential.
    pub phi: f64,
}

impl ModelParams {
    /// Paper-like defaults at ratio `r`: `h = 5` MHz, hard-core qubits.
    pub fn with_ratio(r: f64) -> Self {
        Self {
            w_base_ghz: DEFAULT_W_BASE_GHZ,
            h: DEFAULT_COUPLING_MHZ,
            r,
            anharmonicity: DEFAULT_ANHARMONICITY_MHZ,
            local_dim: 2,
            alpha_x: ALPHA_GOLDEN,
            alpha_y: ALPHA_SQRT7,
            phi: 0.0,
        }
    }

    /// Quasiperiodic amplitude `W = h / r` in MHz.
    pub fn amplitude(&self) -> f64 {
        self.h / self.r
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.r > 0.0 && self.r.is_finite()) {
            return Err(Error::InvalidParams(format!("r must be positive, got {}", self.r)));
        }
        if self.local_dim < 2 {
            return Err(Error::InvalidParams(format!(
                "local dimension must be >= 2, got {}",
                self.local_dim
            )));
        }
        for (name, v) in [
            ("h", self.h),
            ("anharmonicity", self.anharmonicity),
            ("alpha_x", self.alpha_x),
            ("alpha_y", self.alpha_y),
            ("phi", self.phi),
            ("w_base", self.w_base_ghz),
        ] {
            if !v.is_finite() {
                return Err(Error::InvalidParams(format!("{name} must be finite")));
            }
        }
        Ok(())
    }

    /// The quasiperiodic potential matching the lattice geometry.
    pub fn potential(&self, lattice: &LatticeSpec) -> Result<SitePotential> {
        self.validate()?;
        match lattice.kind() {
            LatticeKind::Chain => Ok(quasiperiodic_1d(
                self.amplitude(),
                self.alpha_x,
                self.phi,
                lattice.n_sites(),
            )),
            LatticeKind::Grid => quasiperiodic_2d(self.amplitude(), self.alpha_x, self.alpha_y, lattice),
        }
    }
}
