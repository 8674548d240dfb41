use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::lattice::{LatticeKind, LatticeSpec};

/// On-site detunings in MHz, one per site.
#[derive(Debug, Clone, PartialEq)]
pub struct SitePotential(pub Vec<f64>);

impl SitePotential {
    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Mean `|W_i − W_j|` over the given site pairs.
    pub fn mean_abs_difference(&self, pairs: impl IntoIterator<Item = (usize, usize)>) -> f64 {
        let (sum, n) = pairs.into_iter().fold((0.0, 0usize), |(s, n), (i, j)| {
            (s + (self.0[i] - self.0[j]).abs(), n + 1)
        });
        if n == 0 {
            0.0
        } else {
            sum / n as f64
        }
    }
}

/// `W cos(2π α i + φ)` for `i = 0..n_sites`.
pub fn quasiperiodic_1d(amplitude: f64, alpha: f64, phi: f64, n_sites: usize) -> SitePotential {
    SitePotential(
        (0..n_sites)
            .map(|i| amplitude * (2.0 * PI * alpha * i as f64 + phi).cos())
            .collect(),
    )
}

/// `W (cos(2π α_x x) + cos(2π α_y y))` with `(x, y)` the row and column of each site.
pub fn quasiperiodic_2d(amplitude: f64, alpha_x: f64, alpha_y: f64, lattice: &LatticeSpec) -> Result<SitePotential> {
    if lattice.kind() != LatticeKind::Grid {
        return Err(Error::InvalidLattice("two-dimensional potential needs a grid".into()));
    }
    let values = (0..lattice.n_sites())
        .map(|i| {
            let (x, y) = lattice.site_coords(i).expect("index in range");
            amplitude * ((2.0 * PI * alpha_x * x as f64).cos() + (2.0 * PI * alpha_y * y as f64).cos())
        })
        .collect();
    Ok(SitePotential(values))
}
