use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::state::StateVector;

/// Gate set of the random circuits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GateKind {
    /// `exp(−iπX/4)`.
    XHalf,
    /// `exp(−iπY/4)`.
    YHalf,
    /// `exp(−i(π/4)(X+Y)/√2)`.
    WHalf,
    Identity,
    /// fSim form: `[[cos θ, −i sin θ], [−i sin θ, cos θ]]` on {|01⟩, |10⟩},
    /// `e^{−iφ}` on |11⟩.
    ISwapLike {
        theta: f64,
        phi: f64,
    },
}

impl GateKind {
    pub const SINGLE_QUBIT: [GateKind; 4] = [GateKind::XHalf, GateKind::YHalf, GateKind::WHalf, GateKind::Identity];

    /// `ISwapLike(π/2, 0)`.
    pub fn iswap() -> Self {
        GateKind::ISwapLike {
            theta: FRAC_PI_2,
            phi: 0.0,
        }
    }

    pub fn arity(&self) -> usize {
        match self {
            GateKind::ISwapLike { .. } => 2,
            _ => 1,
        }
    }

    /// Short label used by the text format (`X`, `Y`, `W`, `I`).
    pub fn symbol(&self) -> Option<char> {
        match self {
            GateKind::XHalf => Some('X'),
            GateKind::YHalf => Some('Y'),
            GateKind::WHalf => Some('W'),
            GateKind::Identity => Some('I'),
            GateKind::ISwapLike { .. } => None,
        }
    }

    pub fn from_symbol(c: char) -> Option<Self> {
        match c {
            'X' => Some(GateKind::XHalf),
            'Y' => Some(GateKind::YHalf),
            'W' => Some(GateKind::WHalf),
            'I' => Some(GateKind::Identity),
            _ => None,
        }
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub(crate) type Gate2 = [[Complex64; 2]; 2];
pub(crate) type Gate4 = [[Complex64; 4]; 4];

pub(crate) fn single_matrix(kind: GateKind) -> Option<Gate2> {
    let s = FRAC_1_SQRT_2;
    match kind {
        GateKind::XHalf => Some([[c(s, 0.0), c(0.0, -s)], [c(0.0, -s), c(s, 0.0)]]),
        GateKind::YHalf => Some([[c(s, 0.0), c(-s, 0.0)], [c(s, 0.0), c(s, 0.0)]]),
        GateKind::WHalf => Some([[c(s, 0.0), c(-0.5, -0.5)], [c(0.5, -0.5), c(s, 0.0)]]),
        GateKind::Identity => Some([[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]]),
        GateKind::ISwapLike { .. } => None,
    }
}

/// Ordered as |n_a n_b⟩ = |00⟩, |01⟩, |10⟩, |11⟩ for sites `(a, b)`.
pub(crate) fn two_matrix(kind: GateKind) -> Option<Gate4> {
    match kind {
        GateKind::ISwapLike { theta, phi } => {
            let z = c(0.0, 0.0);
            let (cs, sn) = (c(theta.cos(), 0.0), c(0.0, -theta.sin()));
            Some([
                [c(1.0, 0.0), z, z, z],
                [z, cs, sn, z],
                [z, sn, cs, z],
                [z, z, z, Complex64::from_polar(1.0, -phi)],
            ])
        }
        _ => None,
    }
}

/// Dense unitary of a gate: 2×2 for single-qubit kinds, 4×4 for `ISwapLike`.
pub fn gate_unitary(kind: GateKind) -> DMatrix<Complex64> {
    if let Some(m) = single_matrix(kind) {
        DMatrix::from_fn(2, 2, |i, j| m[i][j])
    } else {
        let m = two_matrix(kind).expect("two-qubit kind");
        DMatrix::from_fn(4, 4, |i, j| m[i][j])
    }
}

/// Applies a gate in place on the full Fock space.
///
/// For `d > 2` the unitary acts on the two lowest levels of each site and
/// leaves any component with a higher level on a target site untouched.
pub fn apply_gate(psi: &mut StateVector, kind: GateKind, sites: &[usize]) -> Result<()> {
    let basis = psi.basis().clone();
    if !basis.is_full_space() {
        return Err(Error::BasisMismatch("gates need the full Fock space".into()));
    }
    if sites.len() != kind.arity() {
        return Err(Error::InvalidCircuit(format!(
            "{kind:?} acts on {} sites, got {}",
            kind.arity(),
            sites.len()
        )));
    }
    let n = basis.n_sites();
    if let Some(&bad) = sites.iter().find(|&&s| s >= n) {
        return Err(Error::SiteOutOfRange { index: bad, n_sites: n });
    }
    if sites.len() == 2 && sites[0] == sites[1] {
        return Err(Error::InvalidCircuit(format!("repeated site {}", sites[0])));
    }
    let d = basis.local_dim();
    let amps = psi.amplitudes_mut();
    match kind {
        GateKind::Identity => {}
        GateKind::ISwapLike { .. } => {
            let m = two_matrix(kind).expect("two-qubit kind");
            let (pa, pb) = (basis.place(sites[0]) as usize, basis.place(sites[1]) as usize);
            for base in 0..amps.len() {
                let code = base as u64;
                if basis.occupation(code, sites[0]) != 0 || basis.occupation(code, sites[1]) != 0 {
                    continue;
                }
                let idx = [base, base + pb, base + pa, base + pa + pb];
                let v = idx.map(|k| amps[k]);
                for (row, &k) in idx.iter().enumerate() {
                    amps[k] = (0..4).map(|col| m[row][col] * v[col]).sum();
                }
            }
        }
        _ => {
            let m = single_matrix(kind).expect("single-qubit kind");
            let stride = basis.place(sites[0]) as usize;
            let block = stride * d;
            for hi in (0..amps.len()).step_by(block) {
                for base in hi..hi + stride {
                    let (a0, a1) = (amps[base], amps[base + stride]);
                    amps[base] = m[0][0] * a0 + m[0][1] * a1;
                    amps[base + stride] = m[1][0] * a0 + m[1][1] * a1;
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::model::{FockBasis, Sector};

    fn close(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> bool {
        (a - b).iter().all(|x| x.norm() < 1e-14)
    }

    #[test]
    fn unitaries_match_rotation_forms() {
        let s = FRAC_1_SQRT_2;
        let id = DMatrix::<Complex64>::identity(2, 2);
        let x = DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
        let y = DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)]);
        let rot = |axis: &DMatrix<Complex64>| id.scale(s) - axis * c(0.0, s);
        assert!(close(&gate_unitary(GateKind::XHalf), &rot(&x)));
        assert!(close(&gate_unitary(GateKind::YHalf), &rot(&y)));
        let xy = (&x + &y).scale(s);
        assert!(close(&gate_unitary(GateKind::WHalf), &rot(&xy)));
        assert_eq!(gate_unitary(GateKind::Identity), id);
        for kind in GateKind::SINGLE_QUBIT.into_iter().chain([GateKind::iswap()]) {
            let u = gate_unitary(kind);
            let n = u.nrows();
            assert!(close(&(u.adjoint() * &u), &DMatrix::identity(n, n)));
        }
    }

    #[test]
    fn fourth_powers_are_identity_up_to_phase() {
        for kind in GateKind::SINGLE_QUBIT {
            let u = gate_unitary(kind);
            let u4 = &u * &u * &u * &u;
            let phase = u4[(0, 0)];
            assert!((phase.norm() - 1.0).abs() < 1e-14);
            assert!(close(&u4, &DMatrix::<Complex64>::identity(2, 2).map(|v| v * phase)));
        }
    }

    #[test]
    fn iswap_on_10() {
        let basis = Arc::new(FockBasis::new(2, 2, Sector::FullSpace).unwrap());
        let mut psi = StateVector::product(basis, &[1, 0]).unwrap();
        apply_gate(&mut psi, GateKind::iswap(), &[0, 1]).unwrap();
        let a = psi.amplitudes();
        assert!((a[0b01] - c(0.0, -1.0)).norm() < 1e-15);
        assert!(a[0b10].norm() < 1e-15);
    }

    #[test]
    fn double_x_flips() {
        let basis = Arc::new(FockBasis::new(3, 2, Sector::FullSpace).unwrap());
        let mut psi = StateVector::basis_state(basis.clone(), 0).unwrap();
        apply_gate(&mut psi, GateKind::XHalf, &[1]).unwrap();
        apply_gate(&mut psi, GateKind::XHalf, &[1]).unwrap();
        let target = StateVector::product(basis, &[0, 1, 0]).unwrap();
        assert!((target.inner(&psi).unwrap().norm_sqr() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn qutrit_levels_above_one_untouched() {
        let basis = Arc::new(FockBasis::new(2, 3, Sector::FullSpace).unwrap());
        let mut psi = StateVector::product(basis.clone(), &[2, 0]).unwrap();
        let before = psi.clone();
        apply_gate(&mut psi, GateKind::XHalf, &[0]).unwrap();
        apply_gate(&mut psi, GateKind::iswap(), &[0, 1]).unwrap();
        assert_eq!(psi.amplitudes(), before.amplitudes());
        let mut one = StateVector::product(basis.clone(), &[1, 0]).unwrap();
        apply_gate(&mut one, GateKind::iswap(), &[0, 1]).unwrap();
        let swapped = StateVector::product(basis, &[0, 1]).unwrap();
        assert!((swapped.inner(&one).unwrap().norm_sqr() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_targets() {
        let full = Arc::new(FockBasis::new(2, 2, Sector::FullSpace).unwrap());
        let mut psi = StateVector::basis_state(full, 0).unwrap();
        assert!(apply_gate(&mut psi, GateKind::XHalf, &[2]).is_err());
        assert!(apply_gate(&mut psi, GateKind::XHalf, &[0, 1]).is_err());
        assert!(apply_gate(&mut psi, GateKind::iswap(), &[1, 1]).is_err());
        let sector = Arc::new(FockBasis::new(2, 2, Sector::FixedNumber(1)).unwrap());
        let mut s = StateVector::basis_state(sector, 0).unwrap();
        assert!(apply_gate(&mut s, GateKind::Identity, &[0]).is_err());
    }
}
