//! Fidelity, inverse participation ratio, second Rényi entropy of a
//! subsystem, and adjacent-gap-ratio level statistics.

use std::collections::HashMap;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{FockBasis, SparseHamiltonian};
use crate::state::StateVector;

/// Largest sector dimension diagonalized for level statistics.
pub const GAP_RATIO_LIMIT: usize = 20_000;

/// Sites of subsystem A; the remainder is B.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bipartition {
    sites: Vec<usize>,
    n_sites: usize,
}

impl Bipartition {
    pub fn new(mut sites: Vec<usize>, n_sites: usize) -> Result<Self> {
        sites.sort_unstable();
        sites.dedup();
        if sites.is_empty() || sites.len() >= n_sites {
            return Err(Error::InvalidBipartition(format!(
                "subsystem must be a nonempty proper subset of {n_sites} sites"
            )));
        }
        if let Some(&bad) = sites.iter().find(|&&s| s >= n_sites) {
            return Err(Error::InvalidBipartition(format!(
                "site {bad} out of range for {n_sites} sites"
            )));
        }
        Ok(Self { sites, n_sites })
    }

    /// Sites `0..n_sites/2`.
    pub fn half_chain(n_sites: usize) -> Result<Self> {
        Self::new((0..n_sites / 2).collect(), n_sites)
    }

    /// The left `n_cols/2` columns of a row-major grid.
    pub fn left_columns(n_rows: usize, n_cols: usize) -> Result<Self> {
        let sites = (0..n_rows)
            .flat_map(|r| (0..n_cols / 2).map(move |c| r * n_cols + c))
            .collect();
        Self::new(sites, n_rows * n_cols)
    }

    pub fn sites(&self) -> &[usize] {
        &self.sites
    }

    pub fn complement(&self) -> Self {
        let sites = (0..self.n_sites).filter(|s| !self.sites.contains(s)).collect();
        Self {
            sites,
            n_sites: self.n_sites,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralStats {
    pub mean_gap_ratio: f64,
    /// Number of gap ratios averaged.
    pub level_count: usize,
    /// Ratios with both gaps zero, counted as 0.
    pub degenerate_count: usize,
}

/// `|⟨a|b⟩|²`.
pub fn fidelity(a: &StateVector, b: &StateVector) -> Result<f64> {
    Ok(a.inner(b)?.norm_sqr())
}

/// `Σ_n |c_n|⁴` in the Fock basis.
pub fn ipr(psi: &StateVector) -> f64 {
    psi.amplitudes().iter().map(|c| c.norm_sqr().powi(2)).sum()
}

/// `S₂ = −log₂ Tr ρ_A²` for a pure state.
///
/// Amplitudes are regrouped by their configuration on the larger side, so
/// only the smaller reduced density matrix is formed.
pub fn renyi2(psi: &StateVector, part: &Bipartition) -> Result<f64> {
    let basis = psi.basis();
    if part.n_sites != basis.n_sites() {
        return Err(Error::InvalidBipartition(format!(
            "bipartition over {} sites, state over {}",
            part.n_sites,
            basis.n_sites()
        )));
    }
    let comp = part.complement();
    let (small, large) = if part.sites.len() <= comp.sites.len() {
        (part, &comp)
    } else {
        (&comp, part)
    };
    let d = basis.local_dim();
    let small_dim = d.pow(small.sites.len() as u32);

    let mut groups: HashMap<u64, Vec<(usize, Complex64)>> = HashMap::new();
    for (k, &c) in psi.amplitudes().iter().enumerate() {
        if c == Complex64::new(0.0, 0.0) {
            continue;
        }
        let code = basis.code(k);
        let a = subsystem_index(basis, code, &small.sites);
        let b = subsystem_index(basis, code, &large.sites) as u64;
        groups.entry(b).or_default().push((a, c));
    }

    let mut rho = DMatrix::<Complex64>::zeros(small_dim, small_dim);
    for entries in groups.values() {
        for &(a1, c1) in entries {
            for &(a2, c2) in entries {
                rho[(a1, a2)] += c1 * c2.conj();
            }
        }
    }
    let purity: f64 = rho.iter().map(|x| x.norm_sqr()).sum();
    if !(purity > 0.0) {
        return Err(Error::InvalidNorm(psi.norm()));
    }
    Ok((-purity.log2()).max(0.0))
}

fn subsystem_index(basis: &FockBasis, code: u64, sites: &[usize]) -> usize {
    let d = basis.local_dim();
    sites.iter().fold(0usize, |acc, &s| acc * d + basis.occupation(code, s))
}

/// Mean adjacent-gap ratio `min(δ_n, δ_{n+1}) / max(δ_n, δ_{n+1})` over the
/// middle half of a sorted spectrum.
pub fn gap_ratio_of_levels(levels: &[f64]) -> SpectralStats {
    let mut sorted = levels.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let middle = &sorted[n / 4..n - n / 4];
    let gaps: Vec<f64> = middle.windows(2).map(|w| w[1] - w[0]).collect();
    let mut sum = 0.0;
    let mut count = 0;
    let mut degenerate = 0;
    for w in gaps.windows(2) {
        let (lo, hi) = if w[0] <= w[1] { (w[0], w[1]) } else { (w[1], w[0]) };
        if hi <= 0.0 {
            degenerate += 1;
        } else {
            sum += lo / hi;
        }
        count += 1;
    }
    SpectralStats {
        mean_gap_ratio: if count == 0 { 0.0 } else { sum / count as f64 },
        level_count: count,
        degenerate_count: degenerate,
    }
}

/// Level statistics of one symmetry sector by dense diagonalization.
pub fn gap_ratio(h: &SparseHamiltonian) -> Result<SpectralStats> {
    let dim = h.dimension();
    if dim > GAP_RATIO_LIMIT {
        return Err(Error::GuardExceeded {
            what: "gap-ratio diagonalization",
            dimension: dim,
            limit: GAP_RATIO_LIMIT,
        });
    }
    let levels: Vec<f64> = h.matrix().to_dense().symmetric_eigenvalues().iter().copied().collect();
    Ok(gap_ratio_of_levels(&levels))
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::model::Sector;

    fn full(n: usize) -> Arc<FockBasis> {
        Arc::new(FockBasis::new(n, 2, Sector::FullSpace).unwrap())
    }

    fn state(basis: &Arc<FockBasis>, amps: &[(usize, Complex64)]) -> StateVector {
        let mut v = vec![Complex64::new(0.0, 0.0); basis.dimension()];
        for &(k, c) in amps {
            v[k] = c;
        }
        StateVector::new(basis.clone(), v).unwrap()
    }

    fn re(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn fidelity_examples() {
        let b = full(2);
        let a = state(&b, &[(1, re(1.0))]);
        let o = state(&b, &[(2, re(1.0))]);
        assert_eq!(fidelity(&a, &a).unwrap(), 1.0);
        assert_eq!(fidelity(&a, &o).unwrap(), 0.0);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mix = state(&b, &[(1, re(s)), (2, re(s))]);
        assert!((fidelity(&a, &mix).unwrap() - 0.5).abs() < 1e-15);
        let other = Arc::new(FockBasis::new(2, 2, Sector::FixedNumber(1)).unwrap());
        let wrong = StateVector::basis_state(other, 0).unwrap();
        assert!(fidelity(&a, &wrong).is_err());
    }

    #[test]
    fn ipr_examples() {
        let b = full(3);
        assert_eq!(ipr(&state(&b, &[(4, re(1.0))])), 1.0);
        let u = 1.0 / (8f64).sqrt();
        let uniform = state(&b, &(0..8).map(|k| (k, re(u))).collect::<Vec<_>>());
        assert!((ipr(&uniform) - 0.125).abs() < 1e-15);
        let two = state(&full(1), &[(0, re(0.8f64.sqrt())), (1, re(0.2f64.sqrt()))]);
        assert!((ipr(&two) - 0.68).abs() < 1e-15);
    }

    #[test]
    fn renyi_examples() {
        let b = full(4);
        let neel = state(&b, &[(0b0101, re(1.0))]);
        for cut in [vec![0], vec![0, 1], vec![1, 3]] {
            assert_eq!(renyi2(&neel, &Bipartition::new(cut, 4).unwrap()).unwrap(), 0.0);
        }
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let bell = state(&full(2), &[(0b01, re(s)), (0b10, re(s))]);
        let one = renyi2(&bell, &Bipartition::new(vec![0], 2).unwrap()).unwrap();
        assert!((one - 1.0).abs() < 1e-12);
        let ghz = state(&b, &[(0, re(s)), (15, re(s))]);
        let g = renyi2(&ghz, &Bipartition::new(vec![0, 1], 4).unwrap()).unwrap();
        assert!((g - 1.0).abs() < 1e-12);
    }

    #[test]
    fn renyi_in_number_sector() {
        let b = Arc::new(FockBasis::new(2, 2, Sector::FixedNumber(1)).unwrap());
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let bell = StateVector::new(b, vec![re(s), re(s)]).unwrap();
        let v = renyi2(&bell, &Bipartition::new(vec![1], 2).unwrap()).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bipartition_validation() {
        assert!(Bipartition::new(vec![], 4).is_err());
        assert!(Bipartition::new(vec![0, 1, 2, 3], 4).is_err());
        assert!(Bipartition::new(vec![5], 4).is_err());
        assert_eq!(Bipartition::half_chain(16).unwrap().sites(), &[0, 1, 2, 3, 4, 5, 6, 7]);
        assert_eq!(
            Bipartition::left_columns(4, 4).unwrap().sites(),
            &[0, 1, 4, 5, 8, 9, 12, 13]
        );
        let b = full(3);
        let psi = state(&b, &[(0, re(1.0))]);
        assert!(renyi2(&psi, &Bipartition::new(vec![0], 4).unwrap()).is_err());
    }

    #[test]
    fn gap_ratio_equal_spacing_and_degeneracy() {
        let levels: Vec<f64> = (0..40).map(|k| k as f64 * 0.7).collect();
        let s = gap_ratio_of_levels(&levels);
        assert!((s.mean_gap_ratio - 1.0).abs() < 1e-12);
        assert_eq!(s.degenerate_count, 0);
        let flat = vec![1.0; 12];
        let f = gap_ratio_of_levels(&flat);
        assert_eq!(f.mean_gap_ratio, 0.0);
        assert_eq!(f.degenerate_count, f.level_count);
    }
}
