//! Fock bases over `n_sites` bosonic modes truncated to `local_dim` levels.
//!
//! Occupation strings are encoded as base-`local_dim` integers with site 0 as
//! the most significant digit, so numeric order of codes is lexicographic
//! order of strings. The full space ranks a state by its code; a fixed-number
//! sector stores its sorted codes and ranks by binary search.

use crate::error::{Error, Result};

/// Largest full-space dimension the basis will enumerate.
pub const MAX_FULL_DIMENSION: usize = 1 << 26;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sector {
    FixedNumber(usize),
    FullSpace,
}

#[derive(Debug, Clone)]
pub struct FockBasis {
    n_sites: usize,
    local_dim: usize,
    sector: Sector,
    /// `local_dim^(n_sites - 1 - site)` for each site.
    place: Vec<u64>,
    /// Sorted codes; empty for the full space.
    codes: Vec<u64>,
    dimension: usize,
}

impl FockBasis {
    pub fn new(n_sites: usize, local_dim: usize, sector: Sector) -> Result<Self> {
        if n_sites == 0 {
            return Err(Error::InvalidBasis("need at least one site".into()));
        }
        if local_dim < 2 {
            return Err(Error::InvalidBasis(format!(
                "local dimension must be >= 2, got {local_dim}"
            )));
        }
        let full = (local_dim as u64)
            .checked_pow(n_sites as u32)
            .filter(|&f| f <= MAX_FULL_DIMENSION as u64)
            .ok_or(Error::GuardExceeded {
                what: "full Fock space",
                dimension: usize::MAX,
                limit: MAX_FULL_DIMENSION,
            })?;
        let mut place = vec![1u64; n_sites];
        for s in (0..n_sites.saturating_sub(1)).rev() {
            place[s] = place[s + 1] * local_dim as u64;
        }
        let (codes, dimension) = match sector {
            Sector::FullSpace => (Vec::new(), full as usize),
            Sector::FixedNumber(n) => {
                let max = n_sites * (local_dim - 1);
                if n > max {
                    return Err(Error::InvalidBasis(format!(
                        "{n} excitations do not fit in {n_sites} sites of dimension {local_dim}"
                    )));
                }
                let mut codes = Vec::new();
                enumerate_fixed(&place, local_dim, 0, n, 0, &mut codes);
                let dim = codes.len();
                (codes, dim)
            }
        };
        Ok(Self {
            n_sites,
            local_dim,
            sector,
            place,
            codes,
            dimension,
        })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn local_dim(&self) -> usize {
        self.local_dim
    }

    pub fn sector(&self) -> Sector {
        self.sector
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn is_full_space(&self) -> bool {
        self.sector == Sector::FullSpace
    }

    /// True when both bases describe the same space in the same order.
    pub fn same_space(&self, other: &FockBasis) -> bool {
        self.n_sites == other.n_sites && self.local_dim == other.local_dim && self.sector == other.sector
    }

    /// Code of basis state `k`.
    pub fn code(&self, k: usize) -> u64 {
        match self.sector {
            Sector::FullSpace => k as u64,
            Sector::FixedNumber(_) => self.codes[k],
        }
    }

    pub fn rank_code(&self, code: u64) -> Option<usize> {
        match self.sector {
            Sector::FullSpace => ((code as usize) < self.dimension).then_some(code as usize),
            Sector::FixedNumber(_) => self.codes.binary_search(&code).ok(),
        }
    }

    /// Digit of `site` in `code`.
    #[inline]
    pub fn occupation(&self, code: u64, site: usize) -> usize {
        ((code / self.place[site]) % self.local_dim as u64) as usize
    }

    /// Place value of `site`; adding it to a code raises that site by one.
    #[inline]
    pub fn place(&self, site: usize) -> u64 {
        self.place[site]
    }

    pub fn encode(&self, occupations: &[usize]) -> Result<u64> {
        if occupations.len() != self.n_sites {
            return Err(Error::DimensionMismatch {
                expected: self.n_sites,
                actual: occupations.len(),
            });
        }
        let mut code = 0u64;
        for (s, &n) in occupations.iter().enumerate() {
            if n >= self.local_dim {
                return Err(Error::NotRepresentable(format!(
                    "site {s} occupation {n} >= local dimension {}",
                    self.local_dim
                )));
            }
            code += n as u64 * self.place[s];
        }
        Ok(code)
    }

    pub fn rank(&self, occupations: &[usize]) -> Result<usize> {
        let code = self.encode(occupations)?;
        self.rank_code(code)
            .ok_or_else(|| Error::NotRepresentable(format!("{occupations:?} is outside sector {:?}", self.sector)))
    }

    pub fn unrank(&self, k: usize) -> Vec<usize> {
        let code = self.code(k);
        (0..self.n_sites).map(|s| self.occupation(code, s)).collect()
    }

    pub fn total_occupation(&self, k: usize) -> usize {
        let code = self.code(k);
        (0..self.n_sites).map(|s| self.occupation(code, s)).sum()
    }
}

fn enumerate_fixed(place: &[u64], local_dim: usize, site: usize, remaining: usize, prefix: u64, out: &mut Vec<u64>) {
    let n_sites = place.len();
    if site == n_sites {
        if remaining == 0 {
            out.push(prefix);
        }
        return;
    }
    let capacity_after = (n_sites - site - 1) * (local_dim - 1);
    let lo = remaining.saturating_sub(capacity_after);
    let hi = remaining.min(local_dim - 1);
    for n in lo..=hi {
        enumerate_fixed(
            place,
            local_dim,
            site + 1,
            remaining - n,
            prefix + n as u64 * place[site],
            out,
        );
    }
}
