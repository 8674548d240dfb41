//! Seeded XEB-style random circuits: gate set, sampling, a line-oriented
//! text format, and ideal / device execution.

mod exec;
mod gates;

pub use exec::{run_device, run_ideal, xeb_fidelity_curve, DepthFidelity, ExecutionMode, LayerErrorModel};
pub use gates::{apply_gate, gate_unitary, GateKind};

use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::lattice::{EdgeKind, LatticeSpec};

/// Two-qubit gates per layer.
pub const DEFAULT_PAIRS_PER_LAYER: usize = 4;

/// Default circuit depth.
pub const DEFAULT_LAYERS: usize = 20;

const MAX_MATCHING_ATTEMPTS: usize = 100_000;

/// One single-qubit gate per site, then two-qubit gates on disjoint pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    pub single_gates: Vec<GateKind>,
    pub pairs: Vec<(usize, usize)>,
}

impl Layer {
    fn validate(&self, n_sites: usize) -> Result<()> {
        if self.single_gates.len() != n_sites {
            return Err(Error::InvalidCircuit(format!(
                "layer has {} single-qubit gates for {n_sites} sites",
                self.single_gates.len()
            )));
        }
        if let Some(g) = self.single_gates.iter().find(|g| g.arity() != 1) {
            return Err(Error::InvalidCircuit(format!("{g:?} is not a single-qubit gate")));
        }
        let mut used = vec![false; n_sites];
        for &(i, j) in &self.pairs {
            for s in [i, j] {
                if s >= n_sites {
                    return Err(Error::SiteOutOfRange { index: s, n_sites });
                }
                if used[s] {
                    return Err(Error::InvalidCircuit(format!("site {s} used by two pairs")));
                }
                used[s] = true;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CircuitSpec {
    pub n_sites: usize,
    pub layers: Vec<Layer>,
    pub seed: u64,
    /// Residual-evolution window per layer in μs.
    pub layer_duration: f64,
    pub two_qubit_gate: GateKind,
}

impl CircuitSpec {
    pub fn new(
        n_sites: usize,
        layers: Vec<Layer>,
        seed: u64,
        layer_duration: f64,
        two_qubit_gate: GateKind,
    ) -> Result<Self> {
        let spec = Self {
            n_sites,
            layers,
            seed,
            layer_duration,
            two_qubit_gate,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.layer_duration >= 0.0 && self.layer_duration.is_finite()) {
            return Err(Error::InvalidCircuit(format!(
                "layer duration must be finite and >= 0, got {}",
                self.layer_duration
            )));
        }
        if self.two_qubit_gate.arity() != 2 {
            return Err(Error::InvalidCircuit(format!(
                "{:?} is not a two-qubit gate",
                self.two_qubit_gate
            )));
        }
        self.layers.iter().try_for_each(|l| l.validate(self.n_sites))
    }

    /// Checks that every pair is a nearest-neighbour edge of `lattice`.
    pub fn validate_on(&self, lattice: &LatticeSpec) -> Result<()> {
        if lattice.n_sites() != self.n_sites {
            return Err(Error::InvalidCircuit(format!(
                "circuit over {} sites, lattice has {}",
                self.n_sites,
                lattice.n_sites()
            )));
        }
        let edges = lattice.edges(EdgeKind::Nn);
        for layer in &self.layers {
            for &(i, j) in &layer.pairs {
                let (a, b) = (i.min(j), i.max(j));
                if !edges.iter().any(|e| e.i == a && e.j == b) {
                    return Err(Error::InvalidCircuit(format!("({i},{j}) is not an NN edge")));
                }
            }
        }
        Ok(())
    }

    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    /// One line per layer: `S q0:X q1:W …; T (i,j) (k,l) …`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for layer in &self.layers {
            out.push('S');
            for (q, g) in layer.single_gates.iter().enumerate() {
                let sym = g.symbol().expect("validated single-qubit gate");
                let _ = write!(out, " q{q}:{sym}");
            }
            out.push_str("; T");
            for (i, j) in &layer.pairs {
                let _ = write!(out, " ({i},{j})");
            }
            out.push('\n');
        }
        out
    }

    /// Inverse of [`Self::to_text`]; the remaining fields are supplied.
    pub fn from_text(text: &str, seed: u64, layer_duration: f64, two_qubit_gate: GateKind) -> Result<Self> {
        let layers = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty())
            .map(|(k, l)| parse_layer(l).map_err(|message| Error::Parse { line: k + 1, message }))
            .collect::<Result<Vec<_>>>()?;
        let n_sites = layers.first().map_or(0, |l| l.single_gates.len());
        Self::new(n_sites, layers, seed, layer_duration, two_qubit_gate)
    }
}

fn parse_layer(line: &str) -> std::result::Result<Layer, String> {
    let (s_part, t_part) = line
        .split_once(';')
        .ok_or_else(|| "missing ';' between S and T sections".to_string())?;
    let mut s_tokens = s_part.split_whitespace();
    if s_tokens.next() != Some("S") {
        return Err("layer must start with 'S'".into());
    }
    let mut single_gates = Vec::new();
    for (q, tok) in s_tokens.enumerate() {
        let (site, sym) = tok
            .strip_prefix('q')
            .and_then(|t| t.split_once(':'))
            .ok_or_else(|| format!("bad gate token '{tok}'"))?;
        if site.parse::<usize>().ok() != Some(q) {
            return Err(format!("gate token '{tok}' out of order, expected q{q}"));
        }
        let mut chars = sym.chars();
        let gate = match (chars.next(), chars.next()) {
            (Some(c), None) => GateKind::from_symbol(c),
            _ => None,
        }
        .ok_or_else(|| format!("unknown gate '{sym}'"))?;
        single_gates.push(gate);
    }
    let mut t_tokens = t_part.split_whitespace();
    if t_tokens.next() != Some("T") {
        return Err("two-qubit section must start with 'T'".into());
    }
    let pairs = t_tokens
        .map(|tok| {
            let inner = tok
                .strip_prefix('(')
                .and_then(|t| t.strip_suffix(')'))
                .and_then(|t| t.split_once(','))
                .ok_or_else(|| format!("bad pair token '{tok}'"))?;
            let parse = |s: &str| s.parse::<usize>().map_err(|e| format!("bad site in '{tok}': {e}"));
            Ok((parse(inner.0)?, parse(inner.1)?))
        })
        .collect::<std::result::Result<Vec<_>, String>>()?;
    Ok(Layer { single_gates, pairs })
}

/// Draws a random circuit from `(lattice, n_layers, seed)`.
///
/// Each layer draws one gate per site uniformly from
/// [`GateKind::SINGLE_QUBIT`], then a matching of `pairs_per_layer` disjoint
/// NN edges by shuffled greedy selection, rejecting shuffles that stop short.
pub fn sample_xeb_circuit(
    lattice: &LatticeSpec,
    n_layers: usize,
    seed: u64,
    pairs_per_layer: usize,
    layer_duration: f64,
) -> Result<CircuitSpec> {
    let n = lattice.n_sites();
    let edges: Vec<(usize, usize)> = lattice.edges(EdgeKind::Nn).iter().map(|e| (e.i, e.j)).collect();
    if !has_matching(&edges, n, pairs_per_layer) {
        return Err(Error::InvalidCircuit(format!(
            "lattice has no {pairs_per_layer} disjoint NN edges"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut layers = Vec::with_capacity(n_layers);
    for _ in 0..n_layers {
        let single_gates = (0..n)
            .map(|_| GateKind::SINGLE_QUBIT[rng.random_range(0..GateKind::SINGLE_QUBIT.len())])
            .collect();
        let pairs = sample_matching(&edges, n, pairs_per_layer, &mut rng)?;
        layers.push(Layer { single_gates, pairs });
    }
    CircuitSpec::new(n, layers, seed, layer_duration, GateKind::iswap())
}

fn sample_matching<R: Rng>(
    edges: &[(usize, usize)],
    n_sites: usize,
    size: usize,
    rng: &mut R,
) -> Result<Vec<(usize, usize)>> {
    let mut order = edges.to_vec();
    for _ in 0..MAX_MATCHING_ATTEMPTS {
        order.shuffle(rng);
        let mut used = vec![false; n_sites];
        let mut picked = Vec::with_capacity(size);
        for &(i, j) in &order {
            if picked.len() == size {
                break;
            }
            if !used[i] && !used[j] {
                used[i] = true;
                used[j] = true;
                picked.push((i, j));
            }
        }
        if picked.len() == size {
            picked.sort_unstable();
            return Ok(picked);
        }
    }
    Err(Error::InvalidCircuit(format!(
        "no matching of size {size} after {MAX_MATCHING_ATTEMPTS} draws"
    )))
}

fn has_matching(edges: &[(usize, usize)], n_sites: usize, size: usize) -> bool {
    fn search(edges: &[(usize, usize)], used: &mut [bool], need: usize) -> bool {
        if need == 0 {
            return true;
        }
        if edges.len() < need {
            return false;
        }
        let (i, j) = edges[0];
        if !used[i] && !used[j] {
            used[i] = true;
            used[j] = true;
            let found = search(&edges[1..], used, need - 1);
            used[i] = false;
            used[j] = false;
            if found {
                return true;
            }
        }
        search(&edges[1..], used, need)
    }
    search(edges, &mut vec![false; n_sites], size)
}
