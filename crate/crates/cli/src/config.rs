//! Experiment configuration: a JSON document merged as
//! built-in defaults ← preset ← file.

use std::path::Path;

use mbl_core::engine::{Method, PropagatorConfig, DEFAULT_GATE_TIME_US};
use mbl_core::model::{ALPHA_GOLDEN, ALPHA_SQRT7, DEFAULT_ANHARMONICITY_MHZ, DEFAULT_COUPLING_MHZ, DEFAULT_W_BASE_GHZ};
use mbl_core::{EdgeKind, LatticeSpec, ModelParams};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};
use crate::presets;

pub const SCHEMA_VERSION: u32 = 1;

pub const DEFAULT_R_VALUES: [f64; 7] = [0.03, 0.05, 0.1, 0.3, 0.5, 1.0, 2.0];
pub const DEFAULT_SEEDS: usize = 10;
pub const DEFAULT_HORIZON: usize = 50;
pub const DEFAULT_N_TRAJ: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Idle,
    Xeb,
    Spectrum,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Idle => "idle",
            Mode::Xeb => "xeb",
            Mode::Spectrum => "spectrum",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum LatticeConfig {
    Chain { n_sites: usize },
    Grid { rows: usize, cols: usize },
}

impl LatticeConfig {
    pub fn build(&self) -> CliResult<LatticeSpec> {
        let spec = match *self {
            LatticeConfig::Chain { n_sites } => LatticeSpec::chain(n_sites),
            LatticeConfig::Grid { rows, cols } => LatticeSpec::grid(rows, cols),
        };
        spec.map_err(|e| CliError::Config(format!("lattice: {e}")))
    }
}

/// Residual couplings included in the Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Couplings {
    Nn,
    NnNnn,
}

impl Couplings {
    pub fn edge_kinds(self) -> &'static [EdgeKind] {
        match self {
            Couplings::Nn => &[EdgeKind::Nn],
            Couplings::NnNnn => &[EdgeKind::Nn, EdgeKind::Nnn],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodName {
    Lanczos,
    Chebyshev,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub w_base_ghz: f64,
    pub h: f64,
    pub anharmonicity: f64,
    pub local_dim: usize,
    pub alpha_x: f64,
    pub alpha_y: f64,
    pub phi: f64,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self {
            w_base_ghz: DEFAULT_W_BASE_GHZ,
            h: DEFAULT_COUPLING_MHZ,
            anharmonicity: DEFAULT_ANHARMONICITY_MHZ,
            local_dim: 2,
            alpha_x: ALPHA_GOLDEN,
            alpha_y: ALPHA_SQRT7,
            phi: 0.0,
        }
    }
}

impl ModelConfig {
    pub fn params(&self, r: f64) -> ModelParams {
        ModelParams {
            w_base_ghz: self.w_base_ghz,
            h: self.h,
            r,
            anharmonicity: self.anharmonicity,
            local_dim: self.local_dim,
            alpha_x: self.alpha_x,
            alpha_y: self.alpha_y,
            phi: self.phi,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PropagatorSettings {
    pub method: MethodName,
    pub krylov_dim: usize,
    pub tolerance: f64,
    pub max_substeps: usize,
}

impl Default for PropagatorSettings {
    fn default() -> Self {
        let d = PropagatorConfig::default();
        Self {
            method: MethodName::Chebyshev,
            krylov_dim: d.krylov_dim,
            tolerance: d.step_tolerance,
            max_substeps: d.max_substeps,
        }
    }
}

impl PropagatorSettings {
    pub fn build(&self) -> PropagatorConfig {
        PropagatorConfig {
            krylov_dim: self.krylov_dim,
            step_tolerance: self.tolerance,
            max_substeps: self.max_substeps,
            method: match self.method {
                MethodName::Lanczos => Method::Lanczos,
                MethodName::Chebyshev => Method::Chebyshev,
            },
        }
    }
}

/// Fully resolved configuration; its JSON form is the canonical config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub mode: Mode,
    pub preset: Option<String>,
    pub lattice: LatticeConfig,
    /// Defaults to NN for idle/XEB and NN+NNN for spectrum.
    pub couplings: Option<Couplings>,
    pub model: ModelConfig,
    pub r_values: Vec<f64>,
    pub ns_values: Vec<u32>,
    pub n_layers: usize,
    pub pairs_per_layer: usize,
    pub tau_us: f64,
    pub horizon: usize,
    pub seeds: Vec<u64>,
    pub n_traj: usize,
    pub compensate_diagonal: bool,
    /// Subsystem A for the Rényi entropy; defaults to the half system.
    pub bipartition: Option<Vec<usize>>,
    pub propagator: PropagatorSettings,
    pub output_path: Option<String>,
}

/// Partial configuration as read from a file or a preset.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigPatch {
    pub schema_version: Option<u32>,
    pub mode: Option<Mode>,
    pub preset: Option<String>,
    pub lattice: Option<LatticeConfig>,
    pub couplings: Option<Couplings>,
    pub model: Option<ModelPatch>,
    pub r_values: Option<Vec<f64>>,
    pub ns_values: Option<Vec<u32>>,
    pub n_layers: Option<usize>,
    pub pairs_per_layer: Option<usize>,
    pub tau_us: Option<f64>,
    pub horizon: Option<usize>,
    pub seeds: Option<Vec<u64>>,
    pub n_traj: Option<usize>,
    pub compensate_diagonal: Option<bool>,
    pub bipartition: Option<Vec<usize>>,
    pub propagator: Option<PropagatorPatch>,
    pub output_path: Option<String>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelPatch {
    pub w_base_ghz: Option<f64>,
    pub h: Option<f64>,
    pub anharmonicity: Option<f64>,
    pub local_dim: Option<usize>,
    pub alpha_x: Option<f64>,
    pub alpha_y: Option<f64>,
    pub phi: Option<f64>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PropagatorPatch {
    pub method: Option<MethodName>,
    pub krylov_dim: Option<usize>,
    pub tolerance: Option<f64>,
    pub max_substeps: Option<usize>,
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

impl ExperimentConfig {
    pub fn defaults(mode: Mode) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            mode,
            preset: None,
            lattice: LatticeConfig::Chain { n_sites: 16 },
            couplings: None,
            model: ModelConfig::default(),
            r_values: DEFAULT_R_VALUES.to_vec(),
            ns_values: vec![0],
            n_layers: mbl_core::circuits::DEFAULT_LAYERS,
            pairs_per_layer: mbl_core::circuits::DEFAULT_PAIRS_PER_LAYER,
            tau_us: DEFAULT_GATE_TIME_US,
            horizon: DEFAULT_HORIZON,
            seeds: (0..DEFAULT_SEEDS as u64).collect(),
            n_traj: DEFAULT_N_TRAJ,
            compensate_diagonal: true,
            bipartition: None,
            propagator: PropagatorSettings::default(),
            output_path: None,
        }
    }

    pub fn apply(&mut self, patch: &ConfigPatch) {
        let p = patch.clone();
        set(&mut self.schema_version, p.schema_version);
        set(&mut self.mode, p.mode);
        if p.preset.is_some() {
            self.preset = p.preset;
        }
        set(&mut self.lattice, p.lattice);
        if p.couplings.is_some() {
            self.couplings = p.couplings;
        }
        if let Some(m) = p.model {
            set(&mut self.model.w_base_ghz, m.w_base_ghz);
            set(&mut self.model.h, m.h);
            set(&mut self.model.anharmonicity, m.anharmonicity);
            set(&mut self.model.local_dim, m.local_dim);
            set(&mut self.model.alpha_x, m.alpha_x);
            set(&mut self.model.alpha_y, m.alpha_y);
            set(&mut self.model.phi, m.phi);
        }
        set(&mut self.r_values, p.r_values);
        set(&mut self.ns_values, p.ns_values);
        set(&mut self.n_layers, p.n_layers);
        set(&mut self.pairs_per_layer, p.pairs_per_layer);
        set(&mut self.tau_us, p.tau_us);
        set(&mut self.horizon, p.horizon);
        set(&mut self.seeds, p.seeds);
        set(&mut self.n_traj, p.n_traj);
        set(&mut self.compensate_diagonal, p.compensate_diagonal);
        if p.bipartition.is_some() {
            self.bipartition = p.bipartition;
        }
        if let Some(q) = p.propagator {
            set(&mut self.propagator.method, q.method);
            set(&mut self.propagator.krylov_dim, q.krylov_dim);
            set(&mut self.propagator.tolerance, q.tolerance);
            set(&mut self.propagator.max_substeps, q.max_substeps);
        }
        if p.output_path.is_some() {
            self.output_path = p.output_path;
        }
    }

    /// Resolves `mode` with an optional file patch and preset override.
    pub fn resolve(mode: Mode, file: &ConfigPatch, preset_override: Option<&str>) -> CliResult<Self> {
        match file.schema_version {
            Some(SCHEMA_VERSION) => {}
            Some(v) => {
                return Err(CliError::Config(format!(
                    "unsupported schema_version {v}, expected {SCHEMA_VERSION}"
                )))
            }
            None => return Err(CliError::Config("missing schema_version".into())),
        }
        if let Some(m) = file.mode {
            if m != mode {
                return Err(CliError::Config(format!(
                    "config mode '{}' does not match command '{}'",
                    m.name(),
                    mode.name()
                )));
            }
        }
        let preset = preset_override.map(str::to_string).or_else(|| file.preset.clone());
        let mut cfg = Self::defaults(mode);
        if let Some(name) = &preset {
            cfg.apply(&presets::load_preset(name)?);
        }
        cfg.apply(file);
        cfg.preset = preset;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> CliResult<()> {
        let fail = |m: String| Err(CliError::Config(m));
        if self.schema_version != SCHEMA_VERSION {
            return fail(format!("unsupported schema_version {}", self.schema_version));
        }
        if let Some(name) = &self.preset {
            presets::load_preset(name)?;
        }
        let lattice = self.lattice.build()?;
        if self.r_values.is_empty() {
            return fail("r_values must be nonempty".into());
        }
        for &r in &self.r_values {
            self.model
                .params(r)
                .validate()
                .map_err(|e| CliError::Config(format!("model at r={r}: {e}")))?;
        }
        if self.horizon == 0 {
            return fail("horizon must be >= 1".into());
        }
        if !(self.tau_us >= 0.0 && self.tau_us.is_finite()) {
            return fail(format!("tau_us must be finite and >= 0, got {}", self.tau_us));
        }
        if self.mode == Mode::Xeb {
            if self.ns_values.is_empty() || self.seeds.is_empty() {
                return fail("xeb needs nonempty ns_values and seeds".into());
            }
            for &ns in &self.ns_values {
                mbl_core::noise::noise_from_ns(ns).map_err(|e| CliError::Config(e.to_string()))?;
            }
            if self.n_traj == 0 || self.n_layers == 0 {
                return fail("n_traj and n_layers must be >= 1".into());
            }
        }
        if let Some(sites) = &self.bipartition {
            mbl_core::observables::Bipartition::new(sites.clone(), lattice.n_sites())
                .map_err(|e| CliError::Config(e.to_string()))?;
        }
        self.propagator
            .build()
            .validate()
            .map_err(|e| CliError::Config(format!("propagator: {e}")))?;
        Ok(())
    }

    pub fn couplings(&self) -> Couplings {
        self.couplings.unwrap_or(match self.mode {
            Mode::Spectrum => Couplings::NnNnn,
            Mode::Idle | Mode::Xeb => Couplings::Nn,
        })
    }

    /// Canonical pretty JSON.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config is serializable")
    }

    /// SHA-256 of the compact canonical JSON, hex encoded.
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("config is serializable");
        hex::encode(Sha256::digest(&bytes))
    }
}

pub fn parse_patch(text: &str) -> CliResult<ConfigPatch> {
    serde_json::from_str(text).map_err(|e| CliError::Config(format!("invalid config: {e}")))
}

pub fn read_patch(path: &Path) -> CliResult<ConfigPatch> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    parse_patch(&text)
}
