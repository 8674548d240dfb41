//! Named parameter sets.

use mbl_core::model::{quasiperiodic_1d, ALPHA_GOLDEN, ALPHA_SQRT7, DEFAULT_COUPLING_MHZ, DEFAULT_W_BASE_GHZ};
use mbl_core::{EdgeKind, LatticeSpec};

use crate::config::{ConfigPatch, LatticeConfig, ModelPatch};
use crate::error::{CliError, CliResult};

pub const PRESET_NAMES: [&str; 4] = ["paper-1d", "paper-2d", "google-like", "ibm-like"];

/// Mean adjacent detuning difference of the Google-like device, MHz.
pub const GOOGLE_LIKE_GAP_MHZ: f64 = 100.0;
/// Mean adjacent detuning difference of the IBM-like device, MHz.
pub const IBM_LIKE_GAP_MHZ: f64 = 500.0;

const CHAIN_SITES: usize = 16;

fn chain_model() -> ModelPatch {
    ModelPatch {
        w_base_ghz: Some(DEFAULT_W_BASE_GHZ),
        h: Some(DEFAULT_COUPLING_MHZ),
        alpha_x: Some(ALPHA_GOLDEN),
        phi: Some(0.0),
        ..ModelPatch::default()
    }
}

/// `r = h / W` with `W` chosen so that the mean `|W_i − W_j|` over NN bonds
/// of the 16-site chain equals `gap_mhz`.
pub fn ratio_for_adjacent_gap(gap_mhz: f64, h: f64) -> f64 {
    let lattice = LatticeSpec::chain(CHAIN_SITES).expect("valid chain");
    let unit = quasiperiodic_1d(1.0, ALPHA_GOLDEN, 0.0, CHAIN_SITES);
    let pairs = lattice.edges(EdgeKind::Nn).into_iter().map(|e| (e.i, e.j));
    let w = gap_mhz / unit.mean_abs_difference(pairs);
    h / w
}

pub fn load_preset(name: &str) -> CliResult<ConfigPatch> {
    let chain = Some(LatticeConfig::Chain { n_sites: CHAIN_SITES });
    let patch = match name {
        "paper-1d" => ConfigPatch {
            lattice: chain,
            model: Some(chain_model()),
            ..ConfigPatch::default()
        },
        "paper-2d" => ConfigPatch {
            lattice: Some(LatticeConfig::Grid { rows: 4, cols: 4 }),
            model: Some(ModelPatch {
                alpha_y: Some(ALPHA_SQRT7),
                ..chain_model()
            }),
            ..ConfigPatch::default()
        },
        "google-like" | "ibm-like" => {
            let gap = if name == "google-like" {
                GOOGLE_LIKE_GAP_MHZ
            } else {
                IBM_LIKE_GAP_MHZ
            };
            ConfigPatch {
                lattice: chain,
                model: Some(chain_model()),
                r_values: Some(vec![ratio_for_adjacent_gap(gap, DEFAULT_COUPLING_MHZ)]),
                ..ConfigPatch::default()
            }
        }
        other => {
            return Err(CliError::Config(format!(
                "unknown preset '{other}', expected one of {}",
                PRESET_NAMES.join(", ")
            )))
        }
    };
    Ok(patch)
}
