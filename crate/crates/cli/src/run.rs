//! Idle, XEB and spectral sweeps.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use mbl_core::circuits::{sample_xeb_circuit, xeb_fidelity_curve, ExecutionMode};
use mbl_core::engine::evolve;
use mbl_core::model::{build_hamiltonian, neel_state};
use mbl_core::noise::{mean_and_stderr, noise_from_ns, TrajectoryConfig};
use mbl_core::observables::{fidelity, gap_ratio, ipr, renyi2, Bipartition};
use mbl_core::{FockBasis, LatticeKind, LatticeSpec, Sector, SparseHamiltonian};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::{ExperimentConfig, Mode, SCHEMA_VERSION};
use crate::error::{CliError, CliResult};
use crate::output::{render_csv, summary_path, write_file, ResultRow};

/// Rows in output order plus the per-point JSON summary.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub rows: Vec<ResultRow>,
    pub summary: Vec<Value>,
}

fn hamiltonian(cfg: &ExperimentConfig, lattice: &LatticeSpec, r: f64, sector: Sector) -> CliResult<SparseHamiltonian> {
    let params = cfg.model.params(r);
    params.validate()?;
    let basis = Arc::new(FockBasis::new(lattice.n_sites(), params.local_dim, sector)?);
    let pot = params.potential(lattice)?;
    Ok(build_hamiltonian(
        &params,
        lattice,
        &pot,
        &basis,
        cfg.couplings().edge_kinds(),
    )?)
}

fn default_bipartition(lattice: &LatticeSpec) -> CliResult<Bipartition> {
    Ok(match lattice.kind() {
        LatticeKind::Chain => Bipartition::half_chain(lattice.n_sites())?,
        LatticeKind::Grid => Bipartition::left_columns(lattice.n_rows(), lattice.n_cols())?,
    })
}

fn half_filling(lattice: &LatticeSpec) -> Sector {
    Sector::FixedNumber(lattice.n_sites() / 2)
}

/// Néel-state quench in the half-filling sector: fidelity, IPR and Rényi-2
/// at `k·τ` for `k = 1..=horizon`.
pub fn run_idle(cfg: &ExperimentConfig) -> CliResult<RunOutput> {
    let lattice = cfg.lattice.build()?;
    let part = match &cfg.bipartition {
        Some(sites) => Bipartition::new(sites.clone(), lattice.n_sites())?,
        None => default_bipartition(&lattice)?,
    };
    let prop = cfg.propagator.build();
    let per_r = cfg
        .r_values
        .par_iter()
        .map(|&r| -> CliResult<(Vec<ResultRow>, Value)> {
            let h = hamiltonian(cfg, &lattice, r, half_filling(&lattice))?;
            let psi0 = neel_state(h.basis())?;
            let mut psi = psi0.clone();
            let mut rows = Vec::with_capacity(cfg.horizon);
            for k in 1..=cfg.horizon {
                psi = evolve(&h, &psi, cfg.tau_us, &prop)?;
                rows.push(ResultRow {
                    step: Some(k),
                    time_us: Some(k as f64 * cfg.tau_us),
                    fidelity: Some(fidelity(&psi0, &psi)?),
                    ipr: Some(ipr(&psi)),
                    renyi2: Some(renyi2(&psi, &part)?),
                    ..ResultRow::new("idle", r)
                });
            }
            let last = rows.last().expect("horizon >= 1");
            let min_f = rows.iter().filter_map(|x| x.fidelity).fold(f64::INFINITY, f64::min);
            let summary = json!({
                "r": r,
                "dimension": h.dimension(),
                "min_fidelity": min_f,
                "terminal_fidelity": last.fidelity,
                "terminal_ipr": last.ipr,
                "terminal_renyi2": last.renyi2,
            });
            Ok((rows, summary))
        })
        .collect::<CliResult<Vec<_>>>()?;
    Ok(collect(per_r))
}

/// Seeded random circuits on the full space, per-depth fidelity to the
/// ideal circuit for every `(r, ns, seed)` plus seed-averaged rows.
pub fn run_xeb(cfg: &ExperimentConfig) -> CliResult<RunOutput> {
    let lattice = cfg.lattice.build()?;
    let prop = cfg.propagator.build();
    let mode = ExecutionMode::Device {
        compensate_diagonal: cfg.compensate_diagonal,
    };
    let dt = if cfg.tau_us > 0.0 { cfg.tau_us / 50.0 } else { 1e-6 };
    let mut out = RunOutput {
        rows: Vec::new(),
        summary: Vec::new(),
    };
    for &r in &cfg.r_values {
        let h = hamiltonian(cfg, &lattice, r, Sector::FullSpace)?;
        let psi0 = neel_state(h.basis())?;
        let points: Vec<(u32, u64)> = cfg
            .ns_values
            .iter()
            .flat_map(|&ns| cfg.seeds.iter().map(move |&s| (ns, s)))
            .collect();
        let curves = points
            .par_iter()
            .map(|&(ns, seed)| -> CliResult<Vec<(f64, f64)>> {
                let noise = noise_from_ns(ns)?;
                let circuit = sample_xeb_circuit(&lattice, cfg.n_layers, seed, cfg.pairs_per_layer, cfg.tau_us)?;
                let traj = TrajectoryConfig {
                    n_traj: cfg.n_traj,
                    seed,
                    dt,
                };
                let curve = xeb_fidelity_curve(&circuit, &psi0, &h, mode, noise.as_ref(), &traj, &prop)?;
                Ok(curve.iter().map(|p| (p.mean, p.stderr)).collect())
            })
            .collect::<CliResult<Vec<_>>>()?;

        for (g, &ns) in cfg.ns_values.iter().enumerate() {
            let group = &curves[g * cfg.seeds.len()..(g + 1) * cfg.seeds.len()];
            for (&seed, curve) in cfg.seeds.iter().zip(group) {
                for (d, &(mean, se)) in curve.iter().enumerate() {
                    out.rows.push(ResultRow {
                        ns: Some(ns),
                        seed: Some(seed),
                        step: Some(d + 1),
                        time_us: Some((d + 1) as f64 * cfg.tau_us),
                        fidelity: Some(mean),
                        stderr: Some(se),
                        ..ResultRow::new("xeb", r)
                    });
                }
            }
            let mut final_point = (0.0, 0.0);
            for d in 0..cfg.n_layers {
                let column: Vec<f64> = group.iter().map(|c| c[d].0).collect();
                let (mean, se) = mean_and_stderr(&column)?;
                final_point = (mean, se);
                out.rows.push(ResultRow {
                    ns: Some(ns),
                    step: Some(d + 1),
                    time_us: Some((d + 1) as f64 * cfg.tau_us),
                    fidelity: Some(mean),
                    stderr: Some(se),
                    ..ResultRow::new("xeb-mean", r)
                });
            }
            out.summary.push(json!({
                "r": r,
                "ns": ns,
                "depth": cfg.n_layers,
                "seed_mean_fidelity": final_point.0,
                "seed_stderr": final_point.1,
            }));
        }
    }
    Ok(out)
}

/// Mean adjacent-gap ratio of the half-filling sector, one row per `r`.
pub fn run_spectrum(cfg: &ExperimentConfig) -> CliResult<RunOutput> {
    let lattice = cfg.lattice.build()?;
    let per_r = cfg
        .r_values
        .par_iter()
        .map(|&r| -> CliResult<(Vec<ResultRow>, Value)> {
            let h = hamiltonian(cfg, &lattice, r, half_filling(&lattice))?;
            let stats = gap_ratio(&h)?;
            let row = ResultRow {
                gap_ratio: Some(stats.mean_gap_ratio),
                ..ResultRow::new("spectrum", r)
            };
            let summary = json!({
                "r": r,
                "dimension": h.dimension(),
                "mean_gap_ratio": stats.mean_gap_ratio,
                "ratio_count": stats.level_count,
                "degenerate_count": stats.degenerate_count,
            });
            Ok((vec![row], summary))
        })
        .collect::<CliResult<Vec<_>>>()?;
    Ok(collect(per_r))
}

fn collect(parts: Vec<(Vec<ResultRow>, Value)>) -> RunOutput {
    let mut out = RunOutput {
        rows: Vec::new(),
        summary: Vec::new(),
    };
    for (rows, summary) in parts {
        out.rows.extend(rows);
        out.summary.push(summary);
    }
    out
}

pub fn run(cfg: &ExperimentConfig) -> CliResult<RunOutput> {
    match cfg.mode {
        Mode::Idle => run_idle(cfg),
        Mode::Xeb => run_xeb(cfg),
        Mode::Spectrum => run_spectrum(cfg),
    }
}

/// CSV destination: `out`, else the config's `output_path`, else `<mode>.csv`.
pub fn output_path(cfg: &ExperimentConfig, out: Option<&Path>) -> PathBuf {
    match (out, &cfg.output_path) {
        (Some(p), _) => p.to_path_buf(),
        (None, Some(p)) => PathBuf::from(p),
        (None, None) => PathBuf::from(format!("{}.csv", cfg.mode.name())),
    }
}

/// Fails if the CSV or its summary would overwrite `input`.
pub fn check_outputs_distinct(csv: &Path, input: &Path) -> CliResult<()> {
    let canonical = |p: &Path| {
        let dir = p
            .parent()
            .filter(|d| !d.as_os_str().is_empty())
            .unwrap_or(Path::new("."));
        dir.canonicalize().ok().and_then(|d| p.file_name().map(|f| d.join(f)))
    };
    let input = canonical(input);
    for target in [csv.to_path_buf(), summary_path(csv)] {
        if input.is_some() && canonical(&target) == input {
            return Err(CliError::Config(format!(
                "output {} would overwrite the config file",
                target.display()
            )));
        }
    }
    Ok(())
}

/// Runs the experiment and writes the CSV and its JSON summary. Returns the
/// CSV path.
pub fn execute(cfg: &ExperimentConfig, out: Option<&Path>) -> CliResult<PathBuf> {
    let path = output_path(cfg, out);
    let result = run(cfg)?;
    let csv = render_csv(cfg, &result.rows)?;
    let summary = json!({
        "schema_version": SCHEMA_VERSION,
        "experiment": cfg.mode.name(),
        "config_hash": cfg.hash(),
        "config": cfg,
        "rows": result.rows.len(),
        "results": result.summary,
    });
    write_file(&path, &csv)?;
    let text = serde_json::to_string_pretty(&summary).expect("summary is serializable");
    write_file(&summary_path(&path), &(text + "\n"))?;
    Ok(path)
}
