//! Versioned CSV rows and the JSON run summary.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::{ExperimentConfig, SCHEMA_VERSION};
use crate::error::{CliError, CliResult};

pub const CSV_COLUMNS: &str = "experiment,r,ns,seed,step,time_us,fidelity,ipr,renyi2,gap_ratio,stderr";

/// One output line; `None` fields are written empty.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ResultRow {
    pub experiment: String,
    pub r: f64,
    pub ns: Option<u32>,
    pub seed: Option<u64>,
    pub step: Option<usize>,
    pub time_us: Option<f64>,
    pub fidelity: Option<f64>,
    pub ipr: Option<f64>,
    pub renyi2: Option<f64>,
    pub gap_ratio: Option<f64>,
    pub stderr: Option<f64>,
}

fn cell<T: std::fmt::Display>(v: &Option<T>) -> String {
    v.as_ref().map_or_else(String::new, |x| x.to_string())
}

impl ResultRow {
    pub fn new(experiment: &str, r: f64) -> Self {
        Self {
            experiment: experiment.to_string(),
            r,
            ..Self::default()
        }
    }

    fn floats(&self) -> [Option<f64>; 7] {
        [
            Some(self.r),
            self.time_us,
            self.fidelity,
            self.ipr,
            self.renyi2,
            self.gap_ratio,
            self.stderr,
        ]
    }

    pub fn validate(&self) -> CliResult<()> {
        if self.floats().iter().flatten().any(|v| !v.is_finite()) {
            return Err(CliError::Numerical(format!("non-finite value in row {self:?}")));
        }
        Ok(())
    }

    pub fn to_csv_line(&self) -> String {
        [
            self.experiment.clone(),
            self.r.to_string(),
            cell(&self.ns),
            cell(&self.seed),
            cell(&self.step),
            cell(&self.time_us),
            cell(&self.fidelity),
            cell(&self.ipr),
            cell(&self.renyi2),
            cell(&self.gap_ratio),
            cell(&self.stderr),
        ]
        .join(",")
    }
}

pub fn csv_header(cfg: &ExperimentConfig) -> String {
    format!(
        "# mbl-calib schema_version={SCHEMA_VERSION} experiment={} config_hash={}",
        cfg.mode.name(),
        cfg.hash()
    )
}

pub fn render_csv(cfg: &ExperimentConfig, rows: &[ResultRow]) -> CliResult<String> {
    let mut out = String::new();
    let _ = writeln!(out, "{}", csv_header(cfg));
    let _ = writeln!(out, "{CSV_COLUMNS}");
    for row in rows {
        row.validate()?;
        let _ = writeln!(out, "{}", row.to_csv_line());
    }
    Ok(out)
}

/// `results.csv` → `results.json`.
pub fn summary_path(csv: &Path) -> PathBuf {
    csv.with_extension("json")
}

pub fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    }
    let mut f = std::fs::File::create(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    f.write_all(contents.as_bytes())
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}
