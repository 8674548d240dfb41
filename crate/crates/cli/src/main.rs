use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mbl_calib::config::read_patch;
use mbl_calib::run::{check_outputs_distinct, output_path};
use mbl_calib::{execute, thread_count, CliError, CliResult, ExperimentConfig, Mode};

#[derive(Parser)]
#[command(
    name = "mbl-calib",
    version,
    about = "Idle, XEB and spectral sweeps of quasiperiodic qubit lattices"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Néel-state quench: fidelity, IPR and Rényi-2 entropy versus time.
    Idle(RunArgs),
    /// Random-circuit fidelity versus depth, with optional T1/T2 noise.
    Xeb(RunArgs),
    /// Mean adjacent-gap ratio of the half-filling sector.
    Spectrum(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// JSON config file.
    #[arg(long)]
    config: PathBuf,
    /// Named preset applied beneath the file (overrides the file's `preset`).
    #[arg(long)]
    preset: Option<String>,
    /// Output CSV path; the JSON summary is written next to it.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (default: MBL_CALIB_THREADS, else all cores).
    #[arg(long)]
    threads: Option<usize>,
}

fn run(mode: Mode, args: RunArgs) -> CliResult<PathBuf> {
    if let Some(n) = thread_count(args.threads)? {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    }
    let patch = read_patch(&args.config)?;
    let cfg = ExperimentConfig::resolve(mode, &patch, args.preset.as_deref())?;
    check_outputs_distinct(&output_path(&cfg, args.out.as_deref()), &args.config)?;
    execute(&cfg, args.out.as_deref())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (mode, args) = match cli.command {
        Command::Idle(a) => (Mode::Idle, a),
        Command::Xeb(a) => (Mode::Xeb, a),
        Command::Spectrum(a) => (Mode::Spectrum, a),
    };
    match run(mode, args) {
        Ok(path) => {
            println!("{}", path.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("mbl-calib: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
