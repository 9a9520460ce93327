//! `dcl`: command-line front end for the compliant-leg toolkit.
//!
//! Every command reads an optional JSON configuration (see
//! `configs/schema.json`), lets flags override individual keys, and writes
//! its artifacts atomically under the output directory.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod pipeline;

mod cmd;
mod plot;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

pub use config::RunConfig;
pub use error::{CliError, ErrorKind, Result};

#[derive(Debug, Parser)]
#[command(
    name = "dcl",
    version,
    about = "Compliant-leg modeling: lattices, stiffness, jumps, mechanism, motion capture"
)]
pub struct Cli {
    /// JSON run configuration; flags override its keys.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Seed for every random draw (surrogate noise, synthetic capture).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Directory receiving all outputs.
    #[arg(long, global = true, value_name = "DIR")]
    pub output_dir: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// TPMS lattice geometry.
    #[command(subcommand)]
    Lattice(LatticeCmd),
    /// Torque-angle law identification.
    #[command(subcommand)]
    Stiffness(StiffnessCmd),
    /// Vertical jump simulation.
    #[command(subcommand)]
    Jump(JumpCmd),
    /// Flip mechanism kinematics and detent landscape.
    #[command(subcommand)]
    Mechanism(MechanismCmd),
    /// Motion-capture analysis.
    #[command(subcommand)]
    Mocap(MocapCmd),
    /// End-to-end reproductions.
    #[command(subcommand)]
    Pipeline(PipelineCmd),
}

#[derive(Debug, Subcommand)]
pub enum LatticeCmd {
    /// Mesh a lattice-filled module and write it as binary STL.
    Gen(LatticeGenArgs),
}

#[derive(Debug, Args)]
pub struct LatticeGenArgs {
    /// gyroid, schwarz_primitive, diamond or lidinoid.
    #[arg(long)]
    pub kind: Option<String>,
    #[arg(long)]
    pub cell_size_mm: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub level: Option<f64>,
    /// Relative density in (0, 1); tunes the shell half-width.
    #[arg(long)]
    pub target_density: Option<f64>,
    /// Fixed shell half-width, used without a target density.
    #[arg(long, conflicts_with = "target_density")]
    pub shell_halfwidth: Option<f64>,
    /// Voxels per unit cell.
    #[arg(long)]
    pub resolution: Option<usize>,
    #[arg(long)]
    pub density_samples: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum StiffnessCmd {
    /// Fit the cubic law on the operating region.
    Fit(StiffnessFitArgs),
    /// Write surrogate characterization data.
    Surrogate(SurrogateArgs),
}

#[derive(Debug, Args)]
pub struct StiffnessFitArgs {
    /// Characterization data `theta_deg,torque_nm`; surrogate data otherwise.
    #[arg(long, value_name = "FILE")]
    pub samples_csv: Option<PathBuf>,
    #[arg(long)]
    pub operating_max_deg: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SurrogateArgs {
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub noise_fraction: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum JumpCmd {
    /// Simulate jumps for the configured modes.
    Sim(JumpSimArgs),
}

#[derive(Debug, Args)]
pub struct JumpSimArgs {
    /// baseline, stowed or deployed; repeatable.
    #[arg(long = "mode")]
    pub modes: Vec<String>,
    /// Fitted model JSON written by `stiffness fit`.
    #[arg(long, value_name = "FILE")]
    pub stiffness_model: Option<PathBuf>,
    /// Use the robot parameters as given instead of fitting them.
    #[arg(long)]
    pub no_calibrate: bool,
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long)]
    pub knee_torque_max_nm: Option<f64>,
    #[arg(long)]
    pub module_mass_kg: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum MechanismCmd {
    /// Tabulate rotation, energy and force over the stroke.
    Sweep(MechanismSweepArgs),
}

#[derive(Debug, Args)]
pub struct MechanismSweepArgs {
    #[arg(long)]
    pub samples: Option<usize>,
    /// linear or cycloidal.
    #[arg(long)]
    pub profile: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum MocapCmd {
    /// Write a synthetic capture dataset with known jump heights.
    Synth(MocapSynthArgs),
    /// Analyze a directory of trials into per-trial and per-group results.
    Analyze(MocapAnalyzeArgs),
}

#[derive(Debug, Args)]
pub struct MocapSynthArgs {
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub noise_mm: Option<f64>,
}

#[derive(Debug, Args)]
pub struct MocapAnalyzeArgs {
    /// Directory of trial CSVs, or of one sub-directory per group.
    #[arg(long, value_name = "DIR")]
    pub input: PathBuf,
    #[arg(long)]
    pub smoothing_window: Option<usize>,
    /// Squat height in mm, or `auto`.
    #[arg(long)]
    pub h_base: Option<String>,
    /// Body-map JSON; defaults to `body_map.json` in the input directory.
    #[arg(long, value_name = "FILE")]
    pub body_map: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum PipelineCmd {
    /// Fit, calibrate and simulate the three jump groups into a results table.
    Table1(Table1Args),
}

#[derive(Debug, Args)]
pub struct Table1Args {
    /// External characterization data instead of the surrogate.
    #[arg(long, value_name = "FILE")]
    pub stiffness_csv: Option<PathBuf>,
    #[arg(long)]
    pub dt: Option<f64>,
}

/// Destination for a command's artifacts.
pub struct Output {
    dir: PathBuf,
}

impl Output {
    pub fn new(dir: PathBuf) -> Self {
        Output { dir }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn write(&self, name: &str, bytes: &[u8]) -> Result<PathBuf> {
        let path = self.dir.join(name);
        dcl_core::io::write_atomic(&path, bytes)
            .map_err(|e| CliError::io("output", format!("{}: {e}", path.display())))?;
        Ok(path)
    }

    pub fn json<T: Serialize>(&self, name: &str, value: &T) -> Result<PathBuf> {
        let mut text = serde_json::to_string_pretty(value)
            .map_err(|e| CliError::validation("output", e.to_string()))?;
        text.push('\n');
        self.write(name, text.as_bytes())
    }
}

pub(crate) struct Ctx {
    pub cfg: RunConfig,
    pub seed: u64,
    pub out: Output,
}

/// Fails with a validation error if an input file is missing.
pub(crate) fn require_file(module: &'static str, path: &Path) -> Result<()> {
    if !path.is_file() {
        return Err(CliError::validation(
            module,
            format!("input file {} does not exist", path.display()),
        ));
    }
    Ok(())
}

/// Decorrelated stream seed for item `(a, b)` of a run seeded with `seed`.
pub(crate) fn derive_seed(seed: u64, a: u64, b: u64) -> u64 {
    // splitmix64 finalizer
    let mut z =
        seed ^ a.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ b.wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Size the worker pool from `DCL_THREADS`, if set.
pub fn configure_threads() -> Result<()> {
    let Ok(v) = std::env::var("DCL_THREADS") else {
        return Ok(());
    };
    let n: usize = v.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        CliError::validation(
            "cli",
            format!("DCL_THREADS must be a positive integer, got '{v}'"),
        )
    })?;
    // a pool may already exist when commands run in-process more than once
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global();
    Ok(())
}

pub fn run(cli: Cli) -> Result<()> {
    configure_threads()?;
    let cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    let seed = cli.seed.or(cfg.seed).unwrap_or(config::DEFAULT_SEED);
    let dir = cli
        .output_dir
        .clone()
        .or_else(|| cfg.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from(config::DEFAULT_OUTPUT_DIR));
    let mut ctx = Ctx {
        cfg,
        seed,
        out: Output::new(dir),
    };

    match &cli.command {
        Command::Lattice(LatticeCmd::Gen(a)) => cmd::lattice::gen(&mut ctx, a),
        Command::Stiffness(StiffnessCmd::Fit(a)) => cmd::stiffness::fit(&mut ctx, a),
        Command::Stiffness(StiffnessCmd::Surrogate(a)) => cmd::stiffness::surrogate(&mut ctx, a),
        Command::Jump(JumpCmd::Sim(a)) => cmd::jump::sim(&mut ctx, a),
        Command::Mechanism(MechanismCmd::Sweep(a)) => cmd::mechanism::sweep(&mut ctx, a),
        Command::Mocap(MocapCmd::Synth(a)) => cmd::mocap::synth(&mut ctx, a),
        Command::Mocap(MocapCmd::Analyze(a)) => cmd::mocap::analyze(&mut ctx, a),
        Command::Pipeline(PipelineCmd::Table1(a)) => cmd::pipeline::table1(&mut ctx, a),
    }
}

/// Parse `args`, run, and map the outcome to a process exit code:
/// 0 success, 2 validation error, 3 I/O error.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
