//! Command-line front end: parameter sweeps, process tomography export and the
//! self-verification suite.

mod config;
mod sweep;
mod tomography;
mod verify;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use config::ConfigFile;
pub use sweep::{cmd_sweep, compute_rows, SweepGrid, SweepRow, TemperatureAxis, CSV_HEADER};
pub use tomography::{cmd_tomography, TomographySummary, DEFAULT_TOMOGRAPHY_KT_PEV};
pub use verify::{cmd_verify, SuiteResult, VerifyOptions, VerifyReport};

use crate::error::{Error, Result};

#[derive(Debug, Parser)]
#[command(name = "qdemon", version, about = "Measurement-based quantum Maxwell's demon simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sweep initial temperature × readout mismatch and write one CSV row per point.
    Sweep(SweepArgs),
    /// Write χ matrices of the measurement and protocol channels and the process distance.
    Tomography(TomographyArgs),
    /// Run the invariant suites; exits nonzero on any failure.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Flat key=value file whose keys are the flag names without the leading dashes.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Lowest k_BT in peV (βħω₁ with --beta-internal). Without the kT flags the
    /// nine reference temperatures are used.
    #[arg(long = "kt-min")]
    pub kt_min: Option<f64>,
    #[arg(long = "kt-max")]
    pub kt_max: Option<f64>,
    #[arg(long = "kt-steps")]
    pub kt_steps: Option<usize>,
    /// Lowest mismatch angle in radians. Without the φ flags, φ ∈ {0, π/8, π/4, 3π/8, π/2}.
    #[arg(long = "phi-min")]
    pub phi_min: Option<f64>,
    #[arg(long = "phi-max")]
    pub phi_max: Option<f64>,
    #[arg(long = "phi-steps")]
    pub phi_steps: Option<usize>,
    #[arg(long = "omega0-khz")]
    pub omega0_khz: Option<f64>,
    #[arg(long = "omega1-khz")]
    pub omega1_khz: Option<f64>,
    #[arg(long = "noise-q")]
    pub noise_q: Option<f64>,
    /// Read --kt-min/--kt-max as dimensionless βħω₁ instead of k_BT.
    #[arg(long = "beta-internal")]
    pub beta_internal: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TomographyArgs {
    /// Mismatch angle in radians.
    #[arg(long)]
    pub phi: f64,
    #[arg(long = "noise-q", default_value_t = 0.0)]
    pub noise_q: f64,
    /// Initial k_BT in peV, which sets the feedback angle.
    #[arg(long = "kt", default_value_t = DEFAULT_TOMOGRAPHY_KT_PEV)]
    pub kt: f64,
    #[arg(long = "out-dir")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long = "inject-non-unital", hide = true)]
    pub inject_non_unital: bool,
}

impl SweepArgs {
    /// Merges flags with the optional config file (flags win) into a grid and output path.
    pub fn resolve(&self) -> Result<(SweepGrid, PathBuf)> {
        let file = match &self.config {
            Some(path) => ConfigFile::load(path)?,
            None => ConfigFile::default(),
        };
        let f64_of = |flag: Option<f64>, key: &str| -> Result<Option<f64>> {
            match flag {
                Some(v) => Ok(Some(v)),
                None => file.get_parsed(key),
            }
        };
        let usize_of = |flag: Option<usize>, key: &str| -> Result<Option<usize>> {
            match flag {
                Some(v) => Ok(Some(v)),
                None => file.get_parsed(key),
            }
        };
        let beta_internal = self.beta_internal || file.get_parsed::<bool>("beta-internal")?.unwrap_or(false);
        let kt = (f64_of(self.kt_min, "kt-min")?, f64_of(self.kt_max, "kt-max")?, usize_of(self.kt_steps, "kt-steps")?);
        let phi = (
            f64_of(self.phi_min, "phi-min")?,
            f64_of(self.phi_max, "phi-max")?,
            usize_of(self.phi_steps, "phi-steps")?,
        );
        let mut grid = SweepGrid::from_ranges(kt, phi, beta_internal)?;
        if let Some(w0) = f64_of(self.omega0_khz, "omega0-khz")? {
            grid.omega0_khz = w0;
        }
        if let Some(w1) = f64_of(self.omega1_khz, "omega1-khz")? {
            grid.omega1_khz = w1;
        }
        if let Some(q) = f64_of(self.noise_q, "noise-q")? {
            grid.noise_q = q;
        }
        let out = match &self.out {
            Some(p) => p.clone(),
            None => file
                .get("out")
                .map(PathBuf::from)
                .ok_or_else(|| Error::Argument("missing --out (or `out` in the config file)".into()))?,
        };
        Ok((grid, out))
    }
}

/// Runs a parsed command; `Ok(false)` means verification found failures.
pub fn run(cli: &Cli) -> Result<bool> {
    match &cli.command {
        Command::Sweep(args) => {
            let (grid, out) = args.resolve()?;
            let rows = cmd_sweep(&grid, &out)?;
            println!("wrote {rows} rows to {}", out.display());
            Ok(true)
        }
        Command::Tomography(args) => {
            let summary = cmd_tomography(args.phi, args.noise_q, args.kt, &args.out_dir)?;
            println!("δ(φ = {}) = {}", args.phi, summary.delta_ideal);
            if let Some(noisy) = summary.delta_noisy {
                println!("δ_noisy(φ = {}, q = {}) = {}", args.phi, args.noise_q, noisy);
            }
            println!("wrote χ files to {}", args.out_dir.display());
            Ok(true)
        }
        Command::Verify(args) => {
            let report = cmd_verify(&VerifyOptions { seed: args.seed, inject_non_unital: args.inject_non_unital });
            print!("{report}");
            Ok(report.passed())
        }
    }
}
