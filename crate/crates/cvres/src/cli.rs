//! Argument parsing and dispatch.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use cvres_core::optim::{OptimizerConfig, RadiusPolicy, Symmetry};

use crate::commands::{certify, figure, monotone, protocol, Output};
use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SymmetryArg {
    None,
    Phase,
    Reflection,
}

#[derive(Debug, Parser)]
#[command(name = "cvres", version, about = "Certified bounds on the relative entropy of nonclassicality")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Debug, Args)]
pub struct GlobalArgs {
    /// Worker threads for parameter sweeps.
    #[arg(long, global = true, env = "CVRES_THREADS")]
    pub threads: Option<usize>,
    /// Report entropic quantities in nats instead of bits.
    #[arg(long, global = true)]
    pub nats: bool,
    /// Output format (default: csv for figures, json otherwise).
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write to this file instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    /// Optimizer settings as JSON; individual flags below override it.
    #[arg(long, global = true)]
    pub optimizer: Option<String>,
    /// Iteration cap per optimizer stage.
    #[arg(long, global = true)]
    pub max_iters: Option<usize>,
    /// Objective tolerance in bits.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Relative tolerance of the certified coherent supremum.
    #[arg(long, global = true)]
    pub sup_rtol: Option<f64>,
    /// Search points per unit length in the fast coherent search.
    #[arg(long, global = true)]
    pub grid_resolution: Option<f64>,
    /// Certification radius: `auto` or a fixed bound on |α|².
    #[arg(long, global = true)]
    pub radius: Option<String>,
    /// Symmetry imposed on the Γ program (default: detected from the state).
    #[arg(long, global = true, value_enum)]
    pub symmetry: Option<SymmetryArg>,
}

impl GlobalArgs {
    pub fn optimizer_config(&self) -> Result<OptimizerConfig, CliError> {
        let mut cfg: OptimizerConfig = match &self.optimizer {
            Some(text) => serde_json::from_str(text).map_err(|e| CliError::usage(format!("optimizer JSON: {e}")))?,
            None => OptimizerConfig::default(),
        };
        if let Some(v) = self.max_iters {
            cfg.max_iters = v;
        }
        if let Some(v) = self.tol {
            cfg.tol = v;
        }
        if let Some(v) = self.sup_rtol {
            cfg.sup_rtol = v;
        }
        if let Some(v) = self.grid_resolution {
            cfg.grid_resolution = v;
        }
        if let Some(r) = &self.radius {
            cfg.radius = if r == "auto" {
                RadiusPolicy::Auto
            } else {
                RadiusPolicy::Fixed(r.parse().map_err(|_| CliError::usage(format!("radius must be auto or a number, got {r:?}")))?)
            };
        }
        if let Some(s) = self.symmetry {
            cfg.symmetry = match s {
                SymmetryArg::None => Symmetry::None,
                SymmetryArg::Phase => Symmetry::Phase,
                SymmetryArg::Reflection => Symmetry::Reflection,
            };
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Certified monotone bounds for one state.
    Monotone(MonotoneArgs),
    /// Figure tables as CSV.
    Figure(FigureArgs),
    /// Exact protocol simulations.
    Protocol(ProtocolArgs),
    /// Truncation certificate and corrected interval.
    Certify(CertifyArgs),
}

#[derive(Clone, Debug, Args)]
pub struct StateArgs {
    /// JSON spec, raw-matrix JSON, or shorthand such as `cat alpha=2 sign=-`.
    #[arg(long, num_args = 1.., conflicts_with = "state_file")]
    pub state: Option<Vec<String>>,
    /// File holding a JSON spec or raw matrix.
    #[arg(long)]
    pub state_file: Option<PathBuf>,
}

impl StateArgs {
    pub fn parse(&self) -> Result<Option<crate::io::StateInput>, CliError> {
        match (&self.state, &self.state_file) {
            (Some(parts), _) => crate::io::parse_state(&parts.join(" ")).map(Some),
            (None, Some(path)) => crate::io::read_state_file(path).map(Some),
            (None, None) => Ok(None),
        }
    }
}

#[derive(Clone, Debug, Args)]
pub struct MonotoneArgs {
    #[command(flatten)]
    pub state: StateArgs,
    /// Comma list of `ncm-lower`, `nc-upper`, `all`.
    #[arg(long, default_value = "ncm-lower,nc-upper")]
    pub which: String,
}

#[derive(Clone, Debug, Args)]
pub struct FigureArgs {
    /// noisy-fock-fixed-n, noisy-fock-fixed-nu, cat, squeezed or protocols.
    pub name: String,
    /// Photon number for noisy-fock-fixed-n.
    #[arg(long, default_value_t = 1)]
    pub n: usize,
    /// Thermal occupation for noisy-fock-fixed-nu.
    #[arg(long, default_value_t = 0.1)]
    pub nu: f64,
    /// Noise grid `start:stop:step` or a comma list.
    #[arg(long, default_value = "0.05:0.95:0.05")]
    pub p_grid: String,
    /// Thermal occupations for noisy-fock-fixed-n.
    #[arg(long, default_value = "0,0.1,0.5")]
    pub nu_grid: String,
    /// Photon numbers for noisy-fock-fixed-nu.
    #[arg(long, default_value = "1,2,3,4,5")]
    pub n_grid: String,
    /// Cat amplitudes.
    #[arg(long, default_value = "0.25:2.5:0.25")]
    pub alpha_grid: String,
    /// Squeezing parameters.
    #[arg(long, default_value = "0.1:1:0.1")]
    pub r_grid: String,
    /// Cat parities, `+`, `-` or both.
    #[arg(long, default_value = "+,-")]
    pub signs: String,
    /// amplify, dilute or both.
    #[arg(long, default_value = "both")]
    pub task: String,
    /// Cutoff override (default: automatic per state).
    #[arg(long)]
    pub cutoff: Option<usize>,
}

#[derive(Clone, Debug, Args)]
pub struct ProtocolArgs {
    /// fock-dilution, cat-amplification or cat-dilution.
    pub kind: String,
    /// Photon number (fock-dilution).
    #[arg(long)]
    pub n: Option<usize>,
    /// Fock weight of the noisy input (fock-dilution).
    #[arg(long)]
    pub p: Option<f64>,
    /// Beam-splitter transmissivity (fock-dilution).
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Cat amplitude.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Fock cutoff for the simulation.
    #[arg(long)]
    pub cutoff: Option<usize>,
    /// Also sample this many seeded Bernoulli trials as a cross-check.
    #[arg(long)]
    pub monte_carlo: Option<u64>,
    /// Seed for the Monte Carlo sampler.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Clone, Debug, Args)]
pub struct CertifyArgs {
    #[command(flatten)]
    pub state: StateArgs,
    /// Trace distance between the state and its truncation.
    #[arg(long)]
    pub epsilon: f64,
    /// Mean photon number bound.
    #[arg(long)]
    pub energy: f64,
    /// Number of modes.
    #[arg(long, default_value_t = 1)]
    pub modes: usize,
}

/// Parses `args`, runs the command, writes the output and returns the exit
/// code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(out) => match emit(&cli.global, &out) {
            Ok(()) => out.exit_code,
            Err(e) => {
                eprintln!("error: {e}");
                e.exit_code()
            }
        },
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Runs the command without writing anything.
pub fn execute(cli: &Cli) -> Result<Output, CliError> {
    let g = &cli.global;
    let cfg = g.optimizer_config()?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = g.threads {
        if t == 0 {
            return Err(CliError::usage("--threads must be positive"));
        }
        builder = builder.num_threads(t);
    }
    let pool = builder.build().map_err(|e| CliError::usage(format!("thread pool: {e}")))?;
    pool.install(|| match &cli.command {
        Command::Monotone(a) => monotone(a, g, &cfg),
        Command::Figure(a) => figure(a, g, &cfg),
        Command::Protocol(a) => protocol(a, g),
        Command::Certify(a) => certify(a, g, &cfg),
    })
}

fn emit(g: &GlobalArgs, out: &Output) -> Result<(), CliError> {
    match &g.output {
        Some(path) => std::fs::write(path, &out.text)?,
        None => {
            use std::io::Write;
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(out.text.as_bytes())?;
        }
    }
    Ok(())
}
