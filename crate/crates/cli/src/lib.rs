//! `qfs` command-line front-end: dataset generation, the variational and
//! kernel classifiers, and the consolidated `repro` run.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub mod config;
mod data;
pub mod output;
pub mod pipeline;
mod repro;
mod svm;
mod var;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_COMPUTE: i32 = 3;
pub const EXIT_PARTIAL: i32 = 4;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Compute(anyhow::Error),
    /// Some repro cells failed.
    Partial(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Compute(_) => EXIT_COMPUTE,
            CliError::Partial(_) => EXIT_PARTIAL,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Compute(e) => write!(f, "error: {e:#}"),
            CliError::Partial(m) => write!(f, "partial failure: {m}"),
        }
    }
}

impl From<qfs_core::Error> for CliError {
    fn from(e: qfs_core::Error) -> Self {
        CliError::Compute(e.into())
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "qfs",
    version,
    about = "Quantum-enhanced feature-space classifiers, simulated"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Global {
    /// Master seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// JSON object of option values; flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub out_dir: Option<PathBuf>,
    /// Worker threads for parallel sections.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Depolarizing noise on every gate.
    #[arg(long, global = true)]
    pub noisy: bool,
    /// Zero-noise extrapolation (needs --noisy).
    #[arg(long, global = true)]
    pub mitigate: bool,
    /// Reduced iteration and shot budgets.
    #[arg(long, global = true)]
    pub quick: bool,
    /// Single-qubit depolarizing probability under --noisy.
    #[arg(long, global = true)]
    pub p1: Option<f64>,
    /// Two-qubit depolarizing probability under --noisy.
    #[arg(long, global = true)]
    pub p2: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a labelled dataset with a hidden random unitary.
    GenData(data::GenDataArgs),
    /// Train the variational classifier.
    TrainVar(var::TrainVarArgs),
    /// Classify points with a trained variational model.
    EvalVar(var::EvalVarArgs),
    /// Estimate the kernel matrix of a dataset.
    Kernel(svm::KernelArgs),
    /// Train the kernel SVM.
    TrainSvm(svm::TrainSvmArgs),
    /// Classify points with a trained SVM.
    EvalSvm(svm::EvalSvmArgs),
    /// Generate data and run both classifiers end to end.
    Repro(repro::ReproArgs),
}

/// Global values after merging with the config file.
pub struct Context {
    pub seed: u64,
    pub noisy: bool,
    pub mitigate: bool,
    pub quick: bool,
    pub p1: f64,
    pub p2: f64,
    pub out_dir: PathBuf,
}

impl Context {
    fn resolve(g: &Global, r: &mut config::Resolver) -> Result<Self, CliError> {
        let ctx = Context {
            seed: r.value("seed", g.seed, 1)?,
            noisy: r.switch("noisy", g.noisy)?,
            mitigate: r.switch("mitigate", g.mitigate)?,
            quick: r.switch("quick", g.quick)?,
            p1: r.value("p1", g.p1, pipeline::DEFAULT_P1)?,
            p2: r.value("p2", g.p2, pipeline::DEFAULT_P2)?,
            out_dir: r.value("out_dir", g.out_dir.clone(), PathBuf::from("."))?,
        };
        if ctx.mitigate && !ctx.noisy {
            return Err(CliError::Usage("--mitigate requires --noisy".into()));
        }
        Ok(ctx)
    }

    pub fn noise(&self) -> Result<Option<qfs_core::varclass::NoiseSettings>, CliError> {
        if !self.noisy {
            return Ok(None);
        }
        pipeline::noise_settings(self.p1, self.p2, self.mitigate)
            .map(Some)
            .map_err(|e| CliError::Usage(e.to_string()))
    }
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    let mut r = config::Resolver::load(cli.global.config.as_deref())?;
    let ctx = Context::resolve(&cli.global, &mut r)?;
    if let Some(threads) = r.optional("threads", cli.global.threads)? {
        // a pool may already exist when called repeatedly in one process
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    r.forget("threads");
    r.forget("out_dir");
    match &cli.command {
        Command::GenData(a) => data::gen_data(a, &ctx, r),
        Command::TrainVar(a) => var::train_var(a, &ctx, r),
        Command::EvalVar(a) => var::eval_var(a, &ctx, r),
        Command::Kernel(a) => svm::kernel(a, &ctx, r),
        Command::TrainSvm(a) => svm::train_svm(a, &ctx, r),
        Command::EvalSvm(a) => svm::eval_svm(a, &ctx, r),
        Command::Repro(a) => repro::repro(a, &ctx, r),
    }
}

/// Parses `args` and runs; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match run(cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}
