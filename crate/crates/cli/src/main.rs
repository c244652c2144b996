//! `xtalk`: run crosstalk campaigns, analyze archives, compare backends and
//! schedule low-interference cohorts.

mod commands;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "xtalk", version, about = "Crosstalk characterization and interference-aware scheduling")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print a coupling map as JSON (a heavy-hex preset or grid-RxC).
    Topology {
        name: String,
        /// Write to this file instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List the built-in backend profiles.
    Profiles,
    /// Run sandwiched pairwise campaigns and archive every trial.
    Campaign(RunArgs),
    /// Impact matrices, affinity table and heatmap from campaign archives.
    Analyze(AnalyzeArgs),
    /// Cross-backend SSIM of impact matrices.
    Ssim(SsimArgs),
    /// Cumulative stress test on one target circuit.
    Stress(StressArgs),
    /// Pick a low-interference cohort from a job queue.
    Schedule(ScheduleArgs),
    /// Small end-to-end run of the whole pipeline.
    Demo(DemoArgs),
}

#[derive(Args, Clone)]
pub struct RunArgs {
    /// Preset label or path to a backend profile JSON.
    #[arg(long, default_value = "heron-like-A")]
    pub backend: String,
    /// Padding depth between tenant regions.
    #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
    pub p: i64,
    #[arg(long, default_value_t = 8)]
    pub trials: usize,
    #[arg(long, default_value_t = 4096)]
    pub shots: u64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Width of every benchmark circuit.
    #[arg(long, default_value_t = 4)]
    pub qubits: usize,
    /// Comma-separated families (QAOA, GA, QFT, QPE, ZZFM).
    #[arg(long, value_delimiter = ',', default_value = "QAOA,GA,QFT,QPE,ZZFM")]
    pub families: Vec<String>,
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Archive root.
    #[arg(long, default_value = "runs")]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct AnalyzeArgs {
    /// Archive root written by `campaign`.
    pub archives: PathBuf,
    /// Only use trials at this padding depth.
    #[arg(long)]
    pub p: Option<usize>,
    #[arg(long, default_value = "analysis")]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct SsimArgs {
    /// One or more archive roots; every (backend, padding) found is compared.
    #[arg(required = true)]
    pub archives: Vec<PathBuf>,
    #[arg(long)]
    pub p: Option<usize>,
    /// Group override, `backend=group`; defaults to each backend's family.
    #[arg(long = "group", value_name = "BACKEND=GROUP")]
    pub groups: Vec<String>,
    #[arg(long, default_value = "similarity")]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct StressArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// WTS (weakest first) or STW (strongest first).
    #[arg(long, default_value = "WTS")]
    pub order: String,
    #[arg(long, default_value = "QFT")]
    pub target: String,
    /// Cotenants from strongest to weakest aggressor.
    #[arg(long, value_delimiter = ',', conflicts_with = "affinity")]
    pub ranking: Option<Vec<String>>,
    /// Affinity JSON from `analyze`; its aggression ranking is used.
    #[arg(long)]
    pub affinity: Option<PathBuf>,
}

#[derive(Args)]
pub struct ScheduleArgs {
    #[arg(long)]
    pub queue: PathBuf,
    #[arg(long)]
    pub affinity: PathBuf,
    #[arg(long, default_value = "heron-like-A")]
    pub backend: String,
    #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
    pub p: i64,
    #[arg(long, default_value_t = 3)]
    pub max_cohort: usize,
    #[arg(long, default_value_t = 1)]
    pub min_cohort: usize,
    /// exhaustive or greedy.
    #[arg(long, default_value = "exhaustive")]
    pub solver: String,
    /// Also write the result JSON here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct DemoArgs {
    #[arg(long, default_value = "demo")]
    pub out: PathBuf,
    #[arg(long, default_value_t = 4)]
    pub trials: usize,
    #[arg(long, default_value_t = 1024)]
    pub shots: u64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long)]
    pub jobs: Option<usize>,
}

/// Command failure, split by exit code.
pub enum Failure {
    /// Bad flags, configuration or input files (exit 1).
    Usage(anyhow::Error),
    /// Allocation, simulation or analysis failure (exit 2).
    Runtime(anyhow::Error),
}

pub type Outcome<T = ()> = Result<T, Failure>;

pub trait Classify<T> {
    fn usage(self) -> Outcome<T>;
    fn runtime(self) -> Outcome<T>;
}

impl<T, E: Into<anyhow::Error>> Classify<T> for Result<T, E> {
    fn usage(self) -> Outcome<T> {
        self.map_err(|e| Failure::Usage(e.into()))
    }

    fn runtime(self) -> Outcome<T> {
        self.map_err(|e| Failure::Runtime(e.into()))
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Topology { name, out } => commands::topology(&name, out.as_deref()),
        Command::Profiles => commands::profiles(),
        Command::Campaign(args) => commands::campaign(&args),
        Command::Analyze(args) => commands::analyze(&args),
        Command::Ssim(args) => commands::ssim(&args),
        Command::Stress(args) => commands::stress(&args),
        Command::Schedule(args) => commands::schedule(&args),
        Command::Demo(args) => commands::demo(&args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
