//! `ellcycle`: command-line driver for gadget certification, graph generation,
//! searches, the absorbing pipeline and threshold experiments.
//!
//! Exit codes: 0 success, 1 I/O or internal error, 2 usage, 3 search failure,
//! 4 certification or verification failure.

mod commands;
mod config;

use std::ffi::OsString;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ellcycle::hypergraph::HostDescriptor;

/// Seed used when none is given. Never silently zero.
pub const DEFAULT_SEED: u64 = 20_251_016;

#[derive(Debug, Parser)]
#[command(name = "ellcycle", version, about = "Hamilton l-cycles in randomly perturbed hypergraphs")]
pub struct Cli {
    /// Flat key=value or JSON file supplying defaults for the command's flags.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Worker threads for trial sweeps.
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Directory for outputs without an explicit --out.
    #[arg(long, global = true, env = "ELLCYCLE_OUT_DIR", default_value = ".")]
    out_dir: PathBuf,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build and certify the absorber and connector family for (k, l).
    Gadget(GadgetArgs),
    /// Generate a host graph from a descriptor.
    Generate(GenerateArgs),
    /// Add a random p-perturbation to a graph.
    Perturb(PerturbArgs),
    /// Check that a path or cycle lives in a graph.
    Verify(VerifyArgs),
    /// Exact search for a Hamilton l-cycle.
    Search(SearchArgs),
    /// Greedy tiling by disjoint l-paths.
    Tile(TileArgs),
    /// Join disjoint paths into one cycle or path.
    Connect(ConnectArgs),
    /// Run the multi-round absorbing pipeline.
    Pipeline(PipelineArgs),
    /// Monte Carlo Hamiltonicity curve over a probability grid.
    Threshold(ThresholdArgs),
    /// First-moment count of disjoint path copies in the random graph.
    Moment(MomentArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct GadgetArgs {
    #[arg(long)]
    pub k: usize,
    #[arg(long)]
    pub l: usize,
    /// Directory for absorber.json, connectors.json and report.json.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// empty, complete, extremal:ALPHA or random:P.
    #[arg(long)]
    pub host: HostDescriptor,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub k: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PerturbArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long)]
    pub p: f64,
    /// Expose the perturbation in this many rounds and also write each
    /// cumulative round graph.
    #[arg(long, default_value_t = 1)]
    pub rounds: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub graph: PathBuf,
    /// Path or cycle JSON.
    #[arg(long)]
    pub sequence: PathBuf,
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long)]
    pub l: usize,
    /// Search node budget.
    #[arg(long, default_value_t = 10_000_000)]
    pub nodes: u64,
    /// Disable symmetry breaking.
    #[arg(long)]
    pub no_symmetry: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TileArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long)]
    pub l: usize,
    /// Path length in edges.
    #[arg(long)]
    pub m: usize,
    /// Comma-separated vertices to avoid.
    #[arg(long, value_delimiter = ',')]
    pub forbidden: Vec<u32>,
    #[arg(long, default_value_t = 3)]
    pub retries: usize,
    #[arg(long, default_value_t = 200_000)]
    pub nodes: u64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ConnectArgs {
    #[arg(long)]
    pub graph: PathBuf,
    /// JSON array of paths.
    #[arg(long)]
    pub paths: PathBuf,
    /// Comma-separated vertices connectors may use; default all vertices off
    /// the given paths.
    #[arg(long, value_delimiter = ',')]
    pub x: Vec<u32>,
    /// Produce a path instead of closing a cycle.
    #[arg(long)]
    pub open: bool,
    #[arg(long, default_value_t = 200_000)]
    pub nodes: u64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PipelineArgs {
    /// Host graph JSON; alternatively give --host, --n and --k.
    #[arg(long, conflicts_with = "host")]
    pub graph: Option<PathBuf>,
    #[arg(long, requires_all = ["n", "k"])]
    pub host: Option<HostDescriptor>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub l: usize,
    #[arg(long)]
    pub p: f64,
    #[arg(long, default_value_t = 4)]
    pub rounds: usize,
    /// Number of absorbing paths; default scales with n.
    #[arg(long)]
    pub absorbers: Option<usize>,
    /// Tiling path length.
    #[arg(long, default_value_t = 2)]
    pub m: usize,
    #[arg(long, default_value_t = 0.1)]
    pub reservoir_lo: f64,
    #[arg(long, default_value_t = 0.2)]
    pub reservoir_hi: f64,
    #[arg(long, default_value_t = 3)]
    pub retries: usize,
    #[arg(long, default_value_t = 1)]
    pub bad_threshold: usize,
    #[arg(long, default_value_t = 200_000)]
    pub nodes: u64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Cycle output file.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Trace output file.
    #[arg(long)]
    pub trace: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ThresholdArgs {
    #[arg(long)]
    pub host: HostDescriptor,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 3)]
    pub k: usize,
    #[arg(long, default_value_t = 2)]
    pub l: usize,
    /// Comma-separated, strictly increasing probabilities.
    #[arg(long, value_delimiter = ',')]
    pub grid: Vec<f64>,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Also estimate the median crossing point.
    #[arg(long)]
    pub median: bool,
    #[arg(long, default_value_t = 10_000_000)]
    pub nodes: u64,
    /// Largest tolerated fraction of inconclusive searches.
    #[arg(long, default_value_t = 0.05)]
    pub max_inconclusive: f64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MomentArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub k: usize,
    #[arg(long)]
    pub l: usize,
    #[arg(long)]
    pub m: usize,
    #[arg(long)]
    pub p: f64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    SearchFailed(String),
    #[error("{0}")]
    Certification(String),
    #[error(transparent)]
    Other(#[from] anyhow::Error),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::SearchFailed(_) => 3,
            CliError::Certification(_) => 4,
            CliError::Other(_) => 1,
        }
    }
}

impl From<ellcycle::Error> for CliError {
    fn from(e: ellcycle::Error) -> Self {
        use ellcycle::Error as E;
        match e {
            E::InvalidQuery(_)
            | E::InvalidParameter(_)
            | E::Degenerate(_)
            | E::Malformed(_)
            | E::Arity { .. }
            | E::UniformityMismatch { .. }
            | E::Precondition(_)
            | E::Domain(_)
            | E::UndefinedDensity
            | E::Json(_) => CliError::Usage(e.to_string()),
            E::NothingToConnect | E::Unconnectable { .. } => CliError::SearchFailed(e.to_string()),
            E::NotAPathInHost { .. }
            | E::EndMismatch { .. }
            | E::VertexOverlap(_)
            | E::CannotAbsorb { .. }
            | E::Construction(_) => CliError::Certification(e.to_string()),
        }
    }
}

fn run(args: Vec<OsString>) -> Result<(), CliError> {
    let args = config::splice_config(args)?;
    let cli = Cli::try_parse_from(args).map_err(|e| match e.kind() {
        clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
            let _ = e.print();
            std::process::exit(0);
        }
        _ => CliError::Usage(e.render().to_string()),
    })?;
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            return Err(CliError::Usage("--jobs must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| CliError::Other(e.into()))?;
    }
    commands::dispatch(&cli.command, &cli.out_dir)
}

fn main() -> ExitCode {
    match run(std::env::args_os().collect()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.to_string().trim_end());
            ExitCode::from(e.code())
        }
    }
}
