use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "qagsim",
    version,
    about = "Simulate quantum search algorithms on a classical machine"
)]
pub struct Cli {
    /// Largest dense operator dimension (power of two).
    #[arg(long, global = true, default_value_t = qagsim::linalg::DEFAULT_DENSE_CAP)]
    pub dense_cap: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run an algorithm and write its per-iteration trace and a summary.
    Run(RunArgs),
    /// Write operator matrices as JSON.
    Dump(DumpArgs),
    /// Measure the final state repeatedly and tabulate answer frequencies.
    Sample(SampleArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum AlgorithmArg {
    Grover,
    DeutschJozsa,
    Simon,
    Shor,
}

impl From<AlgorithmArg> for qagsim::Algorithm {
    fn from(a: AlgorithmArg) -> Self {
        match a {
            AlgorithmArg::Grover => qagsim::Algorithm::Grover,
            AlgorithmArg::DeutschJozsa => qagsim::Algorithm::DeutschJozsa,
            AlgorithmArg::Simon => qagsim::Algorithm::Simon,
            AlgorithmArg::Shor => qagsim::Algorithm::Shor,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum BackendArg {
    Dense,
    Collapsed,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SamplingArg {
    /// every iteration when the count is small, otherwise log2
    Auto,
    Every,
    Log2,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Iterations {
    Optimal,
    EntropyStop,
    Explicit(u64),
}

impl FromStr for Iterations {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "optimal" => Ok(Iterations::Optimal),
            "entropy-stop" => Ok(Iterations::EntropyStop),
            other => match other.parse::<u64>() {
                Ok(0) => Err("explicit iterations must be at least 1".into()),
                Ok(k) => Ok(Iterations::Explicit(k)),
                Err(_) => Err(format!(
                    "expected `optimal`, `entropy-stop` or a positive integer, got {other:?}"
                )),
            },
        }
    }
}

/// Where the problem comes from: inline marked strings or a JSON file.
#[derive(Clone, Debug, Args)]
pub struct ProblemArgs {
    #[arg(long, value_enum, default_value = "grover")]
    pub algorithm: AlgorithmArg,

    /// Number of input qubits.
    #[arg(long)]
    pub n: Option<usize>,

    /// Comma-separated marked bit strings, MSB first.
    #[arg(long, value_delimiter = ',')]
    pub marked: Vec<String>,

    /// Truth-table or marked-set JSON file.
    #[arg(long)]
    pub table: Option<PathBuf>,
}

#[derive(Clone, Debug, Args)]
pub struct ExecArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,

    #[arg(long, value_enum, default_value = "dense")]
    pub backend: BackendArg,

    /// `optimal`, `entropy-stop`, or a positive count of oracle+interference rounds.
    #[arg(long, default_value = "optimal")]
    pub iterations: Iterations,

    /// Rises required after an entropy minimum before `entropy-stop` fires.
    #[arg(long, default_value_t = 1)]
    pub window: usize,

    /// Give up on `entropy-stop` after this many rounds.
    #[arg(long, default_value_t = 1 << 20)]
    pub max_iterations: u64,

    /// Largest per-iteration deviation tolerated between backends in `both` mode.
    #[arg(long, default_value_t = 1e-10)]
    pub tolerance: f64,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Clone, Debug, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub exec: ExecArgs,

    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,

    /// Add one probability column per basis state (dense, at most 12 qubits).
    #[arg(long)]
    pub per_basis: bool,

    /// Include full amplitude vectors in JSON traces (dense, at most 12 qubits).
    #[arg(long)]
    pub amplitudes: bool,

    /// Which iterations the collapsed backend records.
    #[arg(long, value_enum, default_value = "auto")]
    pub sampling: SamplingArg,

    /// Directory for trace and summary files. Without it the trace (the dense one
    /// under `both`) goes to stdout and the summary to stderr.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum DumpOperator {
    All,
    Oracle,
    Superposition,
    Interference,
    Gate,
    Diffusion,
    Hadamard,
}

#[derive(Clone, Debug, Args)]
pub struct DumpArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,

    #[arg(long, value_enum, default_value = "all")]
    pub operator: DumpOperator,

    /// Output file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Debug, Args)]
pub struct SampleArgs {
    #[command(flatten)]
    pub exec: ExecArgs,

    #[arg(long)]
    pub shots: usize,

    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,

    #[arg(long)]
    pub out: Option<PathBuf>,
}
