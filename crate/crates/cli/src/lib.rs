//! Command-line driver: argument parsing, configuration echo, result
//! envelopes and table output for every shallowscope pipeline.

pub mod commands;
pub mod error;
pub mod files;
pub mod table;

use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::Value;
use shallowscope::tomography::Scenario;
use shallowscope::GeometryKind;

pub use error::CliError;
pub use table::{emit_csv, Cell, Table};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Parser)]
#[command(name = "shallowscope", version, about = "Tomography, parent Hamiltonians and complexity bounds for shallow circuits")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Top-level seed; every random stage derives from it.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Worker threads for the numerical kernels (1 gives a serial run).
    #[arg(long, global = true, env = "SHALLOWSCOPE_THREADS")]
    pub threads: Option<usize>,

    /// Output file; stdout when absent.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ScheduleKind {
    Exhaustive,
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BasisOrder {
    Lexicographic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Gates {
    Haar,
    Fixed,
}

#[derive(Debug, Clone, Subcommand, Serialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// Output state of a circuit file, or of a freshly drawn random circuit.
    Simulate(SimulateArgs),
    /// Pauli-basis measurements written to a shot file.
    Sample(SampleArgs),
    /// Linear-inversion tomography of the whole register.
    TomoFull(TomoFullArgs),
    /// All k-qubit marginals from randomly scheduled shots.
    TomoOverlap(TomoOverlapArgs),
    /// Closed-form shot counts.
    Budget(BudgetArgs),
    /// Parent Hamiltonian of a circuit.
    Parent(ParentArgs),
    /// Ground energy, gap and degeneracy of a Hamiltonian.
    Gap(GapArgs),
    /// Robust marginal fingerprint check of a candidate state.
    Fingerprint(FingerprintArgs),
    /// Square-lattice light-cone growth γ₂(D).
    Gamma2(Gamma2Args),
    /// Optimal-depth GHZ preparation circuit.
    Ghz(GhzArgs),
    /// Depth lower bound for states not determined by r-local marginals.
    Lowerbound(LowerboundArgs),
    /// Search for a distinct state with the same marginals.
    UdaProbe(UdaProbeArgs),
    /// Is there a depth-D circuit reproducing estimated marginals?
    ComplexityTest(ComplexityTestArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Simulate(_) => "simulate",
            Command::Sample(_) => "sample",
            Command::TomoFull(_) => "tomo-full",
            Command::TomoOverlap(_) => "tomo-overlap",
            Command::Budget(_) => "budget",
            Command::Parent(_) => "parent",
            Command::Gap(_) => "gap",
            Command::Fingerprint(_) => "fingerprint",
            Command::Gamma2(_) => "gamma2",
            Command::Ghz(_) => "ghz",
            Command::Lowerbound(_) => "lowerbound",
            Command::UdaProbe(_) => "uda-probe",
            Command::ComplexityTest(_) => "complexity-test",
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SimulateArgs {
    #[arg(long, conflicts_with_all = ["n", "depth"])]
    pub circuit: Option<PathBuf>,
    #[arg(long, requires = "depth")]
    pub n: Option<usize>,
    #[arg(long, requires = "n")]
    pub depth: Option<usize>,
    #[arg(long, default_value = "general", value_parser = parse_geometry)]
    #[serde(serialize_with = "display")]
    pub geometry: GeometryKind,
    /// Lattice shape `RxC` for square-lattice circuits.
    #[arg(long)]
    pub grid: Option<String>,
    #[arg(long, value_enum, default_value_t = Gates::Haar)]
    pub gates: Gates,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SampleArgs {
    #[arg(long, conflicts_with = "state")]
    pub circuit: Option<PathBuf>,
    #[arg(long)]
    pub state: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = ScheduleKind::Random)]
    pub schedule: ScheduleKind,
    /// Total shots; exhaustive runs round up to a multiple of 3^n.
    #[arg(long)]
    pub shots: u64,
    #[arg(long, value_enum, default_value_t = BasisOrder::Lexicographic)]
    pub basis_order: BasisOrder,
    /// Shot file to write.
    #[arg(long)]
    pub out_shots: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct TomoFullArgs {
    #[arg(long)]
    pub shots_file: PathBuf,
    /// Also report the rank-r truncation.
    #[arg(long)]
    pub rank: Option<usize>,
    #[arg(long, requires = "delta")]
    pub epsilon: Option<f64>,
    #[arg(long, requires = "epsilon")]
    pub delta: Option<f64>,
    /// State or density file to measure the error against.
    #[arg(long)]
    pub reference: Option<PathBuf>,
    /// Include the raw estimate matrix.
    #[arg(long)]
    pub matrix: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct TomoOverlapArgs {
    #[arg(long)]
    pub shots_file: PathBuf,
    #[arg(long)]
    pub k: usize,
    /// Graph file restricting the subsets (default: all k-subsets).
    #[arg(long)]
    pub subsets_file: Option<PathBuf>,
    #[arg(long, requires = "delta")]
    pub epsilon: Option<f64>,
    #[arg(long, requires = "epsilon")]
    pub delta: Option<f64>,
    #[arg(long)]
    pub reference: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct BudgetArgs {
    #[arg(long, default_value = "full", value_parser = parse_scenario)]
    #[serde(serialize_with = "display")]
    pub scenario: Scenario,
    /// One or more register sizes, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub n: Vec<usize>,
    #[arg(long)]
    pub epsilon: f64,
    #[arg(long)]
    pub delta: f64,
    #[arg(long)]
    pub k: Option<usize>,
    /// Number of Hamiltonian terms.
    #[arg(long)]
    pub terms: Option<usize>,
    #[arg(long)]
    pub gap: Option<f64>,
    #[arg(long)]
    pub rank: Option<usize>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ParentArgs {
    #[arg(long)]
    pub circuit: PathBuf,
    /// Diagonalize and report the spectrum bottom.
    #[arg(long)]
    pub analyze: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GapArgs {
    #[arg(long, conflicts_with = "circuit", required_unless_present = "circuit")]
    pub hamiltonian: Option<PathBuf>,
    /// Use the parent Hamiltonian of this circuit.
    #[arg(long)]
    pub circuit: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FingerprintArgs {
    #[arg(long, conflicts_with = "circuit", required_unless_present = "circuit")]
    pub hamiltonian: Option<PathBuf>,
    /// Parent Hamiltonian and ground state from this circuit.
    #[arg(long)]
    pub circuit: Option<PathBuf>,
    /// Ground state (default: the circuit output).
    #[arg(long)]
    pub state: Option<PathBuf>,
    /// Candidate state or density matrix.
    #[arg(long)]
    pub rho: PathBuf,
    #[arg(long)]
    pub epsilon: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Gamma2Args {
    #[arg(long)]
    pub d: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GhzArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value = "general", value_parser = parse_geometry)]
    #[serde(serialize_with = "display")]
    pub geometry: GeometryKind,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct LowerboundArgs {
    /// Largest marginal size that fails to determine the state.
    #[arg(long, required_unless_present = "n", conflicts_with = "n")]
    pub r: Option<usize>,
    /// GHZ register size (r = n - 1).
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, default_value = "general", value_parser = parse_geometry)]
    #[serde(serialize_with = "display")]
    pub geometry: GeometryKind,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct UdaProbeArgs {
    #[arg(long)]
    pub state: PathBuf,
    #[arg(long, conflicts_with = "k", required_unless_present = "k")]
    pub graph: Option<PathBuf>,
    /// Use every k-subset as the graph.
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long, default_value_t = 8)]
    pub restarts: usize,
    #[arg(long, default_value_t = 5000)]
    pub max_iterations: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ComplexityTestArgs {
    #[arg(long)]
    pub estimates: PathBuf,
    #[arg(long)]
    pub depth: usize,
    #[arg(long, default_value = "general", value_parser = parse_geometry)]
    #[serde(serialize_with = "display")]
    pub geometry: GeometryKind,
    #[arg(long)]
    pub grid: Option<String>,
    #[arg(long)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 8)]
    pub restarts: usize,
    #[arg(long, default_value_t = 3000)]
    pub max_iterations: u64,
}

fn parse_geometry(s: &str) -> Result<GeometryKind, String> {
    s.parse().map_err(|e: shallowscope::Error| e.to_string())
}

fn parse_scenario(s: &str) -> Result<Scenario, String> {
    s.parse().map_err(|e: shallowscope::Error| e.to_string())
}

fn display<T: std::fmt::Display, S: serde::Serializer>(v: &T, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(v)
}

/// Everything a run depends on; echoed into the envelope.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentConfig {
    #[serde(flatten)]
    pub command: Command,
    pub seed: u64,
    pub threads: Option<usize>,
    pub format: Format,
    pub output: Option<PathBuf>,
}

impl From<Cli> for ExperimentConfig {
    fn from(c: Cli) -> Self {
        Self {
            command: c.command,
            seed: c.seed,
            threads: c.threads,
            format: c.format,
            output: c.output,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ResultEnvelope {
    pub command: String,
    pub config: ExperimentConfig,
    pub seed: u64,
    pub version: String,
    pub elapsed_seconds: f64,
    pub payload: Value,
}

/// A command's result: the JSON payload and, for scalar results, a table.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub payload: Value,
    pub table: Option<Table>,
}

/// Runs one command and wraps its result.
pub fn run(config: &ExperimentConfig) -> Result<(ResultEnvelope, Option<Table>), CliError> {
    let start = Instant::now();
    let out = commands::dispatch(config)?;
    let envelope = ResultEnvelope {
        command: config.command.name().to_owned(),
        config: config.clone(),
        seed: config.seed,
        version: VERSION.to_owned(),
        elapsed_seconds: start.elapsed().as_secs_f64(),
        payload: out.payload,
    };
    Ok((envelope, out.table))
}

/// Renders a run in the configured format. CSV tables get `seed` and
/// `version` columns so no result leaves without provenance.
pub fn render(config: &ExperimentConfig, envelope: &ResultEnvelope, table: Option<Table>) -> Result<String, CliError> {
    match config.format {
        Format::Json => {
            let mut text = serde_json::to_string_pretty(envelope).expect("envelope serializes");
            text.push('\n');
            Ok(text)
        }
        Format::Csv => {
            let table = table.ok_or_else(|| {
                CliError::config("format", format!("{} has no tabular output; use json", envelope.command))
            })?;
            emit_csv(
                &table
                    .with_column("seed", Cell::Int(config.seed as i64))
                    .with_column("version", VERSION.into()),
            )
        }
    }
}
