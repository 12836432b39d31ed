use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Parser, Debug)]
#[command(
    name = "sphmax",
    version,
    about = "Arithmetic spherical averages, maximal functions and sequence dimensions on Z^d"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct Common {
    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,

    /// Worker threads (results do not depend on this)
    #[arg(long, global = true, value_parser = clap::value_parser!(u32).range(1..))]
    #[serde(skip)]
    pub threads: Option<u32>,

    /// Force the in-order sequential code path
    #[arg(long, global = true)]
    #[serde(skip)]
    pub sequential: bool,

    /// Sphere points enumerated at once / operator output points
    #[arg(long, global = true, default_value_t = 10_000_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub cap_points: u64,

    /// Cells of a residue torus
    #[arg(long, global = true, default_value_t = 10_000_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub cap_cells: u64,

    /// Cells of a representation-count table
    #[arg(long, global = true, default_value_t = 100_000_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub cap_sieve: u64,

    /// Work units for sieves and probe sweeps
    #[arg(long, global = true, default_value_t = 10_000_000_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub budget: u64,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// Where a sequence comes from: a file or a built-in family.
#[derive(Args, Debug, Clone, Serialize)]
pub struct SeqSource {
    /// Sequence file: one integer per line, or JSON (plain or a `generate` report)
    #[arg(long, conflicts_with = "family")]
    pub seq: Option<String>,

    /// Built-in family, e.g. `naturals:bound=1000`, `geometric:q=3,count=30`,
    /// `lacunary_random:ratio=2,count=20`, `padic_cover:prime=2,stages=3`
    #[arg(long)]
    pub family: Option<String>,

    /// Seed for random families when the family string gives none
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct PrimeSet {
    /// Use every prime up to this bound
    #[arg(long, default_value_t = 97)]
    pub primes_up_to: u64,

    /// Explicit primes (comma separated); overrides --primes-up-to
    #[arg(long, value_delimiter = ',')]
    pub prime: Vec<u64>,

    /// Deepest p-adic level (default: twice the saturation level, plus two)
    #[arg(long)]
    pub jmax: Option<u32>,

    /// Number of trailing unsaturated scales used in slope fits
    #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u64).range(2..))]
    pub window: u64,
}

#[derive(Subcommand, Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum Command {
    /// Representation count r_d(lambda), or a table for 0..=max-lambda
    Count(CountArgs),
    /// Lattice points on the sphere |y|^2 = lambda
    Enumerate(SphereArgs),
    /// Apply A_lambda to a grid function file
    Average(AverageArgs),
    /// Apply M_Lambda to a grid function file
    Maximal(MaximalArgs),
    /// Materialize a sequence family
    Generate(GenerateArgs),
    /// p-adic and dyadic dimension profiles of a sequence
    Analyze(AnalyzeArgs),
    /// Critical exponent eta(Lambda, d)
    Eta(EtaArgs),
    /// Delta-function lower bound ||M delta_0||_p
    ProbeDelta(ProbeDeltaArgs),
    /// Growth slope of delta-test partial sums along a truncation schedule
    ProbeSlope(ProbeSlopeArgs),
    /// Periodic p-adic indicator probe on the torus
    ProbePadic(ProbePadicArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Count(_) => "count",
            Command::Enumerate(_) => "enumerate",
            Command::Average(_) => "average",
            Command::Maximal(_) => "maximal",
            Command::Generate(_) => "generate",
            Command::Analyze(_) => "analyze",
            Command::Eta(_) => "eta",
            Command::ProbeDelta(_) => "probe-delta",
            Command::ProbeSlope(_) => "probe-slope",
            Command::ProbePadic(_) => "probe-padic",
        }
    }
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct CountArgs {
    #[arg(long)]
    pub d: usize,
    #[arg(long, required_unless_present = "max_lambda", conflicts_with = "max_lambda")]
    pub lambda: Option<u64>,
    #[arg(long)]
    pub max_lambda: Option<u64>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct SphereArgs {
    #[arg(long)]
    pub d: usize,
    #[arg(long)]
    pub lambda: u64,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct AverageArgs {
    /// Grid function JSON `{"d": .., "points": [[x_1, .., x_d, value], ..]}`
    #[arg(long)]
    pub input: String,
    #[arg(long)]
    pub lambda: u64,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct MaximalArgs {
    #[arg(long)]
    pub input: String,
    /// Radii-squared (comma separated) instead of a sequence
    #[arg(long, value_delimiter = ',', conflicts_with_all = ["seq", "family"])]
    pub lambdas: Vec<u64>,
    #[command(flatten)]
    pub source: SeqSource,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct GenerateArgs {
    #[arg(long)]
    pub family: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub source: SeqSource,
    #[command(flatten)]
    pub primes: PrimeSet,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct EtaArgs {
    #[arg(long)]
    pub d: usize,
    #[command(flatten)]
    pub source: SeqSource,
    /// Use the family's closed-form dimensions
    #[arg(long, conflicts_with = "estimated")]
    pub declared: bool,
    /// Estimate dimensions from the truncation
    #[arg(long)]
    pub estimated: bool,
    #[command(flatten)]
    pub primes: PrimeSet,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct ProbeDeltaArgs {
    #[arg(long)]
    pub d: usize,
    /// l^p exponent (`inf` allowed)
    #[arg(long, alias = "q")]
    pub p: f64,
    #[command(flatten)]
    pub source: SeqSource,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct ProbeSlopeArgs {
    #[arg(long)]
    pub d: usize,
    #[arg(long, alias = "q")]
    pub p: f64,
    /// Truncation bounds T_1 < T_2 < ... (at least four)
    #[arg(long, value_delimiter = ',', required = true)]
    pub schedule: Vec<u64>,
    #[command(flatten)]
    pub source: SeqSource,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct ProbePadicArgs {
    #[arg(long)]
    pub d: usize,
    /// Exponent of the torus norm
    #[arg(long, alias = "q")]
    pub p: f64,
    #[arg(long)]
    pub prime: u64,
    /// Largest torus level k (ratios are reported for 1..=k)
    #[arg(long, default_value_t = 1)]
    pub level: u32,
    #[command(flatten)]
    pub source: SeqSource,
}
