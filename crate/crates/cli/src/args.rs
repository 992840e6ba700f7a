use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use zerorect_core::disclab::ConstantTag;

#[derive(Parser, Debug)]
#[command(name = "zerorect", version, about = "Disjoint pairs, covering probabilities and zero submatrices")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct GlobalArgs {
    /// Write the report here (atomically) instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// JSON run configuration; its fields override the matching flags.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Leave the timestamp out of the report.
    #[arg(long, global = true)]
    pub no_timestamp: bool,
    /// Worker threads; defaults to the number of logical cores.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Seed for every randomized step; identical seeds give identical reports.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// `proven` makes every step certificate and progress quantum a hard check.
    #[arg(long, global = true, value_enum, default_value_t = ConstantsArg::Practical)]
    pub constants: ConstantsArg,
    /// Caps on distinct rows and columns for exact matrix searches.
    #[arg(long, global = true)]
    pub budget_rows: Option<usize>,
    /// See `--budget-rows`.
    #[arg(long, global = true)]
    pub budget_cols: Option<usize>,
    /// Cap on family sizes for exact set-family searches.
    #[arg(long, global = true)]
    pub budget_family: Option<usize>,
    /// Cap on universe sizes for exact covering computations.
    #[arg(long, global = true)]
    pub budget_universe: Option<usize>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstantsArg {
    Proven,
    Practical,
}

impl From<ConstantsArg> for ConstantTag {
    fn from(c: ConstantsArg) -> Self {
        match c {
            ConstantsArg::Proven => ConstantTag::Proven,
            ConstantsArg::Practical => ConstantTag::Practical,
        }
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Cross-disjoint subfamilies of two families.
    Extract(ExtractArgs),
    /// Probability that one random set is covered by the union of `r` others.
    Cover(CoverArgs),
    /// Entropy scan, Fourier bias and parity checks.
    Spectral(SpectralArgs),
    /// Discrepancy witnesses, halving and variance floors of a matrix.
    Disclab(DisclabArgs),
    /// Zero or constant submatrix of a low-rank matrix.
    Zerorect(ZerorectArgs),
    /// Emit a construction as matrix CSV or family JSON.
    Gen(ConstructionArgs),
    /// Check the claimed properties of a construction.
    Verify(ConstructionArgs),
    /// Exact exponential-time searches.
    Oracle(OracleArgs),
}

#[derive(Args, Debug)]
pub struct MatrixInput {
    /// Matrix CSV without a header.
    #[arg(long)]
    pub matrix: PathBuf,
    /// Parse entries as exact rationals instead of floats.
    #[arg(long)]
    pub exact: bool,
}

#[derive(Args, Debug)]
pub struct PairInput {
    /// First family (JSON).
    #[arg(long)]
    pub a: PathBuf,
    /// Second family (JSON); the first is reused when absent.
    #[arg(long)]
    pub b: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtractMethod {
    RandomUnion,
    Drc,
    Clean,
}

#[derive(Args, Debug)]
pub struct ExtractArgs {
    #[command(flatten)]
    pub input: PairInput,
    #[arg(long, value_enum, default_value_t = ExtractMethod::RandomUnion)]
    pub method: ExtractMethod,
    #[arg(long, default_value_t = 0.5)]
    pub delta: f64,
    #[arg(long, default_value_t = 64)]
    pub trials: usize,
    /// Number of sets in each random union; derived from the density when absent.
    #[arg(long)]
    pub k: Option<usize>,
    /// Density threshold for the drc and clean methods.
    #[arg(long, default_value_t = 0.5)]
    pub theta: f64,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum DistKind {
    Pbiased,
    Uniform,
    Family,
}

#[derive(Args, Debug)]
pub struct CoverArgs {
    /// `pbiased` (product measure), `uniform` (all of 2^[n]) or `family` (uniform on a family file).
    #[arg(long, value_enum)]
    pub dist: DistKind,
    #[arg(long)]
    pub n: Option<usize>,
    /// Inclusion probability, as a decimal or `a/b`.
    #[arg(long)]
    pub p: Option<String>,
    #[arg(long)]
    pub family: Option<PathBuf>,
    #[arg(long)]
    pub r: usize,
    /// Exact rational computation instead of Monte Carlo.
    #[arg(long)]
    pub exact: bool,
    #[arg(long, default_value_t = 100_000)]
    pub trials: u64,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectralMode {
    EntropyScan,
    Bias,
    EvenOdd,
    Parseval,
}

#[derive(Args, Debug)]
pub struct SpectralArgs {
    #[arg(long, value_enum)]
    pub mode: SpectralMode,
    #[arg(long)]
    pub a: Option<PathBuf>,
    #[arg(long)]
    pub b: Option<PathBuf>,
    #[arg(long, default_value_t = 2)]
    pub prime: u64,
    /// Frequency for `bias`.
    #[arg(long, default_value_t = 1)]
    pub j: u64,
    /// Grid steps on [0, 1] for `entropy-scan`.
    #[arg(long, default_value_t = 10_000)]
    pub steps: u64,
    #[arg(long, default_value_t = 80)]
    pub k_max: u32,
    /// Natural log of the additive constant in the entropy inequality.
    #[arg(long, default_value_t = 40.0)]
    pub ln_c: f64,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum DisclabOp {
    Witness,
    Half,
    Step,
    Variance,
    Deviation,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum RuleArg {
    SqrtPOverR,
    PTimesOneMinusP,
    OneOverR,
}

#[derive(Args, Debug)]
pub struct DisclabArgs {
    #[command(flatten)]
    pub input: MatrixInput,
    #[arg(long, value_enum, default_value_t = DisclabOp::Witness)]
    pub op: DisclabOp,
    #[arg(long, value_enum, default_value_t = RuleArg::SqrtPOverR)]
    pub rule: RuleArg,
    #[arg(long)]
    pub rank: Option<usize>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum PipelineMode {
    Zero,
    Constant,
}

#[derive(Args, Debug)]
pub struct ZerorectArgs {
    #[command(flatten)]
    pub input: MatrixInput,
    /// `zero` for an all-zero block, `constant` for the integer pipeline.
    #[arg(long, value_enum, default_value_t = PipelineMode::Zero)]
    pub mode: PipelineMode,
    #[arg(long)]
    pub rank: Option<usize>,
    #[arg(long)]
    pub max_steps: Option<usize>,
    /// Upper bound on the mean for the constant pipeline.
    #[arg(long)]
    pub level_bound: Option<u64>,
    /// Skip the greedy extension of the final block.
    #[arg(long)]
    pub no_extend: bool,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstructionId {
    C1,
    C2,
    C3,
    C4,
    Pbiased,
}

#[derive(Args, Debug)]
pub struct ConstructionArgs {
    #[arg(long, value_enum, ignore_case = true)]
    pub construction: ConstructionId,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long)]
    pub r: Option<usize>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub p: Option<String>,
    /// For `gen c2`: emit the family instead of the matrix.
    #[arg(long)]
    pub family: bool,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleOp {
    CutNorm,
    Disc,
    ConstantSquare,
    ConstantRectangle,
    Biclique,
}

#[derive(Args, Debug)]
pub struct OracleArgs {
    #[arg(long, value_enum)]
    pub op: OracleOp,
    #[arg(long)]
    pub matrix: Option<PathBuf>,
    #[arg(long)]
    pub exact: bool,
    /// Restrict constant searches to this value.
    #[arg(long)]
    pub value: Option<String>,
    #[arg(long)]
    pub a: Option<PathBuf>,
    #[arg(long)]
    pub b: Option<PathBuf>,
}
