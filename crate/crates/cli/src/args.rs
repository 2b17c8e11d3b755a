use std::path::PathBuf;

use clap::{ArgAction, Args, Parser, Subcommand, ValueEnum};

use piecevalue::rules::Variant;
use piecevalue::selfplay::FitShape;
use piecevalue::snapshot::SchemeKind;

#[derive(Debug, Parser)]
#[command(name = "piecevalue", version, about = "Piece values in Elo-like units from chess game archives")]
pub struct Cli {
    /// More log output; repeat for more detail.
    #[arg(short, long, global = true, action = ArgAction::Count)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse PGN archives, build the player history index and filter games.
    Ingest(IngestArgs),
    /// Draw snapshot positions and write feature tables.
    Snapshot(SnapshotArgs),
    /// Plain logistic regression on a feature table.
    Fit(FitArgs),
    /// SIMEX sweep and regression calibration.
    Simex(SimexArgs),
    /// Percentile bootstrap of the SIMEX and calibration pipeline.
    Bootstrap(BootstrapArgs),
    /// Monte Carlo experiments and synthetic archives.
    #[command(subcommand)]
    Mc(McCommand),
    /// Closed-form rating noise of the Elo-like update.
    EloNoise(EloNoiseArgs),
    /// Update steps implied by recorded rating changes.
    ImpliedK(ImpliedKArgs),
    /// Engine self-play from ablated openings.
    #[command(subcommand)]
    Selfplay(SelfplayCommand),
    /// Relative values, equalizers, ply curves and historical comparison.
    Report(ReportArgs),
    /// Built-in engine speaking UCI on standard input and output.
    #[command(hide = true)]
    MockEngine(MockEngineArgs),
}

pub fn parse_variant(s: &str) -> Result<Variant, String> {
    s.parse()
}

fn parse_scheme(s: &str) -> Result<SchemeKind, String> {
    s.parse()
}

fn parse_shape(s: &str) -> Result<FitShape, String> {
    s.parse()
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    /// Run configuration; supplies variant, inputs, filter policy and output directory.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_parser = parse_variant)]
    pub variant: Option<Variant>,
    /// PGN file; repeat for several.
    #[arg(long = "input")]
    pub inputs: Vec<PathBuf>,
    /// Filter policy TOML; defaults apply when absent.
    #[arg(long)]
    pub policy: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SnapshotArgs {
    /// Games written by `ingest` (JSON lines).
    #[arg(long)]
    pub games: PathBuf,
    /// uniform, first-third, middle-third, last-third or range:LO:HI.
    #[arg(long, default_value = "uniform", value_parser = parse_scheme)]
    pub scheme: SchemeKind,
    /// Reject snapshots followed by a capture within this many plies.
    #[arg(long, default_value_t = 1)]
    pub depth: u8,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub policy: Option<PathBuf>,
    /// Ranged snapshots instead of one scheme: `standard` or `LO:HI,LO:HI,...`.
    #[arg(long)]
    pub ranges: Option<String>,
    /// Feature table, or a directory when `--ranges` is given.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    /// Feature table written by `snapshot`.
    #[arg(long)]
    pub rows: PathBuf,
    /// `compact`, `expanded` or a comma list of terms; defaults by variant.
    #[arg(long)]
    pub terms: Option<String>,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct NoiseArgs {
    /// Rating noise already in the data; estimated when absent (simex only).
    #[arg(long)]
    pub sigma0: Option<f64>,
    /// `default`, `geom:LO:HI:N` or a comma list of extra noise levels.
    #[arg(long, default_value = "default")]
    pub grid: String,
    #[arg(long, default_value_t = piecevalue::simex::DEFAULT_REPLICATES)]
    pub replicates: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct SimexArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub noise: NoiseArgs,
    /// Candidate σ₀ values when estimating: `geom:LO:HI:N` or a comma list.
    #[arg(long, default_value = "20,25,30,35,40,45,50,55,60,65,70,75,80,90,100")]
    pub candidates: String,
    /// Ply range label carried into the output, `LO:HI`.
    #[arg(long)]
    pub range: Option<String>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct BootstrapArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub noise: NoiseArgs,
    /// Bootstrap replicates.
    #[arg(long, default_value_t = 50)]
    pub b: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum McCommand {
    /// Knight experiment: known white advantage, rating effect and knight value.
    Knight(KnightArgs),
    /// Rating-only attenuation curve on synthetic games.
    Calibration(CalibrationArgs),
    /// Synthetic PGN archive of random legal games.
    Archive(ArchiveArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum OutOfRangeArg {
    Clamp,
    Drop,
}

#[derive(Debug, Args)]
pub struct KnightArgs {
    #[arg(long, default_value_t = 500_000)]
    pub n: usize,
    #[arg(long, default_value_t = 58.0)]
    pub sigma0: f64,
    #[arg(long, default_value = "default")]
    pub grid: String,
    #[arg(long, default_value_t = piecevalue::simex::DEFAULT_REPLICATES)]
    pub replicates: usize,
    /// Observed rating differences to resample, one per line.
    #[arg(long)]
    pub deltas: Option<PathBuf>,
    /// Gaussian source used without `--deltas`; the default mean centres the
    /// knight probability at one half.
    #[arg(long, default_value_t = 1.0 / piecevalue::ELO_LOGIT, allow_hyphen_values = true)]
    pub source_mean: f64,
    #[arg(long, default_value_t = 120.0)]
    pub source_sd: f64,
    #[arg(long, value_enum, default_value_t = OutOfRangeArg::Clamp)]
    pub out_of_range: OutOfRangeArg,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CalibrationArgs {
    #[arg(long, default_value_t = 100_000)]
    pub n: usize,
    /// Spread of the true rating differences.
    #[arg(long, default_value_t = 200.0)]
    pub sd: f64,
    /// Noise levels; `default` uses the standard grid around 58.
    #[arg(long, default_value = "default")]
    pub grid: String,
    #[arg(long, default_value_t = piecevalue::simex::DEFAULT_REPLICATES)]
    pub replicates: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct ArchiveArgs {
    /// Archive settings TOML; flags below override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_parser = parse_variant)]
    pub variant: Option<Variant>,
    #[arg(long)]
    pub games: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EloNoiseArgs {
    /// Update step.
    #[arg(long)]
    pub k: f64,
    /// True ability difference.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub da: f64,
    /// Draw probability.
    #[arg(long, default_value_t = 0.0)]
    pub p: f64,
    /// Also simulate the update for this many steps.
    #[arg(long)]
    pub simulate: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct ImpliedKArgs {
    /// Games written by `ingest`.
    #[arg(long, conflicts_with = "pgn")]
    pub games: Option<PathBuf>,
    /// Raw PGN instead of ingested games.
    #[arg(long)]
    pub pgn: Option<PathBuf>,
    #[arg(long, value_parser = parse_variant, default_value = "standard")]
    pub variant: Variant,
    #[arg(long, default_value_t = 40)]
    pub bins: usize,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub lo: f64,
    #[arg(long, default_value_t = 60.0)]
    pub hi: f64,
}

#[derive(Debug, Subcommand)]
pub enum SelfplayCommand {
    /// Play the games of a match spec, appending results to a ledger.
    Run(SelfplayRunArgs),
    /// Fit a regression shape to the ledger.
    Fit(SelfplayFitArgs),
}

#[derive(Debug, Args)]
pub struct SelfplayRunArgs {
    /// Match spec TOML.
    #[arg(long)]
    pub spec: PathBuf,
    #[arg(long)]
    pub ledger: PathBuf,
    /// UCI engine executable; two instances are started.
    #[arg(long, conflicts_with = "mock")]
    pub engine: Option<String>,
    #[arg(long = "engine-arg", allow_hyphen_values = true)]
    pub engine_args: Vec<String>,
    /// Built-in engine instead: `first-legal` or `random:SEED`.
    #[arg(long)]
    pub mock: Option<String>,
}

#[derive(Debug, Args)]
pub struct SelfplayFitArgs {
    #[arg(long)]
    pub ledger: PathBuf,
    /// engine-only, equal-engines-pieces, full or per-square.
    #[arg(long, default_value = "full", value_parser = parse_shape)]
    pub shape: FitShape,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Output of `simex` for the headline fit.
    #[arg(long)]
    pub simex: Option<PathBuf>,
    /// Outputs of `simex --range`; repeat, in any order.
    #[arg(long = "ranged")]
    pub ranged: Vec<PathBuf>,
    #[arg(long, value_parser = parse_variant, default_value = "standard")]
    pub variant: Variant,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct MockEngineArgs {
    /// `first-legal` or `random:SEED`.
    #[arg(long, default_value = "first-legal")]
    pub policy: String,
}
