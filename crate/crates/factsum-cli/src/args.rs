//! Command-line surface: subcommands, shared flags, and value enums.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use factsum::dataset::LengthAction;
use factsum::entities::CountMode;
use factsum::matching::TargetMatchMode;

#[derive(Parser, Debug)]
#[command(
    name = "factsum",
    version,
    about = "Entity-level factual consistency metrics and corpus transforms for summarization",
    propagate_version = true
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Score hypotheses against sources (and references when present)
    Score(ScoreArgs),
    /// Drop ungrounded target sentences or whole records
    Filter(FilterArgs),
    /// Prefix each target with its entity chain behind a separator token
    Augment(AugmentArgs),
    /// Clean noisy text and enforce token-length budgets
    Clean(CleanArgs),
    /// Summarize corpus length/entity distributions
    Stats(StatsArgs),
    /// Emit per-record entity inventories
    Extract(ExtractArgs),
}

/// Flags shared by every subcommand.
#[derive(Args, Debug, Clone)]
pub struct CommonArgs {
    /// Input corpus: JSON Lines, one record object per line
    #[arg(long, value_name = "FILE")]
    pub input: PathBuf,

    /// Output artifact path (transforms require it; reports default to stdout)
    #[arg(long, value_name = "FILE")]
    pub output: Option<PathBuf>,

    /// Where entities come from: extracted from text, or read from the
    /// record's entities_* annotation fields
    #[arg(long, value_enum, default_value_t = ExtractorArg::Heuristic)]
    pub extractor: ExtractorArg,

    /// Stop-word override file (one token per line, '#' comments)
    #[arg(long, value_name = "FILE")]
    pub stopwords: Option<PathBuf>,

    /// Abort with exit code 2 on the first malformed record instead of
    /// skipping it with a diagnostic
    #[arg(long)]
    pub strict: bool,

    /// Worker threads; outputs are byte-identical for any value
    #[arg(long, value_name = "N", default_value_t = 1)]
    pub jobs: usize,

    /// Let a single stop-word token carry a match (off by default)
    #[arg(long)]
    pub allow_stopword_unigrams: bool,

    /// Refuse purely numeric single tokens as matches
    #[arg(long)]
    pub block_numeric_unigrams: bool,

    /// How hypothesis/reference entity sets are intersected
    #[arg(long, value_enum, default_value_t = TargetMatchArg::ExactKey)]
    pub target_match: TargetMatchArg,
}

#[derive(Args, Debug)]
pub struct ScoreArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Counting variant(s) shown in the rendered table (JSON always has both)
    #[arg(long, value_enum, default_value_t = ModeArg::Both)]
    pub mode: ModeArg,
    /// Report form printed to stdout
    #[arg(long, value_enum, default_value_t = ReportArg::Table)]
    pub report: ReportArg,
    /// Row label in the rendered table
    #[arg(long, default_value = "corpus")]
    pub label: String,
}

#[derive(Args, Debug)]
pub struct FilterArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// sentence: drop ungrounded target sentences; pair: drop whole records
    /// below the precision threshold
    #[arg(long, value_enum)]
    pub strategy: StrategyArg,
    /// Counting variant for the pair-filter precision (u or nu)
    #[arg(long, value_enum, default_value_t = ModeArg::Nu)]
    pub mode: ModeArg,
    /// Minimum target-side source precision a record must reach (pair)
    #[arg(long, default_value_t = 1.0)]
    pub threshold: f64,
}

#[derive(Args, Debug)]
pub struct AugmentArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Separator token written between entity chain and summary
    #[arg(long, default_value = factsum::dataset::DEFAULT_SEPARATOR)]
    pub separator: String,
}

#[derive(Args, Debug)]
pub struct CleanArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Keep original casing
    #[arg(long)]
    pub keep_case: bool,
    /// Keep bracketed citation markers like [12]
    #[arg(long)]
    pub keep_citations: bool,
    /// Keep ASCII punctuation
    #[arg(long)]
    pub keep_punctuation: bool,
    /// Keep non-ASCII symbols (±, °, …)
    #[arg(long)]
    pub keep_symbols: bool,
    /// Keep digit-only tokens
    #[arg(long)]
    pub keep_numerals: bool,
    /// Maximum whitespace tokens in a source
    #[arg(long, value_name = "N", default_value_t = 8192)]
    pub max_source_tokens: usize,
    /// Maximum whitespace tokens in a target
    #[arg(long, value_name = "N", default_value_t = 512)]
    pub max_target_tokens: usize,
    /// Minimum whitespace tokens in a target
    #[arg(long, value_name = "N", default_value_t = 100)]
    pub min_target_tokens: usize,
    /// What to do with records violating a budget
    #[arg(long, value_enum, default_value_t = LengthActionArg::Truncate)]
    pub length_action: LengthActionArg,
}

#[derive(Args, Debug)]
pub struct StatsArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Report form printed to stdout
    #[arg(long, value_enum, default_value_t = ReportArg::Table)]
    pub report: ReportArg,
}

#[derive(Args, Debug)]
pub struct ExtractArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Which record field to take entities from
    #[arg(long, value_enum, default_value_t = FieldArg::Target)]
    pub field: FieldArg,
}

// ---------------------------------------------------------------------------
// Value enums
// ---------------------------------------------------------------------------

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModeArg {
    U,
    Nu,
    Both,
}

impl ModeArg {
    /// The single counting mode, when one was chosen.
    pub fn single(self) -> Option<CountMode> {
        match self {
            ModeArg::U => Some(CountMode::Unique),
            ModeArg::Nu => Some(CountMode::NonUnique),
            ModeArg::Both => None,
        }
    }

    pub fn echo(self) -> &'static str {
        match self {
            ModeArg::U => "u",
            ModeArg::Nu => "nu",
            ModeArg::Both => "both",
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtractorArg {
    /// Maximal non-stop-word runs per sentence
    Heuristic,
    /// Use the record's entities_* fields
    Annotations,
}

impl ExtractorArg {
    pub fn echo(self) -> &'static str {
        match self {
            ExtractorArg::Heuristic => "heuristic",
            ExtractorArg::Annotations => "annotations",
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum TargetMatchArg {
    /// Canonical keys must be equal
    ExactKey,
    /// Partial n-gram match against the other side's text
    PartialText,
}

impl From<TargetMatchArg> for TargetMatchMode {
    fn from(arg: TargetMatchArg) -> Self {
        match arg {
            TargetMatchArg::ExactKey => TargetMatchMode::ExactKey,
            TargetMatchArg::PartialText => TargetMatchMode::PartialText,
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportArg {
    Table,
    Json,
    Both,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum StrategyArg {
    Sentence,
    Pair,
}

impl StrategyArg {
    pub fn echo(self) -> &'static str {
        match self {
            StrategyArg::Sentence => "sentence",
            StrategyArg::Pair => "pair",
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum LengthActionArg {
    Truncate,
    Drop,
    Flag,
    /// Skip length enforcement entirely
    None,
}

impl LengthActionArg {
    pub fn to_action(self) -> Option<LengthAction> {
        match self {
            LengthActionArg::Truncate => Some(LengthAction::Truncate),
            LengthActionArg::Drop => Some(LengthAction::Drop),
            LengthActionArg::Flag => Some(LengthAction::Flag),
            LengthActionArg::None => None,
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldArg {
    Source,
    Target,
    Hypothesis,
}

impl FieldArg {
    pub fn echo(self) -> &'static str {
        match self {
            FieldArg::Source => "source",
            FieldArg::Target => "target",
            FieldArg::Hypothesis => "hypothesis",
        }
    }
}
