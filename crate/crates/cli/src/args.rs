use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "panelrank",
    version,
    about = "Screen, weight and audit expert-panel criteria (Delphi, SWARA, Kendall's W)",
    after_help = "Exit status: 0 on success, 1 on validation errors, 2 on usage errors.\n\
                  Set PANELRANK_NO_COLOR to disable styled output."
)]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum)]
    pub format: Option<FormatArg>,

    /// Write output here (atomically) instead of standard output.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,

    /// TOML file with default option values; flags override it.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate input files and print them in canonical form.
    Ingest(IngestArgs),
    /// Aggregate Likert ratings and apply a screening rule.
    Screen(ScreenArgs),
    /// Compute criterion weights.
    Swara(SwaraArgs),
    /// Kendall's W over expert rankings.
    Concordance(ConcordanceArgs),
    /// Bootstrap or perturbation stability analysis.
    Sensitivity(SensitivityArgs),
    /// Render screening and weight tables, or re-render a saved JSON document.
    Report(ReportArgs),
    /// Compare computed tables with published reference columns.
    Audit(AuditArgs),
    /// Screen, weight, measure concordance and audit in one run.
    Pipeline(PipelineArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    #[value(alias = "md")]
    Markdown,
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VariantArg {
    Canonical,
    FlatK,
    Extended,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeArg {
    Bootstrap,
    Perturb,
}

/// Where input tables come from. `--paper-data` fills any slot not given
/// explicitly; `--project` likewise.
#[derive(Debug, Clone, Default, Args)]
pub struct Sources {
    /// Ratings CSV (`code,<expert>,...`).
    #[arg(long, value_name = "PATH")]
    pub ratings: Option<PathBuf>,
    /// s-values CSV (`code,s` or `code,label,s`).
    #[arg(long, value_name = "PATH")]
    pub svalues: Option<PathBuf>,
    /// Project JSON bundle.
    #[arg(long, value_name = "PATH", conflicts_with = "paper_data")]
    pub project: Option<PathBuf>,
    /// Use the bundled reference study wherever a file is expected.
    #[arg(long)]
    pub paper_data: bool,
}

#[derive(Debug, Clone, Default, Args)]
pub struct RuleArgs {
    /// Accept criteria whose mean rating is at least this value.
    #[arg(long, conflicts_with = "labels")]
    pub threshold: Option<f64>,
    /// Recorded decisions: a `code,decision` CSV, or `bundled`.
    #[arg(long, value_name = "PATH|bundled")]
    pub labels: Option<String>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct ReferenceArgs {
    /// Published reference tables: `bundled`, or a project JSON that carries them.
    #[arg(long, value_name = "bundled|PATH")]
    pub reference: Option<String>,
    /// Tolerance applied to every audited column (defaults: mean 1e-6, k 5e-7, w 1.5e-3).
    #[arg(long)]
    pub tolerance: Option<f64>,
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    #[command(flatten)]
    pub sources: Sources,
    /// Ranks CSV (average ranks, ties allowed).
    #[arg(long, value_name = "PATH")]
    pub ranks: Option<PathBuf>,
    /// Labels CSV (`code,decision`).
    #[arg(long, value_name = "PATH")]
    pub labels: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ScreenArgs {
    #[command(flatten)]
    pub sources: Sources,
    #[command(flatten)]
    pub rule: RuleArgs,
    #[command(flatten)]
    pub reference: ReferenceArgs,
}

#[derive(Debug, Args)]
pub struct SwaraArgs {
    #[command(flatten)]
    pub sources: Sources,
    /// Ranks CSV for the extended variant.
    #[arg(long, value_name = "PATH")]
    pub ranks: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub variant: Option<VariantArg>,
    /// Append an audit of k and w against the reference weights.
    #[arg(long)]
    pub audit: bool,
    #[command(flatten)]
    pub reference: ReferenceArgs,
}

#[derive(Debug, Args)]
pub struct ConcordanceArgs {
    #[command(flatten)]
    pub sources: Sources,
    /// Ranks CSV; without it, ratings are converted (highest rating = rank 1).
    #[arg(long, value_name = "PATH")]
    pub ranks: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SensitivityArgs {
    #[command(flatten)]
    pub sources: Sources,
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    #[command(flatten)]
    pub rule: RuleArgs,
    #[arg(long)]
    pub iterations: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Sweep points per criterion.
    #[arg(long)]
    pub grid: Option<usize>,
    #[arg(long, value_enum)]
    pub variant: Option<VariantArg>,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    #[command(flatten)]
    pub sources: Sources,
    #[command(flatten)]
    pub rule: RuleArgs,
    #[arg(long, value_enum)]
    pub variant: Option<VariantArg>,
    /// A JSON document written by any subcommand, re-rendered in `--format`.
    #[arg(long, value_name = "PATH", conflicts_with_all = ["ratings", "svalues", "project", "paper_data"])]
    pub input: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AuditArgs {
    #[command(flatten)]
    pub sources: Sources,
    #[command(flatten)]
    pub rule: RuleArgs,
    #[arg(long, value_enum)]
    pub variant: Option<VariantArg>,
    #[command(flatten)]
    pub reference: ReferenceArgs,
}

#[derive(Debug, Args)]
pub struct PipelineArgs {
    #[command(flatten)]
    pub sources: Sources,
    #[command(flatten)]
    pub rule: RuleArgs,
    #[arg(long, value_enum)]
    pub variant: Option<VariantArg>,
    #[command(flatten)]
    pub reference: ReferenceArgs,
    /// Skip the audit even when reference tables are available.
    #[arg(long)]
    pub no_audit: bool,
}
