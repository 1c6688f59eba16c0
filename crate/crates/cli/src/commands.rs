use std::path::Path;

use panelrank::concordance::kendalls_w;
use panelrank::delphi::{aggregate, ratings_to_ranks, screen, RankDirection};
use panelrank::ingest::{
    emit_canonical, load_paper_dataset, parse_labels, parse_project, parse_ranks, parse_ratings,
    parse_svalues, ProjectBundle, ReferenceTables,
};
use panelrank::model::{RankMatrix, RatingMatrix, ScreeningRule, SwaraInput, SwaraVariant};
use panelrank::pipeline::{pipeline, reference_disagreement, PipelineConfig};
use panelrank::report::{
    audit_screening, audit_weights, coverage, AuditTolerances, DiscrepancyReport, Document, Format,
    Render,
};
use panelrank::sensitivity::{bootstrap_experts, perturb_s};
use panelrank::swara::{swara, swara_extended};

use crate::args::{
    AuditArgs, Cli, Command, ConcordanceArgs, FormatArg, IngestArgs, ModeArg, PipelineArgs,
    ReferenceArgs, ReportArgs, RuleArgs, ScreenArgs, SensitivityArgs, Sources, SwaraArgs,
    VariantArg,
};
use crate::config::Config;
use crate::{emit, CliError, Style};

const DEFAULT_THRESHOLD: f64 = 4.0;
const DEFAULT_ITERATIONS: u64 = 1000;
const DEFAULT_SEED: u64 = 0;
const DEFAULT_EPSILON: f64 = 0.05;
const DEFAULT_GRID: usize = 11;

struct Ctx {
    config: Config,
    format: Format,
    style: Style,
}

pub fn run(cli: Cli, style: Style) -> Result<(), CliError> {
    let config = Config::load(cli.config.as_deref())?;
    let format = match (cli.format, &config.format) {
        (Some(FormatArg::Markdown), _) => Format::Markdown,
        (Some(FormatArg::Csv), _) => Format::Csv,
        (Some(FormatArg::Json), _) => Format::Json,
        (None, Some(name)) => name
            .parse()
            .map_err(|e| CliError::Usage(format!("--config format: {e}")))?,
        (None, None) => Format::Markdown,
    };
    let ctx = Ctx {
        config,
        format,
        style,
    };
    let text = match cli.command {
        Command::Ingest(a) => ingest(&a)?,
        Command::Screen(a) => screen_cmd(&ctx, &a)?,
        Command::Swara(a) => swara_cmd(&ctx, &a)?,
        Command::Concordance(a) => concordance_cmd(&ctx, &a)?,
        Command::Sensitivity(a) => sensitivity_cmd(&ctx, &a)?,
        Command::Report(a) => report_cmd(&ctx, &a)?,
        Command::Audit(a) => audit_cmd(&ctx, &a)?,
        Command::Pipeline(a) => pipeline_cmd(&ctx, &a)?,
    };
    emit(&text, cli.out.as_deref())
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// The project named by `--project` or `--paper-data`, if any.
fn bundle(sources: &Sources) -> Result<Option<ProjectBundle>, CliError> {
    if let Some(path) = &sources.project {
        return Ok(Some(parse_project(&read(path)?)?));
    }
    Ok(sources.paper_data.then(load_paper_dataset))
}

fn ratings_from(
    sources: &Sources,
    bundle: Option<&ProjectBundle>,
) -> Result<Option<RatingMatrix>, CliError> {
    if let Some(path) = &sources.ratings {
        return Ok(Some(parse_ratings(&read(path)?)?));
    }
    Ok(bundle.map(|b| b.ratings.clone()))
}

fn svalues_from(
    sources: &Sources,
    bundle: Option<&ProjectBundle>,
) -> Result<Option<SwaraInput>, CliError> {
    if let Some(path) = &sources.svalues {
        return Ok(Some(parse_svalues(&read(path)?)?));
    }
    Ok(bundle.map(|b| b.swara_s.clone()))
}

fn require<T>(value: Option<T>, what: &str, flag: &str) -> Result<T, CliError> {
    value.ok_or_else(|| usage(format!("no {what}: pass {flag}, --project or --paper-data")))
}

fn ranks_from(
    ranks: Option<&Path>,
    sources: &Sources,
    bundle: Option<&ProjectBundle>,
) -> Result<RankMatrix, CliError> {
    if let Some(path) = ranks {
        return Ok(parse_ranks(&read(path)?)?);
    }
    let ratings = require(
        ratings_from(sources, bundle)?,
        "rankings",
        "--ranks or --ratings",
    )?;
    Ok(ratings_to_ranks(&ratings, RankDirection::HigherIsBetter)?)
}

fn rule(ctx: &Ctx, args: &RuleArgs) -> Result<ScreeningRule, CliError> {
    if let Some(t) = args.threshold {
        return Ok(ScreeningRule::MeanAtLeast(t));
    }
    let labels = args.labels.as_ref().or(match ctx.config.threshold {
        Some(_) => None,
        None => ctx.config.labels.as_ref(),
    });
    match labels.map(String::as_str) {
        Some("bundled") => Ok(load_paper_dataset()
            .reference
            .recorded_labels()
            .expect("bundled study carries labels")),
        Some(path) => Ok(parse_labels(&read(Path::new(path))?)?),
        None => Ok(ScreeningRule::MeanAtLeast(
            ctx.config.threshold.unwrap_or(DEFAULT_THRESHOLD),
        )),
    }
}

/// Reference tables from `--reference`, the config, or the loaded project.
fn reference(
    ctx: &Ctx,
    args: &ReferenceArgs,
    bundle: Option<&ProjectBundle>,
) -> Result<Option<ReferenceTables>, CliError> {
    let named = args.reference.as_ref().or(ctx.config.reference.as_ref());
    let tables = match named.map(String::as_str) {
        Some("bundled") => load_paper_dataset().reference,
        Some(path) => {
            let text = read(Path::new(path))?;
            let value: serde_json::Value = serde_json::from_str(&text)
                .map_err(|e| panelrank::ingest::IngestError::Json(e.to_string()))?;
            if value.get("panel").is_some() {
                parse_project(&text)?.reference
            } else {
                serde_json::from_value(value)
                    .map_err(|e| panelrank::ingest::IngestError::Json(e.to_string()))?
            }
        }
        None => {
            return Ok(bundle
                .map(|b| b.reference.clone())
                .filter(|r| !r.is_empty()))
        }
    };
    Ok(Some(tables))
}

fn tolerances(ctx: &Ctx, args: &ReferenceArgs) -> AuditTolerances {
    args.tolerance
        .or(ctx.config.tolerance)
        .map_or_else(AuditTolerances::default, AuditTolerances::uniform)
}

fn variant(ctx: &Ctx, flag: Option<VariantArg>) -> VariantArg {
    flag.or(ctx.config.variant).unwrap_or(VariantArg::FlatK)
}

fn weighting_variant(v: VariantArg, command: &str) -> Result<SwaraVariant, CliError> {
    match v {
        VariantArg::Canonical => Ok(SwaraVariant::Canonical),
        VariantArg::FlatK => Ok(SwaraVariant::FlatK),
        VariantArg::Extended => Err(usage(format!(
            "--variant extended is not available for `{command}` (use canonical or flat-k)"
        ))),
    }
}

fn ingest(args: &IngestArgs) -> Result<String, CliError> {
    let s = &args.sources;
    let given = [
        s.ratings.is_some(),
        s.svalues.is_some(),
        s.project.is_some(),
        s.paper_data,
        args.ranks.is_some(),
        args.labels.is_some(),
    ];
    if given.iter().filter(|&&g| g).count() != 1 {
        return Err(usage(
            "ingest takes exactly one of --ratings, --ranks, --svalues, --labels, --project, --paper-data",
        ));
    }
    Ok(if let Some(p) = &s.ratings {
        emit_canonical(&parse_ratings(&read(p)?)?)
    } else if let Some(p) = &args.ranks {
        emit_canonical(&parse_ranks(&read(p)?)?)
    } else if let Some(p) = &s.svalues {
        emit_canonical(&parse_svalues(&read(p)?)?)
    } else if let Some(p) = &args.labels {
        emit_canonical(&parse_labels(&read(p)?)?)
    } else {
        emit_canonical(&bundle(s)?.expect("project or paper data"))
    })
}

fn screen_cmd(ctx: &Ctx, args: &ScreenArgs) -> Result<String, CliError> {
    let bundle = bundle(&args.sources)?;
    let ratings = require(
        ratings_from(&args.sources, bundle.as_ref())?,
        "ratings",
        "--ratings",
    )?;
    let stats = aggregate(&ratings);
    let outcome = screen(&stats, &rule(ctx, &args.rule)?)?;
    if let Some(reference) = reference(ctx, &args.reference, bundle.as_ref())? {
        if let Some(warning) = reference_disagreement(&stats, &reference, &outcome) {
            ctx.style.warn(&warning);
        }
    }
    Ok(outcome.to_document().render(ctx.format))
}

fn swara_cmd(ctx: &Ctx, args: &SwaraArgs) -> Result<String, CliError> {
    let bundle = bundle(&args.sources)?;
    let chosen = variant(ctx, args.variant);
    if chosen == VariantArg::Extended {
        if args.audit {
            return Err(usage(
                "--audit compares k and w columns; use --variant canonical or flat-k",
            ));
        }
        let ranks = ranks_from(args.ranks.as_deref(), &args.sources, bundle.as_ref())?;
        return Ok(swara_extended(&ranks)?.to_document().render(ctx.format));
    }
    let published = if args.audit {
        let tables = reference(ctx, &args.reference, bundle.as_ref())?
            .filter(|r| !r.table4.is_empty())
            .ok_or_else(|| {
                usage(
                    "--audit needs published weights: pass --reference, --project or --paper-data",
                )
            })?;
        Some(tables.table4)
    } else {
        None
    };
    let input = require(
        svalues_from(&args.sources, bundle.as_ref())?,
        "s values",
        "--svalues",
    )?;
    let result = swara(&input, weighting_variant(chosen, "swara")?)?;
    let mut doc = result.to_document();
    if let Some(table4) = published {
        let report = audit_weights(&result, &table4, tolerances(ctx, &args.reference))?;
        doc = doc.extend(report.to_document());
    }
    Ok(doc.render(ctx.format))
}

fn concordance_cmd(ctx: &Ctx, args: &ConcordanceArgs) -> Result<String, CliError> {
    let bundle = bundle(&args.sources)?;
    let ranks = ranks_from(args.ranks.as_deref(), &args.sources, bundle.as_ref())?;
    Ok(kendalls_w(&ranks)?.to_document().render(ctx.format))
}

fn sensitivity_cmd(ctx: &Ctx, args: &SensitivityArgs) -> Result<String, CliError> {
    let bundle = bundle(&args.sources)?;
    let mode = args.mode.or(ctx.config.mode).unwrap_or(ModeArg::Bootstrap);
    let report = match mode {
        ModeArg::Bootstrap => {
            let ratings = require(
                ratings_from(&args.sources, bundle.as_ref())?,
                "ratings",
                "--ratings",
            )?;
            bootstrap_experts(
                &ratings,
                &rule(ctx, &args.rule)?,
                args.iterations
                    .or(ctx.config.iterations)
                    .unwrap_or(DEFAULT_ITERATIONS),
                args.seed.or(ctx.config.seed).unwrap_or(DEFAULT_SEED),
            )?
        }
        ModeArg::Perturb => {
            let input = require(
                svalues_from(&args.sources, bundle.as_ref())?,
                "s values",
                "--svalues",
            )?;
            perturb_s(
                &input,
                args.epsilon
                    .or(ctx.config.epsilon)
                    .unwrap_or(DEFAULT_EPSILON),
                args.grid.or(ctx.config.grid).unwrap_or(DEFAULT_GRID),
                weighting_variant(variant(ctx, args.variant), "sensitivity")?,
            )?
        }
    };
    Ok(report.to_document().render(ctx.format))
}

fn report_cmd(ctx: &Ctx, args: &ReportArgs) -> Result<String, CliError> {
    if let Some(path) = &args.input {
        let doc: Document = serde_json::from_str(&read(path)?).map_err(|e| {
            panelrank::ingest::IngestError::Json(format!("{}: {e}", path.display()))
        })?;
        return Ok(doc.render(ctx.format));
    }
    let bundle = bundle(&args.sources)?;
    let ratings = ratings_from(&args.sources, bundle.as_ref())?;
    let input = svalues_from(&args.sources, bundle.as_ref())?;
    if ratings.is_none() && input.is_none() {
        return Err(usage(
            "report needs --ratings and/or --svalues, --project, --paper-data, or --input",
        ));
    }
    let mut doc = Document::new("Panel report");
    let mut outcome = None;
    if let Some(ratings) = &ratings {
        let screened = screen(&aggregate(ratings), &rule(ctx, &args.rule)?)?;
        doc = doc.extend(screened.to_document());
        outcome = Some(screened);
    }
    if let Some(input) = &input {
        let result = swara(
            input,
            weighting_variant(variant(ctx, args.variant), "report")?,
        )?;
        doc = doc.extend(result.to_document());
    }
    if let (Some(outcome), Some(ratings), Some(input)) = (&outcome, ratings, &input) {
        let joined = match bundle {
            Some(b) if args.sources.ratings.is_none() && args.sources.svalues.is_none() => b,
            _ => ProjectBundle::from_parts(ratings, input, ReferenceTables::default())?,
        };
        doc = doc.extend(coverage(outcome, &joined).to_document());
    }
    Ok(doc.render(ctx.format))
}

fn audit_cmd(ctx: &Ctx, args: &AuditArgs) -> Result<String, CliError> {
    let bundle = bundle(&args.sources)?;
    let reference = reference(ctx, &args.reference, bundle.as_ref())?.ok_or_else(|| {
        usage("audit needs reference tables: pass --reference, --project or --paper-data")
    })?;
    let tol = tolerances(ctx, &args.reference);
    let mut report: Option<DiscrepancyReport> = None;
    if !reference.table3.is_empty() {
        if let Some(ratings) = ratings_from(&args.sources, bundle.as_ref())? {
            let outcome = screen(&aggregate(&ratings), &rule(ctx, &args.rule)?)?;
            report = Some(audit_screening(&outcome, &reference.table3, tol)?);
        }
    }
    if !reference.table4.is_empty() {
        if let Some(input) = svalues_from(&args.sources, bundle.as_ref())? {
            let result = swara(
                &input,
                weighting_variant(variant(ctx, args.variant), "audit")?,
            )?;
            let weights = audit_weights(&result, &reference.table4, tol)?;
            report = Some(match report {
                Some(r) => r.merge(weights),
                None => weights,
            });
        }
    }
    let report = report.ok_or_else(|| {
        usage("nothing to audit: the reference tables do not match the given ratings or s values")
    })?;
    Ok(report.to_document().render(ctx.format))
}

fn pipeline_cmd(ctx: &Ctx, args: &PipelineArgs) -> Result<String, CliError> {
    let loaded = bundle(&args.sources)?;
    let ratings = require(
        ratings_from(&args.sources, loaded.as_ref())?,
        "ratings",
        "--ratings",
    )?;
    let input = require(
        svalues_from(&args.sources, loaded.as_ref())?,
        "s values",
        "--svalues",
    )?;
    let reference = reference(ctx, &args.reference, loaded.as_ref())?.unwrap_or_default();
    let project = match loaded {
        Some(mut b) if args.sources.ratings.is_none() && args.sources.svalues.is_none() => {
            b.reference = reference;
            b
        }
        _ => ProjectBundle::from_parts(ratings, &input, reference)?,
    };
    let config = PipelineConfig {
        rule: rule(ctx, &args.rule)?,
        variant: weighting_variant(variant(ctx, args.variant), "pipeline")?,
        tolerances: tolerances(ctx, &args.reference),
        audit: !args.no_audit,
    };
    let output = pipeline(&project, &config)?;
    for warning in &output.warnings {
        ctx.style.warn(warning);
    }
    Ok(output.to_document().render(ctx.format))
}
