//! Table rendering (Markdown, CSV, JSON) and audits against published columns.
//!
//! Every result type converts into a [`Document`]: titled sections of rows.
//! Real-valued cells are rounded to 6 decimal places when the cell is built,
//! so the three renderings and the JSON round trip all agree.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::delphi::AggregateStats;
use crate::ingest::{ProjectBundle, Table3Row, Table4Row};
use crate::model::{
    ConcordanceReport, Criterion, ExtendedSwaraResult, ScreeningOutcome, SwaraResult,
};
use crate::sensitivity::{StabilityKind, StabilityReport};
use crate::swara::{rank_by_weight, rank_scores, RankBasis, Ranking};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ReportError {
    #[error("reference row `{0}` has no computed counterpart")]
    UnknownCode(String),
    #[error("tolerance {0} must be positive")]
    InvalidTolerance(f64),
    #[error("unknown format `{0}` (expected markdown, csv or json)")]
    UnknownFormat(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Markdown,
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = ReportError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "markdown" | "md" => Ok(Format::Markdown),
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(ReportError::UnknownFormat(other.to_owned())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cell {
    Int(i64),
    Num(f64),
    Text(String),
}

impl Cell {
    pub fn num(x: f64) -> Self {
        let rounded = (x * 1e6).round() / 1e6;
        Cell::Num(if rounded == 0.0 { 0.0 } else { rounded })
    }

    pub fn int(x: impl Into<i64>) -> Self {
        Cell::Int(x.into())
    }

    pub fn text(s: impl Into<String>) -> Self {
        Cell::Text(s.into())
    }

    fn display(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Num(v) => format!("{v:.6}"),
            Cell::Text(s) => s.clone(),
        }
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Section {
    pub title: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl Section {
    pub fn new(title: impl Into<String>, columns: &[&str]) -> Self {
        Self {
            title: title.into(),
            columns: columns.iter().map(|c| (*c).to_owned()).collect(),
            rows: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn row(mut self, cells: Vec<Cell>) -> Self {
        self.rows.push(cells);
        self
    }

    pub fn note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Document {
    pub title: String,
    pub sections: Vec<Section>,
}

impl Document {
    pub fn new(title: impl Into<String>) -> Self {
        Self {
            title: title.into(),
            sections: Vec::new(),
        }
    }

    pub fn section(mut self, section: Section) -> Self {
        self.sections.push(section);
        self
    }

    pub fn extend(mut self, other: Document) -> Self {
        self.sections.extend(other.sections);
        self
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Markdown => self.to_markdown(),
            Format::Csv => self.to_csv(),
            Format::Json => {
                let mut text = serde_json::to_string_pretty(self).expect("document serializes");
                text.push('\n');
                text
            }
        }
    }

    fn to_markdown(&self) -> String {
        let escape = |s: String| s.replace('|', "\\|");
        let mut out = format!("# {}\n", self.title);
        for section in &self.sections {
            let _ = write!(out, "\n## {}\n\n", section.title);
            let _ = writeln!(out, "| {} |", section.columns.join(" | "));
            let _ = writeln!(
                out,
                "|{}",
                section.columns.iter().map(|_| "---|").collect::<String>()
            );
            for row in &section.rows {
                let cells: Vec<String> = row.iter().map(|c| escape(c.display())).collect();
                let _ = writeln!(out, "| {} |", cells.join(" | "));
            }
            if !section.notes.is_empty() {
                out.push('\n');
                for note in &section.notes {
                    let _ = writeln!(out, "- {note}");
                }
            }
        }
        out
    }

    fn to_csv(&self) -> String {
        let blocks: Vec<String> = self.sections.iter().map(section_csv).collect();
        blocks.join("\n")
    }
}

/// One section as CSV; sections are separated by a blank line.
fn section_csv(section: &Section) -> String {
    let mut writer = csv::WriterBuilder::new()
        .flexible(true)
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let write = |w: &mut csv::Writer<Vec<u8>>, record: Vec<String>| {
        w.write_record(&record).expect("in-memory csv");
    };
    write(&mut writer, vec![format!("# {}", section.title)]);
    write(&mut writer, section.columns.clone());
    for row in &section.rows {
        write(&mut writer, row.iter().map(Cell::display).collect());
    }
    for note in &section.notes {
        write(&mut writer, vec![format!("# {note}")]);
    }
    String::from_utf8(writer.into_inner().expect("csv flush")).expect("utf-8")
}

/// Result types that have a tabular rendering.
pub trait Render {
    fn to_document(&self) -> Document;
}

pub fn render<R: Render + ?Sized>(result: &R, format: Format) -> String {
    result.to_document().render(format)
}

impl Render for ScreeningOutcome {
    fn to_document(&self) -> Document {
        let mut section = Section::new(
            format!("Screening ({})", self.rule_applied),
            &[
                "No.",
                "Code",
                "Criterion",
                "Average",
                "Std. Dev.",
                "Median",
                "Decision",
            ],
        );
        for r in &self.records {
            section = section.row(vec![
                r.criterion.ordinal.into(),
                Cell::text(&r.criterion.code),
                Cell::text(&r.criterion.label),
                Cell::num(r.mean),
                Cell::num(r.std_dev),
                Cell::num(r.median),
                Cell::text(r.decision.to_string()),
            ]);
        }
        let accepted = self.accepted().count();
        section = section.note(format!(
            "{accepted} accepted, {} rejected",
            self.records.len() - accepted
        ));
        Document::new("Criterion screening").section(section)
    }
}

impl Render for AggregateStats {
    fn to_document(&self) -> Document {
        let mut section = Section::new(
            format!("Aggregate statistics ({} experts)", self.experts),
            &["Code", "Average", "Std. Dev.", "Median", "Min", "Max"],
        );
        for c in &self.criteria {
            section = section.row(vec![
                Cell::text(&c.criterion.code),
                Cell::num(c.mean),
                Cell::num(c.std_dev),
                Cell::num(c.median),
                Cell::int(c.min),
                Cell::int(c.max),
            ]);
        }
        Document::new("Rating aggregates").section(section)
    }
}

fn ranking_section(title: &str, ranking: &Ranking, score_column: &str) -> Section {
    let mut section = Section::new(title, &["Rank", "Code", "Criterion", score_column]);
    for e in &ranking.entries {
        section = section.row(vec![
            e.position.into(),
            Cell::text(&e.criterion.code),
            Cell::text(&e.criterion.label),
            Cell::num(e.score),
        ]);
    }
    section.note(format!("ties broken by {}", ranking.tie_break))
}

impl Render for Ranking {
    fn to_document(&self) -> Document {
        let column = match self.basis {
            RankBasis::WeightDescending => "Weight",
            RankBasis::MeanRankAscending => "Mean rank",
        };
        Document::new("Criterion ranking").section(ranking_section("Ranking", self, column))
    }
}

impl Render for SwaraResult {
    fn to_document(&self) -> Document {
        let mut section = Section::new(
            format!("SWARA weights ({})", self.variant),
            &["Code", "Criterion", "s", "k", "q", "w"],
        );
        for r in &self.records {
            section = section.row(vec![
                Cell::text(&r.criterion.code),
                Cell::text(&r.criterion.label),
                Cell::num(r.s),
                Cell::num(r.k),
                Cell::num(r.q),
                Cell::num(r.w),
            ]);
        }
        let total: f64 = self.records.iter().map(|r| r.w).sum();
        section = section.note(format!("sum of weights = {total:.6}"));
        Document::new("Criterion weights")
            .section(section)
            .section(ranking_section(
                "Ranking by weight",
                &rank_by_weight(self),
                "w",
            ))
    }
}

impl Render for ExtendedSwaraResult {
    fn to_document(&self) -> Document {
        let mut section = Section::new(
            "Extended SWARA",
            &[
                "Code",
                "Criterion",
                "Mean rank",
                "Rank mass",
                "Variance",
                "Beta",
            ],
        );
        for r in &self.records {
            section = section.row(vec![
                Cell::text(&r.criterion.code),
                Cell::text(&r.criterion.label),
                Cell::num(r.t_bar),
                Cell::num(r.q),
                Cell::num(r.variance),
                Cell::num(r.beta),
            ]);
        }
        section = section.note("rank mass grows with worse (larger) mean rank");
        Document::new("Rank-based weighting")
            .section(section)
            .section(ranking_section(
                "Importance by mean rank",
                &rank_by_weight(self),
                "Mean rank",
            ))
    }
}

impl Render for ConcordanceReport {
    fn to_document(&self) -> Document {
        let summary =
            Section::new("Kendall's W", &["Items (n)", "Raters (r)", "S", "W"]).row(vec![
                self.n.into(),
                self.r.into(),
                Cell::num(self.s_statistic),
                Cell::num(self.w),
            ]);
        let mut ties = Section::new("Tie corrections", &["Rater", "T"]);
        for (k, t) in self.tie_corrections.iter().enumerate() {
            ties = ties.row(vec![(k + 1).into(), Cell::num(*t)]);
        }
        Document::new("Concordance").section(summary).section(ties)
    }
}

fn histogram_text(hist: &[u64]) -> String {
    hist.iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(i, c)| format!("{}:{c}", i + 1))
        .collect::<Vec<_>>()
        .join(" ")
}

impl Render for StabilityReport {
    fn to_document(&self) -> Document {
        let optional = |v: Option<f64>| v.map_or_else(|| Cell::text("-"), Cell::num);
        let mut section = match self.kind {
            StabilityKind::Bootstrap => Section::new(
                "Bootstrap over experts",
                &[
                    "Code",
                    "Baseline rank",
                    "Acceptance rate",
                    "Rank distribution",
                ],
            ),
            StabilityKind::Perturbation => Section::new(
                "Perturbation of s values",
                &[
                    "Code",
                    "Baseline rank",
                    "Top change rate",
                    "Ranking change rate",
                    "Rank distribution",
                ],
            ),
        };
        for c in &self.criteria {
            let mut row = vec![Cell::text(&c.criterion.code), c.baseline_rank.into()];
            match self.kind {
                StabilityKind::Bootstrap => {
                    row.push(optional(c.acceptance_rate));
                }
                StabilityKind::Perturbation => {
                    row.push(optional(c.top_change_rate));
                    row.push(optional(c.ranking_change_rate));
                }
            }
            row.push(Cell::text(histogram_text(&c.rank_histogram)));
            section = section.row(row);
        }
        section = section.note(format!("iterations = {}", self.iterations));
        if let Some(seed) = self.seed {
            section = section.note(format!("seed = {seed}"));
        }
        if let Some(generator) = &self.generator {
            section = section.note(format!("generator = {generator}"));
        }
        let mut doc = Document::new("Stability").section(section);

        let flipped: Vec<_> = self
            .pair_flips
            .iter()
            .filter(|p| p.frequency > 0.0)
            .collect();
        if !flipped.is_empty() {
            let mut pairs = Section::new("Pair flips", &["First", "Second", "Frequency"]);
            for p in flipped {
                pairs = pairs.row(vec![
                    Cell::text(&p.first),
                    Cell::text(&p.second),
                    Cell::num(p.frequency),
                ]);
            }
            doc = doc.section(pairs.note("pairs that never flip are omitted"));
        }
        if !self.boundaries.is_empty() {
            let mut bounds = Section::new("Flip boundaries", &["Code", "Lower s", "Upper s"]);
            for b in &self.boundaries {
                bounds = bounds.row(vec![
                    Cell::text(&b.code),
                    Cell::num(b.lower),
                    Cell::num(b.upper),
                ]);
            }
            doc = doc.section(bounds);
        }
        doc
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ReferenceTable {
    Table3,
    Table4,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Match,
    Mismatch,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Discrepancy {
    pub table: ReferenceTable,
    pub code: String,
    pub label: String,
    pub column: String,
    pub published: f64,
    pub computed: f64,
    pub abs_diff: f64,
    pub tolerance: f64,
    pub verdict: Verdict,
}

/// A published decision that differs from the computed one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelConflict {
    pub code: String,
    pub published: crate::model::Decision,
    pub computed: crate::model::Decision,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct DiscrepancyReport {
    pub records: Vec<Discrepancy>,
    pub label_conflicts: Vec<LabelConflict>,
}

impl DiscrepancyReport {
    pub fn matches(&self) -> usize {
        self.records
            .iter()
            .filter(|r| r.verdict == Verdict::Match)
            .count()
    }

    pub fn mismatches(&self) -> impl Iterator<Item = &Discrepancy> {
        self.records
            .iter()
            .filter(|r| r.verdict == Verdict::Mismatch)
    }

    /// (matches, cells) for one audited column.
    pub fn column_summary(&self, column: &str) -> (usize, usize) {
        let cells: Vec<_> = self.records.iter().filter(|r| r.column == column).collect();
        let matches = cells.iter().filter(|r| r.verdict == Verdict::Match).count();
        (matches, cells.len())
    }

    pub fn columns(&self) -> Vec<String> {
        let mut seen = Vec::new();
        for r in &self.records {
            if !seen.contains(&r.column) {
                seen.push(r.column.clone());
            }
        }
        seen
    }

    pub fn merge(mut self, other: DiscrepancyReport) -> Self {
        self.records.extend(other.records);
        self.label_conflicts.extend(other.label_conflicts);
        self
    }
}

/// Per-column audit tolerances, set from the printed precision of each column.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AuditTolerances {
    pub mean: f64,
    pub k: f64,
    pub w: f64,
}

impl Default for AuditTolerances {
    fn default() -> Self {
        Self {
            mean: 1e-6,
            k: 5e-7,
            w: 1.5e-3,
        }
    }
}

impl AuditTolerances {
    /// One tolerance for every column.
    pub fn uniform(tolerance: f64) -> Self {
        Self {
            mean: tolerance,
            k: tolerance,
            w: tolerance,
        }
    }

    fn validate(&self) -> Result<(), ReportError> {
        for t in [self.mean, self.k, self.w] {
            if !(t > 0.0 && t.is_finite()) {
                return Err(ReportError::InvalidTolerance(t));
            }
        }
        Ok(())
    }
}

fn cell(
    table: ReferenceTable,
    criterion: &Criterion,
    column: &str,
    published: f64,
    computed: f64,
    tolerance: f64,
) -> Discrepancy {
    let abs_diff = (published - computed).abs();
    Discrepancy {
        table,
        code: criterion.code.clone(),
        label: criterion.label.clone(),
        column: column.to_owned(),
        published,
        computed,
        abs_diff,
        tolerance,
        verdict: if abs_diff <= tolerance {
            Verdict::Match
        } else {
            Verdict::Mismatch
        },
    }
}

/// Audits the k and w columns of a weighting result.
pub fn audit_weights(
    computed: &SwaraResult,
    reference: &[Table4Row],
    tolerances: AuditTolerances,
) -> Result<DiscrepancyReport, ReportError> {
    tolerances.validate()?;
    let mut k_cells = Vec::new();
    let mut w_cells = Vec::new();
    for row in reference {
        let rec = computed
            .record(&row.code)
            .ok_or_else(|| ReportError::UnknownCode(row.code.clone()))?;
        k_cells.push(cell(
            ReferenceTable::Table4,
            &rec.criterion,
            "k",
            row.k,
            rec.k,
            tolerances.k,
        ));
        w_cells.push(cell(
            ReferenceTable::Table4,
            &rec.criterion,
            "w",
            row.w,
            rec.w,
            tolerances.w,
        ));
    }
    k_cells.extend(w_cells);
    Ok(DiscrepancyReport {
        records: k_cells,
        label_conflicts: Vec::new(),
    })
}

/// Audits screening means and lists decision conflicts with the published labels.
pub fn audit_screening(
    computed: &ScreeningOutcome,
    reference: &[Table3Row],
    tolerances: AuditTolerances,
) -> Result<DiscrepancyReport, ReportError> {
    tolerances.validate()?;
    let mut report = DiscrepancyReport::default();
    for row in reference {
        let rec = computed
            .records
            .iter()
            .find(|r| r.criterion.code == row.code)
            .ok_or_else(|| ReportError::UnknownCode(row.code.clone()))?;
        report.records.push(cell(
            ReferenceTable::Table3,
            &rec.criterion,
            "average",
            row.average,
            rec.mean,
            tolerances.mean,
        ));
        if rec.decision != row.decision {
            report.label_conflicts.push(LabelConflict {
                code: row.code.clone(),
                published: row.decision,
                computed: rec.decision,
            });
        }
    }
    Ok(report)
}

/// Either kind of auditable result.
pub enum Audited<'a> {
    Weights(&'a SwaraResult),
    Screening(&'a ScreeningOutcome),
}

pub fn audit(
    computed: Audited<'_>,
    bundle_reference: &crate::ingest::ReferenceTables,
    tolerances: AuditTolerances,
) -> Result<DiscrepancyReport, ReportError> {
    match computed {
        Audited::Weights(result) => audit_weights(result, &bundle_reference.table4, tolerances),
        Audited::Screening(outcome) => {
            audit_screening(outcome, &bundle_reference.table3, tolerances)
        }
    }
}

impl Render for DiscrepancyReport {
    fn to_document(&self) -> Document {
        let mut summary = Section::new(
            "Audit summary",
            &["Column", "Matches", "Cells", "Tolerance"],
        );
        for column in self.columns() {
            let (matches, cells) = self.column_summary(&column);
            let tolerance = self
                .records
                .iter()
                .find(|r| r.column == column)
                .map_or(0.0, |r| r.tolerance);
            summary = summary.row(vec![
                Cell::text(&column),
                matches.into(),
                cells.into(),
                Cell::text(format!("{tolerance:e}")),
            ]);
        }
        let mut cells = Section::new(
            "Audited cells",
            &[
                "Table",
                "Code",
                "Criterion",
                "Column",
                "Published",
                "Computed",
                "Abs. diff",
                "Verdict",
            ],
        );
        for r in &self.records {
            cells = cells.row(vec![
                Cell::text(format!("{:?}", r.table)),
                Cell::text(&r.code),
                Cell::text(&r.label),
                Cell::text(&r.column),
                Cell::num(r.published),
                Cell::num(r.computed),
                Cell::num(r.abs_diff),
                Cell::text(match r.verdict {
                    Verdict::Match => "Match",
                    Verdict::Mismatch => "Mismatch",
                }),
            ]);
        }
        let mut doc = Document::new("Audit against published values").section(summary);
        let mismatches: Vec<_> = self.mismatches().collect();
        if !mismatches.is_empty() {
            let mut section = Section::new(
                "Mismatches",
                &["Code", "Criterion", "Column", "Published", "Computed"],
            );
            for r in mismatches {
                section = section.row(vec![
                    Cell::text(&r.code),
                    Cell::text(&r.label),
                    Cell::text(&r.column),
                    Cell::num(r.published),
                    Cell::num(r.computed),
                ]);
            }
            doc = doc.section(section);
        }
        if !self.label_conflicts.is_empty() {
            let mut section =
                Section::new("Decision conflicts", &["Code", "Published", "Computed"]);
            for c in &self.label_conflicts {
                section = section.row(vec![
                    Cell::text(&c.code),
                    Cell::text(c.published.to_string()),
                    Cell::text(c.computed.to_string()),
                ]);
            }
            doc = doc.section(section);
        }
        doc.section(cells)
    }
}

/// Ranking of the published weight column, keyed to catalogue ordinals.
pub fn published_ranking(bundle: &ProjectBundle) -> Ranking {
    let scores = bundle
        .reference
        .table4
        .iter()
        .filter_map(|row| {
            bundle
                .catalogue
                .iter()
                .find(|c| c.code == row.code)
                .map(|c| (c.clone(), row.w))
        })
        .collect();
    rank_scores(scores, RankBasis::WeightDescending)
}

/// Compares the accepted set with the criteria that carry s values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageNote {
    pub accepted: usize,
    pub weighted: usize,
    pub accepted_without_s: Vec<String>,
    pub rejected_with_s: Vec<String>,
}

pub fn coverage(outcome: &ScreeningOutcome, bundle: &ProjectBundle) -> CoverageNote {
    let weighted: BTreeSet<&str> = bundle
        .swara_s
        .entries()
        .iter()
        .map(|e| e.criterion.code.as_str())
        .collect();
    let accepted_without_s = outcome
        .accepted()
        .filter(|c| !weighted.contains(c.code.as_str()))
        .map(|c| c.code.clone())
        .collect();
    let rejected_with_s = outcome
        .rejected()
        .filter(|c| weighted.contains(c.code.as_str()))
        .map(|c| c.code.clone())
        .collect();
    CoverageNote {
        accepted: outcome.accepted().count(),
        weighted: weighted.len(),
        accepted_without_s,
        rejected_with_s,
    }
}

impl Render for CoverageNote {
    fn to_document(&self) -> Document {
        let section = Section::new("Coverage", &["Accepted", "With s values", "Difference"])
            .row(vec![
                self.accepted.into(),
                self.weighted.into(),
                Cell::int(self.accepted as i64 - self.weighted as i64),
            ])
            .note(format!(
                "accepted without s value: {}",
                join_or_none(&self.accepted_without_s)
            ))
            .note(format!(
                "rejected but carrying an s value: {}",
                join_or_none(&self.rejected_with_s)
            ));
        Document::new("Coverage").section(section)
    }
}

fn join_or_none(codes: &[String]) -> String {
    if codes.is_empty() {
        "none".to_owned()
    } else {
        codes.join(", ")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Decision, RuleDescriptor, ScreeningRecord};

    fn outcome() -> ScreeningOutcome {
        ScreeningOutcome {
            rule_applied: RuleDescriptor::MeanAtLeast { threshold: 4.0 },
            records: vec![ScreeningRecord {
                criterion: Criterion::new("PF", "Manufacturing | Plants", 1),
                mean: 24.0 / 7.0,
                std_dev: 1.0,
                median: 4.0,
                decision: Decision::Reject,
            }],
        }
    }

    #[test]
    fn markdown_prints_six_decimals_and_escapes_pipes() {
        let text = render(&outcome(), Format::Markdown);
        assert!(text.contains("| 3.428571 |"), "{text}");
        assert!(text.contains("Manufacturing \\| Plants"));
        assert!(text.contains("mean >= 4"));
    }

    #[test]
    fn csv_quotes_fields() {
        let text = render(&outcome(), Format::Csv);
        assert!(text.starts_with("# Screening (mean >= 4)\n"));
        assert!(text.contains("1,PF,Manufacturing | Plants,3.428571,1.000000,4.000000,Reject\n"));
    }

    #[test]
    fn csv_sections_split_by_blank_line() {
        let doc = Document::new("t")
            .section(Section::new("a", &["x"]))
            .section(Section::new("b", &["y"]));
        assert_eq!(doc.render(Format::Csv), "# a\nx\n\n# b\ny\n");
    }

    #[test]
    fn json_round_trips() {
        let doc = outcome().to_document();
        let back: Document = serde_json::from_str(&doc.render(Format::Json)).unwrap();
        assert_eq!(back, doc);
    }

    #[test]
    fn format_names() {
        assert_eq!("md".parse::<Format>().unwrap(), Format::Markdown);
        assert!("xlsx".parse::<Format>().is_err());
    }

    #[test]
    fn tolerance_must_be_positive() {
        let err = audit_screening(&outcome(), &[], AuditTolerances::uniform(0.0)).unwrap_err();
        assert_eq!(err, ReportError::InvalidTolerance(0.0));
    }

    #[test]
    fn unknown_reference_code() {
        let row = Table3Row {
            code: "ZZ".into(),
            average: 1.0,
            decision: Decision::Accept,
        };
        assert_eq!(
            audit_screening(&outcome(), &[row], AuditTolerances::default()).unwrap_err(),
            ReportError::UnknownCode("ZZ".into())
        );
    }

    #[test]
    fn verdict_boundary_is_inclusive() {
        let c = Criterion::new("A", "A", 1);
        assert_eq!(
            cell(ReferenceTable::Table4, &c, "w", 0.5, 0.25, 0.25).verdict,
            Verdict::Match
        );
        assert_eq!(
            cell(ReferenceTable::Table4, &c, "w", 0.5, 0.2, 0.25).verdict,
            Verdict::Mismatch
        );
    }
}
