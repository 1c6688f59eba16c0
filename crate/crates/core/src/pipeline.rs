//! End-to-end run: screen the ratings, weight the surviving criteria, measure
//! panel agreement on them and audit against any published reference.

use serde::{Deserialize, Serialize};

use crate::concordance::kendalls_w;
use crate::delphi::{
    aggregate, disagreements, ratings_to_ranks, screen, AggregateStats, RankDirection,
};
use crate::ingest::{ProjectBundle, ReferenceTables};
use crate::model::{
    ConcordanceReport, ExtendedSwaraResult, ScreeningOutcome, ScreeningRule, SwaraResult,
    SwaraVariant,
};
use crate::report::{
    audit_screening, audit_weights, coverage, AuditTolerances, CoverageNote, DiscrepancyReport,
    Document, Render, Section,
};
use crate::swara::{rank_by_weight, swara, swara_extended, Ranking};
use crate::Error;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub rule: ScreeningRule,
    pub variant: SwaraVariant,
    pub tolerances: AuditTolerances,
    pub audit: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            rule: ScreeningRule::MeanAtLeast(4.0),
            variant: SwaraVariant::FlatK,
            tolerances: AuditTolerances::default(),
            audit: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineOutput {
    pub screening: ScreeningOutcome,
    pub coverage: CoverageNote,
    pub weights: SwaraResult,
    pub ranking: Ranking,
    pub extended: ExtendedSwaraResult,
    pub concordance: ConcordanceReport,
    pub audit: Option<DiscrepancyReport>,
    pub warnings: Vec<String>,
}

/// Warning text when a threshold rule disagrees with recorded labels.
pub fn label_disagreement_warning(
    bundle: &ProjectBundle,
    outcome: &ScreeningOutcome,
) -> Option<String> {
    reference_disagreement(&aggregate(&bundle.ratings), &bundle.reference, outcome)
}

/// As [`label_disagreement_warning`], for ratings and a reference held apart.
/// Silent when the labels do not cover every rated criterion.
pub fn reference_disagreement(
    stats: &AggregateStats,
    reference: &ReferenceTables,
    outcome: &ScreeningOutcome,
) -> Option<String> {
    if !matches!(
        outcome.rule_applied,
        crate::model::RuleDescriptor::MeanAtLeast { .. }
    ) {
        return None;
    }
    let labels = reference.recorded_labels()?;
    let recorded = screen(stats, &labels).ok()?;
    let differing = disagreements(outcome, &recorded);
    (!differing.is_empty()).then(|| {
        format!(
            "threshold rule ({}) disagrees with the recorded labels on {} criteria: {}",
            outcome.rule_applied,
            differing.len(),
            differing.join(", ")
        )
    })
}

pub fn pipeline(bundle: &ProjectBundle, config: &PipelineConfig) -> Result<PipelineOutput, Error> {
    let stats = aggregate(&bundle.ratings);
    let screening = screen(&stats, &config.rule)?;
    let mut warnings: Vec<String> = label_disagreement_warning(bundle, &screening)
        .into_iter()
        .collect();

    let cover = coverage(&screening, bundle);
    if cover.accepted != cover.weighted {
        warnings.push(format!(
            "{} accepted criteria but {} s values",
            cover.accepted, cover.weighted
        ));
    }

    let accepted_input = bundle
        .swara_s
        .retain_codes(|code| screening.decision_for(code).is_some_and(|d| d.is_accept()));
    let weights = swara(&accepted_input, config.variant)?;
    let ranking = rank_by_weight(&weights);

    let accepted_rows: Vec<usize> = screening
        .records
        .iter()
        .enumerate()
        .filter(|(_, r)| r.decision.is_accept())
        .map(|(j, _)| j)
        .collect();
    let accepted_ratings = bundle.ratings.select_rows(&accepted_rows)?;
    let ranks = ratings_to_ranks(&accepted_ratings, RankDirection::HigherIsBetter)?;
    let extended = swara_extended(&ranks)?;
    let concordance = kendalls_w(&ranks)?;

    let audit = if config.audit && !bundle.reference.is_empty() {
        let table4: Vec<_> = bundle
            .reference
            .table4
            .iter()
            .filter(|row| weights.record(&row.code).is_some())
            .cloned()
            .collect();
        let skipped = bundle.reference.table4.len() - table4.len();
        if skipped > 0 {
            warnings.push(format!(
                "{skipped} published weight rows belong to screened-out criteria and are not audited"
            ));
        }
        let weights_audit = audit_weights(&weights, &table4, config.tolerances)?;
        let screening_audit =
            audit_screening(&screening, &bundle.reference.table3, config.tolerances)?;
        Some(screening_audit.merge(weights_audit))
    } else {
        None
    };

    Ok(PipelineOutput {
        screening,
        coverage: cover,
        weights,
        ranking,
        extended,
        concordance,
        audit,
        warnings,
    })
}

impl Render for PipelineOutput {
    fn to_document(&self) -> Document {
        let mut doc = Document::new("Expert panel analysis")
            .extend(self.screening.to_document())
            .extend(self.coverage.to_document())
            .extend(self.weights.to_document())
            .extend(self.extended.to_document())
            .extend(self.concordance.to_document());
        if let Some(audit) = &self.audit {
            doc = doc.extend(audit.to_document());
        }
        if !self.warnings.is_empty() {
            let mut section = Section::new("Warnings", &["Warning"]);
            for w in &self.warnings {
                section = section.row(vec![crate::report::Cell::text(w)]);
            }
            doc = doc.section(section);
        }
        doc
    }
}
