//! Likert aggregation, screening rules and the ratings-to-ranks bridge.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{
    Criterion, Decision, LikertScale, ModelError, RankMatrix, RatingMatrix, ScreeningOutcome,
    ScreeningRecord, ScreeningRule,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DelphiError {
    #[error("recorded labels have no decision for criterion `{0}`")]
    MissingLabel(String),
    #[error("threshold {threshold} is outside the scale [{min}, {max}]")]
    ThresholdOutOfScale { threshold: f64, min: i64, max: i64 },
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionStats {
    pub criterion: Criterion,
    pub mean: f64,
    /// Sample standard deviation (divisor r - 1).
    pub std_dev: f64,
    pub median: f64,
    pub min: i64,
    pub max: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateStats {
    pub scale: LikertScale,
    pub experts: usize,
    pub criteria: Vec<CriterionStats>,
}

impl AggregateStats {
    pub fn get(&self, code: &str) -> Option<&CriterionStats> {
        self.criteria.iter().find(|c| c.criterion.code == code)
    }
}

fn row_stats(criterion: &Criterion, row: &[i64]) -> CriterionStats {
    let r = row.len() as f64;
    let sum: i64 = row.iter().sum();
    let mean = sum as f64 / r;
    let ss: f64 = row.iter().map(|&v| (v as f64 - mean).powi(2)).sum();
    let mut sorted = row.to_vec();
    sorted.sort_unstable();
    let mid = sorted.len() / 2;
    let median = if sorted.len().is_multiple_of(2) {
        (sorted[mid - 1] + sorted[mid]) as f64 / 2.0
    } else {
        sorted[mid] as f64
    };
    CriterionStats {
        criterion: criterion.clone(),
        mean,
        std_dev: (ss / (r - 1.0)).sqrt(),
        median,
        min: sorted[0],
        max: sorted[sorted.len() - 1],
    }
}

pub fn aggregate(ratings: &RatingMatrix) -> AggregateStats {
    AggregateStats {
        scale: ratings.scale(),
        experts: ratings.n_experts(),
        criteria: ratings
            .criteria()
            .iter()
            .zip(ratings.rows())
            .map(|(c, row)| row_stats(c, row))
            .collect(),
    }
}

/// Applies a screening rule. Recorded labels for codes outside `stats` are ignored.
pub fn screen(
    stats: &AggregateStats,
    rule: &ScreeningRule,
) -> Result<ScreeningOutcome, DelphiError> {
    if let ScreeningRule::MeanAtLeast(threshold) = *rule {
        if !(threshold.is_finite() && stats.scale.contains_real(threshold)) {
            return Err(DelphiError::ThresholdOutOfScale {
                threshold,
                min: stats.scale.min,
                max: stats.scale.max,
            });
        }
    }
    let records = stats
        .criteria
        .iter()
        .map(|c| {
            let decision = match rule {
                ScreeningRule::MeanAtLeast(threshold) if c.mean >= *threshold => Decision::Accept,
                ScreeningRule::MeanAtLeast(_) => Decision::Reject,
                ScreeningRule::RecordedLabels(labels) => labels
                    .get(&c.criterion.code)
                    .copied()
                    .ok_or_else(|| DelphiError::MissingLabel(c.criterion.code.clone()))?,
            };
            Ok(ScreeningRecord {
                criterion: c.criterion.clone(),
                mean: c.mean,
                std_dev: c.std_dev,
                median: c.median,
                decision,
            })
        })
        .collect::<Result<Vec<_>, DelphiError>>()?;
    Ok(ScreeningOutcome {
        rule_applied: rule.descriptor(),
        records,
    })
}

/// Codes whose decision differs between two outcomes over the same criteria.
pub fn disagreements(a: &ScreeningOutcome, b: &ScreeningOutcome) -> Vec<String> {
    a.records
        .iter()
        .filter_map(|ra| {
            let db = b.decision_for(&ra.criterion.code)?;
            (db != ra.decision).then(|| ra.criterion.code.clone())
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RankDirection {
    /// Highest score receives rank 1.
    HigherIsBetter,
    /// Lowest score receives rank 1.
    LowerIsBetter,
}

/// Ranks 1..n with tied groups sharing the mean of the positions they span.
pub fn average_ranks(scores: &[f64], direction: RankDirection) -> Vec<f64> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    let cmp = |a: &usize, b: &usize| -> Ordering {
        let ord = scores[*a].total_cmp(&scores[*b]);
        match direction {
            RankDirection::HigherIsBetter => ord.reverse(),
            RankDirection::LowerIsBetter => ord,
        }
    };
    order.sort_by(cmp);
    let mut ranks = vec![0.0; scores.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && scores[order[end]] == scores[order[start]] {
            end += 1;
        }
        // positions start+1 ..= end
        let rank = (start + 1 + end) as f64 / 2.0;
        for &idx in &order[start..end] {
            ranks[idx] = rank;
        }
        start = end;
    }
    ranks
}

pub fn ratings_to_ranks(
    ratings: &RatingMatrix,
    direction: RankDirection,
) -> Result<RankMatrix, ModelError> {
    let columns: Vec<Vec<f64>> = (0..ratings.n_experts())
        .map(|k| {
            let scores: Vec<f64> = ratings.column(k).into_iter().map(|v| v as f64).collect();
            average_ranks(&scores, direction)
        })
        .collect();
    let rows = (0..ratings.n_criteria())
        .map(|j| columns.iter().map(|col| col[j]).collect())
        .collect();
    RankMatrix::new(
        ratings.criteria().to_vec(),
        ratings.experts().to_vec(),
        rows,
    )
}
