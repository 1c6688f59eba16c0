//! SWARA criterion weighting.
//!
//! Three procedures are provided:
//!
//! * [`swara_canonical`]: k_1 = 1, k_j = s_j + 1, q_1 = 1, q_j = q_{j-1} / k_j,
//!   w_j = q_j / sum(q). The cumulative chain makes weights non-increasing in
//!   the declared importance order.
//! * [`swara_flat_k`]: k_j = s_j + 1 for every row including the first and
//!   w_j = k_j / sum(k). This is the arithmetic behind the recorded weight table.
//! * [`swara_extended`]: rank-based weighting over an expert rank matrix, with
//!   per-criterion variance and coefficient of variation.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{
    Criterion, ExtendedSwaraRecord, ExtendedSwaraResult, ModelError, RankMatrix, SwaraInput,
    SwaraRecord, SwaraResult, SwaraVariant,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SwaraError {
    #[error("no criteria to weight")]
    EmptyInput,
    #[error("s value {value} for `{code}` is negative")]
    NegativeS { code: String, value: f64 },
    #[error("extended weighting needs at least two raters, found {0}")]
    SingleRater(usize),
    #[error(transparent)]
    Model(#[from] ModelError),
}

fn check(input: &SwaraInput) -> Result<(), SwaraError> {
    if input.is_empty() {
        return Err(SwaraError::EmptyInput);
    }
    // SwaraInput already rejects these; kept so the contract holds for any source.
    if let Some(e) = input.entries().iter().find(|e| e.s.is_nan() || e.s < 0.0) {
        return Err(SwaraError::NegativeS {
            code: e.criterion.code.clone(),
            value: e.s,
        });
    }
    Ok(())
}

fn finish(variant: SwaraVariant, input: &SwaraInput, k: Vec<f64>, q: Vec<f64>) -> SwaraResult {
    let total: f64 = q.iter().sum();
    let records = input
        .entries()
        .iter()
        .zip(k.into_iter().zip(q))
        .map(|(e, (k, q))| SwaraRecord {
            criterion: e.criterion.clone(),
            s: e.s,
            k,
            q,
            w: q / total,
        })
        .collect();
    SwaraResult { variant, records }
}

/// Stepwise SWARA. The first entry's s is ignored.
pub fn swara_canonical(input: &SwaraInput) -> Result<SwaraResult, SwaraError> {
    check(input)?;
    let k: Vec<f64> = input
        .entries()
        .iter()
        .enumerate()
        .map(|(j, e)| if j == 0 { 1.0 } else { e.s + 1.0 })
        .collect();
    let mut q = Vec::with_capacity(k.len());
    let mut prev = 1.0;
    for (j, &kj) in k.iter().enumerate() {
        let qj = if j == 0 { 1.0 } else { prev / kj };
        q.push(qj);
        prev = qj;
    }
    Ok(finish(SwaraVariant::Canonical, input, k, q))
}

/// k = s + 1 on every row and w proportional to k.
pub fn swara_flat_k(input: &SwaraInput) -> Result<SwaraResult, SwaraError> {
    check(input)?;
    let k: Vec<f64> = input.entries().iter().map(|e| e.s + 1.0).collect();
    let q = k.clone();
    Ok(finish(SwaraVariant::FlatK, input, k, q))
}

pub fn swara(input: &SwaraInput, variant: SwaraVariant) -> Result<SwaraResult, SwaraError> {
    match variant {
        SwaraVariant::Canonical => swara_canonical(input),
        SwaraVariant::FlatK => swara_flat_k(input),
    }
}

/// Mean rank, normalized rank mass, sample variance and coefficient of
/// variation per criterion. Lower ranks mean more important.
pub fn swara_extended(ranks: &RankMatrix) -> Result<ExtendedSwaraResult, SwaraError> {
    let r = ranks.r();
    if r < 2 {
        return Err(SwaraError::SingleRater(r));
    }
    Ok(extended_records(ranks.criteria(), ranks.rows()))
}

fn extended_records<'a>(
    criteria: &[Criterion],
    rows: impl Iterator<Item = &'a [f64]> + Clone,
) -> ExtendedSwaraResult {
    let t_bar: Vec<f64> = rows
        .clone()
        .map(|row| row.iter().sum::<f64>() / row.len() as f64)
        .collect();
    let total: f64 = t_bar.iter().sum();
    let records = criteria
        .iter()
        .zip(rows)
        .zip(&t_bar)
        .map(|((criterion, row), &mean)| {
            let dof = (row.len() - 1) as f64;
            let variance = row.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / dof;
            ExtendedSwaraRecord {
                criterion: criterion.clone(),
                t_bar: mean,
                q: mean / total,
                variance,
                beta: variance.sqrt() / mean,
            }
        })
        .collect();
    ExtendedSwaraResult { records }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RankBasis {
    /// Larger weight ranks first.
    WeightDescending,
    /// Smaller mean rank ranks first.
    MeanRankAscending,
}

pub const TIE_BREAK: &str = "catalogue ordinal ascending";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedCriterion {
    pub position: usize,
    pub criterion: Criterion,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ranking {
    pub basis: RankBasis,
    pub tie_break: String,
    pub entries: Vec<RankedCriterion>,
}

impl Ranking {
    pub fn codes(&self) -> Vec<&str> {
        self.entries
            .iter()
            .map(|e| e.criterion.code.as_str())
            .collect()
    }

    pub fn labels(&self) -> Vec<&str> {
        self.entries
            .iter()
            .map(|e| e.criterion.label.as_str())
            .collect()
    }

    pub fn top(&self) -> Option<&Criterion> {
        self.entries.first().map(|e| &e.criterion)
    }
}

/// Anything that assigns each criterion a score usable for ordering.
pub trait WeightedCriteria {
    fn basis(&self) -> RankBasis;
    fn scores(&self) -> Vec<(Criterion, f64)>;
}

impl WeightedCriteria for SwaraResult {
    fn basis(&self) -> RankBasis {
        RankBasis::WeightDescending
    }

    fn scores(&self) -> Vec<(Criterion, f64)> {
        self.records
            .iter()
            .map(|r| (r.criterion.clone(), r.w))
            .collect()
    }
}

impl WeightedCriteria for ExtendedSwaraResult {
    fn basis(&self) -> RankBasis {
        RankBasis::MeanRankAscending
    }

    fn scores(&self) -> Vec<(Criterion, f64)> {
        self.records
            .iter()
            .map(|r| (r.criterion.clone(), r.t_bar))
            .collect()
    }
}

/// Orders scored criteria; equal scores fall back to catalogue ordinal.
pub fn rank_scores(scores: Vec<(Criterion, f64)>, basis: RankBasis) -> Ranking {
    let mut scores = scores;
    scores.sort_by(|(ca, a), (cb, b)| {
        let by_score = match basis {
            RankBasis::WeightDescending => b.total_cmp(a),
            RankBasis::MeanRankAscending => a.total_cmp(b),
        };
        match by_score {
            Ordering::Equal => ca.ordinal.cmp(&cb.ordinal),
            other => other,
        }
    });
    Ranking {
        basis,
        tie_break: TIE_BREAK.to_owned(),
        entries: scores
            .into_iter()
            .enumerate()
            .map(|(i, (criterion, score))| RankedCriterion {
                position: i + 1,
                criterion,
                score,
            })
            .collect(),
    }
}

pub fn rank_by_weight<R: WeightedCriteria + ?Sized>(result: &R) -> Ranking {
    rank_scores(result.scores(), result.basis())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ExpertProfile, SwaraEntry};

    fn input(s: &[f64]) -> SwaraInput {
        SwaraInput::new(
            s.iter()
                .enumerate()
                .map(|(i, &s)| SwaraEntry {
                    criterion: Criterion::new(format!("C{}", i + 1), format!("c{}", i + 1), i + 1),
                    s,
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn canonical_three_criteria() {
        // q = [1, 1/1.5, (1/1.5)/1.25]; sum = 1 + 2/3 + 8/15 = 11/5
        let res = swara_canonical(&input(&[0.9, 0.5, 0.25])).unwrap();
        let k: Vec<f64> = res.records.iter().map(|r| r.k).collect();
        let q: Vec<f64> = res.records.iter().map(|r| r.q).collect();
        assert_eq!(k, vec![1.0, 1.5, 1.25]);
        let expected_q = [1.0, 2.0 / 3.0, 8.0 / 15.0];
        let expected_w = [5.0 / 11.0, 10.0 / 33.0, 8.0 / 33.0];
        for j in 0..3 {
            assert!((q[j] - expected_q[j]).abs() < 1e-15);
            assert!((res.records[j].w - expected_w[j]).abs() < 1e-15);
        }
        assert!((res.records[1].w - 0.303030).abs() < 1e-6);
    }

    #[test]
    fn indifference_and_degenerate() {
        let res = swara_canonical(&input(&[0.0, 0.0, 0.0, 0.0])).unwrap();
        assert!(res.records.iter().all(|r| (r.w - 0.25).abs() < 1e-15));
        let res = swara_canonical(&input(&[0.7])).unwrap();
        assert_eq!(res.weights(), vec![1.0]);
        let res = swara_flat_k(&input(&[0.3, 0.3, 0.3])).unwrap();
        assert!(res.records.iter().all(|r| (r.w - 1.0 / 3.0).abs() < 1e-15));
    }

    #[test]
    fn empty_input_is_error() {
        let empty = SwaraInput::new(vec![]).unwrap();
        assert_eq!(swara_canonical(&empty).unwrap_err(), SwaraError::EmptyInput);
        assert_eq!(swara_flat_k(&empty).unwrap_err(), SwaraError::EmptyInput);
    }

    #[test]
    fn flat_k_uses_first_s() {
        let res = swara_flat_k(&input(&[1.0, 0.0])).unwrap();
        assert_eq!(res.records[0].k, 2.0);
        assert!((res.records[0].w - 2.0 / 3.0).abs() < 1e-15);
    }

    fn ranks(rows: Vec<Vec<f64>>) -> RankMatrix {
        let codes: Vec<String> = (0..rows.len()).map(|i| format!("C{}", i + 1)).collect();
        let experts = (0..rows[0].len())
            .map(|k| ExpertProfile::anonymous(format!("E{k}")))
            .collect();
        RankMatrix::new(crate::model::catalogue_from_codes(&codes), experts, rows).unwrap()
    }

    #[test]
    fn extended_three_by_three() {
        let res = swara_extended(&ranks(vec![
            vec![1.0, 1.0, 2.0],
            vec![2.0, 3.0, 1.0],
            vec![3.0, 2.0, 3.0],
        ]))
        .unwrap();
        let r0 = &res.records[0];
        assert!((r0.t_bar - 4.0 / 3.0).abs() < 1e-12);
        assert!((r0.q - 2.0 / 9.0).abs() < 1e-12);
        assert!((r0.variance - 1.0 / 3.0).abs() < 1e-12);
        assert!((r0.beta - 0.4330127).abs() < 1e-6);
        assert!((res.records[2].q - 4.0 / 9.0).abs() < 1e-12);
    }

    #[test]
    fn extended_single_criterion_normalizes_to_one() {
        let rows = [vec![1.0, 1.0, 1.0]];
        let res = extended_records(
            &[Criterion::new("A", "A", 1)],
            rows.iter().map(Vec::as_slice),
        );
        assert_eq!(res.records[0].q, 1.0);
    }

    #[test]
    fn extended_perfect_agreement() {
        let res = swara_extended(&ranks(vec![vec![2.0; 4], vec![1.0; 4], vec![3.0; 4]])).unwrap();
        assert!(res
            .records
            .iter()
            .all(|r| r.variance == 0.0 && r.beta == 0.0));
        let order = rank_by_weight(&res);
        assert_eq!(order.codes(), vec!["C2", "C1", "C3"]);
    }

    #[test]
    fn ranking_ties_and_pairs() {
        let equal = swara_flat_k(&input(&[0.2, 0.2, 0.2])).unwrap();
        assert_eq!(rank_by_weight(&equal).codes(), vec!["C1", "C2", "C3"]);
        let pair = rank_scores(
            vec![
                (Criterion::new("A", "A", 1), 0.6),
                (Criterion::new("B", "B", 2), 0.4),
            ],
            RankBasis::WeightDescending,
        );
        assert_eq!(pair.top().unwrap().code, "A");
        assert_eq!(pair.tie_break, TIE_BREAK);
    }
}
