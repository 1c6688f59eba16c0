//! Kendall's coefficient of concordance with tie correction, plus the mean
//! pairwise Spearman correlation used as an independent check.
//!
//! With n items ranked by r raters, row sums R_j and their mean R̄:
//!
//! ```text
//! S   = Σ_j (R_j − R̄)²
//! T_k = Σ_g (g³ − g)          over tie groups g in rater k's column
//! W   = 12 S / (r²(n³ − n) − r Σ_k T_k)
//! ```
//!
//! Without ties, W = ((r − 1) ρ̄ + 1) / r where ρ̄ is the mean Spearman
//! correlation over all rater pairs.

use thiserror::Error;

use crate::model::{ConcordanceReport, RankMatrix};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConcordanceError {
    #[error("every rater ties every item; the concordance denominator is zero")]
    DegenerateDenominator,
    #[error("rater `{0}` has tied ranks; the Spearman identity needs tie-free columns")]
    TiesPresent(String),
}

/// Σ (g³ − g) over groups of equal values.
pub fn tie_correction(column: &[f64]) -> f64 {
    let mut sorted = column.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut total = 0.0;
    let mut start = 0;
    while start < sorted.len() {
        let mut end = start + 1;
        while end < sorted.len() && sorted[end] == sorted[start] {
            end += 1;
        }
        let g = (end - start) as f64;
        total += g * g * g - g;
        start = end;
    }
    total
}

pub fn kendalls_w(ranks: &RankMatrix) -> Result<ConcordanceReport, ConcordanceError> {
    kendalls_w_with(ranks, true)
}

/// Kendall's W without the tie term in the denominator.
pub fn kendalls_w_uncorrected(ranks: &RankMatrix) -> Result<ConcordanceReport, ConcordanceError> {
    kendalls_w_with(ranks, false)
}

fn kendalls_w_with(
    ranks: &RankMatrix,
    correct_ties: bool,
) -> Result<ConcordanceReport, ConcordanceError> {
    let n = ranks.n();
    let r = ranks.r();
    let row_sums: Vec<f64> = ranks.rows().map(|row| row.iter().sum()).collect();
    let mean = row_sums.iter().sum::<f64>() / n as f64;
    let s_statistic: f64 = row_sums.iter().map(|rj| (rj - mean).powi(2)).sum();
    let tie_corrections: Vec<f64> = (0..r)
        .map(|k| {
            if correct_ties {
                tie_correction(&ranks.column(k))
            } else {
                0.0
            }
        })
        .collect();
    let (nf, rf) = (n as f64, r as f64);
    let denominator = rf * rf * (nf * nf * nf - nf) - rf * tie_corrections.iter().sum::<f64>();
    // Denominator is a sum of integers and exact in f64 for any realistic panel.
    if denominator <= 0.0 {
        return Err(ConcordanceError::DegenerateDenominator);
    }
    let w = (12.0 * s_statistic / denominator).clamp(0.0, 1.0);
    Ok(ConcordanceReport {
        s_statistic,
        tie_corrections,
        w,
        r,
        n,
    })
}

fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    sxy / (sxx * syy).sqrt()
}

/// Mean Spearman ρ over all rater pairs; columns must be tie-free.
pub fn mean_pairwise_spearman(ranks: &RankMatrix) -> Result<f64, ConcordanceError> {
    let columns: Vec<Vec<f64>> = (0..ranks.r()).map(|k| ranks.column(k)).collect();
    for (k, col) in columns.iter().enumerate() {
        if tie_correction(col) != 0.0 {
            return Err(ConcordanceError::TiesPresent(ranks.experts()[k].id.clone()));
        }
    }
    let mut total = 0.0;
    let mut pairs = 0usize;
    for a in 0..columns.len() {
        for b in a + 1..columns.len() {
            total += pearson(&columns[a], &columns[b]);
            pairs += 1;
        }
    }
    Ok(total / pairs as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{catalogue_from_codes, ExpertProfile};

    fn ranks(columns: &[&[f64]]) -> RankMatrix {
        let n = columns[0].len();
        let codes: Vec<String> = (0..n).map(|i| format!("C{i}")).collect();
        let experts = (0..columns.len())
            .map(|k| ExpertProfile::anonymous(format!("E{k}")))
            .collect();
        let rows = (0..n)
            .map(|j| columns.iter().map(|c| c[j]).collect())
            .collect();
        RankMatrix::new(catalogue_from_codes(&codes), experts, rows).unwrap()
    }

    #[test]
    fn perfect_agreement() {
        let rep = kendalls_w(&ranks(&[&[1.0, 2.0, 3.0][..]; 3])).unwrap();
        assert_eq!(rep.s_statistic, 18.0);
        assert_eq!(rep.tie_corrections, vec![0.0; 3]);
        assert_eq!(rep.w, 1.0);
    }

    #[test]
    fn one_reversed_rater() {
        let rep = kendalls_w(&ranks(&[
            &[1.0, 2.0, 3.0],
            &[3.0, 2.0, 1.0],
            &[1.0, 2.0, 3.0],
        ]))
        .unwrap();
        assert_eq!(rep.s_statistic, 2.0);
        assert!((rep.w - 1.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn fully_tied_column_two_by_two() {
        // R = [2.5, 3.5], S = 0.5, denominator 4*6 - 2*6 = 12
        let rep = kendalls_w(&ranks(&[&[1.5, 1.5], &[1.0, 2.0]])).unwrap();
        assert_eq!(rep.tie_corrections, vec![6.0, 0.0]);
        assert_eq!(rep.s_statistic, 0.5);
        assert!((rep.w - 0.5).abs() < 1e-15);
    }

    #[test]
    fn all_tied_is_degenerate() {
        let err = kendalls_w(&ranks(&[&[2.0, 2.0, 2.0], &[2.0, 2.0, 2.0]])).unwrap_err();
        assert_eq!(err, ConcordanceError::DegenerateDenominator);
    }

    #[test]
    fn tie_correction_groups() {
        assert_eq!(tie_correction(&[1.0, 2.0, 3.0]), 0.0);
        assert_eq!(tie_correction(&[1.5, 1.5, 3.0]), 6.0);
        assert_eq!(tie_correction(&[2.0, 2.0, 2.0, 4.5, 4.5]), 24.0 + 6.0);
    }

    #[test]
    fn spearman_extremes() {
        assert_eq!(
            mean_pairwise_spearman(&ranks(&[&[1.0, 2.0, 3.0][..]; 4])).unwrap(),
            1.0
        );
        let rho = mean_pairwise_spearman(&ranks(&[&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]])).unwrap();
        assert!((rho + 1.0).abs() < 1e-15);
        assert!(matches!(
            mean_pairwise_spearman(&ranks(&[&[1.5, 1.5, 3.0], &[1.0, 2.0, 3.0]])),
            Err(ConcordanceError::TiesPresent(_))
        ));
    }
}
