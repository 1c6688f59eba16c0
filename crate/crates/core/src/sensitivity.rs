//! Stability of screening and weighting outcomes.
//!
//! Bootstrap draws use ChaCha8 (`rand_chacha`) seeded with the user seed, one
//! stream per iteration (`set_stream(iteration)`), and pick expert columns with
//! `gen_range` over `u32`. Iterations run in parallel and are tallied in
//! iteration order, so reports are identical across thread counts and machines.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::delphi::{aggregate, screen, DelphiError};
use crate::model::{Criterion, ModelError, RatingMatrix, ScreeningRule, SwaraInput, SwaraVariant};
use crate::swara::{rank_by_weight, rank_scores, swara, RankBasis, SwaraError, WeightedCriteria};

pub const GENERATOR: &str = "ChaCha8, stream = iteration index";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SensitivityError {
    #[error("bootstrap needs a threshold rule; recorded labels do not change under resampling")]
    RecordedLabelsUnsupported,
    #[error("iterations must be at least 1")]
    NoIterations,
    #[error("epsilon {0} must be non-negative")]
    NegativeEpsilon(f64),
    #[error("grid must have at least one point")]
    EmptyGrid,
    #[error(transparent)]
    Delphi(#[from] DelphiError),
    #[error(transparent)]
    Swara(#[from] SwaraError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StabilityKind {
    Bootstrap,
    Perturbation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionStability {
    pub criterion: Criterion,
    /// Position in the unperturbed ranking (1-based).
    pub baseline_rank: usize,
    /// Share of draws accepting the criterion (bootstrap only).
    pub acceptance_rate: Option<f64>,
    /// `rank_histogram[i]` counts evaluations placing the criterion at rank i + 1.
    pub rank_histogram: Vec<u64>,
    /// Share of this criterion's sweep points that change the top criterion
    /// (perturbation only).
    pub top_change_rate: Option<f64>,
    /// Share of this criterion's sweep points that change the full ranking
    /// (perturbation only).
    pub ranking_change_rate: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairFlip {
    pub first: String,
    pub second: String,
    /// Share of evaluations ordering the pair opposite to the baseline.
    pub frequency: f64,
}

/// Adjacent sweep points of one criterion between which the ranking changes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlipBoundary {
    pub code: String,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub kind: StabilityKind,
    pub iterations: u64,
    pub seed: Option<u64>,
    pub generator: Option<String>,
    pub criteria: Vec<CriterionStability>,
    pub pair_flips: Vec<PairFlip>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub boundaries: Vec<FlipBoundary>,
}

/// Tallies per-evaluation positions (`positions[i]` = rank of criterion i, 1-based).
struct Tally {
    n: usize,
    baseline: Vec<usize>,
    histograms: Vec<Vec<u64>>,
    pair_counts: Vec<u64>,
    evaluations: u64,
}

impl Tally {
    fn new(baseline: Vec<usize>) -> Self {
        let n = baseline.len();
        Self {
            n,
            baseline,
            histograms: vec![vec![0; n]; n],
            pair_counts: vec![0; n * n.saturating_sub(1) / 2],
            evaluations: 0,
        }
    }

    fn add(&mut self, positions: &[usize]) {
        self.evaluations += 1;
        for (i, &p) in positions.iter().enumerate() {
            self.histograms[i][p - 1] += 1;
        }
        let mut idx = 0;
        for a in 0..self.n {
            for b in a + 1..self.n {
                let before = self.baseline[a] < self.baseline[b];
                let now = positions[a] < positions[b];
                if before != now {
                    self.pair_counts[idx] += 1;
                }
                idx += 1;
            }
        }
    }

    fn pair_flips(&self, criteria: &[Criterion]) -> Vec<PairFlip> {
        let mut flips = Vec::with_capacity(self.pair_counts.len());
        let mut idx = 0;
        for a in 0..self.n {
            for b in a + 1..self.n {
                flips.push(PairFlip {
                    first: criteria[a].code.clone(),
                    second: criteria[b].code.clone(),
                    frequency: self.pair_counts[idx] as f64 / self.evaluations as f64,
                });
                idx += 1;
            }
        }
        flips
    }
}

/// Rank positions (1-based) of each criterion, in input order.
fn positions_of(
    criteria: &[Criterion],
    scores: Vec<(Criterion, f64)>,
    basis: RankBasis,
) -> Vec<usize> {
    let ranking = rank_scores(scores, basis);
    let mut positions = vec![0; criteria.len()];
    for entry in &ranking.entries {
        let i = criteria
            .iter()
            .position(|c| c == &entry.criterion)
            .expect("ranking covers every criterion");
        positions[i] = entry.position;
    }
    positions
}

fn mean_scores(ratings: &RatingMatrix) -> Vec<(Criterion, f64)> {
    aggregate(ratings)
        .criteria
        .into_iter()
        .map(|c| (c.criterion, c.mean))
        .collect()
}

/// Expert indices for one bootstrap draw.
pub fn draw_columns(seed: u64, iteration: u64, experts: usize) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(iteration);
    (0..experts)
        .map(|_| rng.gen_range(0..experts as u32) as usize)
        .collect()
}

/// Resamples experts with replacement and re-screens each draw.
pub fn bootstrap_experts(
    ratings: &RatingMatrix,
    rule: &ScreeningRule,
    iterations: u64,
    seed: u64,
) -> Result<StabilityReport, SensitivityError> {
    let ScreeningRule::MeanAtLeast(threshold) = *rule else {
        return Err(SensitivityError::RecordedLabelsUnsupported);
    };
    if iterations == 0 {
        return Err(SensitivityError::NoIterations);
    }
    if rule.validate(ratings.scale()).is_err() {
        return Err(DelphiError::ThresholdOutOfScale {
            threshold,
            min: ratings.scale().min,
            max: ratings.scale().max,
        }
        .into());
    }

    let criteria = ratings.criteria();
    let n = criteria.len();
    let r = ratings.n_experts();
    let baseline = positions_of(criteria, mean_scores(ratings), RankBasis::WeightDescending);

    let draws: Vec<(Vec<bool>, Vec<usize>)> = (0..iterations)
        .into_par_iter()
        .map(|it| {
            let sample = ratings.resample_columns(&draw_columns(seed, it, r))?;
            let stats = aggregate(&sample);
            let outcome = screen(&stats, rule)?;
            let accepted = outcome
                .records
                .iter()
                .map(|rec| rec.decision.is_accept())
                .collect();
            let scores = stats
                .criteria
                .into_iter()
                .map(|c| (c.criterion, c.mean))
                .collect();
            Ok((
                accepted,
                positions_of(criteria, scores, RankBasis::WeightDescending),
            ))
        })
        .collect::<Result<_, SensitivityError>>()?;

    let mut accept_counts = vec![0u64; n];
    let mut tally = Tally::new(baseline.clone());
    for (accepted, positions) in &draws {
        for (count, &a) in accept_counts.iter_mut().zip(accepted) {
            *count += u64::from(a);
        }
        tally.add(positions);
    }

    let pair_flips = tally.pair_flips(criteria);
    let criteria_out = criteria
        .iter()
        .enumerate()
        .map(|(i, c)| CriterionStability {
            criterion: c.clone(),
            baseline_rank: baseline[i],
            acceptance_rate: Some(accept_counts[i] as f64 / iterations as f64),
            rank_histogram: tally.histograms[i].clone(),
            top_change_rate: None,
            ranking_change_rate: None,
        })
        .collect();
    Ok(StabilityReport {
        kind: StabilityKind::Bootstrap,
        iterations,
        seed: Some(seed),
        generator: Some(GENERATOR.to_owned()),
        criteria: criteria_out,
        pair_flips,
        boundaries: Vec::new(),
    })
}

fn sweep_points(center: f64, epsilon: f64, grid_points: usize) -> Vec<f64> {
    if grid_points == 1 {
        return vec![center];
    }
    let lo = (center - epsilon).max(0.0);
    let hi = center + epsilon;
    (0..grid_points)
        .map(|g| lo + (hi - lo) * g as f64 / (grid_points - 1) as f64)
        .collect()
}

/// Sweeps each s value over `[max(0, s - ε), s + ε]` with the others fixed.
pub fn perturb_s(
    input: &SwaraInput,
    epsilon: f64,
    grid_points: usize,
    variant: SwaraVariant,
) -> Result<StabilityReport, SensitivityError> {
    if epsilon.is_nan() || epsilon < 0.0 {
        return Err(SensitivityError::NegativeEpsilon(epsilon));
    }
    if grid_points == 0 {
        return Err(SensitivityError::EmptyGrid);
    }
    let criteria: Vec<Criterion> = input
        .entries()
        .iter()
        .map(|e| e.criterion.clone())
        .collect();
    let n = criteria.len();
    let base = swara(input, variant)?;
    let base_ranking = rank_by_weight(&base);
    let baseline = positions_of(&criteria, base.scores(), RankBasis::WeightDescending);
    let base_top = base_ranking.top().cloned();

    let mut tally = Tally::new(baseline.clone());
    let mut boundaries = Vec::new();
    let mut top_changes = vec![0u64; n];
    let mut ranking_changes = vec![0u64; n];
    for (j, entry) in input.entries().iter().enumerate() {
        let points = sweep_points(entry.s, epsilon, grid_points);
        let mut previous: Option<(f64, Vec<usize>)> = None;
        for &value in &points {
            let result = swara(&input.with_s(j, value)?, variant)?;
            let ranking = rank_by_weight(&result);
            let positions = positions_of(&criteria, result.scores(), RankBasis::WeightDescending);
            if ranking.top().cloned() != base_top {
                top_changes[j] += 1;
            }
            if positions != baseline {
                ranking_changes[j] += 1;
            }
            if let Some((prev_value, prev_positions)) = &previous {
                if *prev_positions != positions {
                    boundaries.push(FlipBoundary {
                        code: entry.criterion.code.clone(),
                        lower: *prev_value,
                        upper: value,
                    });
                }
            }
            tally.add(&positions);
            previous = Some((value, positions));
        }
    }

    let pair_flips = tally.pair_flips(&criteria);
    let per_sweep = grid_points as f64;
    let criteria_out = criteria
        .iter()
        .enumerate()
        .map(|(i, c)| CriterionStability {
            criterion: c.clone(),
            baseline_rank: baseline[i],
            acceptance_rate: None,
            rank_histogram: tally.histograms[i].clone(),
            top_change_rate: Some(top_changes[i] as f64 / per_sweep),
            ranking_change_rate: Some(ranking_changes[i] as f64 / per_sweep),
        })
        .collect();
    Ok(StabilityReport {
        kind: StabilityKind::Perturbation,
        iterations: tally.evaluations,
        seed: None,
        generator: None,
        criteria: criteria_out,
        pair_flips,
        boundaries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{catalogue_from_codes, ExpertProfile, LikertScale, SwaraEntry};

    fn matrix(rows: Vec<Vec<i64>>) -> RatingMatrix {
        let codes: Vec<String> = (0..rows.len()).map(|i| format!("C{i}")).collect();
        let experts = (0..rows[0].len())
            .map(|k| ExpertProfile::anonymous(format!("E{k}")))
            .collect();
        RatingMatrix::new(
            catalogue_from_codes(&codes),
            experts,
            LikertScale::FIVE_POINT,
            rows,
        )
        .unwrap()
    }

    #[test]
    fn single_draw_rates_are_zero_or_one() {
        let m = matrix(vec![vec![5, 1, 4], vec![2, 3, 4], vec![1, 1, 5]]);
        let rep = bootstrap_experts(&m, &ScreeningRule::MeanAtLeast(3.0), 1, 99).unwrap();
        for c in &rep.criteria {
            let rate = c.acceptance_rate.unwrap();
            assert!(rate == 0.0 || rate == 1.0);
            assert_eq!(c.rank_histogram.iter().sum::<u64>(), 1);
        }
    }

    #[test]
    fn constant_top_row_always_accepted() {
        let m = matrix(vec![vec![5; 4], vec![1, 5, 2, 3]]);
        let rep = bootstrap_experts(&m, &ScreeningRule::MeanAtLeast(4.0), 500, 7).unwrap();
        assert_eq!(rep.criteria[0].acceptance_rate, Some(1.0));
    }

    #[test]
    fn recorded_labels_rejected() {
        let m = matrix(vec![vec![5; 2]]);
        let rule = ScreeningRule::RecordedLabels(Default::default());
        assert_eq!(
            bootstrap_experts(&m, &rule, 10, 1).unwrap_err(),
            SensitivityError::RecordedLabelsUnsupported
        );
        assert_eq!(
            bootstrap_experts(&m, &ScreeningRule::MeanAtLeast(4.0), 0, 1).unwrap_err(),
            SensitivityError::NoIterations
        );
    }

    #[test]
    fn draws_depend_only_on_seed_and_index() {
        assert_eq!(draw_columns(3, 17, 7), draw_columns(3, 17, 7));
        assert_ne!(draw_columns(3, 17, 7), draw_columns(3, 18, 7));
        assert!(draw_columns(3, 0, 7).iter().all(|&k| k < 7));
    }

    fn svalues(entries: &[(&str, usize, f64)]) -> SwaraInput {
        SwaraInput::new(
            entries
                .iter()
                .map(|&(code, ordinal, s)| SwaraEntry {
                    criterion: Criterion::new(code, code, ordinal),
                    s,
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn zero_epsilon_never_flips() {
        let input = svalues(&[("A", 1, 0.3), ("B", 2, 0.2), ("C", 3, 0.25)]);
        let rep = perturb_s(&input, 0.0, 5, SwaraVariant::FlatK).unwrap();
        assert!(rep.boundaries.is_empty());
        assert!(rep.pair_flips.iter().all(|p| p.frequency == 0.0));
        assert!(rep
            .criteria
            .iter()
            .all(|c| c.ranking_change_rate == Some(0.0)));
        assert_eq!(rep.iterations, 15);
    }

    #[test]
    fn negative_epsilon_and_empty_grid() {
        let input = svalues(&[("A", 1, 0.3)]);
        assert_eq!(
            perturb_s(&input, -0.1, 3, SwaraVariant::FlatK).unwrap_err(),
            SensitivityError::NegativeEpsilon(-0.1)
        );
        assert_eq!(
            perturb_s(&input, 0.1, 0, SwaraVariant::FlatK).unwrap_err(),
            SensitivityError::EmptyGrid
        );
    }

    #[test]
    fn sweep_clamps_at_zero() {
        let pts = sweep_points(0.02, 0.05, 3);
        assert_eq!(pts[0], 0.0);
        assert!((pts[2] - 0.07).abs() < 1e-15);
        assert_eq!(sweep_points(0.4, 0.1, 1), vec![0.4]);
    }
}
