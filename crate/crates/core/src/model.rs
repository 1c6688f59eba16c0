//! Validated domain types shared by every other module.
//!
//! Everything here is immutable once constructed. Constructors reject every
//! invariant violation with a [`ModelError`] naming the offending field or cell.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Absolute slack used when checking that a rank column sums to n(n+1)/2.
pub const RANK_SUM_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("ragged grid: row {row} has {found} cells, expected {expected}")]
    RaggedGrid {
        row: String,
        expected: usize,
        found: usize,
    },
    #[error("value {value} at (row={row}, col={col}) is outside the scale [{min}, {max}]")]
    OutOfScale {
        row: String,
        col: String,
        value: i64,
        min: i64,
        max: i64,
    },
    #[error("duplicate {kind} id `{id}`")]
    DuplicateId { kind: &'static str, id: String },
    #[error("too few {kind}: need at least {required}, found {found}")]
    TooFew {
        kind: &'static str,
        required: usize,
        found: usize,
    },
    #[error("empty {0}")]
    Empty(&'static str),
    #[error("invalid likert scale: min {min} must be below max {max}")]
    InvalidScale { min: i64, max: i64 },
    #[error("catalogue ordinals must be 1..n in order; position {position} has ordinal {ordinal}")]
    NonContiguousOrdinal { position: usize, ordinal: usize },
    #[error("rank value {value} at (row={row}, col={col}) must be positive and finite")]
    NonPositiveRank {
        row: String,
        col: String,
        value: f64,
    },
    #[error("column {col} ranks sum to {found}, expected {expected}")]
    InvalidRanking {
        col: String,
        expected: f64,
        found: f64,
    },
    #[error("s value {value} for `{code}` must be finite and non-negative")]
    NegativeS { code: String, value: f64 },
    #[error("threshold {threshold} is outside the scale [{min}, {max}]")]
    ThresholdOutOfScale { threshold: f64, min: i64, max: i64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Criterion {
    pub code: String,
    pub label: String,
    pub ordinal: usize,
}

impl Criterion {
    pub fn new(code: impl Into<String>, label: impl Into<String>, ordinal: usize) -> Self {
        Self {
            code: code.into(),
            label: label.into(),
            ordinal,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Education {
    #[serde(rename = "phd")]
    PhD,
    Master,
    Other(String),
}

impl fmt::Display for Education {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Education::PhD => f.write_str("PhD"),
            Education::Master => f.write_str("Master"),
            Education::Other(text) => f.write_str(text),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ExpertProfile {
    pub id: String,
    pub education: Education,
    pub experience_years: u32,
}

impl ExpertProfile {
    pub fn new(id: impl Into<String>, education: Education, experience_years: u32) -> Self {
        Self {
            id: id.into(),
            education,
            experience_years,
        }
    }

    /// Profile for an expert known only by the id in a CSV header.
    pub fn anonymous(id: impl Into<String>) -> Self {
        Self::new(id, Education::Other("unspecified".to_owned()), 0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LikertScale {
    pub min: i64,
    pub max: i64,
}

impl LikertScale {
    pub const FIVE_POINT: LikertScale = LikertScale { min: 1, max: 5 };

    pub fn new(min: i64, max: i64) -> Result<Self, ModelError> {
        if min >= max {
            return Err(ModelError::InvalidScale { min, max });
        }
        Ok(Self { min, max })
    }

    pub fn contains(&self, value: i64) -> bool {
        (self.min..=self.max).contains(&value)
    }

    pub fn contains_real(&self, value: f64) -> bool {
        value >= self.min as f64 && value <= self.max as f64
    }
}

impl Default for LikertScale {
    fn default() -> Self {
        Self::FIVE_POINT
    }
}

/// Checks code uniqueness and the contiguous 1..n ordinal sequence.
pub fn validate_catalogue(criteria: &[Criterion]) -> Result<(), ModelError> {
    let mut seen = HashSet::new();
    for (position, criterion) in criteria.iter().enumerate() {
        if criterion.code.trim().is_empty() {
            return Err(ModelError::Empty("criterion code"));
        }
        if !seen.insert(criterion.code.as_str()) {
            return Err(ModelError::DuplicateId {
                kind: "criterion",
                id: criterion.code.clone(),
            });
        }
        if criterion.ordinal != position + 1 {
            return Err(ModelError::NonContiguousOrdinal {
                position: position + 1,
                ordinal: criterion.ordinal,
            });
        }
    }
    Ok(())
}

pub fn validate_panel(experts: &[ExpertProfile]) -> Result<(), ModelError> {
    let mut seen = HashSet::new();
    for expert in experts {
        if expert.id.trim().is_empty() {
            return Err(ModelError::Empty("expert id"));
        }
        if !seen.insert(expert.id.as_str()) {
            return Err(ModelError::DuplicateId {
                kind: "expert",
                id: expert.id.clone(),
            });
        }
    }
    Ok(())
}

/// Builds a catalogue whose labels equal the codes, numbered 1..n.
pub fn catalogue_from_codes<S: AsRef<str>>(codes: &[S]) -> Vec<Criterion> {
    codes
        .iter()
        .enumerate()
        .map(|(i, code)| Criterion::new(code.as_ref(), code.as_ref(), i + 1))
        .collect()
}

/// Criteria x experts Likert scores.
#[derive(Debug, Clone, PartialEq)]
pub struct RatingMatrix {
    criteria: Vec<Criterion>,
    experts: Vec<ExpertProfile>,
    scale: LikertScale,
    values: Vec<i64>,
}

impl RatingMatrix {
    /// Validates a candidate grid (one inner vector per criterion).
    pub fn new(
        criteria: Vec<Criterion>,
        experts: Vec<ExpertProfile>,
        scale: LikertScale,
        rows: Vec<Vec<i64>>,
    ) -> Result<Self, ModelError> {
        LikertScale::new(scale.min, scale.max)?;
        if criteria.is_empty() {
            return Err(ModelError::Empty("criteria"));
        }
        validate_catalogue(&criteria)?;
        validate_panel(&experts)?;
        if experts.len() < 2 {
            return Err(ModelError::TooFew {
                kind: "experts",
                required: 2,
                found: experts.len(),
            });
        }
        if rows.len() != criteria.len() {
            return Err(ModelError::RaggedGrid {
                row: format!("<{} rows>", rows.len()),
                expected: criteria.len(),
                found: rows.len(),
            });
        }
        let mut values = Vec::with_capacity(criteria.len() * experts.len());
        for (criterion, row) in criteria.iter().zip(&rows) {
            if row.len() != experts.len() {
                return Err(ModelError::RaggedGrid {
                    row: criterion.code.clone(),
                    expected: experts.len(),
                    found: row.len(),
                });
            }
            for (expert, &value) in experts.iter().zip(row) {
                if !scale.contains(value) {
                    return Err(ModelError::OutOfScale {
                        row: criterion.code.clone(),
                        col: expert.id.clone(),
                        value,
                        min: scale.min,
                        max: scale.max,
                    });
                }
            }
            values.extend_from_slice(row);
        }
        Ok(Self {
            criteria,
            experts,
            scale,
            values,
        })
    }

    pub fn criteria(&self) -> &[Criterion] {
        &self.criteria
    }

    pub fn experts(&self) -> &[ExpertProfile] {
        &self.experts
    }

    pub fn scale(&self) -> LikertScale {
        self.scale
    }

    pub fn n_criteria(&self) -> usize {
        self.criteria.len()
    }

    pub fn n_experts(&self) -> usize {
        self.experts.len()
    }

    pub fn get(&self, criterion: usize, expert: usize) -> i64 {
        self.values[criterion * self.experts.len() + expert]
    }

    pub fn row(&self, criterion: usize) -> &[i64] {
        let r = self.experts.len();
        &self.values[criterion * r..(criterion + 1) * r]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[i64]> + Clone {
        self.values.chunks(self.experts.len())
    }

    pub fn column(&self, expert: usize) -> Vec<i64> {
        (0..self.criteria.len())
            .map(|j| self.get(j, expert))
            .collect()
    }

    pub fn row_index(&self, code: &str) -> Option<usize> {
        self.criteria.iter().position(|c| c.code == code)
    }

    /// Keeps the listed rows (by index, in the given order) and renumbers ordinals.
    pub fn select_rows(&self, indices: &[usize]) -> Result<Self, ModelError> {
        let criteria = indices
            .iter()
            .enumerate()
            .map(|(i, &j)| {
                let c = &self.criteria[j];
                Criterion::new(c.code.clone(), c.label.clone(), i + 1)
            })
            .collect();
        let rows = indices.iter().map(|&j| self.row(j).to_vec()).collect();
        Self::new(criteria, self.experts.clone(), self.scale, rows)
    }

    /// Builds a matrix whose columns are the given expert indices (repeats allowed).
    /// Resampled columns get suffixed ids so the panel stays unique.
    pub fn resample_columns(&self, columns: &[usize]) -> Result<Self, ModelError> {
        let experts = columns
            .iter()
            .enumerate()
            .map(|(i, &k)| {
                let mut e = self.experts[k].clone();
                e.id = format!("{}#{}", e.id, i + 1);
                e
            })
            .collect();
        let rows = (0..self.criteria.len())
            .map(|j| columns.iter().map(|&k| self.get(j, k)).collect())
            .collect();
        Self::new(self.criteria.clone(), experts, self.scale, rows)
    }
}

/// Unvalidated rating grid as read from a file or built by hand.
#[derive(Debug, Clone, PartialEq)]
pub struct RawRatings {
    pub criteria: Vec<Criterion>,
    pub experts: Vec<ExpertProfile>,
    pub scale: LikertScale,
    pub values: Vec<Vec<i64>>,
}

pub fn validate_rating_matrix(raw: RawRatings) -> Result<RatingMatrix, ModelError> {
    RatingMatrix::new(raw.criteria, raw.experts, raw.scale, raw.values)
}

/// Criteria x experts rank values; rank 1 is the most important item.
#[derive(Debug, Clone, PartialEq)]
pub struct RankMatrix {
    criteria: Vec<Criterion>,
    experts: Vec<ExpertProfile>,
    values: Vec<f64>,
}

impl RankMatrix {
    pub fn new(
        criteria: Vec<Criterion>,
        experts: Vec<ExpertProfile>,
        rows: Vec<Vec<f64>>,
    ) -> Result<Self, ModelError> {
        validate_catalogue(&criteria)?;
        validate_panel(&experts)?;
        if criteria.len() < 2 {
            return Err(ModelError::TooFew {
                kind: "criteria",
                required: 2,
                found: criteria.len(),
            });
        }
        if experts.len() < 2 {
            return Err(ModelError::TooFew {
                kind: "experts",
                required: 2,
                found: experts.len(),
            });
        }
        if rows.len() != criteria.len() {
            return Err(ModelError::RaggedGrid {
                row: format!("<{} rows>", rows.len()),
                expected: criteria.len(),
                found: rows.len(),
            });
        }
        let mut values = Vec::with_capacity(criteria.len() * experts.len());
        for (criterion, row) in criteria.iter().zip(&rows) {
            if row.len() != experts.len() {
                return Err(ModelError::RaggedGrid {
                    row: criterion.code.clone(),
                    expected: experts.len(),
                    found: row.len(),
                });
            }
            for (expert, &value) in experts.iter().zip(row) {
                if !(value.is_finite() && value > 0.0) {
                    return Err(ModelError::NonPositiveRank {
                        row: criterion.code.clone(),
                        col: expert.id.clone(),
                        value,
                    });
                }
            }
            values.extend_from_slice(row);
        }
        let n = criteria.len() as f64;
        let expected = n * (n + 1.0) / 2.0;
        let r = experts.len();
        for (k, expert) in experts.iter().enumerate() {
            let found: f64 = (0..criteria.len()).map(|j| values[j * r + k]).sum();
            if (found - expected).abs() > RANK_SUM_TOLERANCE {
                return Err(ModelError::InvalidRanking {
                    col: expert.id.clone(),
                    expected,
                    found,
                });
            }
        }
        Ok(Self {
            criteria,
            experts,
            values,
        })
    }

    pub fn criteria(&self) -> &[Criterion] {
        &self.criteria
    }

    pub fn experts(&self) -> &[ExpertProfile] {
        &self.experts
    }

    /// Item count n.
    pub fn n(&self) -> usize {
        self.criteria.len()
    }

    /// Rater count r.
    pub fn r(&self) -> usize {
        self.experts.len()
    }

    pub fn get(&self, criterion: usize, expert: usize) -> f64 {
        self.values[criterion * self.experts.len() + expert]
    }

    pub fn row(&self, criterion: usize) -> &[f64] {
        let r = self.experts.len();
        &self.values[criterion * r..(criterion + 1) * r]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> + Clone {
        self.values.chunks(self.experts.len())
    }

    pub fn column(&self, expert: usize) -> Vec<f64> {
        (0..self.criteria.len())
            .map(|j| self.get(j, expert))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Decision {
    Accept,
    Reject,
}

impl Decision {
    pub fn is_accept(self) -> bool {
        self == Decision::Accept
    }
}

impl fmt::Display for Decision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Decision::Accept => "Accept",
            Decision::Reject => "Reject",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScreeningRule {
    /// Accept iff the criterion mean is at least the threshold.
    MeanAtLeast(f64),
    /// Decisions copied verbatim from a recorded table, keyed by code.
    RecordedLabels(BTreeMap<String, Decision>),
}

impl ScreeningRule {
    pub fn descriptor(&self) -> RuleDescriptor {
        match self {
            ScreeningRule::MeanAtLeast(t) => RuleDescriptor::MeanAtLeast { threshold: *t },
            ScreeningRule::RecordedLabels(_) => RuleDescriptor::RecordedLabels,
        }
    }

    pub fn validate(&self, scale: LikertScale) -> Result<(), ModelError> {
        if let ScreeningRule::MeanAtLeast(threshold) = *self {
            if !(threshold.is_finite() && scale.contains_real(threshold)) {
                return Err(ModelError::ThresholdOutOfScale {
                    threshold,
                    min: scale.min,
                    max: scale.max,
                });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum RuleDescriptor {
    MeanAtLeast { threshold: f64 },
    RecordedLabels,
}

impl fmt::Display for RuleDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RuleDescriptor::MeanAtLeast { threshold } => write!(f, "mean >= {threshold}"),
            RuleDescriptor::RecordedLabels => f.write_str("recorded labels"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScreeningRecord {
    pub criterion: Criterion,
    pub mean: f64,
    pub std_dev: f64,
    pub median: f64,
    pub decision: Decision,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScreeningOutcome {
    pub rule_applied: RuleDescriptor,
    pub records: Vec<ScreeningRecord>,
}

impl ScreeningOutcome {
    pub fn accepted(&self) -> impl Iterator<Item = &Criterion> {
        self.records
            .iter()
            .filter(|r| r.decision.is_accept())
            .map(|r| &r.criterion)
    }

    pub fn rejected(&self) -> impl Iterator<Item = &Criterion> {
        self.records
            .iter()
            .filter(|r| !r.decision.is_accept())
            .map(|r| &r.criterion)
    }

    pub fn decision_for(&self, code: &str) -> Option<Decision> {
        self.records
            .iter()
            .find(|r| r.criterion.code == code)
            .map(|r| r.decision)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SwaraEntry {
    pub criterion: Criterion,
    pub s: f64,
}

/// s values in declared importance order, most important first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<SwaraEntry>", into = "Vec<SwaraEntry>")]
pub struct SwaraInput {
    entries: Vec<SwaraEntry>,
}

impl SwaraInput {
    pub fn new(entries: Vec<SwaraEntry>) -> Result<Self, ModelError> {
        let mut seen = HashSet::new();
        for entry in &entries {
            if !(entry.s.is_finite() && entry.s >= 0.0) {
                return Err(ModelError::NegativeS {
                    code: entry.criterion.code.clone(),
                    value: entry.s,
                });
            }
            if !seen.insert(entry.criterion.code.as_str()) {
                return Err(ModelError::DuplicateId {
                    kind: "criterion",
                    id: entry.criterion.code.clone(),
                });
            }
        }
        Ok(Self { entries })
    }

    pub fn entries(&self) -> &[SwaraEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn s_values(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.s).collect()
    }

    /// Same order, one s value replaced.
    pub fn with_s(&self, index: usize, s: f64) -> Result<Self, ModelError> {
        let mut entries = self.entries.clone();
        entries[index].s = s;
        Self::new(entries)
    }

    /// Keeps entries whose code passes the filter, preserving order.
    pub fn retain_codes(&self, keep: impl Fn(&str) -> bool) -> Self {
        Self {
            entries: self
                .entries
                .iter()
                .filter(|e| keep(&e.criterion.code))
                .cloned()
                .collect(),
        }
    }
}

impl TryFrom<Vec<SwaraEntry>> for SwaraInput {
    type Error = ModelError;

    fn try_from(entries: Vec<SwaraEntry>) -> Result<Self, Self::Error> {
        Self::new(entries)
    }
}

impl From<SwaraInput> for Vec<SwaraEntry> {
    fn from(input: SwaraInput) -> Self {
        input.entries
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SwaraVariant {
    Canonical,
    FlatK,
}

impl fmt::Display for SwaraVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SwaraVariant::Canonical => "canonical",
            SwaraVariant::FlatK => "flat-k",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SwaraRecord {
    pub criterion: Criterion,
    pub s: f64,
    pub k: f64,
    pub q: f64,
    pub w: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SwaraResult {
    pub variant: SwaraVariant,
    pub records: Vec<SwaraRecord>,
}

impl SwaraResult {
    pub fn weights(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.w).collect()
    }

    pub fn record(&self, code: &str) -> Option<&SwaraRecord> {
        self.records.iter().find(|r| r.criterion.code == code)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtendedSwaraRecord {
    pub criterion: Criterion,
    pub t_bar: f64,
    pub q: f64,
    pub variance: f64,
    pub beta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtendedSwaraResult {
    pub records: Vec<ExtendedSwaraRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConcordanceReport {
    pub s_statistic: f64,
    pub tie_corrections: Vec<f64>,
    pub w: f64,
    pub r: usize,
    pub n: usize,
}
