//! File formats and the bundled reference study.
//!
//! Formats:
//!
//! * ratings CSV: header `code,<expert-id>,...`, one row per criterion, integer cells.
//! * ranks CSV: same shape, decimal cells (tied average ranks such as `1.5`).
//! * s-values CSV: header `code,s` or `code,label,s`, rows in importance order.
//! * labels CSV: header `code,decision`, decisions `Accept` / `Reject`.
//! * project JSON: keys `panel`, `catalogue`, `ratings`, `swara_s` and an
//!   optional `reference`.
//!
//! Emitted decimals carry at most 9 significant digits and never use
//! locale-dependent separators.

mod paper;

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{
    catalogue_from_codes, validate_catalogue, validate_panel, Criterion, Decision, ExpertProfile,
    LikertScale, ModelError, RankMatrix, RatingMatrix, ScreeningRule, SwaraEntry, SwaraInput,
};

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("schema error: {0}")]
    Schema(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("project json: {0}")]
    Json(String),
    #[error("inconsistent project: {0}")]
    Inconsistent(String),
}

fn schema(msg: impl Into<String>) -> IngestError {
    IngestError::Schema(msg.into())
}

/// Published Screening reference row: printed average and decision.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table3Row {
    pub code: String,
    pub average: f64,
    pub decision: Decision,
}

/// Published Weighting reference row: s with the printed k and w columns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table4Row {
    pub code: String,
    pub label: String,
    pub s: f64,
    pub k: f64,
    pub w: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ReferenceTables {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub table3: Vec<Table3Row>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub table4: Vec<Table4Row>,
}

impl ReferenceTables {
    pub fn is_empty(&self) -> bool {
        self.table3.is_empty() && self.table4.is_empty()
    }

    /// Recorded decisions as a screening rule, if any were published.
    pub fn recorded_labels(&self) -> Option<ScreeningRule> {
        if self.table3.is_empty() {
            return None;
        }
        Some(ScreeningRule::RecordedLabels(
            self.table3
                .iter()
                .map(|row| (row.code.clone(), row.decision))
                .collect(),
        ))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProjectBundle {
    pub panel: Vec<ExpertProfile>,
    pub catalogue: Vec<Criterion>,
    pub ratings: RatingMatrix,
    pub swara_s: SwaraInput,
    pub reference: ReferenceTables,
}

impl ProjectBundle {
    pub fn new(
        panel: Vec<ExpertProfile>,
        catalogue: Vec<Criterion>,
        ratings: RatingMatrix,
        swara_s: SwaraInput,
        reference: ReferenceTables,
    ) -> Result<Self, IngestError> {
        validate_catalogue(&catalogue)?;
        validate_panel(&panel)?;
        if ratings.criteria() != catalogue.as_slice() {
            return Err(IngestError::Inconsistent(
                "ratings criteria differ from the catalogue".into(),
            ));
        }
        if ratings.experts() != panel.as_slice() {
            return Err(IngestError::Inconsistent(
                "ratings experts differ from the panel".into(),
            ));
        }
        for entry in swara_s.entries() {
            if !catalogue.contains(&entry.criterion) {
                return Err(IngestError::Inconsistent(format!(
                    "s value for `{}` has no catalogue entry",
                    entry.criterion.code
                )));
            }
        }
        Ok(Self {
            panel,
            catalogue,
            ratings,
            swara_s,
            reference,
        })
    }
}

impl ProjectBundle {
    /// Joins separately loaded files: panel and catalogue come from the
    /// ratings, and s values are matched to catalogue criteria by code.
    pub fn from_parts(
        ratings: RatingMatrix,
        swara_s: &SwaraInput,
        reference: ReferenceTables,
    ) -> Result<Self, IngestError> {
        let entries = swara_s
            .entries()
            .iter()
            .map(|e| {
                ratings
                    .criteria()
                    .iter()
                    .find(|c| c.code == e.criterion.code)
                    .map(|c| SwaraEntry {
                        criterion: c.clone(),
                        s: e.s,
                    })
                    .ok_or_else(|| {
                        IngestError::Inconsistent(format!(
                            "s value for `{}` has no rated criterion",
                            e.criterion.code
                        ))
                    })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(
            ratings.experts().to_vec(),
            ratings.criteria().to_vec(),
            ratings,
            SwaraInput::new(entries)?,
            reference,
        )
    }
}

/// The bundled seven-expert, 27-criterion study.
pub fn load_paper_dataset() -> ProjectBundle {
    paper::dataset()
}

/// Rounds to 9 significant digits.
pub fn round_sig9(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.8e}").parse().unwrap_or(x)
}

/// Shortest plain decimal for `x` after rounding to 9 significant digits.
pub fn format_decimal(x: f64) -> String {
    let rounded = round_sig9(x);
    if rounded == 0.0 {
        "0".to_owned()
    } else {
        format!("{rounded}")
    }
}

fn read_records(source: &str) -> Result<Vec<Vec<String>>, IngestError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(source.as_bytes());
    let mut records = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| schema(e.to_string()))?;
        if record.iter().all(str::is_empty) {
            continue;
        }
        records.push(record.iter().map(str::to_owned).collect());
    }
    Ok(records)
}

/// Criterion codes, expert ids and the raw cells of each row.
type RawGrid = (Vec<String>, Vec<String>, Vec<Vec<String>>);

/// Splits a `code,<expert>...` grid into catalogue, panel and raw cells.
fn read_grid(source: &str) -> Result<RawGrid, IngestError> {
    let mut records = read_records(source)?.into_iter();
    let header = records.next().ok_or_else(|| schema("missing header"))?;
    if header.first().map(String::as_str) != Some("code") {
        return Err(schema("header must start with `code`"));
    }
    let experts: Vec<String> = header[1..].to_vec();
    if experts.is_empty() {
        return Err(schema("header names no expert columns"));
    }
    let mut codes = Vec::new();
    let mut cells = Vec::new();
    for (i, mut record) in records.enumerate() {
        if record.len() != header.len() {
            return Err(schema(format!(
                "row {} (`{}`) has {} fields, header has {}",
                i + 2,
                record[0],
                record.len(),
                header.len()
            )));
        }
        codes.push(record.remove(0));
        cells.push(record);
    }
    if codes.is_empty() {
        return Err(schema("no criteria rows after the header"));
    }
    Ok((codes, experts, cells))
}

pub fn parse_ratings(source: &str) -> Result<RatingMatrix, IngestError> {
    parse_ratings_with_scale(source, LikertScale::FIVE_POINT)
}

pub fn parse_ratings_with_scale(
    source: &str,
    scale: LikertScale,
) -> Result<RatingMatrix, IngestError> {
    let (codes, experts, cells) = read_grid(source)?;
    let rows = cells
        .iter()
        .zip(&codes)
        .map(|(row, code)| {
            row.iter()
                .map(|cell| {
                    cell.parse::<i64>().map_err(|_| {
                        schema(format!("row `{code}`: `{cell}` is not an integer rating"))
                    })
                })
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(RatingMatrix::new(
        catalogue_from_codes(&codes),
        experts.into_iter().map(ExpertProfile::anonymous).collect(),
        scale,
        rows,
    )?)
}

pub fn parse_ranks(source: &str) -> Result<RankMatrix, IngestError> {
    let (codes, experts, cells) = read_grid(source)?;
    let rows = cells
        .iter()
        .zip(&codes)
        .map(|(row, code)| {
            row.iter()
                .map(|cell| {
                    cell.parse::<f64>()
                        .map_err(|_| schema(format!("row `{code}`: `{cell}` is not a number")))
                })
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(RankMatrix::new(
        catalogue_from_codes(&codes),
        experts.into_iter().map(ExpertProfile::anonymous).collect(),
        rows,
    )?)
}

/// Reads `code,s` or `code,label,s` rows in importance order.
pub fn parse_svalues(source: &str) -> Result<SwaraInput, IngestError> {
    let mut records = read_records(source)?.into_iter();
    let header = records.next().ok_or_else(|| schema("missing header"))?;
    let with_label = match header.iter().map(String::as_str).collect::<Vec<_>>()[..] {
        ["code", "s"] => false,
        ["code", "label", "s"] => true,
        _ => return Err(schema("s-values header must be `code,s` or `code,label,s`")),
    };
    let mut entries = Vec::new();
    for (i, record) in records.enumerate() {
        if record.len() != header.len() {
            return Err(schema(format!(
                "row {} has {} fields, header has {}",
                i + 2,
                record.len(),
                header.len()
            )));
        }
        let code = &record[0];
        let label = if with_label { &record[1] } else { code };
        let raw = record.last().expect("non-empty record");
        let s = raw
            .parse::<f64>()
            .map_err(|_| schema(format!("row `{code}`: `{raw}` is not a number")))?;
        entries.push(SwaraEntry {
            criterion: Criterion::new(code.as_str(), label.as_str(), i + 1),
            s,
        });
    }
    Ok(SwaraInput::new(entries)?)
}

/// Reads `code,decision` rows into a recorded-labels screening rule.
pub fn parse_labels(source: &str) -> Result<ScreeningRule, IngestError> {
    let mut records = read_records(source)?.into_iter();
    let header = records.next().ok_or_else(|| schema("missing header"))?;
    if header != ["code", "decision"] {
        return Err(schema("labels header must be `code,decision`"));
    }
    let mut labels = BTreeMap::new();
    for record in records {
        if record.len() != 2 {
            return Err(schema(format!(
                "labels row `{}` must have 2 fields",
                record[0]
            )));
        }
        let decision = match record[1].to_ascii_lowercase().as_str() {
            "accept" => Decision::Accept,
            "reject" => Decision::Reject,
            other => return Err(schema(format!("unknown decision `{other}`"))),
        };
        if labels.insert(record[0].clone(), decision).is_some() {
            return Err(ModelError::DuplicateId {
                kind: "criterion",
                id: record[0].clone(),
            }
            .into());
        }
    }
    Ok(ScreeningRule::RecordedLabels(labels))
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RatingsDoc {
    criteria: Vec<String>,
    experts: Vec<String>,
    scale: LikertScale,
    values: Vec<Vec<i64>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SValueDoc {
    criterion: String,
    s: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProjectDoc {
    panel: Vec<ExpertProfile>,
    catalogue: Vec<Criterion>,
    ratings: RatingsDoc,
    swara_s: Vec<SValueDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    reference: Option<ReferenceTables>,
}

pub fn parse_project(source: &str) -> Result<ProjectBundle, IngestError> {
    let doc: ProjectDoc =
        serde_json::from_str(source).map_err(|e| IngestError::Json(e.to_string()))?;
    let catalogue_codes: Vec<&str> = doc.catalogue.iter().map(|c| c.code.as_str()).collect();
    if doc.ratings.criteria != catalogue_codes {
        return Err(IngestError::Inconsistent(
            "ratings.criteria must list the catalogue codes in order".into(),
        ));
    }
    let panel_ids: Vec<&str> = doc.panel.iter().map(|e| e.id.as_str()).collect();
    if doc.ratings.experts != panel_ids {
        return Err(IngestError::Inconsistent(
            "ratings.experts must list the panel ids in order".into(),
        ));
    }
    let scale = LikertScale::new(doc.ratings.scale.min, doc.ratings.scale.max)?;
    let ratings = RatingMatrix::new(
        doc.catalogue.clone(),
        doc.panel.clone(),
        scale,
        doc.ratings.values,
    )?;
    let by_code: HashMap<&str, &Criterion> =
        doc.catalogue.iter().map(|c| (c.code.as_str(), c)).collect();
    let entries = doc
        .swara_s
        .iter()
        .map(|e| {
            by_code
                .get(e.criterion.as_str())
                .map(|c| SwaraEntry {
                    criterion: (*c).clone(),
                    s: e.s,
                })
                .ok_or_else(|| {
                    IngestError::Inconsistent(format!(
                        "s value for `{}` has no catalogue entry",
                        e.criterion
                    ))
                })
        })
        .collect::<Result<Vec<_>, _>>()?;
    ProjectBundle::new(
        doc.panel,
        doc.catalogue,
        ratings,
        SwaraInput::new(entries)?,
        doc.reference.unwrap_or_default(),
    )
}

fn csv_text(rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    for row in rows {
        writer.write_record(&row).expect("in-memory csv write");
    }
    String::from_utf8(writer.into_inner().expect("in-memory csv flush")).expect("utf-8 csv")
}

fn grid_header(experts: &[ExpertProfile]) -> Vec<String> {
    std::iter::once("code".to_owned())
        .chain(experts.iter().map(|e| e.id.clone()))
        .collect()
}

/// Deterministic serialization whose parse is the identity on validated data.
pub trait Canonical {
    fn emit_canonical(&self) -> String;
}

impl Canonical for RatingMatrix {
    fn emit_canonical(&self) -> String {
        let rows = self.criteria().iter().zip(self.rows()).map(|(c, row)| {
            std::iter::once(c.code.clone())
                .chain(row.iter().map(i64::to_string))
                .collect()
        });
        csv_text(std::iter::once(grid_header(self.experts())).chain(rows))
    }
}

impl Canonical for RankMatrix {
    fn emit_canonical(&self) -> String {
        let rows = self.criteria().iter().zip(self.rows()).map(|(c, row)| {
            std::iter::once(c.code.clone())
                .chain(row.iter().map(|&t| format_decimal(t)))
                .collect()
        });
        csv_text(std::iter::once(grid_header(self.experts())).chain(rows))
    }
}

impl Canonical for SwaraInput {
    fn emit_canonical(&self) -> String {
        let header = vec!["code".to_owned(), "label".to_owned(), "s".to_owned()];
        let rows = self.entries().iter().map(|e| {
            vec![
                e.criterion.code.clone(),
                e.criterion.label.clone(),
                format_decimal(e.s),
            ]
        });
        csv_text(std::iter::once(header).chain(rows))
    }
}

impl Canonical for ScreeningRule {
    /// Labels CSV. A threshold rule carries no labels and emits only the header.
    fn emit_canonical(&self) -> String {
        let header = vec!["code".to_owned(), "decision".to_owned()];
        let rows: Vec<Vec<String>> = match self {
            ScreeningRule::RecordedLabels(labels) => labels
                .iter()
                .map(|(code, d)| vec![code.clone(), d.to_string()])
                .collect(),
            ScreeningRule::MeanAtLeast(_) => Vec::new(),
        };
        csv_text(std::iter::once(header).chain(rows))
    }
}

impl Canonical for ProjectBundle {
    fn emit_canonical(&self) -> String {
        let round_t3 = |r: &Table3Row| Table3Row {
            average: round_sig9(r.average),
            ..r.clone()
        };
        let round_t4 = |r: &Table4Row| Table4Row {
            s: round_sig9(r.s),
            k: round_sig9(r.k),
            w: round_sig9(r.w),
            ..r.clone()
        };
        let doc = ProjectDoc {
            panel: self.panel.clone(),
            catalogue: self.catalogue.clone(),
            ratings: RatingsDoc {
                criteria: self.catalogue.iter().map(|c| c.code.clone()).collect(),
                experts: self.panel.iter().map(|e| e.id.clone()).collect(),
                scale: self.ratings.scale(),
                values: self.ratings.rows().map(<[i64]>::to_vec).collect(),
            },
            swara_s: self
                .swara_s
                .entries()
                .iter()
                .map(|e| SValueDoc {
                    criterion: e.criterion.code.clone(),
                    s: round_sig9(e.s),
                })
                .collect(),
            reference: (!self.reference.is_empty()).then(|| ReferenceTables {
                table3: self.reference.table3.iter().map(round_t3).collect(),
                table4: self.reference.table4.iter().map(round_t4).collect(),
            }),
        };
        let mut text = serde_json::to_string_pretty(&doc).expect("project serializes");
        text.push('\n');
        text
    }
}

pub fn emit_canonical<T: Canonical + ?Sized>(value: &T) -> String {
    value.emit_canonical()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_only_is_schema_error() {
        let err = parse_ratings("code,Expert.1,Expert.2\n").unwrap_err();
        assert!(matches!(err, IngestError::Schema(_)), "{err}");
    }

    #[test]
    fn short_row_is_schema_error() {
        let header = "code,Expert.1,Expert.2,Expert.3,Expert.4,Expert.5,Expert.6,Expert.7";
        let err = parse_ratings(&format!("{header}\nPF,4,3,4,4,1,3\n")).unwrap_err();
        assert!(matches!(err, IngestError::Schema(_)), "{err}");
    }

    #[test]
    fn missing_header_is_schema_error() {
        assert!(matches!(parse_ratings(""), Err(IngestError::Schema(_))));
        assert!(matches!(
            parse_ratings("id,a,b\nPF,1,2\n"),
            Err(IngestError::Schema(_))
        ));
    }

    #[test]
    fn non_integer_rating_is_schema_error() {
        assert!(matches!(
            parse_ratings("code,a,b\nPF,1,2.5\n"),
            Err(IngestError::Schema(_))
        ));
    }

    #[test]
    fn rating_out_of_scale_surfaces_model_error() {
        let err = parse_ratings("code,a,b,c\nPF,1,2,3\nQSO,1,2,6\n").unwrap_err();
        assert!(matches!(
            err,
            IngestError::Model(ModelError::OutOfScale { ref row, ref col, .. })
                if row == "QSO" && col == "c"
        ));
    }

    #[test]
    fn ranks_accept_permutations_and_average_ties() {
        let m = parse_ranks("code,e1,e2\na,1,2\nb,2,1\nc,3,3\n").unwrap();
        assert_eq!((m.n(), m.r()), (3, 2));
        let m = parse_ranks("code,e1,e2\na,1.5,1\nb,1.5,2\nc,3,3\n").unwrap();
        assert_eq!(m.get(0, 0), 1.5);
    }

    #[test]
    fn broken_tie_encoding_is_invalid_ranking() {
        let err = parse_ranks("code,e1,e2\na,1,1\nb,1,2\nc,3,3\n").unwrap_err();
        assert!(matches!(
            err,
            IngestError::Model(ModelError::InvalidRanking { expected, found, .. })
                if expected == 6.0 && found == 5.0
        ));
    }

    #[test]
    fn svalues_accept_both_headers() {
        let a = parse_svalues("code,s\nA,0\nB,0.5\n").unwrap();
        let b = parse_svalues("code,label,s\nA,A,0\nB,B,0.5\n").unwrap();
        assert_eq!(a, b);
        assert!(parse_svalues("code,s\nA,-1\n").is_err());
    }

    #[test]
    fn labels_parse() {
        let rule = parse_labels("code,decision\nPF,Accept\nMO,reject\n").unwrap();
        let ScreeningRule::RecordedLabels(map) = rule else {
            panic!("expected labels");
        };
        assert_eq!(map["MO"], Decision::Reject);
        assert!(parse_labels("code,decision\nPF,maybe\n").is_err());
    }

    #[test]
    fn decimals_are_nine_significant_digits() {
        assert_eq!(format_decimal(1.0 / 3.0), "0.333333333");
        assert_eq!(format_decimal(2.5), "2.5");
        assert_eq!(format_decimal(3.0), "3");
        assert_eq!(format_decimal(0.27142857), "0.27142857");
        assert_eq!(format_decimal(12345.678901), "12345.6789");
    }

    #[test]
    fn empty_reference_is_omitted() {
        let mut bundle = load_paper_dataset();
        bundle.reference = ReferenceTables::default();
        let text = emit_canonical(&bundle);
        assert!(!text.contains("\"reference\""));
        let back = parse_project(&text).unwrap();
        assert!(back.reference.is_empty());
    }

    #[test]
    fn project_rejects_unknown_svalue_code() {
        let bundle = load_paper_dataset();
        let text =
            emit_canonical(&bundle).replacen("\"criterion\": \"PF\"", "\"criterion\": \"ZZ\"", 1);
        assert!(matches!(
            parse_project(&text),
            Err(IngestError::Inconsistent(_))
        ));
    }

    #[test]
    fn parts_join_by_code() {
        let ratings = parse_ratings("code,a,b\nA,1,2\nB,3,4\n").unwrap();
        let s = parse_svalues("code,label,s\nB,Second,0\nA,First,0.2\n").unwrap();
        let bundle = ProjectBundle::from_parts(ratings, &s, ReferenceTables::default()).unwrap();
        assert_eq!(bundle.swara_s.entries()[0].criterion.ordinal, 2);
        let missing = parse_svalues("code,s\nZ,0\n").unwrap();
        let ratings = parse_ratings("code,a,b\nA,1,2\n").unwrap();
        assert!(matches!(
            ProjectBundle::from_parts(ratings, &missing, ReferenceTables::default()),
            Err(IngestError::Inconsistent(_))
        ));
    }
}
