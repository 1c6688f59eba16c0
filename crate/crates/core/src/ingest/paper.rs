//! The recorded seven-expert study: panel, 27-entry catalogue, Likert grid,
//! consolidated s values and the published reference columns.
//!
//! Codes are kept exactly as printed next to each label, even where the
//! pairing looks shifted (e.g. "Turnover" carries RPA). The catalogue has 27
//! rows although the accompanying text speaks of 26 factors.

use std::collections::BTreeMap;

use super::{ProjectBundle, ReferenceTables, Table3Row, Table4Row};
use crate::model::{
    Criterion, Decision, Education, ExpertProfile, LikertScale, RatingMatrix, SwaraEntry,
    SwaraInput,
};

const PANEL: [(&str, Education, u32); 7] = [
    ("Expert.1", Education::PhD, 10),
    ("Expert.2", Education::Master, 11),
    ("Expert.3", Education::PhD, 14),
    ("Expert.4", Education::PhD, 22),
    ("Expert.5", Education::Master, 9),
    ("Expert.6", Education::Master, 12),
    ("Expert.7", Education::PhD, 8),
];

const CATALOGUE: [(&str, &str); 27] = [
    ("PF", "Manufacturing Plants"),
    ("QMI", "Purpose of Quality Management"),
    ("QSO", "System Outcome Quality"),
    ("CL", "Claims"),
    ("QI", "Enhancement of Quality"),
    ("De", "Delivery"),
    ("RC", "The Counter Argument"),
    ("OD", "Prompt shipping"),
    ("MO", "In charge: administration and structure"),
    ("OC", "Management of an Organization"),
    ("BP", "Strategic plans"),
    ("CC", "Conversations with Clients"),
    ("IA", "A Check From Inside"),
    ("DA", "Management of information"),
    ("CO", "Vision"),
    ("FL", "Stability in the bank account"),
    ("VIS", "In a Healthy Way Environment"),
    ("FOP", "Mechanics of Coordination"),
    ("HSE", "Connections with government entities"),
    ("ENC", "Subcontractors The Guarantee of Quality"),
    ("RPA", "Turnover"),
    ("SQA", "Components for Building"),
    ("TNO", "Strategies for Subcontractors"),
    ("COR", "The Proposal's Potential Social Effects"),
    ("SUS", "Cost"),
    ("SIP", "Dependability Constant"),
    ("COS", "adaptability"),
];

/// (code, seven scores, printed average, printed decision)
const RATINGS: [(&str, [i64; 7], f64, Decision); 27] = [
    ("PF", [4, 3, 4, 4, 1, 3, 5], 3.428571, Decision::Accept),
    ("QMI", [5, 4, 3, 5, 4, 3, 2], 3.714286, Decision::Accept),
    ("QSO", [1, 4, 4, 1, 1, 3, 1], 2.142857, Decision::Accept),
    ("CL", [1, 5, 2, 3, 3, 5, 5], 3.428571, Decision::Accept),
    ("QI", [4, 1, 5, 2, 1, 5, 3], 3.0, Decision::Accept),
    ("De", [5, 5, 3, 4, 5, 3, 3], 4.0, Decision::Accept),
    ("RC", [1, 4, 3, 4, 5, 1, 3], 3.0, Decision::Accept),
    ("OD", [3, 2, 3, 3, 5, 5, 1], 3.142857, Decision::Accept),
    ("MO", [1, 3, 1, 2, 2, 4, 1], 2.0, Decision::Reject),
    ("OC", [5, 5, 5, 5, 5, 3, 3], 4.428571, Decision::Reject),
    ("BP", [2, 5, 4, 1, 1, 3, 1], 2.428571, Decision::Reject),
    ("CC", [3, 2, 2, 3, 2, 4, 1], 2.428571, Decision::Accept),
    ("IA", [4, 3, 4, 2, 5, 5, 2], 3.571429, Decision::Accept),
    ("DA", [3, 3, 1, 5, 5, 4, 4], 3.571429, Decision::Reject),
    ("CO", [5, 4, 2, 3, 4, 1, 1], 2.857143, Decision::Accept),
    ("FL", [1, 2, 3, 3, 2, 4, 3], 2.571429, Decision::Accept),
    ("VIS", [5, 3, 3, 2, 1, 4, 5], 3.285714, Decision::Accept),
    ("FOP", [2, 4, 3, 2, 4, 2, 1], 2.571429, Decision::Accept),
    ("HSE", [2, 3, 1, 4, 3, 2, 1], 2.285714, Decision::Accept),
    ("ENC", [4, 5, 1, 2, 2, 1, 3], 2.571429, Decision::Accept),
    ("RPA", [1, 2, 2, 3, 4, 1, 5], 2.571429, Decision::Accept),
    ("SQA", [5, 1, 1, 3, 4, 3, 4], 3.0, Decision::Accept),
    ("TNO", [1, 5, 2, 4, 1, 5, 3], 3.0, Decision::Accept),
    ("COR", [5, 4, 1, 1, 4, 2, 1], 2.571429, Decision::Accept),
    ("SUS", [4, 5, 4, 1, 4, 5, 1], 3.428571, Decision::Accept),
    ("SIP", [3, 3, 2, 5, 1, 1, 2], 2.428571, Decision::Accept),
    ("COS", [2, 2, 1, 5, 3, 5, 1], 2.714286, Decision::Accept),
];

/// (label, s, printed k, printed w) in printed row order.
const WEIGHTS: [(&str, f64, f64, f64); 22] = [
    ("Manufacturing Plants", 0.27142857, 1.271429, 0.044533),
    (
        "Purpose of Quality Management",
        0.34285714,
        1.342857,
        0.047035,
    ),
    ("System Outcome Quality", 0.35714286, 1.357143, 0.047536),
    ("Claims", 0.28571429, 1.285714, 0.045034),
    ("Enhancement of Quality", 0.24285714, 1.242857, 0.043533),
    ("Delivery", 0.25714286, 1.257143, 0.044033),
    ("The Counter Argument", 0.41428571, 1.414286, 0.049537),
    ("Prompt shipping", 0.3, 1.3, 0.045534),
    (
        "In charge: administration and structure",
        0.32857143,
        1.328571,
        0.046535,
    ),
    (
        "Management of an Organization",
        0.32857143,
        1.328571,
        0.046535,
    ),
    ("Strategic plans", 0.2, 1.2, 0.042032),
    ("Conversations with Clients", 0.3, 1.3, 0.045534),
    ("A Check From Inside", 0.34285714, 1.342857, 0.047035),
    ("Management of information", 0.31428571, 1.314286, 0.046035),
    ("Vision", 0.37142857, 1.371429, 0.048036),
    (
        "Stability in the bank account",
        0.35714286,
        1.357143,
        0.047536,
    ),
    (
        "In a Healthy Way Environment",
        0.22857143,
        1.228571,
        0.043032,
    ),
    ("Mechanics of Coordination", 0.3, 1.3, 0.045534),
    (
        "Connections with government entities",
        0.24285714,
        1.242857,
        0.043533,
    ),
    (
        "Subcontractors The Guarantee of Quality",
        0.24285714,
        1.242857,
        0.043533,
    ),
    ("Turnover", 0.2, 1.2, 0.054),
    ("Components for Building", 0.32857143, 1.328571, 0.048),
];

pub(super) fn dataset() -> ProjectBundle {
    let panel: Vec<ExpertProfile> = PANEL
        .iter()
        .map(|(id, edu, years)| ExpertProfile::new(*id, edu.clone(), *years))
        .collect();
    let catalogue: Vec<Criterion> = CATALOGUE
        .iter()
        .enumerate()
        .map(|(i, (code, label))| Criterion::new(*code, *label, i + 1))
        .collect();
    let ratings = RatingMatrix::new(
        catalogue.clone(),
        panel.clone(),
        LikertScale::FIVE_POINT,
        RATINGS.iter().map(|(_, row, _, _)| row.to_vec()).collect(),
    )
    .expect("embedded rating grid is valid");

    let by_label: BTreeMap<&str, &Criterion> =
        catalogue.iter().map(|c| (c.label.as_str(), c)).collect();
    let swara_s = SwaraInput::new(
        WEIGHTS
            .iter()
            .map(|(label, s, _, _)| SwaraEntry {
                criterion: by_label[label].clone(),
                s: *s,
            })
            .collect(),
    )
    .expect("embedded s values are valid");

    let table3 = RATINGS
        .iter()
        .map(|(code, _, average, decision)| Table3Row {
            code: (*code).to_owned(),
            average: *average,
            decision: *decision,
        })
        .collect();
    let table4 = WEIGHTS
        .iter()
        .map(|(label, s, k, w)| Table4Row {
            code: by_label[label].code.clone(),
            label: (*label).to_owned(),
            s: *s,
            k: *k,
            w: *w,
        })
        .collect();

    ProjectBundle::new(
        panel,
        catalogue,
        ratings,
        swara_s,
        ReferenceTables { table3, table4 },
    )
    .expect("embedded bundle is consistent")
}
