//! Expert-panel decision analysis: Likert screening of candidate criteria,
//! SWARA weighting, Kendall's W concordance, stability analysis and audited
//! table output.
//!
//! ```
//! use panelrank::{delphi, ingest, model::ScreeningRule};
//!
//! let bundle = ingest::load_paper_dataset();
//! let stats = delphi::aggregate(&bundle.ratings);
//! let outcome = delphi::screen(&stats, &ScreeningRule::MeanAtLeast(4.0)).unwrap();
//! let accepted: Vec<_> = outcome.accepted().map(|c| c.code.as_str()).collect();
//! assert_eq!(accepted, ["De", "OC"]);
//! ```

pub mod concordance;
pub mod delphi;
pub mod ingest;
pub mod model;
pub mod pipeline;
pub mod report;
pub mod sensitivity;
pub mod swara;

use thiserror::Error;

/// Any error raised by the toolkit, tagged by the module that owns it.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Model(#[from] model::ModelError),
    #[error(transparent)]
    Ingest(#[from] ingest::IngestError),
    #[error(transparent)]
    Delphi(#[from] delphi::DelphiError),
    #[error(transparent)]
    Swara(#[from] swara::SwaraError),
    #[error(transparent)]
    Concordance(#[from] concordance::ConcordanceError),
    #[error(transparent)]
    Sensitivity(#[from] sensitivity::SensitivityError),
    #[error(transparent)]
    Report(#[from] report::ReportError),
}
