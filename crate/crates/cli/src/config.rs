//! Optional TOML defaults. Every key is optional; command-line flags win.
//!
//! ```toml
//! threshold = 4.0          # or: labels = "bundled" / "labels.csv"
//! variant = "flat-k"       # canonical | flat-k | extended
//! format = "markdown"      # markdown | csv | json
//! tolerance = 1.5e-3
//! reference = "bundled"
//! mode = "bootstrap"       # bootstrap | perturb
//! iterations = 1000
//! seed = 0
//! epsilon = 0.05
//! grid = 11
//! ```

use std::path::Path;

use serde::Deserialize;

use crate::args::{ModeArg, VariantArg};
use crate::CliError;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub threshold: Option<f64>,
    pub labels: Option<String>,
    pub variant: Option<VariantArg>,
    pub format: Option<String>,
    pub tolerance: Option<f64>,
    pub reference: Option<String>,
    pub mode: Option<ModeArg>,
    pub iterations: Option<u64>,
    pub seed: Option<u64>,
    pub epsilon: Option<f64>,
    pub grid: Option<usize>,
}

impl Config {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("--config {}: {e}", path.display())))?;
        let config: Config = toml::from_str(&text)
            .map_err(|e| CliError::Usage(format!("--config {}: {e}", path.display())))?;
        if config.threshold.is_some() && config.labels.is_some() {
            return Err(CliError::Usage(format!(
                "--config {}: set either `threshold` or `labels`, not both",
                path.display()
            )));
        }
        Ok(config)
    }
}
