//! Versioned JSON wrapper around [`EcuModel`].
//!
//! ```json
//! {"format": "ecu-model", "version": 1, "name": "...", "model": {...}}
//! ```

use std::path::Path;

use ecu_core::model::ModelError;
use ecu_core::reference::{self, Reading};
use ecu_core::EcuModel;
use serde::{Deserialize, Serialize};

pub const FORMAT: &str = "ecu-model";
pub const VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum ModelFileError {
    #[error("reading {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed model file: {0}")]
    Json(#[from] serde_json::Error),
    #[error("expected format {FORMAT:?}, found {0:?}")]
    Format(String),
    #[error("unsupported model file version {0} (this build reads {VERSION})")]
    Version(u32),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("no embedded model named {0:?}")]
    UnknownExample(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub format: String,
    pub version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub model: EcuModel,
}

impl ModelFile {
    pub fn new(name: Option<&str>, model: EcuModel) -> Self {
        Self { format: FORMAT.into(), version: VERSION, name: name.map(Into::into), model }
    }

    pub fn parse(text: &str) -> Result<Self, ModelFileError> {
        let file: ModelFile = serde_json::from_str(text)?;
        if file.format != FORMAT {
            return Err(ModelFileError::Format(file.format));
        }
        if file.version != VERSION {
            return Err(ModelFileError::Version(file.version));
        }
        file.model.validate()?;
        Ok(file)
    }

    pub fn load(path: &Path) -> Result<Self, ModelFileError> {
        let text = std::fs::read_to_string(path).map_err(|source| ModelFileError::Io { path: path.display().to_string(), source })?;
        Self::parse(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("models always serialize")
    }
}

/// Names accepted by [`example`].
pub const EXAMPLE_NAMES: [&str; 5] = [
    "disappointment_reversal",
    "common_consequence",
    "common_ratio",
    "betweenness_violation",
    "betweenness_violation_as_stated",
];

/// The embedded reference models.
pub fn example(name: &str) -> Result<ModelFile, ModelFileError> {
    let model = match name {
        "disappointment_reversal" => reference::disappointment_reversal(),
        "common_consequence" => reference::common_consequence(),
        "common_ratio" => reference::common_ratio(),
        "betweenness_violation" => reference::betweenness_violation(Reading::AsComputed),
        "betweenness_violation_as_stated" => reference::betweenness_violation(Reading::AsStated),
        other => return Err(ModelFileError::UnknownExample(other.into())),
    };
    Ok(ModelFile::new(Some(name), model))
}
