//! Machine-readable run reports written by the CLI.

use serde::{Deserialize, Serialize};

use crate::metrics::QualityReport;
use crate::thresholder::{Class, SegmentationParams, SegmentationResult};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub input_path: String,
    pub params: SegmentationParams,
    pub thresholds: Vec<u8>,
    pub class_table: Vec<Class>,
    pub quality: QualityReport,
    pub effective_n: usize,
}

impl RunReport {
    pub fn new(
        input_path: impl Into<String>,
        result: &SegmentationResult,
        quality: QualityReport,
    ) -> Self {
        Self {
            input_path: input_path.into(),
            params: quality.params.clone(),
            thresholds: result.thresholds().to_vec(),
            class_table: result.classes().to_vec(),
            quality,
            effective_n: result.effective_n(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OtsuReport {
    pub input_path: String,
    pub classes: usize,
    pub thresholds: Vec<u8>,
    pub criterion: f64,
    pub elapsed_ms: f64,
}

/// Comma-separated thresholds, as printed on stdout.
pub fn format_thresholds(thresholds: &[u8]) -> String {
    thresholds
        .iter()
        .map(u8::to_string)
        .collect::<Vec<_>>()
        .join(", ")
}
