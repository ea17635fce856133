//! Versioned machine-readable artifacts. Every emitted JSON document
//! carries a top-level schemaVersion and re-parses into the same in-memory
//! value.

use serde::{Deserialize, Serialize};

use charur::algebra::RepSpec;
use charur::moments::MomentPair;
use charur::search::{SearchResult, SearchSpec, SweepRow};
use charur::states::StateFamily;
use charur::truncation::TruncationStep;
use charur::uncertainty::{TraceUrReport, UrReport};
use charur::validate::PropertyResult;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct ReportArtifact {
    pub schema_version: u32,
    pub command: String,
    pub rep: RepSpec,
    pub state: StateFamily,
    pub tol: f64,
    pub truncation: Vec<TruncationStep>,
    pub moment_pair: MomentPair,
    pub ur_report: UrReport,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace_ur_report: Option<TraceUrReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct SearchArtifact {
    pub schema_version: u32,
    pub command: String,
    pub spec: SearchSpec,
    pub result: SearchResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct SweepArtifact {
    pub schema_version: u32,
    pub command: String,
    pub rep: RepSpec,
    pub state: StateFamily,
    pub param: String,
    pub orders: Vec<usize>,
    pub labels: Vec<String>,
    pub rows: Vec<SweepRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct ValidateArtifact {
    pub schema_version: u32,
    pub command: String,
    pub suite: String,
    pub trials: usize,
    pub seed: u64,
    pub properties: Vec<PropertyResult>,
}

/// Serializes with a trailing newline; pretty for humans, stable for diffs.
pub fn to_json<T: Serialize>(value: &T) -> anyhow::Result<String> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    Ok(text)
}
