//! Serialized campaign records. A [`CampaignLog`] is the only input the
//! metric engine needs.

use serde::{Deserialize, Serialize};

use crate::executor::EvidenceDigest;
use crate::llm::Usage;
use crate::types::{CampaignConfig, StageOutcome};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptTranscript {
    pub system: String,
    pub user: String,
}

/// Outcome of one program on one instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub instance_id: String,
    pub outcome: StageOutcome,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub evidence: Option<EvidenceDigest>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleLog {
    pub sample_index: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub program: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub extraction_error: Option<String>,
    /// One record per demo instance, in instance-id order.
    pub records: Vec<RunRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationLog {
    pub iteration: u32,
    pub prompt: PromptTranscript,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub usage: Option<Usage>,
    pub samples: Vec<SampleLog>,
}

/// The held-out run of the selected program.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalLog {
    pub selected_iteration: u32,
    pub selected_sample: u32,
    pub records: Vec<RunRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignLog {
    pub schema: u32,
    pub config: CampaignConfig,
    pub demo_instances: Vec<String>,
    pub eval_instances: Vec<String>,
    pub iterations: Vec<IterationLog>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eval: Option<EvalLog>,
    /// Set when the campaign stopped early; holds the reason.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub aborted: Option<String>,
}

#[derive(Debug, thiserror::Error)]
pub enum LogError {
    #[error("campaign log is not valid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("campaign log has schema {found}, expected {SCHEMA_VERSION}")]
    Schema { found: u64 },
}

impl CampaignLog {
    pub fn new(config: CampaignConfig, demo_instances: Vec<String>, eval_instances: Vec<String>) -> Self {
        CampaignLog {
            schema: SCHEMA_VERSION,
            config,
            demo_instances,
            eval_instances,
            iterations: Vec::new(),
            eval: None,
            aborted: None,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("campaign log serializes");
        s.push('\n');
        s
    }

    /// Parse a log, rejecting unknown schema versions before decoding the body.
    pub fn from_json(text: &str) -> Result<Self, LogError> {
        let v: serde_json::Value = serde_json::from_str(text)?;
        let found = v.get("schema").and_then(|s| s.as_u64()).unwrap_or(0);
        if found != SCHEMA_VERSION as u64 {
            return Err(LogError::Schema { found });
        }
        Ok(serde_json::from_value(v)?)
    }

    pub fn iteration(&self, t: u32) -> Option<&IterationLog> {
        self.iterations.iter().find(|it| it.iteration == t)
    }

    pub fn sample(&self, iteration: u32, sample: u32) -> Option<&SampleLog> {
        self.iteration(iteration)?.samples.iter().find(|s| s.sample_index == sample)
    }
}
