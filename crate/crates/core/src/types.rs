//! Shared domain types: problem identifiers, instances, candidate programs,
//! stage outcomes and campaign configuration.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::ConfigError;

/// The closed set of problems bundled with the harness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProblemId {
    OperatorScheduling,
    TechnologyMapping,
    GlobalRouting,
    EgraphExtraction,
    IntraOpParallelism,
    ProteinDesign,
    MendelianError,
    CrewPairing,
    Pdptw,
}

impl ProblemId {
    pub const ALL: [ProblemId; 9] = [
        ProblemId::OperatorScheduling,
        ProblemId::TechnologyMapping,
        ProblemId::GlobalRouting,
        ProblemId::EgraphExtraction,
        ProblemId::IntraOpParallelism,
        ProblemId::ProteinDesign,
        ProblemId::MendelianError,
        ProblemId::CrewPairing,
        ProblemId::Pdptw,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ProblemId::OperatorScheduling => "operator_scheduling",
            ProblemId::TechnologyMapping => "technology_mapping",
            ProblemId::GlobalRouting => "global_routing",
            ProblemId::EgraphExtraction => "egraph_extraction",
            ProblemId::IntraOpParallelism => "intra_op_parallelism",
            ProblemId::ProteinDesign => "protein_design",
            ProblemId::MendelianError => "mendelian_error",
            ProblemId::CrewPairing => "crew_pairing",
            ProblemId::Pdptw => "pdptw",
        }
    }

    pub fn sense(self) -> ObjectiveSense {
        match self {
            ProblemId::ProteinDesign => ObjectiveSense::Maximize,
            _ => ObjectiveSense::Minimize,
        }
    }

    /// Default wall-clock limit per run, in seconds.
    pub fn default_timeout_s(self) -> f64 {
        match self {
            ProblemId::GlobalRouting => 300.0,
            ProblemId::IntraOpParallelism | ProblemId::Pdptw => 60.0,
            _ => 10.0,
        }
    }

    /// File extension used for instance payloads of this problem.
    pub fn instance_extension(self) -> &'static str {
        match self {
            ProblemId::TechnologyMapping => "blif",
            ProblemId::GlobalRouting => "gr",
            ProblemId::Pdptw => "txt",
            _ => "json",
        }
    }

    pub fn valid_ids() -> String {
        Self::ALL.iter().map(|p| p.as_str()).collect::<Vec<_>>().join(", ")
    }
}

impl fmt::Display for ProblemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ProblemId {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .iter()
            .copied()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| ConfigError::UnknownProblem(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectiveSense {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Split {
    Demo,
    Eval,
}

impl Split {
    pub fn dir_name(self) -> &'static str {
        match self {
            Split::Demo => "demo",
            Split::Eval => "eval",
        }
    }
}

/// One benchmark input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstanceRef {
    pub problem: ProblemId,
    pub instance_id: String,
    pub split: Split,
    pub payload: Vec<u8>,
}

impl InstanceRef {
    pub fn payload_text(&self) -> String {
        String::from_utf8_lossy(&self.payload).into_owned()
    }
}

/// Source text of one generated solver.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateProgram {
    pub source: String,
    pub iteration: u32,
    pub sample_index: u32,
}

/// Pipeline milestone reached by one run, ordered from worst to best.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum StageTag {
    #[serde(rename = "Fail_I")]
    FailI,
    #[serde(rename = "Fail_II")]
    FailII,
    #[serde(rename = "Fail_III")]
    FailIII,
    Verified,
}

impl StageTag {
    /// True when this outcome lies strictly beyond the failure point of `stage`.
    pub fn passes(self, stage: Stage) -> bool {
        match stage {
            Stage::I => self > StageTag::FailI,
            Stage::II => self > StageTag::FailII,
            Stage::III => self > StageTag::FailIII,
        }
    }
}

impl fmt::Display for StageTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StageTag::FailI => "Fail_I",
            StageTag::FailII => "Fail_II",
            StageTag::FailIII => "Fail_III",
            StageTag::Verified => "Verified",
        })
    }
}

/// The three pipeline stages: execution, solution generation, verification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Stage {
    I,
    II,
    III,
}

impl Stage {
    pub const ALL: [Stage; 3] = [Stage::I, Stage::II, Stage::III];

    pub fn roman(self) -> &'static str {
        match self {
            Stage::I => "I",
            Stage::II => "II",
            Stage::III => "III",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorCategory {
    HallucinatedApi,
    Logic,
    Constraint,
    Timeout,
    Other,
}

/// Classification of a single (program, instance) run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageOutcome {
    pub tag: StageTag,
    pub detail: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cost: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub violations: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error_category: Option<ErrorCategory>,
}

impl StageOutcome {
    pub fn verified(cost: f64) -> Self {
        StageOutcome {
            tag: StageTag::Verified,
            detail: format!("Verified. Cost: {cost}"),
            cost: Some(cost),
            violations: Vec::new(),
            error_category: None,
        }
    }

    pub fn failure(tag: StageTag, detail: impl Into<String>, category: ErrorCategory) -> Self {
        debug_assert!(tag != StageTag::Verified);
        StageOutcome {
            tag,
            detail: detail.into(),
            cost: None,
            violations: Vec::new(),
            error_category: Some(category),
        }
    }

    /// A feasibility failure; `violations` must be non-empty.
    pub fn infeasible(violations: Vec<String>) -> Self {
        assert!(!violations.is_empty(), "Fail_III requires at least one violation");
        let mut detail = format!("Verification failed with {} violation(s):", violations.len());
        for v in violations.iter().take(20) {
            detail.push_str("\n- ");
            detail.push_str(v);
        }
        if violations.len() > 20 {
            detail.push_str(&format!("\n- ... {} more", violations.len() - 20));
        }
        StageOutcome {
            tag: StageTag::FailIII,
            detail,
            cost: None,
            violations,
            error_category: Some(ErrorCategory::Constraint),
        }
    }

    pub fn is_verified(&self) -> bool {
        self.tag == StageTag::Verified
    }
}

/// Settings for one campaign. Serialized verbatim into the campaign log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignConfig {
    pub problem: ProblemId,
    pub iterations: u32,
    pub samples_per_iteration: u32,
    pub temperature: f64,
    /// `None` uses every demo instance.
    pub num_demos: Option<usize>,
    pub timeout_s: f64,
    pub cpu_cores: u32,
    /// Human-readable reference to the model source (never a secret).
    pub model: String,
    pub seed: u64,
}

impl CampaignConfig {
    pub fn new(problem: ProblemId, model: impl Into<String>) -> Self {
        CampaignConfig {
            problem,
            iterations: 10,
            samples_per_iteration: 1,
            temperature: 0.0,
            num_demos: None,
            timeout_s: problem.default_timeout_s(),
            cpu_cores: 8,
            model: model.into(),
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.iterations == 0 {
            return Err(ConfigError::Invalid("iterations must be positive".into()));
        }
        if self.samples_per_iteration == 0 {
            return Err(ConfigError::Invalid("samples_per_iteration must be positive".into()));
        }
        if !(0.0..=1.0).contains(&self.temperature) {
            return Err(ConfigError::Invalid(format!(
                "temperature {} outside [0, 1]",
                self.temperature
            )));
        }
        if !(self.timeout_s > 0.0 && self.timeout_s.is_finite()) {
            return Err(ConfigError::Invalid("timeout_s must be positive".into()));
        }
        if self.cpu_cores == 0 {
            return Err(ConfigError::Invalid("cpu_cores must be positive".into()));
        }
        if self.num_demos == Some(0) {
            return Err(ConfigError::Invalid("num_demos must be at least 1".into()));
        }
        Ok(())
    }
}
