//! Benchmark harness for LLM-generated combinatorial optimisation heuristics.
//!
//! Problems, reference baselines, a Python candidate executor, the iterative
//! refinement loop and the stage-wise metrics all live here. The CLI is a
//! thin wrapper.

pub mod baselines;
pub mod campaign;
pub mod error;
pub mod executor;
pub mod extract;
pub mod llm;
pub mod log;
pub mod metrics;
pub mod problems;
pub mod prompt;
pub mod refs;
pub mod stage;
pub mod suite;
pub mod synth;
pub mod types;

pub use campaign::{run_campaign, CampaignError};
pub use error::{ConfigError, ParseError, SolverError};
pub use executor::{execute_candidate, EvidenceDigest, ExecutionEvidence, ResourceLimits, Runner};
pub use log::CampaignLog;
pub use metrics::{compute_report, MetricsReport};
pub use problems::{adapter, ProblemAdapter, Violation};
pub use refs::ReferenceCosts;
pub use suite::Suite;
pub use types::*;
