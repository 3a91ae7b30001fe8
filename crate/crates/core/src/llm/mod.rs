//! Chat-completion clients: an HTTP client for hosted models and a replay
//! client that returns canned responses in order.

use serde::{Deserialize, Serialize};

mod cost;
mod http;
mod replay;

pub use cost::{estimate_cost, Price};
pub use http::{backoff_delay, HttpClient, ModelEndpoint, Provider};
pub use replay::ReplayClient;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    System,
    User,
    Assistant,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChatTurn {
    pub role: Role,
    pub content: String,
}

impl ChatTurn {
    pub fn system(content: impl Into<String>) -> Self {
        ChatTurn {
            role: Role::System,
            content: content.into(),
        }
    }

    pub fn user(content: impl Into<String>) -> Self {
        ChatTurn {
            role: Role::User,
            content: content.into(),
        }
    }
}

/// Token counts reported by a provider.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Usage {
    pub input_tokens: u64,
    pub output_tokens: u64,
}

impl std::ops::AddAssign for Usage {
    fn add_assign(&mut self, o: Usage) {
        self.input_tokens += o.input_tokens;
        self.output_tokens += o.output_tokens;
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Completion {
    pub texts: Vec<String>,
    /// Summed over all samples; `None` when the provider reported nothing.
    pub usage: Option<Usage>,
}

#[derive(Debug, thiserror::Error)]
pub enum EndpointError {
    #[error("authentication rejected (HTTP {status})")]
    Auth { status: u16 },
    #[error("API key variable `{0}` is not set")]
    MissingKey(String),
    #[error("gave up after {attempts} attempts: {last}")]
    Exhausted { attempts: u32, last: String },
    #[error("request rejected (HTTP {status}): {body}")]
    Rejected { status: u16, body: String },
    #[error("unexpected response: {0}")]
    Protocol(String),
    #[error("replay exhausted after {0} responses")]
    ReplayExhausted(usize),
    #[error("invalid request: {0}")]
    InvalidRequest(String),
}

pub trait ModelClient: Send + Sync {
    fn complete(&self, turns: &[ChatTurn], temperature: f64, n_samples: u32) -> Result<Completion, EndpointError>;
}

pub(crate) fn check_request(turns: &[ChatTurn], temperature: f64, n_samples: u32) -> Result<(), EndpointError> {
    if turns.is_empty() {
        return Err(EndpointError::InvalidRequest("no turns".into()));
    }
    if turns[0].role != Role::System {
        return Err(EndpointError::InvalidRequest("first turn must be the system prompt".into()));
    }
    for w in turns[1..].windows(2) {
        if w[0].role == w[1].role {
            return Err(EndpointError::InvalidRequest("turns must alternate after the system prompt".into()));
        }
    }
    if !(0.0..=1.0).contains(&temperature) {
        return Err(EndpointError::InvalidRequest(format!("temperature {temperature} outside [0, 1]")));
    }
    if n_samples == 0 {
        return Err(EndpointError::InvalidRequest("n_samples must be at least 1".into()));
    }
    Ok(())
}
