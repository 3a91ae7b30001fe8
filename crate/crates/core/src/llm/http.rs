use std::thread;
use std::time::Duration;

use rand::Rng;
use serde_json::{json, Value};

use super::{check_request, ChatTurn, Completion, EndpointError, ModelClient, Role, Usage};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provider {
    /// `POST {base}/chat/completions` with bearer auth.
    OpenAi,
    /// `POST {base}/messages` with `x-api-key` auth.
    Anthropic,
}

/// Where and how to reach a hosted model. The key itself is only ever read
/// from the named environment variable at request time.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelEndpoint {
    pub provider: Provider,
    pub base_url: String,
    pub model: String,
    pub api_key_env: String,
    pub request_timeout: Duration,
    /// Total attempts per request, including the first.
    pub max_attempts: u32,
    pub backoff_base: Duration,
    pub max_tokens: u32,
}

impl ModelEndpoint {
    pub fn openai(base_url: impl Into<String>, model: impl Into<String>, api_key_env: impl Into<String>) -> Self {
        ModelEndpoint {
            provider: Provider::OpenAi,
            base_url: base_url.into(),
            model: model.into(),
            api_key_env: api_key_env.into(),
            request_timeout: Duration::from_secs(600),
            max_attempts: 5,
            backoff_base: Duration::from_secs(1),
            max_tokens: 16384,
        }
    }

    pub fn anthropic(base_url: impl Into<String>, model: impl Into<String>, api_key_env: impl Into<String>) -> Self {
        ModelEndpoint {
            provider: Provider::Anthropic,
            ..Self::openai(base_url, model, api_key_env)
        }
    }
}

/// Delay before retry number `attempt` (0-based): base·2^attempt scaled by a
/// jitter factor in [0.5, 1.5).
pub fn backoff_delay(base: Duration, attempt: u32, rng: &mut impl Rng) -> Duration {
    base.mul_f64(2f64.powi(attempt as i32) * rng.gen_range(0.5..1.5))
}

pub struct HttpClient {
    endpoint: ModelEndpoint,
    agent: ureq::Agent,
}

enum Failure {
    Retry(String),
    Fatal(EndpointError),
}

impl HttpClient {
    pub fn new(endpoint: ModelEndpoint) -> Self {
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .timeout_global(Some(endpoint.request_timeout))
            .http_status_as_error(false)
            .build()
            .into();
        HttpClient { endpoint, agent }
    }

    fn body(&self, turns: &[ChatTurn], temperature: f64) -> Value {
        let role = |r: Role| match r {
            Role::System => "system",
            Role::User => "user",
            Role::Assistant => "assistant",
        };
        match self.endpoint.provider {
            Provider::OpenAi => json!({
                "model": self.endpoint.model,
                "temperature": temperature,
                "messages": turns.iter().map(|t| json!({"role": role(t.role), "content": t.content})).collect::<Vec<_>>(),
            }),
            Provider::Anthropic => json!({
                "model": self.endpoint.model,
                "temperature": temperature,
                "max_tokens": self.endpoint.max_tokens,
                "system": turns[0].content,
                "messages": turns[1..].iter().map(|t| json!({"role": role(t.role), "content": t.content})).collect::<Vec<_>>(),
            }),
        }
    }

    fn parse(&self, v: &Value) -> Result<(String, Option<Usage>), EndpointError> {
        let missing = || EndpointError::Protocol("response has no completion text".into());
        let num = |v: &Value, k: &str| v.get(k).and_then(Value::as_u64).unwrap_or(0);
        match self.endpoint.provider {
            Provider::OpenAi => {
                let text = v["choices"][0]["message"]["content"].as_str().ok_or_else(missing)?;
                let usage = v.get("usage").map(|u| Usage {
                    input_tokens: num(u, "prompt_tokens"),
                    output_tokens: num(u, "completion_tokens"),
                });
                Ok((text.to_string(), usage))
            }
            Provider::Anthropic => {
                let parts = v["content"].as_array().ok_or_else(missing)?;
                let text: String = parts
                    .iter()
                    .filter(|p| p["type"] == "text")
                    .filter_map(|p| p["text"].as_str())
                    .collect();
                let usage = v.get("usage").map(|u| Usage {
                    input_tokens: num(u, "input_tokens"),
                    output_tokens: num(u, "output_tokens"),
                });
                Ok((text, usage))
            }
        }
    }

    fn attempt(&self, body: &Value, key: &str) -> Result<Value, Failure> {
        let base = self.endpoint.base_url.trim_end_matches('/');
        let req = match self.endpoint.provider {
            Provider::OpenAi => self
                .agent
                .post(format!("{base}/chat/completions"))
                .header("Authorization", format!("Bearer {key}")),
            Provider::Anthropic => self
                .agent
                .post(format!("{base}/messages"))
                .header("x-api-key", key)
                .header("anthropic-version", "2023-06-01"),
        };
        let mut resp = req.send_json(body).map_err(|e| Failure::Retry(e.to_string()))?;
        let status = resp.status().as_u16();
        if status == 401 || status == 403 {
            return Err(Failure::Fatal(EndpointError::Auth { status }));
        }
        if status == 429 || status >= 500 {
            return Err(Failure::Retry(format!("HTTP {status}")));
        }
        if status >= 400 {
            let body = resp.body_mut().read_to_string().unwrap_or_default();
            return Err(Failure::Fatal(EndpointError::Rejected {
                status,
                body: body.chars().take(500).collect(),
            }));
        }
        resp.body_mut()
            .read_json::<Value>()
            .map_err(|e| Failure::Fatal(EndpointError::Protocol(e.to_string())))
    }

    fn request(&self, body: &Value, key: &str) -> Result<Value, EndpointError> {
        let mut rng = rand::thread_rng();
        let mut last = String::new();
        for a in 0..self.endpoint.max_attempts {
            if a > 0 {
                thread::sleep(backoff_delay(self.endpoint.backoff_base, a - 1, &mut rng));
            }
            match self.attempt(body, key) {
                Ok(v) => return Ok(v),
                Err(Failure::Fatal(e)) => return Err(e),
                Err(Failure::Retry(msg)) => {
                    log::warn!("model request attempt {} failed: {msg}", a + 1);
                    last = msg;
                }
            }
        }
        Err(EndpointError::Exhausted {
            attempts: self.endpoint.max_attempts,
            last,
        })
    }
}

impl ModelClient for HttpClient {
    fn complete(&self, turns: &[ChatTurn], temperature: f64, n_samples: u32) -> Result<Completion, EndpointError> {
        check_request(turns, temperature, n_samples)?;
        let key = std::env::var(&self.endpoint.api_key_env)
            .map_err(|_| EndpointError::MissingKey(self.endpoint.api_key_env.clone()))?;
        let body = self.body(turns, temperature);
        let mut texts = Vec::with_capacity(n_samples as usize);
        let mut usage: Option<Usage> = None;
        for _ in 0..n_samples {
            let v = self.request(&body, &key)?;
            let (text, u) = self.parse(&v)?;
            texts.push(text);
            if let Some(u) = u {
                *usage.get_or_insert_with(Usage::default) += u;
            }
        }
        Ok(Completion { texts, usage })
    }
}
