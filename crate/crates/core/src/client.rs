//! Chat-completion client shared by generation, evaluation and translation.
//!
//! Speaks the common `POST {base_url}/v1/chat/completions` wire format, so
//! any compatible server (hosted or local) can sit behind an endpoint.

use std::time::{Duration, Instant};

use futures::stream::{self, StreamExt};
use serde::{Deserialize, Serialize};
use serde_json::Value;

pub const DEFAULT_API_KEY_ENV: &str = "FINADAPT_API_KEY";

fn default_api_key_env() -> String {
    DEFAULT_API_KEY_ENV.to_string()
}

/// Where and how to reach a model.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EndpointDescriptor {
    pub id: String,
    pub base_url: String,
    pub model: String,
    /// Environment variable holding the bearer token. Secrets never live in files.
    #[serde(default = "default_api_key_env")]
    pub api_key_env: String,
}

impl EndpointDescriptor {
    pub fn new(id: impl Into<String>, base_url: impl Into<String>, model: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            base_url: base_url.into(),
            model: model.into(),
            api_key_env: default_api_key_env(),
        }
    }

    pub fn completions_url(&self) -> String {
        format!("{}/v1/chat/completions", self.base_url.trim_end_matches('/'))
    }
}

#[derive(Debug, Clone)]
pub struct RetryPolicy {
    /// Retries after the first attempt; total attempts = `max_retries + 1`.
    pub max_retries: u32,
    pub base_delay: Duration,
    pub max_delay: Duration,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        Self {
            max_retries: 3,
            base_delay: Duration::from_millis(500),
            max_delay: Duration::from_secs(30),
        }
    }
}

impl RetryPolicy {
    pub fn delay_for(&self, retry: u32) -> Duration {
        let factor = 1u32.checked_shl(retry).unwrap_or(u32::MAX);
        self.base_delay.saturating_mul(factor).min(self.max_delay)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecodeParams {
    pub temperature: f64,
    pub max_tokens: u32,
}

impl Default for DecodeParams {
    fn default() -> Self {
        Self {
            temperature: 0.0,
            max_tokens: 512,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChatMessage {
    pub role: String,
    pub content: String,
}

impl ChatMessage {
    pub fn system(content: impl Into<String>) -> Self {
        Self {
            role: "system".into(),
            content: content.into(),
        }
    }

    pub fn user(content: impl Into<String>) -> Self {
        Self {
            role: "user".into(),
            content: content.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChatRequest {
    pub model: String,
    pub messages: Vec<ChatMessage>,
    pub temperature: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_tokens: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub response_format: Option<Value>,
}

impl ChatRequest {
    pub fn new(messages: Vec<ChatMessage>) -> Self {
        Self {
            model: String::new(),
            messages,
            temperature: 0.0,
            max_tokens: None,
            response_format: None,
        }
    }

    pub fn with_decode(mut self, decode: DecodeParams) -> Self {
        self.temperature = decode.temperature;
        self.max_tokens = Some(decode.max_tokens);
        self
    }

    pub fn with_response_format(mut self, format: Value) -> Self {
        self.response_format = Some(format);
        self
    }

    pub fn last_user_content(&self) -> Option<&str> {
        self.messages
            .iter()
            .rev()
            .find(|m| m.role == "user")
            .map(|m| m.content.as_str())
    }
}

#[derive(Debug, Deserialize)]
struct CompletionEnvelope {
    choices: Vec<Choice>,
}

#[derive(Debug, Deserialize)]
struct Choice {
    message: ChoiceMessage,
}

#[derive(Debug, Deserialize)]
struct ChoiceMessage {
    #[serde(default)]
    content: Option<String>,
}

#[derive(Debug, Clone, thiserror::Error)]
pub enum ClientError {
    #[error("transport failure on endpoint {endpoint} after {attempts} attempt(s): {detail}")]
    Transport {
        endpoint: String,
        attempts: u32,
        detail: String,
    },
    #[error("endpoint {endpoint} returned an unreadable completion: {detail}")]
    BadEnvelope { endpoint: String, detail: String },
    #[error("cannot build http client: {0}")]
    Setup(String),
}

/// A completion together with the wall time it took, retries included.
#[derive(Debug, Clone)]
pub struct Completion {
    pub text: String,
    pub latency: Duration,
    pub attempts: u32,
}

#[derive(Debug, Clone)]
pub struct ChatClient {
    http: reqwest::Client,
    endpoint: EndpointDescriptor,
    retry: RetryPolicy,
    api_key: Option<String>,
}

enum Attempt {
    Done(String),
    Retryable(String),
    Fatal(ClientError),
}

impl ChatClient {
    /// Reads the bearer token from the descriptor's environment variable, if set.
    pub fn new(endpoint: EndpointDescriptor, retry: RetryPolicy) -> Result<Self, ClientError> {
        let api_key = std::env::var(&endpoint.api_key_env).ok().filter(|k| !k.is_empty());
        let http = reqwest::Client::builder()
            .timeout(Duration::from_secs(300))
            .build()
            .map_err(|e| ClientError::Setup(e.to_string()))?;
        Ok(Self {
            http,
            endpoint,
            retry,
            api_key,
        })
    }

    pub fn endpoint(&self) -> &EndpointDescriptor {
        &self.endpoint
    }

    /// Sends one request, retrying connection failures, 429 and 5xx with
    /// exponential backoff. Other 4xx responses fail immediately.
    pub async fn complete(&self, request: &ChatRequest) -> Result<Completion, ClientError> {
        let mut request = request.clone();
        request.model = self.endpoint.model.clone();
        let started = Instant::now();
        let mut attempts = 0;
        loop {
            attempts += 1;
            match self.attempt(&request).await {
                Attempt::Done(text) => {
                    return Ok(Completion {
                        text,
                        latency: started.elapsed(),
                        attempts,
                    })
                }
                Attempt::Fatal(e) => return Err(e),
                Attempt::Retryable(detail) => {
                    if attempts > self.retry.max_retries {
                        return Err(ClientError::Transport {
                            endpoint: self.endpoint.id.clone(),
                            attempts,
                            detail,
                        });
                    }
                    let delay = self.retry.delay_for(attempts - 1);
                    tracing::debug!(endpoint = %self.endpoint.id, attempts, ?delay, %detail, "retrying");
                    tokio::time::sleep(delay).await;
                }
            }
        }
    }

    /// Convenience wrapper returning only the text.
    pub async fn complete_text(&self, request: &ChatRequest) -> Result<String, ClientError> {
        self.complete(request).await.map(|c| c.text)
    }

    async fn attempt(&self, request: &ChatRequest) -> Attempt {
        let mut builder = self.http.post(self.endpoint.completions_url()).json(request);
        if let Some(key) = &self.api_key {
            builder = builder.bearer_auth(key);
        }
        let response = match builder.send().await {
            Ok(r) => r,
            Err(e) => return Attempt::Retryable(e.to_string()),
        };
        let status = response.status();
        let body = match response.text().await {
            Ok(b) => b,
            Err(e) => return Attempt::Retryable(e.to_string()),
        };
        if status.as_u16() == 429 || status.is_server_error() {
            return Attempt::Retryable(format!("http {status}"));
        }
        if !status.is_success() {
            return Attempt::Fatal(ClientError::Transport {
                endpoint: self.endpoint.id.clone(),
                attempts: 1,
                detail: format!("http {status}: {}", truncate(&body, 200)),
            });
        }
        let envelope: CompletionEnvelope = match serde_json::from_str(&body) {
            Ok(e) => e,
            Err(e) => {
                return Attempt::Fatal(ClientError::BadEnvelope {
                    endpoint: self.endpoint.id.clone(),
                    detail: e.to_string(),
                })
            }
        };
        match envelope.choices.into_iter().next() {
            Some(choice) => Attempt::Done(choice.message.content.unwrap_or_default()),
            None => Attempt::Fatal(ClientError::BadEnvelope {
                endpoint: self.endpoint.id.clone(),
                detail: "no choices".into(),
            }),
        }
    }
}

fn truncate(s: &str, max: usize) -> &str {
    match s.char_indices().nth(max) {
        Some((i, _)) => &s[..i],
        None => s,
    }
}

/// Runs `f` over `items` with at most `limit` futures in flight and returns
/// results in input order, whatever order they completed in.
pub async fn map_bounded<T, R, F, Fut>(items: Vec<T>, limit: usize, f: F) -> Vec<R>
where
    F: Fn(T) -> Fut,
    Fut: std::future::Future<Output = R>,
{
    let mut out: Vec<(usize, R)> = stream::iter(items.into_iter().enumerate().map(|(i, item)| {
        let fut = f(item);
        async move { (i, fut.await) }
    }))
    .buffer_unordered(limit.max(1))
    .collect()
    .await;
    out.sort_by_key(|(i, _)| *i);
    out.into_iter().map(|(_, r)| r).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn backoff_doubles_and_caps() {
        let p = RetryPolicy {
            max_retries: 10,
            base_delay: Duration::from_millis(100),
            max_delay: Duration::from_millis(1000),
        };
        let delays: Vec<u128> = (0..6).map(|r| p.delay_for(r).as_millis()).collect();
        assert_eq!(delays, [100, 200, 400, 800, 1000, 1000]);
        assert_eq!(p.delay_for(40), Duration::from_millis(1000));
    }

    #[test]
    fn request_wire_format() {
        let req = ChatRequest::new(vec![ChatMessage::user("B?")]).with_decode(DecodeParams::default());
        let json = serde_json::to_value(&req).unwrap();
        assert_eq!(
            json,
            serde_json::json!({
                "model": "",
                "messages": [{"role": "user", "content": "B?"}],
                "temperature": 0.0,
                "max_tokens": 512
            })
        );
    }

    #[test]
    fn url_joins_cleanly() {
        let e = EndpointDescriptor::new("x", "http://h:1/", "m");
        assert_eq!(e.completions_url(), "http://h:1/v1/chat/completions");
    }

    #[tokio::test]
    async fn map_bounded_restores_input_order() {
        let out = map_bounded((0..20u64).collect(), 4, |i| async move {
            tokio::time::sleep(Duration::from_millis((20 - i) % 7)).await;
            i * 2
        })
        .await;
        assert_eq!(out, (0..20u64).map(|i| i * 2).collect::<Vec<_>>());
    }
}
