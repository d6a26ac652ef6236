use async_trait::async_trait;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use super::{SeedPrompt, SyngenError, TemplateSet};
use crate::client::{ChatClient, ChatMessage, ChatRequest};

/// The two fields pulled out of a structured generation, plus the raw
/// message content for auditing.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructuredGeneration {
    pub rephrased_prompt: String,
    pub answer: String,
    pub raw_payload: String,
}

impl StructuredGeneration {
    pub fn new(rephrased_prompt: impl Into<String>, answer: impl Into<String>) -> Self {
        let rephrased_prompt = rephrased_prompt.into();
        let answer = answer.into();
        let raw_payload = json!({"rephrased_prompt": rephrased_prompt, "answer": answer}).to_string();
        Self {
            rephrased_prompt,
            answer,
            raw_payload,
        }
    }
}

/// JSON schema sent as `response_format`.
pub fn structured_output_format() -> Value {
    json!({
        "type": "json_schema",
        "json_schema": {
            "name": "rephrase_and_answer",
            "strict": true,
            "schema": {
                "type": "object",
                "properties": {
                    "rephrased_prompt": {"type": "string"},
                    "answer": {"type": "string"}
                },
                "required": ["rephrased_prompt", "answer"],
                "additionalProperties": false
            }
        }
    })
}

/// Parses message content into the two required string fields.
///
/// The content must be a JSON object with exactly the keys
/// `rephrased_prompt` and `answer`. A surrounding markdown code fence is
/// tolerated.
pub fn parse_structured_output(content: &str) -> Result<StructuredGeneration, SyngenError> {
    let malformed = |detail: String| SyngenError::MalformedStructuredOutput {
        detail,
        raw: content.to_string(),
    };
    let body = crate::text::strip_code_fence(content);
    let value: Value = serde_json::from_str(body).map_err(|e| malformed(e.to_string()))?;
    let obj: &Map<String, Value> = value.as_object().ok_or_else(|| malformed("not a JSON object".into()))?;
    if let Some(extra) = obj.keys().find(|k| *k != "rephrased_prompt" && *k != "answer") {
        return Err(malformed(format!("unexpected key {extra:?}")));
    }
    let field = |name: &str| -> Result<String, SyngenError> {
        obj.get(name)
            .and_then(Value::as_str)
            .map(str::to_string)
            .ok_or_else(|| malformed(format!("missing string field {name:?}")))
    };
    Ok(StructuredGeneration {
        rephrased_prompt: field("rephrased_prompt")?,
        answer: field("answer")?,
        raw_payload: content.to_string(),
    })
}

pub fn generation_request(seed: &SeedPrompt, templates: &TemplateSet) -> ChatRequest {
    let g = templates.generation();
    ChatRequest::new(vec![
        ChatMessage::system(g.system.trim()),
        ChatMessage::user(templates.generation_user(&seed.instruction_text)),
    ])
    .with_response_format(structured_output_format())
}

/// Sends one rephrase-and-answer request and parses the structured reply.
pub async fn request_generation(
    seed: &SeedPrompt,
    client: &ChatClient,
    templates: &TemplateSet,
    temperature: f64,
) -> Result<StructuredGeneration, SyngenError> {
    let mut req = generation_request(seed, templates);
    req.temperature = temperature;
    let content = client.complete_text(&req).await?;
    parse_structured_output(&content)
}

/// Anything that turns a seed prompt into a structured generation.
#[async_trait]
pub trait Generator: Send + Sync {
    async fn generate(&self, seed: &SeedPrompt) -> Result<StructuredGeneration, SyngenError>;
}

/// A generator backed by a chat-completion endpoint.
pub struct EndpointGenerator {
    client: ChatClient,
    templates: TemplateSet,
    temperature: f64,
}

impl EndpointGenerator {
    pub fn new(client: ChatClient, templates: TemplateSet) -> Self {
        Self {
            client,
            templates,
            temperature: 0.7,
        }
    }

    pub fn with_temperature(mut self, temperature: f64) -> Self {
        self.temperature = temperature;
        self
    }
}

#[async_trait]
impl Generator for EndpointGenerator {
    async fn generate(&self, seed: &SeedPrompt) -> Result<StructuredGeneration, SyngenError> {
        request_generation(seed, &self.client, &self.templates, self.temperature).await
    }
}

/// Adapts a plain closure, for in-process generators and tests.
pub struct FnGenerator<F>(pub F);

#[async_trait]
impl<F> Generator for FnGenerator<F>
where
    F: Fn(&SeedPrompt) -> Result<StructuredGeneration, SyngenError> + Send + Sync,
{
    async fn generate(&self, seed: &SeedPrompt) -> Result<StructuredGeneration, SyngenError> {
        (self.0)(seed)
    }
}
