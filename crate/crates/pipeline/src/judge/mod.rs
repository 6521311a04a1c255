//! Remote LLM judge: chat-completion wire format, HTTP transport, and a client
//! that adds caching and retries.

pub mod cache;
pub mod prompt;
pub mod retry;

use std::sync::Arc;
use std::time::Duration;

use ragcheck_core::EntailmentLabel;
use serde::{Deserialize, Serialize};

use crate::error::PipelineError;
use cache::{CacheKey, CacheStore};
use retry::RetryPolicy;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChatMessage {
    pub role: String,
    pub content: String,
}

/// Request body. Field names are part of the wire contract.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChatRequest {
    pub model: String,
    pub temperature: f64,
    pub max_tokens: u32,
    pub messages: Vec<ChatMessage>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChoiceMessage {
    pub content: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Choice {
    pub message: ChoiceMessage,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct Usage {
    pub prompt_tokens: u64,
    pub completion_tokens: u64,
    pub total_tokens: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChatResponse {
    pub choices: Vec<Choice>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub usage: Option<Usage>,
}

impl ChatResponse {
    pub fn text(content: impl Into<String>) -> Self {
        ChatResponse {
            choices: vec![Choice {
                message: ChoiceMessage {
                    content: content.into(),
                },
            }],
            usage: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum JudgeRole {
    Extract,
    Check,
}

impl JudgeRole {
    fn cache_backend(self) -> &'static str {
        match self {
            JudgeRole::Extract => "remote_judge/extract",
            JudgeRole::Check => "remote_judge/check",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JudgeRequest {
    pub role: JudgeRole,
    pub prompt: String,
    pub model: String,
    pub temperature: f64,
    pub max_tokens: u32,
}

impl JudgeRequest {
    pub fn to_chat(&self) -> ChatRequest {
        ChatRequest {
            model: self.model.clone(),
            temperature: self.temperature,
            max_tokens: self.max_tokens,
            messages: vec![
                ChatMessage {
                    role: "system".into(),
                    content: prompt::SYSTEM_PROMPT.into(),
                },
                ChatMessage {
                    role: "user".into(),
                    content: self.prompt.clone(),
                },
            ],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum JudgePayload {
    Claims(Vec<String>),
    Labels(Vec<EntailmentLabel>),
}

/// What gets cached: the raw completion plus its parsed form.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JudgeResponse {
    pub role: JudgeRole,
    pub raw: String,
    pub payload: JudgePayload,
    pub usage: Usage,
}

/// Sends one chat request. Implementations must be callable from many threads.
pub trait Transport: Send + Sync {
    fn send(&self, request: &ChatRequest) -> Result<ChatResponse, PipelineError>;
}

impl<T: Transport + ?Sized> Transport for Arc<T> {
    fn send(&self, request: &ChatRequest) -> Result<ChatResponse, PipelineError> {
        (**self).send(request)
    }
}

/// Blocking HTTP POST with optional bearer auth.
pub struct HttpTransport {
    agent: ureq::Agent,
    url: String,
    api_key: Option<String>,
}

impl HttpTransport {
    pub fn new(url: impl Into<String>, api_key: Option<String>, timeout: Duration) -> Self {
        HttpTransport {
            agent: ureq::AgentBuilder::new().timeout(timeout).build(),
            url: url.into(),
            api_key,
        }
    }
}

fn status_retriable(code: u16) -> bool {
    code == 408 || code == 429 || code >= 500
}

impl Transport for HttpTransport {
    fn send(&self, request: &ChatRequest) -> Result<ChatResponse, PipelineError> {
        let mut req = self.agent.post(&self.url);
        if let Some(key) = &self.api_key {
            req = req.set("Authorization", &format!("Bearer {key}"));
        }
        let response = match req.send_json(request) {
            Ok(r) => r,
            Err(ureq::Error::Status(code, r)) => {
                let body = r.into_string().unwrap_or_default();
                return Err(PipelineError::Transport {
                    message: format!("HTTP {code}: {body}"),
                    status: Some(code),
                    retriable: status_retriable(code),
                });
            }
            Err(ureq::Error::Transport(t)) => {
                return Err(PipelineError::Transport {
                    message: t.to_string(),
                    status: None,
                    retriable: true,
                })
            }
        };
        let body = response
            .into_string()
            .map_err(|e| PipelineError::Transport {
                message: format!("reading body: {e}"),
                status: None,
                retriable: true,
            })?;
        serde_json::from_str(&body).map_err(|e| PipelineError::Parse {
            reason: format!("response body is not a chat completion: {e}"),
            raw: body,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct JudgeSettings {
    pub model: String,
    pub temperature: f64,
    pub max_tokens: u32,
}

impl Default for JudgeSettings {
    fn default() -> Self {
        JudgeSettings {
            model: String::new(),
            temperature: 0.0,
            max_tokens: 2048,
        }
    }
}

/// Shared by the remote extractor and checker.
pub struct JudgeClient {
    transport: Arc<dyn Transport>,
    settings: JudgeSettings,
    cache: Option<CacheStore>,
    retry: RetryPolicy,
}

impl JudgeClient {
    pub fn new(transport: Arc<dyn Transport>, settings: JudgeSettings) -> Self {
        JudgeClient {
            transport,
            settings,
            cache: None,
            retry: RetryPolicy::default(),
        }
    }

    pub fn with_cache(mut self, cache: CacheStore) -> Self {
        self.cache = Some(cache);
        self
    }

    pub fn with_retry(mut self, retry: RetryPolicy) -> Self {
        self.retry = retry;
        self
    }

    pub fn settings(&self) -> &JudgeSettings {
        &self.settings
    }

    /// Cache lookup, then send with retries. `parse` turns completion text into
    /// a payload; only successfully parsed responses are cached.
    pub fn call(
        &self,
        role: JudgeRole,
        prompt: String,
        input: &str,
        reference: &str,
        parse: impl Fn(&str) -> Result<JudgePayload, PipelineError>,
    ) -> Result<JudgeResponse, PipelineError> {
        let digest = CacheKey {
            backend: role.cache_backend(),
            model: &self.settings.model,
            template_version: prompt::TEMPLATE_VERSION,
            input,
            reference,
        }
        .digest();
        if let Some(hit) = self.cache.as_ref().and_then(|c| c.get(&digest)) {
            if hit.role == role {
                return Ok(hit);
            }
        }
        let request = JudgeRequest {
            role,
            prompt,
            model: self.settings.model.clone(),
            temperature: self.settings.temperature,
            max_tokens: self.settings.max_tokens,
        };
        let chat = request.to_chat();
        let response = self.retry.run(|_| {
            let reply = self.transport.send(&chat)?;
            let raw = reply
                .choices
                .first()
                .map(|c| c.message.content.clone())
                .ok_or_else(|| PipelineError::Parse {
                    reason: "no choices".into(),
                    raw: String::new(),
                })?;
            let payload = parse(&raw)?;
            Ok(JudgeResponse {
                role,
                raw,
                payload,
                usage: reply.usage.unwrap_or_default(),
            })
        })?;
        if let Some(cache) = &self.cache {
            cache.put(&digest, &response)?;
        }
        Ok(response)
    }
}
