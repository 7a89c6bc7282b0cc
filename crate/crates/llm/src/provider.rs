use std::time::Duration;

use async_trait::async_trait;
use serde::Deserialize;

use crate::error::LlmError;
use crate::request::LlmRequest;

/// Something that turns a request into response text.
#[async_trait]
pub trait ChatProvider: Send + Sync {
    async fn complete(&self, req: &LlmRequest) -> Result<String, LlmError>;
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProviderSettings {
    pub base_url: String,
    pub api_key: Option<String>,
    pub model: String,
    pub timeout: Duration,
}

impl Default for ProviderSettings {
    fn default() -> Self {
        Self {
            base_url: "https://api.openai.com/v1".into(),
            api_key: None,
            model: "gpt-4o-mini".into(),
            timeout: Duration::from_secs(60),
        }
    }
}

impl ProviderSettings {
    /// Reads `LLM_API_BASE`, `LLM_API_KEY`, `LLM_MODEL` and `LLM_TIMEOUT_SECS`
    /// over the defaults.
    pub fn from_env() -> Self {
        Self::from_lookup(|k| std::env::var(k).ok())
    }

    pub fn from_lookup(get: impl Fn(&str) -> Option<String>) -> Self {
        let mut s = Self::default();
        if let Some(v) = get("LLM_API_BASE").filter(|v| !v.is_empty()) {
            s.base_url = v;
        }
        s.api_key = get("LLM_API_KEY").filter(|v| !v.is_empty());
        if let Some(v) = get("LLM_MODEL").filter(|v| !v.is_empty()) {
            s.model = v;
        }
        if let Some(secs) = get("LLM_TIMEOUT_SECS").and_then(|v| v.trim().parse::<u64>().ok()) {
            s.timeout = Duration::from_secs(secs);
        }
        s
    }
}

/// Client for any OpenAI-style `POST {base}/chat/completions` endpoint.
#[derive(Debug, Clone)]
pub struct OpenAiCompatible {
    http: reqwest::Client,
    api_key: Option<String>,
    timeout: Duration,
}

#[derive(Deserialize)]
struct Completion {
    choices: Vec<Choice>,
}

#[derive(Deserialize)]
struct Choice {
    message: ChoiceMessage,
}

#[derive(Deserialize)]
struct ChoiceMessage {
    #[serde(default)]
    content: Option<String>,
}

impl OpenAiCompatible {
    pub fn new(settings: &ProviderSettings) -> Result<Self, LlmError> {
        let http = reqwest::Client::builder()
            .timeout(settings.timeout)
            .build()
            .map_err(|e| LlmError::Transport(e.to_string()))?;
        Ok(Self { http, api_key: settings.api_key.clone(), timeout: settings.timeout })
    }

    pub fn endpoint(base: &str) -> String {
        format!("{}/chat/completions", base.trim_end_matches('/'))
    }
}

#[async_trait]
impl ChatProvider for OpenAiCompatible {
    async fn complete(&self, req: &LlmRequest) -> Result<String, LlmError> {
        let mut call = self.http.post(Self::endpoint(&req.provider)).json(&req.wire_body());
        if let Some(key) = &self.api_key {
            call = call.bearer_auth(key);
        }
        let timeout = LlmError::Timeout { secs: self.timeout.as_secs() };
        let resp = call.send().await.map_err(|e| if e.is_timeout() { timeout } else { LlmError::Transport(e.to_string()) })?;
        let status = resp.status();
        if !status.is_success() {
            let message = resp.text().await.unwrap_or_default();
            return Err(LlmError::Provider { status: status.as_u16(), message });
        }
        let body: Completion = resp.json().await.map_err(|e| {
            if e.is_timeout() {
                LlmError::Timeout { secs: self.timeout.as_secs() }
            } else {
                LlmError::Transport(e.to_string())
            }
        })?;
        let text = body
            .choices
            .into_iter()
            .next()
            .and_then(|c| c.message.content)
            .unwrap_or_default();
        if text.trim().is_empty() {
            return Err(LlmError::EmptyResponse);
        }
        Ok(text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn env_overrides() {
        let s = ProviderSettings::from_lookup(|k| match k {
            "LLM_API_BASE" => Some("http://127.0.0.1:7/v1/".into()),
            "LLM_MODEL" => Some("stub".into()),
            "LLM_TIMEOUT_SECS" => Some("3".into()),
            _ => None,
        });
        assert_eq!(s.model, "stub");
        assert_eq!(s.timeout, Duration::from_secs(3));
        assert_eq!(s.api_key, None);
        assert_eq!(OpenAiCompatible::endpoint(&s.base_url), "http://127.0.0.1:7/v1/chat/completions");
    }
}
