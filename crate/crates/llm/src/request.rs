use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Sampling temperature sent on every outbound call.
pub const TEMPERATURE: f64 = 0.0;

const KEY_DOMAIN: &[u8] = b"topicscope-llm/v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    System,
    User,
    Assistant,
}

impl Role {
    pub fn as_str(self) -> &'static str {
        match self {
            Role::System => "system",
            Role::User => "user",
            Role::Assistant => "assistant",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Turn {
    pub role: Role,
    pub content: String,
}

impl Turn {
    pub fn user(content: impl Into<String>) -> Self {
        Self { role: Role::User, content: content.into() }
    }

    pub fn assistant(content: impl Into<String>) -> Self {
        Self { role: Role::Assistant, content: content.into() }
    }
}

/// One chat-completions call. `provider` is the base endpoint URL.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LlmRequest {
    pub provider: String,
    pub model: String,
    pub system: Option<String>,
    pub history: Vec<Turn>,
    pub user: String,
    pub max_tokens: u32,
}

#[derive(Serialize)]
struct WireMessage<'a> {
    role: &'static str,
    content: &'a str,
}

#[derive(Serialize)]
struct WireBody<'a> {
    model: &'a str,
    messages: Vec<WireMessage<'a>>,
    temperature: f64,
    max_tokens: u32,
}

impl LlmRequest {
    /// Messages in send order: system, replayed history, then the user text.
    pub fn messages(&self) -> Vec<(Role, &str)> {
        let mut out = Vec::with_capacity(self.history.len() + 2);
        if let Some(sys) = &self.system {
            out.push((Role::System, sys.as_str()));
        }
        out.extend(self.history.iter().map(|t| (t.role, t.content.as_str())));
        out.push((Role::User, self.user.as_str()));
        out
    }

    /// The OpenAI-compatible request body.
    pub fn wire_body(&self) -> serde_json::Value {
        let body = WireBody {
            model: &self.model,
            messages: self
                .messages()
                .into_iter()
                .map(|(role, content)| WireMessage { role: role.as_str(), content })
                .collect(),
            temperature: TEMPERATURE,
            max_tokens: self.max_tokens,
        };
        serde_json::to_value(body).expect("wire body is always serializable")
    }

    /// Canonical bytes hashed by [`cache_key`].
    pub fn canonical_bytes(&self) -> Vec<u8> {
        fn field(out: &mut Vec<u8>, bytes: &[u8]) {
            out.extend_from_slice(&(bytes.len() as u64).to_le_bytes());
            out.extend_from_slice(bytes);
        }
        let mut out = Vec::new();
        field(&mut out, KEY_DOMAIN);
        field(&mut out, self.provider.as_bytes());
        field(&mut out, self.model.as_bytes());
        match &self.system {
            Some(s) => {
                out.push(1);
                field(&mut out, s.as_bytes());
            }
            None => out.push(0),
        }
        out.extend_from_slice(&(self.history.len() as u64).to_le_bytes());
        for turn in &self.history {
            field(&mut out, turn.role.as_str().as_bytes());
            field(&mut out, turn.content.as_bytes());
        }
        field(&mut out, self.user.as_bytes());
        out.extend_from_slice(&u64::from(self.max_tokens).to_le_bytes());
        out
    }
}

/// Lowercase hex SHA-256 of the canonical request serialization.
pub fn cache_key(req: &LlmRequest) -> String {
    hex::encode(Sha256::digest(req.canonical_bytes()))
}
