use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::cache::DiskCache;
use crate::error::LlmError;
use crate::prompts::{self, ContextBudget, KeywordTrajectory};
use crate::provider::{ChatProvider, OpenAiCompatible, ProviderSettings};
use crate::request::{cache_key, LlmRequest, Turn};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LlmSettings {
    pub provider: ProviderSettings,
    pub budget: ContextBudget,
    pub label_max_tokens: u32,
    pub summary_max_tokens: u32,
    pub chat_max_tokens: u32,
}

impl Default for LlmSettings {
    fn default() -> Self {
        Self {
            provider: ProviderSettings::default(),
            budget: ContextBudget::default(),
            label_max_tokens: 32,
            summary_max_tokens: 512,
            chat_max_tokens: 512,
        }
    }
}

/// Retrieved documents, their summary and the chat so far.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroundedSession {
    pub id: String,
    pub context_docs: Vec<String>,
    pub summary: Option<String>,
    pub history: Vec<Turn>,
}

impl GroundedSession {
    pub fn new(id: impl Into<String>, context_docs: Vec<String>) -> Self {
        Self { id: id.into(), context_docs, summary: None, history: Vec::new() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Completion {
    pub text: String,
    pub key: String,
    pub cached: bool,
}

/// Cached, single-flight access to a chat provider.
#[derive(Clone)]
pub struct LlmClient {
    provider: Arc<dyn ChatProvider>,
    cache: Arc<DiskCache>,
    settings: LlmSettings,
}

impl std::fmt::Debug for LlmClient {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("LlmClient").field("cache", &self.cache.root()).field("settings", &self.settings).finish()
    }
}

/// First non-empty line of a label response, trimmed.
pub fn first_line(text: &str) -> Option<&str> {
    text.lines().map(str::trim).find(|l| !l.is_empty())
}

impl LlmClient {
    pub fn new(provider: Arc<dyn ChatProvider>, cache: Arc<DiskCache>, settings: LlmSettings) -> Self {
        Self { provider, cache, settings }
    }

    /// An OpenAI-compatible client with its cache under `<cache_base>/llm`.
    pub fn open(settings: LlmSettings, cache_base: &Path) -> Result<Self, LlmError> {
        let provider = Arc::new(OpenAiCompatible::new(&settings.provider)?);
        let cache = Arc::new(DiskCache::open(cache_base.join("llm"))?);
        Ok(Self::new(provider, cache, settings))
    }

    pub fn cache(&self) -> &DiskCache {
        &self.cache
    }

    pub fn settings(&self) -> &LlmSettings {
        &self.settings
    }

    fn request(&self, system: Option<String>, history: Vec<Turn>, user: String, max_tokens: u32) -> LlmRequest {
        LlmRequest {
            provider: self.settings.provider.base_url.clone(),
            model: self.settings.provider.model.clone(),
            system,
            history,
            user,
            max_tokens,
        }
    }

    /// Answers from the cache when possible, otherwise makes one provider call.
    pub async fn complete(&self, req: &LlmRequest) -> Result<Completion, LlmError> {
        let key = cache_key(req);
        let (text, cached) = self
            .cache
            .get_or_fetch(&key, &req.model, || self.provider.complete(req))
            .await?;
        Ok(Completion { text, key, cached })
    }

    pub fn label_request(&self, traj: &KeywordTrajectory) -> Result<LlmRequest, LlmError> {
        let user = prompts::label_prompt(traj)?;
        Ok(self.request(None, Vec::new(), user, self.settings.label_max_tokens))
    }

    pub async fn label_topic(&self, traj: &KeywordTrajectory) -> Result<String, LlmError> {
        let done = self.complete(&self.label_request(traj)?).await?;
        first_line(&done.text).map(str::to_string).ok_or(LlmError::EmptyResponse)
    }

    /// The stored label for `traj`, without calling the provider.
    pub fn cached_label(&self, traj: &KeywordTrajectory) -> Result<Option<String>, LlmError> {
        let key = cache_key(&self.label_request(traj)?);
        Ok(self.cache.get(&key)?.and_then(|e| first_line(&e.value).map(str::to_string)))
    }

    pub fn summary_request(&self, docs: &[String], words: &[String], timestamp: &str) -> Result<LlmRequest, LlmError> {
        let context = prompts::render_context(docs, self.settings.budget)?;
        let user = prompts::summary_prompt(&context, words, timestamp);
        Ok(self.request(None, Vec::new(), user, self.settings.summary_max_tokens))
    }

    pub async fn summarize(&self, docs: &[String], words: &[String], timestamp: &str) -> Result<String, LlmError> {
        let done = self.complete(&self.summary_request(docs, words, timestamp)?).await?;
        Ok(done.text.trim().to_string())
    }

    pub fn chat_request(&self, session: &GroundedSession, question: &str) -> Result<LlmRequest, LlmError> {
        let context = prompts::render_context(&session.context_docs, self.settings.budget)?;
        let system = prompts::chat_system_prompt(&context, question);
        Ok(self.request(Some(system), session.history.clone(), question.to_string(), self.settings.chat_max_tokens))
    }

    /// Replays the session history, appends the question and the reply.
    pub async fn chat_reply(&self, session: &mut GroundedSession, question: &str) -> Result<String, LlmError> {
        let done = self.complete(&self.chat_request(session, question)?).await?;
        let reply = done.text.trim().to_string();
        session.history.push(Turn::user(question));
        session.history.push(Turn::assistant(reply.clone()));
        Ok(reply)
    }
}
