//! LLM bridge: prompt templates, a content-addressed on-disk response cache,
//! and an OpenAI-compatible chat-completions client.

pub mod cache;
pub mod client;
pub mod error;
pub mod prompts;
pub mod provider;
pub mod request;
pub mod stub;

pub use cache::{CacheEntry, DiskCache};
pub use client::{first_line, Completion, GroundedSession, LlmClient, LlmSettings};
pub use error::LlmError;
pub use prompts::{ContextBudget, KeywordTrajectory, REFUSAL_SENTINEL};
pub use provider::{ChatProvider, OpenAiCompatible, ProviderSettings};
pub use request::{cache_key, LlmRequest, Role, Turn, TEMPERATURE};
pub use stub::{StubBehavior, StubServer};
