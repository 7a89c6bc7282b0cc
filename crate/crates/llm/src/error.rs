use thiserror::Error;

#[derive(Debug, Error)]
pub enum LlmError {
    #[error("provider returned HTTP {status}: {message}")]
    Provider { status: u16, message: String },
    #[error("provider did not answer within {secs}s")]
    Timeout { secs: u64 },
    #[error("transport failure: {0}")]
    Transport(String),
    #[error("provider returned an empty response")]
    EmptyResponse,
    #[error("document {doc} needs {chars} characters, over the {budget}-character context budget")]
    ContextOverflow { doc: usize, chars: usize, budget: usize },
    #[error("at least one context document is required")]
    NoContext,
    #[error("keyword trajectory has no rows")]
    EmptyTrajectory,
    #[error(transparent)]
    Model(#[from] topicscope_core::model::ModelError),
    #[error("response cache: {0}")]
    Cache(#[from] std::io::Error),
}

impl LlmError {
    /// Stable machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            LlmError::Provider { .. } => "llm_provider_error",
            LlmError::Timeout { .. } => "llm_timeout",
            LlmError::Transport(_) => "llm_transport_error",
            LlmError::EmptyResponse => "llm_empty_response",
            LlmError::ContextOverflow { .. } => "context_overflow",
            LlmError::NoContext => "no_context",
            LlmError::EmptyTrajectory => "empty_trajectory",
            LlmError::Model(_) => "model_error",
            LlmError::Cache(_) => "llm_cache_error",
        }
    }

    /// Whether the failure came from the remote provider.
    pub fn is_upstream(&self) -> bool {
        matches!(
            self,
            LlmError::Provider { .. } | LlmError::Timeout { .. } | LlmError::Transport(_) | LlmError::EmptyResponse
        )
    }
}
