use serde_json::json;
use thiserror::Error;
use topicscope_core::corpus::IngestError;
use topicscope_core::metrics::MetricsError;
use topicscope_core::model::ModelError;
use topicscope_core::retrieval::RetrievalError;
use topicscope_llm::LlmError;
use topicscope_service::StartupError;

/// A domain failure; maps to exit code 1.
#[derive(Debug, Error)]
#[error("{message}")]
pub struct CliError {
    pub code: &'static str,
    pub message: String,
}

impl CliError {
    pub fn new(code: &'static str, message: impl Into<String>) -> Self {
        Self { code, message: message.into() }
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({"error": {"code": self.code, "message": self.message}})
    }
}

fn model_kind(e: &ModelError) -> (&'static str, &'static str) {
    match e {
        ModelError::ShapeMismatch { .. } => ("shape_mismatch", "ShapeMismatch"),
        ModelError::NotADistribution { .. } => ("not_a_distribution", "NotADistribution"),
        ModelError::VocabMismatch { .. } => ("vocab_mismatch", "VocabMismatch"),
        ModelError::TimestampMismatch { .. } => ("timestamp_mismatch", "TimestampMismatch"),
        ModelError::ChecksumMismatch(_) => ("checksum_mismatch", "ChecksumMismatch"),
        ModelError::IndexOutOfRange { .. } => ("index_out_of_range", "IndexOutOfRange"),
        ModelError::InvalidMeta(_) => ("invalid_meta", "InvalidMeta"),
        ModelError::MissingFile(_) => ("missing_file", "MissingFile"),
        _ => ("model_error", "ModelError"),
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        let (code, kind) = model_kind(&e);
        Self::new(code, format!("{kind}: {e}"))
    }
}

impl From<IngestError> for CliError {
    fn from(e: IngestError) -> Self {
        Self::new("ingest_error", e.to_string())
    }
}

impl From<MetricsError> for CliError {
    fn from(e: MetricsError) -> Self {
        match e {
            MetricsError::Model(m) => m.into(),
            other => Self::new("metrics_error", other.to_string()),
        }
    }
}

impl From<RetrievalError> for CliError {
    fn from(e: RetrievalError) -> Self {
        Self::new("retrieval_error", e.to_string())
    }
}

impl From<LlmError> for CliError {
    fn from(e: LlmError) -> Self {
        Self::new(e.code(), e.to_string())
    }
}

impl From<StartupError> for CliError {
    fn from(e: StartupError) -> Self {
        match e {
            StartupError::Model(m) => {
                let (code, kind) = model_kind(&m);
                Self::new(code, format!("startup validation failed: {kind}: {m}"))
            }
            other => Self::new("startup_validation", other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::new("io_error", e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        Self::new("json_error", e.to_string())
    }
}
