use std::path::PathBuf;

use axum::extract::rejection::{JsonRejection, PathRejection, QueryRejection};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use serde::Serialize;
use thiserror::Error;
use topicscope_core::corpus::IngestError;
use topicscope_core::metrics::MetricsError;
use topicscope_core::model::ModelError;
use topicscope_core::retrieval::RetrievalError;
use topicscope_llm::LlmError;

/// A handler failure: HTTP status plus a `{"error": {"code", "message"}}` body.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApiError {
    pub status: StatusCode,
    pub code: &'static str,
    pub message: String,
}

#[derive(Serialize)]
struct ErrorBody<'a> {
    error: ErrorDetail<'a>,
}

#[derive(Serialize)]
struct ErrorDetail<'a> {
    code: &'a str,
    message: &'a str,
}

impl ApiError {
    pub fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        Self { status, code, message: message.into() }
    }

    pub fn bad_request(message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, "invalid_parameter", message)
    }

    pub fn not_found(code: &'static str, message: impl Into<String>) -> Self {
        Self::new(StatusCode::NOT_FOUND, code, message)
    }

    pub fn internal(message: impl Into<String>) -> Self {
        Self::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", message)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = ErrorBody { error: ErrorDetail { code: self.code, message: &self.message } };
        (self.status, Json(body)).into_response()
    }
}

impl From<LlmError> for ApiError {
    fn from(e: LlmError) -> Self {
        let status = if e.is_upstream() {
            StatusCode::BAD_GATEWAY
        } else {
            match e {
                LlmError::NoContext | LlmError::ContextOverflow { .. } | LlmError::EmptyTrajectory => {
                    StatusCode::BAD_REQUEST
                }
                _ => StatusCode::INTERNAL_SERVER_ERROR,
            }
        };
        Self::new(status, e.code(), e.to_string())
    }
}

impl From<RetrievalError> for ApiError {
    fn from(e: RetrievalError) -> Self {
        match e {
            RetrievalError::IndexOutOfRange { .. } => Self::not_found("unknown_time", e.to_string()),
            RetrievalError::InvalidParameter(_) | RetrievalError::UnknownDocument(_) => Self::bad_request(e.to_string()),
            _ => Self::internal(e.to_string()),
        }
    }
}

impl From<ModelError> for ApiError {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::IndexOutOfRange { what: "topic", .. } => Self::not_found("unknown_topic", e.to_string()),
            ModelError::IndexOutOfRange { what: "time", .. } => Self::not_found("unknown_time", e.to_string()),
            ModelError::IndexOutOfRange { .. } => Self::bad_request(e.to_string()),
            _ => Self::internal(e.to_string()),
        }
    }
}

impl From<QueryRejection> for ApiError {
    fn from(e: QueryRejection) -> Self {
        Self::bad_request(e.body_text())
    }
}

impl From<JsonRejection> for ApiError {
    fn from(e: JsonRejection) -> Self {
        Self::bad_request(e.body_text())
    }
}

impl From<PathRejection> for ApiError {
    fn from(e: PathRejection) -> Self {
        Self::bad_request(e.body_text())
    }
}

/// Why the service refused to start.
#[derive(Debug, Error)]
pub enum StartupError {
    #[error("startup validation failed: corpus: {0}")]
    Corpus(#[from] IngestError),
    #[error("startup validation failed: model: {0}")]
    Model(#[from] ModelError),
    #[error("startup validation failed: {0}")]
    Mismatch(String),
    #[error("startup validation failed: index: {0}")]
    Index(#[from] RetrievalError),
    #[error("startup validation failed: metrics: {0}")]
    Metrics(#[from] MetricsError),
    #[error("llm client: {0}")]
    Llm(#[from] LlmError),
    #[error("missing directory {0}")]
    MissingDir(PathBuf),
    #[error("cannot bind {addr}: {source}")]
    Bind { addr: String, source: std::io::Error },
}
