//! HTTP/JSON service exposing corpus, tensor, quality metrics, saliency,
//! retrieval, labeling, summarization and grounded chat.

use std::future::Future;
use std::net::SocketAddr;
use std::sync::Arc;

use axum::http::{HeaderValue, Method};
use axum::routing::{get, post};
use axum::Router;
use tokio::net::TcpListener;
use tower_http::cors::{AllowOrigin, Any, CorsLayer};
use tower_http::services::ServeDir;

pub mod api;
pub mod error;
pub mod schema;
pub mod sessions;
pub mod state;

pub use error::{ApiError, StartupError};
pub use sessions::SessionStore;
pub use state::{AppState, ServiceConfig, SharedState};

fn cors(origins: &[String]) -> CorsLayer {
    let layer = CorsLayer::new().allow_methods([Method::GET, Method::POST]).allow_headers(Any);
    if origins.is_empty() {
        return layer.allow_origin(Any);
    }
    let list: Vec<HeaderValue> = origins.iter().filter_map(|o| HeaderValue::from_str(o).ok()).collect();
    layer.allow_origin(AllowOrigin::list(list))
}

pub fn router(state: SharedState) -> Router {
    let api = Router::new()
        .route("/api/meta", get(api::meta))
        .route("/api/topics", get(api::topics))
        .route("/api/topics/{k}/label", post(api::label))
        .route("/api/topics/{k}/salient", get(api::salient))
        .route("/api/topics/{k}/trend", get(api::trend))
        .route("/api/metrics", get(api::metrics))
        .route("/api/retrieve", get(api::retrieve))
        .route("/api/summarize", post(api::summarize))
        .route("/api/sessions", post(api::create_session))
        .route("/api/sessions/{id}/chat", post(api::chat));
    let api = match &state.config.static_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api,
    };
    api.layer(cors(&state.config.cors_origins)).with_state(state)
}

/// A listening service that has not started accepting yet.
#[derive(Debug)]
pub struct BoundService {
    listener: TcpListener,
    state: SharedState,
}

impl BoundService {
    /// Validates artifacts, optionally pre-labels, then binds `addr`.
    pub async fn bind(state: AppState) -> Result<Self, StartupError> {
        let addr = state.config.addr;
        if state.config.prelabel {
            let n = state.prelabel().await;
            tracing::info!(labeled = n, "pre-labeling done");
        }
        let listener = TcpListener::bind(addr)
            .await
            .map_err(|source| StartupError::Bind { addr: addr.to_string(), source })?;
        Ok(Self { listener, state: Arc::new(state) })
    }

    pub fn local_addr(&self) -> std::io::Result<SocketAddr> {
        self.listener.local_addr()
    }

    pub fn state(&self) -> &SharedState {
        &self.state
    }

    /// Serves until `shutdown` resolves, then drains in-flight requests.
    pub async fn run(self, shutdown: impl Future<Output = ()> + Send + 'static) -> std::io::Result<()> {
        axum::serve(self.listener, router(self.state)).with_graceful_shutdown(shutdown).await
    }
}

/// Loads the artifacts named in `config` and serves until `shutdown`.
pub async fn serve(config: ServiceConfig, shutdown: impl Future<Output = ()> + Send + 'static) -> Result<(), StartupError> {
    let state = AppState::load(config)?;
    let bound = BoundService::bind(state).await?;
    let addr = bound.local_addr().map_err(|source| StartupError::Bind { addr: "?".into(), source })?;
    tracing::info!(%addr, "listening");
    bound.run(shutdown).await.map_err(|source| StartupError::Bind { addr: addr.to_string(), source })
}
