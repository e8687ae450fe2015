//! Read-only HTTP API over precomputed dataset artifacts.
//!
//! Every `*.json` artifact in a directory is loaded once at startup and kept
//! in memory. Handlers only read that state; diagnostic bundles are assembled
//! per request from the stored graph, projection, and recommendation lists.

mod api;
mod diagnose;
mod state;

use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use axum::http::Method;
use axum::Router;
use tower_http::cors::{Any, CorsLayer};
use tower_http::services::ServeDir;

pub use api::{
    ApiError, AttributeDescriptor, DatasetDescriptor, EmbeddingDescriptor, ErrorBody, Overview, ScoreRow,
    ScoresResponse,
};
pub use diagnose::{diagnostic_bundle, Annotation, BundleNode, DiagnosticBundle};
pub use state::{AppState, Dataset, LoadError};

/// The API routes plus, when `static_dir` is given, the UI bundle at `/`.
pub fn router(state: Arc<AppState>, static_dir: Option<&Path>) -> Router {
    let cors = CorsLayer::new().allow_origin(Any).allow_methods([Method::GET]);
    let mut app = api::routes().with_state(state);
    app = match static_dir {
        Some(dir) => app.fallback_service(ServeDir::new(dir)),
        None => app.fallback(api::fallback),
    };
    app.layer(cors)
}

#[derive(Debug, Clone)]
pub struct ServeOptions {
    pub listen: SocketAddr,
    pub artifacts: PathBuf,
    pub static_dir: Option<PathBuf>,
}

/// Loads the artifacts and serves until Ctrl-C.
pub async fn serve(options: ServeOptions) -> Result<(), LoadError> {
    let state = Arc::new(AppState::load_dir(&options.artifacts)?);
    log::info!("loaded {} datasets from {}", state.len(), options.artifacts.display());
    serve_state(state, options.listen, options.static_dir.as_deref()).await
}

/// Serves already-loaded state until Ctrl-C.
pub async fn serve_state(state: Arc<AppState>, listen: SocketAddr, static_dir: Option<&Path>) -> Result<(), LoadError> {
    let app = router(state, static_dir);
    let bind = |e| LoadError::Bind(listen, e);
    let listener = tokio::net::TcpListener::bind(listen).await.map_err(bind)?;
    log::info!("listening on http://{}", listener.local_addr().map_err(bind)?);
    axum::serve(listener, app)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
        .map_err(bind)
}
