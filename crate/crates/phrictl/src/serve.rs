//! Read-only HTTP service for an explorer bundle.

use std::net::SocketAddr;
use std::path::{Path, PathBuf};

use axum::body::Bytes;
use axum::http::header;
use axum::response::{Html, IntoResponse};
use axum::routing::get;
use axum::{Json, Router};
use serde_json::json;
use tower_http::services::ServeDir;

use crate::bundle::ExplorerBundle;
use crate::error::{CliError, CliResult};

const PLACEHOLDER_INDEX: &str = "<!doctype html>
<html><head><meta charset=\"utf-8\"><title>phrictl</title></head>
<body><p>The explorer assets are not installed. The bundle is available at
<a href=\"/api/bundle\">/api/bundle</a>.</p></body></html>
";

/// Routes over the bundle bytes exactly as they are on disk.
pub fn router(bundle: Bytes, assets: Option<&Path>) -> Router {
    let api = Router::new()
        .route(
            "/api/bundle",
            get(move || {
                let body = bundle.clone();
                async move { ([(header::CONTENT_TYPE, "application/json")], body) }
            }),
        )
        .route("/api/health", get(|| async { Json(json!({"status": "ok"})) }));
    match assets {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api.route("/", get(|| async { Html(PLACEHOLDER_INDEX).into_response() })),
    }
}

/// Validate the bundle, bind, print the address and serve until killed.
pub fn serve(bundle_path: &Path, port: u16, assets: Option<PathBuf>) -> CliResult<()> {
    let bytes = std::fs::read(bundle_path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => CliError::MissingArtifact(bundle_path.display().to_string()),
        _ => CliError::io(format!("reading {}", bundle_path.display()), e),
    })?;
    ExplorerBundle::from_slice(&bytes)?;
    if let Some(dir) = &assets {
        if !dir.is_dir() {
            return Err(CliError::MissingArtifact(dir.display().to_string()));
        }
    }
    let runtime = tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()
        .map_err(|e| CliError::io("starting runtime", e))?;
    runtime.block_on(async move {
        let addr = SocketAddr::from(([127, 0, 0, 1], port));
        let listener =
            tokio::net::TcpListener::bind(addr).await.map_err(|e| CliError::io(format!("binding {addr}"), e))?;
        let local = listener.local_addr().map_err(|e| CliError::io("reading bound address", e))?;
        println!("serving {} on http://{local}", bundle_path.display());
        let app = router(Bytes::from(bytes), assets.as_deref());
        axum::serve(listener, app).await.map_err(|e| CliError::io("serving", e))
    })
}
