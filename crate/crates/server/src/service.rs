//! Axum routes over a shared, read-only pipeline.
//!
//! The listener comes up before the models finish loading; until then
//! `/api/health` reports `degraded` and `/api/disambiguate` answers 503.

use std::collections::BTreeMap;
use std::sync::{Arc, OnceLock};

use axum::body::Bytes;
use axum::extract::State;
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::Router;
use morphdis_core::{Dialect, Error, Pipeline};
use serde::Serialize;

use crate::api::{ApiError, ApiRequest, ApiResponse, DialectInfo, Health};
use crate::config::ServiceConfig;

#[derive(Default)]
pub struct AppState {
    pipeline: OnceLock<Pipeline>,
}

impl AppState {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn loaded(pipeline: Pipeline) -> Self {
        let state = Self::new();
        state.install(pipeline);
        state
    }

    /// Sets the pipeline once; later calls are ignored.
    pub fn install(&self, pipeline: Pipeline) {
        let _ = self.pipeline.set(pipeline);
    }

    pub fn pipeline(&self) -> Option<&Pipeline> {
        self.pipeline.get()
    }
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/api/disambiguate", post(disambiguate))
        .route("/api/dialects", get(dialects))
        .route("/api/health", get(health))
        .with_state(state)
}

fn json(status: StatusCode, body: &impl Serialize) -> Response {
    let bytes = serde_json::to_vec(body).expect("response types serialize");
    (status, [(header::CONTENT_TYPE, "application/json")], bytes).into_response()
}

fn error(status: StatusCode, msg: impl Into<String>) -> Response {
    json(status, &ApiError { error: msg.into() })
}

/// Handles a raw body so that every malformed request gets a JSON 400.
pub async fn disambiguate(State(state): State<Arc<AppState>>, body: Bytes) -> Response {
    let request: ApiRequest = match serde_json::from_slice(&body) {
        Ok(r) => r,
        Err(e) => return error(StatusCode::BAD_REQUEST, format!("malformed request: {e}")),
    };
    let choice = match request.validate() {
        Ok(c) => c,
        Err(msg) => return error(StatusCode::BAD_REQUEST, msg),
    };
    let Some(pipeline) = state.pipeline() else {
        return error(StatusCode::SERVICE_UNAVAILABLE, "models are still loading");
    };
    match pipeline.process(&request.text, choice) {
        Ok(result) => json(StatusCode::OK, &ApiResponse::from(&result)),
        Err(e @ (Error::EmptyInput | Error::InvalidInput(_))) => error(StatusCode::BAD_REQUEST, e.to_string()),
        Err(e @ (Error::DialectNotLoaded(_) | Error::UntrainedModel)) => {
            error(StatusCode::SERVICE_UNAVAILABLE, e.to_string())
        }
        Err(e) => error(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()),
    }
}

pub async fn dialects(State(state): State<Arc<AppState>>) -> Response {
    let list: Vec<DialectInfo> = state
        .pipeline()
        .map(|p| {
            p.registry()
                .dialects()
                .map(|d| DialectInfo {
                    id: d,
                    display_name: d.display_name(),
                    supports_diacritization: p.registry().get(d).unwrap().db.supports_diacritization,
                })
                .collect()
        })
        .unwrap_or_default();
    json(StatusCode::OK, &list)
}

pub async fn health(State(state): State<Arc<AppState>>) -> Response {
    let pipeline = state.pipeline();
    let mut models_loaded: BTreeMap<String, bool> = Dialect::ALL
        .iter()
        .map(|d| {
            (
                d.id().to_string(),
                pipeline.is_some_and(|p| p.registry().get(*d).is_some()),
            )
        })
        .collect();
    models_loaded.insert("did".into(), pipeline.is_some_and(Pipeline::has_identifier));
    let status = if models_loaded.values().all(|v| *v) {
        "ok"
    } else {
        "degraded"
    };
    json(StatusCode::OK, &Health { status, models_loaded })
}

/// Binds, then loads the models in the background and serves until the
/// process ends. A failed load leaves the service degraded.
pub async fn serve(config: ServiceConfig) -> anyhow::Result<()> {
    let listener = tokio::net::TcpListener::bind((config.bind.as_str(), config.port)).await?;
    eprintln!("listening on {}", listener.local_addr()?);
    let state = Arc::new(AppState::new());
    let loader = state.clone();
    tokio::task::spawn_blocking(move || match config.load_pipeline() {
        Ok(p) => {
            loader.install(p);
            eprintln!("models loaded");
        }
        Err(e) => eprintln!("error: {e:#}"),
    });
    axum::serve(listener, router(state)).await?;
    Ok(())
}
