#![allow(dead_code)]

use std::path::PathBuf;
use std::sync::Arc;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use http_body_util::BodyExt;
use morphdis_server::{router, AppState, ServiceConfig};
use tower::ServiceExt;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/fixtures")
        .join(name)
}

pub fn loaded_state() -> Arc<AppState> {
    let config = ServiceConfig::load(&fixture("service.toml")).unwrap();
    Arc::new(AppState::loaded(config.load_pipeline().unwrap()))
}

pub async fn call(state: &Arc<AppState>, request: Request<Body>) -> (StatusCode, Vec<u8>) {
    let response = router(state.clone()).oneshot(request).await.unwrap();
    let status = response.status();
    let body = response.into_body().collect().await.unwrap().to_bytes().to_vec();
    (status, body)
}

pub async fn get(state: &Arc<AppState>, path: &str) -> (StatusCode, Vec<u8>) {
    call(state, Request::get(path).body(Body::empty()).unwrap()).await
}

pub async fn post(state: &Arc<AppState>, body: &str) -> (StatusCode, Vec<u8>) {
    let request = Request::post("/api/disambiguate")
        .header("content-type", "application/json")
        .body(Body::from(body.to_string()))
        .unwrap();
    call(state, request).await
}

pub fn json(bytes: &[u8]) -> serde_json::Value {
    serde_json::from_slice(bytes).unwrap()
}
