//! HTTP service and configuration for the morphdis engine.

pub mod api;
pub mod config;
pub mod service;

pub use config::ServiceConfig;
pub use service::{router, AppState};
