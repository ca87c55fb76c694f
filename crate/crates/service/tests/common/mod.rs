#![allow(dead_code)]

use std::path::{Path, PathBuf};

use axum::body::Body;
use axum::http::{Method, Request, StatusCode};
use axum::Router;
use chrono::{TimeZone, Utc};
use http_body_util::BodyExt;
use serde_json::Value;
use teaming_service::{admin, router, AppState, CorpusPaths, FixedClock, ServiceSettings};
use teaming_store::Store;
use tower::ServiceExt;

pub fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

pub fn settings() -> ServiceSettings {
    let dir = fixtures();
    ServiceSettings {
        corpus: CorpusPaths {
            calls: dir.join("calls.txt"),
            roster: dir.join("roster.csv"),
            awards: Some(dir.join("awards.xml")),
        },
        ..Default::default()
    }
}

pub fn clock() -> FixedClock {
    FixedClock(Utc.with_ymd_and_hms(2015, 1, 1, 12, 0, 0).unwrap())
}

pub fn empty_state(root: &Path) -> AppState {
    let store = Store::open(root).expect("open store");
    AppState::new(store, settings(), clock())
}

/// A store loaded from the fixture corpus with recommendations built.
pub fn fixture_state(root: &Path) -> AppState {
    let state = empty_state(root);
    admin::run_ingest(&state).expect("ingest");
    admin::run_reindex(&state).expect("reindex");
    state
}

pub struct Client {
    app: Router,
}

impl Client {
    pub fn new(state: AppState) -> Self {
        Client { app: router(state) }
    }

    pub async fn send(&self, method: Method, uri: &str, admin: bool, body: Option<Value>) -> (StatusCode, Value) {
        let mut req = Request::builder().method(method).uri(uri);
        if admin {
            req = req.header("x-role", "admin");
        }
        let req = match body {
            Some(v) => req.header("content-type", "application/json").body(Body::from(v.to_string())),
            None => req.body(Body::empty()),
        }
        .unwrap();
        let resp = self.app.clone().oneshot(req).await.unwrap();
        let status = resp.status();
        let bytes = resp.into_body().collect().await.unwrap().to_bytes();
        let json = if bytes.is_empty() { Value::Null } else { serde_json::from_slice(&bytes).unwrap_or(Value::Null) };
        (status, json)
    }

    pub async fn get(&self, uri: &str) -> (StatusCode, Value) {
        self.send(Method::GET, uri, false, None).await
    }

    pub async fn post(&self, uri: &str, body: Value) -> (StatusCode, Value) {
        self.send(Method::POST, uri, false, Some(body)).await
    }

    pub async fn admin(&self, uri: &str) -> (StatusCode, Value) {
        self.send(Method::POST, uri, true, None).await
    }
}
