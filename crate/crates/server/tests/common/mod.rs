#![allow(dead_code)]

use std::fs;
use std::path::Path;
use std::sync::Arc;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use embedfair_core::pipeline::{precompute, Artifact, DatasetManifest};
use embedfair_server::{router, AppState, Dataset};
use http_body_util::BodyExt;
use tower::ServiceExt;

/// Writes `files` into `dir` and precomputes the manifest among them.
pub fn build(dir: &Path, files: &[(&str, &str)], manifest: &str) -> Artifact {
    for (name, text) in files {
        fs::write(dir.join(name), text).unwrap();
    }
    fs::write(dir.join("manifest.json"), manifest).unwrap();
    let (m, base) = DatasetManifest::load(&dir.join("manifest.json")).unwrap();
    precompute(&m, &base).unwrap()
}

/// Star with center "c" and leaves "l1".."l4", plus the three-node
/// recommendation fixture as a second dataset.
pub fn fixtures(dir: &Path) -> Vec<Artifact> {
    let star = build(
        dir,
        &[
            ("star.txt", "c l1\nc l2\nc l3\nc l4\n"),
            ("star.emb", "c 0 0\nl1 1 0\nl2 0 1\nl3 -1 0\nl4 0 -3\n"),
            ("star.csv", "id,side\nc,x\nl1,x\nl2,y\nl3,y\nl4,x\n"),
        ],
        r#"{"id": "star", "name": "Star", "graph": "star.txt",
            "embeddings": [{"name": "e", "path": "star.emb"}],
            "attributes": [{"name": "side", "path": "star.csv"}],
            "individual_k": [1, 2], "group_k": [1, 2], "layout_iterations": 40}"#,
    );
    let trio = build(
        dir,
        &[
            ("trio.txt", "A\nB\nC\n"),
            ("trio.emb", "A 1 0\nB 0.9 0.1\nC 0.5 0.5\n"),
            ("trio.csv", "id,group\nA,g1\nB,g1\nC,g2\n"),
        ],
        r#"{"id": "trio", "graph": "trio.txt",
            "embeddings": [{"name": "e", "path": "trio.emb"}],
            "attributes": [{"name": "group", "path": "trio.csv"}],
            "individual_k": [1], "group_k": [1, 2]}"#,
    );
    vec![star, trio]
}

pub fn app(artifacts: Vec<Artifact>) -> Router {
    let datasets = artifacts
        .into_iter()
        .map(|a| Dataset::from_artifact(a, "memory".into()).unwrap());
    router(Arc::new(AppState::new(datasets).unwrap()), None)
}

pub async fn get(app: &Router, uri: &str) -> (StatusCode, Vec<u8>) {
    let response = app
        .clone()
        .oneshot(Request::builder().uri(uri).body(Body::empty()).unwrap())
        .await
        .unwrap();
    let status = response.status();
    let body = response.into_body().collect().await.unwrap().to_bytes().to_vec();
    (status, body)
}

pub async fn get_json(app: &Router, uri: &str) -> (StatusCode, serde_json::Value) {
    let (status, body) = get(app, uri).await;
    (status, serde_json::from_slice(&body).unwrap_or(serde_json::Value::Null))
}
