use std::collections::BTreeMap;
use std::fmt::Display;
use std::sync::Arc;

use axum::extract::rejection::QueryRejection;
use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::{Json, Router};
use serde::{Deserialize, Serialize};

use embedfair_core::pipeline::artifact::ScoreView;
use embedfair_core::pipeline::EmbeddingArtifact;
use embedfair_core::{FairnessConfig, SummaryReport};

use crate::diagnose::{diagnostic_bundle, DiagnosticBundle};
use crate::state::{AppState, Dataset};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub status: u16,
    pub error: String,
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    message: String,
}

impl ApiError {
    pub fn status(&self) -> StatusCode {
        self.status
    }

    pub fn message(&self) -> &str {
        &self.message
    }

    pub(crate) fn not_found(message: impl Into<String>) -> Self {
        ApiError {
            status: StatusCode::NOT_FOUND,
            message: message.into(),
        }
    }

    pub(crate) fn bad_request(message: impl Into<String>) -> Self {
        ApiError {
            status: StatusCode::BAD_REQUEST,
            message: message.into(),
        }
    }

    pub(crate) fn internal(e: impl Display) -> Self {
        log::error!("internal error: {e}");
        ApiError {
            status: StatusCode::INTERNAL_SERVER_ERROR,
            message: e.to_string(),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = ErrorBody {
            status: self.status.as_u16(),
            error: self.message,
        };
        (self.status, Json(body)).into_response()
    }
}

type Params = BTreeMap<String, String>;
type ParamsResult = Result<Query<Params>, QueryRejection>;

pub(crate) fn routes() -> Router<Arc<AppState>> {
    Router::new()
        .route("/datasets", get(list_datasets))
        .route("/datasets/{id}/summary", get(summary))
        .route("/datasets/{id}/overview", get(overview))
        .route("/datasets/{id}/diagnose/{node}", get(diagnose))
        .route("/datasets/{id}/scores", get(scores))
}

pub(crate) async fn fallback() -> ApiError {
    ApiError::not_found("no such endpoint")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingDescriptor {
    pub name: String,
    pub dimension: usize,
    pub configs: Vec<FairnessConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttributeDescriptor {
    pub name: String,
    pub domain: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetDescriptor {
    pub id: String,
    pub name: String,
    pub nodes: usize,
    pub edges: usize,
    pub attributes: Vec<AttributeDescriptor>,
    pub embeddings: Vec<EmbeddingDescriptor>,
}

async fn list_datasets(State(state): State<Arc<AppState>>) -> Json<Vec<DatasetDescriptor>> {
    Json(
        state
            .datasets()
            .map(|d| DatasetDescriptor {
                id: d.artifact.id().to_string(),
                name: d.artifact.manifest.display_name().to_string(),
                nodes: d.graph.node_count(),
                edges: d.graph.edge_count(),
                attributes: d
                    .artifact
                    .attributes
                    .iter()
                    .map(|a| AttributeDescriptor {
                        name: a.name.clone(),
                        domain: a.domain.clone(),
                    })
                    .collect(),
                embeddings: d
                    .artifact
                    .embeddings
                    .iter()
                    .map(|e| EmbeddingDescriptor {
                        name: e.name.clone(),
                        dimension: e.dimension,
                        configs: e.configs(),
                    })
                    .collect(),
            })
            .collect(),
    )
}

fn dataset<'a>(state: &'a AppState, id: &str) -> Result<&'a Dataset, ApiError> {
    state
        .get(id)
        .ok_or_else(|| ApiError::not_found(format!("unknown dataset {id:?}")))
}

fn params(query: ParamsResult) -> Result<Params, ApiError> {
    query
        .map(|Query(p)| p)
        .map_err(|e| ApiError::bad_request(e.body_text()))
}

fn positive(name: &str, raw: &str) -> Result<usize, ApiError> {
    match raw.parse::<usize>() {
        Ok(k) if k >= 1 => Ok(k),
        _ => Err(ApiError::bad_request(format!(
            "{name} must be a positive integer, got {raw:?}"
        ))),
    }
}

fn required<'a>(p: &'a Params, name: &str) -> Result<&'a str, ApiError> {
    p.get(name)
        .map(String::as_str)
        .ok_or_else(|| ApiError::bad_request(format!("missing query parameter {name:?}")))
}

/// Reads `notion` plus its parameters. The individual notion takes its hop
/// count from `hops` or `k`.
pub(crate) fn parse_config(p: &Params) -> Result<FairnessConfig, ApiError> {
    match required(p, "notion")? {
        "individual" => {
            let hops = match (p.get("hops"), p.get("k")) {
                (Some(h), Some(k)) if h != k => {
                    return Err(ApiError::bad_request("hops and k disagree"));
                }
                (Some(h), _) => positive("hops", h)?,
                (None, Some(k)) => positive("k", k)?,
                (None, None) => return Err(ApiError::bad_request("missing query parameter \"k\"")),
            };
            Ok(FairnessConfig::Individual { hops })
        }
        "group" => Ok(FairnessConfig::Group {
            k: positive("k", required(p, "k")?)?,
            attribute: required(p, "attribute")?.to_string(),
            value: required(p, "value")?.to_string(),
        }),
        other => Err(ApiError::bad_request(format!(
            "notion must be \"individual\" or \"group\", got {other:?}"
        ))),
    }
}

/// Resolves the embedding (404 when unknown) and a precomputed configuration
/// (400 otherwise).
fn selection<'a>(
    d: &'a Dataset,
    p: &Params,
) -> Result<(&'a EmbeddingArtifact, FairnessConfig, ScoreView<'a>), ApiError> {
    let name = required(p, "embedding")?;
    let e = d
        .artifact
        .embedding(name)
        .ok_or_else(|| ApiError::not_found(format!("unknown embedding {name:?}")))?;
    let config = parse_config(p)?;
    let view = e
        .scores(&config)
        .ok_or_else(|| ApiError::bad_request(format!("configuration {config} was not precomputed")))?;
    Ok((e, config, view))
}

async fn summary(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> Result<Json<SummaryReport>, ApiError> {
    Ok(Json(dataset(&state, &id)?.artifact.summary.clone()))
}

/// Everything one overview panel draws.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Overview {
    pub dataset: String,
    pub embedding: String,
    pub config: FairnessConfig,
    pub nodes: Vec<String>,
    pub positions: Vec<[f64; 2]>,
    /// Normalized individual scores or group `score_2`, per node.
    pub scores: Vec<f64>,
    /// Pairs of indices into `nodes`.
    pub salient_edges: Vec<[usize; 2]>,
    pub color_domain: [f64; 2],
}

async fn overview(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    query: ParamsResult,
) -> Result<Json<Overview>, ApiError> {
    let d = dataset(&state, &id)?;
    let p = params(query)?;
    let (e, config, view) = selection(d, &p)?;
    Ok(Json(Overview {
        dataset: id,
        embedding: e.name.clone(),
        config,
        nodes: d.artifact.graph.nodes.clone(),
        positions: d.artifact.layout.positions.clone(),
        scores: view.scores.to_vec(),
        salient_edges: d.artifact.layout.salient_edges.clone(),
        color_domain: view.color_domain,
    }))
}

async fn diagnose(
    State(state): State<Arc<AppState>>,
    Path((id, node)): Path<(String, String)>,
    query: ParamsResult,
) -> Result<Json<DiagnosticBundle>, ApiError> {
    let d = dataset(&state, &id)?;
    let p = params(query)?;
    let (e, config, _) = selection(d, &p)?;
    diagnostic_bundle(d, &e.name, &config, &node).map(Json)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreRow {
    pub id: String,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoresResponse {
    pub dataset: String,
    pub embedding: String,
    pub config: FairnessConfig,
    pub sort: String,
    pub dir: String,
    pub rows: Vec<ScoreRow>,
}

async fn scores(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    query: ParamsResult,
) -> Result<Json<ScoresResponse>, ApiError> {
    let d = dataset(&state, &id)?;
    let p = params(query)?;
    let sort = p.get("sort").map_or("score", String::as_str);
    let dir = p.get("dir").map_or("desc", String::as_str);
    if !matches!(sort, "score" | "id") {
        return Err(ApiError::bad_request(format!(
            "sort must be \"score\" or \"id\", got {sort:?}"
        )));
    }
    if !matches!(dir, "asc" | "desc") {
        return Err(ApiError::bad_request(format!(
            "dir must be \"asc\" or \"desc\", got {dir:?}"
        )));
    }
    let (e, config, view) = selection(d, &p)?;

    // Node indices already follow id order, so a stable sort on the score
    // alone leaves ties in ascending id order.
    let mut order: Vec<usize> = (0..view.scores.len()).collect();
    match (sort, dir) {
        ("id", "desc") => order.reverse(),
        ("score", "asc") => order.sort_by(|&a, &b| view.scores[a].total_cmp(&view.scores[b])),
        ("score", "desc") => order.sort_by(|&a, &b| view.scores[b].total_cmp(&view.scores[a])),
        _ => {}
    }
    let ids = d.graph.node_ids();
    Ok(Json(ScoresResponse {
        dataset: id,
        embedding: e.name.clone(),
        config,
        sort: sort.to_string(),
        dir: dir.to_string(),
        rows: order
            .into_iter()
            .map(|u| ScoreRow {
                id: ids[u].clone(),
                score: view.scores[u],
            })
            .collect(),
    }))
}
