use serde::{Deserialize, Serialize};

use embedfair_core::{Extents, FairnessConfig, NodeSet};

use crate::api::ApiError;
use crate::state::Dataset;

/// Why a node appears in a bundle: its hop distance from the focal node
/// (individual notion) or its label (group notion).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Annotation {
    Hop(u32),
    Label(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BundleNode {
    pub id: String,
    pub focal: bool,
    pub annotation: Annotation,
    /// Position in the dataset's global projection.
    pub point: [f64; 2],
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticBundle {
    pub dataset: String,
    pub embedding: String,
    pub config: FairnessConfig,
    pub focal: String,
    pub focal_score: f64,
    /// In node id order.
    pub nodes: Vec<BundleNode>,
    /// Pairs of indices into `nodes`.
    pub edges: Vec<[usize; 2]>,
    /// Bounding box of every projected node.
    pub context_extents: Extents,
    /// Bounding box of `nodes`.
    pub focus_extents: Extents,
}

/// The subgraph and projected points that explain `node`'s score under `config`.
pub fn diagnostic_bundle(
    dataset: &Dataset,
    embedding: &str,
    config: &FairnessConfig,
    node: &str,
) -> Result<DiagnosticBundle, ApiError> {
    let e = dataset
        .artifact
        .embedding(embedding)
        .ok_or_else(|| ApiError::not_found(format!("unknown embedding {embedding:?}")))?;
    let view = e
        .scores(config)
        .ok_or_else(|| ApiError::bad_request(format!("configuration {config} was not precomputed")))?;
    let g = &dataset.graph;
    let u = g
        .index_of(node)
        .map_err(|_| ApiError::not_found(format!("unknown node {node:?}")))?;

    let (sub, annotations): (_, Vec<Annotation>) = match config {
        FairnessConfig::Individual { hops } => {
            let nb = g.k_hop_neighborhood(u, *hops).map_err(ApiError::internal)?;
            let sub = g.ego_subgraph(u, *hops).map_err(ApiError::internal)?;
            let ann = sub
                .parent
                .iter()
                .map(|&v| Annotation::Hop(if v == u { 0 } else { nb.hop_of(v).unwrap_or(0) }))
                .collect();
            (sub, ann)
        }
        FairnessConfig::Group { k, attribute, .. } => {
            let recs = e
                .recommendations_for(u, *k)
                .ok_or_else(|| ApiError::bad_request(format!("no recommendations stored for k={k}")))?;
            let attrs = dataset
                .attribute(attribute)
                .ok_or_else(|| ApiError::bad_request(format!("unknown attribute {attribute:?}")))?;
            let mut members: NodeSet = recs.iter().copied().collect();
            members.insert(u);
            let sub = g.induced_subgraph(&members).map_err(ApiError::internal)?;
            let ann = sub
                .parent
                .iter()
                .map(|&v| Annotation::Label(attrs.label_of(v).to_string()))
                .collect();
            (sub, ann)
        }
    };

    let points = &e.projection.points;
    let nodes: Vec<BundleNode> = sub
        .parent
        .iter()
        .zip(annotations)
        .map(|(&v, annotation)| BundleNode {
            id: g.node_ids()[v].clone(),
            focal: v == u,
            annotation,
            point: points[v],
            score: view.scores[v],
        })
        .collect();
    let focus_extents = Extents::of(nodes.iter().map(|n| n.point)).expect("bundle contains the focal node");
    Ok(DiagnosticBundle {
        dataset: dataset.artifact.id().to_string(),
        embedding: embedding.to_string(),
        config: config.clone(),
        focal: node.to_string(),
        focal_score: view.scores[u],
        nodes,
        edges: sub.graph.edges().map(|(a, b)| [a, b]).collect(),
        context_extents: e.projection.extents,
        focus_extents,
    })
}
