//! The self-contained JSON document written per dataset.
//!
//! Every real is rounded to 9 significant digits before it is stored, so the
//! serialized text is stable and `parse → serialize` reproduces it byte for
//! byte. Node references are indices into `graph.nodes`.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::config::FairnessConfig;
use crate::embedding::{Extents, Projection2D};
use crate::error::{Error, Result};
use crate::graph::{BuildReport, Graph};
use crate::group::{AttributeTable, GroupRate, GroupScoreTable, RecommendationList};
use crate::individual::IndividualScoreTable;
use crate::layout::Layout;
use crate::pipeline::ingest::{AttributeLoadReport, EmbeddingLoadReport};
use crate::pipeline::manifest::DatasetManifest;
use crate::summary::SummaryReport;

pub const ARTIFACT_VERSION: u32 = 1;

/// Rounds `x` to 9 significant decimal digits.
pub fn round_sig9(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    if !x.is_finite() {
        return x;
    }
    format!("{x:.8e}").parse().unwrap_or(x)
}

fn q(values: &[f64]) -> Vec<f64> {
    values.iter().copied().map(round_sig9).collect()
}

fn q2(points: &[[f64; 2]]) -> Vec<[f64; 2]> {
    points.iter().map(|p| [round_sig9(p[0]), round_sig9(p[1])]).collect()
}

fn q_extents(e: &Extents) -> Extents {
    Extents {
        min: [round_sig9(e.min[0]), round_sig9(e.min[1])],
        max: [round_sig9(e.max[0]), round_sig9(e.max[1])],
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttributeIngest {
    pub name: String,
    #[serde(flatten)]
    pub report: AttributeLoadReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingIngest {
    pub name: String,
    #[serde(flatten)]
    pub report: EmbeddingLoadReport,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct IngestReport {
    pub duplicate_edges: usize,
    pub self_loops: usize,
    pub attributes: Vec<AttributeIngest>,
    pub embeddings: Vec<EmbeddingIngest>,
}

impl IngestReport {
    pub fn from_graph(report: BuildReport) -> Self {
        IngestReport {
            duplicate_edges: report.duplicate_edges,
            self_loops: report.self_loops,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphData {
    pub nodes: Vec<String>,
    pub edges: Vec<[usize; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayoutData {
    pub seed: u64,
    pub iterations: usize,
    pub keep_fraction: f64,
    pub positions: Vec<[f64; 2]>,
    pub salient_edges: Vec<[usize; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttributeData {
    pub name: String,
    pub domain: Vec<String>,
    /// Index into `domain` per node.
    pub labels: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectionData {
    pub mean: Vec<f64>,
    pub components: [Vec<f64>; 2],
    pub variances: [f64; 2],
    pub points: Vec<[f64; 2]>,
    pub extents: Extents,
}

/// Top-`k` recommendation lists per node; any smaller `k` is a prefix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecommendationData {
    pub k: usize,
    pub lists: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndividualArtifact {
    pub hops: usize,
    pub raw: Vec<f64>,
    pub degree_normalized: Vec<f64>,
    pub normalized: Vec<f64>,
    /// `[0, max normalized]`.
    pub color_domain: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupArtifact {
    pub k: usize,
    pub attribute: String,
    pub value: String,
    pub scores: Vec<f64>,
    pub attribute_bias: f64,
    pub network_bias: f64,
    pub groups: Vec<GroupRate>,
    /// `[min, max]` of `scores`.
    pub color_domain: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingArtifact {
    pub name: String,
    pub dimension: usize,
    pub projection: ProjectionData,
    pub recommendations: Option<RecommendationData>,
    pub individual: Vec<IndividualArtifact>,
    pub group: Vec<GroupArtifact>,
}

/// Per-node scores for one configuration, as served to the UI.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoreView<'a> {
    pub scores: &'a [f64],
    pub color_domain: [f64; 2],
}

impl EmbeddingArtifact {
    pub fn individual(&self, hops: usize) -> Option<&IndividualArtifact> {
        self.individual.iter().find(|t| t.hops == hops)
    }

    pub fn group(&self, k: usize, attribute: &str, value: &str) -> Option<&GroupArtifact> {
        self.group
            .iter()
            .find(|t| t.k == k && t.attribute == attribute && t.value == value)
    }

    /// Normalized scores for individual configs and `score_2` for group configs.
    pub fn scores(&self, config: &FairnessConfig) -> Option<ScoreView<'_>> {
        match config {
            FairnessConfig::Individual { hops } => self.individual(*hops).map(|t| ScoreView {
                scores: &t.normalized,
                color_domain: t.color_domain,
            }),
            FairnessConfig::Group { k, attribute, value } => self.group(*k, attribute, value).map(|t| ScoreView {
                scores: &t.scores,
                color_domain: t.color_domain,
            }),
        }
    }

    /// Stored list for `u` truncated to `k`; `None` if `k` exceeds what was stored.
    pub fn recommendations_for(&self, u: usize, k: usize) -> Option<&[usize]> {
        let recs = self.recommendations.as_ref()?;
        if k > recs.k {
            return None;
        }
        let list = recs.lists.get(u)?;
        Some(&list[..list.len().min(k)])
    }

    pub fn configs(&self) -> Vec<FairnessConfig> {
        self.individual
            .iter()
            .map(|t| FairnessConfig::Individual { hops: t.hops })
            .chain(self.group.iter().map(|t| FairnessConfig::Group {
                k: t.k,
                attribute: t.attribute.clone(),
                value: t.value.clone(),
            }))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Artifact {
    pub format_version: u32,
    pub manifest: DatasetManifest,
    pub ingest: IngestReport,
    pub graph: GraphData,
    pub summary: SummaryReport,
    pub layout: LayoutData,
    pub attributes: Vec<AttributeData>,
    pub embeddings: Vec<EmbeddingArtifact>,
}

impl Artifact {
    pub fn id(&self) -> &str {
        &self.manifest.id
    }

    pub fn graph(&self) -> Result<Graph> {
        let edges: Vec<(usize, usize)> = self.graph.edges.iter().map(|e| (e[0], e[1])).collect();
        Graph::from_index_edges(self.graph.nodes.clone(), &edges)
    }

    pub fn attribute(&self, name: &str) -> Option<&AttributeData> {
        self.attributes.iter().find(|a| a.name == name)
    }

    pub fn attribute_table(&self, name: &str) -> Result<AttributeTable> {
        let a = self
            .attribute(name)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown attribute {name:?}")))?;
        AttributeTable::from_indices(&a.name, a.domain.clone(), a.labels.clone())
    }

    pub fn embedding(&self, name: &str) -> Option<&EmbeddingArtifact> {
        self.embeddings.iter().find(|e| e.name == name)
    }

    /// Checks that every per-node array covers exactly the graph's nodes.
    pub fn validate(&self) -> Result<()> {
        if self.format_version != ARTIFACT_VERSION {
            return Err(Error::InvalidData(format!(
                "unsupported artifact version {} (expected {ARTIFACT_VERSION})",
                self.format_version
            )));
        }
        let g = self.graph()?;
        let n = g.node_count();
        let bad = |what: String| Err(Error::InvalidData(format!("artifact {}: {what}", self.id())));
        if self.layout.positions.len() != n {
            return bad(format!(
                "layout has {} positions for {n} nodes",
                self.layout.positions.len()
            ));
        }
        if self.layout.salient_edges.iter().any(|e| !g.has_edge(e[0], e[1])) {
            return bad("salient edge not in graph".into());
        }
        for a in &self.attributes {
            if a.labels.len() != n {
                return bad(format!("attribute {} has {} labels", a.name, a.labels.len()));
            }
            self.attribute_table(&a.name)?;
        }
        for e in &self.embeddings {
            if e.projection.points.len() != n {
                return bad(format!(
                    "embedding {} projection has {} points",
                    e.name,
                    e.projection.points.len()
                ));
            }
            if let Some(r) = &e.recommendations {
                if r.lists.len() != n || r.lists.iter().flatten().any(|&v| v >= n) {
                    return bad(format!("embedding {} recommendation lists are malformed", e.name));
                }
            }
            for t in &e.individual {
                if t.raw.len() != n || t.degree_normalized.len() != n || t.normalized.len() != n {
                    return bad(format!(
                        "embedding {} individual table k={} is incomplete",
                        e.name, t.hops
                    ));
                }
            }
            for t in &e.group {
                if t.scores.len() != n {
                    return bad(format!("embedding {} group table k={} is incomplete", e.name, t.k));
                }
                if self.attribute(&t.attribute).is_none() {
                    return bad(format!("group table refers to unknown attribute {}", t.attribute));
                }
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<Vec<u8>> {
        let mut bytes = serde_json::to_vec(self)?;
        bytes.push(b'\n');
        Ok(bytes)
    }

    pub fn from_json(bytes: &[u8]) -> Result<Artifact> {
        let artifact: Artifact = serde_json::from_slice(bytes)?;
        artifact.validate()?;
        Ok(artifact)
    }

    pub fn read(path: &Path) -> Result<Artifact> {
        let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
        Artifact::from_json(&bytes).map_err(|e| match e {
            Error::Json(e) => Error::InvalidData(format!("{}: {e}", path.display())),
            other => other,
        })
    }

    /// Writes `<out_dir>/<id>.json` via a temporary file and rename.
    pub fn write(&self, out_dir: &Path) -> Result<PathBuf> {
        let bytes = self.to_json()?;
        fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
        let target = out_dir.join(format!("{}.json", self.id()));
        let mut tmp = tempfile::NamedTempFile::new_in(out_dir).map_err(|e| Error::io(out_dir, e))?;
        tmp.write_all(&bytes)
            .map_err(|e| Error::io(tmp.path().to_path_buf(), e))?;
        tmp.as_file()
            .sync_all()
            .map_err(|e| Error::io(tmp.path().to_path_buf(), e))?;
        tmp.persist(&target).map_err(|e| Error::io(&target, e.error))?;
        Ok(target)
    }
}

pub(crate) fn graph_data(g: &Graph) -> GraphData {
    GraphData {
        nodes: g.node_ids().to_vec(),
        edges: g.edges().map(|(u, v)| [u, v]).collect(),
    }
}

pub(crate) fn layout_data(layout: &Layout, keep_fraction: f64, salient: &[(usize, usize)]) -> LayoutData {
    LayoutData {
        seed: layout.seed,
        iterations: layout.iterations,
        keep_fraction,
        positions: q2(&layout.positions),
        salient_edges: salient.iter().map(|&(u, v)| [u, v]).collect(),
    }
}

pub(crate) fn summary_data(s: &SummaryReport) -> SummaryReport {
    let mut s = s.clone();
    s.density = round_sig9(s.density);
    s.average_degree = round_sig9(s.average_degree);
    s.clustering_coefficient = round_sig9(s.clustering_coefficient);
    for b in &mut s.degree_histogram {
        b.lower = round_sig9(b.lower);
        b.upper = round_sig9(b.upper);
    }
    s
}

pub(crate) fn attribute_data(t: &AttributeTable) -> AttributeData {
    AttributeData {
        name: t.name().to_string(),
        domain: t.domain().to_vec(),
        labels: t.label_indices().to_vec(),
    }
}

pub(crate) fn projection_data(p: &Projection2D) -> ProjectionData {
    ProjectionData {
        mean: q(&p.mean),
        components: [q(&p.components[0]), q(&p.components[1])],
        variances: [round_sig9(p.variances[0]), round_sig9(p.variances[1])],
        points: q2(&p.points),
        extents: q_extents(&p.extents),
    }
}

pub(crate) fn recommendation_data(k: usize, lists: &[RecommendationList]) -> RecommendationData {
    RecommendationData {
        k,
        lists: lists.iter().map(|r| r.items.clone()).collect(),
    }
}

pub(crate) fn individual_artifact(t: &IndividualScoreTable) -> IndividualArtifact {
    let normalized = q(&t.normalized);
    let max = normalized.iter().copied().fold(0.0, f64::max);
    IndividualArtifact {
        hops: t.hops,
        raw: q(&t.raw),
        degree_normalized: q(&t.degree_normalized),
        normalized,
        color_domain: [0.0, max],
    }
}

pub(crate) fn group_artifact(t: &GroupScoreTable) -> GroupArtifact {
    let scores = q(&t.scores);
    let min = scores.iter().copied().fold(f64::INFINITY, f64::min);
    let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let color_domain = if scores.is_empty() { [0.0, 0.0] } else { [min, max] };
    GroupArtifact {
        k: t.k,
        attribute: t.attribute.clone(),
        value: t.value.clone(),
        scores,
        attribute_bias: round_sig9(t.attribute_bias),
        network_bias: round_sig9(t.network.bias),
        groups: t
            .network
            .groups
            .iter()
            .map(|g| GroupRate {
                rate: g.rate.map(round_sig9),
                ..g.clone()
            })
            .collect(),
        color_domain,
    }
}
