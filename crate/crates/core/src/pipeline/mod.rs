//! Ingestion, offline precomputation of every configured score table, and the
//! per-dataset JSON artifact.

pub mod artifact;
pub mod ingest;
pub mod manifest;

use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::embedding::{pca_project, EmbeddingMatrix};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::group::{group_score_table_from_lists, recommended_sets, AttributeTable};
use crate::individual::individual_score_table;
use crate::layout::{filter_salient_edges, spring_layout};
use crate::summary::summarize;

pub use artifact::{Artifact, EmbeddingArtifact, IngestReport, ARTIFACT_VERSION};
pub use manifest::{AttributeValue, DatasetManifest, NamedPath};

use artifact::{AttributeIngest, EmbeddingIngest};

/// Loaded inputs for one dataset, aligned to the graph's node order.
#[derive(Debug, Clone)]
pub struct DatasetInputs {
    pub graph: Graph,
    pub embeddings: Vec<(String, EmbeddingMatrix)>,
    pub attributes: Vec<AttributeTable>,
    pub ingest: IngestReport,
}

pub fn load_inputs(manifest: &DatasetManifest, base: &Path) -> Result<DatasetInputs> {
    manifest.validate()?;
    let graph_path = manifest.resolve(base, &manifest.graph)?;
    let embedding_paths = manifest
        .embeddings
        .iter()
        .map(|e| manifest.resolve(base, &e.path))
        .collect::<Result<Vec<_>>>()?;
    let attribute_paths = manifest
        .attributes
        .iter()
        .map(|a| manifest.resolve(base, &a.path))
        .collect::<Result<Vec<_>>>()?;

    let (graph, build) = ingest::load_graph(&graph_path)?;
    let mut report = IngestReport::from_graph(build);

    let mut attributes = Vec::new();
    for (entry, path) in manifest.attributes.iter().zip(&attribute_paths) {
        let (table, r) = ingest::load_attributes(path, &entry.name, &graph, &manifest.default_label)?;
        report.attributes.push(AttributeIngest {
            name: entry.name.clone(),
            report: r,
        });
        attributes.push(table);
    }

    let loaded = manifest
        .embeddings
        .par_iter()
        .zip(&embedding_paths)
        .map(|(entry, path)| ingest::load_embeddings(path, &graph).map(|(y, r)| (entry.name.clone(), y, r)))
        .collect::<Result<Vec<_>>>()?;
    let mut embeddings = Vec::with_capacity(loaded.len());
    for (name, y, r) in loaded {
        report.embeddings.push(EmbeddingIngest {
            name: name.clone(),
            report: r,
        });
        embeddings.push((name, y));
    }

    Ok(DatasetInputs {
        graph,
        embeddings,
        attributes,
        ingest: report,
    })
}

/// The `(attribute, value)` pairs to score, in manifest order or, when the
/// manifest lists none, every value of every attribute.
fn group_targets(manifest: &DatasetManifest, attributes: &[AttributeTable]) -> Result<Vec<(usize, String)>> {
    match &manifest.group_values {
        Some(values) => values
            .iter()
            .map(|v| {
                let ix = attributes
                    .iter()
                    .position(|a| a.name() == v.attribute)
                    .ok_or_else(|| Error::Manifest(format!("unknown attribute {:?}", v.attribute)))?;
                attributes[ix]
                    .label_index(&v.value)
                    .map_err(|_| Error::Manifest(format!("attribute {} has no value {:?}", v.attribute, v.value)))?;
                Ok((ix, v.value.clone()))
            })
            .collect(),
        None => Ok(attributes
            .iter()
            .enumerate()
            .flat_map(|(ix, a)| a.domain().iter().map(move |z| (ix, z.clone())))
            .collect()),
    }
}

/// Computes every configured table from already-loaded inputs.
pub fn build_artifact(manifest: &DatasetManifest, inputs: &DatasetInputs) -> Result<Artifact> {
    manifest.validate()?;
    let g = &inputs.graph;
    if g.node_count() == 0 {
        return Err(Error::InvalidData(format!("dataset {} has no nodes", manifest.id)));
    }
    for a in &inputs.attributes {
        if a.len() != g.node_count() {
            return Err(Error::InvalidData(format!(
                "attribute {} covers {} of {} nodes",
                a.name(),
                a.len(),
                g.node_count()
            )));
        }
    }
    let targets = group_targets(manifest, &inputs.attributes)?;
    let max_group_k = if targets.is_empty() {
        None
    } else {
        manifest.group_k.iter().copied().max()
    };

    let summary = summarize(g, manifest.histogram_bins);
    let layout = spring_layout(g, manifest.layout_seed, manifest.layout_iterations);
    let salient = filter_salient_edges(g, &layout, manifest.keep_fraction)?;

    let embeddings = inputs
        .embeddings
        .par_iter()
        .map(|(name, y)| -> Result<EmbeddingArtifact> {
            let projection = pca_project(y)?;
            let individual = manifest
                .individual_k
                .iter()
                .map(|&k| individual_score_table(g, y, k).map(|t| artifact::individual_artifact(&t)))
                .collect::<Result<Vec<_>>>()?;

            let (recommendations, group) = match max_group_k {
                Some(kmax) => {
                    let lists = recommended_sets(g, y, kmax)?;
                    let mut group = Vec::new();
                    for &k in &manifest.group_k {
                        for (ix, z) in &targets {
                            let t = group_score_table_from_lists(&lists, &inputs.attributes[*ix], k, z)?;
                            group.push(artifact::group_artifact(&t));
                        }
                    }
                    (Some(artifact::recommendation_data(kmax, &lists)), group)
                }
                None => (None, Vec::new()),
            };

            Ok(EmbeddingArtifact {
                name: name.clone(),
                dimension: y.dim(),
                projection: artifact::projection_data(&projection),
                recommendations,
                individual,
                group,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(Artifact {
        format_version: ARTIFACT_VERSION,
        manifest: manifest.clone(),
        ingest: inputs.ingest.clone(),
        graph: artifact::graph_data(g),
        summary: artifact::summary_data(&summary),
        layout: artifact::layout_data(&layout, manifest.keep_fraction, &salient),
        attributes: inputs.attributes.iter().map(artifact::attribute_data).collect(),
        embeddings,
    })
}

pub fn precompute(manifest: &DatasetManifest, base: &Path) -> Result<Artifact> {
    let inputs = load_inputs(manifest, base)?;
    build_artifact(manifest, &inputs)
}

/// Loads the manifest at `manifest_path`, precomputes, and writes the artifact
/// into `out_dir`. Nothing is written if any step fails.
pub fn precompute_to(manifest_path: &Path, out_dir: &Path) -> Result<(Artifact, PathBuf)> {
    let (manifest, base) = DatasetManifest::load(manifest_path)?;
    let artifact = precompute(&manifest, &base)?;
    let path = artifact.write(out_dir)?;
    log::info!("wrote {}", path.display());
    Ok((artifact, path))
}
