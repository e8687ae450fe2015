use std::collections::BTreeMap;
use std::fs;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};

use embedfair_core::pipeline::Artifact;
use embedfair_core::{AttributeTable, Graph};

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("cannot read artifact directory {}: {source}", path.display())]
    Directory { path: PathBuf, source: std::io::Error },
    #[error("artifact {}: {source}", path.display())]
    Artifact {
        path: PathBuf,
        source: embedfair_core::Error,
    },
    #[error("dataset id {id:?} appears in both {} and {}", first.display(), second.display())]
    DuplicateId {
        id: String,
        first: PathBuf,
        second: PathBuf,
    },
    #[error("cannot listen on {0}: {1}")]
    Bind(SocketAddr, std::io::Error),
}

/// One artifact with the structures rebuilt from it.
#[derive(Debug)]
pub struct Dataset {
    pub artifact: Artifact,
    pub graph: Graph,
    pub attributes: Vec<AttributeTable>,
    pub source: PathBuf,
}

impl Dataset {
    pub fn from_artifact(artifact: Artifact, source: PathBuf) -> Result<Dataset, embedfair_core::Error> {
        let graph = artifact.graph()?;
        let attributes = artifact
            .attributes
            .iter()
            .map(|a| artifact.attribute_table(&a.name))
            .collect::<Result<_, _>>()?;
        Ok(Dataset {
            artifact,
            graph,
            attributes,
            source,
        })
    }

    pub fn attribute(&self, name: &str) -> Option<&AttributeTable> {
        self.attributes.iter().find(|a| a.name() == name)
    }
}

/// Immutable server state: datasets keyed (and therefore listed) by id.
#[derive(Debug, Default)]
pub struct AppState {
    datasets: BTreeMap<String, Dataset>,
}

impl AppState {
    pub fn new(datasets: impl IntoIterator<Item = Dataset>) -> Result<AppState, LoadError> {
        let mut map: BTreeMap<String, Dataset> = BTreeMap::new();
        for d in datasets {
            let id = d.artifact.id().to_string();
            if let Some(prev) = map.get(&id) {
                return Err(LoadError::DuplicateId {
                    id,
                    first: prev.source.clone(),
                    second: d.source,
                });
            }
            map.insert(id, d);
        }
        Ok(AppState { datasets: map })
    }

    /// Loads every `*.json` file directly inside `dir`.
    pub fn load_dir(dir: &Path) -> Result<AppState, LoadError> {
        let entries = fs::read_dir(dir).map_err(|source| LoadError::Directory {
            path: dir.to_path_buf(),
            source,
        })?;
        let mut paths = Vec::new();
        for entry in entries {
            let entry = entry.map_err(|source| LoadError::Directory {
                path: dir.to_path_buf(),
                source,
            })?;
            let path = entry.path();
            if path.extension().is_some_and(|e| e == "json") && path.is_file() {
                paths.push(path);
            }
        }
        paths.sort();
        let mut datasets = Vec::with_capacity(paths.len());
        for path in paths {
            let artifact = Artifact::read(&path).map_err(|source| LoadError::Artifact {
                path: path.clone(),
                source,
            })?;
            log::debug!("loaded {} from {}", artifact.id(), path.display());
            let d = Dataset::from_artifact(artifact, path.clone())
                .map_err(|source| LoadError::Artifact { path, source })?;
            datasets.push(d);
        }
        AppState::new(datasets)
    }

    pub fn get(&self, id: &str) -> Option<&Dataset> {
        self.datasets.get(id)
    }

    pub fn datasets(&self) -> impl Iterator<Item = &Dataset> {
        self.datasets.values()
    }

    pub fn len(&self) -> usize {
        self.datasets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.datasets.is_empty()
    }
}
