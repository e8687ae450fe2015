use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::layout::{DEFAULT_ITERATIONS, DEFAULT_KEEP_FRACTION};
use crate::pipeline::ingest::DEFAULT_LABEL;
use crate::summary::DEFAULT_BINS;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NamedPath {
    pub name: String,
    pub path: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AttributeValue {
    pub attribute: String,
    pub value: String,
}

/// Everything needed to precompute one dataset. Relative paths resolve
/// against the manifest's directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetManifest {
    pub id: String,
    #[serde(default)]
    pub name: Option<String>,
    pub graph: PathBuf,
    pub embeddings: Vec<NamedPath>,
    #[serde(default)]
    pub attributes: Vec<NamedPath>,
    #[serde(default = "default_individual_k")]
    pub individual_k: Vec<usize>,
    #[serde(default = "default_group_k")]
    pub group_k: Vec<usize>,
    /// Attribute values to score; every value of every attribute when absent.
    #[serde(default)]
    pub group_values: Option<Vec<AttributeValue>>,
    #[serde(default)]
    pub layout_seed: u64,
    #[serde(default = "default_iterations")]
    pub layout_iterations: usize,
    #[serde(default = "default_keep_fraction")]
    pub keep_fraction: f64,
    #[serde(default = "default_bins")]
    pub histogram_bins: usize,
    #[serde(default = "default_label")]
    pub default_label: String,
}

fn default_individual_k() -> Vec<usize> {
    vec![1, 2]
}

fn default_group_k() -> Vec<usize> {
    vec![1, 5, 10]
}

fn default_iterations() -> usize {
    DEFAULT_ITERATIONS
}

fn default_keep_fraction() -> f64 {
    DEFAULT_KEEP_FRACTION
}

fn default_bins() -> usize {
    DEFAULT_BINS
}

fn default_label() -> String {
    DEFAULT_LABEL.to_string()
}

fn check_ks(what: &str, ks: &[usize]) -> Result<()> {
    let mut seen = HashSet::new();
    for &k in ks {
        if k == 0 {
            return Err(Error::Manifest(format!("{what} values must be at least 1")));
        }
        if !seen.insert(k) {
            return Err(Error::Manifest(format!("duplicate {what} value {k}")));
        }
    }
    Ok(())
}

fn check_names(what: &str, entries: &[NamedPath]) -> Result<()> {
    let mut seen = HashSet::new();
    for e in entries {
        if e.name.is_empty() {
            return Err(Error::Manifest(format!("{what} with an empty name")));
        }
        if !seen.insert(e.name.as_str()) {
            return Err(Error::Manifest(format!("duplicate {what} name {:?}", e.name)));
        }
    }
    Ok(())
}

impl DatasetManifest {
    /// Reads and validates a manifest. Returns it with the directory its
    /// relative paths resolve against.
    pub fn load(path: &Path) -> Result<(DatasetManifest, PathBuf)> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let manifest: DatasetManifest =
            serde_json::from_str(&text).map_err(|e| Error::Manifest(format!("{}: {e}", path.display())))?;
        manifest.validate()?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok((manifest, base))
    }

    pub fn validate(&self) -> Result<()> {
        let id_ok = !self.id.is_empty()
            && self
                .id
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.'))
            && !self.id.starts_with('.');
        if !id_ok {
            return Err(Error::Manifest(format!(
                "dataset id {:?} must be non-empty and use only [A-Za-z0-9._-]",
                self.id
            )));
        }
        if self.embeddings.is_empty() {
            return Err(Error::Manifest("at least one embedding is required".into()));
        }
        check_names("embedding", &self.embeddings)?;
        check_names("attribute", &self.attributes)?;
        check_ks("individual_k", &self.individual_k)?;
        check_ks("group_k", &self.group_k)?;
        if !(self.keep_fraction > 0.0 && self.keep_fraction <= 1.0) {
            return Err(Error::Manifest(format!(
                "keep_fraction must be in (0, 1], got {}",
                self.keep_fraction
            )));
        }
        if self.histogram_bins == 0 {
            return Err(Error::Manifest("histogram_bins must be at least 1".into()));
        }
        if let Some(values) = &self.group_values {
            let mut seen = HashSet::new();
            for v in values {
                if !self.attributes.iter().any(|a| a.name == v.attribute) {
                    return Err(Error::Manifest(format!(
                        "group value refers to unknown attribute {:?}",
                        v.attribute
                    )));
                }
                if !seen.insert(v) {
                    return Err(Error::Manifest(format!(
                        "duplicate group value {}={}",
                        v.attribute, v.value
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn display_name(&self) -> &str {
        self.name.as_deref().unwrap_or(&self.id)
    }

    /// Joins `path` onto `base` and checks that the file exists.
    pub(crate) fn resolve(&self, base: &Path, path: &Path) -> Result<PathBuf> {
        let full = base.join(path);
        if !full.is_file() {
            return Err(Error::Manifest(format!(
                "dataset {}: file {} does not exist",
                self.id,
                full.display()
            )));
        }
        Ok(full)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(json: &str) -> Result<DatasetManifest> {
        let m: DatasetManifest = serde_json::from_str(json)?;
        m.validate()?;
        Ok(m)
    }

    #[test]
    fn defaults_fill_in() {
        let m = parse(r#"{"id": "fb", "graph": "g.txt", "embeddings": [{"name": "n2v", "path": "n2v.emb"}]}"#).unwrap();
        assert_eq!(m.individual_k, vec![1, 2]);
        assert_eq!(m.group_k, vec![1, 5, 10]);
        assert_eq!(m.keep_fraction, 0.1);
        assert_eq!(m.layout_iterations, 200);
        assert_eq!(m.default_label, "0");
        assert_eq!(m.display_name(), "fb");
    }

    #[test]
    fn rejects_bad_manifests() {
        assert!(matches!(
            parse(r#"{"id": "fb", "graph": "g.txt", "embeddings": []}"#),
            Err(Error::Manifest(_))
        ));
        assert!(parse(r#"{"id": "../x", "graph": "g", "embeddings": [{"name": "a", "path": "a"}]}"#).is_err());
        assert!(
            parse(r#"{"id": "x", "graph": "g", "embeddings": [{"name": "a", "path": "a"}], "individual_k": [0]}"#)
                .is_err()
        );
        assert!(parse(
            r#"{"id": "x", "graph": "g", "embeddings": [{"name": "a", "path": "a"}, {"name": "a", "path": "b"}]}"#
        )
        .is_err());
        assert!(
            parse(r#"{"id": "x", "graph": "g", "embeddings": [{"name": "a", "path": "a"}], "keep_fraction": 0}"#)
                .is_err()
        );
        assert!(parse(r#"{"id": "x", "graph": "g", "embeddings": [{"name": "a", "path": "a"}], "bogus": 1}"#).is_err());
        assert!(parse(
            r#"{"id": "x", "graph": "g", "embeddings": [{"name": "a", "path": "a"}],
                "group_values": [{"attribute": "gender", "value": "0"}]}"#
        )
        .is_err());
    }
}
