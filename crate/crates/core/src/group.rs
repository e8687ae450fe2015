//! Group fairness over top-k link recommendations.
//!
//! Each node is "recommended" the `k` non-adjacent nodes whose embeddings have
//! the highest dot product with its own (ties go to the smaller id). Fairness
//! is then measured three ways:
//!
//! - per node, `score_2 = 1/|Z| − share_z`, where `share_z` is the fraction of
//!   recommendations carrying label `z`;
//! - per label, `bias(z) = 1/|Z| − mean share_z`;
//! - per network, the population variance of recommendation rates across all
//!   unordered label pairs `{i, j}`.
//!
//! Nodes whose recommendation list is empty (every other node is a neighbor)
//! are left out of the means and of the network-level counts.

use std::cmp::Ordering;
use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::embedding::{dot, EmbeddingMatrix};
use crate::error::{Error, Result};
use crate::graph::{compare_ids, Graph, NodeSet};
use crate::individual::check_aligned;

/// Categorical sensitive attribute, one label per node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttributeTable {
    name: String,
    domain: Vec<String>,
    labels: Vec<usize>,
}

impl AttributeTable {
    /// `labels[u]` is the label of internal node `u`. The domain is every label
    /// that appears plus any in `declared`, in natural id order.
    pub fn new<S: AsRef<str>>(name: &str, labels: &[S], declared: &[S]) -> Result<Self> {
        let mut domain: Vec<String> = labels.iter().chain(declared).map(|s| s.as_ref().to_string()).collect();
        domain.sort_by(|a, b| compare_ids(a, b));
        domain.dedup();
        if domain.is_empty() {
            return Err(Error::InvalidData(format!(
                "attribute {name} has an empty label domain"
            )));
        }
        let index: HashMap<&str, usize> = domain.iter().enumerate().map(|(i, z)| (z.as_str(), i)).collect();
        let labels = labels.iter().map(|s| index[s.as_ref()]).collect();
        Ok(AttributeTable {
            name: name.to_string(),
            domain,
            labels,
        })
    }

    /// Rebuilds a table from a domain and per-node label indices.
    pub fn from_indices(name: &str, domain: Vec<String>, labels: Vec<usize>) -> Result<Self> {
        if domain.is_empty() {
            return Err(Error::InvalidData(format!(
                "attribute {name} has an empty label domain"
            )));
        }
        if domain.windows(2).any(|w| compare_ids(&w[0], &w[1]) != Ordering::Less) {
            return Err(Error::InvalidData(format!(
                "attribute {name} domain must be unique and sorted"
            )));
        }
        if let Some(&bad) = labels.iter().find(|&&l| l >= domain.len()) {
            return Err(Error::InvalidData(format!(
                "attribute {name} label index {bad} is outside the domain"
            )));
        }
        Ok(AttributeTable {
            name: name.to_string(),
            domain,
            labels,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn domain(&self) -> &[String] {
        &self.domain
    }

    pub fn domain_size(&self) -> usize {
        self.domain.len()
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Domain index of each node's label.
    pub fn label_indices(&self) -> &[usize] {
        &self.labels
    }

    /// Panics if `u` is out of range.
    pub fn label_of(&self, u: usize) -> &str {
        &self.domain[self.labels[u]]
    }

    pub fn label_index(&self, z: &str) -> Result<usize> {
        self.domain
            .iter()
            .position(|d| d == z)
            .ok_or_else(|| Error::InvalidArgument(format!("label {z:?} is not in the domain of {}", self.name)))
    }

    fn check_covers(&self, r: &RecommendationList) -> Result<()> {
        let n = self.labels.len();
        if let Some(&bad) = r.items.iter().find(|&&v| v >= n) {
            return Err(Error::NodeNotFound(format!("index {bad}")));
        }
        Ok(())
    }
}

/// The ordered top-k recommendations for one source node.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecommendationList {
    pub source: usize,
    pub k: usize,
    pub items: Vec<usize>,
}

impl RecommendationList {
    pub fn new(source: usize, k: usize, items: Vec<usize>) -> Self {
        RecommendationList { source, k, items }
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// The top-`k` prefix. Rankings are total orders, so this equals the list
    /// that would be computed directly for `k`.
    pub fn truncated(&self, k: usize) -> RecommendationList {
        RecommendationList {
            source: self.source,
            k,
            items: self.items.iter().take(k).copied().collect(),
        }
    }
}

fn check_count(k: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::InvalidArgument("recommendation count must be at least 1".into()));
    }
    Ok(())
}

fn rank(g: &Graph, y: &EmbeddingMatrix, u: usize, k: usize) -> RecommendationList {
    let origin = y.row(u);
    let adjacent = g.neighbors(u);
    let mut scored: Vec<(f64, usize)> = (0..g.node_count())
        .filter(|&v| v != u && adjacent.binary_search(&v).is_err())
        // `+ 0.0` folds -0.0 into 0.0 so that total_cmp treats them as a tie.
        .map(|v| (dot(origin, y.row(v)) + 0.0, v))
        .collect();
    let by_rank = |a: &(f64, usize), b: &(f64, usize)| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1));
    if scored.len() > k {
        scored.select_nth_unstable_by(k - 1, by_rank);
        scored.truncate(k);
    }
    scored.sort_unstable_by(by_rank);
    RecommendationList {
        source: u,
        k,
        items: scored.into_iter().map(|(_, v)| v).collect(),
    }
}

/// Top-`k` non-adjacent nodes by dot-product similarity to `u`.
pub fn recommended_set(g: &Graph, y: &EmbeddingMatrix, u: usize, k: usize) -> Result<RecommendationList> {
    check_aligned(g, y)?;
    g.check_node(u)?;
    check_count(k)?;
    Ok(rank(g, y, u, k))
}

/// [`recommended_set`] for every node, in node order.
pub fn recommended_sets(g: &Graph, y: &EmbeddingMatrix, k: usize) -> Result<Vec<RecommendationList>> {
    check_aligned(g, y)?;
    check_count(k)?;
    Ok((0..g.node_count()).into_par_iter().map(|u| rank(g, y, u, k)).collect())
}

/// Order-preserving filter of `r` down to items labeled `z`.
pub fn restricted_set(r: &RecommendationList, attrs: &AttributeTable, z: &str) -> Result<RecommendationList> {
    let z = attrs.label_index(z)?;
    attrs.check_covers(r)?;
    Ok(RecommendationList {
        source: r.source,
        k: r.k,
        items: r.items.iter().copied().filter(|&v| attrs.labels[v] == z).collect(),
    })
}

fn share_of(r: &RecommendationList, labels: &[usize], z: usize) -> f64 {
    if r.items.is_empty() {
        return 0.0;
    }
    let hits = r.items.iter().filter(|&&v| labels[v] == z).count();
    hits as f64 / r.items.len() as f64
}

/// Fraction of `r` labeled `z`; 0 for an empty list.
pub fn share(r: &RecommendationList, attrs: &AttributeTable, z: &str) -> Result<f64> {
    let z = attrs.label_index(z)?;
    attrs.check_covers(r)?;
    Ok(share_of(r, &attrs.labels, z))
}

/// Deviation from equal representation: `1/|Z| − share`.
pub fn user_score(r: &RecommendationList, attrs: &AttributeTable, z: &str) -> Result<f64> {
    let s = share(r, attrs, z)?;
    Ok(1.0 / attrs.domain_size() as f64 - s)
}

fn bias_from_lists(lists: &[RecommendationList], attrs: &AttributeTable, z: usize) -> f64 {
    let mut total = 0.0;
    let mut counted = 0usize;
    for r in lists.iter().filter(|r| !r.items.is_empty()) {
        total += share_of(r, &attrs.labels, z);
        counted += 1;
    }
    let uniform = 1.0 / attrs.domain_size() as f64;
    if counted == 0 {
        return 0.0;
    }
    uniform - total / counted as f64
}

/// `1/|Z|` minus the mean `z`-share over nodes with a nonempty list.
/// Returns 0 when no node has any recommendation.
pub fn attribute_bias_from_lists(lists: &[RecommendationList], attrs: &AttributeTable, z: &str) -> Result<f64> {
    let z = attrs.label_index(z)?;
    for r in lists {
        attrs.check_covers(r)?;
    }
    Ok(bias_from_lists(lists, attrs, z))
}

pub fn attribute_bias(g: &Graph, y: &EmbeddingMatrix, attrs: &AttributeTable, k: usize, z: &str) -> Result<f64> {
    check_attrs(g, attrs)?;
    attrs.label_index(z)?;
    let lists = recommended_sets(g, y, k)?;
    attribute_bias_from_lists(&lists, attrs, z)
}

/// Recommendation rate for one unordered label pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupRate {
    pub labels: [String; 2],
    /// Number of unordered node pairs spanning the two labels, counting
    /// `(u, u)` for same-label groups.
    pub size: u64,
    /// Recommendation events `(u, v ∈ ρ(u))` whose endpoints span the labels.
    pub events: u64,
    /// `events / size`; `None` when the group is empty.
    pub rate: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkBias {
    /// Population variance of the defined group rates.
    pub bias: f64,
    pub groups: Vec<GroupRate>,
}

impl NetworkBias {
    /// Label pairs whose rate is undefined because the group is empty.
    pub fn undefined_groups(&self) -> impl Iterator<Item = &GroupRate> {
        self.groups.iter().filter(|g| g.rate.is_none())
    }
}

fn pair_slot(i: usize, j: usize, z: usize) -> usize {
    let (a, b) = (i.min(j), i.max(j));
    // Row-major index into the upper triangle (including the diagonal).
    a * z - a * (a + 1) / 2 + b
}

/// Network-level bias. `restrict_to` limits which source nodes contribute
/// recommendation events; all nodes contribute when it is `None`.
pub fn network_bias_from_lists(
    lists: &[RecommendationList],
    attrs: &AttributeTable,
    restrict_to: Option<&NodeSet>,
) -> Result<NetworkBias> {
    let z = attrs.domain_size();
    let labels = &attrs.labels;
    let mut events = vec![0u64; z * (z + 1) / 2];
    for r in lists {
        attrs.check_covers(r)?;
        if r.source >= labels.len() {
            return Err(Error::NodeNotFound(format!("index {}", r.source)));
        }
        if restrict_to.is_some_and(|s| !s.contains(r.source)) {
            continue;
        }
        let from = labels[r.source];
        for &v in &r.items {
            events[pair_slot(from, labels[v], z)] += 1;
        }
    }

    let mut counts = vec![0u64; z];
    for &l in labels {
        counts[l] += 1;
    }
    let mut groups = Vec::with_capacity(events.len());
    for i in 0..z {
        for j in i..z {
            let size = if i == j {
                counts[i] * (counts[i] + 1) / 2
            } else {
                counts[i] * counts[j]
            };
            let hits = events[pair_slot(i, j, z)];
            groups.push(GroupRate {
                labels: [attrs.domain[i].clone(), attrs.domain[j].clone()],
                size,
                events: hits,
                rate: (size > 0).then(|| hits as f64 / size as f64),
            });
        }
    }

    let rates: Vec<f64> = groups.iter().filter_map(|g| g.rate).collect();
    let bias = if rates.is_empty() {
        0.0
    } else {
        let mean = rates.iter().sum::<f64>() / rates.len() as f64;
        rates.iter().map(|p| (p - mean) * (p - mean)).sum::<f64>() / rates.len() as f64
    };
    Ok(NetworkBias { bias, groups })
}

pub fn network_bias(
    g: &Graph,
    y: &EmbeddingMatrix,
    attrs: &AttributeTable,
    k: usize,
    restrict_to: Option<&NodeSet>,
) -> Result<NetworkBias> {
    check_attrs(g, attrs)?;
    let lists = recommended_sets(g, y, k)?;
    network_bias_from_lists(&lists, attrs, restrict_to)
}

fn check_attrs(g: &Graph, attrs: &AttributeTable) -> Result<()> {
    if attrs.len() != g.node_count() {
        return Err(Error::InvalidData(format!(
            "attribute {} covers {} nodes but the graph has {}",
            attrs.name,
            attrs.len(),
            g.node_count()
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroupScoreTable {
    pub k: usize,
    pub attribute: String,
    pub value: String,
    /// `score_2` per node.
    pub scores: Vec<f64>,
    pub attribute_bias: f64,
    pub network: NetworkBias,
}

/// Scores every node from precomputed recommendation lists (one per node, in
/// node order). Lists longer than `k` are truncated.
pub fn group_score_table_from_lists(
    lists: &[RecommendationList],
    attrs: &AttributeTable,
    k: usize,
    z: &str,
) -> Result<GroupScoreTable> {
    check_count(k)?;
    if lists.len() != attrs.len() {
        return Err(Error::InvalidData(format!(
            "{} recommendation lists for {} labeled nodes",
            lists.len(),
            attrs.len()
        )));
    }
    let zi = attrs.label_index(z)?;
    let lists: Vec<RecommendationList> = lists
        .iter()
        .map(|r| if r.items.len() > k { r.truncated(k) } else { r.clone() })
        .collect();
    for r in &lists {
        attrs.check_covers(r)?;
    }
    let uniform = 1.0 / attrs.domain_size() as f64;
    let scores = lists.iter().map(|r| uniform - share_of(r, &attrs.labels, zi)).collect();
    Ok(GroupScoreTable {
        k,
        attribute: attrs.name.clone(),
        value: z.to_string(),
        scores,
        attribute_bias: bias_from_lists(&lists, attrs, zi),
        network: network_bias_from_lists(&lists, attrs, None)?,
    })
}

pub fn group_score_table(
    g: &Graph,
    y: &EmbeddingMatrix,
    attrs: &AttributeTable,
    k: usize,
    z: &str,
) -> Result<GroupScoreTable> {
    check_attrs(g, attrs)?;
    attrs.label_index(z)?;
    let lists = recommended_sets(g, y, k)?;
    group_score_table_from_lists(&lists, attrs, k, z)
}
