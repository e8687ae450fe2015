//! Undirected simple graphs with dense internal indices and opaque external ids.
//!
//! Internal indices are assigned in ascending external-id order (see
//! [`compare_ids`]), so "smallest id first" tie-breaking anywhere in the crate
//! reduces to comparing indices.

use std::cmp::Ordering;
use std::collections::{HashMap, VecDeque};

use crate::error::{Error, Result};

/// Natural ordering of external node ids.
///
/// Ids that both parse as integers compare numerically, integer ids sort
/// before non-integer ids, and everything else compares as strings.
pub fn compare_ids(a: &str, b: &str) -> Ordering {
    match (a.parse::<i128>(), b.parse::<i128>()) {
        (Ok(x), Ok(y)) => x.cmp(&y).then_with(|| a.cmp(b)),
        (Ok(_), Err(_)) => Ordering::Less,
        (Err(_), Ok(_)) => Ordering::Greater,
        (Err(_), Err(_)) => a.cmp(b),
    }
}

/// Ordered set of internal node indices.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NodeSet(Vec<usize>);

impl NodeSet {
    pub fn new() -> Self {
        NodeSet(Vec::new())
    }

    pub fn members(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, u: usize) -> bool {
        self.0.binary_search(&u).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn is_subset(&self, other: &NodeSet) -> bool {
        self.0.iter().all(|&u| other.contains(u))
    }

    pub fn insert(&mut self, u: usize) -> bool {
        match self.0.binary_search(&u) {
            Ok(_) => false,
            Err(pos) => {
                self.0.insert(pos, u);
                true
            }
        }
    }
}

impl FromIterator<usize> for NodeSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut members: Vec<usize> = iter.into_iter().collect();
        members.sort_unstable();
        members.dedup();
        NodeSet(members)
    }
}

/// A k-hop neighborhood together with the exact hop distance of each member.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Neighborhood {
    pub nodes: NodeSet,
    /// `hops[i]` is the distance from the focal node to `nodes.members()[i]`.
    pub hops: Vec<u32>,
}

impl Neighborhood {
    pub fn hop_of(&self, v: usize) -> Option<u32> {
        self.nodes.members().binary_search(&v).ok().map(|i| self.hops[i])
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BuildReport {
    pub duplicate_edges: usize,
    pub self_loops: usize,
}

/// Collects nodes and edges by external id. Duplicate edges and self-loops are
/// dropped and counted.
#[derive(Debug, Default)]
pub struct GraphBuilder {
    ids: Vec<String>,
    lookup: HashMap<String, usize>,
    edges: Vec<(usize, usize)>,
    self_loops: usize,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_node(&mut self, id: &str) -> usize {
        if let Some(&ix) = self.lookup.get(id) {
            return ix;
        }
        let ix = self.ids.len();
        self.ids.push(id.to_string());
        self.lookup.insert(id.to_string(), ix);
        ix
    }

    pub fn add_edge(&mut self, a: &str, b: &str) {
        let a = self.add_node(a);
        let b = self.add_node(b);
        if a == b {
            self.self_loops += 1;
        } else {
            self.edges.push((a.min(b), a.max(b)));
        }
    }

    pub fn build(self) -> (Graph, BuildReport) {
        let mut order: Vec<usize> = (0..self.ids.len()).collect();
        order.sort_by(|&a, &b| compare_ids(&self.ids[a], &self.ids[b]));
        let mut rank = vec![0usize; order.len()];
        for (new, &old) in order.iter().enumerate() {
            rank[old] = new;
        }

        let mut edges: Vec<(usize, usize)> = self
            .edges
            .iter()
            .map(|&(a, b)| {
                let (a, b) = (rank[a], rank[b]);
                (a.min(b), a.max(b))
            })
            .collect();
        let raw_edges = edges.len();
        edges.sort_unstable();
        edges.dedup();

        let mut ids = self.ids;
        let node_ids: Vec<String> = order.iter().map(|&old| std::mem::take(&mut ids[old])).collect();
        let report = BuildReport {
            duplicate_edges: raw_edges - edges.len(),
            self_loops: self.self_loops,
        };
        (Graph::from_sorted_parts(node_ids, &edges), report)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Components {
    pub count: usize,
    pub labels: Vec<usize>,
}

/// A subgraph together with the parent-graph index of each of its nodes.
#[derive(Debug, Clone)]
pub struct Subgraph {
    pub graph: Graph,
    pub parent: Vec<usize>,
}

/// Immutable undirected simple graph.
#[derive(Debug, Clone)]
pub struct Graph {
    node_ids: Vec<String>,
    lookup: HashMap<String, usize>,
    adjacency: Vec<Vec<usize>>,
    edge_count: usize,
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.node_ids == other.node_ids && self.adjacency == other.adjacency
    }
}

impl Graph {
    /// Builds a graph from an explicit node list and edges given by external id.
    /// Edge endpoints missing from `nodes` are added.
    pub fn from_edges<S: AsRef<str>>(nodes: &[S], edges: &[(S, S)]) -> (Graph, BuildReport) {
        let mut builder = GraphBuilder::new();
        for id in nodes {
            builder.add_node(id.as_ref());
        }
        for (a, b) in edges {
            builder.add_edge(a.as_ref(), b.as_ref());
        }
        builder.build()
    }

    /// `node_ids` must already be in [`compare_ids`] order and `edges` must be
    /// deduplicated `(min, max)` index pairs without self-loops.
    fn from_sorted_parts(node_ids: Vec<String>, edges: &[(usize, usize)]) -> Graph {
        let n = node_ids.len();
        let mut adjacency = vec![Vec::new(); n];
        for &(a, b) in edges {
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        let lookup = node_ids.iter().enumerate().map(|(i, id)| (id.clone(), i)).collect();
        Graph {
            node_ids,
            lookup,
            adjacency,
            edge_count: edges.len(),
        }
    }

    /// Rebuilds a graph from index-based parts, validating every invariant.
    pub fn from_index_edges(node_ids: Vec<String>, edges: &[(usize, usize)]) -> Result<Graph> {
        let n = node_ids.len();
        if node_ids.windows(2).any(|w| compare_ids(&w[0], &w[1]) != Ordering::Less) {
            return Err(Error::InvalidData(
                "node ids must be unique and in ascending order".into(),
            ));
        }
        let mut normalized = Vec::with_capacity(edges.len());
        for &(a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::InvalidData(format!(
                    "edge ({a}, {b}) references a node outside 0..{n}"
                )));
            }
            if a == b {
                return Err(Error::InvalidData(format!("self-loop on node {a}")));
            }
            normalized.push((a.min(b), a.max(b)));
        }
        normalized.sort_unstable();
        let before = normalized.len();
        normalized.dedup();
        if normalized.len() != before {
            return Err(Error::InvalidData("duplicate edges".into()));
        }
        Ok(Graph::from_sorted_parts(node_ids, &normalized))
    }

    pub fn node_count(&self) -> usize {
        self.node_ids.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn node_ids(&self) -> &[String] {
        &self.node_ids
    }

    pub fn node_id(&self, u: usize) -> Result<&str> {
        self.node_ids
            .get(u)
            .map(String::as_str)
            .ok_or_else(|| Error::NodeNotFound(format!("index {u}")))
    }

    pub fn index_of(&self, id: &str) -> Result<usize> {
        self.lookup
            .get(id)
            .copied()
            .ok_or_else(|| Error::NodeNotFound(id.to_string()))
    }

    pub fn check_node(&self, u: usize) -> Result<()> {
        if u < self.node_count() {
            Ok(())
        } else {
            Err(Error::NodeNotFound(format!("index {u}")))
        }
    }

    /// Sorted neighbor indices of `u`. Panics if `u` is out of range.
    pub fn neighbors(&self, u: usize) -> &[usize] {
        &self.adjacency[u]
    }

    pub fn degree(&self, u: usize) -> Result<usize> {
        self.check_node(u)?;
        Ok(self.adjacency[u].len())
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adjacency.get(u).is_some_and(|list| list.binary_search(&v).is_ok())
    }

    /// Edges as `(min, max)` index pairs in ascending order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    pub fn max_degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Nodes at distance `1..=k` from `u`, excluding `u`.
    pub fn k_hop_neighborhood(&self, u: usize, k: usize) -> Result<Neighborhood> {
        self.check_node(u)?;
        if k == 0 {
            return Err(Error::InvalidArgument("hop count must be at least 1".into()));
        }
        let mut scratch = BfsScratch::new(self.node_count());
        let mut found: Vec<(usize, u32)> = scratch.run(self, u, k).to_vec();
        found.sort_unstable();
        let (nodes, hops) = found.into_iter().unzip::<_, _, Vec<_>, Vec<_>>();
        Ok(Neighborhood {
            nodes: NodeSet(nodes),
            hops,
        })
    }

    /// Induced subgraph on `{u}` and its k-hop neighborhood.
    pub fn ego_subgraph(&self, u: usize, k: usize) -> Result<Subgraph> {
        let mut members = self.k_hop_neighborhood(u, k)?.nodes;
        members.insert(u);
        self.induced_subgraph(&members)
    }

    pub fn induced_subgraph(&self, members: &NodeSet) -> Result<Subgraph> {
        if let Some(&bad) = members.members().iter().find(|&&v| v >= self.node_count()) {
            return Err(Error::NodeNotFound(format!("index {bad}")));
        }
        let parent = members.members().to_vec();
        let mut edges = Vec::new();
        for (local, &p) in parent.iter().enumerate() {
            for &q in &self.adjacency[p] {
                if q > p {
                    if let Ok(other) = parent.binary_search(&q) {
                        edges.push((local, other));
                    }
                }
            }
        }
        edges.sort_unstable();
        let ids = parent.iter().map(|&p| self.node_ids[p].clone()).collect();
        Ok(Subgraph {
            graph: Graph::from_sorted_parts(ids, &edges),
            parent,
        })
    }

    /// Component labels are assigned in order of each component's smallest index.
    pub fn connected_components(&self) -> Components {
        let n = self.node_count();
        let mut labels = vec![usize::MAX; n];
        let mut count = 0;
        let mut queue = VecDeque::new();
        for start in 0..n {
            if labels[start] != usize::MAX {
                continue;
            }
            labels[start] = count;
            queue.push_back(start);
            while let Some(v) = queue.pop_front() {
                for &w in &self.adjacency[v] {
                    if labels[w] == usize::MAX {
                        labels[w] = count;
                        queue.push_back(w);
                    }
                }
            }
            count += 1;
        }
        Components { count, labels }
    }

    /// Size of `adj(u) ∩ adj(v)` restricted to indices greater than `floor`.
    fn common_neighbors(&self, u: usize, v: usize, floor: Option<usize>) -> usize {
        let (a, b) = (&self.adjacency[u], &self.adjacency[v]);
        let skip = |list: &[usize]| floor.map_or(0, |f| list.partition_point(|&x| x <= f));
        let (mut i, mut j) = (skip(a), skip(b));
        let mut count = 0;
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                Ordering::Less => i += 1,
                Ordering::Greater => j += 1,
                Ordering::Equal => {
                    count += 1;
                    i += 1;
                    j += 1;
                }
            }
        }
        count
    }

    pub fn triangle_count(&self) -> u64 {
        self.edges()
            .map(|(u, v)| self.common_neighbors(u, v, Some(v)) as u64)
            .sum()
    }

    /// Average local clustering coefficient; nodes of degree < 2 contribute 0.
    pub fn clustering_coefficient(&self) -> f64 {
        let n = self.node_count();
        if n == 0 {
            return 0.0;
        }
        let total: f64 = (0..n)
            .map(|u| {
                let deg = self.adjacency[u].len();
                if deg < 2 {
                    return 0.0;
                }
                // Each closed wedge at u is seen once from each of its two ends.
                let closed: usize = self.adjacency[u]
                    .iter()
                    .map(|&v| self.common_neighbors(u, v, None))
                    .sum::<usize>()
                    / 2;
                closed as f64 / (deg * (deg - 1) / 2) as f64
            })
            .sum();
        total / n as f64
    }
}

/// Reusable breadth-first search state for repeated k-hop queries.
pub(crate) struct BfsScratch {
    seen: Vec<u32>,
    epoch: u32,
    found: Vec<(usize, u32)>,
}

impl BfsScratch {
    pub(crate) fn new(n: usize) -> Self {
        BfsScratch {
            seen: vec![0; n],
            epoch: 0,
            found: Vec::new(),
        }
    }

    /// Returns `(node, hop)` pairs in BFS order, excluding the source.
    pub(crate) fn run(&mut self, g: &Graph, source: usize, k: usize) -> &[(usize, u32)] {
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.seen.iter_mut().for_each(|s| *s = 0);
            self.epoch = 1;
        }
        let epoch = self.epoch;
        self.found.clear();
        self.seen[source] = epoch;
        for &v in g.neighbors(source) {
            self.seen[v] = epoch;
            self.found.push((v, 1));
        }
        let mut frontier_start = 0;
        let mut frontier_end = self.found.len();
        let mut hop = 1u32;
        while (hop as usize) < k && frontier_start < frontier_end {
            hop += 1;
            for i in frontier_start..frontier_end {
                let v = self.found[i].0;
                for &w in g.neighbors(v) {
                    if self.seen[w] != epoch {
                        self.seen[w] = epoch;
                        self.found.push((w, hop));
                    }
                }
            }
            frontier_start = frontier_end;
            frontier_end = self.found.len();
        }
        &self.found
    }
}
