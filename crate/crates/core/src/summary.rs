//! Network-level statistics backing the overview's summary panel.

use serde::{Deserialize, Serialize};

use crate::graph::Graph;

pub const DEFAULT_BINS: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramBin {
    pub lower: f64,
    pub upper: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryReport {
    pub n: usize,
    pub m: usize,
    pub density: f64,
    pub average_degree: f64,
    pub clustering_coefficient: f64,
    pub triangle_count: u64,
    pub component_count: usize,
    pub max_degree: usize,
    pub degree_histogram: Vec<HistogramBin>,
}

/// Summary statistics plus an equal-width degree histogram over
/// `[0, max degree]` (last bin closed). An edgeless graph uses the span `[0, 1]`.
pub fn summarize(g: &Graph, bin_count: usize) -> SummaryReport {
    let n = g.node_count();
    let m = g.edge_count();
    if n == 0 {
        return SummaryReport {
            n: 0,
            m: 0,
            density: 0.0,
            average_degree: 0.0,
            clustering_coefficient: 0.0,
            triangle_count: 0,
            component_count: 0,
            max_degree: 0,
            degree_histogram: Vec::new(),
        };
    }
    let density = if n > 1 {
        2.0 * m as f64 / (n as f64 * (n - 1) as f64)
    } else {
        0.0
    };
    let max_degree = g.max_degree();
    SummaryReport {
        n,
        m,
        density,
        average_degree: 2.0 * m as f64 / n as f64,
        clustering_coefficient: g.clustering_coefficient(),
        triangle_count: g.triangle_count(),
        component_count: g.connected_components().count,
        max_degree,
        degree_histogram: degree_histogram(g, bin_count.max(1), max_degree),
    }
}

fn degree_histogram(g: &Graph, bins: usize, max_degree: usize) -> Vec<HistogramBin> {
    let span = max_degree.max(1);
    let mut counts = vec![0usize; bins];
    for u in 0..g.node_count() {
        let deg = g.neighbors(u).len();
        counts[(deg * bins / span).min(bins - 1)] += 1;
    }
    counts
        .into_iter()
        .enumerate()
        .map(|(i, count)| HistogramBin {
            lower: (i * span) as f64 / bins as f64,
            upper: ((i + 1) * span) as f64 / bins as f64,
            count,
        })
        .collect()
}
