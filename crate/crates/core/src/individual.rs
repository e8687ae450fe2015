//! Individual fairness: how far each node is embedded from its k-hop neighborhood.
//!
//! The raw score of `u` is the sum of squared embedding distances from `u` to
//! every node within `k` hops. Scores are then divided by degree and rescaled
//! by the maximum so the table lies in `[0, 1]`. Isolated nodes score 0 at
//! every stage.

use rayon::prelude::*;

use crate::embedding::{sq_distance, EmbeddingMatrix};
use crate::error::{Error, Result};
use crate::graph::{BfsScratch, Graph};

#[derive(Debug, Clone, PartialEq)]
pub struct IndividualScoreTable {
    pub hops: usize,
    pub raw: Vec<f64>,
    pub degree_normalized: Vec<f64>,
    pub normalized: Vec<f64>,
}

impl IndividualScoreTable {
    pub fn max_normalized(&self) -> f64 {
        self.normalized.iter().copied().fold(0.0, f64::max)
    }
}

pub(crate) fn check_aligned(g: &Graph, y: &EmbeddingMatrix) -> Result<()> {
    if g.node_count() != y.rows() {
        return Err(Error::InvalidData(format!(
            "embedding has {} rows but the graph has {} nodes",
            y.rows(),
            g.node_count()
        )));
    }
    Ok(())
}

fn check_hops(k: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::InvalidArgument("hop count must be at least 1".into()));
    }
    Ok(())
}

fn raw_score(g: &Graph, y: &EmbeddingMatrix, u: usize, k: usize, scratch: &mut BfsScratch) -> f64 {
    let origin = y.row(u);
    scratch
        .run(g, u, k)
        .iter()
        .map(|&(v, _)| sq_distance(origin, y.row(v)))
        .sum()
}

/// Sum of squared distances from `u` to every node within `k` hops.
pub fn individual_score(g: &Graph, y: &EmbeddingMatrix, u: usize, k: usize) -> Result<f64> {
    check_aligned(g, y)?;
    g.check_node(u)?;
    check_hops(k)?;
    let mut scratch = BfsScratch::new(g.node_count());
    Ok(raw_score(g, y, u, k, &mut scratch))
}

pub fn individual_score_table(g: &Graph, y: &EmbeddingMatrix, k: usize) -> Result<IndividualScoreTable> {
    check_aligned(g, y)?;
    check_hops(k)?;
    let n = g.node_count();
    let raw: Vec<f64> = (0..n)
        .into_par_iter()
        .map_init(|| BfsScratch::new(n), |scratch, u| raw_score(g, y, u, k, scratch))
        .collect();
    let degree_normalized: Vec<f64> = raw
        .iter()
        .enumerate()
        .map(|(u, &r)| match g.neighbors(u).len() {
            0 => 0.0,
            deg => r / deg as f64,
        })
        .collect();
    let max = degree_normalized.iter().copied().fold(0.0, f64::max);
    let normalized = if max > 0.0 {
        degree_normalized.iter().map(|&s| s / max).collect()
    } else {
        vec![0.0; n]
    };
    Ok(IndividualScoreTable {
        hops: k,
        raw,
        degree_normalized,
        normalized,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(nodes: &[&str], edges: &[(&str, &str)]) -> Graph {
        Graph::from_edges(nodes, edges).0
    }

    #[test]
    fn four_node_example() {
        let g = graph(&["A", "B", "C", "D"], &[("A", "B"), ("A", "C"), ("C", "D")]);
        let y = EmbeddingMatrix::from_rows(&[vec![0.0, 0.0], vec![4.0, 0.0], vec![0.0, 1.0], vec![8.0, 0.0]]).unwrap();
        let a = g.index_of("A").unwrap();
        assert_eq!(individual_score(&g, &y, a, 1).unwrap(), 17.0);
        assert_eq!(individual_score(&g, &y, a, 2).unwrap(), 81.0);
    }

    #[test]
    fn two_node_table() {
        let g = graph(&["u", "v"], &[("u", "v")]);
        let y = EmbeddingMatrix::from_rows(&[vec![0.0, 0.0], vec![2.0, 0.0]]).unwrap();
        let t = individual_score_table(&g, &y, 1).unwrap();
        assert_eq!(t.raw, vec![4.0, 4.0]);
        assert_eq!(t.degree_normalized, vec![4.0, 4.0]);
        assert_eq!(t.normalized, vec![1.0, 1.0]);
    }

    #[test]
    fn isolated_node_scores_zero() {
        let g = graph(&["a", "b", "z"], &[("a", "b")]);
        let y = EmbeddingMatrix::from_rows(&[vec![0.0], vec![1.0], vec![5.0]]).unwrap();
        let t = individual_score_table(&g, &y, 2).unwrap();
        let z = g.index_of("z").unwrap();
        assert_eq!(t.raw[z], 0.0);
        assert_eq!(t.degree_normalized[z], 0.0);
        assert_eq!(t.normalized[z], 0.0);
    }

    #[test]
    fn identical_embeddings_score_zero() {
        let g = graph(&["0", "1", "2"], &[("0", "1"), ("1", "2")]);
        let y = EmbeddingMatrix::from_rows(&vec![vec![1.5, -2.0]; 3]).unwrap();
        for k in 1..4 {
            let t = individual_score_table(&g, &y, k).unwrap();
            assert!(t.raw.iter().chain(&t.normalized).all(|&s| s == 0.0));
        }
    }

    #[test]
    fn errors() {
        let g = graph(&["0", "1"], &[("0", "1")]);
        let y = EmbeddingMatrix::from_rows(&[vec![0.0], vec![1.0]]).unwrap();
        assert!(matches!(individual_score(&g, &y, 5, 1), Err(Error::NodeNotFound(_))));
        assert!(matches!(individual_score(&g, &y, 0, 0), Err(Error::InvalidArgument(_))));
        let short = EmbeddingMatrix::from_rows(&[vec![0.0]]).unwrap();
        assert!(matches!(
            individual_score_table(&g, &short, 1),
            Err(Error::InvalidData(_))
        ));
    }
}
