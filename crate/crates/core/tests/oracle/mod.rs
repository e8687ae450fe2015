//! Brute-force reference implementations and random instance generation,
//! shared by the integration tests and the acceptance suite.
#![allow(dead_code)]

use embedfair_core::{AttributeTable, EmbeddingMatrix, Graph, NodeSet};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug)]
pub struct Instance {
    pub g: Graph,
    pub y: EmbeddingMatrix,
    pub attrs: AttributeTable,
}

/// Random graph with `n` nodes named "0".."n-1". The ids sort numerically, so
/// index `i` is node `"i"`.
pub fn random_graph(rng: &mut impl Rng, n: usize, p: f64) -> Graph {
    let ids: Vec<String> = (0..n).map(|i| i.to_string()).collect();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.random::<f64>() < p {
                edges.push((ids[i].clone(), ids[j].clone()));
            }
        }
    }
    Graph::from_edges(&ids, &edges).0
}

/// Continuous entries, or small integers when `ties` is set so that equal
/// similarities actually occur.
pub fn random_embedding(rng: &mut impl Rng, n: usize, d: usize, ties: bool) -> EmbeddingMatrix {
    let values = (0..n * d)
        .map(|_| {
            if ties {
                rng.random_range(-2i32..=2) as f64
            } else {
                rng.random::<f64>() * 4.0 - 2.0
            }
        })
        .collect();
    EmbeddingMatrix::new(n, d, values).unwrap()
}

pub fn random_instance(seed: u64, max_n: usize, max_d: usize) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(2..=max_n);
    let d = rng.random_range(1..=max_d);
    let p = rng.random::<f64>();
    let g = random_graph(&mut rng, n, p);
    let ties = rng.random::<f64>() < 0.3;
    let y = random_embedding(&mut rng, n, d, ties);
    let labels: Vec<&str> = (0..n).map(|_| if rng.random::<bool>() { "1" } else { "0" }).collect();
    let attrs = AttributeTable::new("attr", &labels, &["0", "1"]).unwrap();
    Instance { g, y, attrs }
}

pub fn adjacency_matrix(g: &Graph) -> Vec<Vec<u64>> {
    let n = g.node_count();
    let mut a = vec![vec![0u64; n]; n];
    for (u, v) in g.edges() {
        a[u][v] = 1;
        a[v][u] = 1;
    }
    a
}

/// All-pairs hop distances by Floyd–Warshall; `None` when unreachable.
pub fn hop_distances(g: &Graph) -> Vec<Vec<Option<usize>>> {
    let n = g.node_count();
    let a = adjacency_matrix(g);
    let mut d: Vec<Vec<Option<usize>>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        Some(0)
                    } else if a[i][j] == 1 {
                        Some(1)
                    } else {
                        None
                    }
                })
                .collect()
        })
        .collect();
    for m in 0..n {
        for i in 0..n {
            for j in 0..n {
                if let (Some(x), Some(y)) = (d[i][m], d[m][j]) {
                    if d[i][j].is_none_or(|cur| x + y < cur) {
                        d[i][j] = Some(x + y);
                    }
                }
            }
        }
    }
    d
}

pub fn neighborhood(dist: &[Vec<Option<usize>>], u: usize, k: usize) -> Vec<usize> {
    (0..dist.len())
        .filter(|&v| matches!(dist[u][v], Some(h) if h >= 1 && h <= k))
        .collect()
}

fn sq_dist(y: &EmbeddingMatrix, u: usize, v: usize) -> f64 {
    y.row(u).iter().zip(y.row(v)).map(|(a, b)| (a - b).powi(2)).sum()
}

fn dot(y: &EmbeddingMatrix, u: usize, v: usize) -> f64 {
    y.row(u).iter().zip(y.row(v)).map(|(a, b)| a * b).sum()
}

pub fn individual_raw(g: &Graph, y: &EmbeddingMatrix, k: usize) -> Vec<f64> {
    let dist = hop_distances(g);
    (0..g.node_count())
        .map(|u| neighborhood(&dist, u, k).into_iter().map(|v| sq_dist(y, u, v)).sum())
        .collect()
}

/// Full sort of every non-adjacent candidate by descending similarity, then
/// ascending index.
pub fn recommendations(g: &Graph, y: &EmbeddingMatrix, k: usize) -> Vec<Vec<usize>> {
    let a = adjacency_matrix(g);
    let n = g.node_count();
    (0..n)
        .map(|u| {
            let mut c: Vec<usize> = (0..n).filter(|&v| v != u && a[u][v] == 0).collect();
            c.sort_by(|&p, &q| dot(y, u, q).partial_cmp(&dot(y, u, p)).unwrap().then(p.cmp(&q)));
            c.truncate(k);
            c
        })
        .collect()
}

pub fn label_of(attrs: &AttributeTable, u: usize) -> &str {
    attrs.label_of(u)
}

pub fn share(list: &[usize], attrs: &AttributeTable, z: &str) -> f64 {
    if list.is_empty() {
        return 0.0;
    }
    list.iter().filter(|&&v| attrs.label_of(v) == z).count() as f64 / list.len() as f64
}

pub fn user_score(list: &[usize], attrs: &AttributeTable, z: &str) -> f64 {
    1.0 / attrs.domain().len() as f64 - share(list, attrs, z)
}

pub fn attribute_bias(lists: &[Vec<usize>], attrs: &AttributeTable, z: &str) -> f64 {
    let shares: Vec<f64> = lists
        .iter()
        .filter(|l| !l.is_empty())
        .map(|l| share(l, attrs, z))
        .collect();
    if shares.is_empty() {
        return 0.0;
    }
    1.0 / attrs.domain().len() as f64 - shares.iter().sum::<f64>() / shares.len() as f64
}

pub type GroupRate = ((String, String), Option<f64>);

/// Per-group rates keyed by sorted label pair, then their population
/// variance. Group sizes come from enumerating unordered pairs `a ≤ b`.
pub fn network_bias(
    lists: &[Vec<usize>],
    attrs: &AttributeTable,
    restrict_to: Option<&NodeSet>,
) -> (f64, Vec<GroupRate>) {
    let n = lists.len();
    let key = |a: usize, b: usize| {
        let (x, y) = (attrs.label_of(a).to_string(), attrs.label_of(b).to_string());
        let ix = |s: &str| attrs.domain().iter().position(|d| d == s).unwrap();
        if ix(&x) <= ix(&y) {
            (x, y)
        } else {
            (y, x)
        }
    };
    let mut out = Vec::new();
    let domain = attrs.domain();
    for i in 0..domain.len() {
        for j in i..domain.len() {
            let pair = (domain[i].clone(), domain[j].clone());
            let mut size = 0u64;
            for a in 0..n {
                for b in a..n {
                    if key(a, b) == pair {
                        size += 1;
                    }
                }
            }
            let mut events = 0u64;
            for (u, list) in lists.iter().enumerate() {
                if restrict_to.is_some_and(|s| !s.contains(u)) {
                    continue;
                }
                events += list.iter().filter(|&&v| key(u, v) == pair).count() as u64;
            }
            out.push((pair, (size > 0).then(|| events as f64 / size as f64)));
        }
    }
    let rates: Vec<f64> = out.iter().filter_map(|(_, p)| *p).collect();
    let bias = if rates.is_empty() {
        0.0
    } else {
        let mean = rates.iter().sum::<f64>() / rates.len() as f64;
        rates.iter().map(|p| (p - mean).powi(2)).sum::<f64>() / rates.len() as f64
    };
    (bias, out)
}

/// `trace(A³) / 6`.
pub fn triangle_count(g: &Graph) -> u64 {
    let a = adjacency_matrix(g);
    let n = a.len();
    let mul = |x: &Vec<Vec<u64>>, y: &Vec<Vec<u64>>| {
        let mut z = vec![vec![0u64; n]; n];
        for i in 0..n {
            for m in 0..n {
                for j in 0..n {
                    z[i][j] += x[i][m] * y[m][j];
                }
            }
        }
        z
    };
    let a3 = mul(&mul(&a, &a), &a);
    (0..n).map(|i| a3[i][i]).sum::<u64>() / 6
}

/// Average local clustering by enumerating every wedge.
pub fn clustering_coefficient(g: &Graph) -> f64 {
    let a = adjacency_matrix(g);
    let n = a.len();
    if n == 0 {
        return 0.0;
    }
    let mut total = 0.0;
    for u in 0..n {
        let nb: Vec<usize> = (0..n).filter(|&v| a[u][v] == 1).collect();
        if nb.len() < 2 {
            continue;
        }
        let mut closed = 0;
        let mut wedges = 0;
        for i in 0..nb.len() {
            for j in i + 1..nb.len() {
                wedges += 1;
                closed += a[nb[i]][nb[j]];
            }
        }
        total += closed as f64 / wedges as f64;
    }
    total / n as f64
}

pub fn component_count(g: &Graph) -> usize {
    let dist = hop_distances(g);
    let n = g.node_count();
    let mut seen = vec![false; n];
    let mut count = 0;
    for u in 0..n {
        if !seen[u] {
            count += 1;
            for v in 0..n {
                if dist[u][v].is_some() {
                    seen[v] = true;
                }
            }
        }
    }
    count
}

/// Top-two PCA projection through nalgebra's dense symmetric eigensolver,
/// with the same sign convention (largest-magnitude entry positive).
pub struct PcaOracle {
    pub components: [Vec<f64>; 2],
    pub variances: [f64; 2],
    pub points: Vec<[f64; 2]>,
}

pub fn pca(y: &EmbeddingMatrix) -> PcaOracle {
    use nalgebra::{DMatrix, SymmetricEigen};
    let (n, d) = (y.rows(), y.dim());
    let x = DMatrix::from_row_slice(n, d, y.values());
    let mean = x.row_mean();
    let mut centered = x.clone();
    for mut row in centered.row_iter_mut() {
        row -= &mean;
    }
    let cov = centered.transpose() * &centered / (n as f64 - 1.0);
    let eig = SymmetricEigen::new(cov);
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].partial_cmp(&eig.eigenvalues[a]).unwrap());
    let axis = |rank: usize| -> (Vec<f64>, f64) {
        let Some(&col) = order.get(rank) else {
            return (vec![0.0; d], 0.0);
        };
        let mut v: Vec<f64> = eig.eigenvectors.column(col).iter().copied().collect();
        let big = v
            .iter()
            .copied()
            .fold(0.0f64, |m, x| if x.abs() > m.abs() { x } else { m });
        if big < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
        (v, eig.eigenvalues[col].max(0.0))
    };
    let (c1, v1) = axis(0);
    let (c2, v2) = axis(1);
    let points = (0..n)
        .map(|u| {
            let row = centered.row(u);
            let p = |c: &[f64]| row.iter().zip(c).map(|(a, b)| a * b).sum::<f64>();
            [p(&c1), p(&c2)]
        })
        .collect();
    PcaOracle {
        components: [c1, c2],
        variances: [v1, v2],
        points,
    }
}
