//! Fruchterman–Reingold spring layout and long-edge filtering for the overview.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;

pub const DEFAULT_ITERATIONS: usize = 200;
pub const DEFAULT_KEEP_FRACTION: f64 = 0.10;

/// Above this node count repulsion is only evaluated between nodes in
/// neighboring grid cells.
const GRID_THRESHOLD: usize = 1000;
const MIN_DISTANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Layout {
    pub seed: u64,
    pub iterations: usize,
    /// Per-node coordinates normalized into the unit square.
    pub positions: Vec<[f64; 2]>,
}

/// Deterministic Fruchterman–Reingold layout on a unit-area frame.
///
/// Repulsion is `k²/d` between every pair (grid-limited to `d < 2k` for large
/// graphs), attraction is `d²/k` along edges, with `k = sqrt(area / n)`. The
/// temperature cools linearly from `0.1·sqrt(area)` to 0. Final positions are
/// scaled uniformly to fit the unit square and centered.
pub fn spring_layout(g: &Graph, seed: u64, iterations: usize) -> Layout {
    let n = g.node_count();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pos: Vec<[f64; 2]> = (0..n).map(|_| [rng.random::<f64>(), rng.random::<f64>()]).collect();

    if n > 1 {
        let area = 1.0f64;
        let k = (area / n as f64).sqrt();
        let t0 = 0.1 * area.sqrt();
        for step in 0..iterations {
            let temperature = t0 * (1.0 - step as f64 / iterations as f64);
            let disp = if n > GRID_THRESHOLD {
                let grid = Grid::new(&pos, 2.0 * k);
                forces(g, &pos, k, |u, acc| grid.for_near(&pos, u, acc))
            } else {
                forces(g, &pos, k, |u, acc| {
                    for v in 0..n {
                        if v != u {
                            acc(v);
                        }
                    }
                })
            };
            for (p, d) in pos.iter_mut().zip(&disp) {
                let len = (d[0] * d[0] + d[1] * d[1]).sqrt();
                if len > 0.0 {
                    let step = len.min(temperature) / len;
                    p[0] += d[0] * step;
                    p[1] += d[1] * step;
                }
            }
        }
    }

    Layout {
        seed,
        iterations,
        positions: normalize(pos),
    }
}

/// Net displacement of every node. `visit(u, acc)` must call `acc(v)` for each
/// node `v` that repels `u`.
fn forces<F>(g: &Graph, pos: &[[f64; 2]], k: f64, visit: F) -> Vec<[f64; 2]>
where
    F: Fn(usize, &mut dyn FnMut(usize)) + Sync,
{
    let k2 = k * k;
    (0..pos.len())
        .into_par_iter()
        .map(|u| {
            let mut d = [0.0f64; 2];
            let pu = pos[u];
            let mut repel = |v: usize| {
                let (dx, dy, dist) = offset(pu, pos[v], u, v);
                let f = k2 / dist;
                d[0] += dx / dist * f;
                d[1] += dy / dist * f;
            };
            visit(u, &mut repel);
            for &v in g.neighbors(u) {
                let (dx, dy, dist) = offset(pu, pos[v], u, v);
                let f = dist * dist / k;
                d[0] -= dx / dist * f;
                d[1] -= dy / dist * f;
            }
            d
        })
        .collect()
}

/// Vector from `b` to `a` and its length, nudging coincident points apart in
/// an index-dependent direction.
fn offset(a: [f64; 2], b: [f64; 2], ia: usize, ib: usize) -> (f64, f64, f64) {
    let (mut dx, dy) = (a[0] - b[0], a[1] - b[1]);
    let mut dist = (dx * dx + dy * dy).sqrt();
    if dist < MIN_DISTANCE {
        dx = if ia < ib { -MIN_DISTANCE } else { MIN_DISTANCE };
        dist = MIN_DISTANCE;
        return (dx, 0.0, dist);
    }
    (dx, dy, dist)
}

struct Grid {
    origin: [f64; 2],
    cell: f64,
    cols: usize,
    rows: usize,
    /// Node indices grouped by cell, in ascending index order within a cell.
    members: Vec<usize>,
    starts: Vec<usize>,
}

impl Grid {
    fn new(pos: &[[f64; 2]], cell: f64) -> Grid {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for p in pos {
            for a in 0..2 {
                lo[a] = lo[a].min(p[a]);
                hi[a] = hi[a].max(p[a]);
            }
        }
        let span = |a: usize| (((hi[a] - lo[a]) / cell).floor() as usize + 1).clamp(1, 1024);
        let (cols, rows) = (span(0), span(1));
        let mut grid = Grid {
            origin: lo,
            cell,
            cols,
            rows,
            members: Vec::with_capacity(pos.len()),
            starts: vec![0; cols * rows + 1],
        };
        let cells: Vec<usize> = pos.iter().map(|p| grid.cell_of(p)).collect();
        for &c in &cells {
            grid.starts[c + 1] += 1;
        }
        for i in 0..cols * rows {
            grid.starts[i + 1] += grid.starts[i];
        }
        let mut fill = grid.starts.clone();
        grid.members.resize(pos.len(), 0);
        for (u, &c) in cells.iter().enumerate() {
            grid.members[fill[c]] = u;
            fill[c] += 1;
        }
        grid
    }

    fn coords(&self, p: &[f64; 2]) -> (usize, usize) {
        let cx = (((p[0] - self.origin[0]) / self.cell) as usize).min(self.cols - 1);
        let cy = (((p[1] - self.origin[1]) / self.cell) as usize).min(self.rows - 1);
        (cx, cy)
    }

    fn cell_of(&self, p: &[f64; 2]) -> usize {
        let (cx, cy) = self.coords(p);
        cy * self.cols + cx
    }

    /// Visits every `v ≠ u` in the 3×3 block of cells around `u` that lies
    /// within one cell width.
    fn for_near(&self, pos: &[[f64; 2]], u: usize, mut f: impl FnMut(usize)) {
        let pu = pos[u];
        let (cx, cy) = self.coords(&pu);
        let limit = self.cell * self.cell;
        for y in cy.saturating_sub(1)..=(cy + 1).min(self.rows - 1) {
            for x in cx.saturating_sub(1)..=(cx + 1).min(self.cols - 1) {
                let c = y * self.cols + x;
                for &v in &self.members[self.starts[c]..self.starts[c + 1]] {
                    if v == u {
                        continue;
                    }
                    let (dx, dy) = (pu[0] - pos[v][0], pu[1] - pos[v][1]);
                    if dx * dx + dy * dy < limit {
                        f(v);
                    }
                }
            }
        }
    }
}

fn normalize(mut pos: Vec<[f64; 2]>) -> Vec<[f64; 2]> {
    if pos.is_empty() {
        return pos;
    }
    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    for p in &pos {
        for a in 0..2 {
            lo[a] = lo[a].min(p[a]);
            hi[a] = hi[a].max(p[a]);
        }
    }
    let range = [hi[0] - lo[0], hi[1] - lo[1]];
    let scale = range[0].max(range[1]);
    for p in &mut pos {
        for a in 0..2 {
            p[a] = if scale > 0.0 {
                (p[a] - lo[a]) / scale + (1.0 - range[a] / scale) / 2.0
            } else {
                0.5
            };
        }
    }
    pos
}

/// Number of edges kept for `keep_fraction` of `m`: `⌈keep_fraction · m⌉`,
/// with products within `1e-9` of an integer treated as that integer.
pub fn salient_edge_count(m: usize, keep_fraction: f64) -> usize {
    let x = keep_fraction * m as f64;
    let nearest = x.round();
    let count = if (x - nearest).abs() <= 1e-9 * nearest.max(1.0) {
        nearest
    } else {
        x.ceil()
    };
    (count as usize).min(m)
}

/// The `⌈keep_fraction · m⌉` longest edges under `layout`, longest first.
/// Equal lengths are ordered by ascending `(min, max)` index pair.
pub fn filter_salient_edges(g: &Graph, layout: &Layout, keep_fraction: f64) -> Result<Vec<(usize, usize)>> {
    if !(keep_fraction > 0.0 && keep_fraction <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "keep fraction must be in (0, 1], got {keep_fraction}"
        )));
    }
    if layout.positions.len() != g.node_count() {
        return Err(Error::InvalidData(format!(
            "layout has {} positions for {} nodes",
            layout.positions.len(),
            g.node_count()
        )));
    }
    let mut edges: Vec<(f64, (usize, usize))> = g
        .edges()
        .map(|(u, v)| {
            let (a, b) = (layout.positions[u], layout.positions[v]);
            let len = ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt();
            (len, (u, v))
        })
        .collect();
    edges.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    edges.truncate(salient_edge_count(g.edge_count(), keep_fraction));
    Ok(edges.into_iter().map(|(_, e)| e).collect())
}
