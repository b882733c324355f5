//! Brute-force references for the exact structure of the spectrum.
//!
//! Nothing here shares code with the fast paths it checks: components come
//! from an all-pairs union-find, and the reference spectrum is a cyclic
//! Jacobi iteration on a dense `I - S` assembled from scratch.

use crate::datagen::PointSet;
use crate::error::{invalid, Error, Result};
use crate::graph::SimilarityGraph;

/// Largest graph accepted by [`dense_reference_spectrum`].
pub const REFERENCE_SPECTRUM_LIMIT: usize = 2000;

/// Connected components of the `h`-ball graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentLabeling {
    /// Component id per point; ids are numbered in order of each
    /// component's smallest member index.
    pub labels: Vec<usize>,
    pub count: usize,
}

impl ComponentLabeling {
    /// Member indices of every component, ascending.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.count];
        for (i, &l) in self.labels.iter().enumerate() {
            out[l].push(i);
        }
        out
    }
}

struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        while self.parent[x] != root {
            let next = self.parent[x];
            self.parent[x] = root;
            x = next;
        }
        root
    }

    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        if a == b {
            return;
        }
        match self.rank[a].cmp(&self.rank[b]) {
            std::cmp::Ordering::Less => self.parent[a] = b,
            std::cmp::Ordering::Greater => self.parent[b] = a,
            std::cmp::Ordering::Equal => {
                self.parent[b] = a;
                self.rank[a] += 1;
            }
        }
    }
}

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    let mut s = 0.0;
    for k in 0..a.len() {
        let d = a[k] - b[k];
        s += d * d;
    }
    s
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    squared_distance(a, b).sqrt()
}

/// Union-find over every pair at distance strictly less than `h`.
pub fn connected_components(points: &PointSet, h: f64) -> Result<ComponentLabeling> {
    if points.is_empty() {
        return Err(invalid("no points"));
    }
    if !(h > 0.0) {
        return Err(invalid(format!("scale h must be positive, got {h}")));
    }
    let n = points.len();
    let h2 = h * h;
    let mut uf = UnionFind::new(n);
    for i in 0..n {
        for j in i + 1..n {
            // squared comparison, matching the graph's edge predicate
            if squared_distance(points.point(i), points.point(j)) < h2 {
                uf.union(i, j);
            }
        }
    }
    let mut id_of_root = vec![usize::MAX; n];
    let mut labels = Vec::with_capacity(n);
    let mut count = 0;
    for i in 0..n {
        let r = uf.find(i);
        if id_of_root[r] == usize::MAX {
            id_of_root[r] = count;
            count += 1;
        }
        labels.push(id_of_root[r]);
    }
    Ok(ComponentLabeling { labels, count })
}

/// Smallest distance between two points in different components (`d_min`).
pub fn min_intercomponent_distance(points: &PointSet, labeling: &ComponentLabeling) -> Result<f64> {
    if labeling.labels.len() != points.len() {
        return Err(invalid("labeling does not match the point set"));
    }
    if labeling.count < 2 {
        return Err(Error::SingleComponent);
    }
    let mut best = f64::INFINITY;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            if labeling.labels[i] != labeling.labels[j] {
                best = best.min(distance(points.point(i), points.point(j)));
            }
        }
    }
    Ok(best)
}

/// Full ascending spectrum of `I - S`, by cyclic Jacobi rotations on a dense
/// copy rebuilt from `K`.
pub fn dense_reference_spectrum(g: &SimilarityGraph) -> Result<Vec<f64>> {
    let n = g.size();
    if n > REFERENCE_SPECTRUM_LIMIT {
        return Err(Error::TooLarge {
            size: n,
            limit: REFERENCE_SPECTRUM_LIMIT,
        });
    }
    let k = g.to_dense();
    // degrees summed right to left, independently of the graph's own
    let deg: Vec<f64> = k.iter().map(|row| row.iter().rev().sum()).collect();
    let mut a = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            let s = k[i][j] / (deg[i] * deg[j]).sqrt();
            a[i][j] = if i == j { 1.0 - s } else { -s };
        }
    }
    let mut eig = jacobi_eigenvalues(a);
    eig.sort_by(f64::total_cmp);
    Ok(eig)
}

fn jacobi_eigenvalues(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let n = a.len();
    for sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        if off == 0.0 {
            break;
        }
        let threshold = if sweep < 3 { 0.2 * off.sqrt() / (n * n) as f64 } else { 0.0 };
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p][q];
                let g = 100.0 * apq.abs();
                if sweep > 3
                    && a[p][p].abs() + g == a[p][p].abs()
                    && a[q][q].abs() + g == a[q][q].abs()
                {
                    a[p][q] = 0.0;
                    a[q][p] = 0.0;
                    continue;
                }
                if apq.abs() <= threshold {
                    continue;
                }
                let theta = 0.5 * (a[q][q] - a[p][p]) / apq;
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for r in 0..n {
                    let (arp, arq) = (a[r][p], a[r][q]);
                    a[r][p] = c * arp - s * arq;
                    a[r][q] = s * arp + c * arq;
                }
                for r in 0..n {
                    let (apr, aqr) = (a[p][r], a[q][r]);
                    a[p][r] = c * apr - s * aqr;
                    a[q][r] = s * apr + c * aqr;
                }
                a[p][q] = 0.0;
                a[q][p] = 0.0;
            }
        }
    }
    (0..n).map(|i| a[i][i]).collect()
}
