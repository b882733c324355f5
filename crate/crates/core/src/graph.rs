//! Compact-support similarity graph on the retained points and its Markov
//! and symmetric normalizations.
//!
//! `K(i, j) = k(|X_j - X_i| / h)` with the bump profile
//! `k(r) = exp(-1 / (1 - r)^2)` for `r < 1` and `0` otherwise. The diagonal
//! is included, so every degree is at least `k(0) = e^-1`.
//!
//! Pairs with `|X_i - X_j| < h` are always stored as structural entries. Their
//! value underflows to `0.0` in `f64` once `r` exceeds roughly `0.963`, so
//! tests of the sparsity pattern go through [`SimilarityGraph::has_edge`]
//! rather than the stored value.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::datagen::{format_float, PointSet};
use crate::density::{sq_dist, LevelSetExtraction};
use crate::error::{invalid, Result};

/// `k(0) = e^-1`, the largest value the kernel takes.
pub const BUMP_PEAK: f64 = 0.367_879_441_171_442_33;

/// Bump profile on the normalized radius `r = |u| / h`.
pub fn bump_profile(r: f64) -> f64 {
    if r < 1.0 {
        let s = 1.0 - r;
        (-1.0 / (s * s)).exp()
    } else {
        0.0
    }
}

/// `k_h(u) = exp(-1 / (1 - |u/h|)^2)` inside the open ball of radius `h`,
/// zero outside.
pub fn bump_kernel(u: &[f64], h: f64) -> f64 {
    let norm = u.iter().map(|x| x * x).sum::<f64>().sqrt();
    bump_profile(norm / h)
}

/// Symmetric sparse similarity matrix over the retained points. Only the
/// upper triangle (diagonal included) is stored, row by row with ascending
/// columns.
#[derive(Debug, Clone)]
pub struct SimilarityGraph {
    h: f64,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
    degrees: Vec<f64>,
    point_index_map: Vec<usize>,
}

impl SimilarityGraph {
    fn from_upper_rows(h: f64, rows: Vec<Vec<(usize, f64)>>) -> Self {
        let n = rows.len();
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        let mut degrees = vec![0.0; n];
        row_ptr.push(0);
        for (i, row) in rows.into_iter().enumerate() {
            for (j, v) in row {
                degrees[i] += v;
                if j != i {
                    degrees[j] += v;
                }
                cols.push(j);
                vals.push(v);
            }
            row_ptr.push(cols.len());
        }
        Self {
            h,
            row_ptr,
            cols,
            vals,
            degrees,
            point_index_map: (0..n).collect(),
        }
    }

    /// `j(n)`.
    pub fn size(&self) -> usize {
        self.degrees.len()
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    /// `D(i, i) = sum_j K(i, j)`.
    pub fn degrees(&self) -> &[f64] {
        &self.degrees
    }

    /// Graph row -> index in the original sample.
    pub fn point_index_map(&self) -> &[usize] {
        &self.point_index_map
    }

    /// Number of stored upper-triangle entries, diagonal included.
    pub fn stored_entries(&self) -> usize {
        self.cols.len()
    }

    /// Stored `(i, j, K(i, j))` with `i <= j`.
    pub fn upper_entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.size()).flat_map(move |i| {
            let range = self.row_ptr[i]..self.row_ptr[i + 1];
            self.cols[range.clone()]
                .iter()
                .zip(&self.vals[range])
                .map(move |(&j, &v)| (i, j, v))
        })
    }

    fn find(&self, i: usize, j: usize) -> Option<usize> {
        let (a, b) = if i <= j { (i, j) } else { (j, i) };
        let range = self.row_ptr[a]..self.row_ptr[a + 1];
        self.cols[range.clone()]
            .binary_search(&b)
            .ok()
            .map(|k| range.start + k)
    }

    /// `K(i, j)`.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.find(i, j).map_or(0.0, |k| self.vals[k])
    }

    /// Whether `|X_i - X_j| < h`, independent of kernel underflow.
    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.find(i, j).is_some()
    }

    /// `y = K x`.
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.size()];
        for (i, j, v) in self.upper_entries() {
            y[i] += v * x[j];
            if i != j {
                y[j] += v * x[i];
            }
        }
        y
    }

    /// Dense `K`, row-major.
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let n = self.size();
        let mut k = vec![vec![0.0; n]; n];
        for (i, j, v) in self.upper_entries() {
            k[i][j] = v;
            k[j][i] = v;
        }
        k
    }

    /// `Q = D^-1 K`.
    pub fn markov(&self) -> MarkovMatrix<'_> {
        MarkovMatrix { graph: self }
    }

    /// `S = D^-1/2 K D^-1/2`.
    pub fn symmetric(&self) -> SymmetricMatrix<'_> {
        SymmetricMatrix { graph: self }
    }

    /// Writes the lower triangle as a 1-based Matrix Market coordinate file.
    pub fn write_triplets(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut out = BufWriter::new(File::create(path)?);
        writeln!(out, "%%MatrixMarket matrix coordinate real symmetric")?;
        writeln!(out, "% bump similarity, h = {}", format_float(self.h))?;
        writeln!(out, "{} {} {}", self.size(), self.size(), self.stored_entries())?;
        for (i, j, v) in self.upper_entries() {
            writeln!(out, "{} {} {}", j + 1, i + 1, format_float(v))?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Row-stochastic view `Q = D^-1 K`.
#[derive(Debug, Clone, Copy)]
pub struct MarkovMatrix<'g> {
    graph: &'g SimilarityGraph,
}

impl MarkovMatrix<'_> {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.graph.get(i, j) / self.graph.degrees[i]
    }

    /// `y = Q x`.
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = self.graph.matvec(x);
        for (yi, d) in y.iter_mut().zip(&self.graph.degrees) {
            *yi /= d;
        }
        y
    }

    pub fn row_sums(&self) -> Vec<f64> {
        self.matvec(&vec![1.0; self.graph.size()])
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut q = self.graph.to_dense();
        for (row, d) in q.iter_mut().zip(&self.graph.degrees) {
            row.iter_mut().for_each(|v| *v /= d);
        }
        q
    }
}

/// Symmetric view `S = D^-1/2 K D^-1/2`, conjugate to `Q`.
#[derive(Debug, Clone, Copy)]
pub struct SymmetricMatrix<'g> {
    graph: &'g SimilarityGraph,
}

impl SymmetricMatrix<'_> {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let d = &self.graph.degrees;
        self.graph.get(i, j) / (d[i].sqrt() * d[j].sqrt())
    }

    /// `y = S x`.
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let d = &self.graph.degrees;
        let scaled: Vec<f64> = x.iter().zip(d).map(|(v, di)| v / di.sqrt()).collect();
        let mut y = self.graph.matvec(&scaled);
        for (yi, di) in y.iter_mut().zip(d) {
            *yi /= di.sqrt();
        }
        y
    }

    /// Stored `(i, j, S(i, j))` with `i <= j`.
    pub fn upper_entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        let d = &self.graph.degrees;
        self.graph
            .upper_entries()
            .map(move |(i, j, v)| (i, j, v / (d[i].sqrt() * d[j].sqrt())))
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let n = self.graph.size();
        let mut s = vec![vec![0.0; n]; n];
        for (i, j, v) in self.upper_entries() {
            s[i][j] = v;
            s[j][i] = v;
        }
        s
    }
}

/// Builds `K` over all points with grid binning at cell width `h`.
pub fn build_graph(points: &PointSet, h: f64) -> Result<SimilarityGraph> {
    check_graph_input(points, h)?;
    // 3^d neighbor cells stop paying off in high dimension
    if points.dim() > 6 {
        return build_graph_brute_force(points, h);
    }
    let h2 = h * h;
    let cell_of = |p: &[f64]| -> Vec<i64> { p.iter().map(|x| (x / h).floor() as i64).collect() };
    let mut cells: HashMap<Vec<i64>, Vec<usize>> = HashMap::new();
    for (i, p) in points.iter().enumerate() {
        cells.entry(cell_of(p)).or_default().push(i);
    }
    let offsets = neighbor_offsets(points.dim());

    let mut rows = Vec::with_capacity(points.len());
    let mut probe = Vec::with_capacity(points.dim());
    for (i, p) in points.iter().enumerate() {
        let home = cell_of(p);
        let mut row = vec![(i, BUMP_PEAK)];
        for off in &offsets {
            probe.clear();
            probe.extend(home.iter().zip(off).map(|(c, o)| c + o));
            let Some(members) = cells.get(&probe) else { continue };
            for &j in members.iter().filter(|&&j| j > i) {
                let sq = sq_dist(p, points.point(j));
                if sq < h2 {
                    row.push((j, bump_profile(sq.sqrt() / h)));
                }
            }
        }
        row.sort_unstable_by_key(|e| e.0);
        rows.push(row);
    }
    Ok(SimilarityGraph::from_upper_rows(h, rows))
}

/// `O(n^2)` construction; the reference for [`build_graph`].
pub fn build_graph_brute_force(points: &PointSet, h: f64) -> Result<SimilarityGraph> {
    check_graph_input(points, h)?;
    let h2 = h * h;
    let rows = (0..points.len())
        .map(|i| {
            let p = points.point(i);
            let mut row = vec![(i, BUMP_PEAK)];
            for j in i + 1..points.len() {
                let sq = sq_dist(p, points.point(j));
                if sq < h2 {
                    row.push((j, bump_profile(sq.sqrt() / h)));
                }
            }
            row
        })
        .collect();
    Ok(SimilarityGraph::from_upper_rows(h, rows))
}

/// Builds `K` over the retained points of a level set extraction. Graph row
/// `r` corresponds to sample index `extraction.retained[r]`.
pub fn build_level_set_graph(
    sample: &PointSet,
    extraction: &LevelSetExtraction,
    h: f64,
) -> Result<SimilarityGraph> {
    let retained = sample.subset(&extraction.retained)?;
    let mut graph = build_graph(&retained, h)?;
    graph.point_index_map = extraction.retained.clone();
    Ok(graph)
}

fn check_graph_input(points: &PointSet, h: f64) -> Result<()> {
    if !(h.is_finite() && h > 0.0) {
        return Err(invalid(format!("scale h must be positive, got {h}")));
    }
    if points.is_empty() {
        return Err(invalid("graph needs at least one point"));
    }
    Ok(())
}

fn neighbor_offsets(dim: usize) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::with_capacity(dim)];
    for _ in 0..dim {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (-1..=1).map(move |o| {
                    let mut v = prefix.clone();
                    v.push(o);
                    v
                })
            })
            .collect();
    }
    out
}
