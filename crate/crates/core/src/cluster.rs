//! k-means in feature space, final label assembly with a noise class for
//! discarded points, the indicator-alignment diagnostic and the adjusted
//! Rand index.

use std::collections::{HashMap, HashSet};
use std::fmt;

use faer::prelude::SolveLstsq;
use faer::Mat;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::density::{sq_dist, LevelSetExtraction};
use crate::error::{invalid, Error, Result};

/// Lloyd iteration cap.
pub const MAX_ITERATIONS: usize = 300;

/// Default number of k-means++ restarts.
pub const DEFAULT_RESTARTS: usize = 10;

/// Cluster label of a sample point; points outside the level set are noise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Cluster(usize),
    Noise,
}

impl Label {
    /// CSV encoding: the cluster id, or `-1` for noise.
    pub fn to_i64(self) -> i64 {
        match self {
            Label::Cluster(c) => c as i64,
            Label::Noise => -1,
        }
    }

    pub fn from_i64(v: i64) -> Self {
        if v < 0 {
            Label::Noise
        } else {
            Label::Cluster(v as usize)
        }
    }

    pub fn is_noise(self) -> bool {
        self == Label::Noise
    }
}

impl From<usize> for Label {
    fn from(c: usize) -> Self {
        Label::Cluster(c)
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_i64())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KMeansResult {
    /// Cluster id per input row, in `0..k`.
    pub assignments: Vec<usize>,
    /// `k` centroids, each the mean of its assigned rows.
    pub centroids: Vec<Vec<f64>>,
    /// Within-cluster sum of squared distances.
    pub inertia: f64,
    /// Lloyd iterations of the winning restart.
    pub iterations: usize,
    /// Inertia after every Lloyd iteration of the winning restart.
    pub inertia_trace: Vec<f64>,
    /// Index of the winning restart.
    pub restart: usize,
}

/// Best of `restarts` Lloyd runs from k-means++ seeds, by inertia (ties go
/// to the earliest restart). Restart `r` draws from stream `r` of a ChaCha8
/// generator seeded with `seed`, so results do not depend on run order.
pub fn kmeans(features: &[Vec<f64>], k: usize, restarts: usize, seed: u64) -> Result<KMeansResult> {
    let dim = features.first().map_or(0, Vec::len);
    if features.is_empty() || dim == 0 {
        return Err(invalid("k-means needs at least one nonempty feature row"));
    }
    if features.iter().any(|r| r.len() != dim) {
        return Err(invalid("feature rows have differing lengths"));
    }
    if features.iter().flatten().any(|x| !x.is_finite()) {
        return Err(invalid("non-finite feature value"));
    }
    if k == 0 {
        return Err(invalid("k must be at least 1"));
    }
    if restarts == 0 {
        return Err(invalid("restarts must be at least 1"));
    }
    let distinct = count_distinct(features);
    if k > distinct {
        return Err(Error::TooManyClusters { k, distinct });
    }

    // work in lexicographic row order so the outcome does not depend on
    // how the caller ordered the rows
    let mut order: Vec<usize> = (0..features.len()).collect();
    order.sort_by(|&a, &b| lex_cmp(&features[a], &features[b]));
    let sorted: Vec<Vec<f64>> = order.iter().map(|&i| features[i].clone()).collect();

    let mut best: Option<KMeansResult> = None;
    for r in 0..restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(r as u64);
        let run = lloyd(&sorted, plus_plus_seeds(&sorted, k, &mut rng), r);
        if best.as_ref().is_none_or(|b| run.inertia < b.inertia) {
            best = Some(run);
        }
    }
    let mut best = best.expect("at least one restart");
    let mut assignments = vec![0; features.len()];
    for (pos, &i) in order.iter().enumerate() {
        assignments[i] = best.assignments[pos];
    }
    best.assignments = assignments;
    Ok(best)
}

fn lex_cmp(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x + 0.0).total_cmp(&(y + 0.0)))
        .find(|o| o.is_ne())
        .unwrap_or(std::cmp::Ordering::Equal)
}

fn count_distinct(rows: &[Vec<f64>]) -> usize {
    // +0.0 normalizes -0.0 so equal values hash equally
    let keys: HashSet<Vec<u64>> = rows
        .iter()
        .map(|r| r.iter().map(|x| (x + 0.0).to_bits()).collect())
        .collect();
    keys.len()
}

fn nearest(row: &[f64], centroids: &[Vec<f64>]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (c, centroid) in centroids.iter().enumerate() {
        let d = sq_dist(row, centroid);
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}

fn plus_plus_seeds(rows: &[Vec<f64>], k: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let mut centroids = vec![rows[rng.random_range(0..rows.len())].clone()];
    let mut d2: Vec<f64> = rows.iter().map(|r| sq_dist(r, &centroids[0])).collect();
    while centroids.len() < k {
        let total: f64 = d2.iter().sum();
        let pick = if total > 0.0 {
            let target = rng.random::<f64>() * total;
            let mut acc = 0.0;
            let mut chosen = None;
            for (i, w) in d2.iter().enumerate() {
                acc += w;
                if acc > target && *w > 0.0 {
                    chosen = Some(i);
                    break;
                }
            }
            // rounding can leave target above the running sum
            chosen.unwrap_or_else(|| d2.iter().rposition(|w| *w > 0.0).expect("total > 0"))
        } else {
            rng.random_range(0..rows.len())
        };
        let c = rows[pick].clone();
        for (d, r) in d2.iter_mut().zip(rows) {
            *d = d.min(sq_dist(r, &c));
        }
        centroids.push(c);
    }
    centroids
}

fn lloyd(rows: &[Vec<f64>], mut centroids: Vec<Vec<f64>>, restart: usize) -> KMeansResult {
    let k = centroids.len();
    let mut assignments: Vec<usize> = rows.iter().map(|r| nearest(r, &centroids).0).collect();
    let mut trace = Vec::new();
    let mut iterations = 0;
    loop {
        iterations += 1;
        let mut counts = update_centroids(rows, &assignments, &mut centroids);
        // an emptied cluster takes over the row worst served by its centroid
        let mut moved = false;
        for c in 0..k {
            if counts[c] == 0 {
                let far = (0..rows.len())
                    .filter(|&i| counts[assignments[i]] > 1)
                    .max_by(|&i, &j| {
                        let di = sq_dist(&rows[i], &centroids[assignments[i]]);
                        let dj = sq_dist(&rows[j], &centroids[assignments[j]]);
                        di.total_cmp(&dj).then(j.cmp(&i))
                    });
                if let Some(i) = far {
                    counts[assignments[i]] -= 1;
                    assignments[i] = c;
                    counts[c] = 1;
                    centroids[c] = rows[i].clone();
                    moved = true;
                }
            }
        }
        if moved {
            update_centroids(rows, &assignments, &mut centroids);
        }
        trace.push(inertia_of(rows, &assignments, &centroids));

        let next: Vec<usize> = rows.iter().map(|r| nearest(r, &centroids).0).collect();
        if next == assignments || iterations >= MAX_ITERATIONS {
            break;
        }
        assignments = next;
    }
    // centroids are the means of the final assignment
    KMeansResult {
        inertia: *trace.last().expect("one iteration ran"),
        assignments,
        centroids,
        iterations,
        inertia_trace: trace,
        restart,
    }
}

fn update_centroids(rows: &[Vec<f64>], assignments: &[usize], centroids: &mut [Vec<f64>]) -> Vec<usize> {
    let dim = rows[0].len();
    let mut sums = vec![vec![0.0; dim]; centroids.len()];
    let mut counts = vec![0usize; centroids.len()];
    for (r, &a) in rows.iter().zip(assignments) {
        counts[a] += 1;
        for (s, x) in sums[a].iter_mut().zip(r) {
            *s += x;
        }
    }
    for (c, centroid) in centroids.iter_mut().enumerate() {
        if counts[c] > 0 {
            *centroid = sums[c].iter().map(|s| s / counts[c] as f64).collect();
        }
    }
    counts
}

fn inertia_of(rows: &[Vec<f64>], assignments: &[usize], centroids: &[Vec<f64>]) -> f64 {
    rows.iter()
        .zip(assignments)
        .map(|(r, &a)| sq_dist(r, &centroids[a]))
        .sum()
}

/// Labels over the full sample: k-means ids for retained points, noise for
/// the rest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusteringResult {
    pub labels: Vec<Label>,
}

impl ClusteringResult {
    pub fn noise_count(&self) -> usize {
        self.labels.iter().filter(|l| l.is_noise()).count()
    }
}

pub fn assemble_labels(extraction: &LevelSetExtraction, km: &KMeansResult) -> Result<ClusteringResult> {
    if km.assignments.len() != extraction.retained_len() {
        return Err(invalid(format!(
            "{} assignments for {} retained points",
            km.assignments.len(),
            extraction.retained_len()
        )));
    }
    let mut labels = vec![Label::Noise; extraction.sample_len()];
    for (&i, &a) in extraction.retained.iter().zip(&km.assignments) {
        labels[i] = Label::Cluster(a);
    }
    Ok(ClusteringResult { labels })
}

/// Least-squares map from feature vectors to component indicator vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct AlignmentReport {
    /// `ell x ell`, row-major; `xi * rho` approximates `e_k`.
    pub xi: Vec<Vec<f64>>,
    /// `max_j |xi rho(X_j) - e_{k(j)}|_2`.
    pub residual: f64,
}

/// Fits `xi` minimizing `sum_j |xi rho_j - e_{k(j)}|^2`, where `k(j)` is the
/// component of row `j`.
pub fn align_to_indicators(rows: &[Vec<f64>], component_labels: &[usize]) -> Result<AlignmentReport> {
    let ell = rows.first().map_or(0, Vec::len);
    if rows.is_empty() || ell == 0 {
        return Err(invalid("alignment needs nonempty feature rows"));
    }
    if rows.len() != component_labels.len() {
        return Err(invalid("one component label per row is required"));
    }
    if rows.iter().any(|r| r.len() != ell) {
        return Err(invalid("feature rows have differing lengths"));
    }
    let present: HashSet<usize> = component_labels.iter().copied().collect();
    if present.len() != ell || component_labels.iter().any(|&c| c >= ell) {
        return Err(invalid(format!(
            "component labels must cover exactly 0..{ell}, the feature dimension"
        )));
    }

    let r = Mat::<f64>::from_fn(rows.len(), ell, |j, c| rows[j][c]);
    let sv = r.singular_values().map_err(|_| Error::DegenerateEmbedding)?;
    let (smax, smin) = sv
        .iter()
        .fold((0.0f64, f64::INFINITY), |(hi, lo), s| (hi.max(*s), lo.min(*s)));
    if !(smin > 1e-12 * smax) {
        return Err(Error::DegenerateEmbedding);
    }
    let e = Mat::<f64>::from_fn(rows.len(), ell, |j, c| f64::from(u8::from(component_labels[j] == c)));
    // rows solve R xi^T = E
    let xi_t = r.qr().solve_lstsq(&e);
    let xi: Vec<Vec<f64>> = (0..ell).map(|a| (0..ell).map(|b| xi_t[(b, a)]).collect()).collect();

    let residual = rows
        .iter()
        .zip(component_labels)
        .map(|(rho, &k)| {
            xi.iter()
                .enumerate()
                .map(|(a, xrow)| {
                    let v: f64 = xrow.iter().zip(rho).map(|(x, y)| x * y).sum();
                    let target = if a == k { 1.0 } else { 0.0 };
                    (v - target) * (v - target)
                })
                .sum::<f64>()
                .sqrt()
        })
        .fold(0.0, f64::max);
    Ok(AlignmentReport { xi, residual })
}

fn comb2(n: usize) -> f64 {
    let n = n as f64;
    n * (n - 1.0) / 2.0
}

/// Adjusted Rand index over the points labeled (not noise) in both vectors.
pub fn adjusted_rand_index(a: &[Label], b: &[Label]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(invalid(format!("label vectors of lengths {} and {}", a.len(), b.len())));
    }
    let mut left: HashMap<Label, usize> = HashMap::new();
    let mut right: HashMap<Label, usize> = HashMap::new();
    let mut table: HashMap<(Label, Label), usize> = HashMap::new();
    let mut n = 0usize;
    for (&x, &y) in a.iter().zip(b) {
        if x.is_noise() || y.is_noise() {
            continue;
        }
        n += 1;
        *left.entry(x).or_default() += 1;
        *right.entry(y).or_default() += 1;
        *table.entry((x, y)).or_default() += 1;
    }
    if n < 2 {
        return Err(invalid("fewer than 2 points are labeled in both vectors"));
    }
    let index: f64 = table.values().map(|&c| comb2(c)).sum();
    let sum_a: f64 = left.values().map(|&c| comb2(c)).sum();
    let sum_b: f64 = right.values().map(|&c| comb2(c)).sum();
    let expected = sum_a * sum_b / comb2(n);
    let max_index = 0.5 * (sum_a + sum_b);
    if max_index == expected {
        // both partitions are all-singletons or a single block
        return Ok(1.0);
    }
    Ok((index - expected) / (max_index - expected))
}

/// Wraps plain cluster ids as labels.
pub fn to_labels(ids: &[usize]) -> Vec<Label> {
    ids.iter().copied().map(Label::Cluster).collect()
}
