//! Gaussian kernel density estimation, least-squares cross-validated
//! bandwidth selection and extraction of the sample points lying in an
//! estimated upper level set.

use std::f64::consts::PI;

use crate::datagen::PointSet;
use crate::error::{invalid, Error, Result};

/// Fixed-bandwidth Gaussian kernel density estimate over a sample.
#[derive(Debug, Clone)]
pub struct DensityModel<'a> {
    sample: &'a PointSet,
    bandwidth: f64,
    norm: f64,
}

/// Fits `f(x) = 1/(n b^d) sum_i phi_d((x - X_i) / b)`.
pub fn kde_fit(points: &PointSet, bandwidth: f64) -> Result<DensityModel<'_>> {
    if !(bandwidth.is_finite() && bandwidth > 0.0) {
        return Err(invalid(format!("bandwidth must be positive, got {bandwidth}")));
    }
    if points.is_empty() {
        return Err(invalid("density estimate needs a nonempty sample"));
    }
    let d = points.dim() as i32;
    let norm = 1.0 / (points.len() as f64 * bandwidth.powi(d) * (2.0 * PI).powf(d as f64 / 2.0));
    Ok(DensityModel {
        sample: points,
        bandwidth,
        norm,
    })
}

impl DensityModel<'_> {
    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    pub fn sample(&self) -> &PointSet {
        self.sample
    }

    /// Density at a single point.
    pub fn density_at(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.sample.dim() {
            return Err(invalid(format!(
                "query has dimension {}, sample has {}",
                x.len(),
                self.sample.dim()
            )));
        }
        let inv_2b2 = 0.5 / (self.bandwidth * self.bandwidth);
        let sum: f64 = self
            .sample
            .iter()
            .map(|p| (-sq_dist(p, x) * inv_2b2).exp())
            .sum();
        Ok(self.norm * sum)
    }

    /// Density at every query point.
    pub fn eval<'q, I>(&self, queries: I) -> Result<Vec<f64>>
    where
        I: IntoIterator<Item = &'q [f64]>,
    {
        queries.into_iter().map(|q| self.density_at(q)).collect()
    }

    /// Density at each sample point.
    pub fn eval_sample(&self) -> Vec<f64> {
        self.sample
            .iter()
            .map(|p| self.density_at(p).expect("sample points share the model dimension"))
            .collect()
    }
}

/// Convenience alias for [`DensityModel::eval`].
pub fn kde_eval<'q, I>(model: &DensityModel<'_>, queries: I) -> Result<Vec<f64>>
where
    I: IntoIterator<Item = &'q [f64]>,
{
    model.eval(queries)
}

pub(crate) fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Pairwise squared distances `|X_i - X_j|^2` for `i < j`, in row order.
struct PairDistances {
    n: usize,
    dim: usize,
    sq: Vec<f64>,
}

impl PairDistances {
    fn new(points: &PointSet) -> Self {
        let n = points.len();
        let mut sq = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for i in 0..n {
            let pi = points.point(i);
            for j in i + 1..n {
                sq.push(sq_dist(pi, points.point(j)));
            }
        }
        Self {
            n,
            dim: points.dim(),
            sq,
        }
    }

    fn lscv(&self, b: f64) -> f64 {
        let n = self.n as f64;
        let d = self.dim as f64;
        let b2 = b * b;
        let (mut conv, mut kern) = (0.0, 0.0);
        for &s in &self.sq {
            conv += (-s / (4.0 * b2)).exp();
            kern += (-s / (2.0 * b2)).exp();
        }
        let bd = b.powi(self.dim as i32);
        let conv_norm = (4.0 * PI).powf(-d / 2.0);
        let kern_norm = (2.0 * PI).powf(-d / 2.0);
        // the i == j terms only enter the convolution sum
        let conv_total = conv_norm * (n + 2.0 * conv);
        let kern_total = kern_norm * 2.0 * kern;
        conv_total / (n * n * bd) - 2.0 * kern_total / (n * (n - 1.0) * bd)
    }
}

/// Least-squares cross-validation score of bandwidth `b`:
///
/// `LSCV(b) = 1/(n^2 b^d) sum_{i,j} (phi*phi)_d((X_i-X_j)/b)
///          - 2/(n(n-1) b^d) sum_{i != j} phi_d((X_i-X_j)/b)`
///
/// where `phi*phi` is the Gaussian density with variance 2.
pub fn lscv_score(points: &PointSet, b: f64) -> Result<f64> {
    check_lscv_input(points, &[b])?;
    Ok(PairDistances::new(points).lscv(b))
}

/// The grid bandwidth with the smallest LSCV score; ties go to the smaller
/// bandwidth.
pub fn lscv_bandwidth(points: &PointSet, grid: &[f64]) -> Result<f64> {
    check_lscv_input(points, grid)?;
    let pairs = PairDistances::new(points);
    let mut best: Option<(f64, f64)> = None;
    for &b in grid {
        let score = pairs.lscv(b);
        best = match best {
            Some((bb, bs)) if bs < score || (bs == score && bb <= b) => Some((bb, bs)),
            _ => Some((b, score)),
        };
    }
    Ok(best.expect("grid is nonempty").0)
}

fn check_lscv_input(points: &PointSet, grid: &[f64]) -> Result<()> {
    if points.len() < 2 {
        return Err(invalid("cross-validation needs at least 2 points"));
    }
    if grid.is_empty() {
        return Err(invalid("bandwidth grid is empty"));
    }
    if let Some(b) = grid.iter().find(|b| !(b.is_finite() && **b > 0.0)) {
        return Err(invalid(format!("bandwidth grid entry {b} is not positive")));
    }
    Ok(())
}

/// Geometric grid of `len` bandwidths between `lo` and `hi` inclusive.
pub fn geometric_grid(lo: f64, hi: f64, len: usize) -> Vec<f64> {
    match len {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let ratio = (hi / lo).ln() / (len - 1) as f64;
            (0..len).map(|k| lo * (ratio * k as f64).exp()).collect()
        }
    }
}

/// Default bandwidth grid: 60 geometric steps from 0.01 to 2 times the
/// root-mean coordinate standard deviation of the sample.
pub fn default_bandwidth_grid(points: &PointSet) -> Vec<f64> {
    let n = points.len() as f64;
    let d = points.dim();
    let mut mean = vec![0.0; d];
    for p in points.iter() {
        for (m, x) in mean.iter_mut().zip(p) {
            *m += x / n;
        }
    }
    let var: f64 = points
        .iter()
        .map(|p| sq_dist(p, &mean))
        .sum::<f64>()
        / (n * d as f64);
    let scale = if var > 0.0 { var.sqrt() } else { 1.0 };
    geometric_grid(0.01 * scale, 2.0 * scale, 60)
}

/// Level `t` such that at least `ceil(fraction * n)` values are `>= t`:
/// the `ceil(fraction * n)`-th largest value.
pub fn select_level_by_retention(density_values: &[f64], retain_fraction: f64) -> Result<f64> {
    if density_values.is_empty() {
        return Err(invalid("no density values"));
    }
    if !(retain_fraction > 0.0 && retain_fraction <= 1.0) {
        return Err(invalid(format!(
            "retain fraction must be in (0, 1], got {retain_fraction}"
        )));
    }
    let n = density_values.len();
    let keep = retained_count(n, retain_fraction);
    let mut sorted = density_values.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    Ok(sorted[keep - 1])
}

/// `ceil(fraction * n)`, ignoring rounding noise in the product.
pub fn retained_count(n: usize, fraction: f64) -> usize {
    let exact = fraction * n as f64;
    let k = (exact - 1e-9 * exact.max(1.0)).ceil() as usize;
    k.clamp(1, n)
}

/// Sample points whose estimated density reaches the level `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelSetExtraction {
    pub level: f64,
    /// Indices into the sample, ascending.
    pub retained: Vec<usize>,
    /// Density estimate at every sample point.
    pub density_values: Vec<f64>,
}

impl LevelSetExtraction {
    /// Thresholds precomputed density values at `t` (inclusive).
    pub fn from_density_values(density_values: Vec<f64>, level: f64) -> Result<Self> {
        if !(level >= 0.0) {
            return Err(invalid(format!("level must be nonnegative, got {level}")));
        }
        let retained: Vec<usize> = density_values
            .iter()
            .enumerate()
            .filter(|(_, v)| **v >= level)
            .map(|(i, _)| i)
            .collect();
        if retained.is_empty() {
            return Err(Error::EmptyLevelSet { level });
        }
        Ok(Self {
            level,
            retained,
            density_values,
        })
    }

    /// `j(n)`, the number of retained points.
    pub fn retained_len(&self) -> usize {
        self.retained.len()
    }

    pub fn sample_len(&self) -> usize {
        self.density_values.len()
    }

    pub fn is_retained(&self, i: usize) -> bool {
        self.retained.binary_search(&i).is_ok()
    }
}

/// Retains `{ i : f(X_i) >= t }`.
pub fn extract_level_set(model: &DensityModel<'_>, t: f64) -> Result<LevelSetExtraction> {
    LevelSetExtraction::from_density_values(model.eval_sample(), t)
}
