//! Sample containers, the four-component planar mixture simulator and CSV I/O.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// `n` points in `R^d`, stored row-major, with optional ground-truth labels.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    coords: Vec<f64>,
    dim: usize,
    labels: Option<Vec<usize>>,
}

impl PointSet {
    /// Builds a point set from row-major coordinates.
    pub fn new(coords: Vec<f64>, dim: usize, labels: Option<Vec<usize>>) -> Result<Self> {
        if dim == 0 {
            return Err(invalid("point dimension must be at least 1"));
        }
        if coords.is_empty() || coords.len() % dim != 0 {
            return Err(invalid(format!(
                "{} coordinates do not form a nonempty set of {dim}-dimensional points",
                coords.len()
            )));
        }
        if let Some(pos) = coords.iter().position(|c| !c.is_finite()) {
            return Err(invalid(format!("non-finite coordinate in point {}", pos / dim)));
        }
        let n = coords.len() / dim;
        if let Some(l) = &labels {
            if l.len() != n {
                return Err(invalid(format!("{} labels for {n} points", l.len())));
            }
        }
        Ok(Self { coords, dim, labels })
    }

    /// Builds a point set from a list of rows.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let dim = rows.first().map_or(0, |r| r.as_ref().len());
        if rows.iter().any(|r| r.as_ref().len() != dim) {
            return Err(invalid("rows have differing lengths"));
        }
        let coords = rows.iter().flat_map(|r| r.as_ref().iter().copied()).collect();
        Self::new(coords, dim, None)
    }

    pub fn with_labels(mut self, labels: Vec<usize>) -> Result<Self> {
        if labels.len() != self.len() {
            return Err(invalid(format!("{} labels for {} points", labels.len(), self.len())));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.dim)
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn labels(&self) -> Option<&[usize]> {
        self.labels.as_deref()
    }

    /// The points at `indices`, in that order, keeping their labels.
    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        let mut coords = Vec::with_capacity(indices.len() * self.dim);
        for &i in indices {
            coords.extend_from_slice(self.point(i));
        }
        let labels = self
            .labels
            .as_ref()
            .map(|l| indices.iter().map(|&i| l[i]).collect());
        Self::new(coords, self.dim, labels)
    }
}

/// Parameters of the planar mixture: a centered Gaussian, two noisy rings
/// and a uniform square of background noise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MixtureSpec {
    /// Weights of (gaussian, inner ring, outer ring, uniform noise).
    pub proportions: [f64; 4],
    pub gaussian_sigma: f64,
    pub ring1_radius_mean: f64,
    pub ring1_radius_sd: f64,
    pub ring2_radius_mean: f64,
    pub ring2_radius_sd: f64,
    pub noise_box_halfwidth: f64,
    pub seed: u64,
}

impl Default for MixtureSpec {
    fn default() -> Self {
        Self {
            proportions: [0.10, 0.32, 0.53, 0.05],
            gaussian_sigma: 0.2,
            ring1_radius_mean: 1.0,
            ring1_radius_sd: 0.1,
            ring2_radius_mean: 2.0,
            ring2_radius_sd: 0.2,
            noise_box_halfwidth: 3.0,
            seed: 0,
        }
    }
}

impl MixtureSpec {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.proportions.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
            return Err(invalid("mixture proportions must be finite and nonnegative"));
        }
        let total: f64 = self.proportions.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(invalid(format!("mixture proportions sum to {total}, not 1")));
        }
        let positive = [
            ("gaussian_sigma", self.gaussian_sigma),
            ("ring1_radius_sd", self.ring1_radius_sd),
            ("ring2_radius_sd", self.ring2_radius_sd),
            ("noise_box_halfwidth", self.noise_box_halfwidth),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(invalid(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.ring1_radius_mean.is_finite() && self.ring2_radius_mean.is_finite()) {
            return Err(invalid("ring radius means must be finite"));
        }
        Ok(())
    }
}

/// Draws `n` i.i.d. labeled points from the mixture. Labels are the
/// component index: 0 gaussian, 1 inner ring, 2 outer ring, 3 noise.
pub fn simulate_mixture(spec: &MixtureSpec, n: usize) -> Result<PointSet> {
    spec.validate()?;
    if n == 0 {
        return Err(invalid("sample size must be at least 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let ring1 = Normal::new(spec.ring1_radius_mean, spec.ring1_radius_sd)
        .map_err(|e| invalid(e.to_string()))?;
    let ring2 = Normal::new(spec.ring2_radius_mean, spec.ring2_radius_sd)
        .map_err(|e| invalid(e.to_string()))?;
    let w = spec.noise_box_halfwidth;

    let mut coords = Vec::with_capacity(2 * n);
    let mut labels = Vec::with_capacity(n);
    for _ in 0..n {
        let component = pick_component(&spec.proportions, rng.random::<f64>());
        let (x, y) = match component {
            0 => {
                let gx: f64 = StandardNormal.sample(&mut rng);
                let gy: f64 = StandardNormal.sample(&mut rng);
                (spec.gaussian_sigma * gx, spec.gaussian_sigma * gy)
            }
            1 | 2 => {
                let theta = rng.random_range(0.0..std::f64::consts::TAU);
                let r = if component == 1 {
                    ring1.sample(&mut rng)
                } else {
                    ring2.sample(&mut rng)
                };
                (r * theta.cos(), r * theta.sin())
            }
            _ => (rng.random_range(-w..=w), rng.random_range(-w..=w)),
        };
        coords.push(x);
        coords.push(y);
        labels.push(component);
    }
    PointSet::new(coords, 2, Some(labels))
}

fn pick_component(proportions: &[f64; 4], u: f64) -> usize {
    let mut acc = 0.0;
    for (k, p) in proportions.iter().enumerate() {
        acc += p;
        if u < acc {
            return k;
        }
    }
    // u landed in the rounding slack above the cumulative sum
    proportions.iter().rposition(|p| *p > 0.0).unwrap_or(3)
}

/// Reads a CSV point file.
///
/// An optional first header row is recognized by any non-numeric field; a
/// header column named `label` holds integer ground-truth labels. Without a
/// header every column is a coordinate.
pub fn load_points(path: impl AsRef<Path>) -> Result<PointSet> {
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| csv_error(path, e))?;

    let mut label_col: Option<usize> = None;
    let mut width: Option<usize> = None;
    let mut coords = Vec::new();
    let mut labels = Vec::new();
    let mut first = true;

    for record in reader.records() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let line = record.position().map_or(0, |p| p.line());
        if record.iter().all(str::is_empty) {
            continue;
        }
        if first {
            first = false;
            if record.iter().any(|f| f.parse::<f64>().is_err()) {
                label_col = record.iter().position(|f| f.eq_ignore_ascii_case("label"));
                width = Some(record.len());
                continue;
            }
        }
        let expected = *width.get_or_insert(record.len());
        if record.len() != expected {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line,
                message: format!("expected {expected} fields, found {}", record.len()),
            });
        }
        for (col, field) in record.iter().enumerate() {
            if Some(col) == label_col {
                let label = field.parse::<usize>().map_err(|_| Error::Parse {
                    path: path.to_path_buf(),
                    line,
                    message: format!("label {field:?} is not a nonnegative integer"),
                })?;
                labels.push(label);
            } else {
                let v = field.parse::<f64>().ok().filter(|v| v.is_finite());
                coords.push(v.ok_or_else(|| Error::Parse {
                    path: path.to_path_buf(),
                    line,
                    message: format!("coordinate {field:?} is not a finite number"),
                })?);
            }
        }
    }

    let Some(width) = width else {
        return Err(Error::NoDataRows { path: path.to_path_buf() });
    };
    if coords.is_empty() {
        return Err(Error::NoDataRows { path: path.to_path_buf() });
    }
    let dim = width - usize::from(label_col.is_some());
    PointSet::new(coords, dim, label_col.map(|_| labels))
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line());
    Error::Parse {
        path: path.to_path_buf(),
        line,
        message: e.to_string(),
    }
}

/// Writes points as CSV with an `x0..x{d-1}[,label]` header and 17
/// significant digits per coordinate.
pub fn write_points(points: &PointSet, path: impl AsRef<Path>) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    let mut header: Vec<String> = (0..points.dim()).map(|k| format!("x{k}")).collect();
    if points.labels().is_some() {
        header.push("label".into());
    }
    writeln!(out, "{}", header.join(","))?;
    for (i, p) in points.iter().enumerate() {
        let mut fields: Vec<String> = p.iter().map(|v| format_float(*v)).collect();
        if let Some(labels) = points.labels() {
            fields.push(labels[i].to_string());
        }
        writeln!(out, "{}", fields.join(","))?;
    }
    out.flush()?;
    Ok(())
}

/// Scientific notation with 17 significant digits (round-trips every f64).
pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}
