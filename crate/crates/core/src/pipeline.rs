//! End-to-end driver: simulate or load, estimate the density, extract the
//! level set, build the graph, embed, run k-means and write reports.
//!
//! Output files in the run directory:
//!
//! * `eigenvalues.csv`: `index,eigenvalue` for every eigenvalue of `I - S`,
//!   ascending.
//! * `embedding.csv`: `index,v0,..,v{ell-1}`, one row per retained point,
//!   keyed by its index in the full sample.
//! * `labels.csv`: `index,label` for the full sample, `-1` for noise.
//! * `summary.json`: see [`RunSummary`].

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::cluster::{
    adjusted_rand_index, assemble_labels, kmeans, ClusteringResult, KMeansResult, Label,
    DEFAULT_RESTARTS,
};
use crate::datagen::{format_float, load_points, simulate_mixture, MixtureSpec, PointSet};
use crate::density::{
    default_bandwidth_grid, kde_fit, lscv_bandwidth, select_level_by_retention, LevelSetExtraction,
};
use crate::error::{invalid, Result};
use crate::graph::{build_level_set_graph, SimilarityGraph};
use crate::oracle::{connected_components, min_intercomponent_distance};
use crate::spectral::{
    count_zero_eigenvalues, eigendecompose, embed, SpectralEmbedding, ZeroCountReport,
    DEFAULT_ZERO_TOL,
};

/// Stage ids for [`stage_seed`].
pub const SIMULATION_STAGE: u64 = 1;
pub const KMEANS_STAGE: u64 = 2;

/// Sample size of the reference simulation.
pub const REFERENCE_SAMPLE_SIZE: usize = 1900;

/// Derives the seed of one pipeline stage from the root seed (SplitMix64
/// finalizer over `root + stage * golden`).
pub fn stage_seed(root: u64, stage: u64) -> u64 {
    let mut z = root.wrapping_add(stage.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InputSpec {
    /// Draw `n` points from the mixture; its seed is derived from the root
    /// seed, so `mixture.seed` is ignored.
    Simulate { n: usize, mixture: MixtureSpec },
    /// Read a CSV point file.
    Csv(PathBuf),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BandwidthSpec {
    Fixed(f64),
    /// Least-squares cross-validation over an explicit grid.
    Grid(Vec<f64>),
    /// Least-squares cross-validation over the default data-scaled grid.
    CrossValidated,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LevelSpec {
    Fixed(f64),
    RetainFraction(f64),
}

/// Everything a run needs. Deserializes from JSON with every field
/// optional; missing fields take the reference-experiment defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub input: InputSpec,
    pub bandwidth: BandwidthSpec,
    pub level: LevelSpec,
    pub scale_h: f64,
    pub zero_tol: f64,
    /// Embedding dimension and k; defaults to the zero-eigenvalue count.
    pub ell: Option<usize>,
    pub restarts: usize,
    pub seed: u64,
    /// Ground-truth label excluded from the ARI (the mixture's noise
    /// component for simulated data).
    pub truth_noise_label: Option<usize>,
    pub output_dir: Option<PathBuf>,
    /// Writes `K` as a Matrix Market triplet file.
    pub dump_graph: Option<PathBuf>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            input: InputSpec::Simulate {
                n: REFERENCE_SAMPLE_SIZE,
                mixture: MixtureSpec::default(),
            },
            bandwidth: BandwidthSpec::CrossValidated,
            level: LevelSpec::RetainFraction(0.85),
            scale_h: 0.25,
            zero_tol: DEFAULT_ZERO_TOL,
            ell: None,
            restarts: DEFAULT_RESTARTS,
            seed: 0,
            truth_noise_label: Some(3),
            output_dir: None,
            dump_graph: None,
        }
    }
}

impl PipelineConfig {
    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.scale_h.is_finite() && self.scale_h > 0.0) {
            return Err(invalid(format!("scale_h must be positive, got {}", self.scale_h)));
        }
        if !(self.zero_tol > 0.0) {
            return Err(invalid(format!("zero_tol must be positive, got {}", self.zero_tol)));
        }
        if self.restarts == 0 {
            return Err(invalid("restarts must be at least 1"));
        }
        if self.ell == Some(0) {
            return Err(invalid("ell must be at least 1"));
        }
        match self.level {
            LevelSpec::Fixed(t) if !(t >= 0.0) => {
                return Err(invalid(format!("level must be nonnegative, got {t}")))
            }
            LevelSpec::RetainFraction(p) if !(p > 0.0 && p <= 1.0) => {
                return Err(invalid(format!("retain fraction must be in (0, 1], got {p}")))
            }
            _ => {}
        }
        match &self.bandwidth {
            BandwidthSpec::Fixed(b) if !(*b > 0.0) => {
                return Err(invalid(format!("bandwidth must be positive, got {b}")))
            }
            BandwidthSpec::Grid(g) if g.is_empty() => return Err(invalid("bandwidth grid is empty")),
            _ => {}
        }
        if let InputSpec::Simulate { n, mixture } = &self.input {
            if *n == 0 {
                return Err(invalid("sample size must be at least 1"));
            }
            mixture.validate()?;
        }
        Ok(())
    }

    /// The same run with the level forced to `t = 0` (no filtering).
    pub fn as_baseline(&self) -> Self {
        Self {
            level: LevelSpec::Fixed(0.0),
            ..self.clone()
        }
    }
}

/// Contents of `summary.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    /// Sample size.
    pub n: usize,
    /// Retained points `j(n)`.
    pub jn: usize,
    /// Level used.
    pub t: f64,
    pub bandwidth: f64,
    pub scale_h: f64,
    pub zero_tol: f64,
    /// Zero-eigenvalue count of `I - S`.
    pub ell_hat: usize,
    /// Embedding dimension and number of k-means clusters actually used.
    pub ell: usize,
    /// Components of the `h`-ball graph on the retained points.
    pub component_count: usize,
    /// Smallest distance between components; `null` for one component.
    pub d_min: Option<f64>,
    /// ARI against ground truth, when labels are available.
    pub ari: Option<f64>,
    pub inertia: f64,
    pub kmeans_iterations: usize,
    pub cluster_sizes: Vec<usize>,
    pub noise_count: usize,
    /// First `min(50, j(n))` eigenvalues of `I - S`.
    pub eigenvalues_head: Vec<f64>,
}

/// A finished run with its intermediate products.
#[derive(Debug, Clone)]
pub struct PipelineRun {
    pub summary: RunSummary,
    pub points: PointSet,
    pub extraction: LevelSetExtraction,
    pub graph: SimilarityGraph,
    pub spectrum: SpectralEmbedding,
    pub zero_count: ZeroCountReport,
    /// One feature row per retained point.
    pub features: Vec<Vec<f64>>,
    pub kmeans: KMeansResult,
    pub clustering: ClusteringResult,
}

/// Produces the sample named by the config.
pub fn load_input(config: &PipelineConfig) -> Result<PointSet> {
    match &config.input {
        InputSpec::Simulate { n, mixture } => simulate_mixture(
            &mixture.clone().with_seed(stage_seed(config.seed, SIMULATION_STAGE)),
            *n,
        ),
        InputSpec::Csv(path) => load_points(path),
    }
}

/// Runs every stage and writes reports when `output_dir` is set.
pub fn run_pipeline(config: &PipelineConfig) -> Result<PipelineRun> {
    config.validate()?;
    let points = load_input(config)?;
    let run = run_on_points(config, points)?;
    if let Some(dir) = &config.output_dir {
        run.write_outputs(dir)?;
    }
    if let Some(path) = &config.dump_graph {
        run.graph.write_triplets(path)?;
    }
    Ok(run)
}

/// [`run_pipeline`] with the level forced to zero.
pub fn run_baseline(config: &PipelineConfig) -> Result<PipelineRun> {
    run_pipeline(&config.as_baseline())
}

/// Runs the stages after input on an already loaded sample.
pub fn run_on_points(config: &PipelineConfig, points: PointSet) -> Result<PipelineRun> {
    config.validate()?;
    let bandwidth = match &config.bandwidth {
        BandwidthSpec::Fixed(b) => *b,
        BandwidthSpec::Grid(grid) => lscv_bandwidth(&points, grid)?,
        BandwidthSpec::CrossValidated => lscv_bandwidth(&points, &default_bandwidth_grid(&points))?,
    };
    let density_values = kde_fit(&points, bandwidth)?.eval_sample();
    let level = match config.level {
        LevelSpec::Fixed(t) => t,
        LevelSpec::RetainFraction(p) => select_level_by_retention(&density_values, p)?,
    };
    let extraction = LevelSetExtraction::from_density_values(density_values, level)?;
    let retained = points.subset(&extraction.retained)?;

    let graph = build_level_set_graph(&points, &extraction, config.scale_h)?;
    let spectrum = eigendecompose(&graph, graph.size())?;
    let zero_count = count_zero_eigenvalues(&spectrum, config.zero_tol)?;
    let ell = config.ell.unwrap_or(zero_count.count).max(1);
    let features = embed(&spectrum, ell.min(spectrum.len()))?;
    let kmeans = kmeans(
        &features,
        ell,
        config.restarts,
        stage_seed(config.seed, KMEANS_STAGE),
    )?;
    let clustering = assemble_labels(&extraction, &kmeans)?;

    let components = connected_components(&retained, config.scale_h)?;
    let d_min = (components.count > 1)
        .then(|| min_intercomponent_distance(&retained, &components))
        .transpose()?;
    let ari = match points.labels() {
        Some(truth) => {
            let truth: Vec<Label> = truth
                .iter()
                .map(|&l| {
                    if Some(l) == config.truth_noise_label {
                        Label::Noise
                    } else {
                        Label::Cluster(l)
                    }
                })
                .collect();
            adjusted_rand_index(&clustering.labels, &truth).ok()
        }
        None => None,
    };
    let mut cluster_sizes = vec![0; ell];
    for &a in &kmeans.assignments {
        cluster_sizes[a] += 1;
    }

    let summary = RunSummary {
        n: points.len(),
        jn: extraction.retained_len(),
        t: level,
        bandwidth,
        scale_h: config.scale_h,
        zero_tol: config.zero_tol,
        ell_hat: zero_count.count,
        ell,
        component_count: components.count,
        d_min,
        ari,
        inertia: kmeans.inertia,
        kmeans_iterations: kmeans.iterations,
        cluster_sizes,
        noise_count: clustering.noise_count(),
        eigenvalues_head: zero_count.eigenvalues_head.clone(),
    };
    Ok(PipelineRun {
        summary,
        points,
        extraction,
        graph,
        spectrum,
        zero_count,
        features,
        kmeans,
        clustering,
    })
}

impl PipelineRun {
    pub fn write_outputs(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir)?;

        let mut out = BufWriter::new(File::create(dir.join("eigenvalues.csv"))?);
        writeln!(out, "index,eigenvalue")?;
        for (k, mu) in self.spectrum.eigenvalues.iter().enumerate() {
            writeln!(out, "{k},{}", format_float(*mu))?;
        }
        out.flush()?;

        let mut out = BufWriter::new(File::create(dir.join("embedding.csv"))?);
        let ell = self.features.first().map_or(0, Vec::len);
        let header: Vec<String> = (0..ell).map(|k| format!("v{k}")).collect();
        writeln!(out, "index,{}", header.join(","))?;
        for (row, &i) in self.features.iter().zip(&self.extraction.retained) {
            let fields: Vec<String> = row.iter().map(|v| format_float(*v)).collect();
            writeln!(out, "{i},{}", fields.join(","))?;
        }
        out.flush()?;

        let mut out = BufWriter::new(File::create(dir.join("labels.csv"))?);
        writeln!(out, "index,label")?;
        for (i, label) in self.clustering.labels.iter().enumerate() {
            writeln!(out, "{i},{label}")?;
        }
        out.flush()?;

        let mut out = BufWriter::new(File::create(dir.join("summary.json"))?);
        serde_json::to_writer_pretty(&mut out, &self.summary)?;
        writeln!(out)?;
        out.flush()?;
        Ok(())
    }
}

/// Reads `summary.json` from a run directory.
pub fn read_summary(dir: impl AsRef<Path>) -> Result<RunSummary> {
    let text = fs::read_to_string(dir.as_ref().join("summary.json"))?;
    Ok(serde_json::from_str(&text)?)
}
