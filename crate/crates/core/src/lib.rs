//! Level-set spectral clustering.
//!
//! Clusters are the connected components of an upper level set of the
//! sampling density. The pipeline is:
//!
//! 1. estimate the density with a Gaussian kernel estimator ([`density`]),
//! 2. keep only the sample points whose estimated density is at least `t`,
//! 3. build a compactly supported similarity graph on the kept points
//!    ([`graph`]),
//! 4. eigendecompose `I - S`, with `S = D^{-1/2} K D^{-1/2}`, count its
//!    zero eigenvalues and embed each point with the eigenvectors of the
//!    Markov matrix `Q = D^{-1} K` ([`spectral`]),
//! 5. run k-means in the embedding and give every discarded point the
//!    noise label ([`cluster`]).
//!
//! Because the similarity kernel vanishes outside a ball of radius `h`, the
//! multiplicity of the eigenvalue 1 of `Q` equals the number of connected
//! components of the `h`-ball graph. The [`oracle`] module holds brute-force
//! references used to check that identity.
//!
//! The end-to-end driver lives in [`pipeline`]; the `levelset-spectral`
//! binary is a thin command line wrapper around it.

pub mod cluster;
pub mod datagen;
pub mod density;
mod error;
pub mod graph;
pub mod oracle;
pub mod pipeline;
pub mod spectral;

pub use cluster::{
    adjusted_rand_index, align_to_indicators, assemble_labels, kmeans, AlignmentReport,
    ClusteringResult, KMeansResult, Label,
};
pub use datagen::{load_points, simulate_mixture, write_points, MixtureSpec, PointSet};
pub use density::{
    extract_level_set, kde_fit, lscv_bandwidth, select_level_by_retention, DensityModel,
    LevelSetExtraction,
};
pub use error::{Error, Result};
pub use graph::{bump_kernel, build_graph, SimilarityGraph};
pub use oracle::{connected_components, dense_reference_spectrum, min_intercomponent_distance, ComponentLabeling};
pub use pipeline::{run_baseline, run_pipeline, PipelineConfig, RunSummary};
pub use spectral::{count_zero_eigenvalues, eigendecompose, SpectralEmbedding, ZeroCountReport};
