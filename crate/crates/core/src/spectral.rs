//! Eigendecomposition of `I - S`, zero-eigenvalue counting and the spectral
//! embedding built from eigenvectors of `Q`.
//!
//! `Q = D^-1/2 S D^1/2`, so an eigenvector `u` of `S` (equivalently of
//! `I - S`, eigenvalue `mu`) gives the eigenvector `V = D^-1/2 u` of `Q` with
//! eigenvalue `1 - mu`. The null space of `I - S` is the eigenvalue-1
//! eigenspace of `Q`; its dimension is the number of connected components
//! of the similarity graph, and its `Q`-eigenvectors are constant on each
//! component.

use faer::dyn_stack::{MemBuffer, MemStack};
use faer::linalg::evd::{self_adjoint_evd, self_adjoint_evd_scratch, ComputeEigenvectors};
use faer::diag::Diag;
use faer::{Mat, Par};

use crate::datagen::PointSet;
use crate::density::sq_dist;
use crate::error::{invalid, Error, Result};
use crate::graph::{bump_profile, SimilarityGraph};

/// Default cutoff below which an eigenvalue of `I - S` counts as zero.
pub const DEFAULT_ZERO_TOL: f64 = 1e-8;

/// Number of leading eigenvalues kept for scree reports.
pub const SCREE_LEN: usize = 50;

/// The `m` smallest eigenpairs of `I - S`.
#[derive(Debug, Clone)]
pub struct SpectralEmbedding {
    /// Eigenvalues of `I - S`, ascending.
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors of `S`, one column per eigenvalue.
    pub s_eigenvectors: Vec<Vec<f64>>,
    /// Eigenvectors of `Q`, `D^-1/2` times the matching column above.
    pub q_eigenvectors: Vec<Vec<f64>>,
}

impl SpectralEmbedding {
    /// Number of eigenpairs held.
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// Number of graph vertices.
    pub fn size(&self) -> usize {
        self.q_eigenvectors.first().map_or(0, Vec::len)
    }

    /// Eigenvalue of `Q` paired with column `k`.
    pub fn q_eigenvalue(&self, k: usize) -> f64 {
        1.0 - self.eigenvalues[k]
    }
}

/// Computes the `m` smallest eigenpairs of `I - S` with a dense symmetric
/// solver.
///
/// Each `S`-eigenvector is signed so that its entry of largest magnitude is
/// positive (lowest index on ties).
pub fn eigendecompose(g: &SimilarityGraph, m: usize) -> Result<SpectralEmbedding> {
    let n = g.size();
    if m == 0 || m > n {
        return Err(invalid(format!("requested {m} eigenpairs of a {n}-vertex graph")));
    }
    let mut a = Mat::<f64>::identity(n, n);
    for (i, j, s) in g.symmetric().upper_entries() {
        // the solver only reads the lower triangle
        a[(j, i)] -= s;
    }

    let mut values = Diag::<f64>::zeros(n);
    let mut vectors = Mat::<f64>::zeros(n, n);
    let par = Par::Seq;
    let params = Default::default();
    let mut buf = MemBuffer::new(self_adjoint_evd_scratch::<f64>(
        n,
        ComputeEigenvectors::Yes,
        par,
        params,
    ));
    self_adjoint_evd(
        a.as_ref(),
        values.as_mut(),
        Some(vectors.as_mut()),
        par,
        MemStack::new(&mut buf),
        params,
    )
    .map_err(|e| Error::Eigensolver {
        size: n,
        message: format!("{e:?}"),
    })?;

    let values = values.column_vector();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| values[x].total_cmp(&values[y]));

    let sqrt_deg: Vec<f64> = g.degrees().iter().map(|d| d.sqrt()).collect();
    let mut eigenvalues = Vec::with_capacity(m);
    let mut s_eigenvectors = Vec::with_capacity(m);
    let mut q_eigenvectors = Vec::with_capacity(m);
    for &k in order.iter().take(m) {
        let mu = values[k];
        if !mu.is_finite() {
            return Err(Error::Eigensolver {
                size: n,
                message: format!("non-finite eigenvalue {mu}"),
            });
        }
        let mut u: Vec<f64> = (0..n).map(|i| vectors[(i, k)]).collect();
        canonical_sign(&mut u);
        let v = u.iter().zip(&sqrt_deg).map(|(x, s)| x / s).collect();
        eigenvalues.push(mu);
        s_eigenvectors.push(u);
        q_eigenvectors.push(v);
    }
    Ok(SpectralEmbedding {
        eigenvalues,
        s_eigenvectors,
        q_eigenvectors,
    })
}

fn canonical_sign(u: &mut [f64]) {
    let mut pivot = 0;
    for (i, x) in u.iter().enumerate() {
        if x.abs() > u[pivot].abs() {
            pivot = i;
        }
    }
    if u[pivot] < 0.0 {
        u.iter_mut().for_each(|x| *x = -*x);
    }
}

/// Eigenvalues of `I - S` below a tolerance, i.e. the estimated number of
/// clusters.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroCountReport {
    pub tolerance: f64,
    pub count: usize,
    /// The first `min(50, m)` eigenvalues.
    pub eigenvalues_head: Vec<f64>,
}

pub fn count_zero_eigenvalues(e: &SpectralEmbedding, tol: f64) -> Result<ZeroCountReport> {
    if !(tol > 0.0) {
        return Err(invalid(format!("zero tolerance must be positive, got {tol}")));
    }
    Ok(ZeroCountReport {
        tolerance: tol,
        count: e.eigenvalues.iter().filter(|&&mu| mu < tol).count(),
        eigenvalues_head: e.eigenvalues.iter().take(SCREE_LEN).copied().collect(),
    })
}

/// Feature vectors `rho(X_j) = (V_1[j], ..., V_ell[j])`, one row per vertex,
/// from the `Q`-eigenvectors of the `ell` largest eigenvalues of `Q`.
pub fn embed(e: &SpectralEmbedding, ell: usize) -> Result<Vec<Vec<f64>>> {
    if ell == 0 || ell > e.len() {
        return Err(invalid(format!(
            "embedding dimension {ell} not in 1..={}",
            e.len()
        )));
    }
    Ok((0..e.size())
        .map(|j| e.q_eigenvectors[..ell].iter().map(|v| v[j]).collect())
        .collect())
}

/// Out-of-sample value of the `k`-th eigenfunction at `x`:
///
/// `g(x) = sum_j V_k[j] k_h(X_j - x) / sum_j k_h(X_j - x)`
///
/// This is the kernel-weighted average of the eigenvector, so at a retained
/// point `g(X_i) = (Q V_k)[i] = lambda_k V_k[i]`, where `lambda_k` is the
/// `Q`-eigenvalue. It is `1 / j(n)` times the finite-rank operator's
/// eigenfunction `sum_j V_k[j] q(x, X_j)` with `q(x, y) = k_h(y - x) / K(x)`
/// and `K(x) = (1/j(n)) sum_j k_h(X_j - x)`.
pub fn extend_eigenfunction(
    x: &[f64],
    e: &SpectralEmbedding,
    k: usize,
    retained: &PointSet,
    h: f64,
) -> Result<f64> {
    if k >= e.len() {
        return Err(invalid(format!("eigen index {k} out of range 0..{}", e.len())));
    }
    if retained.len() != e.size() {
        return Err(invalid("retained points do not match the embedding"));
    }
    if x.len() != retained.dim() {
        return Err(invalid("query dimension does not match the retained points"));
    }
    let v = &e.q_eigenvectors[k];
    let (mut num, mut den) = (0.0, 0.0);
    for (j, p) in retained.iter().enumerate() {
        let w = bump_profile(sq_dist(p, x).sqrt() / h);
        num += v[j] * w;
        den += w;
    }
    if den == 0.0 {
        return Err(Error::OutsideSupport);
    }
    Ok(num / den)
}
