use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use super::DenseGraph;
use crate::error::{Error, Result};

/// Largest vertex count accepted by [`spectral_profile`]. The dense solver is
/// cubic; 5000 vertices takes a few minutes on a desktop core.
pub const MAX_SPECTRAL_VERTICES: usize = 5000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralProfile {
    /// Eigenvalues of the adjacency matrix in non-increasing order.
    pub eigenvalues: Vec<f64>,
    /// Common row sum when the graph is regular.
    pub d: Option<usize>,
    /// Largest absolute value among all eigenvalues but the first.
    pub lambda: f64,
}

impl SpectralProfile {
    pub fn n(&self) -> usize {
        self.eigenvalues.len()
    }
}

/// Full spectrum of the adjacency matrix (loops on the diagonal).
///
/// The decomposition is checked against two exact integer identities: the
/// eigenvalue sum equals the loop count and the sum of squares equals the
/// adjacency entry total. A mismatch beyond `tol * n` is reported as a solver
/// failure.
pub fn spectral_profile(g: &DenseGraph, tol: f64) -> Result<SpectralProfile> {
    let n = g.n();
    if n > MAX_SPECTRAL_VERTICES {
        return Err(Error::TooLarge {
            requested: n as u64,
            limit: MAX_SPECTRAL_VERTICES,
        });
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidArgument("tolerance must be positive".into()));
    }
    let m = DMatrix::from_fn(n, n, |i, j| if g.has_edge(i, j) { 1.0 } else { 0.0 });
    let eps = (tol * 1e-3).max(f64::EPSILON);
    let eig = SymmetricEigen::try_new(m, eps, 10_000 * n.max(10)).ok_or_else(|| {
        Error::Eigensolver(format!("no convergence for n={n} (eps={eps:e})"))
    })?;
    let mut eigenvalues: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    eigenvalues.sort_by(|a, b| b.total_cmp(a));

    let trace: f64 = eigenvalues.iter().sum();
    let loops = g.loop_count() as f64;
    let squares: f64 = eigenvalues.iter().map(|x| x * x).sum();
    let entries: f64 = (0..n).map(|i| g.degree(i) as f64).sum();
    let slack = tol * n as f64;
    if (trace - loops).abs() > slack || (squares - entries).abs() > slack.max(tol * entries) {
        return Err(Error::Eigensolver(format!(
            "trace {trace} vs {loops} loops, sum of squares {squares} vs {entries}"
        )));
    }

    let lambda = eigenvalues
        .iter()
        .skip(1)
        .map(|x| x.abs())
        .fold(0.0, f64::max);
    Ok(SpectralProfile {
        eigenvalues,
        d: g.regular_degree(),
        lambda,
    })
}
