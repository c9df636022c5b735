//! Feature embeddings for similarity graphs.
//!
//! A symmetric weight matrix that is positive semidefinite is exactly a Gram
//! matrix: there are feature vectors whose inner products reproduce the
//! weights. This module computes such vectors by eigendecomposition and
//! certifies the reconstruction numerically, or reports the offending
//! eigenvalue when no such embedding exists.

use crate::pretext::WeightedGraph;
use crate::rational::rational_to_f64;
use nalgebra::DMatrix;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RkhsError {
    #[error("weight matrix is not positive semidefinite: smallest eigenvalue {0}")]
    NotPositiveSemidefinite(f64),
    #[error("weight for ({a}, {b}) does not fit in floating point")]
    NonFiniteWeight { a: String, b: String },
    #[error("feature reconstruction error {max_error} exceeds tolerance {tolerance}")]
    ReconstructionFailed { max_error: f64, tolerance: f64 },
}

/// Feature vectors indexed like the graph's nodes, with the eigenvalues
/// they came from and the certified worst-case reconstruction error.
#[derive(Debug, Clone, PartialEq)]
pub struct RkhsFactorization {
    nodes: Vec<String>,
    eigenvalues: Vec<f64>,
    features: Vec<Vec<f64>>,
    max_gram_error: f64,
}

impl RkhsFactorization {
    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    /// Eigenvalues in descending order, small negatives clamped to zero.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// One feature vector per node, in node order; component k is scaled by
    /// the square root of eigenvalue k.
    pub fn features(&self) -> &[Vec<f64>] {
        &self.features
    }

    pub fn feature(&self, node: &str) -> Option<&[f64]> {
        let i = self.nodes.iter().position(|n| n == node)?;
        Some(&self.features[i])
    }

    /// The inner product of two nodes' feature vectors; reproduces the
    /// graph weight up to [`Self::max_gram_error`].
    pub fn kernel(&self, a: &str, b: &str) -> Option<f64> {
        let va = self.feature(a)?;
        let vb = self.feature(b)?;
        Some(va.iter().zip(vb).map(|(x, y)| x * y).sum())
    }

    /// The largest absolute difference between a feature inner product and
    /// the corresponding graph weight, over all node pairs.
    pub fn max_gram_error(&self) -> f64 {
        self.max_gram_error
    }
}

/// Factors the graph's weight matrix as a Gram matrix of feature vectors.
///
/// Eigenvalues below `-tolerance` mean the matrix is not positive
/// semidefinite and no embedding exists; eigenvalues in `[-tolerance, 0)`
/// are treated as numerical noise and clamped to zero. The returned
/// factorization is checked: every pairwise inner product must match the
/// graph weight within `tolerance`.
pub fn rkhs_factor(g: &WeightedGraph, tolerance: f64) -> Result<RkhsFactorization, RkhsError> {
    let nodes = g.nodes().to_vec();
    let n = nodes.len();
    let mut gram = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let w = rational_to_f64(&g.weight_by_index(i, j));
            if !w.is_finite() {
                return Err(RkhsError::NonFiniteWeight {
                    a: nodes[i].clone(),
                    b: nodes[j].clone(),
                });
            }
            gram[(i, j)] = w;
        }
    }
    let eig = gram.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    if let Some(&last) = order.last() {
        let smallest = eig.eigenvalues[last];
        if smallest < -tolerance {
            return Err(RkhsError::NotPositiveSemidefinite(smallest));
        }
    }
    let eigenvalues: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k].max(0.0)).collect();
    // Columns carry a sign ambiguity; fix each so its first entry of
    // largest magnitude is positive, making the output deterministic.
    let mut columns: Vec<Vec<f64>> = Vec::with_capacity(n);
    for &k in &order {
        let col: Vec<f64> = (0..n).map(|i| eig.eigenvectors[(i, k)]).collect();
        let lead = col
            .iter()
            .cloned()
            .max_by(|a, b| a.abs().total_cmp(&b.abs()))
            .unwrap_or(0.0);
        let sign = if lead < 0.0 { -1.0 } else { 1.0 };
        columns.push(col.into_iter().map(|v| v * sign).collect());
    }
    let features: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|k| eigenvalues[k].sqrt() * columns[k][i])
                .collect()
        })
        .collect();
    let mut max_gram_error = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let inner: f64 = features[i].iter().zip(&features[j]).map(|(x, y)| x * y).sum();
            max_gram_error = max_gram_error.max((inner - gram[(i, j)]).abs());
        }
    }
    if max_gram_error > tolerance {
        return Err(RkhsError::ReconstructionFailed {
            max_error: max_gram_error,
            tolerance,
        });
    }
    Ok(RkhsFactorization {
        nodes,
        eigenvalues,
        features,
        max_gram_error,
    })
}
