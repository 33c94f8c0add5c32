use serde::{Deserialize, Serialize};

use super::true_layers;
use crate::error::{Error, Result};
use crate::samplers::PointCloud;
use crate::stratify::StratificationResult;

/// Clustering loss of one true layer.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClusterScore {
    pub dim: usize,
    /// `#(X_hat_k sym-diff X_k) / max(N_k, 1)`.
    pub error: f64,
    pub n_true: usize,
    pub n_detected: usize,
    pub symmetric_difference: usize,
    /// Points left out as ambiguous.
    pub excluded: usize,
}

/// Per-true-layer clustering error, layers by increasing dimension.
pub fn clustering_error(res: &StratificationResult, truth: &PointCloud) -> Result<Vec<ClusterScore>> {
    score(res, truth, None)
}

/// As [`clustering_error`], ignoring points within `tube` of a true layer
/// of another dimension (where the label is ambiguous).
pub fn clustering_error_excluding(
    res: &StratificationResult,
    truth: &PointCloud,
    tube: f64,
) -> Result<Vec<ClusterScore>> {
    score(res, truth, Some(tube))
}

fn score(res: &StratificationResult, truth: &PointCloud, tube: Option<f64>) -> Result<Vec<ClusterScore>> {
    let labels = truth.labels.as_ref().ok_or(Error::MissingLabels)?;
    let specs = truth.specs.as_ref().ok_or(Error::MissingSpecs)?;
    let n = truth.len();
    let predicted = res.point_dims(n);
    let true_dim: Vec<usize> = labels.iter().map(|&k| specs[k - 1].dim()).collect();
    let excluded: Vec<bool> = match tube {
        None => vec![false; n],
        Some(t) => (0..n)
            .map(|i| {
                let p = truth.points.point(i);
                specs
                    .iter()
                    .any(|s| s.dim() != true_dim[i] && s.dist(p) <= t)
            })
            .collect(),
    };
    Ok(true_layers(specs)
        .into_iter()
        .map(|tl| {
            let (mut n_true, mut n_det, mut diff, mut excl) = (0, 0, 0, 0);
            for i in 0..n {
                if excluded[i] {
                    excl += (true_dim[i] == tl.dim) as usize;
                    continue;
                }
                let t = true_dim[i] == tl.dim;
                let d = predicted[i] == tl.dim;
                n_true += t as usize;
                n_det += d as usize;
                diff += (t != d) as usize;
            }
            ClusterScore {
                dim: tl.dim,
                error: diff as f64 / n_true.max(1) as f64,
                n_true,
                n_detected: n_det,
                symmetric_difference: diff,
                excluded: excl,
            }
        })
        .collect())
}

/// Fraction of points whose detected dimension `d_hat` satisfies
/// `min{d_k : dist(x, M_k) <= tau_k} <= d_hat <= d_{Y}`.
///
/// `tau` has one tube radius per true layer by increasing dimension;
/// residual points get `d_hat = d_max + 1`.
pub fn dimension_label_check(res: &StratificationResult, truth: &PointCloud, tau: &[f64]) -> Result<f64> {
    let labels = truth.labels.as_ref().ok_or(Error::MissingLabels)?;
    let specs = truth.specs.as_ref().ok_or(Error::MissingSpecs)?;
    let layers = true_layers(specs);
    if tau.len() != layers.len() {
        return Err(Error::InvalidParameter(format!(
            "{} tube radii for {} true layers",
            tau.len(),
            layers.len()
        )));
    }
    let n = truth.len();
    if n == 0 {
        return Err(Error::EmptyCloud);
    }
    let predicted = res.point_dims(n);
    let ok = (0..n)
        .filter(|&i| {
            let p = truth.points.point(i);
            let own = specs[labels[i] - 1].dim();
            let lower = layers
                .iter()
                .zip(tau)
                .filter(|(tl, &t)| {
                    tl.dim == own || tl.labels.iter().any(|&k| specs[k - 1].dist(p) <= t)
                })
                .map(|(tl, _)| tl.dim)
                .min()
                .unwrap_or(own);
            lower <= predicted[i] && predicted[i] <= own
        })
        .count();
    Ok(ok as f64 / n as f64)
}
