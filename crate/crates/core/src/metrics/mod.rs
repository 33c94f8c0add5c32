//! Estimators read off a run, and the losses used to score them against
//! ground truth.
//!
//! Detected layers are matched to true layers by dimension. True components
//! sharing a dimension form one layer.

mod clustering;
mod complex;
mod hausdorff;
mod tangent;
mod truth;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::samplers::{ManifoldSpec, PointCloud};
use crate::stratify::{LayerDetection, StratificationResult};

pub use clustering::{clustering_error, clustering_error_excluding, dimension_label_check, ClusterScore};
pub use complex::HullComplex;
pub use hausdorff::{hausdorff_layer_error, HausdorffReport};
pub use tangent::{tangent_error, tangent_error_with_resolution, TangentReport};
pub use truth::GroundTruth;

/// `(K_hat, dims)`: number of nonempty layers and their dimensions.
pub fn extract_structure(res: &StratificationResult) -> (usize, Vec<usize>) {
    let dims: Vec<usize> = res
        .layers
        .iter()
        .filter(|l| !l.tuples.is_empty())
        .map(|l| l.dim)
        .collect();
    (dims.len(), dims)
}

/// The reconstruction of a detected layer.
pub fn reconstruct_layer(layer: &LayerDetection, points: &crate::PointSet) -> Result<HullComplex> {
    HullComplex::from_layer(layer, points)
}

/// A true layer: component labels (1-based) sharing one dimension.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrueLayer {
    pub dim: usize,
    pub labels: Vec<usize>,
}

/// True layers by increasing dimension.
pub fn true_layers(specs: &[ManifoldSpec]) -> Vec<TrueLayer> {
    let mut dims: Vec<usize> = specs.iter().map(ManifoldSpec::dim).collect();
    dims.sort_unstable();
    dims.dedup();
    dims.into_iter()
        .map(|dim| TrueLayer {
            dim,
            labels: (1..=specs.len()).filter(|&k| specs[k - 1].dim() == dim).collect(),
        })
        .collect()
}

/// Evaluation knobs; unset values default from the run's schedule.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalConfig {
    /// Hausdorff certification resolution; default `kappa h_d^2 / 20`.
    pub resolution: Option<f64>,
    /// Tangent localization radius; default `3 kappa h_d^2`.
    pub delta: Option<f64>,
    /// Points within this distance of a layer of another dimension are left
    /// out of the clustering score.
    pub exclusion_tube: Option<f64>,
    /// Tube radii of the dimension sandwich check, one per true layer
    /// (by increasing dimension); default `10 h_d^2`.
    pub tau: Option<Vec<f64>>,
    pub skip_hausdorff: bool,
    pub skip_tangent: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LayerEvaluation {
    /// Index of the true layer, from 1, by increasing dimension.
    pub k: usize,
    pub dim: usize,
    pub detected: bool,
    pub hausdorff_error: Option<f64>,
    pub clustering_error: f64,
    pub tangent_error: Option<f64>,
    pub dims_correct: bool,
    pub delta_used: f64,
    pub resolution: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub n: usize,
    pub seed: Option<u64>,
    pub k_hat: usize,
    pub dims: Vec<usize>,
    pub true_dims: Vec<usize>,
    pub dims_correct: bool,
    pub label_check: f64,
    pub layers: Vec<LayerEvaluation>,
}

fn schedule_scale(res: &StratificationResult, dim: usize) -> Option<(f64, f64)> {
    (dim >= 1 && dim <= res.params_used.d_max).then(|| {
        let p = res.params_used.get(dim);
        (p.kappa, p.h_par)
    })
}

/// All losses of a run against a labeled cloud.
pub fn evaluate(
    res: &StratificationResult,
    truth: &PointCloud,
    cfg: &EvalConfig,
) -> Result<EvaluationReport> {
    let specs = truth.specs.as_ref().ok_or(Error::MissingSpecs)?;
    truth.labels.as_ref().ok_or(Error::MissingLabels)?;
    let layers_true = true_layers(specs);
    let (k_hat, dims) = extract_structure(res);
    let true_dims: Vec<usize> = layers_true.iter().map(|l| l.dim).collect();
    let dims_correct = dims == true_dims;

    let scores = match cfg.exclusion_tube {
        Some(t) => clustering_error_excluding(res, truth, t)?,
        None => clustering_error(res, truth)?,
    };
    let tau: Vec<f64> = match &cfg.tau {
        Some(t) => {
            if t.len() != layers_true.len() {
                return Err(Error::InvalidParameter(format!(
                    "{} tau values for {} true layers",
                    t.len(),
                    layers_true.len()
                )));
            }
            t.clone()
        }
        None => layers_true
            .iter()
            .map(|l| schedule_scale(res, l.dim).map_or(f64::INFINITY, |(_, h)| 10.0 * h * h))
            .collect(),
    };
    let label_check = dimension_label_check(res, truth, &tau)?;

    let mut out = Vec::new();
    for (i, tl) in layers_true.iter().enumerate() {
        let group: Vec<ManifoldSpec> = tl.labels.iter().map(|&k| specs[k - 1].clone()).collect();
        let (kappa, h) = schedule_scale(res, tl.dim).unwrap_or((1.0, 0.0));
        let resolution = cfg.resolution.unwrap_or(kappa * h * h / 20.0);
        let delta = cfg.delta.unwrap_or(3.0 * kappa * h * h);
        let detected = res.layer(tl.dim).filter(|l| !l.tuples.is_empty());
        let geometric = !(cfg.skip_hausdorff && cfg.skip_tangent);
        let complex = detected
            .filter(|_| geometric)
            .map(|l| HullComplex::from_layer(l, &truth.points))
            .transpose()?;
        let hausdorff_error = match (&complex, cfg.skip_hausdorff || !(resolution > 0.0)) {
            (Some(c), false) => Some(hausdorff_layer_error(group.as_slice(), c, resolution).error),
            _ => None,
        };
        let tangent_error = match (&complex, cfg.skip_tangent || !(delta > 0.0)) {
            (Some(c), false) => Some(tangent_error(group.as_slice(), c, delta).error),
            _ => None,
        };
        out.push(LayerEvaluation {
            k: i + 1,
            dim: tl.dim,
            detected: detected.is_some(),
            hausdorff_error,
            clustering_error: scores[i].error,
            tangent_error,
            dims_correct,
            delta_used: delta,
            resolution,
        });
    }
    Ok(EvaluationReport {
        n: truth.len(),
        seed: truth.seed.or(res.metadata.seed),
        k_hat,
        dims,
        true_dims,
        dims_correct,
        label_check,
        layers: out,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::ParamSchedule;
    use crate::stratify::{RunInfo, RunMetadata, TupleList};

    fn fake_result(dims: &[usize]) -> StratificationResult {
        let layers = dims
            .iter()
            .map(|&d| {
                let mut t = TupleList::new(d + 1);
                t.push(&(0..=d as u32).collect::<Vec<_>>());
                LayerDetection {
                    dim: d,
                    tuples: t,
                    labeled: vec![],
                    pruned: vec![],
                }
            })
            .collect();
        StratificationResult {
            k_hat: dims.len(),
            layers,
            residual: vec![],
            params_used: ParamSchedule { d_max: 0, dims: vec![] },
            metadata: RunMetadata::default(),
            run_info: RunInfo::default(),
        }
    }

    #[test]
    fn structure_examples() {
        assert_eq!(extract_structure(&fake_result(&[])), (0, vec![]));
        assert_eq!(extract_structure(&fake_result(&[1, 2])), (2, vec![1, 2]));
        assert_eq!(extract_structure(&fake_result(&[3])), (1, vec![3]));
    }
}
