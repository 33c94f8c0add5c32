use crate::geometry::Subspace;
use crate::linalg::dist_sq;
use crate::samplers::{ManifoldSpec, ReferenceNet};

/// A reference set with distances, projections and tangents: one manifold,
/// or a union of manifolds of the same dimension.
pub trait GroundTruth: Sync {
    fn dim(&self) -> usize;
    fn dist(&self, p: &[f64]) -> f64;
    fn closest_point(&self, p: &[f64]) -> (Vec<f64>, Subspace);
    fn reference_net(&self, resolution: f64) -> ReferenceNet;
    /// Exact `sup` of [`dist`](GroundTruth::dist) over a simplex, when
    /// cheaply available.
    fn sup_dist_on_simplex(&self, _vertices: &[&[f64]]) -> Option<f64> {
        None
    }
}

impl GroundTruth for ManifoldSpec {
    fn dim(&self) -> usize {
        ManifoldSpec::dim(self)
    }

    fn dist(&self, p: &[f64]) -> f64 {
        ManifoldSpec::dist(self, p)
    }

    fn closest_point(&self, p: &[f64]) -> (Vec<f64>, Subspace) {
        ManifoldSpec::closest_point(self, p)
    }

    fn reference_net(&self, resolution: f64) -> ReferenceNet {
        self.dense_reference_net(resolution)
    }

    fn sup_dist_on_simplex(&self, vertices: &[&[f64]]) -> Option<f64> {
        ManifoldSpec::sup_dist_on_simplex(self, vertices)
    }
}

impl GroundTruth for [ManifoldSpec] {
    fn dim(&self) -> usize {
        self[0].dim()
    }

    fn dist(&self, p: &[f64]) -> f64 {
        self.iter().map(|s| s.dist(p)).fold(f64::INFINITY, f64::min)
    }

    fn closest_point(&self, p: &[f64]) -> (Vec<f64>, Subspace) {
        self.iter()
            .map(|s| s.closest_point(p))
            .min_by(|a, b| dist_sq(&a.0, p).total_cmp(&dist_sq(&b.0, p)))
            .expect("nonempty union")
    }

    fn reference_net(&self, resolution: f64) -> ReferenceNet {
        ReferenceNet::concat(self.iter().map(|s| s.dense_reference_net(resolution)).collect())
    }

    fn sup_dist_on_simplex(&self, vertices: &[&[f64]]) -> Option<f64> {
        match self {
            [one] => one.sup_dist_on_simplex(vertices),
            _ => None,
        }
    }
}
