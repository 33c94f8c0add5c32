//! Named scenes.

use serde::{Deserialize, Serialize};

use super::{figure_eight, ManifoldKind, ManifoldSpec};
use crate::error::{Error, Result};

/// A mixture: manifolds and their weights.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scene {
    pub specs: Vec<ManifoldSpec>,
    pub weights: Vec<f64>,
}

impl Scene {
    pub fn ambient(&self) -> usize {
        self.specs[0].ambient
    }

    /// Largest curvature bound over the layers.
    pub fn max_curvature(&self) -> f64 {
        self.specs.iter().map(ManifoldSpec::max_curvature).fold(0.0, f64::max)
    }
}

pub const PRESET_NAMES: &[&str] = &[
    "segment",
    "circle",
    "circle_sphere",
    "figure_eight",
    "torus",
    "tangent_contact",
    "flat_torus",
];

/// Scene by name.
///
/// - `segment`: unit segment in `R^2`.
/// - `circle`: unit circle in `R^2`.
/// - `circle_sphere`: unit circle in the `xy`-plane and unit sphere centered
///   at `(3, 0, 0)`, equal weights.
/// - `figure_eight`: Gerono lemniscate in `R^2` scaled to curvature 1.
/// - `torus`: torus of revolution `R = 2, r = 0.5` in `R^3`.
/// - `tangent_contact`: unit sphere and a circle of radius `1/2` in the
///   equatorial plane, internally tangent to the equator at `(1, 0, 0)`.
/// - `flat_torus`: product of two unit circles in `R^4`.
pub fn preset(name: &str) -> Result<Scene> {
    let scene = match name {
        "segment" => single(ManifoldSpec::new(ManifoldKind::Segment, 2)),
        "circle" => single(ManifoldSpec::new(ManifoldKind::Circle, 2)),
        "circle_sphere" => Scene {
            specs: vec![
                ManifoldSpec::new(ManifoldKind::Circle, 3),
                ManifoldSpec::new(ManifoldKind::Sphere { dim: 2 }, 3).translated(&[3.0, 0.0, 0.0]),
            ],
            weights: vec![0.5, 0.5],
        },
        "figure_eight" => single(
            ManifoldSpec::new(ManifoldKind::FigureEight, 2).scaled(figure_eight::MAX_CURVATURE),
        ),
        "torus" => single(ManifoldSpec::new(
            ManifoldKind::Torus {
                major: 2.0,
                minor: 0.5,
            },
            3,
        )),
        "tangent_contact" => Scene {
            specs: vec![
                ManifoldSpec::new(ManifoldKind::Circle, 3)
                    .scaled(0.5)
                    .translated(&[0.5, 0.0, 0.0]),
                ManifoldSpec::new(ManifoldKind::Sphere { dim: 2 }, 3),
            ],
            weights: vec![0.5, 0.5],
        },
        "flat_torus" => single(ManifoldSpec::new(ManifoldKind::FlatTorus { circles: 2 }, 4)),
        other => return Err(Error::UnknownPreset(other.to_string())),
    };
    Ok(scene)
}

fn single(spec: ManifoldSpec) -> Scene {
    Scene {
        specs: vec![spec],
        weights: vec![1.0],
    }
}
