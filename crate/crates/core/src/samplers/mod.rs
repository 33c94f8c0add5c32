//! Synthetic compact manifolds with analytic ground truth.
//!
//! Each [`ManifoldSpec`] is a canonical shape (living in the first few
//! coordinates), scaled, rotated and translated into `R^D`. Sampling is
//! uniform with respect to arc length / surface measure. Every draw uses its
//! own ChaCha stream (`seed`, point index), so clouds are reproducible and
//! can be generated in parallel.

pub mod figure_eight;
mod net;
mod presets;

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Subspace;
use crate::linalg::{dot, norm};
use crate::points::PointSet;

pub use net::ReferenceNet;
pub use presets::{preset, Scene, PRESET_NAMES};

/// Canonical shape of a layer.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ManifoldKind {
    /// Unit circle in the first two coordinates.
    Circle,
    /// Unit `dim`-sphere in the first `dim + 1` coordinates.
    Sphere { dim: usize },
    /// Torus of revolution around the third axis.
    Torus { major: f64, minor: f64 },
    /// Lemniscate of Gerono; immersed, crossing itself once.
    FigureEight,
    /// Product of `circles` unit circles in `R^{2 circles}`.
    FlatTorus { circles: usize },
    /// Unit segment along the first axis. Has a boundary; meant for tests.
    Segment,
}

/// A placed manifold: `x -> translation + scale * rotation * x`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ManifoldSpec {
    #[serde(flatten)]
    pub kind: ManifoldKind,
    pub ambient: usize,
    pub scale: f64,
    pub translation: Vec<f64>,
    /// Row-major `D x D` orthogonal matrix; identity when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rotation: Option<Vec<f64>>,
}

impl ManifoldSpec {
    /// Unit-scale shape at the origin.
    pub fn new(kind: ManifoldKind, ambient: usize) -> Self {
        Self {
            kind,
            ambient,
            scale: 1.0,
            translation: vec![0.0; ambient],
            rotation: None,
        }
    }

    pub fn scaled(mut self, scale: f64) -> Self {
        self.scale = scale;
        self
    }

    pub fn translated(mut self, t: &[f64]) -> Self {
        self.translation = t.to_vec();
        self
    }

    pub fn rotated(mut self, q: Vec<f64>) -> Self {
        self.rotation = Some(q);
        self
    }

    /// Intrinsic dimension.
    pub fn dim(&self) -> usize {
        match self.kind {
            ManifoldKind::Circle | ManifoldKind::FigureEight | ManifoldKind::Segment => 1,
            ManifoldKind::Sphere { dim } => dim,
            ManifoldKind::Torus { .. } => 2,
            ManifoldKind::FlatTorus { circles } => circles,
        }
    }

    /// Number of leading coordinates used by the canonical shape.
    pub fn canonical_ambient(&self) -> usize {
        match self.kind {
            ManifoldKind::Circle | ManifoldKind::FigureEight => 2,
            ManifoldKind::Sphere { dim } => dim + 1,
            ManifoldKind::Torus { .. } => 3,
            ManifoldKind::FlatTorus { circles } => 2 * circles,
            ManifoldKind::Segment => 1,
        }
    }

    /// Upper bound on the curvature (norm of the second fundamental form).
    pub fn max_curvature(&self) -> f64 {
        let unit = match self.kind {
            ManifoldKind::Circle | ManifoldKind::Sphere { .. } | ManifoldKind::FlatTorus { .. } => 1.0,
            ManifoldKind::Torus { major, minor } => (1.0 / minor).max(1.0 / (major - minor)),
            ManifoldKind::FigureEight => figure_eight::MAX_CURVATURE,
            ManifoldKind::Segment => 0.0,
        };
        unit / self.scale
    }

    /// `d`-dimensional volume (length, area, ...).
    pub fn volume(&self) -> f64 {
        let d = self.dim() as i32;
        let unit = match self.kind {
            ManifoldKind::Circle => 2.0 * PI,
            ManifoldKind::Sphere { dim } => crate::params::unit_sphere_area(dim),
            ManifoldKind::Torus { major, minor } => 4.0 * PI * PI * major * minor,
            ManifoldKind::FigureEight => figure_eight::LENGTH,
            ManifoldKind::FlatTorus { circles } => (2.0 * PI).powi(circles as i32),
            ManifoldKind::Segment => 1.0,
        };
        unit * self.scale.powi(d)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        match self.kind {
            ManifoldKind::Sphere { dim } if dim < 1 => return bad("sphere dimension must be >= 1".into()),
            ManifoldKind::FlatTorus { circles } if circles < 1 => {
                return bad("flat torus needs at least one circle".into())
            }
            ManifoldKind::Torus { major, minor } if !(minor > 0.0 && major > minor) => {
                return bad(format!("torus needs 0 < minor < major, got {minor}, {major}"))
            }
            _ => {}
        }
        if self.ambient < 2 || self.ambient < self.canonical_ambient() {
            return bad(format!(
                "ambient dimension {} too small for a shape using {} coordinates",
                self.ambient,
                self.canonical_ambient()
            ));
        }
        if !(self.scale > 0.0) || !self.scale.is_finite() {
            return bad(format!("scale must be positive, got {}", self.scale));
        }
        if self.translation.len() != self.ambient || self.translation.iter().any(|x| !x.is_finite()) {
            return bad("translation must have one finite entry per ambient coordinate".into());
        }
        if let Some(q) = &self.rotation {
            let d = self.ambient;
            if q.len() != d * d {
                return bad("rotation must be a D x D matrix".into());
            }
            for i in 0..d {
                for j in 0..d {
                    let g = dot(&q[i * d..(i + 1) * d], &q[j * d..(j + 1) * d]);
                    let want = if i == j { 1.0 } else { 0.0 };
                    if (g - want).abs() > 1e-10 {
                        return bad("rotation is not orthogonal".into());
                    }
                }
            }
        }
        Ok(())
    }

    /// Canonical coordinates (padded to `D`) to world coordinates.
    fn to_world(&self, x: &[f64]) -> Vec<f64> {
        let d = self.ambient;
        let mut out = self.translation.clone();
        match &self.rotation {
            None => {
                for (o, v) in out.iter_mut().zip(x) {
                    *o += self.scale * v;
                }
            }
            Some(q) => {
                for i in 0..d {
                    out[i] += self.scale * dot(&q[i * d..i * d + x.len()], x);
                }
            }
        }
        out
    }

    /// Rotates a canonical direction into world coordinates (no scaling).
    fn dir_to_world(&self, v: &[f64]) -> Vec<f64> {
        let d = self.ambient;
        let mut out = vec![0.0; d];
        match &self.rotation {
            None => out[..v.len()].copy_from_slice(v),
            Some(q) => {
                for i in 0..d {
                    out[i] = dot(&q[i * d..i * d + v.len()], v);
                }
            }
        }
        out
    }

    /// World coordinates to canonical ones (full length `D`).
    fn to_canonical(&self, p: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.ambient];
        self.canonical_into(p, &mut out);
        out
    }

    fn canonical_into(&self, p: &[f64], out: &mut [f64]) {
        let d = self.ambient;
        let inv = 1.0 / self.scale;
        match &self.rotation {
            None => {
                for i in 0..d {
                    out[i] = (p[i] - self.translation[i]) * inv;
                }
            }
            Some(q) => {
                for (j, o) in out.iter_mut().enumerate().take(d) {
                    *o = (0..d)
                        .map(|i| q[i * d + j] * (p[i] - self.translation[i]))
                        .sum::<f64>()
                        * inv;
                }
            }
        }
    }

    fn tangent_world(&self, dirs: &[Vec<f64>]) -> Subspace {
        let rows: Vec<Vec<f64>> = dirs.iter().map(|v| self.dir_to_world(v)).collect();
        Subspace::from_orthonormal(self.ambient, &rows).expect("analytic tangent basis is orthonormal")
    }

    /// One uniform draw with its tangent space.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> (Vec<f64>, Subspace) {
        let (x, dirs) = self.sample_canonical(rng);
        (self.to_world(&x), self.tangent_world(&dirs))
    }

    fn sample_canonical<R: Rng + ?Sized>(&self, rng: &mut R) -> (Vec<f64>, Vec<Vec<f64>>) {
        match self.kind {
            ManifoldKind::Circle => {
                let t = rng.random::<f64>() * 2.0 * PI;
                circle_at(t)
            }
            ManifoldKind::Sphere { dim } => loop {
                let g: Vec<f64> = (0..=dim).map(|_| rng.sample(StandardNormal)).collect();
                let r = norm(&g);
                if r > 1e-12 {
                    let x: Vec<f64> = g.iter().map(|v| v / r).collect();
                    let t = sphere_tangent(&x);
                    break (x, t);
                }
            },
            ManifoldKind::Torus { major, minor } => loop {
                let u = rng.random::<f64>() * 2.0 * PI;
                let v = rng.random::<f64>() * 2.0 * PI;
                // Surface element is proportional to major + minor cos v.
                if rng.random::<f64>() * (major + minor) <= major + minor * v.cos() {
                    break torus_at(major, minor, u, v);
                }
            },
            ManifoldKind::FigureEight => loop {
                let t = rng.random::<f64>() * 2.0 * PI;
                if rng.random::<f64>() * figure_eight::MAX_SPEED <= figure_eight::speed(t) {
                    break figure_eight_at(t);
                }
            },
            ManifoldKind::FlatTorus { circles } => {
                let ts: Vec<f64> = (0..circles).map(|_| rng.random::<f64>() * 2.0 * PI).collect();
                flat_torus_at(&ts)
            }
            ManifoldKind::Segment => {
                let t = rng.random::<f64>();
                (vec![t], vec![vec![1.0]])
            }
        }
    }

    /// Euclidean distance from `p` to the manifold.
    pub fn dist(&self, p: &[f64]) -> f64 {
        let mut buf = [0.0_f64; 16];
        if self.ambient <= buf.len() {
            let q = &mut buf[..self.ambient];
            self.canonical_into(p, q);
            self.scale * self.dist_canonical(q)
        } else {
            self.scale * self.dist_canonical(&self.to_canonical(p))
        }
    }

    /// `sup_{y in conv(vertices)} dist(y, M)` in closed form, where one
    /// exists: round hyperspheres (circle in the plane, `d`-sphere in
    /// `R^{d+1}`) and segments.
    pub fn sup_dist_on_simplex(&self, vertices: &[&[f64]]) -> Option<f64> {
        let hypersphere = match self.kind {
            ManifoldKind::Circle => self.ambient == 2,
            ManifoldKind::Sphere { dim } => self.ambient == dim + 1,
            ManifoldKind::Segment => false,
            _ => return None,
        };
        if hypersphere {
            // dist = | |q| - 1 | in canonical coordinates; |q| is convex, so
            // its max sits at a vertex and its min is the distance from the
            // origin to the (affinely mapped) simplex.
            let canon: Vec<Vec<f64>> = vertices.iter().map(|v| self.to_canonical(v)).collect();
            let refs: Vec<&[f64]> = canon.iter().map(Vec::as_slice).collect();
            let far = canon.iter().map(|q| norm(q)).fold(0.0, f64::max);
            let near = crate::geometry::dist_to_simplex(&vec![0.0; self.ambient], &refs);
            return Some(self.scale * (far - 1.0).max(1.0 - near).max(0.0));
        }
        // Distance to a convex set is convex: the max is at a vertex.
        Some(vertices.iter().map(|v| self.dist(v)).fold(0.0, f64::max))
    }

    fn dist_canonical(&self, q: &[f64]) -> f64 {
        let m = self.canonical_ambient();
        let extra: f64 = q[m..].iter().map(|v| v * v).sum();
        let inner = match self.kind {
            ManifoldKind::Circle => norm(&q[..2]) - 1.0,
            ManifoldKind::Sphere { dim } => norm(&q[..=dim]) - 1.0,
            ManifoldKind::Torus { major, minor } => {
                let rho = norm(&q[..2]);
                ((rho - major).hypot(q[2])) - minor
            }
            ManifoldKind::FigureEight => {
                let t = figure_eight::nearest_parameter([q[0], q[1]]);
                let [x, y] = figure_eight::point(t);
                (x - q[0]).hypot(y - q[1])
            }
            ManifoldKind::FlatTorus { circles } => {
                let s: f64 = (0..circles)
                    .map(|c| {
                        let r = q[2 * c].hypot(q[2 * c + 1]) - 1.0;
                        r * r
                    })
                    .sum();
                s.sqrt()
            }
            ManifoldKind::Segment => {
                if q[0] < 0.0 {
                    -q[0]
                } else if q[0] > 1.0 {
                    q[0] - 1.0
                } else {
                    0.0
                }
            }
        };
        (inner * inner + extra).sqrt()
    }

    /// A nearest manifold point to `p` with its tangent space.
    pub fn closest_point(&self, p: &[f64]) -> (Vec<f64>, Subspace) {
        let q = self.to_canonical(p);
        let (x, dirs) = match self.kind {
            ManifoldKind::Circle => circle_at(q[1].atan2(q[0])),
            ManifoldKind::Sphere { dim } => {
                let r = norm(&q[..=dim]);
                let x: Vec<f64> = if r > 0.0 {
                    q[..=dim].iter().map(|v| v / r).collect()
                } else {
                    let mut e = vec![0.0; dim + 1];
                    e[0] = 1.0;
                    e
                };
                let t = sphere_tangent(&x);
                (x, t)
            }
            ManifoldKind::Torus { major, minor } => {
                let u = q[1].atan2(q[0]);
                let rho = q[0].hypot(q[1]);
                let v = q[2].atan2(rho - major);
                torus_at(major, minor, u, v)
            }
            ManifoldKind::FigureEight => figure_eight_at(figure_eight::nearest_parameter([q[0], q[1]])),
            ManifoldKind::FlatTorus { circles } => {
                let ts: Vec<f64> = (0..circles).map(|c| q[2 * c + 1].atan2(q[2 * c])).collect();
                flat_torus_at(&ts)
            }
            ManifoldKind::Segment => (vec![q[0].clamp(0.0, 1.0)], vec![vec![1.0]]),
        };
        (self.to_world(&x), self.tangent_world(&dirs))
    }

    /// Deterministic net of the manifold with covering radius at most
    /// `resolution`, with tangent spaces.
    pub fn dense_reference_net(&self, resolution: f64) -> ReferenceNet {
        net::build(self, resolution)
    }
}

fn circle_at(t: f64) -> (Vec<f64>, Vec<Vec<f64>>) {
    let (s, c) = t.sin_cos();
    (vec![c, s], vec![vec![-s, c]])
}

fn torus_at(major: f64, minor: f64, u: f64, v: f64) -> (Vec<f64>, Vec<Vec<f64>>) {
    let (su, cu) = u.sin_cos();
    let (sv, cv) = v.sin_cos();
    let w = major + minor * cv;
    (
        vec![w * cu, w * su, minor * sv],
        vec![vec![-su, cu, 0.0], vec![-sv * cu, -sv * su, cv]],
    )
}

fn figure_eight_at(t: f64) -> (Vec<f64>, Vec<Vec<f64>>) {
    let [x, y] = figure_eight::point(t);
    let [a, b] = figure_eight::unit_tangent(t);
    (vec![x, y], vec![vec![a, b]])
}

fn flat_torus_at(ts: &[f64]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let c = ts.len();
    let mut x = vec![0.0; 2 * c];
    let mut dirs = Vec::with_capacity(c);
    for (k, t) in ts.iter().enumerate() {
        let (s, co) = t.sin_cos();
        x[2 * k] = co;
        x[2 * k + 1] = s;
        let mut v = vec![0.0; 2 * c];
        v[2 * k] = -s;
        v[2 * k + 1] = co;
        dirs.push(v);
    }
    (x, dirs)
}

/// Orthonormal basis of the complement of the unit vector `x`.
pub(crate) fn sphere_tangent(x: &[f64]) -> Vec<Vec<f64>> {
    let m = x.len();
    // Use the coordinate axes least aligned with x.
    let mut axes: Vec<usize> = (0..m).collect();
    axes.sort_by(|&a, &b| x[a].abs().total_cmp(&x[b].abs()));
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(m - 1);
    for &a in axes.iter().take(m - 1) {
        let mut v = vec![0.0; m];
        v[a] = 1.0;
        for _ in 0..2 {
            let c = dot(&v, x);
            v.iter_mut().zip(x).for_each(|(vi, xi)| *vi -= c * xi);
            for b in &basis {
                let c = dot(&v, b);
                v.iter_mut().zip(b).for_each(|(vi, bi)| *vi -= c * bi);
            }
        }
        let n = norm(&v);
        v.iter_mut().for_each(|vi| *vi /= n);
        basis.push(v);
    }
    basis
}

/// A sample with optional ground truth.
#[derive(Clone, Debug, PartialEq)]
pub struct PointCloud {
    pub points: PointSet,
    /// Layer of each point, `1..=K` in spec order.
    pub labels: Option<Vec<usize>>,
    pub tangents: Option<Vec<Subspace>>,
    pub specs: Option<Vec<ManifoldSpec>>,
    pub weights: Option<Vec<f64>>,
    pub seed: Option<u64>,
}

impl PointCloud {
    /// A cloud without ground truth.
    pub fn unlabeled(points: PointSet) -> Self {
        Self {
            points,
            labels: None,
            tangents: None,
            specs: None,
            weights: None,
            seed: None,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn ambient(&self) -> usize {
        self.points.dim()
    }
}

fn check_weights(weights: &[f64], k: usize) -> Result<()> {
    if weights.len() != k {
        return Err(Error::Weight(format!("{} weights for {k} manifolds", weights.len())));
    }
    if weights.iter().any(|w| !(*w > 0.0) || !w.is_finite()) {
        return Err(Error::Weight("weights must be positive".into()));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > 1e-12 {
        return Err(Error::Weight(format!("weights sum to {total}, expected 1")));
    }
    Ok(())
}

/// Draws `n` i.i.d. points from the mixture `sum_k weights[k] * Unif(M_k)`.
pub fn sample_mixture(
    specs: &[ManifoldSpec],
    weights: &[f64],
    n: usize,
    seed: u64,
) -> Result<PointCloud> {
    if specs.is_empty() {
        return Err(Error::MissingSpecs);
    }
    check_weights(weights, specs.len())?;
    if n == 0 {
        return Err(Error::EmptyCloud);
    }
    let ambient = specs[0].ambient;
    for s in specs {
        s.validate()?;
        if s.ambient != ambient {
            return Err(Error::DimensionMismatch {
                expected: ambient,
                got: s.ambient,
            });
        }
    }
    let mut cumulative = Vec::with_capacity(weights.len());
    let mut acc = 0.0;
    for w in weights {
        acc += w;
        cumulative.push(acc);
    }

    let draws: Vec<(usize, Vec<f64>, Subspace)> = (0..n)
        .into_par_iter()
        .with_min_len(256)
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let u = rng.random::<f64>() * acc;
            let k = cumulative.iter().position(|&c| u < c).unwrap_or(specs.len() - 1);
            let (x, t) = specs[k].sample(&mut rng);
            (k + 1, x, t)
        })
        .collect();

    let mut points = PointSet::with_capacity(ambient, n);
    let mut labels = Vec::with_capacity(n);
    let mut tangents = Vec::with_capacity(n);
    for (k, x, t) in draws {
        points.push(&x)?;
        labels.push(k);
        tangents.push(t);
    }
    Ok(PointCloud {
        points,
        labels: Some(labels),
        tangents: Some(tangents),
        specs: Some(specs.to_vec()),
        weights: Some(weights.to_vec()),
        seed: Some(seed),
    })
}
