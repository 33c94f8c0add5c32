//! Deterministic parameter-grid nets with tangent spaces.

use std::f64::consts::PI;

use rustc_hash::FxHashMap;

use super::{circle_at, figure_eight, figure_eight_at, flat_torus_at, sphere_tangent, torus_at};
use super::{ManifoldKind, ManifoldSpec};
use crate::geometry::Subspace;
use crate::points::PointSet;

/// Net points of a manifold with their tangent spaces.
///
/// Where an immersion crosses itself the same location is listed once per
/// branch; [`ReferenceNet::cone`] gathers the tangents of all branches.
#[derive(Clone, Debug)]
pub struct ReferenceNet {
    pub dim: usize,
    pub resolution: f64,
    pub points: PointSet,
    bases: Vec<f64>,
    partners: FxHashMap<u32, Vec<u32>>,
}

impl ReferenceNet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Row-major orthonormal tangent basis at point `i`.
    pub fn basis_flat(&self, i: usize) -> &[f64] {
        let w = self.dim * self.points.dim();
        &self.bases[i * w..(i + 1) * w]
    }

    pub fn tangent(&self, i: usize) -> Subspace {
        Subspace::from_raw(self.points.dim(), self.dim, self.basis_flat(i).to_vec())
    }

    /// Concatenation of nets of the same intrinsic dimension.
    pub fn concat(nets: Vec<ReferenceNet>) -> ReferenceNet {
        let mut it = nets.into_iter();
        let mut out = it.next().expect("at least one net");
        for net in it {
            assert_eq!(net.dim, out.dim, "nets of different dimensions");
            let offset = out.points.len() as u32;
            for p in net.points.iter() {
                out.points.push(p).expect("same ambient dimension");
            }
            out.bases.extend_from_slice(&net.bases);
            for (k, v) in net.partners {
                out.partners
                    .insert(k + offset, v.into_iter().map(|j| j + offset).collect());
            }
            out.resolution = out.resolution.max(net.resolution);
        }
        out
    }

    /// Bases of [`ReferenceNet::cone`], borrowed.
    pub fn cone_bases(&self, i: usize) -> impl Iterator<Item = &[f64]> + '_ {
        let others = self.partners.get(&(i as u32)).map_or(&[][..], Vec::as_slice);
        std::iter::once(i)
            .chain(others.iter().map(|&j| j as usize))
            .map(move |j| self.basis_flat(j))
    }

    /// Tangent cone at point `i`: one flat per branch through it.
    pub fn cone(&self, i: usize) -> Vec<Subspace> {
        let mut out = vec![self.tangent(i)];
        if let Some(others) = self.partners.get(&(i as u32)) {
            out.extend(others.iter().map(|&j| self.tangent(j as usize)));
        }
        out
    }
}

type Canon = (Vec<f64>, Vec<Vec<f64>>);

pub(super) fn build(spec: &ManifoldSpec, resolution: f64) -> ReferenceNet {
    assert!(resolution > 0.0 && resolution.is_finite(), "resolution must be positive");
    let res = resolution / spec.scale;
    let mut crossings: Vec<(usize, usize)> = Vec::new();
    let canon: Vec<Canon> = match spec.kind {
        ManifoldKind::Circle => {
            let m = ((2.0 * PI / res).ceil() as usize).max(3);
            (0..m).map(|j| circle_at(2.0 * PI * j as f64 / m as f64)).collect()
        }
        ManifoldKind::Sphere { dim } => sphere_net(dim, res)
            .into_iter()
            .map(|x| {
                let t = sphere_tangent(&x);
                (x, t)
            })
            .collect(),
        ManifoldKind::Torus { major, minor } => {
            let mu = ((2.0 * PI * (major + minor) / res).ceil() as usize).max(3);
            let mv = ((2.0 * PI * minor / res).ceil() as usize).max(3);
            let mut out = Vec::with_capacity(mu * mv);
            for i in 0..mu {
                for j in 0..mv {
                    let u = 2.0 * PI * i as f64 / mu as f64;
                    let v = 2.0 * PI * j as f64 / mv as f64;
                    out.push(torus_at(major, minor, u, v));
                }
            }
            out
        }
        ManifoldKind::FigureEight => {
            let quarter = ((2.0 * PI * figure_eight::MAX_SPEED / (4.0 * res)).ceil() as usize).max(1);
            let m = 4 * quarter;
            crossings.push((quarter, 3 * quarter));
            (0..m).map(|j| figure_eight_at(2.0 * PI * j as f64 / m as f64)).collect()
        }
        ManifoldKind::FlatTorus { circles } => {
            let m = ((PI * (circles as f64).sqrt() / res).ceil() as usize).max(3);
            let total = m.pow(circles as u32);
            (0..total)
                .map(|mut code| {
                    let ts: Vec<f64> = (0..circles)
                        .map(|_| {
                            let j = code % m;
                            code /= m;
                            2.0 * PI * j as f64 / m as f64
                        })
                        .collect();
                    flat_torus_at(&ts)
                })
                .collect()
        }
        ManifoldKind::Segment => {
            let m = (1.0 / res).ceil() as usize + 1;
            (0..m)
                .map(|j| (vec![j as f64 / (m - 1) as f64], vec![vec![1.0]]))
                .collect()
        }
    };

    let amb = spec.ambient;
    let dim = spec.dim();
    let mut points = PointSet::with_capacity(amb, canon.len());
    let mut bases = Vec::with_capacity(canon.len() * dim * amb);
    for (x, dirs) in &canon {
        points.push(&spec.to_world(x)).expect("finite net point");
        for v in dirs {
            bases.extend(spec.dir_to_world(v));
        }
    }
    let mut partners: FxHashMap<u32, Vec<u32>> = FxHashMap::default();
    for (a, b) in crossings {
        partners.entry(a as u32).or_default().push(b as u32);
        partners.entry(b as u32).or_default().push(a as u32);
    }
    ReferenceNet {
        dim,
        resolution,
        points,
        bases,
        partners,
    }
}

/// Net of the unit `k`-sphere in `R^{k+1}` with covering radius `<= res`.
///
/// Latitude rings at spacing `res / 2`, each carrying a net of the
/// `(k-1)`-sphere scaled to the ring: a meridian step of at most `res / 4`
/// plus an in-ring step of at most `3 res / 4`.
fn sphere_net(k: usize, res: f64) -> Vec<Vec<f64>> {
    if k == 1 {
        let m = ((PI / res).ceil() as usize).max(1);
        return (0..m)
            .map(|j| {
                let (s, c) = (2.0 * PI * j as f64 / m as f64).sin_cos();
                vec![c, s]
            })
            .collect();
    }
    let rings = ((2.0 * PI / res).ceil() as usize).max(2);
    let mut out = Vec::new();
    for j in 0..=rings {
        let phi = -PI / 2.0 + PI * j as f64 / rings as f64;
        let (s, c) = phi.sin_cos();
        if c < 1e-12 {
            let mut x = vec![0.0; k + 1];
            x[k] = s.signum();
            out.push(x);
            continue;
        }
        for y in sphere_net(k - 1, 0.75 * res / c) {
            let mut x: Vec<f64> = y.iter().map(|v| v * c).collect();
            x.push(s);
            out.push(x);
        }
    }
    out
}
