//! Union of co-detected simplices with distance queries.

use crate::error::{Error, Result};
use crate::geometry::{angle_flat, orthonormalize_flat, Subspace};
use crate::linalg::dist_sq;
use crate::points::PointSet;
use crate::spatial::GridIndex;
use crate::stratify::{hull_dist, LayerDetection, TupleList};

/// The piecewise-linear reconstruction `union conv(y)` of one layer.
#[derive(Clone, Debug)]
pub struct HullComplex {
    dim: usize,
    vertices: PointSet,
    /// Simplices as indices into `vertices`.
    simplices: TupleList,
    barycenters: PointSet,
    /// Largest distance from a simplex's barycenter to its vertices.
    reach: Vec<f64>,
    reach_max: f64,
    spans: Vec<f64>,
    index: GridIndex,
    /// Simplices incident to each vertex (CSR).
    incident_start: Vec<usize>,
    incident: Vec<u32>,
}

impl HullComplex {
    /// Builds the complex of a detected layer over the cloud it came from.
    pub fn from_layer(layer: &LayerDetection, points: &PointSet) -> Result<Self> {
        if layer.tuples.is_empty() {
            return Err(Error::EmptyLayer(layer.dim));
        }
        // Only the vertices actually used are kept.
        let mut used: Vec<u32> = layer.tuples.as_flat().to_vec();
        used.sort_unstable();
        used.dedup();
        let mut vertices = PointSet::with_capacity(points.dim(), used.len());
        for &i in &used {
            vertices.push(points.point(i as usize))?;
        }
        let mut simplices = TupleList::new(layer.dim + 1);
        let mut buf = Vec::with_capacity(layer.dim + 1);
        for t in layer.tuples.iter() {
            buf.clear();
            buf.extend(t.iter().map(|i| used.binary_search(i).unwrap() as u32));
            simplices.push(&buf);
        }
        Self::new(vertices, simplices)
    }

    /// Complex from explicit vertex lists, one list of `d + 1` points per
    /// simplex.
    pub fn from_vertex_lists(lists: &[Vec<Vec<f64>>]) -> Result<Self> {
        let first = lists.first().ok_or(Error::EmptyLayer(0))?;
        let amb = first[0].len();
        let mut vertices = PointSet::new(amb);
        let mut simplices = TupleList::new(first.len());
        let mut next = 0u32;
        for l in lists {
            if l.len() != first.len() {
                return Err(Error::InvalidParameter("simplices of mixed dimension".into()));
            }
            let ids: Vec<u32> = (0..l.len() as u32).map(|k| next + k).collect();
            for v in l {
                vertices.push(v)?;
            }
            next += l.len() as u32;
            simplices.push(&ids);
        }
        Self::new(vertices, simplices)
    }

    fn new(vertices: PointSet, simplices: TupleList) -> Result<Self> {
        let amb = vertices.dim();
        let d = simplices.arity() - 1;
        if d == 0 || d > amb {
            return Err(Error::InvalidParameter(format!("simplex dimension {d} in R^{amb}")));
        }
        let m = simplices.len();
        let mut barycenters = PointSet::with_capacity(amb, m);
        let mut reach = Vec::with_capacity(m);
        let mut spans = vec![0.0; m * d * amb];
        let mut edges = vec![0.0; d * amb];
        let mut c = vec![0.0; amb];
        for (s, t) in simplices.iter().enumerate() {
            c.iter_mut().for_each(|x| *x = 0.0);
            for &v in t {
                for (ci, x) in c.iter_mut().zip(vertices.point(v as usize)) {
                    *ci += x;
                }
            }
            c.iter_mut().for_each(|x| *x /= t.len() as f64);
            let rho = t
                .iter()
                .map(|&v| dist_sq(&c, vertices.point(v as usize)))
                .fold(0.0, f64::max)
                .sqrt();
            barycenters.push(&c)?;
            reach.push(rho);
            let p0 = vertices.point(t[0] as usize);
            for (j, &v) in t[1..].iter().enumerate() {
                for (k, x) in vertices.point(v as usize).iter().enumerate() {
                    edges[j * amb + k] = x - p0[k];
                }
            }
            orthonormalize_flat(&edges, d, amb, &mut spans[s * d * amb..(s + 1) * d * amb])?;
        }
        let reach_max = reach.iter().copied().fold(0.0, f64::max);
        let index = GridIndex::build(&barycenters, reach_max.max(1e-12))?;

        let mut counts = vec![0usize; vertices.len() + 1];
        for &v in simplices.as_flat() {
            counts[v as usize + 1] += 1;
        }
        for i in 0..vertices.len() {
            counts[i + 1] += counts[i];
        }
        let mut fill = counts.clone();
        let mut incident = vec![0u32; simplices.as_flat().len()];
        for (s, t) in simplices.iter().enumerate() {
            for &v in t {
                incident[fill[v as usize]] = s as u32;
                fill[v as usize] += 1;
            }
        }
        Ok(Self {
            dim: d,
            vertices,
            simplices,
            barycenters,
            reach,
            reach_max,
            spans,
            index,
            incident_start: counts,
            incident,
        })
    }

    /// Dimension of the simplices.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn ambient(&self) -> usize {
        self.vertices.dim()
    }

    pub fn len(&self) -> usize {
        self.simplices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }

    pub fn vertices(&self) -> &PointSet {
        &self.vertices
    }

    /// Vertex indices (into [`HullComplex::vertices`]) of simplex `s`.
    pub fn simplex(&self, s: usize) -> &[u32] {
        self.simplices.get(s)
    }

    pub fn simplex_vertices(&self, s: usize) -> Vec<&[f64]> {
        self.simplex(s).iter().map(|&v| self.vertices.point(v as usize)).collect()
    }

    pub fn barycenter(&self, s: usize) -> &[f64] {
        self.barycenters.point(s)
    }

    /// Row-major orthonormal basis of the span of simplex `s`.
    pub fn span_flat(&self, s: usize) -> &[f64] {
        let w = self.dim * self.ambient();
        &self.spans[s * w..(s + 1) * w]
    }

    pub fn span(&self, s: usize) -> Subspace {
        Subspace::from_raw(self.ambient(), self.dim, self.span_flat(s).to_vec())
    }

    /// Simplices having vertex `v`.
    pub fn incident(&self, v: usize) -> &[u32] {
        &self.incident[self.incident_start[v]..self.incident_start[v + 1]]
    }

    /// Angle between the span of simplex `s` and a flat given by its basis.
    pub(crate) fn span_angle(&self, s: usize, basis: &[f64]) -> f64 {
        angle_flat(self.span_flat(s), basis, self.dim, self.ambient())
    }

    /// Distance from `p` to simplex `s`.
    pub fn simplex_dist(&self, s: usize, p: &[f64]) -> f64 {
        hull_dist(&self.vertices, self.simplex(s), p)
    }

    /// Calls `f(s)` for every simplex that may lie within `r` of `p` (a
    /// superset of those that do); stops when `f` returns `false`.
    pub fn visit_candidates<F: FnMut(usize) -> bool>(&self, p: &[f64], r: f64, mut f: F) {
        let reach = &self.reach;
        let slack = (r + self.reach_max) * (1.0 + 1e-12);
        self.index.visit_within(p, slack, |s, b| {
            if dist_sq(p, b).sqrt() <= (r + reach[s]) * (1.0 + 1e-12) {
                f(s)
            } else {
                true
            }
        });
    }

    /// `dist(p, complex)` if it is at most `r`, else `None`.
    pub fn dist_within(&self, p: &[f64], r: f64) -> Option<f64> {
        let mut best = f64::INFINITY;
        self.visit_candidates(p, r, |s| {
            best = best.min(self.simplex_dist(s, p));
            true
        });
        (best <= r).then_some(best)
    }

    /// Whether some simplex lies within closed distance `r` of `p`.
    pub fn any_within(&self, p: &[f64], r: f64) -> bool {
        let mut hit = false;
        self.visit_candidates(p, r, |s| {
            hit = self.simplex_dist(s, p) <= r;
            !hit
        });
        hit
    }

    /// [`HullComplex::any_within`], trying simplex `hint` first and
    /// updating it to the simplex found.
    pub fn any_within_hinted(&self, p: &[f64], r: f64, hint: &mut Option<usize>) -> bool {
        if let Some(s) = *hint {
            if self.simplex_dist(s, p) <= r {
                return true;
            }
        }
        let mut found = None;
        self.visit_candidates(p, r, |s| {
            if self.simplex_dist(s, p) <= r {
                found = Some(s);
            }
            found.is_none()
        });
        if found.is_some() {
            *hint = found;
        }
        found.is_some()
    }

    /// Exact distance from `p` to the union of simplices.
    pub fn dist(&self, p: &[f64]) -> f64 {
        let mut r = self.reach_max.max(1e-12);
        loop {
            if let Some(d) = self.dist_within(p, r) {
                return d;
            }
            r *= 4.0;
            if r > 1e6 * (1.0 + self.reach_max) {
                // Far away: plain scan.
                return (0..self.len())
                    .map(|s| self.simplex_dist(s, p))
                    .fold(f64::INFINITY, f64::min);
            }
        }
    }
}
