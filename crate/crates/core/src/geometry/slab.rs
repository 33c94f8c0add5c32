use serde::{Deserialize, Serialize};

use super::subspace::{orthonormalize_flat, DegenerateError, Subspace};
use crate::points::PointSet;

/// `center + B_T(0, h_par) + B_{T^perp}(0, h_perp)`: a thickened ball of the
/// flat `T`, closed on both constraints.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Slab {
    pub center: Vec<f64>,
    pub flat: Subspace,
    pub h_par: f64,
    pub h_perp: f64,
}

impl Slab {
    pub fn new(center: Vec<f64>, flat: Subspace, h_par: f64, h_perp: f64) -> Self {
        assert_eq!(center.len(), flat.ambient(), "center and flat dimension differ");
        assert!(h_par > 0.0 && h_perp > 0.0, "slab half-widths must be positive");
        if h_perp > h_par {
            log::warn!("slab with h_perp = {h_perp} > h_par = {h_par}");
        }
        Self {
            center,
            flat,
            h_par,
            h_perp,
        }
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        in_slab(
            &self.center,
            self.flat.basis_flat(),
            self.flat.dim(),
            self.h_par * self.h_par,
            self.h_perp * self.h_perp,
            p,
        )
    }
}

pub fn slab_contains(s: &Slab, p: &[f64]) -> bool {
    s.contains(p)
}

/// Membership test on raw parts, shared by the hot loops.
///
/// The normal part is `|p - c|^2 - |tangential part|^2`; cancellation there
/// only matters far below any slab thickness in use.
#[inline]
pub(crate) fn in_slab(
    center: &[f64],
    basis: &[f64],
    k: usize,
    h_par_sq: f64,
    h_perp_sq: f64,
    p: &[f64],
) -> bool {
    match (center.len(), k) {
        (2, 1) => in_slab_fixed::<2, 1>(center, basis, h_par_sq, h_perp_sq, p),
        (3, 1) => in_slab_fixed::<3, 1>(center, basis, h_par_sq, h_perp_sq, p),
        (3, 2) => in_slab_fixed::<3, 2>(center, basis, h_par_sq, h_perp_sq, p),
        (4, 1) => in_slab_fixed::<4, 1>(center, basis, h_par_sq, h_perp_sq, p),
        (4, 2) => in_slab_fixed::<4, 2>(center, basis, h_par_sq, h_perp_sq, p),
        (4, 3) => in_slab_fixed::<4, 3>(center, basis, h_par_sq, h_perp_sq, p),
        _ => in_slab_any(center, basis, k, h_par_sq, h_perp_sq, p),
    }
}

#[inline(always)]
fn in_slab_fixed<const A: usize, const K: usize>(
    center: &[f64],
    basis: &[f64],
    h_par_sq: f64,
    h_perp_sq: f64,
    p: &[f64],
) -> bool {
    let c: &[f64; A] = center.try_into().expect("center length");
    let p: &[f64; A] = p.try_into().expect("point length");
    let mut w = [0.0; A];
    let mut r2 = 0.0;
    for i in 0..A {
        w[i] = p[i] - c[i];
        r2 += w[i] * w[i];
    }
    if r2 > (h_par_sq + h_perp_sq) * (1.0 + 1e-12) {
        return false;
    }
    let mut t2 = 0.0;
    for j in 0..K {
        let u = &basis[j * A..(j + 1) * A];
        let mut s = 0.0;
        for i in 0..A {
            s += w[i] * u[i];
        }
        t2 += s * s;
    }
    t2 <= h_par_sq && r2 - t2 <= h_perp_sq
}

fn in_slab_any(center: &[f64], basis: &[f64], k: usize, h_par_sq: f64, h_perp_sq: f64, p: &[f64]) -> bool {
    let amb = center.len();
    let mut r2 = 0.0;
    for i in 0..amb {
        let w = p[i] - center[i];
        r2 += w * w;
    }
    if r2 > (h_par_sq + h_perp_sq) * (1.0 + 1e-12) {
        return false;
    }
    let mut t2 = 0.0;
    for j in 0..k {
        let u = &basis[j * amb..(j + 1) * amb];
        let mut s = 0.0;
        for i in 0..amb {
            s += (p[i] - center[i]) * u[i];
        }
        t2 += s * s;
    }
    t2 <= h_par_sq && r2 - t2 <= h_perp_sq
}

/// A `(d+1)`-tuple of sample points with its barycenter and spanned flat.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimplexTuple {
    pub indices: Vec<usize>,
    pub vertices: Vec<Vec<f64>>,
    pub span: Subspace,
    pub barycenter: Vec<f64>,
}

impl SimplexTuple {
    pub fn new(indices: Vec<usize>, points: &PointSet) -> Result<Self, DegenerateError> {
        let vertices = indices.iter().map(|&i| points.point(i).to_vec()).collect();
        Self::with_indices(indices, vertices)
    }

    pub fn from_vertices(vertices: Vec<Vec<f64>>) -> Result<Self, DegenerateError> {
        let indices = (0..vertices.len()).collect();
        Self::with_indices(indices, vertices)
    }

    fn with_indices(indices: Vec<usize>, vertices: Vec<Vec<f64>>) -> Result<Self, DegenerateError> {
        assert!(vertices.len() >= 2, "a tuple needs at least two points");
        let amb = vertices[0].len();
        let k = vertices.len() - 1;
        assert!(k <= amb, "more than ambient+1 vertices");
        let mut edges = Vec::with_capacity(k * amb);
        for v in &vertices[1..] {
            edges.extend(v.iter().zip(&vertices[0]).map(|(a, b)| a - b));
        }
        let mut basis = vec![0.0; k * amb];
        orthonormalize_flat(&edges, k, amb, &mut basis)?;
        let mut barycenter = vec![0.0; amb];
        for v in &vertices {
            for (b, x) in barycenter.iter_mut().zip(v) {
                *b += x;
            }
        }
        let inv = 1.0 / vertices.len() as f64;
        barycenter.iter_mut().for_each(|b| *b *= inv);
        Ok(Self {
            indices,
            vertices,
            span: Subspace::from_raw(amb, k, basis),
            barycenter,
        })
    }

    pub fn dim(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn radius(&self) -> f64 {
        let v: Vec<&[f64]> = self.vertices.iter().map(Vec::as_slice).collect();
        super::min_enclosing_ball_radius(&v)
    }
}

/// The slab of a tuple: centered at its barycenter, along its span.
pub fn tuple_slab(t: &SimplexTuple, h_par: f64, h_perp: f64) -> Slab {
    Slab::new(t.barycenter.clone(), t.span.clone(), h_par, h_perp)
}
