use std::f64::consts::FRAC_PI_2;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{dot, norm};

/// Smallest-to-largest singular value ratio below which a set of vectors is
/// treated as rank deficient.
pub const RANK_TOL: f64 = 1e-8;

/// Tolerance on the orthonormality of user supplied bases.
const ORTHO_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, Error, PartialEq)]
#[error("numerically rank-deficient vectors (singular value ratio {ratio:e})")]
pub struct DegenerateError {
    pub ratio: f64,
}

/// A linear flat of `R^ambient`, stored as `dim` orthonormal row vectors.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Subspace {
    ambient: usize,
    dim: usize,
    basis: Vec<f64>,
}

impl Subspace {
    /// Wraps a basis that is already orthonormal (checked to 1e-10).
    pub fn from_orthonormal(ambient: usize, rows: &[Vec<f64>]) -> Result<Self, crate::Error> {
        let dim = rows.len();
        if dim == 0 || dim > ambient {
            return Err(crate::Error::InvalidParameter(format!(
                "subspace dimension {dim} outside 1..={ambient}"
            )));
        }
        for (i, r) in rows.iter().enumerate() {
            if r.len() != ambient {
                return Err(crate::Error::DimensionMismatch {
                    expected: ambient,
                    got: r.len(),
                });
            }
            for (j, s) in rows.iter().enumerate().take(i + 1) {
                let target = if i == j { 1.0 } else { 0.0 };
                if (dot(r, s) - target).abs() > ORTHO_TOL {
                    return Err(crate::Error::InvalidParameter(
                        "basis is not orthonormal".into(),
                    ));
                }
            }
        }
        Ok(Self {
            ambient,
            dim,
            basis: rows.concat(),
        })
    }

    /// Span of the given coordinate axes.
    pub fn axes(ambient: usize, axes: &[usize]) -> Self {
        let mut basis = vec![0.0; axes.len() * ambient];
        for (k, &a) in axes.iter().enumerate() {
            basis[k * ambient + a] = 1.0;
        }
        Self {
            ambient,
            dim: axes.len(),
            basis,
        }
    }

    pub(crate) fn from_raw(ambient: usize, dim: usize, basis: Vec<f64>) -> Self {
        debug_assert_eq!(basis.len(), ambient * dim);
        Self {
            ambient,
            dim,
            basis,
        }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn ambient(&self) -> usize {
        self.ambient
    }

    #[inline]
    pub fn basis_vector(&self, k: usize) -> &[f64] {
        &self.basis[k * self.ambient..(k + 1) * self.ambient]
    }

    #[inline]
    pub fn basis_flat(&self) -> &[f64] {
        &self.basis
    }

    pub fn basis_rows(&self) -> Vec<Vec<f64>> {
        self.basis.chunks_exact(self.ambient).map(<[f64]>::to_vec).collect()
    }

    /// Orthogonal projection of `v` onto the flat.
    pub fn project(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.ambient];
        for k in 0..self.dim {
            let u = self.basis_vector(k);
            let c = dot(u, v);
            for (o, ui) in out.iter_mut().zip(u) {
                *o += c * ui;
            }
        }
        out
    }

    /// Image of the flat under the linear map `q` (row-major `ambient x ambient`,
    /// assumed orthogonal).
    pub fn transformed(&self, q: &[f64]) -> Subspace {
        let d = self.ambient;
        let mut basis = vec![0.0; self.basis.len()];
        for k in 0..self.dim {
            let u = self.basis_vector(k);
            for i in 0..d {
                basis[k * d + i] = dot(&q[i * d..(i + 1) * d], u);
            }
        }
        Subspace::from_raw(d, self.dim, basis)
    }

    /// Columns `v - U U^T v` for each basis vector `v` of `other`: the part of
    /// `other` sticking out of `self`.
    fn residual_of(&self, other: &Subspace) -> Vec<f64> {
        let mut res = other.basis.clone();
        for j in 0..other.dim {
            let col = &mut res[j * self.ambient..(j + 1) * self.ambient];
            for k in 0..self.dim {
                let u = self.basis_vector(k);
                let c = dot(u, col);
                for (x, ui) in col.iter_mut().zip(u) {
                    *x -= c * ui;
                }
            }
        }
        res
    }
}

/// Orthonormal basis of the span of `vectors`.
///
/// Fails when the smallest singular value of the stacked vectors is below
/// [`RANK_TOL`] times the largest one.
pub fn orthonormalize(vectors: &[&[f64]]) -> Result<Subspace, DegenerateError> {
    let k = vectors.len();
    let ambient = vectors.first().map_or(0, |v| v.len());
    assert!(k >= 1 && k <= ambient, "need 1 <= count <= ambient dimension");
    let flat: Vec<f64> = vectors.iter().flat_map(|v| v.iter().copied()).collect();
    let mut basis = vec![0.0; k * ambient];
    orthonormalize_flat(&flat, k, ambient, &mut basis)?;
    Ok(Subspace::from_raw(ambient, k, basis))
}

/// Allocation-light core of [`orthonormalize`]: `input` holds `k` row vectors
/// of length `ambient`; the basis is written to `out`.
///
/// Modified Gram-Schmidt with one reorthogonalisation pass. The triangular
/// factor has the singular values of the input, which gives the rank test.
pub(crate) fn orthonormalize_flat(
    input: &[f64],
    k: usize,
    ambient: usize,
    out: &mut [f64],
) -> Result<(), DegenerateError> {
    let mut r = [0.0_f64; 16];
    let mut r_heap;
    let r: &mut [f64] = if k * k <= 16 {
        &mut r[..k * k]
    } else {
        r_heap = vec![0.0; k * k];
        &mut r_heap
    };
    out[..k * ambient].copy_from_slice(&input[..k * ambient]);
    for j in 0..k {
        let (done, rest) = out.split_at_mut(j * ambient);
        let w = &mut rest[..ambient];
        for _pass in 0..2 {
            for i in 0..j {
                let q = &done[i * ambient..(i + 1) * ambient];
                let c = dot(q, w);
                r[i * k + j] += c;
                for (x, qi) in w.iter_mut().zip(q) {
                    *x -= c * qi;
                }
            }
        }
        let nrm = norm(w);
        if !(nrm > 0.0) || !nrm.is_finite() {
            return Err(DegenerateError { ratio: 0.0 });
        }
        r[j * k + j] = nrm;
        for x in w.iter_mut() {
            *x /= nrm;
        }
    }
    let ratio = singular_ratio_upper(r, k);
    if ratio < RANK_TOL {
        return Err(DegenerateError { ratio });
    }
    Ok(())
}

/// `sigma_min / sigma_max` of a `k x k` upper triangular matrix.
fn singular_ratio_upper(r: &[f64], k: usize) -> f64 {
    match k {
        1 => 1.0,
        2 => {
            let (a, b, c) = (r[0], r[1], r[3]);
            let f = a * a + b * b + c * c;
            let det = (a * c).abs();
            let disc = (f * f - 4.0 * det * det).max(0.0).sqrt();
            let smax = ((f + disc) / 2.0).sqrt();
            if smax == 0.0 {
                0.0
            } else {
                det / smax / smax
            }
        }
        _ => {
            let m = DMatrix::from_row_slice(k, k, r);
            let sv = m.singular_values();
            let smax = sv.max();
            if smax == 0.0 {
                0.0
            } else {
                sv.min() / smax
            }
        }
    }
}

fn singular_values(rows: usize, cols: usize, col_major: &[f64]) -> Vec<f64> {
    let m = DMatrix::from_column_slice(rows, cols, col_major);
    let mut sv: Vec<f64> = m.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// Principal angles between two flats, nondecreasing, padded with `pi/2` up
/// to the larger dimension.
///
/// Cosines come from the singular values of `U^T U'`; small angles are taken
/// from the sines (singular values of the residual) where arccos would lose
/// precision.
pub fn principal_angles(t: &Subspace, t2: &Subspace) -> Vec<f64> {
    assert_eq!(t.ambient, t2.ambient, "subspaces live in different spaces");
    let (big, small) = if t.dim >= t2.dim { (t, t2) } else { (t2, t) };
    let (d, dp, amb) = (big.dim, small.dim, big.ambient);

    // U^T V as a d x dp column-major matrix.
    let mut cross = vec![0.0; d * dp];
    for j in 0..dp {
        for i in 0..d {
            cross[j * d + i] = dot(big.basis_vector(i), small.basis_vector(j));
        }
    }
    let cosines = singular_values(d, dp, &cross);
    let mut sines = singular_values(amb, dp, &big.residual_of(small));
    sines.reverse();

    let mut angles: Vec<f64> = cosines
        .iter()
        .zip(&sines)
        .map(|(&c, &s)| {
            let (c, s) = (c.clamp(0.0, 1.0), s.clamp(0.0, 1.0));
            if c >= s {
                s.asin()
            } else {
                c.acos()
            }
        })
        .collect();
    angles.resize(d, FRAC_PI_2);
    angles.sort_by(f64::total_cmp);
    angles
}

/// `||pi_T - pi_T'||_op`: the sine of the largest principal angle for flats
/// of equal dimension, and 1 when the dimensions differ.
pub fn subspace_angle(t: &Subspace, t2: &Subspace) -> f64 {
    assert_eq!(t.ambient, t2.ambient, "subspaces live in different spaces");
    if t.dim != t2.dim {
        return 1.0;
    }
    angle_flat(&t.basis, &t2.basis, t.dim, t.ambient)
}

/// [`subspace_angle`] on raw row-major orthonormal bases of equal dimension
/// `k`; allocation-free for `k <= 2`.
pub(crate) fn angle_flat(a: &[f64], b: &[f64], k: usize, amb: usize) -> f64 {
    let smax = match k {
        1 | 2 if amb <= 16 => {
            let mut res = [0.0_f64; 32];
            let res = &mut res[..k * amb];
            res.copy_from_slice(&b[..k * amb]);
            for j in 0..k {
                let col = &mut res[j * amb..(j + 1) * amb];
                for i in 0..k {
                    let u = &a[i * amb..(i + 1) * amb];
                    let c = dot(u, col);
                    for (x, ui) in col.iter_mut().zip(u) {
                        *x -= c * ui;
                    }
                }
            }
            if k == 1 {
                norm(res)
            } else {
                let (r1, r2) = res.split_at(amb);
                let (p, q, r) = (dot(r1, r1), dot(r1, r2), dot(r2, r2));
                let half = (p - r) / 2.0;
                ((p + r) / 2.0 + (half * half + q * q).sqrt()).sqrt()
            }
        }
        _ => {
            let ta = Subspace::from_raw(amb, k, a[..k * amb].to_vec());
            let tb = Subspace::from_raw(amb, k, b[..k * amb].to_vec());
            let res = ta.residual_of(&tb);
            singular_values(amb, k, &res)[0]
        }
    };
    smax.clamp(0.0, 1.0)
}

/// `sup_{T in flats} inf_{T' in flats2} angle(T, T')`.
pub fn cone_angle_one_sided(flats: &[Subspace], flats2: &[Subspace]) -> f64 {
    assert!(!flats.is_empty() && !flats2.is_empty(), "empty union of flats");
    flats
        .iter()
        .map(|t| {
            flats2
                .iter()
                .map(|t2| subspace_angle(t, t2))
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max)
}

/// Symmetrised [`cone_angle_one_sided`].
pub fn cone_angle(flats: &[Subspace], flats2: &[Subspace]) -> f64 {
    cone_angle_one_sided(flats, flats2).max(cone_angle_one_sided(flats2, flats))
}
