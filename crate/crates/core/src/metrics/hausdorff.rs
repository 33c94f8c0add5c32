//! Hausdorff distance between a manifold and its reconstruction.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::HullComplex;
use crate::linalg::dist_sq;
use super::GroundTruth;

/// `d_H(M, M_hat)` with both one-sided parts.
///
/// Each part is a value actually attained on the sets compared, and the true
/// distance exceeds the reported one by at most `resolution`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HausdorffReport {
    pub error: f64,
    /// `sup_{x in M} dist(x, M_hat)` over a net of `M`.
    pub manifold_to_complex: f64,
    /// `sup_{y in M_hat} dist(y, M)`.
    pub complex_to_manifold: f64,
    pub resolution: f64,
}

/// Hausdorff distance from `spec` to `complex`, certified up to `resolution`.
///
/// `M -> M_hat` is evaluated on a net of `M` with covering radius
/// `resolution`. `M_hat -> M` maximises the 1-Lipschitz function
/// `dist(., M)` over each simplex by branch and bound: a piece with centroid
/// `c` and radius `rho` is bounded by `dist(c, M) + rho`, discarded when that
/// cannot beat the running threshold, and split along its longest edge
/// otherwise until `rho <= resolution`.
pub fn hausdorff_layer_error<M: GroundTruth + ?Sized>(
    spec: &M,
    complex: &HullComplex,
    resolution: f64,
) -> HausdorffReport {
    assert!(resolution > 0.0, "resolution must be positive");
    let net = spec.reference_net(resolution);
    let a = one_sided_net(&net.points, complex);
    let b = complex_to_manifold(spec, complex, resolution);
    HausdorffReport {
        error: a.max(b),
        manifold_to_complex: a,
        complex_to_manifold: b,
        resolution,
    }
}

fn one_sided_net(net: &crate::points::PointSet, complex: &HullComplex) -> f64 {
    // A coarse pass fixes a threshold; points closer than it cannot change
    // the maximum and are settled by a bounded query.
    let stride = (net.len() / 256).max(1);
    let threshold = (0..net.len())
        .into_par_iter()
        .step_by(stride)
        .map(|i| complex.dist(net.point(i)))
        .reduce(|| 0.0, f64::max);
    // Neighbouring net points tend to be settled by the same simplex.
    (0..net.len())
        .into_par_iter()
        .with_min_len(256)
        .map_init(
            || None,
            |hint, i| {
                let p = net.point(i);
                if complex.any_within_hinted(p, threshold, hint) {
                    threshold
                } else {
                    complex.dist(p)
                }
            },
        )
        .reduce(|| threshold, f64::max)
}

fn complex_to_manifold<M: GroundTruth + ?Sized>(spec: &M, complex: &HullComplex, resolution: f64) -> f64 {
    if complex.is_empty() {
        return 0.0;
    }
    if spec.sup_dist_on_simplex(&complex.simplex_vertices(0)).is_some() {
        return (0..complex.len())
            .into_par_iter()
            .with_min_len(256)
            .map(|s| {
                spec.sup_dist_on_simplex(&complex.simplex_vertices(s))
                    .expect("closed form available for every simplex")
            })
            .reduce(|| 0.0, f64::max);
    }
    let amb = complex.ambient();
    let centroid_value = |s: usize| {
        let mut c = vec![0.0; amb];
        centroid_into(&complex.simplex_vertices(s), &mut c);
        spec.dist(&c)
    };
    let threshold = (0..complex.len())
        .into_par_iter()
        .with_min_len(256)
        .map(centroid_value)
        .reduce(|| 0.0, f64::max);
    (0..complex.len())
        .into_par_iter()
        .with_min_len(64)
        .map_init(Vec::new, |stack, s| simplex_sup(spec, &complex.simplex_vertices(s), threshold, resolution, stack))
        .reduce(|| threshold, f64::max)
}

fn centroid_into<V: AsRef<[f64]>>(v: &[V], c: &mut [f64]) {
    c.iter_mut().for_each(|x| *x = 0.0);
    for p in v {
        for (ci, x) in c.iter_mut().zip(p.as_ref()) {
            *ci += x;
        }
    }
    let inv = 1.0 / v.len() as f64;
    c.iter_mut().for_each(|x| *x *= inv);
}

/// Largest evaluated `dist(., M)` on a simplex above `threshold`, or
/// `threshold`. Pieces live back to back in `stack`.
fn simplex_sup<M: GroundTruth + ?Sized>(
    spec: &M,
    verts: &[&[f64]],
    threshold: f64,
    res: f64,
    stack: &mut Vec<f64>,
) -> f64 {
    let k = verts.len();
    let amb = verts[0].len();
    let size = k * amb;
    stack.clear();
    for v in verts {
        stack.extend_from_slice(v);
    }
    let mut c = vec![0.0; amb];
    let mut best = threshold;
    while !stack.is_empty() {
        let base = stack.len() - size;
        let (i, j) = {
            let piece = &stack[base..];
            let rows: Vec<&[f64]> = piece.chunks_exact(amb).collect();
            centroid_into(&rows, &mut c);
            let f = spec.dist(&c);
            best = best.max(f);
            let rho = rows.iter().map(|v| dist_sq(v, &c)).fold(0.0, f64::max).sqrt();
            if f + rho <= best + res || rho <= res {
                stack.truncate(base);
                continue;
            }
            let (mut i, mut j, mut longest) = (0, 1, -1.0);
            for a in 0..k {
                for b in a + 1..k {
                    let l = dist_sq(rows[a], rows[b]);
                    if l > longest {
                        (i, j, longest) = (a, b, l);
                    }
                }
            }
            (i, j)
        };
        // Replace the piece by its two halves along edge (i, j).
        stack.extend_from_within(base..base + size);
        let left = base;
        let right = base + size;
        for t in 0..amb {
            let m = 0.5 * (stack[base + i * amb + t] + stack[base + j * amb + t]);
            stack[left + i * amb + t] = m;
            stack[right + j * amb + t] = m;
        }
    }
    best
}
