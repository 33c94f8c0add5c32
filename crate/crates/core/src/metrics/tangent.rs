//! Localized angle between the tangent bundles of a manifold and of its
//! reconstruction.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::HullComplex;
use crate::linalg::dist;
use super::GroundTruth;
use crate::samplers::ReferenceNet;
use crate::spatial::GridIndex;

/// Barycentric subdivision level of the interior samples on each simplex.
const SAMPLE_LEVEL: usize = 4;
const STACK_AMBIENT: usize = 16;

/// `angle_Delta(T M_hat, T M)` and its two one-sided parts.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TangentReport {
    pub error: f64,
    /// `sup_{x in M} inf_{y in M_hat, |x-y| <= Delta} angle(T_x M | T_y M_hat)`.
    pub manifold_to_complex: f64,
    /// `sup_{y in M_hat} inf_{x in M, |x-y| <= Delta} angle(T_y M_hat | T_x M)`.
    pub complex_to_manifold: f64,
    pub delta: f64,
    /// Covering radius of the net of `M` used for both parts.
    pub net_resolution: f64,
}

/// Symmetrized localized tangent angle with tolerance `delta`.
///
/// The manifold side is a net of resolution `delta / 4` with analytic
/// tangents (one flat per branch at self-crossings, each branch matched
/// separately). The reconstruction side takes every vertex, whose tangent is
/// the union of the spans of its incident simplices, and a barycentric grid
/// of interior points of each simplex, whose tangent is that simplex's
/// span. A point with no partner within `delta` is charged the maximal
/// angle 1.
pub fn tangent_error<M: GroundTruth + ?Sized>(spec: &M, complex: &HullComplex, delta: f64) -> TangentReport {
    tangent_error_with_resolution(spec, complex, delta, delta / 4.0)
}

/// [`tangent_error`] with an explicit net resolution.
pub fn tangent_error_with_resolution<M: GroundTruth + ?Sized>(
    spec: &M,
    complex: &HullComplex,
    delta: f64,
    net_resolution: f64,
) -> TangentReport {
    assert!(delta > 0.0, "delta must be positive");
    let net = spec.reference_net(net_resolution);
    let a = manifold_side(&net, complex, delta);
    let b = complex_side(spec, &net, complex, delta);
    TangentReport {
        error: a.max(b),
        manifold_to_complex: a,
        complex_to_manifold: b,
        delta,
        net_resolution: net.resolution,
    }
}

fn manifold_side(net: &ReferenceNet, complex: &HullComplex, delta: f64) -> f64 {
    if complex.dim() != net.dim {
        return 1.0;
    }
    // `hint` is the simplex that settled the previous point of this worker;
    // neighbouring net points are usually settled by the same one.
    let value = |hint: &mut Option<usize>, i: usize, threshold: f64| -> f64 {
        let x = net.points.point(i);
        let mut worst: f64 = 0.0;
        for t in net.cone_bases(i) {
            if let Some(s) = *hint {
                let a = complex.span_angle(s, t);
                if a <= threshold && complex.simplex_dist(s, x) <= delta {
                    worst = worst.max(a);
                    continue;
                }
            }
            let mut best = 1.0_f64;
            let mut arg = None;
            complex.visit_candidates(x, delta, |s| {
                let a = complex.span_angle(s, t);
                if a < best && complex.simplex_dist(s, x) <= delta {
                    best = a;
                    arg = Some(s);
                }
                best > threshold
            });
            if best <= threshold {
                *hint = arg;
            }
            worst = worst.max(best);
        }
        worst
    };
    sup_with_threshold(net.len(), || None, value)
}

/// A point of the reconstruction with the simplices defining its tangent.
enum Sample {
    Vertex(usize),
    Interior(usize, [f64; SAMPLE_LEVEL + 1]),
}

fn complex_side<M: GroundTruth + ?Sized>(spec: &M, net: &ReferenceNet, complex: &HullComplex, delta: f64) -> f64 {
    if complex.dim() != net.dim {
        return 1.0;
    }
    let amb = complex.ambient();
    let net_index = GridIndex::build(&net.points, delta).expect("positive cell size");
    let weights = interior_weights(complex.dim());
    let n_vertices = complex.vertices().len();
    let per_simplex = weights.len();
    let total = n_vertices + complex.len() * per_simplex;

    let sample = |k: usize| -> Sample {
        if k < n_vertices {
            Sample::Vertex(k)
        } else {
            let j = k - n_vertices;
            Sample::Interior(j / per_simplex, weights[j % per_simplex])
        }
    };

    let value = |k: usize, threshold: f64| -> f64 {
        let mut ybuf = [0.0; STACK_AMBIENT];
        let mut yheap = Vec::new();
        let one: u32;
        let (y, flats): (&[f64], &[u32]) = match sample(k) {
            Sample::Vertex(v) => (complex.vertices().point(v), complex.incident(v)),
            Sample::Interior(s, w) => {
                let y = if amb <= STACK_AMBIENT {
                    &mut ybuf[..amb]
                } else {
                    yheap.resize(amb, 0.0);
                    &mut yheap[..]
                };
                for (wi, &v) in w.iter().zip(complex.simplex(s)) {
                    for (yi, x) in y.iter_mut().zip(complex.vertices().point(v as usize)) {
                        *yi += wi * x;
                    }
                }
                one = s as u32;
                (&*y, std::slice::from_ref(&one))
            }
        };
        if flats.is_empty() {
            return 0.0;
        }
        let mut best = 1.0_f64;
        let (cp, tangent) = spec.closest_point(y);
        if dist(&cp, y) <= delta {
            best = best.min(score(complex, flats, || std::iter::once(tangent.basis_flat()), best));
        }
        if best > threshold {
            net_index.visit_within(y, delta, |i, _| {
                best = best.min(score(complex, flats, || net.cone_bases(i), best));
                best > threshold
            });
        }
        best
    };
    sup_with_threshold(total, || (), |_, k, th| value(k, th))
}

/// Max over the flats at y of the min angle over the cone at x; stops once
/// `cap` is reached.
fn score<'a, I, C>(complex: &HullComplex, flats: &[u32], cone: C, cap: f64) -> f64
where
    I: Iterator<Item = &'a [f64]>,
    C: Fn() -> I,
{
    let mut worst: f64 = 0.0;
    for &s in flats {
        let m = cone()
            .map(|t| complex.span_angle(s as usize, t))
            .fold(f64::INFINITY, f64::min);
        worst = worst.max(m);
        if worst >= cap {
            break;
        }
    }
    worst
}

/// Barycentric weights of the grid points `i / SAMPLE_LEVEL` that are not
/// vertices; at most `d + 1 <= SAMPLE_LEVEL + 1` entries are used.
fn interior_weights(d: usize) -> Vec<[f64; SAMPLE_LEVEL + 1]> {
    assert!(d < SAMPLE_LEVEL + 1, "simplex dimension too large for tangent sampling");
    let mut out = Vec::new();
    let mut counts = vec![0usize; d + 1];
    fn rec(
        k: usize,
        left: usize,
        counts: &mut Vec<usize>,
        out: &mut Vec<[f64; SAMPLE_LEVEL + 1]>,
    ) {
        if k + 1 == counts.len() {
            counts[k] = left;
            if counts.iter().all(|&c| c < SAMPLE_LEVEL) {
                let mut w = [0.0; SAMPLE_LEVEL + 1];
                for (wi, &c) in w.iter_mut().zip(counts.iter()) {
                    *wi = c as f64 / SAMPLE_LEVEL as f64;
                }
                out.push(w);
            }
            return;
        }
        for c in (0..=left).rev() {
            counts[k] = c;
            rec(k + 1, left - c, counts, out);
        }
    }
    rec(0, SAMPLE_LEVEL, &mut counts, &mut out);
    out
}

/// `max_k value(k)`, where `value(state, k, threshold)` may stop early and return
/// any number `<= threshold` once it knows the true value is below it.
///
/// The threshold is the exact maximum over a fixed subsample, so the result
/// is deterministic and equals the exact maximum.
pub(crate) fn sup_with_threshold<S, I, F>(total: usize, init: I, value: F) -> f64
where
    I: Fn() -> S + Sync + Send,
    F: Fn(&mut S, usize, f64) -> f64 + Sync,
{
    if total == 0 {
        return 0.0;
    }
    let stride = (total / 512).max(1);
    let threshold = (0..total)
        .into_par_iter()
        .step_by(stride)
        .map_init(&init, |st, k| value(st, k, f64::NEG_INFINITY))
        .reduce(|| 0.0, f64::max);
    (0..total)
        .into_par_iter()
        .with_min_len(64)
        .map_init(&init, |st, k| value(st, k, threshold).max(0.0))
        .reduce(|| threshold, f64::max)
}
