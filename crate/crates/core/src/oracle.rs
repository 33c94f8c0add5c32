//! Slow reference implementations for tests.
//!
//! Nothing here uses a spatial index or an enumeration cap; every routine is
//! single-threaded and meant to be read, not run on big inputs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{in_slab, min_enclosing_ball_radius, principal_angles, Subspace};
use crate::linalg::{dist_sq, dot};
use crate::params::{unit_ball_volume, ParamSchedule};
use crate::points::PointSet;
use crate::stratify::{
    hull_dist, tuple_frame, LayerDetection, RunInfo, RunMetadata, Scratch, StratificationResult,
    TupleList,
};

/// Largest cloud [`brute_force_run`] accepts.
pub const BRUTE_FORCE_GUARD: usize = 500;

/// Fewest samples a Monte-Carlo estimate uses.
pub const MIN_MC_SAMPLES: usize = 1000;

/// Slabeling by exhaustive enumeration of all `(d+1)`-subsets of the active
/// points, with linear-scan slab counts and pruning.
pub fn brute_force_run(points: &PointSet, sched: &ParamSchedule) -> Result<StratificationResult> {
    let n = points.len();
    if n > BRUTE_FORCE_GUARD {
        return Err(Error::TooLarge {
            n,
            guard: BRUTE_FORCE_GUARD,
        });
    }
    if n == 0 {
        return Err(Error::EmptyCloud);
    }
    sched.validate(points.dim())?;

    let mut active: Vec<usize> = (0..n).collect();
    let mut layers = Vec::new();
    let mut cap_hits = Vec::new();
    for d in 1..=sched.d_max {
        if active.is_empty() {
            break;
        }
        cap_hits.push(0);
        let p = sched.get(d);
        let (hp2, hq2) = (p.h_par * p.h_par, p.h_perp * p.h_perp);
        let mut tuples = TupleList::new(d + 1);
        let mut scratch = Scratch::new(d, points.dim());
        for_each_subset(&active, d + 1, &mut |tuple| {
            let verts: Vec<&[f64]> = tuple.iter().map(|&i| points.point(i)).collect();
            if min_enclosing_ball_radius(&verts) > p.r {
                return;
            }
            if !tuple_frame(points, tuple, &mut scratch) {
                return;
            }
            let count = active
                .iter()
                .filter(|&&q| in_slab(&scratch.center, &scratch.basis, d, hp2, hq2, points.point(q)))
                .count();
            if count >= p.n_min {
                let t: Vec<u32> = tuple.iter().map(|&i| i as u32).collect();
                tuples.push(&t);
            }
        });

        let mut codetected: Vec<usize> = tuples.as_flat().iter().map(|&i| i as usize).collect();
        codetected.sort_unstable();
        codetected.dedup();
        let pruned: Vec<usize> = active
            .iter()
            .copied()
            .filter(|i| codetected.binary_search(i).is_err())
            .filter(|&z| tuples.iter().any(|t| hull_dist(points, t, points.point(z)) <= p.delta))
            .collect();
        let mut labeled: Vec<usize> = codetected.iter().chain(&pruned).copied().collect();
        labeled.sort_unstable();
        if labeled.is_empty() {
            continue;
        }
        active.retain(|i| labeled.binary_search(i).is_err());
        layers.push(LayerDetection {
            dim: d,
            tuples,
            labeled,
            pruned,
        });
    }
    Ok(StratificationResult {
        k_hat: layers.len(),
        layers,
        residual: active,
        params_used: sched.clone(),
        metadata: RunMetadata {
            seed: None,
            max_tuples_per_anchor: None,
            cap_hits,
        },
        run_info: RunInfo::default(),
    })
}

/// Calls `f` on every `k`-subset of `items`, lexicographically.
fn for_each_subset(items: &[usize], k: usize, f: &mut dyn FnMut(&[usize])) {
    fn rec(items: &[usize], k: usize, start: usize, cur: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
        if cur.len() == k {
            f(cur);
            return;
        }
        let need = k - cur.len();
        for j in start..items.len() {
            if items.len() - j < need {
                break;
            }
            cur.push(items[j]);
            rec(items, k, j + 1, cur, f);
            cur.pop();
        }
    }
    rec(items, k, 0, &mut Vec::with_capacity(k), f);
}

/// Indices within closed distance `r` of `p`, by scanning.
pub fn linear_scan_within(points: &PointSet, p: &[f64], r: f64) -> Vec<usize> {
    (0..points.len())
        .filter(|&i| dist_sq(points.point(i), p) <= r * r)
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloEstimate {
    pub value: f64,
    pub std_error: f64,
    pub samples: usize,
}

impl MonteCarloEstimate {
    /// `|value - target| <= k * std_error`.
    pub fn matches(&self, target: f64, k: f64) -> bool {
        (self.value - target).abs() <= k * self.std_error
    }
}

/// d-volume of `{v in T : v in S_T2(0, h_par, h_perp)}`, `d = dim T`.
///
/// Samples uniformly in the d-ball `B_T(0, 2 h_par)`, which holds the whole
/// section when `h_perp <= h_par`. At least [`MIN_MC_SAMPLES`] samples are
/// drawn whatever `samples` says.
pub fn mc_section_volume(
    t: &Subspace,
    t2: &Subspace,
    h_par: f64,
    h_perp: f64,
    samples: usize,
    seed: u64,
) -> MonteCarloEstimate {
    assert_eq!(t.ambient(), t2.ambient(), "subspaces live in different spaces");
    assert!(t.dim() >= t2.dim(), "need dim T >= dim T2");
    let samples = samples.max(MIN_MC_SAMPLES);
    let (d, amb) = (t.dim(), t.ambient());
    let radius = 2.0 * h_par.max(h_perp);
    let ball = unit_ball_volume(d) * radius.powi(d as i32);
    let origin = vec![0.0; amb];
    let (hp2, hq2) = (h_par * h_par, h_perp * h_perp);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut coef = vec![0.0; d];
    let mut v = vec![0.0; amb];
    let mut hits = 0usize;
    for _ in 0..samples {
        // Uniform point of the unit d-ball.
        for c in coef.iter_mut() {
            *c = rng.sample(StandardNormal);
        }
        let norm = dot(&coef, &coef).sqrt();
        let rad = radius * rng.random::<f64>().powf(1.0 / d as f64) / norm;
        v.iter_mut().for_each(|x| *x = 0.0);
        for (k, c) in coef.iter().enumerate() {
            for (x, b) in v.iter_mut().zip(t.basis_vector(k)) {
                *x += rad * c * b;
            }
        }
        if in_slab(&origin, t2.basis_flat(), t2.dim(), hp2, hq2, &v) {
            hits += 1;
        }
    }
    let p = hits as f64 / samples as f64;
    MonteCarloEstimate {
        value: ball * p,
        std_error: ball * (p * (1.0 - p) / samples as f64).sqrt(),
        samples,
    }
}

/// `4^d prod_k min(h_par, h_perp / sin theta_k(T, T2))`, `d = dim T`;
/// principal angles beyond `dim T2` count as right angles.
pub fn section_volume_bound(t: &Subspace, t2: &Subspace, h_par: f64, h_perp: f64) -> f64 {
    let d = t.dim();
    principal_angles(t, t2)
        .into_iter()
        .map(|th| {
            let s = th.sin();
            if s > 0.0 {
                h_par.min(h_perp / s)
            } else {
                h_par
            }
        })
        .product::<f64>()
        * 4f64.powi(d as i32)
}

/// Minimum of a field over a regular grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridMinimum {
    pub value: f64,
    pub argmin: Vec<f64>,
    /// Lipschitz slack: the true minimum over the box is at least
    /// `value - bound`.
    pub bound: f64,
}

/// Minimum of `f` over the `steps^m` grid of the box `[lo, hi]`
/// (`m = lo.len()`, `steps >= 2`), with `lipschitz` a Lipschitz constant of
/// `f` in the Euclidean norm.
pub fn grid_min_distance(
    f: impl Fn(&[f64]) -> f64,
    lo: &[f64],
    hi: &[f64],
    steps: usize,
    lipschitz: f64,
) -> GridMinimum {
    assert_eq!(lo.len(), hi.len());
    assert!(steps >= 2, "need at least two grid steps");
    let m = lo.len();
    let cell: Vec<f64> = lo
        .iter()
        .zip(hi)
        .map(|(a, b)| (b - a) / (steps - 1) as f64)
        .collect();
    let mut idx = vec![0usize; m];
    let mut x = lo.to_vec();
    let mut best = GridMinimum {
        value: f64::INFINITY,
        argmin: x.clone(),
        bound: 0.5 * lipschitz * cell.iter().map(|c| c * c).sum::<f64>().sqrt(),
    };
    loop {
        for k in 0..m {
            x[k] = lo[k] + idx[k] as f64 * cell[k];
        }
        let v = f(&x);
        if v < best.value {
            best.value = v;
            best.argmin.copy_from_slice(&x);
        }
        let mut k = 0;
        loop {
            if k == m {
                return best;
            }
            idx[k] += 1;
            if idx[k] < steps {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

/// Minimum of a convex `f` over the box `[lo, hi]` by nested golden-section
/// search: `x_1 -> min_{x_2..} f` is again convex, so each level is a
/// one-dimensional convex problem. Returns the best value actually evaluated
/// (an upper bound on the minimum) and where it was attained.
pub fn convex_min(f: impl Fn(&[f64]) -> f64, lo: &[f64], hi: &[f64], tol: f64) -> (f64, Vec<f64>) {
    assert_eq!(lo.len(), hi.len());
    assert!(tol > 0.0);
    let mut x = lo.to_vec();
    let mut best = (f64::INFINITY, x.clone());
    golden_level(&f, lo, hi, tol, 0, &mut x, &mut best);
    best
}

fn golden_level(
    f: &impl Fn(&[f64]) -> f64,
    lo: &[f64],
    hi: &[f64],
    tol: f64,
    k: usize,
    x: &mut Vec<f64>,
    best: &mut (f64, Vec<f64>),
) -> f64 {
    if k == lo.len() {
        let v = f(x);
        if v < best.0 {
            best.0 = v;
            best.1.copy_from_slice(x);
        }
        return v;
    }
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo[k], hi[k]);
    let eval = |t: f64, x: &mut Vec<f64>, best: &mut (f64, Vec<f64>)| {
        x[k] = t;
        golden_level(f, lo, hi, tol, k + 1, x, best)
    };
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = eval(c, x, best);
    let mut fd = eval(d, x, best);
    while b - a > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = eval(c, x, best);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = eval(d, x, best);
        }
    }
    fc.min(fd)
}
