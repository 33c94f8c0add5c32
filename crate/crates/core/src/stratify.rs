//! The slab co-detection algorithm.
//!
//! Dimensions are scanned in increasing order over a shrinking *active* set.
//! At step `d`, every `(d+1)`-tuple of active points whose enclosing ball has
//! radius at most `r_d` is *co-detected* when its slab
//! `S(barycenter, span, h_d, kappa_d h_d^2)` holds at least `n_d` active
//! points (the tuple's own vertices included). Vertices of co-detected
//! tuples are labeled `d`; a pruning pass then also labels every other active
//! point within `delta_d` of the union of co-detected simplices. Labeled
//! points leave the active set before step `d + 1`.
//!
//! Tuples are generated once each, in lexicographic order: anchors ascend,
//! and each anchor only extends with larger neighbor indices. Anchors are
//! processed in parallel and merged in anchor order, so the output does not
//! depend on the number of threads.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::simplex::{dist_sq_to_triangle, dist_to_segment};
use crate::geometry::{dist_to_simplex, in_slab, min_enclosing_ball_radius, orthonormalize_flat};
use crate::linalg::dist_sq;
use crate::params::{DimParams, ParamSchedule};
use crate::points::PointSet;
use crate::spatial::GridIndex;

/// Enumeration cap used outside of reference comparisons.
pub const DEFAULT_MAX_TUPLES_PER_ANCHOR: usize = 10_000;

/// Relative slack on radius filters so that floating-point rounding never
/// drops a candidate the exact predicate would accept.
const RADIUS_SLACK: f64 = 1e-12;

/// Execution knobs that do not change the mathematical definition (except
/// the cap, which is recorded in the result).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunOptions {
    /// Worker threads; `None` uses the global pool.
    pub threads: Option<usize>,
    /// Candidate tuples examined per anchor; `None` is unlimited.
    pub max_tuples_per_anchor: Option<usize>,
    /// Seed of the input cloud, copied into the result for provenance.
    pub seed: Option<u64>,
}

impl RunOptions {
    pub fn uncapped() -> Self {
        Self {
            threads: None,
            max_tuples_per_anchor: None,
            seed: None,
        }
    }

    pub fn with_threads(mut self, threads: usize) -> Self {
        self.threads = Some(threads);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            threads: None,
            max_tuples_per_anchor: Some(DEFAULT_MAX_TUPLES_PER_ANCHOR),
            seed: None,
        }
    }
}

/// Fixed-arity tuples of point indices stored back to back.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TupleList {
    arity: usize,
    indices: Vec<u32>,
}

impl TupleList {
    pub fn new(arity: usize) -> Self {
        assert!(arity >= 1);
        Self {
            arity,
            indices: Vec::new(),
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn len(&self) -> usize {
        if self.arity == 0 {
            0
        } else {
            self.indices.len() / self.arity
        }
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn get(&self, i: usize) -> &[u32] {
        &self.indices[i * self.arity..(i + 1) * self.arity]
    }

    pub fn push(&mut self, tuple: &[u32]) {
        assert_eq!(tuple.len(), self.arity);
        self.indices.extend_from_slice(tuple);
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = &[u32]> + '_ {
        self.indices.chunks_exact(self.arity.max(1))
    }

    pub fn as_flat(&self) -> &[u32] {
        &self.indices
    }

    pub fn to_vecs(&self) -> Vec<Vec<usize>> {
        self.iter()
            .map(|t| t.iter().map(|&i| i as usize).collect())
            .collect()
    }

    fn append(&mut self, other: &mut Vec<u32>) {
        self.indices.append(other);
    }
}

/// One detected layer.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LayerDetection {
    pub dim: usize,
    /// Co-detected tuples, lexicographic.
    pub tuples: TupleList,
    /// All points labeled with this dimension, ascending.
    pub labeled: Vec<usize>,
    /// The subset of `labeled` added by the pruning pass, ascending.
    pub pruned: Vec<usize>,
}

/// Provenance recorded with a result; part of its identity.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunMetadata {
    pub seed: Option<u64>,
    pub max_tuples_per_anchor: Option<usize>,
    /// Anchors whose enumeration stopped at the cap, per dimension step.
    pub cap_hits: Vec<usize>,
}

/// Machine-dependent facts about a run; excluded from result equality.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct RunInfo {
    pub threads: usize,
    pub wall_ms: f64,
}

impl PartialEq for RunInfo {
    fn eq(&self, _: &Self) -> bool {
        true
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StratificationResult {
    pub k_hat: usize,
    /// Nonempty layers by increasing dimension.
    pub layers: Vec<LayerDetection>,
    /// Points never labeled, ascending.
    pub residual: Vec<usize>,
    pub params_used: ParamSchedule,
    pub metadata: RunMetadata,
    #[serde(default)]
    pub run_info: RunInfo,
}

impl StratificationResult {
    /// Detected dimension of each point; `d_max + 1` for residual points.
    pub fn point_dims(&self, n: usize) -> Vec<usize> {
        let mut out = vec![self.params_used.d_max + 1; n];
        for layer in &self.layers {
            for &i in &layer.labeled {
                out[i] = layer.dim;
            }
        }
        out
    }

    pub fn layer(&self, dim: usize) -> Option<&LayerDetection> {
        self.layers.iter().find(|l| l.dim == dim)
    }

    /// Checks the partition and ordering invariants.
    pub fn check_invariants(&self, n: usize) -> Result<()> {
        let mut seen = vec![false; n];
        let mut mark = |i: usize, what: &str| -> Result<()> {
            if i >= n || std::mem::replace(&mut seen[i], true) {
                return Err(Error::Invariant(format!("{what} index {i} repeated or out of range")));
            }
            Ok(())
        };
        let mut last_dim = 0;
        for layer in &self.layers {
            if layer.dim <= last_dim {
                return Err(Error::Invariant("layer dimensions not increasing".into()));
            }
            last_dim = layer.dim;
            if layer.tuples.is_empty() {
                return Err(Error::Invariant(format!("layer {} has no tuples", layer.dim)));
            }
            for &i in &layer.labeled {
                mark(i, "labeled")?;
            }
            for t in layer.tuples.iter() {
                if t.iter().any(|&i| layer.labeled.binary_search(&(i as usize)).is_err()) {
                    return Err(Error::Invariant("tuple vertex not labeled".into()));
                }
            }
            if layer.pruned.iter().any(|i| layer.labeled.binary_search(i).is_err()) {
                return Err(Error::Invariant("pruned point not labeled".into()));
            }
        }
        for &i in &self.residual {
            mark(i, "residual")?;
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::Invariant("labels and residual do not cover all points".into()));
        }
        if self.k_hat != self.layers.len() {
            return Err(Error::Invariant("k_hat differs from the layer count".into()));
        }
        Ok(())
    }
}

/// Runs with the default options.
pub fn run(points: &PointSet, sched: &ParamSchedule) -> Result<StratificationResult> {
    run_with_options(points, sched, &RunOptions::default())
}

pub fn run_with_options(
    points: &PointSet,
    sched: &ParamSchedule,
    opts: &RunOptions,
) -> Result<StratificationResult> {
    if points.is_empty() {
        return Err(Error::EmptyCloud);
    }
    sched.validate(points.dim())?;
    if points.len() > u32::MAX as usize {
        return Err(Error::InvalidParameter("more than 2^32 points".into()));
    }
    let start = Instant::now();
    let (mut result, threads) = match opts.threads {
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t.max(1))
                .build()
                .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
            (pool.install(|| run_inner(points, sched, opts))?, t.max(1))
        }
        None => (run_inner(points, sched, opts)?, rayon::current_num_threads()),
    };
    result.run_info = RunInfo {
        threads,
        wall_ms: start.elapsed().as_secs_f64() * 1e3,
    };
    Ok(result)
}

fn run_inner(
    points: &PointSet,
    sched: &ParamSchedule,
    opts: &RunOptions,
) -> Result<StratificationResult> {
    let mut active: Vec<usize> = (0..points.len()).collect();
    let mut layers = Vec::new();
    let mut cap_hits = Vec::new();
    for d in 1..=sched.d_max {
        if active.is_empty() {
            break;
        }
        let p = sched.get(d);
        let index = GridIndex::build_subset(points, &active, p.r)?;
        let co = codetect_dimension(points, &active, d, p, &index, opts.max_tuples_per_anchor);
        cap_hits.push(co.cap_hits);

        let unlabeled: Vec<usize> = active
            .iter()
            .copied()
            .filter(|i| co.labeled.binary_search(i).is_err())
            .collect();
        let pruned = prune_pass(points, &unlabeled, &co.tuples, p.delta);
        let labeled = merge_sorted(&co.labeled, &pruned);
        if labeled.is_empty() {
            continue;
        }
        active.retain(|i| labeled.binary_search(i).is_err());
        layers.push(LayerDetection {
            dim: d,
            tuples: co.tuples,
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
            seed: opts.seed,
            max_tuples_per_anchor: opts.max_tuples_per_anchor,
            cap_hits,
        },
        run_info: RunInfo::default(),
    })
}

fn merge_sorted(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out: Vec<usize> = a.iter().chain(b).copied().collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// Output of one co-detection step.
#[derive(Clone, Debug, Default)]
pub struct CoDetection {
    pub tuples: TupleList,
    /// Union of tuple vertices, ascending.
    pub labeled: Vec<usize>,
    pub cap_hits: usize,
}

/// Co-detected `(d+1)`-tuples of `active` points (sorted ascending).
///
/// `index` must cover exactly the active points.
pub fn codetect_dimension(
    points: &PointSet,
    active: &[usize],
    d: usize,
    p: &DimParams,
    index: &GridIndex,
    cap: Option<usize>,
) -> CoDetection {
    assert!(d >= 1 && d < points.dim().max(2), "dimension step out of range");
    let mut tuples = TupleList::new(d + 1);
    if active.len() < d + 1 {
        return CoDetection {
            tuples,
            ..Default::default()
        };
    }
    let ctx = StepContext::new(points, d, p, index, cap);
    let per_anchor: Vec<(Vec<u32>, bool)> = active
        .par_iter()
        .with_min_len(16)
        .map(|&a| ctx.scan_anchor(a))
        .collect();

    let mut cap_hits = 0;
    let mut labeled = Vec::new();
    for (mut found, hit) in per_anchor {
        cap_hits += hit as usize;
        labeled.extend(found.iter().map(|&i| i as usize));
        tuples.append(&mut found);
    }
    labeled.sort_unstable();
    labeled.dedup();
    CoDetection {
        tuples,
        labeled,
        cap_hits,
    }
}

struct StepContext<'a> {
    points: &'a PointSet,
    index: &'a GridIndex,
    d: usize,
    r: f64,
    pair_sq: f64,
    h_par_sq: f64,
    h_perp_sq: f64,
    slab_radius: f64,
    n_min: usize,
    cap: usize,
}

impl<'a> StepContext<'a> {
    fn new(
        points: &'a PointSet,
        d: usize,
        p: &DimParams,
        index: &'a GridIndex,
        cap: Option<usize>,
    ) -> Self {
        let two_r = 2.0 * p.r * (1.0 + RADIUS_SLACK);
        Self {
            points,
            index,
            d,
            r: p.r,
            pair_sq: two_r * two_r,
            h_par_sq: p.h_par * p.h_par,
            h_perp_sq: p.h_perp * p.h_perp,
            slab_radius: (p.h_par * p.h_par + p.h_perp * p.h_perp).sqrt() * (1.0 + RADIUS_SLACK),
            n_min: p.n_min,
            cap: cap.unwrap_or(usize::MAX),
        }
    }

    /// All co-detected tuples anchored at `a`, lexicographic; flag set when
    /// the cap stopped the enumeration.
    fn scan_anchor(&self, a: usize) -> (Vec<u32>, bool) {
        let pa = self.points.point(a);
        let mut nbrs: Vec<usize> = Vec::new();
        self.index.visit_within(pa, self.pair_sq.sqrt(), |i, _| {
            if i > a {
                nbrs.push(i);
            }
            true
        });
        let mut found = Vec::new();
        if nbrs.len() < self.d {
            return (found, false);
        }
        nbrs.sort_unstable();

        let amb = self.points.dim();
        let mut local = Local::gather(self, pa);
        let mut scratch = Scratch::new(self.d, amb);
        let mut chosen = Vec::with_capacity(self.d + 1);
        chosen.push(a);
        let mut examined = 0usize;
        let hit = self.extend(&nbrs, 0, &mut chosen, &mut examined, &mut scratch, &mut local, &mut found);
        (found, hit)
    }

    /// Depth-first extension of `chosen` with neighbors from `start` on.
    /// Returns `true` when the cap was reached.
    #[allow(clippy::too_many_arguments)]
    fn extend(
        &self,
        nbrs: &[usize],
        start: usize,
        chosen: &mut Vec<usize>,
        examined: &mut usize,
        scratch: &mut Scratch,
        local: &mut Local,
        found: &mut Vec<u32>,
    ) -> bool {
        let need = self.d + 1 - chosen.len();
        for j in start..nbrs.len() {
            if nbrs.len() - j < need {
                break;
            }
            let c = nbrs[j];
            let pc = self.points.point(c);
            // The anchor is within range by construction.
            if chosen[1..]
                .iter()
                .any(|&q| dist_sq(self.points.point(q), pc) > self.pair_sq)
            {
                continue;
            }
            chosen.push(c);
            if need == 1 {
                if self.radius_ok(chosen) {
                    if *examined >= self.cap {
                        chosen.pop();
                        return true;
                    }
                    *examined += 1;
                    if self.codetected(chosen, scratch, local) {
                        found.extend(chosen.iter().map(|&i| i as u32));
                    }
                }
            } else if self.extend(nbrs, j + 1, chosen, examined, scratch, local, found) {
                chosen.pop();
                return true;
            }
            chosen.pop();
        }
        false
    }

    fn radius_ok(&self, tuple: &[usize]) -> bool {
        let mut buf: [&[f64]; 8] = [&[]; 8];
        if tuple.len() <= buf.len() {
            for (b, &i) in buf.iter_mut().zip(tuple) {
                *b = self.points.point(i);
            }
            return min_enclosing_ball_radius(&buf[..tuple.len()]) <= self.r;
        }
        let verts: Vec<&[f64]> = tuple.iter().map(|&i| self.points.point(i)).collect();
        min_enclosing_ball_radius(&verts) <= self.r
    }

    fn codetected(&self, tuple: &[usize], s: &mut Scratch, local: &Local) -> bool {
        if !tuple_frame(self.points, tuple, s) {
            return false;
        }
        // Slab points lie within `slab_radius` of the barycenter, hence
        // within `|c - a| + slab_radius` of the anchor.
        let reach = dist_sq(&s.center, &local.anchor).sqrt() + self.slab_radius;
        let end = local.dist.partition_point(|&t| t <= reach);
        let amb = local.anchor.len();
        let k = self.d;
        let mut count = 0usize;
        for (m, q) in local.coords[..end * amb].chunks_exact(amb).enumerate() {
            if count + (end - m) < self.n_min {
                return false;
            }
            if in_slab(&s.center, &s.basis, k, self.h_par_sq, self.h_perp_sq, q) {
                count += 1;
                if count >= self.n_min {
                    return true;
                }
            }
        }
        false
    }
}

/// Active points that can fall in the slab of a tuple through one anchor,
/// by increasing distance to it.
struct Local {
    anchor: Vec<f64>,
    dist: Vec<f64>,
    coords: Vec<f64>,
}

impl Local {
    fn gather(ctx: &StepContext<'_>, pa: &[f64]) -> Self {
        // |c - a| <= d/(d+1) * max_j |y_j - a| for the barycenter c.
        let d = ctx.d as f64;
        let radius = (d / (d + 1.0) * ctx.pair_sq.sqrt() + ctx.slab_radius) * (1.0 + 1e-9);
        let mut near: Vec<(f64, usize)> = Vec::new();
        ctx.index.visit_within(pa, radius, |i, q| {
            near.push((dist_sq(pa, q).sqrt(), i));
            true
        });
        near.sort_unstable_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
        let amb = pa.len();
        let mut coords = Vec::with_capacity(near.len() * amb);
        for &(_, i) in &near {
            coords.extend_from_slice(ctx.points.point(i));
        }
        Self {
            anchor: pa.to_vec(),
            // Rounding slack on the sorted distances.
            dist: near.iter().map(|x| x.0 * (1.0 - 1e-12)).collect(),
            coords,
        }
    }
}

/// Reusable buffers for a tuple's barycenter and orthonormal span.
pub(crate) struct Scratch {
    pub(crate) center: Vec<f64>,
    pub(crate) basis: Vec<f64>,
    edges: Vec<f64>,
}

impl Scratch {
    pub(crate) fn new(d: usize, amb: usize) -> Self {
        Self {
            center: vec![0.0; amb],
            basis: vec![0.0; d * amb],
            edges: vec![0.0; d * amb],
        }
    }
}

/// Fills the barycenter and span of `tuple`; `false` if degenerate.
pub(crate) fn tuple_frame(points: &PointSet, tuple: &[usize], s: &mut Scratch) -> bool {
    let amb = points.dim();
    let k = tuple.len() - 1;
    let p0 = points.point(tuple[0]);
    for (j, &i) in tuple[1..].iter().enumerate() {
        let pi = points.point(i);
        for t in 0..amb {
            s.edges[j * amb + t] = pi[t] - p0[t];
        }
    }
    if orthonormalize_flat(&s.edges, k, amb, &mut s.basis).is_err() {
        return false;
    }
    s.center.iter_mut().for_each(|c| *c = 0.0);
    for &i in tuple {
        for (c, x) in s.center.iter_mut().zip(points.point(i)) {
            *c += x;
        }
    }
    let inv = 1.0 / tuple.len() as f64;
    s.center.iter_mut().for_each(|c| *c *= inv);
    true
}

/// Distance from `p` to the convex hull of the given vertices.
#[inline]
pub(crate) fn hull_dist(points: &PointSet, tuple: &[u32], p: &[f64]) -> f64 {
    match tuple.len() {
        1 => dist_sq(p, points.point(tuple[0] as usize)).sqrt(),
        2 => dist_to_segment(p, points.point(tuple[0] as usize), points.point(tuple[1] as usize)),
        3 => dist_sq_to_triangle(
            p,
            points.point(tuple[0] as usize),
            points.point(tuple[1] as usize),
            points.point(tuple[2] as usize),
        )
        .sqrt(),
        _ => {
            let v: Vec<&[f64]> = tuple.iter().map(|&i| points.point(i as usize)).collect();
            dist_to_simplex(p, &v)
        }
    }
}

/// Points of `candidates` within closed distance `delta` of the union of the
/// tuples' convex hulls, ascending.
pub fn prune_pass(
    points: &PointSet,
    candidates: &[usize],
    tuples: &TupleList,
    delta: f64,
) -> Vec<usize> {
    if tuples.is_empty() || candidates.is_empty() {
        return Vec::new();
    }
    // Tuples sharing a first vertex are contiguous. Every hull point lies
    // within `reach` of its first vertex.
    let mut groups: Vec<(usize, std::ops::Range<usize>)> = Vec::new();
    let mut reach = 0.0_f64;
    for (t, tup) in tuples.iter().enumerate() {
        let a = tup[0] as usize;
        let pa = points.point(a);
        for &v in &tup[1..] {
            reach = reach.max(dist_sq(pa, points.point(v as usize)));
        }
        match groups.last_mut() {
            Some((g, range)) if *g == a => range.end = t + 1,
            _ => groups.push((a, t..t + 1)),
        }
    }
    let reach = reach.sqrt();
    let query = (reach + delta) * (1.0 + RADIUS_SLACK) + f64::MIN_POSITIVE;
    let anchors: Vec<usize> = groups.iter().map(|(a, _)| *a).collect();
    let mut group_of = rustc_hash::FxHashMap::default();
    for (g, (a, _)) in groups.iter().enumerate() {
        group_of.insert(*a, g);
    }
    let index = GridIndex::build_subset(points, &anchors, query.max(1e-300))
        .expect("positive cell size");

    let keep: Vec<bool> = candidates
        .par_iter()
        .map(|&z| {
            let pz = points.point(z);
            let mut near = false;
            index.visit_within(pz, query, |a, _| {
                let range = groups[group_of[&a]].1.clone();
                for t in range {
                    if hull_dist(points, tuples.get(t), pz) <= delta {
                        near = true;
                        return false;
                    }
                }
                true
            });
            near
        })
        .collect();
    candidates
        .iter()
        .zip(keep)
        .filter_map(|(&z, k)| k.then_some(z))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{practical_schedule, DimOverride, ScheduleOverrides};

    fn one_dim_schedule(ambient: usize, h: f64, n_min: usize) -> ParamSchedule {
        let o = ScheduleOverrides {
            d_max: Some(1),
            dims: vec![DimOverride {
                d: 1,
                h_par: Some(h),
                n_min: Some(n_min),
                ..Default::default()
            }],
            ..Default::default()
        };
        practical_schedule(100, ambient, &o).unwrap()
    }

    #[test]
    fn segment_of_thirty_points() {
        let rows: Vec<[f64; 2]> = (0..30).map(|i| [i as f64 / 29.0, 0.0]).collect();
        let pts = PointSet::from_rows(&rows).unwrap();
        let sched = one_dim_schedule(2, 0.2, 3);
        let res = run_with_options(&pts, &sched, &RunOptions::uncapped()).unwrap();
        res.check_invariants(30).unwrap();
        assert_eq!(res.k_hat, 1);
        assert_eq!(res.layers[0].dim, 1);
        assert_eq!(res.layers[0].labeled.len(), 30);
        let tuples = res.layers[0].tuples.to_vecs();
        for i in 0..29 {
            assert!(tuples.contains(&vec![i, i + 1]));
        }
    }

    #[test]
    fn too_few_points_gives_nothing() {
        let rows = [[0.0, 0.0], [0.1, 0.0], [0.2, 0.0]];
        let pts = PointSet::from_rows(&rows).unwrap();
        let sched = one_dim_schedule(2, 10.0, 4);
        let res = run(&pts, &sched).unwrap();
        assert_eq!(res.k_hat, 0);
        assert_eq!(res.residual, vec![0, 1, 2]);
    }

    #[test]
    fn a_pair_codetects_itself() {
        let pts = PointSet::from_rows(&[[0.0, 0.0], [1.0, 3.0]]).unwrap();
        let sched = one_dim_schedule(2, 100.0, 2);
        let res = run(&pts, &sched).unwrap();
        assert_eq!(res.k_hat, 1);
        assert_eq!(res.layers[0].tuples.to_vecs(), vec![vec![0, 1]]);
    }

    #[test]
    fn collinear_triple_outer_pair() {
        let pts = PointSet::from_rows(&[[0.0, 0.0], [0.5, 0.0], [1.0, 0.0]]).unwrap();
        let sched = one_dim_schedule(2, 0.6, 3);
        let active = [0, 1, 2];
        let index = GridIndex::build(&pts, sched.get(1).r).unwrap();
        let co = codetect_dimension(&pts, &active, 1, sched.get(1), &index, None);
        assert!(co.tuples.to_vecs().contains(&vec![0, 2]));
    }

    #[test]
    fn distant_clusters_not_paired() {
        let pts = PointSet::from_rows(&[[0.0, 0.0], [0.1, 0.0], [5.0, 0.0], [5.1, 0.0]]).unwrap();
        let sched = one_dim_schedule(2, 0.2, 2);
        let index = GridIndex::build(&pts, sched.get(1).r).unwrap();
        let co = codetect_dimension(&pts, &[0, 1, 2, 3], 1, sched.get(1), &index, None);
        assert_eq!(co.tuples.to_vecs(), vec![vec![0, 1], vec![2, 3]]);
    }

    #[test]
    fn prune_examples() {
        let pts = PointSet::from_rows(&[[0.0, 0.0], [1.0, 0.0], [0.5, 0.15], [0.0, 0.0]]).unwrap();
        let mut tuples = TupleList::new(2);
        tuples.push(&[0, 1]);
        // A duplicate of a hull vertex is always in, even for delta = 0.
        assert_eq!(prune_pass(&pts, &[3], &tuples, 0.0), vec![3]);
        assert_eq!(prune_pass(&pts, &[2], &tuples, 0.1), Vec::<usize>::new());
        assert_eq!(prune_pass(&pts, &[2], &tuples, 0.15), vec![2]);
        assert!(prune_pass(&pts, &[2], &TupleList::new(2), 1.0).is_empty());
    }

    #[test]
    fn cap_is_recorded() {
        let rows: Vec<[f64; 2]> = (0..20).map(|i| [i as f64 * 0.01, 0.0]).collect();
        let pts = PointSet::from_rows(&rows).unwrap();
        let sched = one_dim_schedule(2, 1.0, 2);
        let opts = RunOptions {
            max_tuples_per_anchor: Some(3),
            ..RunOptions::default()
        };
        let res = run_with_options(&pts, &sched, &opts).unwrap();
        assert!(res.metadata.cap_hits[0] > 0);
        assert_eq!(res.layers[0].tuples.get(0), &[0, 1]);
    }
}
