//! Invariant checks shared by the property tests and the acceptance run.
//!
//! Every check takes raw numbers (so proptest and a seeded loop can both
//! drive it) and returns `Err(description)` on violation. `Ok(false)` means
//! the input was degenerate and the case was skipped.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use slabeling::geometry::{
    dist_to_simplex, hausdorff, min_enclosing_ball_radius, orthonormalize, principal_angles, slab_contains,
    subspace_angle, Slab, Subspace,
};
use slabeling::oracle::{convex_min, linear_scan_within, mc_section_volume, section_volume_bound};
use slabeling::params::{practical_schedule, BandwidthRule, ScheduleOverrides};
use slabeling::samplers::{figure_eight, sample_mixture, ManifoldKind, ManifoldSpec};
use slabeling::spatial::GridIndex;
use slabeling::{ParamSchedule, PointSet};

pub type Check = Result<bool, String>;

fn fail(msg: String) -> Check {
    Err(msg)
}

/// `k` vectors of length `amb` from a flat buffer.
fn rows(raw: &[f64], k: usize, amb: usize) -> Vec<&[f64]> {
    (0..k).map(|i| &raw[i * amb..(i + 1) * amb]).collect()
}

/// Span of the first `k` vectors in `raw`; `None` when degenerate.
pub fn flat(raw: &[f64], k: usize, amb: usize) -> Option<Subspace> {
    orthonormalize(&rows(raw, k, amb)).ok()
}

/// Orthogonal matrix (row-major) from `amb * amb` raw numbers.
pub fn orthogonal(raw: &[f64], amb: usize) -> Option<Vec<f64>> {
    flat(raw, amb, amb).map(|s| s.basis_flat().to_vec())
}

fn mat_vec(q: &[f64], v: &[f64]) -> Vec<f64> {
    let d = v.len();
    (0..d).map(|i| (0..d).map(|j| q[i * d + j] * v[j]).sum()).collect()
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

// ---------------------------------------------------------------- geometry

/// Principal angles: symmetric, sorted, within `[0, pi/2]`.
pub fn principal_angles_well_formed(raw: &[f64], amb: usize, k1: usize, k2: usize) -> Check {
    let (Some(a), Some(b)) = (flat(raw, k1, amb), flat(&raw[k1 * amb..], k2, amb)) else {
        return Ok(false);
    };
    let ab = principal_angles(&a, &b);
    let ba = principal_angles(&b, &a);
    if ab.len() != k1.max(k2) {
        return fail(format!("{} angles for dims {k1}, {k2}", ab.len()));
    }
    for (x, y) in ab.iter().zip(&ba) {
        if (x - y).abs() > 1e-12 {
            return fail(format!("asymmetric: {ab:?} vs {ba:?}"));
        }
    }
    if ab.windows(2).any(|w| w[0] > w[1]) {
        return fail(format!("unsorted: {ab:?}"));
    }
    if ab.iter().any(|&t| !(0.0..=std::f64::consts::FRAC_PI_2).contains(&t)) {
        return fail(format!("out of range: {ab:?}"));
    }
    Ok(true)
}

/// Equal dimensions: operator-norm angle is the sine of the largest
/// principal angle.
pub fn angle_is_sine_of_largest(raw: &[f64], amb: usize, k: usize) -> Check {
    let (Some(a), Some(b)) = (flat(raw, k, amb), flat(&raw[k * amb..], k, amb)) else {
        return Ok(false);
    };
    let s = subspace_angle(&a, &b);
    let last = *principal_angles(&a, &b).last().unwrap();
    if (s - last.sin()).abs() > 1e-9 {
        return fail(format!("angle {s} vs sin {}", last.sin()));
    }
    Ok(true)
}

pub fn angle_triangle_inequality(raw: &[f64], amb: usize, k: usize) -> Check {
    let w = k * amb;
    let (Some(a), Some(b), Some(c)) = (flat(raw, k, amb), flat(&raw[w..], k, amb), flat(&raw[2 * w..], k, amb))
    else {
        return Ok(false);
    };
    let (ab, bc, ac) = (subspace_angle(&a, &b), subspace_angle(&b, &c), subspace_angle(&a, &c));
    if ac > ab + bc + 1e-12 {
        return fail(format!("{ac} > {ab} + {bc}"));
    }
    Ok(true)
}

/// Rotating center, flat and query point together preserves membership.
/// Points within `1e-9` (relative) of the boundary are skipped.
pub fn slab_rotation_invariant(raw: &[f64], amb: usize, k: usize, h_par: f64, h_perp: f64) -> Check {
    let Some(t) = flat(raw, k, amb) else { return Ok(false) };
    let raw = &raw[k * amb..];
    let Some(q) = orthogonal(raw, amb) else { return Ok(false) };
    let raw = &raw[amb * amb..];
    let (c, p) = (&raw[..amb], &raw[amb..2 * amb]);
    let v: Vec<f64> = p.iter().zip(c).map(|(x, y)| x - y).collect();
    let tan = t.project(&v);
    let tan_sq: f64 = tan.iter().map(|x| x * x).sum();
    let nor_sq = v.iter().map(|x| x * x).sum::<f64>() - tan_sq;
    let margin = |x: f64, h: f64| (x - h * h).abs() <= 1e-9 * h * h;
    if margin(tan_sq, h_par) || margin(nor_sq, h_perp) {
        return Ok(false);
    }
    let before = slab_contains(&Slab::new(c.to_vec(), t.clone(), h_par, h_perp), p);
    let rc = mat_vec(&q, c);
    let rp = mat_vec(&q, p);
    let after = slab_contains(&Slab::new(rc, t.transformed(&q), h_par, h_perp), &rp);
    if before != after {
        return fail(format!("membership changed under rotation ({before} -> {after})"));
    }
    Ok(true)
}

/// Exact enclosing-ball radius against a direct search over centers.
pub fn enclosing_ball_matches_search(raw: &[f64], m: usize) -> Check {
    let pts = rows(raw, m, 3);
    let r = min_enclosing_ball_radius(&pts);
    let f = |c: &[f64]| pts.iter().map(|p| dist(p, c)).fold(0.0, f64::max);
    let (g, _) = convex_min(f, &[-1.0; 3], &[1.0; 3], 1e-9);
    if r > g + 1e-12 {
        return fail(format!("radius {r} above a feasible center's {g}"));
    }
    if (r - g).abs() > 1e-6 {
        return fail(format!("radius {r} vs searched minimum {g}"));
    }
    Ok(true)
}

/// `dist_to_simplex(p, V) = 0` iff `p` is a convex combination of `V`,
/// feasibility decided by solving for barycentric coordinates.
pub fn simplex_distance_zero_iff_inside(raw: &[f64], amb: usize, m: usize, combine: bool) -> Check {
    let verts = rows(raw, m, amb);
    let rest = &raw[m * amb..];
    let p: Vec<f64> = if combine {
        let w: Vec<f64> = rest[..m].iter().map(|x| x.abs() + 1e-3).collect();
        let s: f64 = w.iter().sum();
        (0..amb).map(|i| verts.iter().zip(&w).map(|(v, wk)| v[i] * wk / s).sum()).collect()
    } else {
        rest[m..m + amb].to_vec()
    };
    // Least squares for p - v0 = sum_k lambda_k (v_k - v0).
    let e = nalgebra::DMatrix::from_fn(amb, m - 1, |i, k| verts[k + 1][i] - verts[0][i]);
    let rhs = nalgebra::DVector::from_fn(amb, |i, _| p[i] - verts[0][i]);
    let svd = e.clone().svd(true, true);
    let sv = &svd.singular_values;
    if sv.iter().copied().fold(f64::INFINITY, f64::min) < 1e-6 * sv.max() {
        return Ok(false);
    }
    let lam = svd.solve(&rhs, 1e-14).map_err(|e| e.to_string())?;
    let residual = (&e * &lam - &rhs).norm();
    let l0 = 1.0 - lam.sum();
    let min_w = lam.iter().copied().fold(l0, f64::min);
    // Skip ambiguous cases next to the boundary.
    if (residual > 1e-12 && residual < 1e-6) || min_w.abs() < 1e-7 {
        return Ok(false);
    }
    let feasible = residual <= 1e-12 && min_w >= 0.0;
    let d = dist_to_simplex(&p, &verts);
    if feasible != (d <= 1e-9) {
        return fail(format!("distance {d}, feasible {feasible} (residual {residual}, min weight {min_w})"));
    }
    if combine && !feasible {
        return fail("a convex combination judged infeasible".into());
    }
    Ok(true)
}

/// Hausdorff distance on finite sets: exact symmetry, triangle inequality.
pub fn hausdorff_is_metric(raw: &[f64], amb: usize, sizes: [usize; 3]) -> Check {
    let mut off = 0;
    let mut sets = Vec::new();
    for s in sizes {
        sets.push(rows(&raw[off..], s, amb));
        off += s * amb;
    }
    let (a, b, c) = (&sets[0], &sets[1], &sets[2]);
    if hausdorff(a, b).to_bits() != hausdorff(b, a).to_bits() {
        return fail("asymmetric".into());
    }
    let (ab, bc, ac) = (hausdorff(a, b), hausdorff(b, c), hausdorff(a, c));
    if ac > ab + bc + 1e-12 {
        return fail(format!("{ac} > {ab} + {bc}"));
    }
    if hausdorff(a, a) != 0.0 {
        return fail("nonzero self-distance".into());
    }
    Ok(true)
}

/// Monte-Carlo section volume stays under the principal-angle bound.
pub fn section_volume_below_bound(raw: &[f64], amb: usize, k: usize, k2: usize, h_par: f64, h_perp: f64, seed: u64) -> Check {
    let (Some(t), Some(t2)) = (flat(raw, k, amb), flat(&raw[k * amb..], k2, amb)) else {
        return Ok(false);
    };
    let est = mc_section_volume(&t, &t2, h_par, h_perp, 4000, seed);
    let bound = section_volume_bound(&t, &t2, h_par, h_perp);
    if est.value > bound + 3.0 * est.std_error {
        return fail(format!("estimate {} +- {} above bound {bound}", est.value, est.std_error));
    }
    Ok(true)
}

// ----------------------------------------------------------------- spatial

/// Grid queries equal a linear scan, whatever the cell size.
pub fn grid_matches_scan(raw: &[f64], amb: usize, q: &[f64], r: f64, cells: [f64; 2]) -> Check {
    let pts = PointSet::from_flat(amb, raw.to_vec()).map_err(|e| e.to_string())?;
    let expect = linear_scan_within(&pts, q, r);
    for cell in cells {
        let index = GridIndex::build(&pts, cell).map_err(|e| e.to_string())?;
        let got = index.neighbors_within(q, r);
        if got != expect {
            return fail(format!("cell {cell}: {got:?} vs scan {expect:?}"));
        }
    }
    Ok(true)
}

// ------------------------------------------------------------------ params

/// `h_d` decreases in `n` and `h_d (n / ln n)^{1/d}` is constant.
pub fn bandwidth_rate(n: usize, ambient: usize) -> Check {
    let o = ScheduleOverrides::default();
    let (a, b) = (
        practical_schedule(n, ambient, &o).map_err(|e| e.to_string())?,
        practical_schedule(n + 1 + n / 3, ambient, &o).map_err(|e| e.to_string())?,
    );
    let n2 = n + 1 + n / 3;
    for d in 1..=a.d_max {
        let (h, h2) = (a.get(d).h_par, b.get(d).h_par);
        if !(h2 < h) {
            return fail(format!("h_{d} not decreasing: {h} at n = {n}, {h2} at n = {n2}"));
        }
        let scaled = |h: f64, n: usize| h * (n as f64 / (n as f64).ln()).powf(1.0 / d as f64);
        let (c1, c2) = (scaled(h, n), scaled(h2, n2));
        if (c1 - c2).abs() > 1e-12 * c1 {
            return fail(format!("rate constant moved: {c1} vs {c2}"));
        }
    }
    Ok(true)
}

/// Schedules survive a JSON round trip bit for bit.
pub fn schedule_roundtrip(n: usize, ambient: usize, h_scale: f64, asymptotic: bool) -> Check {
    let o = ScheduleOverrides {
        h_scale: Some(h_scale),
        rule: if asymptotic { BandwidthRule::Asymptotic } else { BandwidthRule::Coverage },
        ..Default::default()
    };
    let s = practical_schedule(n, ambient, &o).map_err(|e| e.to_string())?;
    let back = ParamSchedule::from_json(&s.to_json()).map_err(|e| e.to_string())?;
    let bits = |s: &ParamSchedule| -> Vec<u64> {
        s.dims
            .iter()
            .flat_map(|p| [p.h_par, p.h_perp, p.r, p.delta, p.kappa].map(f64::to_bits))
            .collect()
    };
    if back != s || bits(&back) != bits(&s) {
        return fail(format!("round trip changed the schedule:\n{}", s.to_json()));
    }
    Ok(true)
}

// ---------------------------------------------------------------- samplers

/// The embedded shapes, placed by `scale`, a rotation and a shift.
pub fn placed_spec(which: usize, scale: f64, rot_raw: &[f64], shift: &[f64]) -> Option<ManifoldSpec> {
    let (kind, amb) = match which % 4 {
        0 => (ManifoldKind::Circle, 3),
        1 => (ManifoldKind::Sphere { dim: 2 }, 3),
        2 => (ManifoldKind::Torus { major: 2.0, minor: 0.5 }, 3),
        _ => (ManifoldKind::FlatTorus { circles: 2 }, 4),
    };
    let q = orthogonal(rot_raw, amb)?;
    Some(ManifoldSpec::new(kind, amb).scaled(scale).rotated(q).translated(&shift[..amb]))
}

/// Same inputs, same cloud, bit for bit.
pub fn sampler_deterministic(spec: &ManifoldSpec, n: usize, seed: u64) -> Check {
    let a = sample_mixture(std::slice::from_ref(spec), &[1.0], n, seed).map_err(|e| e.to_string())?;
    let b = sample_mixture(std::slice::from_ref(spec), &[1.0], n, seed).map_err(|e| e.to_string())?;
    let bits = |p: &PointSet| p.as_flat().iter().map(|x| x.to_bits()).collect::<Vec<_>>();
    if bits(&a.points) != bits(&b.points) || a.labels != b.labels {
        return fail("two draws differ".into());
    }
    Ok(true)
}

/// `|(y - x) - pi_{T_x}(y - x)| <= (kappa/2) |y - x|^2` for close sample
/// pairs.
pub fn tangent_second_order(spec: &ManifoldSpec, n: usize, seed: u64) -> Check {
    let cloud = sample_mixture(std::slice::from_ref(spec), &[1.0], n, seed).map_err(|e| e.to_string())?;
    let tangents = cloud.tangents.as_ref().ok_or("sampler returned no tangents")?;
    let kappa = spec.max_curvature();
    let reach = 0.1 / kappa;
    let index = GridIndex::build(&cloud.points, reach).map_err(|e| e.to_string())?;
    let mut pairs = 0;
    for i in 0..cloud.len() {
        let x = cloud.points.point(i);
        for j in index.neighbors_within(x, reach) {
            if j == i {
                continue;
            }
            let v: Vec<f64> = cloud.points.point(j).iter().zip(x).map(|(a, b)| a - b).collect();
            let pv = tangents[i].project(&v);
            let normal = dist(&v, &pv);
            let len_sq: f64 = v.iter().map(|a| a * a).sum();
            let bound = 0.5 * kappa * len_sq;
            if normal > bound * (1.0 + 1e-9) + 1e-14 {
                return fail(format!("pair ({i}, {j}): normal part {normal} > {bound}"));
            }
            pairs += 1;
        }
    }
    Ok(pairs > 0)
}

/// The curvature inequality on the figure eight, by parameter (the two
/// branches through the crossing are not close in parameter).
pub fn figure_eight_second_order(t: f64, step: f64) -> Check {
    let x = figure_eight::point(t);
    let y = figure_eight::point(t + step);
    let u = figure_eight::unit_tangent(t);
    let v = [y[0] - x[0], y[1] - x[1]];
    let len_sq = v[0] * v[0] + v[1] * v[1];
    if len_sq.sqrt() > 0.1 / figure_eight::MAX_CURVATURE || len_sq == 0.0 {
        return Ok(false);
    }
    let normal = (v[0] * u[1] - v[1] * u[0]).abs();
    let bound = 0.5 * figure_eight::MAX_CURVATURE * len_sq;
    if normal > bound * (1.0 + 1e-9) + 1e-15 {
        return fail(format!("t = {t}, step {step}: {normal} > {bound}"));
    }
    Ok(true)
}

// -------------------------------------------------------------- seeded loop

/// Runs `check` on `cases` seeded draws; returns (checked, skipped) or the
/// first failure.
pub fn seeded_cases(
    name: &str,
    cases: usize,
    seed: u64,
    mut check: impl FnMut(&mut ChaCha8Rng) -> Check,
) -> Result<(usize, usize), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut ok, mut skipped) = (0, 0);
    for case in 0..cases {
        match check(&mut rng) {
            Ok(true) => ok += 1,
            Ok(false) => skipped += 1,
            Err(e) => return Err(format!("{name}, case {case}: {e}")),
        }
    }
    Ok((ok, skipped))
}

pub fn uniform_vec(rng: &mut impl Rng, len: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..len).map(|_| rng.random_range(lo..hi)).collect()
}

// ------------------------------------------------------------ oracle cases

/// One small cloud for the brute-force comparison.
pub struct OracleCase {
    pub name: String,
    pub points: PointSet,
    pub schedule: ParamSchedule,
}

/// Twenty seeded clouds in `R^3`, `n <= 200`, `d_max = 2`, covering single
/// and mixed layers, a tangential contact and a torus, with bandwidths from
/// tight to loose.
pub fn oracle_cases() -> Vec<OracleCase> {
    use slabeling::params::DimOverride;
    use slabeling::samplers::preset;

    let scenes = ["circle_sphere", "tangent_contact", "torus", "circle_sphere", "tangent_contact"];
    let torus_small = |s: &mut slabeling::samplers::Scene| {
        for spec in &mut s.specs {
            *spec = spec.clone().scaled(0.5);
        }
    };
    (0..20u64)
        .map(|seed| {
            let name = scenes[seed as usize % scenes.len()];
            let mut scene = preset(name).expect("preset");
            if name == "torus" {
                torus_small(&mut scene);
            }
            let n = 120 + 4 * seed as usize;
            let cloud = sample_mixture(&scene.specs, &scene.weights, n, 1000 + seed).expect("sample");
            let h_scale = [0.15, 0.2, 0.25, 0.35][seed as usize % 4];
            let n_min = [3, 4, 6][seed as usize % 3];
            let o = ScheduleOverrides {
                d_max: Some(2),
                h_scale: Some(h_scale),
                dims: (1..=2)
                    .map(|d| DimOverride {
                        d,
                        n_min: Some(n_min),
                        ..Default::default()
                    })
                    .collect(),
                ..Default::default()
            };
            let schedule = practical_schedule(n, 3, &o).expect("schedule");
            OracleCase {
                name: format!("{name} n={n} seed={} h_scale={h_scale} n_min={n_min}", 1000 + seed),
                points: cloud.points,
                schedule,
            }
        })
        .collect()
}
