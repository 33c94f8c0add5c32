use nalgebra::{DMatrix, DVector};

use crate::linalg::{cholesky_solve, dist, dist_sq, dot, norm_sq};

/// Relative slack on "point inside ball" checks in the enclosing-ball search.
const BALL_SLACK: f64 = 1e-12;
/// Barycentric coordinates above `-BARY_TOL` count as inside a face.
const BARY_TOL: f64 = 1e-12;

/// Radius of the smallest ball enclosing at most `D + 1` points.
pub fn min_enclosing_ball_radius(points: &[&[f64]]) -> f64 {
    match points.len() {
        0 => panic!("enclosing ball of an empty set"),
        1 => 0.0,
        2 => dist(points[0], points[1]) / 2.0,
        3 => triangle_radius(points[0], points[1], points[2]),
        _ => min_enclosing_ball(points).1,
    }
}

/// Smallest ball enclosing a small point set, as `(center, radius)`.
///
/// The optimal ball is the circumscribed ball, within its own affine hull, of
/// some affinely independent subset of the points; all subsets are tried and
/// the smallest ball that encloses every point wins.
pub fn min_enclosing_ball(points: &[&[f64]]) -> (Vec<f64>, f64) {
    let k = points.len();
    assert!(k >= 1, "enclosing ball of an empty set");
    assert!(k <= 16, "exhaustive enclosing ball limited to 16 points");
    let scale = points
        .iter()
        .flat_map(|p| points.iter().map(move |q| dist(p, q)))
        .fold(0.0, f64::max);
    let mut best: Option<(Vec<f64>, f64)> = None;
    for mask in 1u32..(1 << k) {
        let subset: Vec<&[f64]> = (0..k)
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| points[i])
            .collect();
        let Some((center, r)) = circumball(&subset) else {
            continue;
        };
        if best.as_ref().is_some_and(|(_, b)| *b <= r) {
            continue;
        }
        let tol = r * BALL_SLACK + scale * 1e-15;
        if points.iter().all(|p| dist(p, &center) <= r + tol) {
            best = Some((center, r));
        }
    }
    best.expect("a vertex subset always yields an enclosing ball")
}

/// Circumscribed ball of affinely independent points inside their affine hull.
fn circumball(pts: &[&[f64]]) -> Option<(Vec<f64>, f64)> {
    let base = pts[0];
    let m = pts.len() - 1;
    if m == 0 {
        return Some((base.to_vec(), 0.0));
    }
    let edges: Vec<Vec<f64>> = pts[1..]
        .iter()
        .map(|p| p.iter().zip(base).map(|(a, b)| a - b).collect())
        .collect();
    let mut g = vec![0.0; m * m];
    let mut rhs = vec![0.0; m];
    for i in 0..m {
        for j in 0..m {
            g[i * m + j] = dot(&edges[i], &edges[j]);
        }
        rhs[i] = g[i * m + i] / 2.0;
    }
    let lambda = cholesky_solve(&g, &rhs, m)?;
    let mut center = base.to_vec();
    for (l, e) in lambda.iter().zip(&edges) {
        for (c, x) in center.iter_mut().zip(e) {
            *c += l * x;
        }
    }
    let r = pts.iter().map(|p| dist(p, &center)).fold(0.0, f64::max);
    Some((center, r))
}

fn triangle_radius(a: &[f64], b: &[f64], c: &[f64]) -> f64 {
    let ab = dist_sq(a, b);
    let bc = dist_sq(b, c);
    let ca = dist_sq(c, a);
    let longest = ab.max(bc).max(ca);
    // Right or obtuse: the longest side is a diameter.
    if 2.0 * longest >= ab + bc + ca {
        return longest.sqrt() / 2.0;
    }
    // Acute: circumradius = |ab||bc||ca| / (4 area), with
    // 16 area^2 = 4 |u|^2 |v|^2 - 4 (u.v)^2 for u = b - a, v = c - a.
    let uv: f64 = a
        .iter()
        .zip(b)
        .zip(c)
        .map(|((x, y), z)| (y - x) * (z - x))
        .sum();
    let sixteen_area_sq = 4.0 * (ab * ca - uv * uv);
    if sixteen_area_sq <= 0.0 {
        return longest.sqrt() / 2.0;
    }
    (ab * bc * ca / sixteen_area_sq).sqrt()
}

/// Euclidean distance from `p` to the convex hull of `vertices`.
pub fn dist_to_simplex(p: &[f64], vertices: &[&[f64]]) -> f64 {
    match vertices.len() {
        0 => panic!("distance to an empty simplex"),
        1 => dist(p, vertices[0]),
        2 => dist_to_segment(p, vertices[0], vertices[1]),
        3 => dist_sq_to_triangle(p, vertices[0], vertices[1], vertices[2]).sqrt(),
        _ => dist(p, &closest_point_on_simplex(p, vertices)),
    }
}

/// Nearest point of `conv(vertices)` to `p`.
///
/// Up to four vertices every face is tried (the minimiser is the affine
/// projection onto the face containing it in its relative interior); larger
/// simplices go through Wolfe's active-set minimum-norm-point iteration.
pub fn closest_point_on_simplex(p: &[f64], vertices: &[&[f64]]) -> Vec<f64> {
    let k = vertices.len();
    assert!(k >= 1, "empty simplex");
    if k <= 4 {
        closest_by_faces(p, vertices)
    } else {
        closest_by_wolfe(p, vertices)
    }
}

#[inline]
pub(crate) fn dist_to_segment(p: &[f64], a: &[f64], b: &[f64]) -> f64 {
    let mut ab2 = 0.0;
    let mut apab = 0.0;
    for i in 0..p.len() {
        let e = b[i] - a[i];
        ab2 += e * e;
        apab += (p[i] - a[i]) * e;
    }
    let t = if ab2 > 0.0 { (apab / ab2).clamp(0.0, 1.0) } else { 0.0 };
    let mut s = 0.0;
    for i in 0..p.len() {
        let q = a[i] + t * (b[i] - a[i]);
        s += (p[i] - q) * (p[i] - q);
    }
    s.sqrt()
}

/// Squared distance from `p` to triangle `abc` in any ambient dimension, by
/// Voronoi-region classification of the nearest point.
pub(crate) fn dist_sq_to_triangle(p: &[f64], a: &[f64], b: &[f64], c: &[f64]) -> f64 {
    let mut d1 = 0.0; // ab.ap
    let mut d2 = 0.0; // ac.ap
    let mut d3 = 0.0; // ab.bp
    let mut d4 = 0.0; // ac.bp
    let mut d5 = 0.0; // ab.cp
    let mut d6 = 0.0; // ac.cp
    for i in 0..p.len() {
        let ab = b[i] - a[i];
        let ac = c[i] - a[i];
        let ap = p[i] - a[i];
        let bp = p[i] - b[i];
        let cp = p[i] - c[i];
        d1 += ab * ap;
        d2 += ac * ap;
        d3 += ab * bp;
        d4 += ac * bp;
        d5 += ab * cp;
        d6 += ac * cp;
    }
    // Barycentric weights (u, v, w) of the nearest point on a, b, c.
    let (v, w) = if d1 <= 0.0 && d2 <= 0.0 {
        (0.0, 0.0)
    } else if d3 >= 0.0 && d4 <= d3 {
        (1.0, 0.0)
    } else if d6 >= 0.0 && d5 <= d6 {
        (0.0, 1.0)
    } else {
        let vc = d1 * d4 - d3 * d2;
        let vb = d5 * d2 - d1 * d6;
        let va = d3 * d6 - d5 * d4;
        if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
            (d1 / (d1 - d3), 0.0)
        } else if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
            (0.0, d2 / (d2 - d6))
        } else if va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0 {
            let t = (d4 - d3) / ((d4 - d3) + (d5 - d6));
            (1.0 - t, t)
        } else {
            let denom = va + vb + vc;
            if !(denom > 0.0) {
                // Degenerate triangle: fall back to its three edges.
                let e = dist_to_segment(p, a, b)
                    .min(dist_to_segment(p, b, c))
                    .min(dist_to_segment(p, a, c));
                return e * e;
            }
            (vb / denom, vc / denom)
        }
    };
    let mut s = 0.0;
    for i in 0..p.len() {
        let q = a[i] + v * (b[i] - a[i]) + w * (c[i] - a[i]);
        s += (p[i] - q) * (p[i] - q);
    }
    s
}

fn closest_by_faces(p: &[f64], vertices: &[&[f64]]) -> Vec<f64> {
    let k = vertices.len();
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut consider = |q: Vec<f64>| {
        let d = dist_sq(p, &q);
        if best.as_ref().map_or(true, |(b, _)| d < *b) {
            best = Some((d, q));
        }
    };
    for mask in 1u32..(1 << k) {
        let face: Vec<&[f64]> = (0..k)
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| vertices[i])
            .collect();
        if face.len() == 1 {
            consider(face[0].to_vec());
            continue;
        }
        if let Some(q) = affine_projection_inside(p, &face) {
            consider(q);
        }
    }
    best.expect("vertices are always candidates").1
}

/// Projection of `p` on the affine hull of `face`, if its barycentric
/// coordinates are all nonnegative.
fn affine_projection_inside(p: &[f64], face: &[&[f64]]) -> Option<Vec<f64>> {
    let base = face[0];
    let m = face.len() - 1;
    let edges: Vec<Vec<f64>> = face[1..]
        .iter()
        .map(|v| v.iter().zip(base).map(|(a, b)| a - b).collect())
        .collect();
    let rel: Vec<f64> = p.iter().zip(base).map(|(a, b)| a - b).collect();
    let mut g = vec![0.0; m * m];
    let mut rhs = vec![0.0; m];
    for i in 0..m {
        for j in 0..m {
            g[i * m + j] = dot(&edges[i], &edges[j]);
        }
        rhs[i] = dot(&edges[i], &rel);
    }
    let lambda = cholesky_solve(&g, &rhs, m)?;
    let first = 1.0 - lambda.iter().sum::<f64>();
    if first < -BARY_TOL || lambda.iter().any(|&l| l < -BARY_TOL) {
        return None;
    }
    let mut q = base.to_vec();
    for (l, e) in lambda.iter().zip(&edges) {
        for (qi, ei) in q.iter_mut().zip(e) {
            *qi += l * ei;
        }
    }
    Some(q)
}

fn closest_by_wolfe(p: &[f64], vertices: &[&[f64]]) -> Vec<f64> {
    let shifted: Vec<Vec<f64>> = vertices
        .iter()
        .map(|v| v.iter().zip(p).map(|(a, b)| a - b).collect())
        .collect();
    let x = min_norm_point(&shifted);
    x.iter().zip(p).map(|(a, b)| a + b).collect()
}

/// Wolfe's algorithm for the minimum-norm point of `conv(pts)`.
fn min_norm_point(pts: &[Vec<f64>]) -> Vec<f64> {
    let amb = pts[0].len();
    let scale = pts.iter().map(|v| norm_sq(v)).fold(0.0, f64::max).max(1e-300);
    let tol = 1e-14 * scale;

    let start = (0..pts.len())
        .min_by(|&a, &b| norm_sq(&pts[a]).total_cmp(&norm_sq(&pts[b])))
        .unwrap();
    let mut active = vec![start];
    let mut weights = vec![1.0];
    let mut x = pts[start].clone();

    let combine = |active: &[usize], w: &[f64]| {
        let mut out = vec![0.0; amb];
        for (&i, &wi) in active.iter().zip(w) {
            for (o, v) in out.iter_mut().zip(&pts[i]) {
                *o += wi * v;
            }
        }
        out
    };

    for _major in 0..(100 * pts.len()) {
        let (j, best) = (0..pts.len())
            .map(|i| (i, dot(&pts[i], &x)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        if norm_sq(&x) - best <= tol || active.contains(&j) {
            break;
        }
        active.push(j);
        weights.push(0.0);
        loop {
            let Some(alpha) = affine_min_norm(pts, &active) else {
                // Affinely dependent active set: drop the newest point.
                active.pop();
                weights.pop();
                return combine(&active, &weights);
            };
            if alpha.iter().all(|&a| a > 1e-14) {
                weights = alpha;
                x = combine(&active, &weights);
                break;
            }
            let mut theta = 1.0_f64;
            for (w, a) in weights.iter().zip(&alpha) {
                if *a <= 1e-14 {
                    let denom = w - a;
                    if denom > 0.0 {
                        theta = theta.min(w / denom);
                    }
                }
            }
            for (w, a) in weights.iter_mut().zip(&alpha) {
                *w = theta * a + (1.0 - theta) * *w;
            }
            let mut keep = 0;
            for i in 0..active.len() {
                if weights[i] > 1e-14 {
                    active[keep] = active[i];
                    weights[keep] = weights[i];
                    keep += 1;
                }
            }
            active.truncate(keep);
            weights.truncate(keep);
            let total: f64 = weights.iter().sum();
            weights.iter_mut().for_each(|w| *w /= total);
        }
    }
    x
}

/// Affine coefficients (summing to one) of the min-norm point of the affine
/// hull of the active points.
fn affine_min_norm(pts: &[Vec<f64>], active: &[usize]) -> Option<Vec<f64>> {
    let m = active.len();
    let mut a = DMatrix::zeros(m + 1, m + 1);
    for i in 0..m {
        for j in 0..m {
            a[(i, j)] = dot(&pts[active[i]], &pts[active[j]]);
        }
        a[(i, m)] = 1.0;
        a[(m, i)] = 1.0;
    }
    let mut b = DVector::zeros(m + 1);
    b[m] = 1.0;
    let sol = a.lu().solve(&b)?;
    let alpha: Vec<f64> = sol.iter().take(m).copied().collect();
    alpha.iter().all(|v| v.is_finite()).then_some(alpha)
}
