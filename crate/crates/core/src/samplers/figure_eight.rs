//! The lemniscate of Gerono `t -> (cos t, sin t cos t)`, a closed curve
//! crossing itself transversally at the origin (`t = pi/2` and `3 pi/2`).

use std::f64::consts::PI;

/// Largest curvature of the unit-scale curve (reached near `t = 2.47076`).
pub const MAX_CURVATURE: f64 = 4.790289406197934;
/// Length of the unit-scale curve.
pub const LENGTH: f64 = 6.097223470104915;
/// Largest speed `|gamma'(t)|`, reached at `t = pi/2`.
pub const MAX_SPEED: f64 = std::f64::consts::SQRT_2;

const GRID: usize = 1024;

#[inline]
pub fn point(t: f64) -> [f64; 2] {
    let (s, c) = t.sin_cos();
    [c, s * c]
}

#[inline]
pub fn velocity(t: f64) -> [f64; 2] {
    [-t.sin(), (2.0 * t).cos()]
}

#[inline]
pub fn speed(t: f64) -> f64 {
    let [a, b] = velocity(t);
    (a * a + b * b).sqrt()
}

pub fn curvature(t: f64) -> f64 {
    let [x1, y1] = velocity(t);
    let (x2, y2) = (-t.cos(), -2.0 * (2.0 * t).sin());
    (x1 * y2 - y1 * x2).abs() / (x1 * x1 + y1 * y1).powf(1.5)
}

/// Unit tangent at parameter `t`.
pub fn unit_tangent(t: f64) -> [f64; 2] {
    let [a, b] = velocity(t);
    let s = (a * a + b * b).sqrt();
    [a / s, b / s]
}

fn dist_sq(q: [f64; 2], t: f64) -> f64 {
    let [x, y] = point(t);
    (x - q[0]) * (x - q[0]) + (y - q[1]) * (y - q[1])
}

/// Parameter of the nearest curve point to `q`.
///
/// A uniform grid brackets every local minimum of the squared distance;
/// each bracket is refined by golden-section search to `1e-13` in `t`, and
/// the best refined value wins.
pub fn nearest_parameter(q: [f64; 2]) -> f64 {
    let step = 2.0 * PI / GRID as f64;
    let vals: Vec<f64> = (0..GRID).map(|i| dist_sq(q, i as f64 * step)).collect();
    let mut best = (f64::INFINITY, 0.0);
    for i in 0..GRID {
        let prev = vals[(i + GRID - 1) % GRID];
        let next = vals[(i + 1) % GRID];
        if vals[i] <= prev && vals[i] <= next {
            let t0 = (i as f64 - 1.0) * step;
            let t = golden(|t| dist_sq(q, t), t0, t0 + 2.0 * step);
            let v = dist_sq(q, t);
            if v < best.0 {
                best = (v, t);
            }
        }
    }
    best.1.rem_euclid(2.0 * PI)
}

fn golden(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > 1e-13 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    (a + b) / 2.0
}
