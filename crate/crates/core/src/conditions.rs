//! Normalized (dimensionless) residuals of the elementary quadrilateral conditions.
//!
//! Each function takes four points in order P0 P1 P2 P3 with sides
//! a = |P0P1|, b = |P1P2|, c = |P2P3|, d = |P3P0| and diagonals p = |P0P2|, q = |P1P3|.
//! A residual of polynomial degree k is divided by scale^k, so the result is
//! compared directly against the relative tolerance.

use crate::geom::{circumcircle, max_pairwise_distance, midpoint, parallel_residual, Point};

#[derive(Debug, Clone, Copy)]
pub struct Metrics {
    pub sides: [f64; 4],
    pub diagonals: [f64; 2],
    pub scale: f64,
}

pub fn metrics(p: &[Point; 4]) -> Metrics {
    Metrics {
        sides: [p[0].dist(p[1]), p[1].dist(p[2]), p[2].dist(p[3]), p[3].dist(p[0])],
        diagonals: [p[0].dist(p[2]), p[1].dist(p[3])],
        scale: max_pairwise_distance(p),
    }
}

pub fn parallelogram(p: &[Point; 4]) -> f64 {
    let m = metrics(p);
    midpoint(p[0], p[2]).dist(midpoint(p[1], p[3])) / m.scale
}

pub fn equal_sides(p: &[Point; 4]) -> f64 {
    let [a, b, c, d] = metrics(p).sides;
    let s = metrics(p).scale;
    (a - b).abs().max((b - c).abs()).max((c - d).abs()).max((d - a).abs()) / s
}

pub fn kite(p: &[Point; 4]) -> f64 {
    let m = metrics(p);
    let [a, b, c, d] = m.sides;
    (a - b).abs().max((c - d).abs()).min((b - c).abs().max((d - a).abs())) / m.scale
}

pub fn equidiagonal(p: &[Point; 4]) -> f64 {
    let m = metrics(p);
    (m.diagonals[0] - m.diagonals[1]).abs() / m.scale
}

pub fn orthodiagonal(p: &[Point; 4]) -> f64 {
    let m = metrics(p);
    let [a, b, c, d] = m.sides;
    (a * a + c * c - b * b - d * d).abs() / (m.scale * m.scale)
}

/// Pitot condition a + c = b + d.
pub fn pitot(p: &[Point; 4]) -> f64 {
    let m = metrics(p);
    let [a, b, c, d] = m.sides;
    (a + c - b - d).abs() / m.scale
}

pub fn extangential(p: &[Point; 4]) -> f64 {
    let m = metrics(p);
    let [a, b, c, d] = m.sides;
    (a + b - c - d).abs().min((a + d - b - c).abs()) / m.scale
}

pub fn equal_prod_opp(p: &[Point; 4]) -> f64 {
    let m = metrics(p);
    let [a, b, c, d] = m.sides;
    (a * c - b * d).abs() / (m.scale * m.scale)
}

pub fn equal_prod_adj(p: &[Point; 4]) -> f64 {
    let m = metrics(p);
    let [a, b, c, d] = m.sides;
    (a * b - c * d).abs().min((a * d - b * c).abs()) / (m.scale * m.scale)
}

pub fn pythagorean(p: &[Point; 4]) -> f64 {
    let m = metrics(p);
    let [a, b, c, d] = m.sides;
    let (a, b, c, d) = (a * a, b * b, c * c, d * d);
    (a + b - c - d).abs().min((a + d - b - c).abs()) / (m.scale * m.scale)
}

/// Sides in arithmetic progression, starting at any vertex.
pub fn ap_quad(p: &[Point; 4]) -> f64 {
    let m = metrics(p);
    let s = m.sides;
    (0..4)
        .map(|k| {
            let x = |i: usize| s[(k + i) % 4];
            (x(2) - 2.0 * x(1) + x(0)).abs().max((x(3) - 2.0 * x(2) + x(1)).abs())
        })
        .fold(f64::INFINITY, f64::min)
        / m.scale
}

/// |sin| between P0P1 and P2P3, and between P1P2 and P3P0.
pub fn opposite_parallel(p: &[Point; 4]) -> [f64; 2] {
    [parallel_residual(p[1] - p[0], p[3] - p[2]), parallel_residual(p[2] - p[1], p[0] - p[3])]
}

/// At least one pair of opposite sides parallel.
pub fn some_parallel_pair(p: &[Point; 4]) -> f64 {
    let [x, y] = opposite_parallel(p);
    x.min(y)
}

fn cos_at(p: &[Point; 4], i: usize) -> f64 {
    let u = p[(i + 3) % 4] - p[i];
    let v = p[(i + 1) % 4] - p[i];
    u.dot(v) / (u.norm() * v.norm())
}

/// Two opposite right angles.
pub fn hjelmslev(p: &[Point; 4]) -> f64 {
    let c: Vec<f64> = (0..4).map(|i| cos_at(p, i).abs()).collect();
    c[0].max(c[2]).min(c[1].max(c[3]))
}

/// Smallest distance of a point from the circle through the other three.
pub fn cyclic(p: &[Point; 4]) -> f64 {
    let scale = max_pairwise_distance(p);
    (0..4)
        .filter_map(|skip| {
            let t: Vec<Point> = (0..4).filter(|&i| i != skip).map(|i| p[i]).collect();
            circumcircle(t[0], t[1], t[2], 0.0).ok().map(|c| c.residual(p[skip]).abs() / scale)
        })
        .fold(f64::INFINITY, f64::min)
}
