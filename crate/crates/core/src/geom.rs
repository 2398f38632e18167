//! Plane-geometry primitives and tolerance-aware predicates.

use std::ops::{Add, Div, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeomError {
    #[error("lines are parallel")]
    ParallelLines,
    #[error("points are collinear")]
    Collinear,
    #[error("circles do not meet")]
    Disjoint,
    #[error("point sets are not homothetic (residual {residual:e})")]
    NotHomothetic { residual: f64 },
    #[error("degenerate input")]
    Degenerate,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn dot(self, o: Point) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the 2D cross product.
    pub fn cross(self, o: Point) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn norm2(self) -> f64 {
        self.dot(self)
    }

    pub fn dist(self, o: Point) -> f64 {
        (self - o).norm()
    }

    /// Counterclockwise quarter turn.
    pub fn perp(self) -> Point {
        Point::new(-self.y, self.x)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn lerp(self, o: Point, t: f64) -> Point {
        self + (o - self) * t
    }

    pub fn rotate(self, angle: f64) -> Point {
        let (s, c) = angle.sin_cos();
        Point::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, k: f64) -> Point {
        Point::new(self.x * k, self.y * k)
    }
}

impl Div<f64> for Point {
    type Output = Point;
    fn div(self, k: f64) -> Point {
        Point::new(self.x / k, self.y / k)
    }
}

impl Neg for Point {
    type Output = Point;
    fn neg(self) -> Point {
        Point::new(-self.x, -self.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Circle {
    pub center: Point,
    pub radius: f64,
}

impl Circle {
    /// Signed distance of `p` from the circle (positive outside).
    pub fn residual(&self, p: Point) -> f64 {
        p.dist(self.center) - self.radius
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Triangle {
    pub a: Point,
    pub b: Point,
    pub c: Point,
}

impl Triangle {
    pub const fn new(a: Point, b: Point, c: Point) -> Self {
        Triangle { a, b, c }
    }

    /// Side lengths (|BC|, |CA|, |AB|).
    pub fn sides(&self) -> (f64, f64, f64) {
        (self.b.dist(self.c), self.c.dist(self.a), self.a.dist(self.b))
    }

    pub fn signed_area(&self) -> f64 {
        signed_area(self.a, self.b, self.c)
    }

    pub fn scale(&self) -> f64 {
        max_pairwise_distance(&[self.a, self.b, self.c])
    }

    pub fn is_degenerate(&self, rel: f64) -> bool {
        let s = self.scale();
        s == 0.0 || self.signed_area().abs() <= rel * s * s
    }

    pub fn centroid(&self) -> Point {
        (self.a + self.b + self.c) / 3.0
    }

    /// Cartesian point of the barycentric weights (u:v:w); `None` when the weights sum to zero.
    pub fn from_barycentric(&self, u: f64, v: f64, w: f64) -> Option<Point> {
        let s = u + v + w;
        if s == 0.0 {
            return None;
        }
        Some((self.a * u + self.b * v + self.c * w) / s)
    }
}

/// Degree-aware tolerance: a residual of degree `k` passes when `|r| <= rel * scale^k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub rel: f64,
    pub scale: f64,
}

pub const DEFAULT_REL: f64 = 1e-9;

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance { rel: DEFAULT_REL, scale: 1.0 }
    }
}

impl Tolerance {
    pub fn new(rel: f64, scale: f64) -> Self {
        Tolerance { rel, scale }
    }

    pub fn for_points(rel: f64, pts: &[Point]) -> Self {
        Tolerance { rel, scale: max_pairwise_distance(pts) }
    }

    pub fn bound(&self, degree: i32) -> f64 {
        self.rel * self.scale.powi(degree)
    }

    pub fn within(&self, residual: f64, degree: i32) -> bool {
        residual.abs() <= self.bound(degree)
    }
}

pub fn max_pairwise_distance(pts: &[Point]) -> f64 {
    let mut m = 0.0f64;
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            m = m.max(pts[i].dist(pts[j]));
        }
    }
    m
}

pub fn signed_area(p: Point, q: Point, r: Point) -> f64 {
    (q - p).cross(r - p) / 2.0
}

pub fn midpoint(p: Point, q: Point) -> Point {
    (p + q) * 0.5
}

pub fn centroid(pts: &[Point]) -> Point {
    let mut s = Point::default();
    for p in pts {
        s = s + *p;
    }
    s / pts.len() as f64
}

/// Intersection of lines P1P2 and Q1Q2.
pub fn line_intersection(p1: Point, p2: Point, q1: Point, q2: Point, rel: f64) -> Result<Point, GeomError> {
    let d1 = p2 - p1;
    let d2 = q2 - q1;
    let den = d1.cross(d2);
    let scale = max_pairwise_distance(&[p1, p2, q1, q2]);
    if den.abs() <= rel * scale * scale {
        return Err(GeomError::ParallelLines);
    }
    let t = (q1 - p1).cross(d2) / den;
    Ok(p1 + d1 * t)
}

pub fn circumcircle(p: Point, q: Point, r: Point, rel: f64) -> Result<Circle, GeomError> {
    let scale = max_pairwise_distance(&[p, q, r]);
    let b = q - p;
    let c = r - p;
    let d = 2.0 * b.cross(c);
    if scale == 0.0 || d.abs() <= 2.0 * rel * scale * scale {
        return Err(GeomError::Collinear);
    }
    let ux = (c.y * b.norm2() - b.y * c.norm2()) / d;
    let uy = (b.x * c.norm2() - c.x * b.norm2()) / d;
    let off = Point::new(ux, uy);
    Ok(Circle { center: p + off, radius: off.norm() })
}

/// Both intersection points of two circles; equal when tangent.
pub fn circle_intersection(c1: &Circle, c2: &Circle, rel: f64) -> Result<(Point, Point), GeomError> {
    let d = c1.center.dist(c2.center);
    let scale = d.max(c1.radius).max(c2.radius);
    let slack = rel * scale;
    if d <= slack {
        // concentric: either identical (no isolated points) or disjoint
        return Err(GeomError::Disjoint);
    }
    if d > c1.radius + c2.radius + slack || d < (c1.radius - c2.radius).abs() - slack {
        return Err(GeomError::Disjoint);
    }
    let a = (d * d + c1.radius * c1.radius - c2.radius * c2.radius) / (2.0 * d);
    let h = (c1.radius * c1.radius - a * a).max(0.0).sqrt();
    let u = (c2.center - c1.center) / d;
    let base = c1.center + u * a;
    let off = u.perp() * h;
    Ok((base + off, base - off))
}

/// Fit `dst_i = P + k (src_i - P)`.
pub fn detect_homothety(src: &[Point; 4], dst: &[Point; 4], rel: f64) -> Result<(Point, f64), GeomError> {
    let scale = max_pairwise_distance(src).max(max_pairwise_distance(dst));
    if max_pairwise_distance(src) == 0.0 {
        return Err(GeomError::Degenerate);
    }
    let cs = centroid(src);
    let cd = centroid(dst);
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..4 {
        let s = src[i] - cs;
        num += s.dot(dst[i] - cd);
        den += s.norm2();
    }
    let k = num / den;
    let mut residual = 0.0f64;
    for i in 0..4 {
        let pred = cd + (src[i] - cs) * k;
        residual = residual.max(pred.dist(dst[i]));
    }
    if residual > rel * scale || k.abs() <= rel {
        return Err(GeomError::NotHomothetic { residual });
    }
    if (k - 1.0).abs() <= rel {
        let shift = cd.dist(cs);
        if shift <= rel * scale {
            return Ok((cs, 1.0));
        }
        return Err(GeomError::NotHomothetic { residual: shift });
    }
    // cd = P + k (cs - P)
    let p = (cd - cs * k) / (1.0 - k);
    Ok((p, k))
}

/// Point on the perpendicular bisector of PQ and its direction.
pub fn perpendicular_bisector(p: Point, q: Point) -> (Point, Point) {
    (midpoint(p, q), (q - p).perp())
}

pub fn reflect_about_line(x: Point, l1: Point, l2: Point) -> Point {
    let d = l2 - l1;
    let t = (x - l1).dot(d) / d.norm2();
    let foot = l1 + d * t;
    foot * 2.0 - x
}

/// Distance from `x` to the line through `l1`, `l2`.
pub fn distance_to_line(x: Point, l1: Point, l2: Point) -> f64 {
    let d = l2 - l1;
    (x - l1).cross(d).abs() / d.norm()
}

/// |sin| of the angle between directions `u` and `v`; 0 for parallel.
pub fn parallel_residual(u: Point, v: Point) -> f64 {
    let n = u.norm() * v.norm();
    if n == 0.0 {
        return 0.0;
    }
    (u.cross(v) / n).abs()
}

/// |cos| of the angle between directions `u` and `v`; 0 for perpendicular.
pub fn perpendicular_residual(u: Point, v: Point) -> f64 {
    let n = u.norm() * v.norm();
    if n == 0.0 {
        return 0.0;
    }
    (u.dot(v) / n).abs()
}

pub fn are_parallel(u: Point, v: Point, rel: f64) -> bool {
    parallel_residual(u, v) <= rel
}

pub fn are_perpendicular(u: Point, v: Point, rel: f64) -> bool {
    perpendicular_residual(u, v) <= rel
}

pub fn point_on_circle(p: Point, c: &Circle, tol: &Tolerance) -> bool {
    tol.within(c.residual(p), 1)
}

/// Strict convexity of a closed polygon with a consistent turn direction.
pub fn is_convex(pts: &[Point], rel: f64) -> bool {
    let n = pts.len();
    let scale = max_pairwise_distance(pts);
    let mut sign = 0.0;
    for i in 0..n {
        let a = signed_area(pts[i], pts[(i + 1) % n], pts[(i + 2) % n]);
        if a.abs() <= rel * scale * scale {
            return false;
        }
        if sign == 0.0 {
            sign = a.signum();
        } else if a.signum() != sign {
            return false;
        }
    }
    // a star (pentagram-like) polygon turns consistently but winds twice
    let mut total = 0.0;
    for i in 0..n {
        let u = pts[(i + 1) % n] - pts[i];
        let v = pts[(i + 2) % n] - pts[(i + 1) % n];
        total += u.cross(v).atan2(u.dot(v));
    }
    (total.abs() - 2.0 * std::f64::consts::PI).abs() < 1e-6
}

/// Whether `p` lies strictly inside the convex polygon `pts` (either orientation).
pub fn inside_convex(p: Point, pts: &[Point]) -> bool {
    let n = pts.len();
    let mut sign = 0.0;
    for i in 0..n {
        let a = signed_area(pts[i], pts[(i + 1) % n], p);
        if a == 0.0 {
            return false;
        }
        if sign == 0.0 {
            sign = a.signum();
        } else if a.signum() != sign {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    const R: f64 = 1e-9;

    fn p(x: f64, y: f64) -> Point {
        Point::new(x, y)
    }

    #[test]
    fn signed_area_orientation() {
        assert_eq!(signed_area(p(0., 0.), p(1., 0.), p(0., 1.)), 0.5);
        assert_eq!(signed_area(p(0., 0.), p(1., 0.), p(2., 0.)), 0.0);
        assert_eq!(signed_area(p(0., 0.), p(0., 1.), p(1., 0.)), -0.5);
    }

    #[test]
    fn line_intersection_cases() {
        let x = line_intersection(p(0., 0.), p(1., 1.), p(0., 1.), p(1., 0.), R).unwrap();
        assert!(x.dist(p(0.5, 0.5)) < 1e-15);
        assert_eq!(
            line_intersection(p(0., 0.), p(1., 0.), p(0., 1.), p(1., 1.), R),
            Err(GeomError::ParallelLines)
        );
        let x = line_intersection(p(0., 0.), p(2., 2.), p(2., 0.), p(0., 2.), R).unwrap();
        assert!(x.dist(p(1., 1.)) < 1e-15);
    }

    #[test]
    fn circumcircle_cases() {
        let c = circumcircle(p(0., 0.), p(1., 0.), p(0., 1.), R).unwrap();
        assert!(c.center.dist(p(0.5, 0.5)) < 1e-15);
        assert!((c.radius - 2f64.sqrt() / 2.0).abs() < 1e-15);
        let c = circumcircle(p(1., 0.), p(0., 1.), p(-1., 0.), R).unwrap();
        assert!(c.center.norm() < 1e-15 && (c.radius - 1.0).abs() < 1e-15);
        assert_eq!(circumcircle(p(0., 0.), p(1., 0.), p(2., 0.), R), Err(GeomError::Collinear));
    }

    #[test]
    fn circle_intersection_cases() {
        let u = |x| Circle { center: p(x, 0.), radius: 1.0 };
        let (a, b) = circle_intersection(&u(0.), &u(1.), R).unwrap();
        let h = 3f64.sqrt() / 2.0;
        assert!(a.dist(p(0.5, h)) < 1e-15 && b.dist(p(0.5, -h)) < 1e-15);
        let (a, b) = circle_intersection(&u(0.), &u(2.), R).unwrap();
        assert!(a.dist(p(1., 0.)) < 1e-15 && b.dist(p(1., 0.)) < 1e-15);
        assert_eq!(circle_intersection(&u(0.), &u(3.), R), Err(GeomError::Disjoint));
    }

    #[test]
    fn homothety_cases() {
        let sq = [p(0., 0.), p(1., 0.), p(1., 1.), p(0., 1.)];
        let big = sq.map(|q| q * 2.0);
        let (c, k) = detect_homothety(&sq, &big, R).unwrap();
        assert!(c.norm() < 1e-12 && (k - 2.0).abs() < 1e-12);
        let rot = sq.map(|q| q.rotate(std::f64::consts::FRAC_PI_4));
        assert!(matches!(detect_homothety(&sq, &rot, R), Err(GeomError::NotHomothetic { .. })));
        let shifted = sq.map(|q| q + p(0.5, 0.0));
        assert!(matches!(detect_homothety(&sq, &shifted, R), Err(GeomError::NotHomothetic { .. })));
        let (_, k) = detect_homothety(&sq, &sq, R).unwrap();
        assert_eq!(k, 1.0);
    }

    #[test]
    fn reflection_and_distances() {
        let r = reflect_about_line(p(1., 1.), p(0., 0.), p(1., 0.));
        assert!(r.dist(p(1., -1.)) < 1e-15);
        assert!((distance_to_line(p(0., 2.), p(-1., 0.), p(1., 0.)) - 2.0).abs() < 1e-15);
        assert!(are_parallel(p(1., 1.), p(-2., -2.), R));
        assert!(are_perpendicular(p(1., 1.), p(-1., 1.), R));
    }

    #[test]
    fn convexity() {
        let sq = [p(0., 0.), p(1., 0.), p(1., 1.), p(0., 1.)];
        assert!(is_convex(&sq, R));
        let crossed = [p(0., 0.), p(1., 1.), p(1., 0.), p(0., 1.)];
        assert!(!is_convex(&crossed, R));
        assert!(inside_convex(p(0.5, 0.5), &sq));
        assert!(!inside_convex(p(1.5, 0.5), &sq));
    }
}
