//! The 29 quadrilateral types: residuals, the specialization graph and random generators.

use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::conditions as cond;
use crate::geom::{circumcircle, inside_convex, is_convex, max_pairwise_distance, signed_area, Point, DEFAULT_REL};

/// Deterministic generator used for every random draw.
pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub const MAX_ATTEMPTS: usize = 1000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuadError {
    #[error("generation of {0} failed after {MAX_ATTEMPTS} attempts")]
    GenerationFailed(QuadType),
    #[error("unknown quadrilateral type '{0}'")]
    UnknownType(String),
}

macro_rules! quad_types {
    ($($v:ident => $s:literal),* $(,)?) => {
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        pub enum QuadType { $($v),* }

        impl QuadType {
            pub const ALL: [QuadType; 29] = [$(QuadType::$v),*];

            pub fn name(self) -> &'static str {
                match self { $(QuadType::$v => $s),* }
            }
        }
    };
}

quad_types! {
    General => "general",
    Cyclic => "cyclic",
    Tangential => "tangential",
    Extangential => "extangential",
    Parallelogram => "parallelogram",
    EqualProdOpp => "equalProdOpp",
    EqualProdAdj => "equalProdAdj",
    Orthodiagonal => "orthodiagonal",
    Equidiagonal => "equidiagonal",
    Pythagorean => "Pythagorean",
    Kite => "kite",
    Trapezoid => "trapezoid",
    Rhombus => "rhombus",
    Rectangle => "rectangle",
    Hjelmslev => "Hjelmslev",
    IsoscelesTrapezoid => "isoscelesTrapezoid",
    ApQuad => "APquad",
    Bicentric => "bicentric",
    Exbicentric => "exbicentric",
    BicentricTrapezoid => "bicentricTrapezoid",
    CyclicOrthodiagonal => "cyclicOrthodiagonal",
    EquidiagonalKite => "equidiagonalKite",
    EquidiagonalOrthodiagonal => "equidiagonalOrthodiagonal",
    EquidiagonalOrthodiagonalTrapezoid => "equidiagonalOrthodiagonalTrapezoid",
    Harmonic => "harmonic",
    OrthodiagonalTrapezoid => "orthodiagonalTrapezoid",
    TangentialTrapezoid => "tangentialTrapezoid",
    Square => "square",
    RightKite => "rightKite",
}

impl fmt::Display for QuadType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for QuadType {
    type Err = QuadError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        QuadType::ALL
            .into_iter()
            .find(|t| t.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| QuadError::UnknownType(s.to_string()))
    }
}

use QuadType::*;

impl QuadType {
    /// Direct specializations edges (child to parent).
    pub fn parents(self) -> &'static [QuadType] {
        match self {
            General => &[],
            Cyclic | Tangential | Extangential | EqualProdOpp | EqualProdAdj | Orthodiagonal | Equidiagonal
            | Pythagorean | Trapezoid => &[General],
            ApQuad => &[Extangential],
            Hjelmslev => &[Cyclic, Pythagorean],
            Parallelogram => &[Trapezoid, Extangential, Pythagorean, EqualProdAdj],
            Kite => &[Orthodiagonal, Tangential, EqualProdOpp, Extangential, Pythagorean, EqualProdAdj],
            Rhombus => &[Kite, Parallelogram, ApQuad, OrthodiagonalTrapezoid, TangentialTrapezoid],
            IsoscelesTrapezoid => &[Trapezoid, Equidiagonal, Cyclic],
            Rectangle => &[Parallelogram, IsoscelesTrapezoid, Exbicentric, Hjelmslev],
            Bicentric => &[Cyclic, Tangential],
            Exbicentric => &[Cyclic, Extangential],
            Harmonic => &[Cyclic, EqualProdOpp],
            CyclicOrthodiagonal => &[Cyclic, Orthodiagonal],
            EquidiagonalOrthodiagonal => &[Equidiagonal, Orthodiagonal],
            OrthodiagonalTrapezoid => &[Orthodiagonal, Trapezoid],
            TangentialTrapezoid => &[Tangential, Trapezoid],
            BicentricTrapezoid => &[Bicentric, TangentialTrapezoid, IsoscelesTrapezoid],
            EquidiagonalKite => &[Kite, EquidiagonalOrthodiagonal],
            EquidiagonalOrthodiagonalTrapezoid => {
                &[EquidiagonalOrthodiagonal, OrthodiagonalTrapezoid, IsoscelesTrapezoid, CyclicOrthodiagonal]
            }
            RightKite => &[Kite, Hjelmslev, Harmonic, CyclicOrthodiagonal, Bicentric, Exbicentric],
            Square => &[Rhombus, Rectangle, EquidiagonalKite, RightKite, EquidiagonalOrthodiagonalTrapezoid, BicentricTrapezoid],
        }
    }

    /// Transitive closure of `parents`.
    pub fn ancestors(self) -> BTreeSet<QuadType> {
        let mut out = BTreeSet::new();
        let mut stack: Vec<QuadType> = self.parents().to_vec();
        while let Some(t) = stack.pop() {
            if out.insert(t) {
                stack.extend_from_slice(t.parents());
            }
        }
        out
    }

    pub fn is_cyclic_family(self) -> bool {
        self == Cyclic || self.ancestors().contains(&Cyclic)
    }

    /// Max of the normalized constraint residuals; 0 for exact members.
    pub fn residual(self, p: &[Point; 4]) -> f64 {
        let m = |xs: &[f64]| xs.iter().copied().fold(0.0, f64::max);
        match self {
            General => 0.0,
            Cyclic => cond::cyclic(p),
            Tangential => cond::pitot(p),
            Extangential => cond::extangential(p),
            Parallelogram => cond::parallelogram(p),
            EqualProdOpp => cond::equal_prod_opp(p),
            EqualProdAdj => cond::equal_prod_adj(p),
            Orthodiagonal => cond::orthodiagonal(p),
            Equidiagonal => cond::equidiagonal(p),
            Pythagorean => cond::pythagorean(p),
            Kite => cond::kite(p),
            Trapezoid => cond::some_parallel_pair(p),
            Rhombus => m(&[cond::equal_sides(p), cond::parallelogram(p)]),
            Rectangle => m(&[cond::parallelogram(p), cond::equidiagonal(p)]),
            Hjelmslev => cond::hjelmslev(p),
            IsoscelesTrapezoid => m(&[cond::some_parallel_pair(p), cond::equidiagonal(p), cond::cyclic(p)]),
            ApQuad => cond::ap_quad(p),
            Bicentric => m(&[cond::cyclic(p), cond::pitot(p)]),
            Exbicentric => m(&[cond::cyclic(p), cond::extangential(p)]),
            BicentricTrapezoid => m(&[cond::cyclic(p), cond::pitot(p), cond::some_parallel_pair(p)]),
            CyclicOrthodiagonal => m(&[cond::cyclic(p), cond::orthodiagonal(p)]),
            EquidiagonalKite => m(&[cond::kite(p), cond::equidiagonal(p)]),
            EquidiagonalOrthodiagonal => m(&[cond::equidiagonal(p), cond::orthodiagonal(p)]),
            EquidiagonalOrthodiagonalTrapezoid => {
                m(&[cond::equidiagonal(p), cond::orthodiagonal(p), cond::some_parallel_pair(p)])
            }
            Harmonic => m(&[cond::cyclic(p), cond::equal_prod_opp(p)]),
            OrthodiagonalTrapezoid => m(&[cond::orthodiagonal(p), cond::some_parallel_pair(p)]),
            TangentialTrapezoid => m(&[cond::pitot(p), cond::some_parallel_pair(p)]),
            Square => m(&[cond::equal_sides(p), cond::parallelogram(p), cond::equidiagonal(p)]),
            RightKite => m(&[cond::kite(p), cond::cyclic(p)]),
        }
    }
}

/// Convex counterclockwise quadrilateral ABCD.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quadrilateral {
    pub v: [Point; 4],
}

impl Quadrilateral {
    pub fn new(a: Point, b: Point, c: Point, d: Point) -> Self {
        Quadrilateral { v: [a, b, c, d] }
    }

    pub fn from_coords(c: &[f64; 8]) -> Self {
        Quadrilateral::new(
            Point::new(c[0], c[1]),
            Point::new(c[2], c[3]),
            Point::new(c[4], c[5]),
            Point::new(c[6], c[7]),
        )
    }

    /// (a, b, c, d) = (|AB|, |BC|, |CD|, |DA|).
    pub fn sides(&self) -> [f64; 4] {
        cond::metrics(&self.v).sides
    }

    /// (p, q) = (|AC|, |BD|).
    pub fn diagonals(&self) -> [f64; 2] {
        cond::metrics(&self.v).diagonals
    }

    /// Interior angles at A, B, C, D in radians.
    pub fn angles(&self) -> [f64; 4] {
        let mut out = [0.0; 4];
        for (i, o) in out.iter_mut().enumerate() {
            let u = self.v[(i + 3) % 4] - self.v[i];
            let w = self.v[(i + 1) % 4] - self.v[i];
            *o = u.cross(w).abs().atan2(u.dot(w));
        }
        out
    }

    pub fn scale(&self) -> f64 {
        max_pairwise_distance(&self.v)
    }

    pub fn is_convex(&self) -> bool {
        is_convex(&self.v, DEFAULT_REL)
    }

    pub fn is_ccw(&self) -> bool {
        (0..4).map(|i| signed_area(self.v[i], self.v[(i + 1) % 4], self.v[(i + 2) % 4])).all(|a| a > 0.0)
    }

    pub fn contains(&self, p: Point) -> bool {
        inside_convex(p, &self.v)
    }

    pub fn check_type(&self, t: QuadType) -> f64 {
        t.residual(&self.v)
    }

    pub fn map(&self, f: impl Fn(Point) -> Point) -> Self {
        Quadrilateral { v: self.v.map(f) }
    }
}

fn uni(rng: &mut SeededRng, lo: f64, hi: f64) -> f64 {
    rng.gen_range(lo..hi)
}

fn on_circle(t: f64) -> Point {
    Point::new(t.cos(), t.sin())
}

/// Vertices cut out by tangent lines to the unit circle at the given increasing angles.
/// Vertex k lies between tangents k-1 and k, so A sits between the last and first tangent.
fn tangent_polygon(t: [f64; 4]) -> Option<[Point; 4]> {
    let mut v = [Point::default(); 4];
    for k in 0..4 {
        let (lo, hi) = if k == 0 { (t[3], t[0] + 2.0 * PI) } else { (t[k - 1], t[k]) };
        let half = (hi - lo) / 2.0;
        if !(0.05..PI / 2.0 - 0.05).contains(&half) {
            return None;
        }
        v[k] = on_circle(lo + half) / half.cos();
    }
    Some(v)
}

/// Sign-change scan then bisection of `g` on [lo, hi].
fn root(g: impl Fn(f64) -> f64, lo: f64, hi: f64) -> Option<f64> {
    const STEPS: usize = 64;
    let mut prev = (lo, g(lo));
    for i in 1..=STEPS {
        let x = lo + (hi - lo) * i as f64 / STEPS as f64;
        let gx = g(x);
        if prev.1.is_finite() && gx.is_finite() && prev.1 * gx <= 0.0 {
            let (mut a, mut b, mut ga) = (prev.0, x, prev.1);
            for _ in 0..200 {
                let m = 0.5 * (a + b);
                let gm = g(m);
                if gm == 0.0 {
                    return Some(m);
                }
                if ga * gm < 0.0 {
                    b = m;
                } else {
                    a = m;
                    ga = gm;
                }
                if b - a <= f64::EPSILON * (a.abs() + b.abs()) {
                    break;
                }
            }
            return Some(0.5 * (a + b));
        }
        prev = (x, gx);
    }
    None
}

fn sides_of(v: &[Point; 4]) -> [f64; 4] {
    cond::metrics(v).sides
}

/// Random triangle A B C (counterclockwise) with D to be placed beyond AC.
fn base_triangle(rng: &mut SeededRng) -> (Point, Point, Point) {
    let a = Point::new(-0.5, 0.0);
    let c = Point::new(0.5, 0.0);
    let b = Point::new(uni(rng, -0.4, 0.4), uni(rng, -0.8, -0.25));
    (a, b, c)
}

/// D on a ray from the midpoint of AC away from B, tuned so that `g(sides) = 0`.
fn solve_fourth(rng: &mut SeededRng, g: impl Fn([f64; 4]) -> f64) -> Option<[Point; 4]> {
    let (a, b, c) = base_triangle(rng);
    let m = Point::new(uni(rng, -0.3, 0.3), 0.0);
    let dir = on_circle(uni(rng, 0.3, PI - 0.3));
    let make = |t: f64| [a, b, c, m + dir * t];
    let t = root(|t| g(sides_of(&make(t))), 0.02, 3.0)?;
    Some(make(t))
}

/// Cyclic A B C on the unit circle with the angle of D tuned so that `g(sides) = 0`.
fn solve_cyclic(rng: &mut SeededRng, g: impl Fn([f64; 4]) -> f64) -> Option<[Point; 4]> {
    let ta = uni(rng, 0.0, 2.0 * PI);
    let tb = ta + uni(rng, 0.4, 2.0);
    let tc = tb + uni(rng, 0.4, 2.0);
    let make = |t: f64| [on_circle(ta), on_circle(tb), on_circle(tc), on_circle(t)];
    let t = root(|t| g(sides_of(&make(t))), tc + 0.05, ta + 2.0 * PI - 0.05)?;
    Some(make(t))
}

fn construct(t: QuadType, rng: &mut SeededRng) -> Option<[Point; 4]> {
    let p = Point::new;
    Some(match t {
        General => {
            let mut pts: Vec<Point> = (0..4).map(|_| p(uni(rng, 0.0, 1.0), uni(rng, 0.0, 1.0))).collect();
            let c = crate::geom::centroid(&pts);
            pts.sort_by(|x, y| (*x - c).y.atan2((*x - c).x).total_cmp(&(*y - c).y.atan2((*y - c).x)));
            [pts[0], pts[1], pts[2], pts[3]]
        }
        Cyclic => {
            let mut ts: Vec<f64> = (0..4).map(|_| uni(rng, 0.0, 2.0 * PI)).collect();
            ts.sort_by(f64::total_cmp);
            [on_circle(ts[0]), on_circle(ts[1]), on_circle(ts[2]), on_circle(ts[3])]
        }
        Tangential => {
            let t0 = uni(rng, 0.0, 2.0 * PI);
            let mut acc = t0;
            let mut ts = [t0; 4];
            for x in ts.iter_mut().skip(1) {
                acc += uni(rng, 0.5, PI - 0.3);
                *x = acc;
            }
            tangent_polygon(ts)?
        }
        Extangential => solve_fourth(rng, |s| s[0] + s[1] - s[2] - s[3])?,
        EqualProdOpp => solve_fourth(rng, |s| s[0] * s[2] - s[1] * s[3])?,
        EqualProdAdj => solve_fourth(rng, |s| s[0] * s[1] - s[2] * s[3])?,
        Pythagorean => solve_fourth(rng, |s| s[0] * s[0] + s[1] * s[1] - s[2] * s[2] - s[3] * s[3])?,
        Parallelogram | Rhombus | Rectangle | Square => {
            let r1 = uni(rng, 0.5, 1.5);
            let r2 = if matches!(t, Rhombus | Square) { r1 } else { uni(rng, 0.5, 1.5) };
            let th = if matches!(t, Rectangle | Square) { PI / 2.0 } else { uni(rng, 0.3, PI - 0.3) };
            let u = p(r1, 0.0);
            let v = on_circle(th) * r2;
            [p(0.0, 0.0), u, u + v, v]
        }
        Orthodiagonal | Equidiagonal | EquidiagonalOrthodiagonal => {
            let th = if t == Equidiagonal { uni(rng, 0.4, PI - 0.4) } else { PI / 2.0 };
            let u = p(1.0, 0.0);
            let v = on_circle(th);
            if t == Orthodiagonal {
                let s: Vec<f64> = (0..4).map(|_| uni(rng, 0.3, 1.0)).collect();
                [u * -s[0], v * -s[1], u * s[2], v * s[3]]
            } else {
                let s = uni(rng, 0.2, 0.8);
                let r = uni(rng, 0.2, 0.8);
                [u * -s, v * -r, u * (1.0 - s), v * (1.0 - r)]
            }
        }
        Kite => {
            let (s, e) = (uni(rng, 0.3, 1.0), uni(rng, 0.3, 1.0));
            let x = uni(rng, -s + 0.1, e - 0.1);
            let h = uni(rng, 0.3, 1.0);
            [p(-s, 0.0), p(x, -h), p(e, 0.0), p(x, h)]
        }
        EquidiagonalKite => {
            let s = uni(rng, 0.15, 0.85);
            [p(-s, 0.0), p(0.0, -0.5), p(1.0 - s, 0.0), p(0.0, 0.5)]
        }
        Trapezoid => {
            let w = uni(rng, 0.5, 1.5);
            let h = uni(rng, 0.3, 1.0);
            let x1 = uni(rng, -0.5, 0.8);
            let x2 = x1 + uni(rng, 0.3, 1.2);
            [p(x1, h), p(0.0, 0.0), p(w, 0.0), p(x2, h)]
        }
        IsoscelesTrapezoid | BicentricTrapezoid | EquidiagonalOrthodiagonalTrapezoid => {
            let u = uni(rng, 0.3, 1.0);
            let v = uni(rng, 0.1, 1.0);
            let h = match t {
                IsoscelesTrapezoid => uni(rng, 0.3, 1.2),
                BicentricTrapezoid => 2.0 * (u * v).sqrt(),
                _ => u + v,
            };
            [p(-v, h), p(-u, 0.0), p(u, 0.0), p(v, h)]
        }
        OrthodiagonalTrapezoid => {
            let c1 = uni(rng, 0.5, 1.5);
            let a1 = uni(rng, -0.5, 0.4);
            let d1 = a1 + uni(rng, 0.3, 1.2);
            if d1 <= 0.0 || c1 <= a1 {
                return None;
            }
            let h = ((c1 - a1) * d1).sqrt();
            [p(a1, h), p(0.0, 0.0), p(c1, 0.0), p(d1, h)]
        }
        TangentialTrapezoid => {
            // BC tangent at the bottom, DA at the top
            let t1 = uni(rng, PI / 2.0 + 0.3, 1.5 * PI - 0.3);
            let t3 = 2.0 * PI + uni(rng, -PI / 2.0 + 0.3, PI / 2.0 - 0.3);
            tangent_polygon([t1, 1.5 * PI, t3, 2.5 * PI])?
        }
        Hjelmslev => {
            let b = uni(rng, PI + 0.2, 2.0 * PI - 0.2);
            let d = uni(rng, 0.2, PI - 0.2);
            [p(-1.0, 0.0), on_circle(b), p(1.0, 0.0), on_circle(d)]
        }
        RightKite => {
            let b = uni(rng, 0.3, PI - 0.3);
            [p(-1.0, 0.0), on_circle(-b), p(1.0, 0.0), on_circle(b)]
        }
        CyclicOrthodiagonal => {
            let c = on_circle(uni(rng, 0.0, 2.0 * PI)) * uni(rng, 0.0, 0.6);
            let u = on_circle(uni(rng, 0.0, 2.0 * PI));
            let v = u.perp();
            // chord through c along w: c + s w with |c + s w| = 1
            let ends = |w: Point| {
                let b = c.dot(w);
                let disc = (b * b - c.norm2() + 1.0).sqrt();
                (c + w * (-b - disc), c + w * (-b + disc))
            };
            let (a0, c0) = ends(u);
            let (b0, d0) = ends(v);
            [a0, b0, c0, d0]
        }
        ApQuad => {
            let a = uni(rng, 0.5, 1.0);
            let dl = uni(rng, 0.05, 0.3) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            let s = [a, a + dl, a + 2.0 * dl, a + 3.0 * dl];
            if s.iter().any(|x| *x <= 0.1) {
                return None;
            }
            let va = p(0.0, 0.0);
            let vb = p(s[0], 0.0);
            let vc = vb + on_circle(uni(rng, 0.4, PI - 0.4)) * s[1];
            // D with |CD| = s[2], |DA| = s[3], on the left of C->A
            let circ_c = crate::geom::Circle { center: vc, radius: s[2] };
            let circ_a = crate::geom::Circle { center: va, radius: s[3] };
            let (d1, d2) = crate::geom::circle_intersection(&circ_c, &circ_a, 0.0).ok()?;
            let vd = if signed_area(vc, va, d1) < 0.0 { d1 } else { d2 };
            [va, vb, vc, vd]
        }
        Bicentric => solve_cyclic(rng, |s| s[0] + s[2] - s[1] - s[3])?,
        Exbicentric => solve_cyclic(rng, |s| s[0] + s[1] - s[2] - s[3])?,
        Harmonic => solve_cyclic(rng, |s| s[0] * s[2] - s[1] * s[3])?,
    })
}

/// Centroid at the origin, max pairwise distance 1, random rotation.
fn normalize(v: [Point; 4], rng: &mut SeededRng) -> [Point; 4] {
    let c = crate::geom::centroid(&v);
    let s = max_pairwise_distance(&v);
    let rot = uni(rng, 0.0, 2.0 * PI);
    v.map(|x| ((x - c) / s).rotate(rot))
}

fn well_shaped(q: &Quadrilateral) -> bool {
    let sides = q.sides();
    let min_side = sides.iter().copied().fold(f64::INFINITY, f64::min);
    let angles = q.angles();
    q.is_ccw()
        && q.is_convex()
        && min_side >= 0.05 * q.scale()
        && angles.iter().all(|a| *a > 0.12 && *a < PI - 0.12)
}

fn circumcenter_inside(q: &Quadrilateral) -> bool {
    match circumcircle(q.v[0], q.v[1], q.v[2], DEFAULT_REL) {
        Ok(c) => {
            let margin = 0.02 * q.scale();
            q.contains(c.center)
                && (0..4).all(|i| crate::geom::distance_to_line(c.center, q.v[i], q.v[(i + 1) % 4]) > margin)
        }
        Err(_) => false,
    }
}

/// A generic random member of `t`: it satisfies `t` and no non-ancestor type.
pub fn generate(t: QuadType, rng: &mut SeededRng) -> Result<Quadrilateral, QuadError> {
    let ancestors = t.ancestors();
    let others: Vec<QuadType> = QuadType::ALL.into_iter().filter(|o| *o != t && !ancestors.contains(o)).collect();
    for _ in 0..MAX_ATTEMPTS {
        let Some(raw) = construct(t, rng) else { continue };
        let q = Quadrilateral { v: normalize(raw, rng) };
        if !q.v.iter().all(|p| p.is_finite()) || !well_shaped(&q) {
            continue;
        }
        if t.residual(&q.v) > 1e-11 {
            continue;
        }
        if t.is_cyclic_family() && !circumcenter_inside(&q) {
            continue;
        }
        if others.iter().any(|o| o.residual(&q.v) <= 10.0 * DEFAULT_REL) {
            continue;
        }
        return Ok(q);
    }
    Err(QuadError::GenerationFailed(t))
}

/// Generate from a fresh stream for `seed`.
pub fn generate_seeded(t: QuadType, seed: u64) -> Result<Quadrilateral, QuadError> {
    generate(t, &mut seeded(seed))
}
