//! Radiator points of a quadrilateral and the sub-quadrilateral centers.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use thiserror::Error;

use crate::geom::{
    centroid, circle_intersection, circumcircle, distance_to_line, line_intersection, max_pairwise_distance,
    midpoint, reflect_about_line, Circle, GeomError, Point, DEFAULT_REL,
};
use crate::quads::{Quadrilateral, SeededRng};

/// Acceptance gate for the common point of four circles, relative to scale.
pub const COMMON_POINT_GATE: f64 = 1e-8;

/// Minimum distance of an arbitrary radiator from every side line, relative to scale.
pub const ARBITRARY_MARGIN: f64 = 0.02;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RadiatorError {
    #[error("circles have no common point (best residual {residual:e})")]
    NoCommonPoint { residual: f64 },
    #[error(transparent)]
    Geom(#[from] GeomError),
    #[error("could not place the radiator")]
    PlacementFailed,
    #[error("unknown radiator '{0}'")]
    UnknownRadiator(String),
    #[error("{0} is not a sub-quadrilateral center")]
    NotSubQuadKind(RadiatorKind),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LineSpec {
    /// The diagonal that is a mirror axis of the quadrilateral.
    KiteAxis,
    /// Chord of the perpendicular bisector of BC inside the quadrilateral.
    PerpBisectorBC,
    DiagonalAC,
    DiagonalBD,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RadiatorKind {
    Arbitrary,
    DiagonalPoint,
    PonceletPoint,
    SteinerPoint,
    VertexCentroid,
    AreaCentroid,
    OnSegment(LineSpec),
}

impl RadiatorKind {
    pub const ALL: [RadiatorKind; 8] = [
        RadiatorKind::Arbitrary,
        RadiatorKind::DiagonalPoint,
        RadiatorKind::PonceletPoint,
        RadiatorKind::SteinerPoint,
        RadiatorKind::VertexCentroid,
        RadiatorKind::AreaCentroid,
        RadiatorKind::OnSegment(LineSpec::KiteAxis),
        RadiatorKind::OnSegment(LineSpec::PerpBisectorBC),
    ];

    pub fn name(self) -> &'static str {
        match self {
            RadiatorKind::Arbitrary => "arbitrary",
            RadiatorKind::DiagonalPoint => "diagonal-point",
            RadiatorKind::PonceletPoint => "poncelet",
            RadiatorKind::SteinerPoint => "steiner",
            RadiatorKind::VertexCentroid => "vertex-centroid",
            RadiatorKind::AreaCentroid => "area-centroid",
            RadiatorKind::OnSegment(LineSpec::KiteAxis) => "on-axis",
            RadiatorKind::OnSegment(LineSpec::PerpBisectorBC) => "on-perp-bisector",
            RadiatorKind::OnSegment(LineSpec::DiagonalAC) => "on-diagonal-ac",
            RadiatorKind::OnSegment(LineSpec::DiagonalBD) => "on-diagonal-bd",
        }
    }

    /// Whether placement draws from the random stream.
    pub fn is_random(self) -> bool {
        matches!(self, RadiatorKind::Arbitrary | RadiatorKind::OnSegment(_))
    }
}

impl fmt::Display for RadiatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RadiatorKind {
    type Err = RadiatorError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let all = RadiatorKind::ALL
            .into_iter()
            .chain([RadiatorKind::OnSegment(LineSpec::DiagonalAC), RadiatorKind::OnSegment(LineSpec::DiagonalBD)]);
        all.into_iter().find(|k| k.name() == s).ok_or_else(|| RadiatorError::UnknownRadiator(s.to_string()))
    }
}

pub fn diagonal_point(q: &Quadrilateral) -> Result<Point, GeomError> {
    let [a, b, c, d] = q.v;
    line_intersection(a, c, b, d, DEFAULT_REL)
}

pub fn vertex_centroid(q: &Quadrilateral) -> Point {
    centroid(&q.v)
}

/// Intersection of G_A G_C and G_B G_D, G_X the centroid of the triangle omitting X.
pub fn area_centroid(q: &Quadrilateral) -> Result<Point, GeomError> {
    let g = |skip: usize| centroid(&omit(&q.v, skip));
    line_intersection(g(0), g(2), g(1), g(3), DEFAULT_REL)
}

fn omit(v: &[Point; 4], skip: usize) -> [Point; 3] {
    let mut out = [Point::default(); 3];
    let mut k = 0;
    for (i, p) in v.iter().enumerate() {
        if i != skip {
            out[k] = *p;
            k += 1;
        }
    }
    out
}

/// Circle through the midpoints of the segments from vertex `i` to the other three.
pub fn midray_circles(v: &[Point; 4]) -> Result<[Circle; 4], GeomError> {
    let mut out = Vec::with_capacity(4);
    for i in 0..4 {
        let m: Vec<Point> = (0..4).filter(|&j| j != i).map(|j| midpoint(v[i], v[j])).collect();
        out.push(circumcircle(m[0], m[1], m[2], DEFAULT_REL)?);
    }
    Ok([out[0], out[1], out[2], out[3]])
}

/// Nine-point circles of the four component triangles.
pub fn nine_point_circles(v: &[Point; 4]) -> Result<[Circle; 4], GeomError> {
    let mut out = Vec::with_capacity(4);
    for skip in 0..4 {
        let [a, b, c] = omit(v, skip);
        out.push(circumcircle(midpoint(b, c), midpoint(c, a), midpoint(a, b), DEFAULT_REL)?);
    }
    Ok([out[0], out[1], out[2], out[3]])
}

/// Point common to four circles: the pairwise intersection candidate with the
/// smallest worst-case residual, ties going to a point inside `region`.
pub fn common_point(circles: &[Circle; 4], region: &[Point; 4]) -> Result<Point, RadiatorError> {
    let scale = max_pairwise_distance(region);
    let inside = |p: Point| crate::geom::inside_convex(p, region);
    let mut best: Option<(f64, bool, Point)> = None;
    for i in 0..4 {
        for j in i + 1..4 {
            let Ok((p1, p2)) = circle_intersection(&circles[i], &circles[j], DEFAULT_REL) else { continue };
            for p in [p1, p2] {
                let r = circles.iter().map(|c| c.residual(p).abs()).fold(0.0, f64::max);
                let ins = inside(p);
                let better = match best {
                    None => true,
                    Some((br, bin, _)) => {
                        let tie = (r - br).abs() <= 1e-12 * scale;
                        if tie {
                            ins && !bin
                        } else {
                            r < br
                        }
                    }
                };
                if better {
                    best = Some((r, ins, p));
                }
            }
        }
    }
    match best {
        Some((r, _, p)) if r <= COMMON_POINT_GATE * scale => Ok(p),
        Some((r, _, _)) => Err(RadiatorError::NoCommonPoint { residual: r }),
        None => Err(RadiatorError::NoCommonPoint { residual: f64::INFINITY }),
    }
}

pub fn steiner_of(v: &[Point; 4]) -> Result<Point, RadiatorError> {
    common_point(&midray_circles(v)?, v)
}

pub fn poncelet_of(v: &[Point; 4]) -> Result<Point, RadiatorError> {
    common_point(&nine_point_circles(v)?, v)
}

pub fn steiner_point(q: &Quadrilateral) -> Result<Point, RadiatorError> {
    steiner_of(&q.v)
}

pub fn poncelet_point(q: &Quadrilateral) -> Result<Point, RadiatorError> {
    poncelet_of(&q.v)
}

/// The diagonal that is a mirror axis (the one with the smaller mirror residual).
pub fn kite_axis(q: &Quadrilateral) -> (Point, Point) {
    let [a, b, c, d] = q.v;
    let r_ac = reflect_about_line(b, a, c).dist(d);
    let r_bd = reflect_about_line(a, b, d).dist(c);
    if r_ac <= r_bd {
        (a, c)
    } else {
        (b, d)
    }
}

/// The part of the perpendicular bisector of BC inside the quadrilateral.
pub fn perp_bisector_chord(q: &Quadrilateral) -> Result<(Point, Point), RadiatorError> {
    let [a, b, c, d] = q.v;
    let m = midpoint(b, c);
    let dir = (c - b).perp();
    let mut best = f64::INFINITY;
    for (p, r) in [(a, b), (c, d), (d, a)] {
        let e = r - p;
        let den = dir.cross(e);
        if den.abs() <= 1e-15 {
            continue;
        }
        let t = (p - m).cross(e) / den;
        let s = (p - m).cross(dir) / den;
        if t > 1e-12 && (-1e-12..=1.0 + 1e-12).contains(&s) {
            best = best.min(t);
        }
    }
    if !best.is_finite() {
        return Err(RadiatorError::PlacementFailed);
    }
    Ok((m, m + dir * best))
}

pub fn segment_of(spec: LineSpec, q: &Quadrilateral) -> Result<(Point, Point), RadiatorError> {
    Ok(match spec {
        LineSpec::KiteAxis => kite_axis(q),
        LineSpec::PerpBisectorBC => perp_bisector_chord(q)?,
        LineSpec::DiagonalAC => (q.v[0], q.v[2]),
        LineSpec::DiagonalBD => (q.v[1], q.v[3]),
    })
}

fn arbitrary(q: &Quadrilateral, rng: &mut SeededRng) -> Result<Point, RadiatorError> {
    let xs = q.v.map(|p| p.x);
    let ys = q.v.map(|p| p.y);
    let (x0, x1) = (xs.iter().copied().fold(f64::INFINITY, f64::min), xs.iter().copied().fold(f64::NEG_INFINITY, f64::max));
    let (y0, y1) = (ys.iter().copied().fold(f64::INFINITY, f64::min), ys.iter().copied().fold(f64::NEG_INFINITY, f64::max));
    let margin = ARBITRARY_MARGIN * q.scale();
    for _ in 0..1000 {
        let p = Point::new(rng.gen_range(x0..x1), rng.gen_range(y0..y1));
        if q.contains(p) && (0..4).all(|i| distance_to_line(p, q.v[i], q.v[(i + 1) % 4]) > margin) {
            return Ok(p);
        }
    }
    Err(RadiatorError::PlacementFailed)
}

/// Place a radiator of the given kind; random kinds draw from `rng`.
pub fn place(kind: RadiatorKind, q: &Quadrilateral, rng: &mut SeededRng) -> Result<Point, RadiatorError> {
    match kind {
        RadiatorKind::Arbitrary => arbitrary(q, rng),
        RadiatorKind::DiagonalPoint => Ok(diagonal_point(q)?),
        RadiatorKind::PonceletPoint => poncelet_point(q),
        RadiatorKind::SteinerPoint => steiner_point(q),
        RadiatorKind::VertexCentroid => Ok(vertex_centroid(q)),
        RadiatorKind::AreaCentroid => Ok(area_centroid(q)?),
        RadiatorKind::OnSegment(spec) => {
            let (p0, p1) = segment_of(spec, q)?;
            Ok(p0.lerp(p1, rng.gen_range(0.1..0.9)))
        }
    }
}

/// Centers of EBCD, EACD, EABD, EABC.
pub fn sub_quadrilateral_centers(q: &Quadrilateral, e: Point, kind: RadiatorKind) -> Result<[Point; 4], RadiatorError> {
    let [a, b, c, d] = q.v;
    let subs = [[e, b, c, d], [e, a, c, d], [e, a, b, d], [e, a, b, c]];
    let mut out = [Point::default(); 4];
    for (o, s) in out.iter_mut().zip(subs.iter()) {
        *o = match kind {
            RadiatorKind::VertexCentroid => centroid(s),
            RadiatorKind::SteinerPoint => steiner_of(s)?,
            RadiatorKind::PonceletPoint => poncelet_of(s)?,
            other => return Err(RadiatorError::NotSubQuadKind(other)),
        };
    }
    Ok(out)
}
