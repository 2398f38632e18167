//! Shape classification of central quadrilaterals over three vertex orderings.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde_json::{json, Map, Value};

use crate::conditions as cond;
use crate::geom::{
    circumcircle, distance_to_line, line_intersection, max_pairwise_distance, parallel_residual, signed_area,
    Point, Tolerance,
};
use crate::quads::Quadrilateral;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Ordering {
    Fghi,
    Fgih,
    Fhgi,
}

impl Ordering {
    pub const ALL: [Ordering; 3] = [Ordering::Fghi, Ordering::Fgih, Ordering::Fhgi];

    pub fn name(self) -> &'static str {
        match self {
            Ordering::Fghi => "FGHI",
            Ordering::Fgih => "FGIH",
            Ordering::Fhgi => "FHGI",
        }
    }

    pub fn perm(self) -> [usize; 4] {
        match self {
            Ordering::Fghi => [0, 1, 2, 3],
            Ordering::Fgih => [0, 1, 3, 2],
            Ordering::Fhgi => [0, 2, 1, 3],
        }
    }

    pub fn apply(self, p: &[Point; 4]) -> [Point; 4] {
        self.perm().map(|i| p[i])
    }
}

impl fmt::Display for Ordering {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Ordering {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        // any relabeling that traces the same polygon is accepted, e.g. FHIG for FGIH
        let letters: Vec<usize> = s
            .chars()
            .map(|c| "FGHI".find(c.to_ascii_uppercase()).ok_or_else(|| format!("bad ordering '{s}'")))
            .collect::<Result<_, _>>()?;
        if letters.len() != 4 || letters.iter().collect::<BTreeSet<_>>().len() != 4 {
            return Err(format!("bad ordering '{s}'"));
        }
        let edges = |p: &[usize]| {
            let mut e: Vec<(usize, usize)> = (0..4).map(|i| (p[i].min(p[(i + 1) % 4]), p[i].max(p[(i + 1) % 4]))).collect();
            e.sort();
            e
        };
        let target = edges(&letters);
        Ordering::ALL.into_iter().find(|o| edges(&o.perm()) == target).ok_or_else(|| format!("bad ordering '{s}'"))
    }
}

macro_rules! shapes {
    ($($v:ident => $s:literal),* $(,)?) => {
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub enum Shape { $($v),* }

        impl Shape {
            pub const ALL: [Shape; 28] = [$(Shape::$v),*];

            pub fn name(self) -> &'static str {
                match self { $(Shape::$v => $s),* }
            }
        }
    };
}

// Declared so that every shape comes after all of its lattice parents.
shapes! {
    Cyclic => "cyclic",
    Tangential => "tangential",
    Extangential => "extangential",
    Orthodiagonal => "orthodiagonal",
    Equidiagonal => "equidiagonal",
    EqualProdOpp => "equal_prod_opp",
    EqualProdAdj => "equal_prod_adj",
    Pythagorean => "pythagorean",
    Trapezoid => "trapezoid",
    ApQuad => "ap_quad",
    Hjelmslev => "hjelmslev",
    Parallelogram => "parallelogram",
    Kite => "kite",
    Bicentric => "bicentric",
    Exbicentric => "exbicentric",
    Harmonic => "harmonic",
    CyclicOrthodiagonal => "cyclic_orthodiagonal",
    EquidiagonalOrthodiagonal => "equidiagonal_orthodiagonal",
    OrthodiagonalTrapezoid => "orthodiagonal_trapezoid",
    TangentialTrapezoid => "tangential_trapezoid",
    IsoscelesTrapezoid => "isosceles_trapezoid",
    BicentricTrapezoid => "bicentric_trapezoid",
    EquidiagonalOrthodiagonalTrapezoid => "equidiagonal_orthodiagonal_trapezoid",
    Rhombus => "rhombus",
    Rectangle => "rectangle",
    EquidiagonalKite => "equidiagonal_kite",
    RightKite => "right_kite",
    Square => "square",
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Shape {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Shape::ALL.into_iter().find(|x| x.name() == s).ok_or_else(|| format!("unknown shape '{s}'"))
    }
}

impl Shape {
    /// Shapes implied by this one.
    pub fn parents(self) -> &'static [Shape] {
        use Shape::*;
        match self {
            Cyclic | Tangential | Extangential | Orthodiagonal | Equidiagonal | EqualProdOpp | EqualProdAdj
            | Pythagorean | Trapezoid => &[],
            ApQuad => &[Extangential],
            Hjelmslev => &[Cyclic, Pythagorean],
            Parallelogram => &[Extangential, Pythagorean, EqualProdAdj],
            Kite => &[Orthodiagonal, EqualProdOpp, Extangential, Pythagorean, EqualProdAdj],
            Bicentric => &[Cyclic, Tangential],
            Exbicentric => &[Cyclic, Extangential],
            Harmonic => &[Cyclic, EqualProdOpp],
            CyclicOrthodiagonal => &[Cyclic, Orthodiagonal],
            EquidiagonalOrthodiagonal => &[Equidiagonal, Orthodiagonal],
            OrthodiagonalTrapezoid => &[Orthodiagonal, Trapezoid],
            TangentialTrapezoid => &[Tangential, Trapezoid],
            IsoscelesTrapezoid => &[Trapezoid, Equidiagonal, Cyclic],
            BicentricTrapezoid => &[Bicentric, TangentialTrapezoid, IsoscelesTrapezoid],
            EquidiagonalOrthodiagonalTrapezoid => {
                &[EquidiagonalOrthodiagonal, OrthodiagonalTrapezoid, IsoscelesTrapezoid, CyclicOrthodiagonal]
            }
            Rhombus => &[Parallelogram, Kite, ApQuad],
            Rectangle => &[Parallelogram, Equidiagonal, Cyclic, Hjelmslev, Exbicentric],
            EquidiagonalKite => &[Kite, EquidiagonalOrthodiagonal],
            RightKite => &[Kite, Cyclic, Hjelmslev, Harmonic, CyclicOrthodiagonal, Exbicentric],
            Square => &[
                Rhombus,
                Rectangle,
                RightKite,
                EquidiagonalKite,
                Bicentric,
                Harmonic,
                CyclicOrthodiagonal,
                EquidiagonalOrthodiagonal,
            ],
        }
    }

    pub fn ancestors(self) -> BTreeSet<Shape> {
        let mut out = BTreeSet::new();
        let mut stack = self.parents().to_vec();
        while let Some(s) = stack.pop() {
            if out.insert(s) {
                stack.extend_from_slice(s.parents());
            }
        }
        out
    }
}

/// Add every shape implied by a member of `set`.
pub fn closure(set: &BTreeSet<Shape>) -> BTreeSet<Shape> {
    let mut out = set.clone();
    for s in set {
        out.extend(s.ancestors());
    }
    out
}

/// Members of `set` with no descendant in `set`.
pub fn most_specific_of(set: &BTreeSet<Shape>) -> BTreeSet<Shape> {
    set.iter().copied().filter(|s| !set.iter().any(|t| t != s && t.ancestors().contains(s))).collect()
}

/// Inclusive reading: parallelograms count as trapezoids, with the trapezoid combinations that follow.
pub fn inclusive(set: &BTreeSet<Shape>) -> BTreeSet<Shape> {
    let mut out = closure(set);
    if out.contains(&Shape::Parallelogram) {
        out.insert(Shape::Trapezoid);
        for s in Shape::ALL {
            if s.parents().contains(&Shape::Trapezoid) && s.parents().iter().all(|p| out.contains(p)) {
                out.insert(s);
            }
        }
        for s in Shape::ALL {
            if !s.parents().is_empty() && s.parents().iter().all(|p| out.contains(p)) && s.ancestors().contains(&Shape::Trapezoid) {
                out.insert(s);
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "camelCase")]
pub enum Degeneracy {
    Nondegenerate,
    Collinear,
    CoincidentPoints,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PredicateResult {
    pub holds: bool,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrderingReport {
    pub ordering: Ordering,
    /// Indexed like `Shape::ALL`.
    pub predicates: Vec<PredicateResult>,
}

impl OrderingReport {
    pub fn get(&self, s: Shape) -> PredicateResult {
        self.predicates[s as usize]
    }

    pub fn holds(&self, s: Shape) -> bool {
        self.get(s).holds
    }

    pub fn holding(&self) -> BTreeSet<Shape> {
        Shape::ALL.into_iter().filter(|s| self.holds(*s)).collect()
    }

    pub fn most_specific(&self) -> BTreeSet<Shape> {
        most_specific_of(&self.holding())
    }
}

macro_rules! extras {
    ($($v:ident => $s:literal),* $(,)?) => {
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub enum Extra { $($v),* }

        impl Extra {
            pub const ALL: [Extra; 9] = [$(Extra::$v),*];

            pub fn name(self) -> &'static str {
                match self { $(Extra::$v => $s),* }
            }
        }
    };
}

extras! {
    IncenterIsE => "incenter_is_e",
    IncircleEqualsRefCircumcircle => "incircle_equals_ref_circumcircle",
    InradiusHalfRefCircumradius => "inradius_half_ref_circumradius",
    CircleThroughE => "circle_through_e",
    DiagonalsMeetAtE => "diagonals_meet_at_e",
    DiagonalsParallelToRefSides => "diagonals_parallel_to_ref_sides",
    SidesParallelToRefDiagonals => "sides_parallel_to_ref_diagonals",
    SameDiagonalPointAsRef => "same_diagonal_point_as_ref",
    ContactPointsOnRefDiagonal => "contact_points_on_ref_diagonal",
}

impl fmt::Display for Extra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Extra {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Extra::ALL.into_iter().find(|x| x.name() == s).ok_or_else(|| format!("unknown extra '{s}'"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShapeReport {
    pub points: [Point; 4],
    pub degeneracy: Degeneracy,
    /// Empty when degenerate.
    pub orderings: Vec<OrderingReport>,
    /// Only extras whose prerequisites hold are present.
    pub extras: Vec<(Extra, PredicateResult)>,
}

impl ShapeReport {
    pub fn ordering(&self, o: Ordering) -> Option<&OrderingReport> {
        self.orderings.iter().find(|r| r.ordering == o)
    }

    pub fn extra(&self, e: Extra) -> Option<PredicateResult> {
        self.extras.iter().find(|(x, _)| *x == e).map(|(_, r)| *r)
    }

    pub fn is_degenerate(&self) -> bool {
        self.degeneracy != Degeneracy::Nondegenerate
    }

    pub fn to_json(&self) -> Value {
        let mut ords = Map::new();
        for r in &self.orderings {
            let mut preds = Map::new();
            for s in Shape::ALL {
                let p = r.get(s);
                preds.insert(s.name().into(), json!({"holds": p.holds, "residual": p.residual}));
            }
            ords.insert(
                r.ordering.name().into(),
                json!({
                    "predicates": preds,
                    "most_specific": r.most_specific().iter().map(|s| s.name()).collect::<Vec<_>>(),
                }),
            );
        }
        let mut ex = Map::new();
        for (e, r) in &self.extras {
            ex.insert(e.name().into(), json!({"holds": r.holds, "residual": r.residual}));
        }
        json!({
            "points": self.points.iter().map(|p| [p.x, p.y]).collect::<Vec<_>>(),
            "degeneracy": self.degeneracy,
            "orderings": ords,
            "extras": ex,
        })
    }
}

fn degeneracy(p: &[Point; 4], rel: f64) -> Degeneracy {
    let scale = max_pairwise_distance(p);
    if scale == 0.0 || !p.iter().all(|x| x.is_finite()) {
        return Degeneracy::CoincidentPoints;
    }
    for i in 0..4 {
        for j in i + 1..4 {
            if p[i].dist(p[j]) <= rel * scale {
                return Degeneracy::CoincidentPoints;
            }
        }
    }
    let mut max_area = 0.0f64;
    for skip in 0..4 {
        let t: Vec<Point> = (0..4).filter(|&i| i != skip).map(|i| p[i]).collect();
        max_area = max_area.max(signed_area(t[0], t[1], t[2]).abs());
    }
    if max_area <= rel * scale * scale {
        return Degeneracy::Collinear;
    }
    Degeneracy::Nondegenerate
}

fn strictly_convex(p: &[Point; 4], rel: f64) -> bool {
    crate::geom::is_convex(p, rel)
}

fn classify_ordering(p: &[Point; 4], o: Ordering, rel: f64, cyclic_res: f64) -> OrderingReport {
    let q = o.apply(p);
    let mut res = vec![PredicateResult { holds: false, residual: 0.0 }; Shape::ALL.len()];
    for s in Shape::ALL {
        let own = match s {
            Shape::Cyclic => Some(cyclic_res),
            Shape::Tangential => Some(cond::pitot(&q)),
            Shape::Extangential => Some(cond::extangential(&q)),
            Shape::Orthodiagonal => Some(cond::orthodiagonal(&q)),
            Shape::Equidiagonal => Some(cond::equidiagonal(&q)),
            Shape::EqualProdOpp => Some(cond::equal_prod_opp(&q)),
            Shape::EqualProdAdj => Some(cond::equal_prod_adj(&q)),
            Shape::Pythagorean => Some(cond::pythagorean(&q)),
            Shape::Trapezoid => Some(cond::some_parallel_pair(&q)),
            Shape::ApQuad => Some(cond::ap_quad(&q)),
            Shape::Hjelmslev => Some(cond::hjelmslev(&q)),
            Shape::Parallelogram => Some(cond::parallelogram(&q)),
            Shape::Kite => Some(cond::kite(&q)),
            Shape::Rhombus => Some(cond::equal_sides(&q)),
            _ => None,
        };
        let mut residual = own.unwrap_or(0.0);
        let mut holds = residual <= rel;
        match s {
            Shape::Tangential => holds &= strictly_convex(&q, rel),
            Shape::Trapezoid => {
                let [x, y] = cond::opposite_parallel(&q);
                holds &= x.max(y) > rel;
            }
            _ => {}
        }
        for parent in s.parents() {
            let pr = res[*parent as usize];
            holds &= pr.holds;
            residual = residual.max(pr.residual);
        }
        res[s as usize] = PredicateResult { holds, residual };
    }
    OrderingReport { ordering: o, predicates: res }
}

struct Incircle {
    center: Point,
    radius: f64,
}

fn incircle(q: &[Point; 4]) -> Option<Incircle> {
    let bis = |i: usize| {
        let u = q[(i + 3) % 4] - q[i];
        let v = q[(i + 1) % 4] - q[i];
        u / u.norm() + v / v.norm()
    };
    let c = line_intersection(q[0], q[0] + bis(0), q[1], q[1] + bis(1), 0.0).ok()?;
    Some(Incircle { center: c, radius: distance_to_line(c, q[0], q[1]) })
}

fn foot(x: Point, l1: Point, l2: Point) -> Point {
    let d = l2 - l1;
    l1 + d * ((x - l1).dot(d) / d.norm2())
}

fn extras_for(p: &[Point; 4], ords: &[OrderingReport], refq: &Quadrilateral, e: Point, rel: f64) -> Vec<(Extra, PredicateResult)> {
    let mut all: Vec<Point> = p.to_vec();
    all.extend_from_slice(&refq.v);
    all.push(e);
    let scale = max_pairwise_distance(&all);
    let r = |x: f64| PredicateResult { holds: x <= rel, residual: x };
    let mut out = Vec::new();
    let [a, b, c, d] = refq.v;
    let ref_circle = circumcircle(a, b, c, 0.0).ok();

    if let Some(t) = ords.iter().find(|o| o.holds(Shape::Tangential)) {
        let q = t.ordering.apply(p);
        if let Some(ic) = incircle(&q) {
            out.push((Extra::IncenterIsE, r(ic.center.dist(e) / scale)));
            if let Some(rc) = ref_circle {
                let dev = ic.center.dist(rc.center).max((ic.radius - rc.radius).abs());
                out.push((Extra::IncircleEqualsRefCircumcircle, r(dev / scale)));
                out.push((Extra::InradiusHalfRefCircumradius, r((ic.radius / rc.radius - 0.5).abs())));
            }
            let contacts: Vec<Point> = (0..4).map(|i| foot(ic.center, q[i], q[(i + 1) % 4])).collect();
            let best = [(a, c), (b, d)]
                .iter()
                .map(|(l1, l2)| {
                    let mut ds: Vec<f64> = contacts.iter().map(|x| distance_to_line(*x, *l1, *l2)).collect();
                    ds.sort_by(f64::total_cmp);
                    ds[1]
                })
                .fold(f64::INFINITY, f64::min);
            out.push((Extra::ContactPointsOnRefDiagonal, r(best / scale)));
        }
    }
    if ords.first().is_some_and(|o| o.holds(Shape::Cyclic)) {
        let (f, g, h) = (p[0], p[1], p[2]);
        let circ = circumcircle(f, g, h, 0.0).or_else(|_| circumcircle(p[1], p[2], p[3], 0.0));
        if let Ok(cc) = circ {
            out.push((Extra::CircleThroughE, r(cc.residual(e).abs() / scale)));
        }
    }
    let [f, g, h, i] = *p;
    let meet = distance_to_line(e, f, h).max(distance_to_line(e, g, i));
    out.push((Extra::DiagonalsMeetAtE, r(meet / scale)));
    let ref_sides = [b - a, c - b, d - c, a - d];
    let to_sides = |u: Point| ref_sides.iter().map(|s| parallel_residual(u, *s)).fold(f64::INFINITY, f64::min);
    out.push((Extra::DiagonalsParallelToRefSides, r(to_sides(h - f).max(to_sides(i - g)))));
    let to_diags = |u: Point| parallel_residual(u, c - a).min(parallel_residual(u, d - b));
    let sides = [g - f, h - g, i - h, f - i];
    out.push((Extra::SidesParallelToRefDiagonals, r(sides.iter().map(|s| to_diags(*s)).fold(0.0, f64::max))));
    let same = match (line_intersection(f, h, g, i, 0.0), line_intersection(a, c, b, d, 0.0)) {
        (Ok(x), Ok(y)) => x.dist(y) / scale,
        _ => f64::INFINITY,
    };
    out.push((Extra::SameDiagonalPointAsRef, r(same)));
    out
}

/// Classify F G H I, optionally against a reference quadrilateral and radiator.
pub fn classify(pts: [Point; 4], reference: Option<(&Quadrilateral, Point)>, tol: &Tolerance) -> ShapeReport {
    let rel = tol.rel;
    let degeneracy = degeneracy(&pts, rel);
    if degeneracy != Degeneracy::Nondegenerate {
        return ShapeReport { points: pts, degeneracy, orderings: Vec::new(), extras: Vec::new() };
    }
    let cyc = cond::cyclic(&pts);
    let orderings: Vec<OrderingReport> = Ordering::ALL.iter().map(|o| classify_ordering(&pts, *o, rel, cyc)).collect();
    let extras = match reference {
        Some((q, e)) => extras_for(&pts, &orderings, q, e, rel),
        None => Vec::new(),
    };
    ShapeReport { points: pts, degeneracy, orderings, extras }
}

/// Most specific shapes of the primary ordering.
pub fn most_specific(report: &ShapeReport) -> BTreeSet<Shape> {
    report.ordering(Ordering::Fghi).map(|o| o.most_specific()).unwrap_or_default()
}
