//! The discovery engine: radial pipeline, scans, the theorem catalog and golden-table diffs.

pub mod golden;
pub mod scan;
pub mod theorems;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::centers::{CenterError, CenterPoint, Registry};
use crate::classify::{inclusive, Extra, Ordering, PredicateResult, Shape, ShapeReport};
use crate::geom::{
    circumcircle, detect_homothety, distance_to_line, max_pairwise_distance, midpoint, parallel_residual, GeomError,
    Point, Triangle,
};
use crate::quads::{QuadType, Quadrilateral};
use crate::radiators::{vertex_centroid, LineSpec, RadiatorKind};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PipelineError {
    #[error("degenerate radial triangle or center at infinity")]
    Degenerate,
    /// Rounding error in the centers is not small against their spacing.
    #[error("centers cannot be resolved to the working tolerance")]
    IllConditioned,
    #[error(transparent)]
    Center(CenterError),
}

/// X_n of the radial triangles ABE, BCE, CDE, DAE.
pub fn run_pipeline(reg: &Registry, q: &Quadrilateral, e: Point, n: u32, rel: f64) -> Result<[Point; 4], PipelineError> {
    let mut out = [Point::default(); 4];
    let mut cond = 1.0f64;
    for (i, o) in out.iter_mut().enumerate() {
        let t = Triangle::new(q.v[i], q.v[(i + 1) % 4], e);
        *o = match reg.center_point_conditioned(n, &t, rel) {
            Ok((CenterPoint::Finite(p), k)) if p.is_finite() => {
                cond = cond.max(k);
                p
            }
            Ok(_) => return Err(PipelineError::Degenerate),
            Err(CenterError::UnknownCenter(n)) => return Err(PipelineError::Center(CenterError::UnknownCenter(n))),
            Err(_) => return Err(PipelineError::Degenerate),
        };
    }
    let scale = q.v.iter().chain(out.iter()).map(|p| p.dist(e)).fold(0.0, f64::max);
    let gap = (0..4)
        .flat_map(|i| (i + 1..4).map(move |j| (i, j)))
        .map(|(i, j)| out[i].dist(out[j]))
        .fold(f64::INFINITY, f64::min);
    if gap > 0.0 && cond * f64::EPSILON * scale > rel * gap {
        return Err(PipelineError::IllConditioned);
    }
    Ok(out)
}

/// Whether a radiator makes sense for a reference type.
pub fn radiator_applies(kind: RadiatorKind, t: QuadType) -> bool {
    let within = |root: QuadType| t == root || t.ancestors().contains(&root);
    match kind {
        RadiatorKind::OnSegment(LineSpec::KiteAxis) => within(QuadType::Kite),
        RadiatorKind::OnSegment(LineSpec::PerpBisectorBC) => within(QuadType::IsoscelesTrapezoid),
        _ => true,
    }
}

/// Every radiator kind, in canonical order.
pub fn all_radiators() -> Vec<RadiatorKind> {
    let mut v = RadiatorKind::ALL.to_vec();
    v.push(RadiatorKind::OnSegment(LineSpec::DiagonalAC));
    v.push(RadiatorKind::OnSegment(LineSpec::DiagonalBD));
    v
}

pub fn radiator_index(k: RadiatorKind) -> u64 {
    all_radiators().iter().position(|x| *x == k).unwrap_or(0) as u64
}

pub fn type_index(t: QuadType) -> u64 {
    QuadType::ALL.iter().position(|x| *x == t).unwrap_or(0) as u64
}

/// One token of a center list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CenterToken {
    Index(u32),
    Range(u32, u32),
    All,
    /// M, T, S or A.
    Set(char),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CenterSpec {
    /// Tokens with their numeric-only mark.
    pub tokens: Vec<(CenterToken, bool)>,
}

impl FromStr for CenterSpec {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut tokens = Vec::new();
        for raw in s.split(',').map(str::trim).filter(|x| !x.is_empty()) {
            let (body, numeric) = match raw.strip_suffix('!') {
                Some(b) => (b, true),
                None => (raw, false),
            };
            let tok = match body {
                "all" => CenterToken::All,
                "M" | "T" | "S" | "A" => CenterToken::Set(body.chars().next().unwrap()),
                _ => match body.split_once(['-', '.']) {
                    Some((a, b)) => {
                        let b = b.trim_start_matches('.');
                        let (a, b): (u32, u32) =
                            (a.parse().map_err(|_| format!("bad center '{raw}'"))?, b.parse().map_err(|_| format!("bad center '{raw}'"))?);
                        if a > b {
                            return Err(format!("empty range '{raw}'"));
                        }
                        CenterToken::Range(a, b)
                    }
                    None => CenterToken::Index(body.parse().map_err(|_| format!("bad center '{raw}'"))?),
                },
            };
            tokens.push((tok, numeric));
        }
        if tokens.is_empty() {
            return Err("empty center list".into());
        }
        Ok(CenterSpec { tokens })
    }
}

impl CenterSpec {
    /// Indices named one by one or by a range.
    pub fn explicit(&self) -> Vec<u32> {
        let mut out = Vec::new();
        for (tok, _) in &self.tokens {
            match tok {
                CenterToken::Index(n) => out.push(*n),
                CenterToken::Range(a, b) => out.extend(*a..=*b),
                _ => {}
            }
        }
        out
    }

    /// Explicit indices are kept whether registered or not; sets and `all` expand against `reg`.
    pub fn expand(&self, reg: &Registry) -> Vec<(u32, bool)> {
        let mut out: Vec<(u32, bool)> = Vec::new();
        for (tok, numeric) in &self.tokens {
            let ns: Vec<u32> = match tok {
                CenterToken::Index(n) => vec![*n],
                CenterToken::Range(a, b) => (*a..=*b).collect(),
                CenterToken::All => reg.indices(),
                CenterToken::Set('M') => reg.members(|f| f.set_m),
                CenterToken::Set('T') => reg.members(|f| f.set_t),
                CenterToken::Set('A') => reg.members(|f| f.set_a),
                CenterToken::Set(_) => reg.members(|f| f.shinagawa_constant()),
            };
            for n in ns {
                if !out.iter().any(|(m, _)| *m == n) {
                    out.push((n, *numeric));
                }
            }
        }
        out.sort();
        out
    }
}

/// A single verifiable assertion about one instance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Check {
    Shape(Shape, Ordering),
    Extra(Extra),
    /// Segments between the labeled central points (0 = F, ..., 3 = I) are parallel.
    Parallel([usize; 2], [usize; 2]),
    EMidpointBD,
    EIsRefCircumcenter,
    HomothetyRatio(f64),
    HomothetyCenterRatio(f64),
    CircumcenterMidpointEO,
}

fn label_index(c: char) -> Option<usize> {
    "FGHI".find(c)
}

impl FromStr for Check {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if let Some((l, r)) = s.split_once("||") {
            let seg = |x: &str| -> Option<[usize; 2]> {
                let v: Vec<usize> = x.chars().map(label_index).collect::<Option<_>>()?;
                (v.len() == 2 && v[0] != v[1]).then(|| [v[0], v[1]])
            };
            return match (seg(l), seg(r)) {
                (Some(a), Some(b)) => Ok(Check::Parallel(a, b)),
                _ => Err(format!("bad parallel check '{s}'")),
            };
        }
        if let Some((k, v)) = s.split_once('=') {
            let x: f64 = v.parse().map_err(|_| format!("bad number in '{s}'"))?;
            return match k {
                "homothety_ratio" => Ok(Check::HomothetyRatio(x)),
                "homothety_center_ratio" => Ok(Check::HomothetyCenterRatio(x)),
                _ => Err(format!("unknown check '{s}'")),
            };
        }
        match s {
            "e_midpoint_bd" => return Ok(Check::EMidpointBD),
            "e_is_ref_circumcenter" => return Ok(Check::EIsRefCircumcenter),
            "circumcenter_midpoint_eo" => return Ok(Check::CircumcenterMidpointEO),
            _ => {}
        }
        if let Ok(e) = s.parse::<Extra>() {
            return Ok(Check::Extra(e));
        }
        let (name, ord) = match s.split_once('@') {
            Some((n, o)) => (n, o.parse::<Ordering>()?),
            None => (s, Ordering::Fghi),
        };
        name.parse::<Shape>().map(|sh| Check::Shape(sh, ord)).map_err(|_| format!("unknown check '{s}'"))
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let l = |i: usize| "FGHI".as_bytes()[i] as char;
        match self {
            Check::Shape(s, Ordering::Fghi) => write!(f, "{s}"),
            Check::Shape(s, o) => write!(f, "{s}@{o}"),
            Check::Extra(e) => write!(f, "{e}"),
            Check::Parallel(a, b) => write!(f, "{}{}||{}{}", l(a[0]), l(a[1]), l(b[0]), l(b[1])),
            Check::EMidpointBD => f.write_str("e_midpoint_bd"),
            Check::EIsRefCircumcenter => f.write_str("e_is_ref_circumcenter"),
            Check::HomothetyRatio(x) => write!(f, "homothety_ratio={x}"),
            Check::HomothetyCenterRatio(x) => write!(f, "homothety_center_ratio={x}"),
            Check::CircumcenterMidpointEO => f.write_str("circumcenter_midpoint_eo"),
        }
    }
}

/// A reference quadrilateral, its radiator, the four central points and their classification.
#[derive(Debug, Clone)]
pub struct Instance {
    pub q: Quadrilateral,
    pub e: Point,
    pub pts: [Point; 4],
    pub report: ShapeReport,
}

fn failed() -> PredicateResult {
    PredicateResult { holds: false, residual: f64::INFINITY }
}

impl Check {
    pub fn evaluate(&self, inst: &Instance, rel: f64) -> PredicateResult {
        let mut all: Vec<Point> = inst.q.v.to_vec();
        all.push(inst.e);
        all.extend_from_slice(&inst.pts);
        let scale = max_pairwise_distance(&all);
        let r = |x: f64| PredicateResult { holds: x <= rel, residual: x };
        let [a, b, c, _d] = inst.q.v;
        let p = &inst.pts;
        match *self {
            Check::Shape(s, o) => match inst.report.ordering(o) {
                Some(rep) => PredicateResult { holds: inclusive(&rep.holding()).contains(&s), residual: rep.get(s).residual },
                None => failed(),
            },
            Check::Extra(e) => inst.report.extra(e).unwrap_or_else(failed),
            Check::Parallel(u, v) => r(parallel_residual(p[u[1]] - p[u[0]], p[v[1]] - p[v[0]])),
            Check::EMidpointBD => r(inst.e.dist(midpoint(inst.q.v[1], inst.q.v[3])) / scale),
            Check::EIsRefCircumcenter => match circumcircle(a, b, c, 0.0) {
                Ok(o) => r(o.center.dist(inst.e) / scale),
                Err(_) => failed(),
            },
            Check::HomothetyRatio(k) => match detect_homothety(&inst.q.v, p, rel) {
                Ok((_, got)) => r((got - k).abs()),
                Err(GeomError::NotHomothetic { residual }) => PredicateResult { holds: false, residual: residual / scale },
                Err(_) => failed(),
            },
            Check::HomothetyCenterRatio(k) => match detect_homothety(&inst.q.v, p, rel) {
                Ok((center, _)) => {
                    let m = vertex_centroid(&inst.q);
                    let off_line = distance_to_line(center, inst.e, m);
                    let ratio = (center.dist(inst.e) - k * center.dist(m)).abs();
                    r(off_line.max(ratio) / scale)
                }
                Err(GeomError::NotHomothetic { residual }) => PredicateResult { holds: false, residual: residual / scale },
                Err(_) => failed(),
            },
            Check::CircumcenterMidpointEO => {
                let o = circumcircle(a, b, c, 0.0);
                let pc = circumcircle(p[0], p[1], p[2], 0.0).or_else(|_| circumcircle(p[1], p[2], p[3], 0.0));
                match (o, pc) {
                    (Ok(o), Ok(pc)) => r(pc.center.dist(midpoint(inst.e, o.center)) / scale),
                    _ => failed(),
                }
            }
        }
    }
}

/// Round to 15 significant digits, the precision of every printed number.
pub fn round15(x: f64) -> f64 {
    if !x.is_finite() {
        return x;
    }
    format!("{x:.14e}").parse().unwrap_or(x)
}
