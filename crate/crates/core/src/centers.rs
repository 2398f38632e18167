//! Triangle-center registry keyed by Kimberling index.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::OnceLock;

use thiserror::Error;

use crate::formula::{barycentric_triple_checked, parse_formula, EvalError, Expr, ParseError};
use crate::geom::{reflect_about_line, Point, Triangle, DEFAULT_REL};

pub const DEFAULT_REGISTRY: &str = include_str!("../data/centers.txt");

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RegistryError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: {source}")]
    Formula { line: usize, source: ParseError },
    #[error("line {line}: duplicate index {index}")]
    Duplicate { line: usize, index: u32 },
    #[error("missing mandatory centers: {0:?}")]
    MissingCenters(Vec<u32>),
    #[error("X({index}): euler parameter disagrees with the formula by {residual:e}")]
    EulerMismatch { index: u32, residual: f64 },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CenterError {
    #[error("unknown center X({0})")]
    UnknownCenter(u32),
    #[error("degenerate triangle")]
    DegenerateTriangle,
    #[error("X({0}) is indeterminate (0:0:0) at this triangle")]
    Indeterminate(u32),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Builtin {
    /// Reflection of X(3) in X(110).
    ParryReflection,
    /// Reflection of X(110) in the Euler line.
    TixierPoint,
    /// Circumcircle antipode of the Tixier point.
    TixierAntipode,
}

impl Builtin {
    pub fn name(self) -> &'static str {
        match self {
            Builtin::ParryReflection => "parry_reflection",
            Builtin::TixierPoint => "tixier_point",
            Builtin::TixierAntipode => "tixier_antipode",
        }
    }

    fn parse(s: &str) -> Option<Builtin> {
        [Builtin::ParryReflection, Builtin::TixierPoint, Builtin::TixierAntipode]
            .into_iter()
            .find(|b| b.name() == s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CenterSource {
    Formula(Expr),
    Builtin(Builtin),
    /// Point O + t(H - O) on the Euler line.
    Euler(f64),
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct CenterFlags {
    pub circumcircle: bool,
    pub set_m: bool,
    pub set_t: bool,
    pub set_a: bool,
    /// Euler-line parameter, with its rational spelling.
    pub euler: Option<(f64, String)>,
}

impl CenterFlags {
    pub fn shinagawa_constant(&self) -> bool {
        self.euler.is_some()
    }

    pub fn names(&self) -> Vec<String> {
        let mut v = Vec::new();
        if self.circumcircle {
            v.push("circumcircle".to_string());
        }
        if self.set_a {
            v.push("setA".into());
        }
        if self.set_m {
            v.push("setM".into());
        }
        if self.set_t {
            v.push("setT".into());
        }
        if let Some((_, t)) = &self.euler {
            v.push(format!("euler:t={t}"));
        }
        v
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CenterDefinition {
    pub index: u32,
    pub source: CenterSource,
    pub flags: CenterFlags,
    pub text: String,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CenterPoint {
    Finite(Point),
    AtInfinity(Point),
}

impl CenterPoint {
    pub fn finite(self) -> Option<Point> {
        match self {
            CenterPoint::Finite(p) => Some(p),
            CenterPoint::AtInfinity(_) => None,
        }
    }
}

/// Indices every registry must define.
pub fn required_registry() -> BTreeSet<u32> {
    let mut s: BTreeSet<u32> = [
        1, 2, 3, 4, 5, 11, 13, 14, 20, 26, 68, 69, 74, 99, 100, 115, 116, 127, 130, 139, 140, 165, 214, 290, 317,
        338, 339, 372, 373, 376, 381, 382, 399, 402, 476, 477, 486, 487, 491, 577, 586, 591, 615, 631, 632, 640,
        642, 671, 903, 925,
    ]
    .into_iter()
    .collect();
    s.extend(122..=125);
    s.extend(134..=137);
    s.extend(148..=150);
    s.extend(154..=157);
    s.extend(244..=247);
    s.extend(546..=550);
    s.extend(616..=620);
    s.extend(865..=868);
    s
}

fn parse_rational(s: &str) -> Option<f64> {
    match s.split_once('/') {
        Some((n, d)) => {
            let n: i64 = n.trim().parse().ok()?;
            let d: i64 = d.trim().parse().ok()?;
            (d != 0).then(|| n as f64 / d as f64)
        }
        None => s.trim().parse::<i64>().ok().map(|n| n as f64),
    }
}

#[derive(Debug, Clone, Default)]
pub struct Registry {
    defs: BTreeMap<u32, CenterDefinition>,
}

impl Registry {
    /// Parse registry text without the mandatory-set check.
    pub fn parse(text: &str) -> Result<Registry, RegistryError> {
        let mut defs = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let body = raw.trim();
            if body.is_empty() || body.starts_with('#') {
                continue;
            }
            let parts: Vec<&str> = body.split(';').collect();
            if parts.len() != 3 {
                return Err(RegistryError::Syntax { line, message: "expected n;formula;flags".into() });
            }
            let index: u32 = parts[0]
                .trim()
                .parse()
                .ok()
                .filter(|n| *n > 0)
                .ok_or_else(|| RegistryError::Syntax { line, message: format!("bad index '{}'", parts[0]) })?;
            let mut flags = CenterFlags::default();
            for f in parts[2].split(',').map(str::trim).filter(|f| !f.is_empty()) {
                match f {
                    "circumcircle" => flags.circumcircle = true,
                    "setM" => flags.set_m = true,
                    "setT" => flags.set_t = true,
                    "setA" => flags.set_a = true,
                    _ => {
                        let t = f
                            .strip_prefix("euler:t=")
                            .ok_or_else(|| RegistryError::Syntax { line, message: format!("unknown flag '{f}'") })?;
                        let v = parse_rational(t)
                            .ok_or_else(|| RegistryError::Syntax { line, message: format!("bad rational '{t}'") })?;
                        flags.euler = Some((v, t.trim().to_string()));
                    }
                }
            }
            let ftext = parts[1].trim();
            let source = if ftext.is_empty() {
                match &flags.euler {
                    Some((t, _)) => CenterSource::Euler(*t),
                    None => return Err(RegistryError::Syntax { line, message: "empty formula".into() }),
                }
            } else if let Some(name) = ftext.strip_prefix("builtin:") {
                CenterSource::Builtin(
                    Builtin::parse(name.trim())
                        .ok_or_else(|| RegistryError::Syntax { line, message: format!("unknown builtin '{name}'") })?,
                )
            } else {
                CenterSource::Formula(parse_formula(ftext).map_err(|source| RegistryError::Formula { line, source })?)
            };
            let def = CenterDefinition { index, source, flags, text: ftext.to_string() };
            if defs.insert(index, def).is_some() {
                return Err(RegistryError::Duplicate { line, index });
            }
        }
        Ok(Registry { defs })
    }

    /// Parse, require the mandatory set, and cross-check Euler parameters.
    pub fn load(text: &str) -> Result<Registry, RegistryError> {
        let r = Registry::parse(text)?;
        let missing: Vec<u32> = required_registry().into_iter().filter(|n| !r.defs.contains_key(n)).collect();
        if !missing.is_empty() {
            return Err(RegistryError::MissingCenters(missing));
        }
        r.validate_euler()?;
        Ok(r)
    }

    fn validate_euler(&self) -> Result<(), RegistryError> {
        let probes = [
            Triangle::new(Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(0.23, 0.71)),
            Triangle::new(Point::new(-0.4, 0.1), Point::new(0.9, -0.3), Point::new(0.35, 0.52)),
        ];
        for def in self.defs.values() {
            let Some((t, _)) = def.flags.euler else { continue };
            if matches!(def.source, CenterSource::Euler(_)) {
                continue;
            }
            for tri in &probes {
                let direct = self.center_point(def.index, tri).ok().and_then(CenterPoint::finite);
                let line = euler_line_point(tri, t).ok();
                let residual = match (direct, line) {
                    (Some(p), Some(q)) => p.dist(q),
                    _ => f64::INFINITY,
                };
                if residual > 1e-9 * tri.scale() {
                    return Err(RegistryError::EulerMismatch { index: def.index, residual });
                }
            }
        }
        Ok(())
    }

    pub fn get(&self, n: u32) -> Option<&CenterDefinition> {
        self.defs.get(&n)
    }

    pub fn contains(&self, n: u32) -> bool {
        self.defs.contains_key(&n)
    }

    pub fn indices(&self) -> Vec<u32> {
        self.defs.keys().copied().collect()
    }

    pub fn definitions(&self) -> impl Iterator<Item = &CenterDefinition> {
        self.defs.values()
    }

    pub fn len(&self) -> usize {
        self.defs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.defs.is_empty()
    }

    pub fn members(&self, pick: impl Fn(&CenterFlags) -> bool) -> Vec<u32> {
        self.defs.values().filter(|d| pick(&d.flags)).map(|d| d.index).collect()
    }

    pub fn center_point(&self, n: u32, t: &Triangle) -> Result<CenterPoint, CenterError> {
        self.center_point_rel(n, t, DEFAULT_REL)
    }

    pub fn center_point_rel(&self, n: u32, t: &Triangle, rel: f64) -> Result<CenterPoint, CenterError> {
        self.center_point_conditioned(n, t, rel).map(|(p, _)| p)
    }

    /// The center with the condition number of its evaluation (1 for constructions).
    pub fn center_point_conditioned(&self, n: u32, t: &Triangle, rel: f64) -> Result<(CenterPoint, f64), CenterError> {
        let def = self.defs.get(&n).ok_or(CenterError::UnknownCenter(n))?;
        if t.is_degenerate(rel) {
            return Err(CenterError::DegenerateTriangle);
        }
        match &def.source {
            CenterSource::Formula(e) => {
                let ((u, v, w), cond) =
                    barycentric_triple_checked(e, t, INDETERMINATE_REL)?.ok_or(CenterError::Indeterminate(n))?;
                Ok((weights_to_point(t, u, v, w, rel), cond))
            }
            CenterSource::Builtin(b) => Ok((CenterPoint::Finite(builtin_point(*b, t)?), 1.0)),
            CenterSource::Euler(tp) => Ok((CenterPoint::Finite(euler_line_point(t, *tp)?), 1.0)),
        }
    }
}

/// The embedded default registry.
/// Coordinates below this fraction of their magnitude are cancellation noise.
pub const INDETERMINATE_REL: f64 = 1e-12;

pub fn default_registry() -> &'static Registry {
    static REG: OnceLock<Registry> = OnceLock::new();
    REG.get_or_init(|| Registry::load(DEFAULT_REGISTRY).expect("embedded registry is valid"))
}

pub fn weights_to_point(t: &Triangle, u: f64, v: f64, w: f64, rel: f64) -> CenterPoint {
    let m = u.abs().max(v.abs()).max(w.abs());
    let s = u + v + w;
    if !(s.is_finite() && m.is_finite()) || s.abs() <= rel * m {
        return CenterPoint::AtInfinity(t.a * u + t.b * v + t.c * w);
    }
    CenterPoint::Finite((t.a * u + t.b * v + t.c * w) / s)
}

struct Sq {
    a2: f64,
    b2: f64,
    c2: f64,
}

fn squares(t: &Triangle) -> Sq {
    Sq { a2: (t.b - t.c).norm2(), b2: (t.c - t.a).norm2(), c2: (t.a - t.b).norm2() }
}

fn circumcenter(t: &Triangle) -> Result<Point, CenterError> {
    let s = squares(t);
    let f = |a2: f64, b2: f64, c2: f64| a2 * (b2 + c2 - a2);
    point_of(t, f(s.a2, s.b2, s.c2), f(s.b2, s.c2, s.a2), f(s.c2, s.a2, s.b2))
}

fn orthocenter(t: &Triangle) -> Result<Point, CenterError> {
    let s = squares(t);
    let sa = (s.b2 + s.c2 - s.a2) / 2.0;
    let sb = (s.c2 + s.a2 - s.b2) / 2.0;
    let sc = (s.a2 + s.b2 - s.c2) / 2.0;
    point_of(t, sb * sc, sc * sa, sa * sb)
}

fn x110(t: &Triangle) -> Result<Point, CenterError> {
    let s = squares(t);
    let f = |a2: f64, b2: f64, c2: f64| a2 * (c2 - a2) * (a2 - b2);
    point_of(t, f(s.a2, s.b2, s.c2), f(s.b2, s.c2, s.a2), f(s.c2, s.a2, s.b2))
}

fn point_of(t: &Triangle, u: f64, v: f64, w: f64) -> Result<Point, CenterError> {
    t.from_barycentric(u, v, w).filter(|p| p.is_finite()).ok_or(CenterError::DegenerateTriangle)
}

fn builtin_point(b: Builtin, t: &Triangle) -> Result<Point, CenterError> {
    let o = circumcenter(t)?;
    match b {
        Builtin::ParryReflection => Ok(x110(t)? * 2.0 - o),
        Builtin::TixierPoint | Builtin::TixierAntipode => {
            let g = t.centroid();
            if g.dist(o) <= DEFAULT_REL * t.scale() {
                // equilateral: the Euler line is undefined
                return Err(CenterError::DegenerateTriangle);
            }
            let p = reflect_about_line(x110(t)?, o, g);
            Ok(if b == Builtin::TixierPoint { p } else { o * 2.0 - p })
        }
    }
}

/// O + t (H - O).
pub fn euler_line_point(t: &Triangle, param: f64) -> Result<Point, CenterError> {
    if t.is_degenerate(DEFAULT_REL) {
        return Err(CenterError::DegenerateTriangle);
    }
    let o = circumcenter(t)?;
    let h = orthocenter(t)?;
    Ok(o + (h - o) * param)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tri(c: [f64; 6]) -> Triangle {
        Triangle::new(Point::new(c[0], c[1]), Point::new(c[2], c[3]), Point::new(c[4], c[5]))
    }

    fn pt(n: u32, t: &Triangle) -> Point {
        default_registry().center_point(n, t).unwrap().finite().unwrap()
    }

    #[test]
    fn documented_points() {
        assert!(pt(1, &tri([0., 0., 4., 0., 0., 3.])).dist(Point::new(1., 1.)) < 1e-12);
        let t = tri([0., 0., 1., 0., 0., 1.]);
        assert!(pt(2, &t).dist(Point::new(1. / 3., 1. / 3.)) < 1e-12);
        assert!(pt(3, &t).dist(Point::new(0.5, 0.5)) < 1e-12);
        assert!(euler_line_point(&t, 0.0).unwrap().dist(pt(3, &t)) < 1e-12);
    }

    #[test]
    fn embedded_registry_has_mandatory_set() {
        let r = default_registry();
        for n in required_registry() {
            assert!(r.contains(n), "missing {n}");
        }
    }

    #[test]
    fn missing_center_is_reported() {
        let text: String = DEFAULT_REGISTRY.lines().filter(|l| !l.starts_with("591;")).map(|l| format!("{l}\n")).collect();
        assert_eq!(Registry::load(&text).unwrap_err(), RegistryError::MissingCenters(vec![591]));
    }

    #[test]
    fn superset_registry_loads() {
        let mut text = DEFAULT_REGISTRY.to_string();
        for n in 1000..1010 {
            text.push_str(&format!("{n};a^{};\n", n % 5 + 1));
        }
        assert_eq!(Registry::load(&text).unwrap().len(), default_registry().len() + 10);
    }

    #[test]
    fn wrong_euler_parameter_is_rejected() {
        let text = DEFAULT_REGISTRY.replace("2;1;euler:t=1/3", "2;1;euler:t=1/4");
        assert!(matches!(Registry::load(&text), Err(RegistryError::EulerMismatch { index: 2, .. })));
    }

    #[test]
    fn bad_lines_are_rejected() {
        assert!(matches!(Registry::parse("1;a"), Err(RegistryError::Syntax { line: 1, .. })));
        assert!(matches!(Registry::parse("1;a;;\n"), Err(RegistryError::Syntax { .. })));
        assert!(matches!(Registry::parse("1;a;\n1;b;\n"), Err(RegistryError::Duplicate { line: 2, index: 1 })));
        assert!(matches!(Registry::parse("1;a^*b;\n"), Err(RegistryError::Formula { line: 1, .. })));
        assert!(matches!(Registry::parse("1;builtin:nope;\n"), Err(RegistryError::Syntax { .. })));
        assert!(matches!(Registry::parse("1;a;setQ\n"), Err(RegistryError::Syntax { .. })));
        let r = Registry::parse("# comment\n\n7;;euler:t=-1/2\n").unwrap();
        assert_eq!(r.get(7).unwrap().source, CenterSource::Euler(-0.5));
    }

    #[test]
    fn unknown_and_degenerate() {
        let r = default_registry();
        assert_eq!(r.center_point(9999, &tri([0., 0., 1., 0., 0., 1.])), Err(CenterError::UnknownCenter(9999)));
        assert_eq!(r.center_point(1, &tri([0., 0., 1., 0., 2., 0.])), Err(CenterError::DegenerateTriangle));
    }

    #[test]
    fn at_infinity_detection() {
        let t = tri([0., 0., 1., 0., 0., 1.]);
        assert!(matches!(weights_to_point(&t, 1.0, -1.0, 0.0, 1e-9), CenterPoint::AtInfinity(_)));
        assert!(matches!(weights_to_point(&t, 1e12, -1e12, 1.0, 1e-9), CenterPoint::AtInfinity(_)));
        assert!(matches!(weights_to_point(&t, 1.0, 1.0, 1.0, 1e-9), CenterPoint::Finite(_)));
    }
}
