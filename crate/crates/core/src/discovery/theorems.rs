//! The regression catalog of discovered theorems and its verifier.

use std::sync::OnceLock;

use rand::Rng;
use rayon::prelude::*;
use thiserror::Error;

use super::{run_pipeline, CenterSpec, Check, Instance, PipelineError};
use crate::centers::Registry;
use crate::classify::classify;
use crate::geom::{Point, Tolerance};
use crate::quads::{generate, seeded, QuadType, Quadrilateral, SeededRng};
use crate::radiators::{place, sub_quadrilateral_centers, RadiatorKind};

pub const CATALOG: &str = include_str!("../../data/theorems.txt");

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Proven,
    NumericOnly,
}

impl Status {
    pub fn name(self) -> &'static str {
        match self {
            Status::Proven => "proven",
            Status::NumericOnly => "numeric",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CenterSelection {
    Triangle(CenterSpec),
    /// Centers of the sub-quadrilaterals EBCD, EACD, EABD, EABC.
    SubQuad(RadiatorKind),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Clause {
    pub quad_type: QuadType,
    pub radiator: RadiatorKind,
    pub centers: CenterSelection,
    pub checks: Vec<Check>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TheoremCase {
    pub id: String,
    pub status: Status,
    pub clauses: Vec<Clause>,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CatalogError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("unknown theorem '{0}'")]
    UnknownTheorem(String),
}

pub fn parse_catalog(text: &str) -> Result<Vec<TheoremCase>, CatalogError> {
    let mut out: Vec<TheoremCase> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |message: String| CatalogError::Syntax { line: i + 1, message };
        let f: Vec<&str> = line.split(';').map(str::trim).collect();
        if f.len() != 6 {
            return Err(err(format!("expected 6 fields, got {}", f.len())));
        }
        let status = match f[1] {
            "proven" => Status::Proven,
            "numeric" => Status::NumericOnly,
            s => return Err(err(format!("bad status '{s}'"))),
        };
        let quad_type: QuadType = f[2].parse().map_err(|e| err(format!("{e}")))?;
        let radiator: RadiatorKind = f[3].parse().map_err(|e| err(format!("{e}")))?;
        let centers = match f[4].strip_prefix("quad:") {
            Some(k) => CenterSelection::SubQuad(k.parse().map_err(|e| err(format!("{e}")))?),
            None => CenterSelection::Triangle(f[4].parse().map_err(err)?),
        };
        let checks = f[5].split_whitespace().map(|c| c.parse::<Check>()).collect::<Result<Vec<_>, _>>().map_err(err)?;
        if checks.is_empty() {
            return Err(err("no checks".into()));
        }
        let clause = Clause { quad_type, radiator, centers, checks };
        match out.last_mut() {
            Some(last) if last.id == f[0] => {
                if last.status != status {
                    return Err(err("status differs between clauses".into()));
                }
                last.clauses.push(clause);
            }
            _ => {
                if out.iter().any(|c| c.id == f[0]) {
                    return Err(err(format!("theorem '{}' split across the catalog", f[0])));
                }
                out.push(TheoremCase { id: f[0].to_string(), status, clauses: vec![clause] });
            }
        }
    }
    Ok(out)
}

pub fn catalog() -> &'static [TheoremCase] {
    static CAT: OnceLock<Vec<TheoremCase>> = OnceLock::new();
    CAT.get_or_init(|| parse_catalog(CATALOG).expect("embedded catalog is valid"))
}

/// Look up a theorem by id, with or without the `thm:` prefix.
pub fn find(id: &str) -> Option<&'static TheoremCase> {
    let bare = id.strip_prefix("thm:").unwrap_or(id);
    catalog().iter().find(|c| c.id == bare)
}

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub samples: usize,
    pub seed: u64,
    pub tolerance: Tolerance,
    /// Move vertex D off the reference type by this fraction of the scale.
    pub perturb: Option<f64>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { samples: 10, seed: 0, tolerance: Tolerance::default(), perturb: None }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TheoremResult {
    pub id: String,
    pub status: Status,
    pub passed: bool,
    /// Instances checked (per center).
    pub instances: usize,
    pub max_residual: f64,
    pub failures: Vec<String>,
    /// Centers skipped from a set or `all` because most of their instances degenerate.
    pub skipped: Vec<u32>,
}

fn reference(clause: &Clause, opts: &VerifyOptions, rng: &mut SeededRng) -> Option<(Quadrilateral, Point)> {
    for _ in 0..50 {
        let Ok(mut q) = generate(clause.quad_type, rng) else { continue };
        if let Some(eps) = opts.perturb {
            let ang: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            let s = q.scale() * eps;
            q.v[3] = q.v[3] + Point::new(ang.cos(), ang.sin()) * s;
            if !q.is_convex() {
                continue;
            }
        }
        if let Ok(e) = place(clause.radiator, &q, rng) {
            return Some((q, e));
        }
    }
    None
}

enum UnitOutcome {
    Checked { max_residual: f64, failures: Vec<String> },
    Skipped(u32),
}

fn verify_unit(reg: &Registry, clause: &Clause, n: Option<u32>, skip_degenerate: bool, stream: u64, opts: &VerifyOptions) -> UnitOutcome {
    let mut rng = seeded(opts.seed);
    rng.set_stream(stream);
    let rel = opts.tolerance.rel;
    let label = n.map(|n| format!("X({n})")).unwrap_or_else(|| "sub-quadrilateral centers".into());
    let mut worst = 0.0f64;
    let mut failures = Vec::new();
    let mut degenerate = 0;
    for s in 0..opts.samples {
        let Some((q, e)) = reference(clause, opts, &mut rng) else {
            failures.push(format!("{label}: could not build instance {s}"));
            continue;
        };
        let pts = match (&clause.centers, n) {
            (CenterSelection::SubQuad(kind), _) => match sub_quadrilateral_centers(&q, e, *kind) {
                Ok(p) => p,
                Err(err) => {
                    failures.push(format!("{label}: instance {s}: {err}"));
                    continue;
                }
            },
            (_, Some(n)) => match run_pipeline(reg, &q, e, n, rel) {
                Ok(p) => p,
                Err(PipelineError::Degenerate | PipelineError::IllConditioned) => {
                    degenerate += 1;
                    continue;
                }
                Err(err) => {
                    failures.push(format!("{label}: {err}"));
                    continue;
                }
            },
            _ => unreachable!("triangle clauses always carry a center"),
        };
        let report = classify(pts, Some((&q, e)), &opts.tolerance);
        let needs_shape = clause.checks.iter().any(|c| matches!(c, Check::Shape(..) | Check::Extra(_)));
        if needs_shape && report.is_degenerate() {
            degenerate += 1;
            continue;
        }
        let inst = Instance { q, e, pts, report };
        for c in &clause.checks {
            let r = c.evaluate(&inst, rel);
            if r.residual.is_finite() {
                worst = worst.max(r.residual);
            }
            if !r.holds {
                failures.push(format!("{label}: instance {s}: {c} fails (residual {:.3e})", r.residual));
            }
        }
    }
    if 2 * degenerate > opts.samples {
        match n {
            Some(n) if skip_degenerate => return UnitOutcome::Skipped(n),
            _ => failures.push(format!("{label}: {degenerate} of {} instances degenerate", opts.samples)),
        }
    }
    UnitOutcome::Checked { max_residual: worst, failures }
}

/// Verify one catalog entry.
pub fn verify_case(case: &TheoremCase, reg: &Registry, opts: &VerifyOptions) -> TheoremResult {
    let case_index = catalog().iter().position(|c| c.id == case.id).unwrap_or(catalog().len()) as u64;
    let mut units: Vec<(usize, Option<u32>, bool)> = Vec::new();
    let mut failures = Vec::new();
    for (ci, clause) in case.clauses.iter().enumerate() {
        match &clause.centers {
            CenterSelection::SubQuad(_) => units.push((ci, None, false)),
            CenterSelection::Triangle(spec) => {
                let explicit = spec.explicit();
                let expanded = spec.expand(reg);
                if expanded.is_empty() {
                    failures.push(format!("clause {ci}: no registered centers"));
                }
                for (n, _) in expanded {
                    if reg.contains(n) {
                        units.push((ci, Some(n), !explicit.contains(&n)));
                    } else {
                        failures.push(format!("X({n}) is not registered"));
                    }
                }
            }
        }
    }
    let outcomes: Vec<UnitOutcome> = units
        .par_iter()
        .map(|(ci, n, all)| {
            let stream = (case_index << 32) | ((*ci as u64) << 24) | n.unwrap_or(0) as u64;
            verify_unit(reg, &case.clauses[*ci], *n, *all, stream, opts)
        })
        .collect();
    let mut max_residual = 0.0f64;
    let mut skipped = Vec::new();
    let mut checked = 0;
    for o in outcomes {
        match o {
            UnitOutcome::Checked { max_residual: m, failures: f } => {
                checked += 1;
                max_residual = max_residual.max(m);
                failures.extend(f);
            }
            UnitOutcome::Skipped(n) => skipped.push(n),
        }
    }
    if checked == 0 {
        failures.push("nothing was checked".into());
    }
    TheoremResult {
        id: case.id.clone(),
        status: case.status,
        passed: failures.is_empty(),
        instances: opts.samples,
        max_residual,
        failures,
        skipped,
    }
}

/// Verify the named theorems, or the whole catalog when `ids` is `None`.
pub fn verify_theorems(ids: Option<&[String]>, reg: &Registry, opts: &VerifyOptions) -> Result<Vec<TheoremResult>, CatalogError> {
    let cases: Vec<&TheoremCase> = match ids {
        None => catalog().iter().collect(),
        Some(ids) => ids.iter().map(|id| find(id).ok_or_else(|| CatalogError::UnknownTheorem(id.clone()))).collect::<Result<_, _>>()?,
    };
    Ok(cases.iter().map(|c| verify_case(c, reg, opts)).collect())
}
