//! Sweeps over (type, radiator, center) cells with unanimity confirmation and ancestor suppression.

use std::collections::{BTreeMap, BTreeSet};
use std::io::{Read, Write};

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{radiator_applies, radiator_index, round15, run_pipeline, type_index, PipelineError};
use crate::centers::Registry;
use crate::classify::{classify, inclusive, most_specific_of, Extra, Ordering, Shape, ShapeReport};
use crate::geom::{Point, Tolerance};
use crate::quads::{generate, seeded, QuadType, Quadrilateral};
use crate::radiators::{place, RadiatorKind};

#[derive(Debug, Error)]
pub enum ScanError {
    #[error("missing centers: {0:?}")]
    MissingCenters(Vec<u32>),
    #[error("invalid scan configuration: {0}")]
    InvalidConfig(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("bad record: {0}")]
    BadRecord(String),
}

#[derive(Debug, Clone)]
pub struct ScanConfig {
    pub types: Vec<QuadType>,
    pub radiators: Vec<RadiatorKind>,
    pub centers: Vec<u32>,
    pub samples: usize,
    pub seed: u64,
    pub tolerance: Tolerance,
}

impl ScanConfig {
    pub fn new(types: Vec<QuadType>, radiators: Vec<RadiatorKind>, centers: Vec<u32>) -> Self {
        ScanConfig { types, radiators, centers, samples: 10, seed: 0, tolerance: Tolerance::default() }
    }

    pub fn validate(&self, reg: &Registry) -> Result<(), ScanError> {
        if self.samples < 3 {
            return Err(ScanError::InvalidConfig(format!("samples must be at least 3, got {}", self.samples)));
        }
        if !(self.tolerance.rel > 0.0 && self.tolerance.rel < 1.0) {
            return Err(ScanError::InvalidConfig(format!("tolerance {} out of range", self.tolerance.rel)));
        }
        let missing: Vec<u32> = self.centers.iter().copied().filter(|n| !reg.contains(*n)).collect();
        if !missing.is_empty() {
            return Err(ScanError::MissingCenters(missing));
        }
        Ok(())
    }
}

/// One scanned cell. Shapes outside the primary ordering are written `name@ORDERING`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRecord {
    #[serde(rename = "type")]
    pub quad_type: String,
    pub radiator: String,
    pub center: u32,
    pub shapes: Vec<String>,
    pub extras: Vec<String>,
    pub samples: usize,
    pub degenerate: usize,
    pub max_residual: f64,
}

impl ScanRecord {
    /// More than half the samples were degenerate, so nothing is reported.
    pub fn dropped(&self) -> bool {
        2 * self.degenerate > self.samples
    }

    pub fn samples_used(&self) -> usize {
        self.samples - self.degenerate
    }

    /// Labels split per ordering.
    pub fn shapes_by_ordering(&self) -> BTreeMap<Ordering, BTreeSet<Shape>> {
        let mut out: BTreeMap<Ordering, BTreeSet<Shape>> = Ordering::ALL.iter().map(|o| (*o, BTreeSet::new())).collect();
        for label in &self.shapes {
            let (name, ord) = match label.split_once('@') {
                Some((n, o)) => (n, o.parse().unwrap_or(Ordering::Fghi)),
                None => (label.as_str(), Ordering::Fghi),
            };
            if let Ok(s) = name.parse::<Shape>() {
                out.entry(ord).or_default().insert(s);
            }
        }
        out
    }
}

struct Sample {
    q: Quadrilateral,
    e: Point,
}

fn group_samples(t: QuadType, r: RadiatorKind, cfg: &ScanConfig) -> Vec<Option<Sample>> {
    let mut rng = seeded(cfg.seed);
    rng.set_stream((type_index(t) << 8) | radiator_index(r));
    (0..cfg.samples)
        .map(|_| {
            for _ in 0..20 {
                let q = generate(t, &mut rng).ok()?;
                if let Ok(e) = place(r, &q, &mut rng) {
                    return Some(Sample { q, e });
                }
                // keep the stream moving so retries differ
                let _: u64 = rng.gen();
            }
            None
        })
        .collect()
}

struct Confirmed {
    per_ordering: BTreeMap<Ordering, BTreeSet<Shape>>,
    extras: BTreeSet<Extra>,
}

fn confirm(reports: &[ShapeReport]) -> Confirmed {
    let mut per_ordering: BTreeMap<Ordering, BTreeSet<Shape>> = BTreeMap::new();
    for o in Ordering::ALL {
        let mut acc: Option<BTreeSet<Shape>> = None;
        for rep in reports {
            let h = rep.ordering(o).map(|x| x.holding()).unwrap_or_default();
            acc = Some(match acc {
                None => h,
                Some(a) => a.intersection(&h).copied().collect(),
            });
        }
        per_ordering.insert(o, drop_unsettled_tangency(acc.unwrap_or_default()));
    }
    let mut extras: Option<BTreeSet<Extra>> = None;
    for rep in reports {
        let h: BTreeSet<Extra> = rep.extras.iter().filter(|(_, r)| r.holds).map(|(e, _)| *e).collect();
        extras = Some(match extras {
            None => h,
            Some(a) => a.intersection(&h).copied().collect(),
        });
    }
    Confirmed { per_ordering, extras: extras.unwrap_or_default() }
}

/// A kite meets Pitot identically, so its tangency is just convexity, an open condition that
/// unanimity over samples cannot settle. Rhombi and cyclic kites are convex outright.
fn drop_unsettled_tangency(mut set: BTreeSet<Shape>) -> BTreeSet<Shape> {
    if set.contains(&Shape::Kite) && !set.contains(&Shape::Rhombus) && !set.contains(&Shape::Cyclic) {
        set.retain(|s| !inclusive(&BTreeSet::from([*s])).contains(&Shape::Tangential));
    }
    set
}

/// Most specific shapes per ordering, skipping shapes of the crossed orderings already explained by earlier ones.
/// A parallel pair in FGHI accounts for everything the crossed orderings show, so they are skipped then.
fn labels(c: &Confirmed) -> Vec<(Shape, Ordering)> {
    let mut out = Vec::new();
    let mut seen: BTreeSet<Shape> = BTreeSet::new();
    for o in Ordering::ALL {
        if o != Ordering::Fghi && seen.contains(&Shape::Trapezoid) {
            break;
        }
        let set = &c.per_ordering[&o];
        for s in most_specific_of(set) {
            if o == Ordering::Fghi || !seen.contains(&s) {
                out.push((s, o));
            }
        }
        seen.extend(inclusive(set));
    }
    out
}

fn label_text(s: Shape, o: Ordering) -> String {
    if o == Ordering::Fghi {
        s.name().to_string()
    } else {
        format!("{}@{}", s.name(), o.name())
    }
}

fn scan_cell(reg: &Registry, t: QuadType, r: RadiatorKind, n: u32, samples: &[Option<Sample>], tol: &Tolerance) -> ScanRecord {
    let mut reports = Vec::new();
    let mut degenerate = 0;
    for s in samples {
        let Some(s) = s else {
            degenerate += 1;
            continue;
        };
        match run_pipeline(reg, &s.q, s.e, n, tol.rel) {
            Ok(pts) => {
                let rep = classify(pts, Some((&s.q, s.e)), tol);
                if rep.is_degenerate() {
                    degenerate += 1;
                } else {
                    reports.push(rep);
                }
            }
            Err(PipelineError::Degenerate | PipelineError::IllConditioned) => degenerate += 1,
            Err(PipelineError::Center(_)) => degenerate += 1,
        }
    }
    let mut rec = ScanRecord {
        quad_type: t.name().into(),
        radiator: r.name().into(),
        center: n,
        shapes: Vec::new(),
        extras: Vec::new(),
        samples: samples.len(),
        degenerate,
        max_residual: 0.0,
    };
    if rec.dropped() || reports.is_empty() {
        return rec;
    }
    let c = confirm(&reports);
    let labs = labels(&c);
    let mut worst = 0.0f64;
    for rep in &reports {
        for (s, o) in &labs {
            if let Some(x) = rep.ordering(*o) {
                worst = worst.max(x.get(*s).residual);
            }
        }
        for e in &c.extras {
            if let Some(x) = rep.extra(*e) {
                worst = worst.max(x.residual);
            }
        }
    }
    rec.shapes = labs.iter().map(|(s, o)| label_text(*s, *o)).collect();
    rec.extras = c.extras.iter().map(|e| e.name().to_string()).collect();
    rec.max_residual = round15(worst);
    rec
}

/// Remove labels already confirmed for an ancestor type at the same radiator and center.
pub fn suppress_ancestors(records: &mut [ScanRecord]) {
    type Labels = (BTreeSet<String>, BTreeSet<String>);
    let index: BTreeMap<(String, String, u32), Labels> = records
        .iter()
        .map(|r| {
            ((r.quad_type.clone(), r.radiator.clone(), r.center), (r.shapes.iter().cloned().collect(), r.extras.iter().cloned().collect()))
        })
        .collect();
    for rec in records.iter_mut() {
        let Ok(t) = rec.quad_type.parse::<QuadType>() else { continue };
        for a in t.ancestors() {
            if let Some((shapes, extras)) = index.get(&(a.name().to_string(), rec.radiator.clone(), rec.center)) {
                rec.shapes.retain(|s| !shapes.contains(s));
                rec.extras.retain(|e| !extras.contains(e));
            }
        }
    }
}

/// Run a scan. Output order is canonical (type, radiator, center) regardless of thread count.
pub fn scan(cfg: &ScanConfig, reg: &Registry) -> Result<Vec<ScanRecord>, ScanError> {
    cfg.validate(reg)?;
    let mut types = cfg.types.clone();
    types.sort_by_key(|t| type_index(*t));
    types.dedup();
    let mut rads = cfg.radiators.clone();
    rads.sort_by_key(|r| radiator_index(*r));
    rads.dedup();
    let mut centers = cfg.centers.clone();
    centers.sort();
    centers.dedup();

    let groups: Vec<(QuadType, RadiatorKind)> =
        types.iter().flat_map(|t| rads.iter().map(move |r| (*t, *r))).filter(|(t, r)| radiator_applies(*r, *t)).collect();
    let samples: Vec<Vec<Option<Sample>>> = groups.par_iter().map(|(t, r)| group_samples(*t, *r, cfg)).collect();
    let cells: Vec<(usize, u32)> = (0..groups.len()).flat_map(|g| centers.iter().map(move |n| (g, *n))).collect();
    let mut records: Vec<ScanRecord> = cells
        .par_iter()
        .map(|(g, n)| {
            let (t, r) = groups[*g];
            scan_cell(reg, t, r, *n, &samples[*g], &cfg.tolerance)
        })
        .collect();
    suppress_ancestors(&mut records);
    Ok(records)
}

const HEADER: [&str; 8] = ["type", "radiator", "center", "shapes", "extras", "samples", "degenerate", "max_residual"];

pub fn format_number(x: f64) -> String {
    format!("{x:.14e}")
}

pub fn write_csv<W: Write>(records: &[ScanRecord], w: W) -> Result<(), ScanError> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(HEADER)?;
    for r in records {
        wr.write_record([
            r.quad_type.clone(),
            r.radiator.clone(),
            r.center.to_string(),
            r.shapes.join(" "),
            r.extras.join(" "),
            r.samples.to_string(),
            r.degenerate.to_string(),
            format_number(r.max_residual),
        ])?;
    }
    wr.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(r: R) -> Result<Vec<ScanRecord>, ScanError> {
    let mut rd = csv::Reader::from_reader(r);
    let headers = rd.headers()?.clone();
    if headers.iter().collect::<Vec<_>>() != HEADER {
        return Err(ScanError::BadRecord(format!("unexpected header {:?}", headers)));
    }
    let split = |s: &str| s.split_whitespace().map(String::from).collect::<Vec<_>>();
    let num = |s: &str, what: &str| s.parse::<usize>().map_err(|_| ScanError::BadRecord(format!("bad {what} '{s}'")));
    let mut out = Vec::new();
    for row in rd.records() {
        let row = row?;
        out.push(ScanRecord {
            quad_type: row[0].to_string(),
            radiator: row[1].to_string(),
            center: row[2].parse().map_err(|_| ScanError::BadRecord(format!("bad center '{}'", &row[2])))?,
            shapes: split(&row[3]),
            extras: split(&row[4]),
            samples: num(&row[5], "samples")?,
            degenerate: num(&row[6], "degenerate")?,
            max_residual: row[7].parse().map_err(|_| ScanError::BadRecord(format!("bad residual '{}'", &row[7])))?,
        });
    }
    Ok(out)
}

pub fn write_json<W: Write>(records: &[ScanRecord], mut w: W) -> Result<(), ScanError> {
    serde_json::to_writer_pretty(&mut w, records)?;
    writeln!(w)?;
    Ok(())
}

pub fn read_json<R: Read>(r: R) -> Result<Vec<ScanRecord>, ScanError> {
    Ok(serde_json::from_reader(r)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::centers::default_registry;

    fn small() -> ScanConfig {
        let mut c = ScanConfig::new(vec![QuadType::General], vec![RadiatorKind::Arbitrary], (1..=5).collect());
        c.seed = 7;
        c
    }

    #[test]
    fn centroid_row_is_parallelogram() {
        let recs = scan(&small(), default_registry()).unwrap();
        let two = recs.iter().find(|r| r.center == 2).unwrap();
        assert_eq!(two.shapes, vec!["parallelogram".to_string()]);
        for r in recs.iter().filter(|r| r.center != 2) {
            assert!(r.shapes.is_empty(), "{r:?}");
        }
    }

    #[test]
    fn rejects_bad_configs() {
        let mut c = small();
        c.samples = 2;
        assert!(matches!(scan(&c, default_registry()), Err(ScanError::InvalidConfig(_))));
        let mut c = small();
        c.centers = vec![2, 999];
        assert!(matches!(scan(&c, default_registry()), Err(ScanError::MissingCenters(v)) if v == vec![999]));
    }

    #[test]
    fn csv_and_json_round_trip() {
        let recs = scan(&small(), default_registry()).unwrap();
        let mut csv_buf = Vec::new();
        write_csv(&recs, &mut csv_buf).unwrap();
        assert_eq!(read_csv(csv_buf.as_slice()).unwrap(), recs);
        let mut json_buf = Vec::new();
        write_json(&recs, &mut json_buf).unwrap();
        assert_eq!(read_json(json_buf.as_slice()).unwrap(), recs);
    }

    #[test]
    fn suppression_uses_ancestor_records() {
        let rec = |t: &str, s: &[&str]| ScanRecord {
            quad_type: t.into(),
            radiator: "arbitrary".into(),
            center: 2,
            shapes: s.iter().map(|x| x.to_string()).collect(),
            extras: vec![],
            samples: 10,
            degenerate: 0,
            max_residual: 0.0,
        };
        let mut v = vec![rec("general", &["parallelogram"]), rec("parallelogram", &["parallelogram"]), rec("rectangle", &["rhombus"])];
        suppress_ancestors(&mut v);
        assert_eq!(v[0].shapes, vec!["parallelogram"]);
        assert!(v[1].shapes.is_empty());
        assert_eq!(v[2].shapes, vec!["rhombus"]);
    }
}
