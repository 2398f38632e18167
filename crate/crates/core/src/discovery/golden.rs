//! Embedded result tables and the three-way diff against a scan.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::OnceLock;

use super::scan::ScanRecord;
use super::CenterSpec;
use crate::centers::Registry;
use crate::classify::{closure, inclusive, Extra, Ordering, Shape};
use crate::quads::QuadType;
use crate::radiators::RadiatorKind;

pub const GOLDEN: &str = include_str!("../../data/golden.txt");

#[derive(Debug, Clone, PartialEq)]
pub struct GoldenRow {
    pub quad_type: QuadType,
    pub radiator: RadiatorKind,
    pub shape: Shape,
    pub ordering: Ordering,
    pub centers: CenterSpec,
    pub extras: Vec<Extra>,
}

impl GoldenRow {
    pub fn expected(&self) -> String {
        let mut s = if self.ordering == Ordering::Fghi {
            self.shape.name().to_string()
        } else {
            format!("{}@{}", self.shape.name(), self.ordering.name())
        };
        for e in &self.extras {
            s.push('+');
            s.push_str(e.name());
        }
        s
    }
}

pub fn parse_golden(text: &str) -> Result<Vec<GoldenRow>, String> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |m: String| format!("line {}: {m}", i + 1);
        let f: Vec<&str> = line.split(';').map(str::trim).collect();
        if !(4..=5).contains(&f.len()) {
            return Err(err("expected 4 or 5 fields".into()));
        }
        let (shape, ordering) = match f[2].split_once('@') {
            Some((s, o)) => (s, o.parse::<Ordering>().map_err(err)?),
            None => (f[2], Ordering::Fghi),
        };
        out.push(GoldenRow {
            quad_type: f[0].parse().map_err(|e| err(format!("{e}")))?,
            radiator: f[1].parse().map_err(|e| err(format!("{e}")))?,
            shape: shape.parse().map_err(err)?,
            ordering,
            centers: f[3].parse().map_err(err)?,
            extras: match f.get(4) {
                Some(x) => x.split_whitespace().map(|e| e.parse::<Extra>()).collect::<Result<_, _>>().map_err(err)?,
                None => Vec::new(),
            },
        });
    }
    Ok(out)
}

pub fn golden_rows() -> &'static [GoldenRow] {
    static ROWS: OnceLock<Vec<GoldenRow>> = OnceLock::new();
    ROWS.get_or_init(|| parse_golden(GOLDEN).expect("embedded tables are valid"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum DiffStatus {
    Confirmed,
    Missing,
    Degenerate,
    NotScanned,
}

impl fmt::Display for DiffStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DiffStatus::Confirmed => "confirmed",
            DiffStatus::Missing => "missing",
            DiffStatus::Degenerate => "degenerate",
            DiffStatus::NotScanned => "not scanned",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiffEntry {
    pub quad_type: QuadType,
    pub radiator: RadiatorKind,
    pub center: u32,
    pub expected: String,
    pub numeric_only: bool,
    pub status: DiffStatus,
}

/// A confirmed shape the tables do not mention.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtraFinding {
    pub quad_type: String,
    pub radiator: String,
    pub center: u32,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct DiffReport {
    pub entries: Vec<DiffEntry>,
    pub extras: Vec<ExtraFinding>,
}

impl DiffReport {
    pub fn count(&self, s: DiffStatus) -> usize {
        self.entries.iter().filter(|e| e.status == s).count()
    }

    pub fn missing(&self) -> impl Iterator<Item = &DiffEntry> {
        self.entries.iter().filter(|e| e.status == DiffStatus::Missing)
    }
}

/// Everything a record establishes in ordering `o`, under the inclusive reading.
fn established(rec: &ScanRecord, o: Ordering) -> BTreeSet<Shape> {
    let by = rec.shapes_by_ordering();
    let mut out = inclusive(&closure(&by[&Ordering::Fghi]));
    if o != Ordering::Fghi {
        out.extend(inclusive(&closure(&by[&Ordering::Fgih])));
        if o == Ordering::Fhgi {
            out.extend(inclusive(&closure(&by[&Ordering::Fhgi])));
        }
    }
    out
}

type Key = (String, String, u32);

pub fn golden_table_diff(records: &[ScanRecord], reg: &Registry) -> DiffReport {
    let index: BTreeMap<Key, &ScanRecord> =
        records.iter().map(|r| ((r.quad_type.clone(), r.radiator.clone(), r.center), r)).collect();
    let mut report = DiffReport::default();
    let mut expected_at: BTreeMap<Key, Vec<Shape>> = BTreeMap::new();

    for row in golden_rows() {
        let candidates: Vec<QuadType> = std::iter::once(row.quad_type).chain(row.quad_type.ancestors()).collect();
        for (n, numeric_only) in row.centers.expand(reg) {
            let key = (row.quad_type.name().to_string(), row.radiator.name().to_string(), n);
            expected_at.entry(key.clone()).or_default().push(row.shape);
            let status = match index.get(&key) {
                None => DiffStatus::NotScanned,
                Some(own) if own.dropped() => DiffStatus::Degenerate,
                Some(_) => {
                    let recs: Vec<&ScanRecord> = candidates
                        .iter()
                        .filter_map(|t| index.get(&(t.name().to_string(), row.radiator.name().to_string(), n)).copied())
                        .filter(|r| !r.dropped())
                        .collect();
                    let shape_ok = recs.iter().any(|r| established(r, row.ordering).contains(&row.shape));
                    let extras_ok =
                        row.extras.iter().all(|e| recs.iter().any(|r| r.extras.iter().any(|x| x == e.name())));
                    if shape_ok && extras_ok {
                        DiffStatus::Confirmed
                    } else {
                        DiffStatus::Missing
                    }
                }
            };
            report.entries.push(DiffEntry {
                quad_type: row.quad_type,
                radiator: row.radiator,
                center: n,
                expected: row.expected(),
                numeric_only,
                status,
            });
        }
    }

    let cells: BTreeSet<(String, String)> =
        golden_rows().iter().map(|r| (r.quad_type.name().to_string(), r.radiator.name().to_string())).collect();
    for rec in records {
        if rec.dropped() || !cells.contains(&(rec.quad_type.clone(), rec.radiator.clone())) {
            continue;
        }
        let expected = expected_at.get(&(rec.quad_type.clone(), rec.radiator.clone(), rec.center));
        for label in &rec.shapes {
            let name = label.split('@').next().unwrap_or(label);
            let Ok(s) = name.parse::<Shape>() else { continue };
            let related = expected.is_some_and(|ex| {
                ex.iter().any(|e| {
                    let one = |x: Shape| inclusive(&closure(&BTreeSet::from([x])));
                    one(s).contains(e) || one(*e).contains(&s)
                })
            });
            if !related {
                report.extras.push(ExtraFinding {
                    quad_type: rec.quad_type.clone(),
                    radiator: rec.radiator.clone(),
                    center: rec.center,
                    label: label.clone(),
                });
            }
        }
    }
    report
}
