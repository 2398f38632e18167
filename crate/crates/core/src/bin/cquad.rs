use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use central_quad::centers::{default_registry, CenterPoint, CenterSource, Registry, RegistryError};
use central_quad::classify::classify;
use central_quad::discovery::golden::{golden_table_diff, DiffStatus};
use central_quad::discovery::scan::{read_csv, read_json, scan, write_csv, write_json, ScanConfig, ScanError};
use central_quad::discovery::theorems::{verify_theorems, VerifyOptions};
use central_quad::discovery::{round15, CenterSpec};
use central_quad::geom::{Point, Tolerance, Triangle, DEFAULT_REL};
use central_quad::quads::{generate, seeded, QuadType, Quadrilateral};
use central_quad::radiators::RadiatorKind;

#[derive(Parser)]
#[command(name = "cquad", version, about = "Central quadrilaterals of triangle centers")]
struct Cli {
    /// Worker threads for scans and verification (default: available parallelism).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Center registry file replacing the embedded one.
    #[arg(long, global = true)]
    registry: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate random quadrilaterals of a type.
    Gen(GenArgs),
    /// List or evaluate triangle centers.
    Centers(CentersArgs),
    /// Classify four points, optionally against a reference quadrilateral and radiator.
    Classify(ClassifyArgs),
    /// Scan (type, radiator, center) cells.
    Scan(ScanArgs),
    /// Verify cataloged theorems.
    Verify(VerifyArgs),
    /// Compare a scan against the embedded result tables.
    Diff(DiffArgs),
}

#[derive(Args)]
struct GenArgs {
    #[arg(long = "type")]
    quad_type: String,
    #[arg(long, default_value_t = 1)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CentersArgs {
    #[arg(long, conflicts_with = "eval")]
    list: bool,
    #[arg(long, requires = "triangle")]
    eval: Option<u32>,
    /// x1,y1,x2,y2,x3,y3
    #[arg(long, allow_hyphen_values = true)]
    triangle: Option<String>,
}

#[derive(Args)]
struct ClassifyArgs {
    /// Eight reals: F, G, H, I.
    #[arg(long, allow_hyphen_values = true)]
    points: String,
    /// Ten reals: A, B, C, D and the radiator E.
    #[arg(long = "ref", allow_hyphen_values = true)]
    reference: Option<String>,
    #[arg(long, default_value_t = DEFAULT_REL)]
    tol: f64,
}

#[derive(Args)]
struct ScanArgs {
    /// Comma-separated types, or `all`.
    #[arg(long, default_value = "all")]
    types: String,
    /// Comma-separated radiators, or `all`.
    #[arg(long, default_value = "all")]
    radiators: String,
    /// Center list such as `1..10`, `2,148-150`, or `all`.
    #[arg(long, default_value = "all")]
    centers: String,
    #[arg(long, default_value_t = 10)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_REL)]
    tol: f64,
    /// Output file; the extension picks csv or json. Defaults to csv on stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Theorem id (with or without `thm:`), or `all`.
    #[arg(long, default_value = "all")]
    theorem: Vec<String>,
    #[arg(long, default_value_t = 10)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_REL)]
    tol: f64,
}

#[derive(Args)]
struct DiffArgs {
    #[arg(long)]
    scan: PathBuf,
    #[arg(long, default_value = "builtin")]
    golden: String,
    /// Print every entry, not just the missing ones.
    #[arg(long)]
    verbose: bool,
}

enum Failure {
    Usage(String),
    Verify(String),
    Missing(Vec<u32>),
    Io(String),
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

impl From<ScanError> for Failure {
    fn from(e: ScanError) -> Self {
        match e {
            ScanError::MissingCenters(v) => Failure::Missing(v),
            ScanError::InvalidConfig(m) => Failure::Usage(m),
            other => Failure::Io(other.to_string()),
        }
    }
}

fn fmt(x: f64) -> String {
    format!("{}", round15(x))
}

fn parse_reals(s: &str, n: usize) -> Result<Vec<f64>, Failure> {
    let v: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| Failure::Usage(format!("expected {n} comma-separated reals, got '{s}'")))?;
    if v.len() != n || v.iter().any(|x| !x.is_finite()) {
        return Err(Failure::Usage(format!("expected {n} finite reals, got '{s}'")));
    }
    Ok(v)
}

fn load_registry(path: Option<&Path>) -> Result<Registry, Failure> {
    match path {
        None => Ok(default_registry().clone()),
        Some(p) => {
            let text = std::fs::read_to_string(p)?;
            Registry::load(&text).map_err(|e| match e {
                RegistryError::MissingCenters(v) => Failure::Missing(v),
                other => Failure::Usage(format!("{}: {other}", p.display())),
            })
        }
    }
}

fn open_out(out: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn run_gen(a: &GenArgs) -> Result<(), Failure> {
    let t: QuadType = a.quad_type.parse().map_err(|e| Failure::Usage(format!("{e}")))?;
    let mut quads = Vec::new();
    for i in 0..a.count {
        let seed = a.seed.wrapping_add(i as u64);
        let q = generate(t, &mut seeded(seed)).map_err(|e| Failure::Verify(e.to_string()))?;
        quads.push(json!({
            "type": t.name(),
            "seed": seed,
            "vertices": q.v.iter().map(|p| [round15(p.x), round15(p.y)]).collect::<Vec<_>>(),
            "residual": round15(q.check_type(t)),
        }));
    }
    let mut w = open_out(a.out.as_deref())?;
    serde_json::to_writer_pretty(&mut w, &quads).map_err(|e| Failure::Io(e.to_string()))?;
    writeln!(w)?;
    Ok(())
}

fn run_centers(a: &CentersArgs, reg: &Registry) -> Result<(), Failure> {
    let mut out = io::stdout().lock();
    if let Some(n) = a.eval {
        let c = parse_reals(a.triangle.as_deref().unwrap_or_default(), 6)?;
        let t = Triangle::new(Point::new(c[0], c[1]), Point::new(c[2], c[3]), Point::new(c[4], c[5]));
        match reg.center_point(n, &t) {
            Ok(CenterPoint::Finite(p)) => writeln!(out, "({},{})", fmt(p.x), fmt(p.y))?,
            Ok(CenterPoint::AtInfinity(d)) => writeln!(out, "at infinity, direction ({},{})", fmt(d.x), fmt(d.y))?,
            Err(central_quad::centers::CenterError::UnknownCenter(n)) => return Err(Failure::Missing(vec![n])),
            Err(e) => return Err(Failure::Verify(e.to_string())),
        }
        return Ok(());
    }
    if !a.list {
        return Err(Failure::Usage("centers needs --list or --eval".into()));
    }
    for d in reg.definitions() {
        let source = match &d.source {
            CenterSource::Formula(e) => e.to_string(),
            CenterSource::Builtin(b) => format!("builtin:{}", b.name()),
            CenterSource::Euler(t) => format!("euler line t={}", fmt(*t)),
        };
        writeln!(out, "X({})\t{}\t{}", d.index, source, d.flags.names().join(","))?;
    }
    Ok(())
}

fn run_classify(a: &ClassifyArgs) -> Result<(), Failure> {
    let p = parse_reals(&a.points, 8)?;
    let pts = [Point::new(p[0], p[1]), Point::new(p[2], p[3]), Point::new(p[4], p[5]), Point::new(p[6], p[7])];
    let tol = Tolerance::new(a.tol, 1.0);
    let reference = match a.reference.as_deref() {
        Some(r) => {
            let r = parse_reals(r, 10)?;
            Some((Quadrilateral::from_coords(r[..8].try_into().expect("eight values")), Point::new(r[8], r[9])))
        }
        None => None,
    };
    let report = classify(pts, reference.as_ref().map(|(q, e)| (q, *e)), &tol);
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, &report.to_json()).map_err(|e| Failure::Io(e.to_string()))?;
    writeln!(out)?;
    Ok(())
}

fn parse_list<T>(s: &str, all: Vec<T>, parse: impl Fn(&str) -> Result<T, String>) -> Result<Vec<T>, Failure> {
    if s.trim() == "all" {
        return Ok(all);
    }
    s.split(',').map(|x| parse(x.trim())).collect::<Result<Vec<_>, _>>().map_err(Failure::Usage)
}

fn run_scan(a: &ScanArgs, reg: &Registry) -> Result<(), Failure> {
    let types = parse_list(&a.types, QuadType::ALL.to_vec(), |s| s.parse::<QuadType>().map_err(|e| e.to_string()))?;
    let radiators = parse_list(&a.radiators, RadiatorKind::ALL.to_vec(), |s| {
        s.parse::<RadiatorKind>().map_err(|e| e.to_string())
    })?;
    let spec: CenterSpec = a.centers.parse().map_err(Failure::Usage)?;
    let centers: Vec<u32> = spec.expand(reg).into_iter().map(|(n, _)| n).collect();
    let mut cfg = ScanConfig::new(types, radiators, centers);
    cfg.samples = a.samples;
    cfg.seed = a.seed;
    cfg.tolerance = Tolerance::new(a.tol, 1.0);
    let records = scan(&cfg, reg)?;
    let json_out = a.out.as_ref().is_some_and(|p| p.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")));
    let w = open_out(a.out.as_deref())?;
    if json_out {
        write_json(&records, w)?;
    } else {
        write_csv(&records, w)?;
    }
    Ok(())
}

fn run_verify(a: &VerifyArgs, reg: &Registry) -> Result<(), Failure> {
    if a.samples == 0 {
        return Err(Failure::Usage("samples must be positive".into()));
    }
    let ids: Option<Vec<String>> = if a.theorem.iter().any(|t| t == "all") { None } else { Some(a.theorem.clone()) };
    let opts = VerifyOptions { samples: a.samples, seed: a.seed, tolerance: Tolerance::new(a.tol, 1.0), perturb: None };
    let results = verify_theorems(ids.as_deref(), reg, &opts).map_err(|e| Failure::Usage(e.to_string()))?;
    let mut out = io::stdout().lock();
    let mut failed = 0;
    for r in &results {
        let tag = if r.passed { "PASS" } else { "FAIL" };
        write!(out, "{tag} thm:{} [{}] samples={} max_residual={:.14e}", r.id, r.status.name(), r.instances, r.max_residual)?;
        if !r.skipped.is_empty() {
            write!(out, " skipped_degenerate={:?}", r.skipped)?;
        }
        writeln!(out)?;
        for f in r.failures.iter().take(5) {
            writeln!(out, "    {f}")?;
        }
        if !r.passed {
            failed += 1;
        }
    }
    writeln!(out, "{} of {} theorems passed", results.len() - failed, results.len())?;
    if failed > 0 {
        return Err(Failure::Verify(format!("{failed} theorems failed")));
    }
    Ok(())
}

fn run_diff(a: &DiffArgs, reg: &Registry) -> Result<(), Failure> {
    if a.golden != "builtin" {
        return Err(Failure::Usage(format!("unknown golden source '{}'; only 'builtin' is available", a.golden)));
    }
    let f = BufReader::new(File::open(&a.scan)?);
    let records = if a.scan.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) { read_json(f)? } else { read_csv(f)? };
    let report = golden_table_diff(&records, reg);
    let mut out = io::stdout().lock();
    for e in &report.entries {
        if a.verbose || e.status == DiffStatus::Missing {
            let mark = if e.numeric_only { " (numeric only)" } else { "" };
            writeln!(out, "{}\t{}\t{}\tX({}){}\t{}", e.status, e.quad_type, e.radiator, e.center, mark, e.expected)?;
        }
    }
    for x in &report.extras {
        writeln!(out, "extra\t{}\t{}\tX({})\t{}", x.quad_type, x.radiator, x.center, x.label)?;
    }
    writeln!(
        out,
        "confirmed {} missing {} degenerate {} not-scanned {} extra {}",
        report.count(DiffStatus::Confirmed),
        report.count(DiffStatus::Missing),
        report.count(DiffStatus::Degenerate),
        report.count(DiffStatus::NotScanned),
        report.extras.len()
    )?;
    if report.count(DiffStatus::Missing) > 0 {
        return Err(Failure::Verify("missing table entries".into()));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(j) = cli.jobs {
        if j == 0 {
            eprintln!("error: --jobs must be positive");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(j).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let result = load_registry(cli.registry.as_deref()).and_then(|reg| match &cli.command {
        Command::Gen(a) => run_gen(a),
        Command::Centers(a) => run_centers(a, &reg),
        Command::Classify(a) => run_classify(a),
        Command::Scan(a) => run_scan(a, &reg),
        Command::Verify(a) => run_verify(a, &reg),
        Command::Diff(a) => run_diff(a, &reg),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Verify(m)) => {
            eprintln!("{m}");
            ExitCode::from(1)
        }
        Err(Failure::Missing(v)) => {
            eprintln!("error: missing centers {v:?}");
            ExitCode::from(3)
        }
        Err(Failure::Io(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}
