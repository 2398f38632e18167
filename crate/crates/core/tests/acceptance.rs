mod common;

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use central_quad::centers::{default_registry, CenterPoint};
use central_quad::classify::{closure, inclusive, Ordering, Shape};
use central_quad::discovery::golden::{golden_rows, golden_table_diff, DiffStatus};
use central_quad::discovery::scan::{scan, write_csv, ScanConfig, ScanRecord};
use central_quad::discovery::theorems::{verify_theorems, VerifyOptions};
use central_quad::discovery::{all_radiators, run_pipeline};
use central_quad::geom::{Point, Triangle};
use central_quad::quads::{generate, seeded, QuadType, Quadrilateral};
use central_quad::radiators::{place, sub_quadrilateral_centers, RadiatorKind};
use common::lemmas::{circumcenter, lemma_suite};
use common::{oracle_sweep, random_triangle, uni};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(f)
}

fn csv(recs: &[ScanRecord]) -> Vec<u8> {
    let mut out = Vec::new();
    write_csv(recs, &mut out).unwrap();
    out
}

fn golden_config() -> ScanConfig {
    let types: BTreeSet<QuadType> = golden_rows().iter().map(|r| r.quad_type).collect();
    let radiators: BTreeSet<&str> = golden_rows().iter().map(|r| r.radiator.name()).collect();
    ScanConfig::new(
        types.into_iter().collect(),
        all_radiators().into_iter().filter(|r| radiators.contains(r.name())).collect(),
        default_registry().indices(),
    )
}

fn reference(t: QuadType, r: RadiatorKind, seed: u64) -> (Quadrilateral, Point) {
    let mut rng = seeded(seed);
    loop {
        let q = generate(t, &mut rng).expect("generator");
        if let Ok(e) = place(r, &q, &mut rng) {
            return (q, e);
        }
    }
}

fn line_distance(x: Point, p: Point, q: Point) -> f64 {
    (q - p).cross(x - p).abs() / p.dist(q)
}

fn sine(u: Point, v: Point) -> f64 {
    u.cross(v).abs() / (u.norm() * v.norm())
}

fn cosine(u: Point, v: Point) -> f64 {
    u.dot(v).abs() / (u.norm() * v.norm())
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let results = verify_theorems(None, default_registry(), &VerifyOptions::default()).unwrap();
    let took = start.elapsed();
    let failed: Vec<&str> = results.iter().filter(|r| !r.passed).map(|r| r.id.as_str()).collect();
    let worst = results.iter().map(|r| r.max_residual).fold(0.0, f64::max);
    let pass = failed.is_empty() && worst < 1e-8 && took < Duration::from_secs(300);
    outcome(pass, format!("{} theorems, failed {failed:?}, max residual {worst:.2e}, {:.1}s", results.len(), took.as_secs_f64()))
}

fn criterion_2() -> Outcome {
    let cfg = ScanConfig::new(vec![QuadType::General], vec![RadiatorKind::Arbitrary], default_registry().indices());
    let recs = scan(&cfg, default_registry()).unwrap();
    let hits: Vec<u32> = recs
        .iter()
        .filter(|r| inclusive(&closure(&r.shapes_by_ordering()[&Ordering::Fghi])).contains(&Shape::Parallelogram))
        .map(|r| r.center)
        .collect();
    outcome(hits == [2], format!("parallelogram at {hits:?} over {} centers", recs.len()))
}

fn criterion_3() -> Outcome {
    let reg = default_registry();
    let mut rng = seeded(303);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let t = random_triangle(&mut rng);
        let e = Point::new(uni(&mut rng, -2.0, 2.0), uni(&mut rng, -2.0, 2.0));
        let c = |tri: Triangle| match reg.center_point(2, &tri) {
            Ok(CenterPoint::Finite(p)) => p,
            other => panic!("centroid failed: {other:?}"),
        };
        let f = c(Triangle::new(t.a, t.b, e));
        let g = c(Triangle::new(t.a, t.c, e));
        let fg = g - f;
        let bc = t.c - t.b;
        worst = worst.max(sine(fg, bc)).max((fg.norm() / bc.norm() - 1.0 / 3.0).abs() * 3.0);
    }
    outcome(worst < 1e-10, format!("100 instances, worst relative deviation {worst:.2e}"))
}

fn criterion_4() -> Outcome {
    let reg = default_registry();
    let members = reg.members(|f| f.shinagawa_constant());
    let mut worst = 0.0f64;
    let mut checked = 0;
    let mut skipped = 0;
    for s in 0..50 {
        let (q, e) = reference(QuadType::Rectangle, RadiatorKind::Arbitrary, 4000 + s);
        let side = q.v[1] - q.v[0];
        for &n in &members {
            let Ok([f, g, h, i]) = run_pipeline(reg, &q, e, n, 1e-9) else {
                skipped += 1;
                continue;
            };
            let (d1, d2) = (h - f, i - g);
            let ortho = cosine(d1, d2);
            let along = sine(d1, side).min(sine(d1, side.perp())).max(sine(d2, side).min(sine(d2, side.perp())));
            worst = worst.max(ortho).max(along);
            checked += 1;
        }
    }
    let pass = worst < 1e-8 && skipped * 20 <= checked;
    outcome(pass, format!("{} centers, {checked} checked, {skipped} degenerate, worst {worst:.2e}", members.len()))
}

fn criterion_5() -> Outcome {
    let reg = default_registry();
    let mut ratio_err = 0.0f64;
    let mut center_err = 0.0f64;
    let mut t_err = 0.0f64;
    let t_members = reg.members(|f| f.set_t);
    for s in 0..30 {
        let (q, e) = reference(QuadType::Cyclic, RadiatorKind::SteinerPoint, 5000 + s);
        let o = circumcenter(&Triangle::new(q.v[0], q.v[1], q.v[2]));
        let big_r = o.dist(q.v[0]);
        let scale = q.scale();
        let radii = |p: [Point; 4], c: Point| -> [f64; 4] { std::array::from_fn(|k| line_distance(c, p[k], p[(k + 1) % 4])) };
        let pts = run_pipeline(reg, &q, e, 3, 1e-9).expect("X3 pipeline");
        let r = radii(pts, e);
        let spread = r.iter().cloned().fold(f64::MIN, f64::max) - r.iter().cloned().fold(f64::MAX, f64::min);
        ratio_err = ratio_err.max((r[0] / big_r - 0.5).abs());
        center_err = center_err.max(spread / scale).max(e.dist(o) / scale);
        for &n in &t_members {
            let Ok(pts) = run_pipeline(reg, &q, e, n, 1e-9) else { continue };
            for d in radii(pts, o) {
                t_err = t_err.max((d - big_r).abs() / scale);
            }
            t_err = t_err.max(e.dist(o) / scale);
        }
    }
    let pass = ratio_err < 1e-9 && center_err < 1e-9 && t_err < 1e-9;
    outcome(pass, format!("r/R-1/2 {ratio_err:.2e}, incenter offset {center_err:.2e}, T incircle offset {t_err:.2e} over {} members", t_members.len()))
}

fn criterion_6() -> Outcome {
    let mut ratio_err = 0.0f64;
    let mut arm_err = 0.0f64;
    for s in 0..100 {
        let (q, e) = reference(QuadType::General, RadiatorKind::Arbitrary, 6000 + s);
        let g = sub_quadrilateral_centers(&q, e, RadiatorKind::VertexCentroid).unwrap();
        // Vertex k of ABCD pairs with the centroid of the sub-quadrilateral that omits it.
        let k = (g[1] - g[0]).dot(q.v[1] - q.v[0]) / (q.v[1] - q.v[0]).norm2();
        let p = (g[0] - q.v[0] * k) * (1.0 / (1.0 - k));
        let fit = (0..4).map(|j| (g[j] - p - (q.v[j] - p) * k).norm()).fold(0.0, f64::max) / q.scale();
        let m = (q.v[0] + q.v[1] + q.v[2] + q.v[3]) * 0.25;
        let on_em = (p.dist(e) + p.dist(m) - e.dist(m)) / q.scale();
        ratio_err = ratio_err.max((k + 0.25).abs()).max(fit).max(on_em);
        arm_err = arm_err.max((p.dist(e) / p.dist(m) - 4.0).abs());
    }
    let mut mid_err = 0.0f64;
    let mut done = 0;
    let mut rng = seeded(6500);
    while done < 30 {
        let q = generate(QuadType::Cyclic, &mut rng).unwrap();
        let Ok(e) = place(RadiatorKind::Arbitrary, &q, &mut rng) else { continue };
        let Ok(st) = sub_quadrilateral_centers(&q, e, RadiatorKind::SteinerPoint) else { continue };
        let o = circumcenter(&Triangle::new(q.v[0], q.v[1], q.v[2]));
        let p = circumcenter(&Triangle::new(st[0], st[1], st[2]));
        let on = (p.dist(st[3]) - p.dist(st[0])).abs();
        mid_err = mid_err.max(p.dist((e + o) * 0.5).max(on) / q.scale());
        done += 1;
    }
    let pass = ratio_err < 1e-10 && arm_err < 1e-10 && mid_err < 1e-8;
    outcome(pass, format!("ratio/fit {ratio_err:.2e}, PE/PM-4 {arm_err:.2e}, Steiner midpoint {mid_err:.2e}"))
}

fn criterion_7() -> Outcome {
    let rep = lemma_suite(default_registry(), 50, 707);
    outcome(rep.failures.is_empty(), format!("{} checks, worst {:.2e}, failures {:?}", rep.checks, rep.worst, rep.failures.iter().take(3).collect::<Vec<_>>()))
}

fn criterion_8(recs: &[ScanRecord]) -> Outcome {
    let d = golden_table_diff(recs, default_registry());
    let missing: Vec<String> = d.missing().map(|m| format!("{} {} X({}) {}", m.quad_type.name(), m.radiator.name(), m.center, m.expected)).collect();
    outcome(
        missing.is_empty(),
        format!(
            "{} confirmed, {} missing, {} degenerate, {} not scanned {:?}",
            d.count(DiffStatus::Confirmed),
            missing.len(),
            d.count(DiffStatus::Degenerate),
            d.count(DiffStatus::NotScanned),
            missing.iter().take(3).collect::<Vec<_>>()
        ),
    )
}

fn criterion_9() -> Outcome {
    let s = oracle_sweep(1000);
    outcome(
        s.disagreements.is_empty(),
        format!("{} shapes, {} decisions, {} in band, {} disagreements {:?}", s.shapes, s.decisions, s.in_band, s.disagreements.len(), s.disagreements.iter().take(3).collect::<Vec<_>>()),
    )
}

fn criterion_10(eight: &[u8]) -> Outcome {
    let cfg = golden_config();
    let one = csv(&in_pool(1, || scan(&cfg, default_registry()).unwrap()));
    outcome(one == eight, format!("{} bytes, identical: {}", one.len(), one == eight))
}

fn main() -> ExitCode {
    let cfg = golden_config();
    let recs = in_pool(8, || scan(&cfg, default_registry()).unwrap());
    let eight = csv(&recs);
    type Criterion<'a> = (&'static str, Box<dyn FnOnce() -> Outcome + 'a>);
    let checks: Vec<Criterion> = vec![
        ("theorem regression", Box::new(criterion_1)),
        ("general table: parallelogram only at X2", Box::new(criterion_2)),
        ("centroid segment lemma", Box::new(criterion_3)),
        ("Shinagawa family on rectangles", Box::new(criterion_4)),
        ("Steiner metric identities", Box::new(criterion_5)),
        ("sub-quadrilateral homotheties", Box::new(criterion_6)),
        ("degeneracy lemma suites", Box::new(criterion_7)),
        ("golden table diff", Box::new(|| criterion_8(&recs))),
        ("classifier oracle equivalence", Box::new(criterion_9)),
        ("thread-count determinism", Box::new(|| criterion_10(&eight))),
    ];
    let mut failed = 0;
    for (i, (name, run)) in checks.into_iter().enumerate() {
        let o = run();
        if !o.pass {
            failed += 1;
        }
        println!("{} criterion {:>2} {name}: {}", if o.pass { "PASS" } else { "FAIL" }, i + 1, o.detail);
    }
    println!("{} of 10 criteria passed", 10 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
