//! Coincidence and incidence lemmas for the registered centers, checked
//! against constructions computed here from first principles.

use central_quad::centers::{CenterPoint, Registry};
use central_quad::geom::{Point, Triangle};
use central_quad::quads::seeded;

use super::{random_isosceles, random_triangle};

pub fn circumcenter(t: &Triangle) -> Point {
    let (a, b, c) = (t.a, t.b, t.c);
    let d = 2.0 * (a.x * (b.y - c.y) + b.x * (c.y - a.y) + c.x * (a.y - b.y));
    let (a2, b2, c2) = (a.norm2(), b.norm2(), c.norm2());
    Point::new(
        (a2 * (b.y - c.y) + b2 * (c.y - a.y) + c2 * (a.y - b.y)) / d,
        (a2 * (c.x - b.x) + b2 * (a.x - c.x) + c2 * (b.x - a.x)) / d,
    )
}

pub fn incenter(t: &Triangle) -> Point {
    let (a, b, c) = (t.b.dist(t.c), t.c.dist(t.a), t.a.dist(t.b));
    (t.a * a + t.b * b + t.c * c) / (a + b + c)
}

fn scale(t: &Triangle) -> f64 {
    t.a.dist(t.b).max(t.b.dist(t.c)).max(t.c.dist(t.a))
}

fn point(reg: &Registry, n: u32, t: &Triangle) -> Result<Point, String> {
    match reg.center_point(n, t) {
        Ok(CenterPoint::Finite(p)) => Ok(p),
        Ok(CenterPoint::AtInfinity(_)) => Err(format!("X({n}) at infinity")),
        Err(e) => Err(format!("X({n}): {e}")),
    }
}

#[derive(Debug, Default)]
pub struct LemmaReport {
    pub checks: usize,
    pub worst: f64,
    pub failures: Vec<String>,
}

impl LemmaReport {
    fn check(&mut self, what: &str, residual: f64, bound: f64) {
        self.checks += 1;
        if residual.is_finite() {
            self.worst = self.worst.max(residual);
        }
        if residual.is_nan() || residual > bound {
            self.failures.push(format!("{what}: residual {residual:.3e} exceeds {bound:.0e}"));
        }
    }

    fn fail(&mut self, msg: String) {
        self.checks += 1;
        self.failures.push(msg);
    }
}

/// Set A, M and T coincidences on isosceles triangles with AB = AC, and
/// circumcircle membership, X214 and X165 relations and the Euler-line
/// parameters on general triangles. Residuals are relative to the triangle scale.
pub fn lemma_suite(reg: &Registry, trials: usize, seed: u64) -> LemmaReport {
    let mut rep = LemmaReport::default();
    let mut rng = seeded(seed);
    let set_a = reg.members(|f| f.set_a);
    let set_m = reg.members(|f| f.set_m);
    let set_t = reg.members(|f| f.set_t);
    let circ = reg.members(|f| f.circumcircle);
    for k in 0..trials {
        let t = random_isosceles(&mut rng);
        let s = scale(&t);
        let o = circumcenter(&t);
        let m = (t.b + t.c) / 2.0;
        let antipode = o * 2.0 - t.a;
        for (set, target, name) in [(&set_a, t.a, "A"), (&set_m, m, "M"), (&set_t, antipode, "T")] {
            for &n in set {
                match point(reg, n, &t) {
                    Ok(p) => rep.check(&format!("set {name} X({n}) isosceles #{k}"), p.dist(target) / s, 1e-9),
                    Err(e) => rep.fail(format!("set {name} isosceles #{k}: {e}")),
                }
            }
        }

        let t = random_triangle(&mut rng);
        let s = scale(&t);
        let o = circumcenter(&t);
        let r = o.dist(t.a);
        for &n in &circ {
            match point(reg, n, &t) {
                Ok(p) => rep.check(&format!("circumcircle X({n}) #{k}"), (p.dist(o) - r).abs() / s, 1e-9),
                Err(e) => rep.fail(format!("circumcircle #{k}: {e}")),
            }
        }
        let i = incenter(&t);
        match (point(reg, 214, &t), point(reg, 100, &t)) {
            (Ok(x214), Ok(x100)) => rep.check(&format!("X214 midpoint #{k}"), x214.dist((i + x100) / 2.0) / s, 1e-9),
            (a, b) => rep.fail(format!("X214 #{k}: {:?} {:?}", a.err(), b.err())),
        }
        match point(reg, 165, &t) {
            Ok(x165) => rep.check(&format!("X165 on X1X3 #{k}"), x165.dist(o + (o - i) / 3.0) / s, 1e-9),
            Err(e) => rep.fail(format!("X165 #{k}: {e}")),
        }
        let h = t.a + t.b + t.c - o * 2.0;
        for d in reg.definitions() {
            if let Some((tp, _)) = &d.flags.euler {
                match point(reg, d.index, &t) {
                    Ok(p) => rep.check(&format!("Euler line X({}) #{k}", d.index), p.dist(o + (h - o) * *tp) / s, 1e-12),
                    Err(e) => rep.fail(format!("Euler line #{k}: {e}")),
                }
            }
        }
    }
    rep
}
