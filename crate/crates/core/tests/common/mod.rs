//! Helpers shared by the integration tests, including a brute-force shape oracle
//! written straight from the textbook definitions. It shares no code with the
//! classifier beyond `Point`.
#![allow(dead_code)]

pub mod lemmas;

use central_quad::classify::Shape;
use central_quad::geom::{Point, Triangle};
use central_quad::quads::SeededRng;
use rand::Rng;

pub const BAND_LO: f64 = 1e-10;
pub const BAND_HI: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Call {
    True,
    False,
    Band,
}

/// `eq`: largest residual of the equalities that must vanish.
/// `strict`: smallest margin of the inequalities that must not vanish.
#[derive(Debug, Clone, Copy)]
pub struct Verdict {
    pub eq: f64,
    pub strict: f64,
}

impl Verdict {
    fn eq(r: f64) -> Self {
        Verdict { eq: r, strict: f64::INFINITY }
    }

    fn and(self, o: Verdict) -> Verdict {
        Verdict { eq: self.eq.max(o.eq), strict: self.strict.min(o.strict) }
    }

    pub fn call(self) -> Call {
        if self.eq > BAND_HI || self.strict < BAND_LO {
            Call::False
        } else if self.eq < BAND_LO && self.strict > BAND_HI {
            Call::True
        } else {
            Call::Band
        }
    }
}

struct Quad {
    p: [Point; 4],
    s: [f64; 4],
    scale: f64,
}

impl Quad {
    fn new(p: [Point; 4]) -> Self {
        let len = |u: Point, v: Point| (u.x - v.x).hypot(u.y - v.y);
        let s = [len(p[0], p[1]), len(p[1], p[2]), len(p[2], p[3]), len(p[3], p[0])];
        let mut scale = 0.0f64;
        for i in 0..4 {
            for j in i + 1..4 {
                scale = scale.max(len(p[i], p[j]));
            }
        }
        Quad { p, s, scale }
    }

    fn side(&self, i: usize) -> Point {
        self.p[(i + 1) % 4] - self.p[i % 4]
    }

    /// |sin| of the angle between sides i and i+2.
    fn par(&self, i: usize) -> f64 {
        let (u, v) = (self.side(i), self.side(i + 2));
        (u.x * v.y - u.y * v.x).abs() / (self.s[i] * self.s[(i + 2) % 4])
    }

    /// |cos| of the interior angle at vertex i.
    fn right(&self, i: usize) -> f64 {
        let u = self.p[(i + 3) % 4] - self.p[i];
        let v = self.p[(i + 1) % 4] - self.p[i];
        (u.x * v.x + u.y * v.y).abs() / (u.norm() * v.norm())
    }

    fn cyclic(&self) -> Verdict {
        let o = self.p[3];
        let row = |q: Point| {
            let (x, y) = (q.x - o.x, q.y - o.y);
            [x, y, x * x + y * y]
        };
        let [r0, r1, r2] = [row(self.p[0]), row(self.p[1]), row(self.p[2])];
        let det = r0[0] * (r1[1] * r2[2] - r1[2] * r2[1]) - r0[1] * (r1[0] * r2[2] - r1[2] * r2[0])
            + r0[2] * (r1[0] * r2[1] - r1[1] * r2[0]);
        Verdict::eq(det.abs() / self.scale.powi(4))
    }

    fn convex_margin(&self) -> f64 {
        let c: Vec<f64> = (0..4).map(|i| {
            let (u, v) = (self.side(i), self.side(i + 1));
            (u.x * v.y - u.y * v.x) / (self.scale * self.scale)
        }).collect();
        if c.iter().all(|x| *x > 0.0) || c.iter().all(|x| *x < 0.0) {
            c.iter().map(|x| x.abs()).fold(f64::INFINITY, f64::min)
        } else {
            0.0
        }
    }

    fn tangential(&self) -> Verdict {
        let [a, b, c, d] = self.s;
        Verdict { eq: (a + c - b - d).abs() / self.scale, strict: self.convex_margin() }
    }

    fn extangential(&self) -> Verdict {
        let [a, b, c, d] = self.s;
        Verdict::eq((a + b - c - d).abs().min((a + d - b - c).abs()) / self.scale)
    }

    fn orthodiagonal(&self) -> Verdict {
        let u = self.p[2] - self.p[0];
        let v = self.p[3] - self.p[1];
        Verdict::eq((u.x * v.x + u.y * v.y).abs() / (self.scale * self.scale))
    }

    fn equidiagonal(&self) -> Verdict {
        let u = self.p[2] - self.p[0];
        let v = self.p[3] - self.p[1];
        Verdict::eq((u.norm2() - v.norm2()).abs() / (self.scale * self.scale))
    }

    fn equal_prod_opp(&self) -> Verdict {
        let [a, b, c, d] = self.s;
        Verdict::eq((a * c - b * d).abs() / (self.scale * self.scale))
    }

    fn equal_prod_adj(&self) -> Verdict {
        let [a, b, c, d] = self.s;
        Verdict::eq((a * b - c * d).abs().min((a * d - b * c).abs()) / (self.scale * self.scale))
    }

    fn pythagorean(&self) -> Verdict {
        let [a, b, c, d] = self.s.map(|x| x * x);
        Verdict::eq((a + b - c - d).abs().min((a + d - b - c).abs()) / (self.scale * self.scale))
    }

    fn ap(&self) -> Verdict {
        let mut best = f64::INFINITY;
        for start in 0..4 {
            for dir in [1usize, 3] {
                let x: Vec<f64> = (0..4).map(|k| self.s[(start + dir * k) % 4]).collect();
                let r = ((x[1] - x[0]) - (x[2] - x[1])).abs().max(((x[2] - x[1]) - (x[3] - x[2])).abs());
                best = best.min(r);
            }
        }
        Verdict::eq(best / self.scale)
    }

    fn trapezoid(&self) -> Verdict {
        Verdict { eq: self.par(0).min(self.par(1)), strict: self.par(0).max(self.par(1)) }
    }

    fn parallelogram(&self) -> Verdict {
        Verdict::eq(self.par(0).max(self.par(1)))
    }

    fn hjelmslev(&self) -> Verdict {
        Verdict::eq(self.right(0).max(self.right(2)).min(self.right(1).max(self.right(3))))
    }

    fn kite(&self) -> Verdict {
        let [a, b, c, d] = self.s;
        Verdict::eq((a - b).abs().max((c - d).abs()).min((b - c).abs().max((d - a).abs())) / self.scale)
    }

    fn rhombus(&self) -> Verdict {
        let hi = self.s.iter().copied().fold(0.0, f64::max);
        let lo = self.s.iter().copied().fold(f64::INFINITY, f64::min);
        Verdict::eq((hi - lo) / self.scale)
    }

    fn rectangle(&self) -> Verdict {
        Verdict::eq((0..4).map(|i| self.right(i)).fold(0.0, f64::max))
    }
}

/// The oracle's verdict for `shape` on the points in the given order.
pub fn oracle(shape: Shape, p: [Point; 4]) -> Verdict {
    let q = Quad::new(p);
    use Shape::*;
    match shape {
        Cyclic => q.cyclic(),
        Tangential => q.tangential(),
        Extangential => q.extangential(),
        Orthodiagonal => q.orthodiagonal(),
        Equidiagonal => q.equidiagonal(),
        EqualProdOpp => q.equal_prod_opp(),
        EqualProdAdj => q.equal_prod_adj(),
        Pythagorean => q.pythagorean(),
        Trapezoid => q.trapezoid(),
        ApQuad => q.ap(),
        Hjelmslev => q.hjelmslev(),
        Parallelogram => q.parallelogram(),
        Kite => q.kite(),
        Bicentric => q.cyclic().and(q.tangential()),
        Exbicentric => q.cyclic().and(q.extangential()),
        Harmonic => q.cyclic().and(q.equal_prod_opp()),
        CyclicOrthodiagonal => q.cyclic().and(q.orthodiagonal()),
        EquidiagonalOrthodiagonal => q.equidiagonal().and(q.orthodiagonal()),
        OrthodiagonalTrapezoid => q.trapezoid().and(q.orthodiagonal()),
        TangentialTrapezoid => q.trapezoid().and(q.tangential()),
        IsoscelesTrapezoid => q.trapezoid().and(q.cyclic()).and(q.equidiagonal()),
        BicentricTrapezoid => q.trapezoid().and(q.cyclic()).and(q.equidiagonal()).and(q.tangential()),
        EquidiagonalOrthodiagonalTrapezoid => {
            q.trapezoid().and(q.cyclic()).and(q.equidiagonal()).and(q.orthodiagonal())
        }
        Rhombus => q.rhombus(),
        Rectangle => q.rectangle(),
        EquidiagonalKite => q.kite().and(q.equidiagonal()),
        RightKite => q.kite().and(q.cyclic()),
        Square => q.rhombus().and(q.rectangle()),
    }
}

pub fn uni(rng: &mut SeededRng, lo: f64, hi: f64) -> f64 {
    rng.gen_range(lo..hi)
}

/// A random triangle of scale about 1 with angles bounded away from 0 and pi.
pub fn random_triangle(rng: &mut SeededRng) -> Triangle {
    loop {
        let a = Point::new(uni(rng, -1.0, 1.0), uni(rng, -1.0, 1.0));
        let b = Point::new(uni(rng, -1.0, 1.0), uni(rng, -1.0, 1.0));
        let c = Point::new(uni(rng, -1.0, 1.0), uni(rng, -1.0, 1.0));
        let t = Triangle::new(a, b, c);
        if min_angle(&t) > 0.2 {
            return t;
        }
    }
}

/// Isosceles with AB = AC, apex angle away from 0, pi/2 and pi.
pub fn random_isosceles(rng: &mut SeededRng) -> Triangle {
    loop {
        let apex = uni(rng, 0.3, 2.6);
        if (apex - std::f64::consts::FRAC_PI_2).abs() < 0.05 {
            continue;
        }
        let r = uni(rng, 0.5, 2.0);
        let rot = uni(rng, 0.0, std::f64::consts::TAU);
        let a = Point::new(uni(rng, -1.0, 1.0), uni(rng, -1.0, 1.0));
        let b = a + Point::new(r, 0.0).rotate(rot - apex / 2.0);
        let c = a + Point::new(r, 0.0).rotate(rot + apex / 2.0);
        return Triangle::new(a, b, c);
    }
}

pub fn min_angle(t: &Triangle) -> f64 {
    let ang = |p: Point, q: Point, r: Point| {
        let (u, v) = (q - p, r - p);
        (u.dot(v) / (u.norm() * v.norm())).clamp(-1.0, 1.0).acos()
    };
    ang(t.a, t.b, t.c).min(ang(t.b, t.c, t.a)).min(ang(t.c, t.a, t.b))
}

/// x -> k R(theta) x + shift.
#[derive(Debug, Clone, Copy)]
pub struct Similarity {
    pub k: f64,
    pub theta: f64,
    pub shift: Point,
}

impl Similarity {
    pub fn random(rng: &mut SeededRng) -> Self {
        Similarity {
            k: 10f64.powf(uni(rng, -3.0, 3.0)),
            theta: uni(rng, 0.0, std::f64::consts::TAU),
            shift: Point::new(uni(rng, -10.0, 10.0), uni(rng, -10.0, 10.0)),
        }
    }

    pub fn apply(&self, p: Point) -> Point {
        p.rotate(self.theta) * self.k + self.shift * self.k
    }
}

/// Move every coordinate by up to `eps * scale`.
pub fn jitter(p: [Point; 4], eps: f64, rng: &mut SeededRng) -> [Point; 4] {
    let scale = central_quad::geom::max_pairwise_distance(&p);
    p.map(|x| x + Point::new(uni(rng, -1.0, 1.0), uni(rng, -1.0, 1.0)) * (eps * scale))
}

pub const NOISE_SWEEP: [f64; 8] = [0.0, 1e-13, 1e-12, 1e-11, 1e-7, 1e-6, 1e-4, 1e-3];

#[derive(Debug, Default)]
pub struct SweepOutcome {
    pub shapes: usize,
    pub decisions: usize,
    pub in_band: usize,
    pub disagreements: Vec<String>,
}

/// Classify `count` generated shapes (cycling through every type) under each
/// noise level and compare every predicate in every ordering with the oracle.
pub fn oracle_sweep(count: usize) -> SweepOutcome {
    use central_quad::classify::{classify, Ordering};
    use central_quad::geom::Tolerance;
    use central_quad::quads::{generate, seeded, QuadType};

    let mut out = SweepOutcome::default();
    let tol = Tolerance::default();
    for i in 0..count {
        let t = QuadType::ALL[i % QuadType::ALL.len()];
        let mut rng = seeded(10_000 + i as u64);
        let q = generate(t, &mut rng).expect("generator succeeds");
        out.shapes += 1;
        for eps in NOISE_SWEEP {
            let pts = jitter(q.v, eps, &mut rng);
            let rep = classify(pts, None, &tol);
            if rep.is_degenerate() {
                out.disagreements.push(format!("{t} eps={eps:e}: unexpected degeneracy"));
                continue;
            }
            for o in Ordering::ALL {
                let ours = rep.ordering(o).expect("nondegenerate reports carry every ordering");
                let permuted = o.apply(&pts);
                for s in Shape::ALL {
                    let v = oracle(s, permuted);
                    let call = v.call();
                    out.decisions += 1;
                    let agree = match call {
                        Call::Band => {
                            out.in_band += 1;
                            true
                        }
                        Call::True => ours.holds(s),
                        Call::False => !ours.holds(s),
                    };
                    if !agree {
                        out.disagreements.push(format!(
                            "{t} #{i} eps={eps:e} {} {}: oracle {:?} (eq {:.2e}, strict {:.2e}), classifier {} (residual {:.2e})",
                            o.name(),
                            s.name(),
                            call,
                            v.eq,
                            v.strict,
                            ours.holds(s),
                            ours.get(s).residual
                        ));
                    }
                }
            }
        }
    }
    out
}
