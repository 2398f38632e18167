//! Barycentric-formula DSL: parser, pretty printer and evaluator.
//!
//! Grammar (whitespace insignificant, no implicit multiplication):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := '-' factor | base ('^' int)?
//! base   := number | 'a' | 'b' | 'c' | 'S' | 'sqrt' '(' expr ')' | '(' expr ')'
//! ```
//!
//! Unary minus sits above `^`, so `-a^2` is `-(a^2)`.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    A,
    B,
    C,
    /// Twice the triangle area.
    S,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(Var),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
    Sqrt(Box<Expr>),
}

#[derive(Debug, Error, Clone, PartialEq)]
#[error("parse error at {position}: {message}")]
pub struct ParseError {
    pub position: usize,
    pub message: String,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvalError {
    #[error("square root of a negative value")]
    DomainError,
    #[error("division by zero")]
    DivisionByZero,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Sym(char),
    End,
}

struct Lexer {
    toks: Vec<(Tok, usize)>,
}

fn lex(src: &str) -> Result<Lexer, ParseError> {
    let chars: Vec<(usize, char)> = src.char_indices().collect();
    let mut toks = Vec::new();
    let mut i = 0;
    // positions are character indices, not byte offsets
    while i < chars.len() {
        let (_, ch) = chars[i];
        if ch.is_whitespace() {
            i += 1;
        } else if ch.is_ascii_digit() || ch == '.' {
            let start = i;
            while i < chars.len() && (chars[i].1.is_ascii_digit() || chars[i].1 == '.') {
                i += 1;
            }
            if i < chars.len() && (chars[i].1 == 'e' || chars[i].1 == 'E') {
                let save = i;
                i += 1;
                if i < chars.len() && (chars[i].1 == '+' || chars[i].1 == '-') {
                    i += 1;
                }
                if i < chars.len() && chars[i].1.is_ascii_digit() {
                    while i < chars.len() && chars[i].1.is_ascii_digit() {
                        i += 1;
                    }
                } else {
                    i = save;
                }
            }
            let text: String = chars[start..i].iter().map(|c| c.1).collect();
            let v: f64 = text.parse().map_err(|_| ParseError {
                position: start,
                message: format!("malformed number '{text}'"),
            })?;
            toks.push((Tok::Num(v), start));
        } else if ch.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && chars[i].1.is_ascii_alphanumeric() {
                i += 1;
            }
            toks.push((Tok::Ident(chars[start..i].iter().map(|c| c.1).collect()), start));
        } else if "+-*/^()".contains(ch) {
            toks.push((Tok::Sym(ch), i));
            i += 1;
        } else {
            return Err(ParseError { position: i, message: format!("unexpected character '{ch}'") });
        }
    }
    toks.push((Tok::End, chars.len()));
    Ok(Lexer { toks })
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn at(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError { position: self.at(), message: message.into() })
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if *self.peek() == Tok::Sym(c) {
            self.bump();
            Ok(())
        } else {
            self.err(format!("expected '{c}'"))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Tok::Sym('+') => BinOp::Add,
                Tok::Sym('-') => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.term()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.factor()?;
        loop {
            let op = match self.peek() {
                Tok::Sym('*') => BinOp::Mul,
                Tok::Sym('/') => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.factor()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        if *self.peek() == Tok::Sym('-') {
            self.bump();
            return Ok(Expr::Neg(Box::new(self.factor()?)));
        }
        let base = self.base()?;
        if *self.peek() == Tok::Sym('^') {
            self.bump();
            let neg = if *self.peek() == Tok::Sym('-') {
                self.bump();
                true
            } else {
                false
            };
            let n = match self.peek() {
                Tok::Num(v) if v.fract() == 0.0 && *v <= i32::MAX as f64 => *v as i32,
                _ => return self.err("expected integer exponent"),
            };
            self.bump();
            return Ok(Expr::Pow(Box::new(base), if neg { -n } else { n }));
        }
        Ok(base)
    }

    fn base(&mut self) -> Result<Expr, ParseError> {
        let start = self.at();
        match self.bump() {
            Tok::Num(v) => Ok(Expr::Num(v)),
            Tok::Ident(id) => match id.as_str() {
                "a" => Ok(Expr::Var(Var::A)),
                "b" => Ok(Expr::Var(Var::B)),
                "c" => Ok(Expr::Var(Var::C)),
                "S" => Ok(Expr::Var(Var::S)),
                "sqrt" => {
                    self.expect('(')?;
                    let e = self.expr()?;
                    self.expect(')')?;
                    Ok(Expr::Sqrt(Box::new(e)))
                }
                _ => Err(ParseError { position: start, message: format!("unknown identifier '{id}'") }),
            },
            Tok::Sym('(') => {
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::End => Err(ParseError { position: start, message: "unexpected end of input".into() }),
            Tok::Sym(c) => Err(ParseError { position: start, message: format!("unexpected '{c}'") }),
        }
    }
}

pub fn parse_formula(src: &str) -> Result<Expr, ParseError> {
    let lx = lex(src)?;
    let mut p = Parser { toks: lx.toks, pos: 0 };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return p.err("unexpected trailing input");
    }
    Ok(e)
}

/// Twice the area of a triangle with sides a, b, c (Kahan's stable Heron form).
pub fn twice_area(a: f64, b: f64, c: f64) -> f64 {
    let mut s = [a, b, c];
    s.sort_by(|x, y| y.total_cmp(x));
    let [x, y, z] = s;
    let h = (x + (y + z)) * (z - (x - y)) * (z + (x - y)) * (x + (y - z));
    h.max(0.0).sqrt() / 2.0
}

pub fn eval_formula(e: &Expr, a: f64, b: f64, c: f64) -> Result<f64, EvalError> {
    eval_with(e, a, b, c, twice_area(a, b, c))
}

/// Evaluate with an externally supplied S (twice the area).
pub fn eval_with(e: &Expr, a: f64, b: f64, c: f64, s: f64) -> Result<f64, EvalError> {
    Ok(match e {
        Expr::Num(v) => *v,
        Expr::Var(Var::A) => a,
        Expr::Var(Var::B) => b,
        Expr::Var(Var::C) => c,
        Expr::Var(Var::S) => s,
        Expr::Neg(x) => -eval_with(x, a, b, c, s)?,
        Expr::Bin(op, l, r) => {
            let l = eval_with(l, a, b, c, s)?;
            let r = eval_with(r, a, b, c, s)?;
            match op {
                BinOp::Add => l + r,
                BinOp::Sub => l - r,
                BinOp::Mul => l * r,
                BinOp::Div => {
                    if r == 0.0 {
                        return Err(EvalError::DivisionByZero);
                    }
                    l / r
                }
            }
        }
        Expr::Pow(x, n) => {
            let v = eval_with(x, a, b, c, s)?;
            if *n < 0 && v == 0.0 {
                return Err(EvalError::DivisionByZero);
            }
            v.powi(*n)
        }
        Expr::Sqrt(x) => {
            let v = eval_with(x, a, b, c, s)?;
            if v < 0.0 {
                return Err(EvalError::DomainError);
            }
            v.sqrt()
        }
    })
}

/// Value of `e` together with the magnitude it was computed from: the same
/// expression with every term taken in absolute value. A value far below its
/// magnitude is cancellation noise.
pub fn eval_with_magnitude(e: &Expr, a: f64, b: f64, c: f64, s: f64) -> Result<(f64, f64), EvalError> {
    Ok(match e {
        Expr::Bin(op, l, r) => {
            let (lv, lm) = eval_with_magnitude(l, a, b, c, s)?;
            let (rv, rm) = eval_with_magnitude(r, a, b, c, s)?;
            match op {
                BinOp::Add => (lv + rv, lm + rm),
                BinOp::Sub => (lv - rv, lm + rm),
                BinOp::Mul => (lv * rv, lm * rm),
                BinOp::Div => {
                    if rv == 0.0 {
                        return Err(EvalError::DivisionByZero);
                    }
                    (lv / rv, lm / rv.abs())
                }
            }
        }
        Expr::Neg(x) => {
            let (v, m) = eval_with_magnitude(x, a, b, c, s)?;
            (-v, m)
        }
        Expr::Pow(x, n) if *n > 0 => {
            let (v, m) = eval_with_magnitude(x, a, b, c, s)?;
            (v.powi(*n), m.powi(*n))
        }
        Expr::Sqrt(x) => {
            let (v, m) = eval_with_magnitude(x, a, b, c, s)?;
            if v < 0.0 {
                return Err(EvalError::DomainError);
            }
            (v.sqrt(), m.sqrt())
        }
        _ => {
            let v = eval_with(e, a, b, c, s)?;
            (v, v.abs())
        }
    })
}

/// First coordinate with its two cyclic substitutions.
pub fn barycentric_triple(e: &Expr, t: &crate::geom::Triangle) -> Result<(f64, f64, f64), EvalError> {
    let (a, b, c) = t.sides();
    let s = 2.0 * t.signed_area().abs();
    Ok((eval_with(e, a, b, c, s)?, eval_with(e, b, c, a, s)?, eval_with(e, c, a, b, s)?))
}

/// Barycentric weights with their condition number.
pub type Conditioned = ((f64, f64, f64), f64);

/// Like [`barycentric_triple`], but `None` when every coordinate vanishes
/// relative to its magnitude, i.e. the formula reads 0:0:0 at this triangle.
/// Otherwise also returns the condition number `sum(magnitudes) / |u+v+w|`.
pub fn barycentric_triple_checked(
    e: &Expr,
    t: &crate::geom::Triangle,
    rel: f64,
) -> Result<Option<Conditioned>, EvalError> {
    let (a, b, c) = t.sides();
    let s = 2.0 * t.signed_area().abs();
    let u = eval_with_magnitude(e, a, b, c, s)?;
    let v = eval_with_magnitude(e, b, c, a, s)?;
    let w = eval_with_magnitude(e, c, a, b, s)?;
    if [u, v, w].iter().all(|(x, m)| x.abs() <= rel * m) {
        return Ok(None);
    }
    let cond = (u.1 + v.1 + w.1) / (u.0 + v.0 + w.0).abs();
    Ok(Some(((u.0, v.0, w.0), cond)))
}

fn is_atom(e: &Expr) -> bool {
    matches!(e, Expr::Num(_) | Expr::Var(_) | Expr::Sqrt(_))
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) => write!(f, "{v}"),
            Expr::Var(Var::A) => write!(f, "a"),
            Expr::Var(Var::B) => write!(f, "b"),
            Expr::Var(Var::C) => write!(f, "c"),
            Expr::Var(Var::S) => write!(f, "S"),
            Expr::Neg(x) => {
                if is_atom(x) || matches!(**x, Expr::Pow(..) | Expr::Neg(_)) {
                    write!(f, "-{x}")
                } else {
                    write!(f, "-({x})")
                }
            }
            Expr::Bin(op, l, r) => {
                let o = match op {
                    BinOp::Add => '+',
                    BinOp::Sub => '-',
                    BinOp::Mul => '*',
                    BinOp::Div => '/',
                };
                write!(f, "({l}{o}{r})")
            }
            Expr::Pow(x, n) => {
                if is_atom(x) {
                    write!(f, "{x}^{n}")
                } else {
                    write!(f, "({x})^{n}")
                }
            }
            Expr::Sqrt(x) => write!(f, "sqrt({x})"),
        }
    }
}
