//! Expression text.
//!
//! Grammar: non-negative integer literals, identifiers
//! `[A-Za-z_][A-Za-z0-9_]*`, binary `+ - * /`, unary minus, parentheses and
//! `^` with an integer exponent (`x^-2` and `x^(-2)` are both accepted).
//! `+ -` and `* /` are left associative; unary minus binds tighter than `*`
//! and looser than `^`; `a^b^c` is rejected.
//!
//! [`Expr::to_string`] prints with the fewest parentheses that parse back to
//! the same tree.

use std::fmt;

use isomon_core::curve::{CurveElement, CurveSpec};
use isomon_core::difftower::{Tower, TowerBuilder};
use isomon_core::exactalg::{RationalFunction, Var, Q};
use num_bigint::{BigInt, BigUint};
use thiserror::Error;

type Rf = RationalFunction;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExprError {
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown identifier `{0}`")]
    UnknownIdentifier(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("{0} is not a polynomial")]
    NotPolynomial(String),
}

fn syntax(offset: usize, message: impl Into<String>) -> ExprError {
    ExprError::Syntax {
        offset,
        message: message.into(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Int(BigUint),
    Ident(String),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i64),
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Int(BigUint),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    End,
}

fn tokenize(src: &str) -> Result<Vec<(usize, Tok)>, ExprError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let n: BigUint = src[start..i].parse().expect("digits");
            out.push((start, Tok::Int(n)));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((start, Tok::Ident(src[start..i].to_string())));
        } else if "+-*/^".contains(c) {
            out.push((i, Tok::Op(c)));
            i += 1;
        } else if c == '(' {
            out.push((i, Tok::LParen));
            i += 1;
        } else if c == ')' {
            out.push((i, Tok::RParen));
            i += 1;
        } else {
            let ch = src[i..].chars().next().unwrap();
            return Err(syntax(i, format!("unexpected character `{ch}`")));
        }
    }
    out.push((src.len(), Tok::End));
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
}

const PREFIX_BP: u8 = 5;

fn infix_bp(op: char) -> Option<(u8, u8)> {
    match op {
        '+' | '-' => Some((1, 2)),
        '*' | '/' => Some((3, 4)),
        _ => None,
    }
}

impl Parser {
    fn peek(&self) -> &(usize, Tok) {
        &self.toks[self.pos]
    }

    fn next(&mut self) -> (usize, Tok) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expr(&mut self, min_bp: u8) -> Result<Expr, ExprError> {
        let mut lhs = self.prefix()?;
        loop {
            let op = match self.peek() {
                (_, Tok::Op(op)) => *op,
                (_, Tok::End) | (_, Tok::RParen) => break,
                (at, t) => return Err(syntax(*at, format!("expected an operator, found {}", describe(t)))),
            };
            let Some((lbp, rbp)) = infix_bp(op) else {
                return Err(syntax(self.peek().0, format!("unexpected `{op}`")));
            };
            if lbp < min_bp {
                break;
            }
            self.next();
            let rhs = self.expr(rbp)?;
            lhs = match op {
                '+' => Expr::Add(Box::new(lhs), Box::new(rhs)),
                '-' => Expr::Sub(Box::new(lhs), Box::new(rhs)),
                '*' => Expr::Mul(Box::new(lhs), Box::new(rhs)),
                _ => Expr::Div(Box::new(lhs), Box::new(rhs)),
            };
        }
        Ok(lhs)
    }

    /// Unary minus, or a power.
    fn prefix(&mut self) -> Result<Expr, ExprError> {
        if let (_, Tok::Op('-')) = self.peek() {
            self.next();
            let e = self.expr(PREFIX_BP)?;
            return Ok(Expr::Neg(Box::new(e)));
        }
        let base = self.atom()?;
        if let (_, Tok::Op('^')) = self.peek() {
            self.next();
            let n = self.exponent()?;
            if let (at, Tok::Op('^')) = self.peek() {
                return Err(syntax(*at, "chained `^`; add parentheses"));
            }
            return Ok(Expr::Pow(Box::new(base), n));
        }
        Ok(base)
    }

    fn exponent(&mut self) -> Result<i64, ExprError> {
        let paren = matches!(self.peek(), (_, Tok::LParen));
        if paren {
            self.next();
        }
        let neg = matches!(self.peek(), (_, Tok::Op('-')));
        if neg {
            self.next();
        }
        let n = match self.next() {
            (at, Tok::Int(n)) => i64::try_from(&n).map_err(|_| syntax(at, "exponent too large"))?,
            (at, t) => return Err(syntax(at, format!("expected an integer exponent, found {}", describe(&t)))),
        };
        if paren {
            match self.next() {
                (_, Tok::RParen) => {}
                (at, t) => return Err(syntax(at, format!("expected `)`, found {}", describe(&t)))),
            }
        }
        Ok(if neg { -n } else { n })
    }

    fn atom(&mut self) -> Result<Expr, ExprError> {
        match self.next() {
            (_, Tok::Int(n)) => Ok(Expr::Int(n)),
            (_, Tok::Ident(s)) => Ok(Expr::Ident(s)),
            (_, Tok::LParen) => {
                let e = self.expr(0)?;
                match self.next() {
                    (_, Tok::RParen) => Ok(e),
                    (at, t) => Err(syntax(at, format!("expected `)`, found {}", describe(&t)))),
                }
            }
            (at, t) => Err(syntax(at, format!("expected an operand, found {}", describe(&t)))),
        }
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Int(n) => format!("`{n}`"),
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Op(c) => format!("`{c}`"),
        Tok::LParen => "`(`".into(),
        Tok::RParen => "`)`".into(),
        Tok::End => "end of input".into(),
    }
}

pub fn parse(src: &str) -> Result<Expr, ExprError> {
    let mut p = Parser {
        toks: tokenize(src)?,
        pos: 0,
    };
    let e = p.expr(0)?;
    match p.peek() {
        (_, Tok::End) => Ok(e),
        (at, t) => Err(syntax(*at, format!("unexpected {}", describe(t)))),
    }
}

impl Expr {
    /// 0 sums, 1 products, 2 negation, 3 powers, 4 atoms.
    fn level(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 0,
            Expr::Mul(..) | Expr::Div(..) => 1,
            Expr::Neg(_) => 2,
            Expr::Pow(..) => 3,
            Expr::Int(_) | Expr::Ident(_) => 4,
        }
    }

    fn write(&self, out: &mut String, min: u8) {
        let wrap = self.level() < min;
        if wrap {
            out.push('(');
        }
        match self {
            Expr::Int(n) => out.push_str(&n.to_string()),
            Expr::Ident(s) => out.push_str(s),
            Expr::Neg(e) => {
                out.push('-');
                e.write(out, 2);
            }
            Expr::Add(a, b) | Expr::Sub(a, b) => {
                a.write(out, 0);
                out.push(if matches!(self, Expr::Add(..)) { '+' } else { '-' });
                b.write(out, 1);
            }
            Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.write(out, 1);
                out.push(if matches!(self, Expr::Mul(..)) { '*' } else { '/' });
                b.write(out, 2);
            }
            Expr::Pow(b, n) => {
                b.write(out, 4);
                out.push('^');
                out.push_str(&n.to_string());
            }
        }
        if wrap {
            out.push(')');
        }
    }

    pub fn identifiers(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect(&mut out);
        out
    }

    fn collect(&self, out: &mut Vec<String>) {
        match self {
            Expr::Int(_) => {}
            Expr::Ident(s) => {
                if !out.contains(s) {
                    out.push(s.clone());
                }
            }
            Expr::Neg(e) | Expr::Pow(e, _) => e.collect(out),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.collect(out);
                b.collect(out);
            }
        }
    }

    pub fn eval<S: Scope>(&self, s: &mut S) -> Result<S::Value, ExprError> {
        Ok(match self {
            Expr::Int(n) => s.int(n),
            Expr::Ident(name) => s.ident(name)?,
            Expr::Neg(e) => {
                let v = e.eval(s)?;
                s.neg(&v)
            }
            Expr::Add(a, b) => {
                let (a, b) = (a.eval(s)?, b.eval(s)?);
                s.add(&a, &b)
            }
            Expr::Sub(a, b) => {
                let (a, b) = (a.eval(s)?, b.eval(s)?);
                let nb = s.neg(&b);
                s.add(&a, &nb)
            }
            Expr::Mul(a, b) => {
                let (a, b) = (a.eval(s)?, b.eval(s)?);
                s.mul(&a, &b)
            }
            Expr::Div(a, b) => {
                let (a, b) = (a.eval(s)?, b.eval(s)?);
                let bi = s.inv(&b).ok_or(ExprError::DivisionByZero)?;
                s.mul(&a, &bi)
            }
            Expr::Pow(b, n) => {
                let b = b.eval(s)?;
                let base = if *n < 0 {
                    s.inv(&b).ok_or(ExprError::DivisionByZero)?
                } else {
                    b
                };
                let mut acc = s.int(&BigUint::from(1u32));
                for _ in 0..n.unsigned_abs() {
                    acc = s.mul(&acc, &base);
                }
                acc
            }
        })
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        self.write(&mut s, 0);
        f.write_str(&s)
    }
}

/// Values an expression evaluates into.
pub trait Scope {
    type Value: Clone;
    fn int(&self, n: &BigUint) -> Self::Value;
    fn ident(&mut self, name: &str) -> Result<Self::Value, ExprError>;
    fn neg(&self, a: &Self::Value) -> Self::Value;
    fn add(&self, a: &Self::Value, b: &Self::Value) -> Self::Value;
    fn mul(&self, a: &Self::Value, b: &Self::Value) -> Self::Value;
    fn inv(&self, a: &Self::Value) -> Option<Self::Value>;
}

fn rf_int(n: &BigUint) -> Rf {
    Rf::constant(Q::from_integer(BigInt::from(n.clone())))
}

/// Splits `rest` into `_`-separated base names.
fn split_directions<'a>(rest: &str, bases: &'a [String]) -> Option<Vec<&'a str>> {
    for b in bases {
        if rest == b {
            return Some(vec![b.as_str()]);
        }
        if let Some(tail) = rest.strip_prefix(b.as_str()).and_then(|r| r.strip_prefix('_')) {
            if let Some(mut more) = split_directions(tail, bases) {
                more.insert(0, b.as_str());
                return Some(more);
            }
        }
    }
    None
}

/// `gen_d1_d2…` as a generator name and a multi-index.
pub fn jet_name<'a>(name: &str, generators: &[String], bases: &'a [String]) -> Option<(String, Vec<(&'a str, u32)>)> {
    for g in generators {
        let Some(rest) = name.strip_prefix(g.as_str()).and_then(|r| r.strip_prefix('_')) else {
            continue;
        };
        if let Some(dirs) = split_directions(rest, bases) {
            let mut mi: Vec<(&str, u32)> = Vec::new();
            for d in dirs {
                match mi.iter_mut().find(|(n, _)| *n == d) {
                    Some(e) => e.1 += 1,
                    None => mi.push((d, 1)),
                }
            }
            return Some((g.clone(), mi));
        }
    }
    None
}

macro_rules! rf_arith {
    () => {
        type Value = Rf;
        fn int(&self, n: &BigUint) -> Rf {
            rf_int(n)
        }
        fn neg(&self, a: &Rf) -> Rf {
            a.neg()
        }
        fn add(&self, a: &Rf, b: &Rf) -> Rf {
            a + b
        }
        fn mul(&self, a: &Rf, b: &Rf) -> Rf {
            a * b
        }
        fn inv(&self, a: &Rf) -> Option<Rf> {
            a.inv().ok()
        }
    };
}

/// Identifiers are tower symbols; jets such as `u_x_t` are created on demand.
pub struct TowerScope<'a> {
    pub tower: &'a Tower,
}

impl Scope for TowerScope<'_> {
    rf_arith!();

    fn ident(&mut self, name: &str) -> Result<Rf, ExprError> {
        if let Some(v) = self.tower.lookup(name) {
            return Ok(Rf::var(v));
        }
        let unknown = || ExprError::UnknownIdentifier(name.to_string());
        let bases = self.tower.base_names();
        let (g, mi) = jet_name(name, &self.tower.generator_names(), &bases).ok_or_else(unknown)?;
        let v = self.tower.extend_jets(&g, &mi).map_err(|_| unknown())?;
        Ok(Rf::var(v))
    }
}

/// Like [`TowerScope`] while the tower is still being declared.
pub struct BuilderScope<'a> {
    pub builder: &'a mut TowerBuilder,
    pub generators: &'a [String],
    pub bases: &'a [String],
}

impl Scope for BuilderScope<'_> {
    rf_arith!();

    fn ident(&mut self, name: &str) -> Result<Rf, ExprError> {
        if let Ok(v) = self.builder.var(name) {
            return Ok(Rf::var(v));
        }
        let unknown = || ExprError::UnknownIdentifier(name.to_string());
        let (g, mi) = jet_name(name, self.generators, self.bases).ok_or_else(unknown)?;
        let v: Var = self.builder.jet(&g, &mi).map_err(|_| unknown())?;
        Ok(Rf::var(v))
    }
}

/// Elements of `k(x)[z]/(z² − f)`; the identifier `z` is the square root.
pub struct CurveScope<'a> {
    pub curve: &'a CurveSpec,
    pub tower: &'a Tower,
}

impl Scope for CurveScope<'_> {
    type Value = CurveElement;

    fn int(&self, n: &BigUint) -> CurveElement {
        CurveElement::new(rf_int(n), Rf::zero())
    }
    fn ident(&mut self, name: &str) -> Result<CurveElement, ExprError> {
        if name == "z" {
            return Ok(self.curve.z());
        }
        let v = self
            .tower
            .lookup(name)
            .ok_or_else(|| ExprError::UnknownIdentifier(name.to_string()))?;
        Ok(CurveElement::new(Rf::var(v), Rf::zero()))
    }
    fn neg(&self, a: &CurveElement) -> CurveElement {
        a.neg()
    }
    fn add(&self, a: &CurveElement, b: &CurveElement) -> CurveElement {
        a.sub(&b.neg())
    }
    fn mul(&self, a: &CurveElement, b: &CurveElement) -> CurveElement {
        a.mul(b, self.curve)
    }
    fn inv(&self, a: &CurveElement) -> Option<CurveElement> {
        a.inv(self.curve)
    }
}

/// Parses and evaluates in a tower.
pub fn eval_in(tower: &Tower, src: &str) -> Result<Rf, ExprError> {
    parse(src)?.eval(&mut TowerScope { tower })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rt(src: &str) {
        let e = parse(src).unwrap();
        let printed = e.to_string();
        assert_eq!(parse(&printed).unwrap(), e, "{src} printed as {printed}");
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(parse("a-b-c").unwrap().to_string(), "a-b-c");
        assert_eq!(parse("a-(b-c)").unwrap().to_string(), "a-(b-c)");
        assert_eq!(parse("a/b/c").unwrap().to_string(), "a/b/c");
        assert_eq!(parse("a/(b*c)").unwrap().to_string(), "a/(b*c)");
        assert_eq!(parse("-x^2").unwrap(), Expr::Neg(Box::new(Expr::Pow(Box::new(Expr::Ident("x".into())), 2))));
        assert_eq!(parse("(-x)^2").unwrap().to_string(), "(-x)^2");
        assert_eq!(parse("x^(-2)").unwrap(), parse("x^-2").unwrap());
        assert_eq!(parse(" 2 * ( x + 1 ) ").unwrap().to_string(), "2*(x+1)");
    }

    #[test]
    fn round_trips() {
        for s in [
            "1/((x-t)*(x-1))",
            "(3*x^2 - 2*(1+t)*x + t)/(2*z)",
            "-a*-b--c",
            "((a))^3/(b-c)^-1",
            "a-(b+c)*(d-e)/f",
        ] {
            rt(s);
        }
    }

    #[test]
    fn syntax_errors() {
        assert_eq!(parse("x+").unwrap_err(), syntax(2, "expected an operand, found end of input"));
        assert!(matches!(parse("x^y"), Err(ExprError::Syntax { offset: 2, .. })));
        assert!(matches!(parse("x^2^3"), Err(ExprError::Syntax { offset: 3, .. })));
        assert!(matches!(parse("(x"), Err(ExprError::Syntax { offset: 2, .. })));
        assert!(matches!(parse("x y"), Err(ExprError::Syntax { offset: 2, .. })));
        assert!(matches!(parse("x $ y"), Err(ExprError::Syntax { offset: 2, .. })));
        assert!(matches!(parse(""), Err(ExprError::Syntax { offset: 0, .. })));
    }

    #[test]
    fn evaluation() {
        let tw = Tower::rational(Some("x"), &["t"]).unwrap();
        let x = Rf::var(tw.var("x").unwrap());
        let t = Rf::var(tw.var("t").unwrap());
        let one = Rf::one();
        let e = eval_in(&tw, "1/((x-t)*(x-1))").unwrap();
        assert_eq!(e, &one / &(&(&x - &t) * &(&x - &one)));
        assert_eq!(eval_in(&tw, "x^-2*x^2").unwrap(), one);
        assert_eq!(eval_in(&tw, "1/(x-x)"), Err(ExprError::DivisionByZero));
        assert_eq!(eval_in(&tw, "y+1"), Err(ExprError::UnknownIdentifier("y".into())));
    }

    #[test]
    fn jets_are_resolved() {
        let bases = vec!["x".to_string(), "t1".to_string()];
        let gens = vec!["u".to_string(), "u_x".to_string()];
        assert_eq!(jet_name("u_x_t1_x", &gens, &bases), Some(("u".to_string(), vec![("x", 2), ("t1", 1)])));
        assert_eq!(jet_name("u_t2", &gens, &bases), None);
    }
}
