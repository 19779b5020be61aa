//! Reduced rational functions over ℚ.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};

use super::gcd::{gcd, squarefree_in};
use super::poly::{MultiPoly, Q};
use super::registry::Var;
use super::roots::linear_factors;
use super::AlgError;

/// `num / den` with `gcd(num, den) = 1` and the leading coefficient of `den`
/// (graded lex) equal to 1. Equal values have equal representations.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct RationalFunction {
    num: MultiPoly,
    den: MultiPoly,
}

impl Default for RationalFunction {
    fn default() -> Self {
        Self::zero()
    }
}

impl RationalFunction {
    pub fn normalize(num: MultiPoly, den: MultiPoly) -> Result<Self, AlgError> {
        if den.is_zero() {
            return Err(AlgError::ZeroDenominator);
        }
        if num.is_zero() {
            return Ok(Self::zero());
        }
        let g = gcd(&num, &den);
        let (num, den) = if g.is_one() {
            (num, den)
        } else {
            (
                num.div_exact(&g).expect("gcd divides"),
                den.div_exact(&g).expect("gcd divides"),
            )
        };
        Ok(Self::scaled(num, den))
    }

    /// Assumes `gcd(num, den) = 1`, only fixes the denominator's leading coefficient.
    fn scaled(num: MultiPoly, den: MultiPoly) -> Self {
        let lc = den.lc();
        if lc.is_one() {
            RationalFunction { num, den }
        } else {
            let inv = Q::one() / lc;
            RationalFunction {
                num: num.scale(&inv),
                den: den.scale(&inv),
            }
        }
    }

    pub fn zero() -> Self {
        RationalFunction {
            num: MultiPoly::zero(),
            den: MultiPoly::one(),
        }
    }

    pub fn one() -> Self {
        Self::from_poly(MultiPoly::one())
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_poly(MultiPoly::from_int(n))
    }

    pub fn constant(c: Q) -> Self {
        Self::from_poly(MultiPoly::constant(c))
    }

    pub fn from_poly(p: MultiPoly) -> Self {
        RationalFunction {
            num: p,
            den: MultiPoly::one(),
        }
    }

    pub fn var(v: Var) -> Self {
        Self::from_poly(MultiPoly::var(v))
    }

    pub fn num(&self) -> &MultiPoly {
        &self.num
    }

    pub fn den(&self) -> &MultiPoly {
        &self.den
    }

    pub fn into_parts(self) -> (MultiPoly, MultiPoly) {
        (self.num, self.den)
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.den.is_one() && self.num.is_constant()
    }

    pub fn constant_value(&self) -> Option<Q> {
        if self.den.is_one() {
            self.num.constant_value()
        } else {
            None
        }
    }

    pub fn contains_var(&self, v: Var) -> bool {
        self.num.contains_var(v) || self.den.contains_var(v)
    }

    pub fn vars(&self) -> std::collections::BTreeSet<Var> {
        let mut s = self.num.vars();
        s.extend(self.den.vars());
        s
    }

    pub fn neg(&self) -> Self {
        RationalFunction {
            num: MultiPoly::neg(&self.num),
            den: self.den.clone(),
        }
    }

    pub fn add_rf(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        if self.den == other.den {
            let num = &self.num + &other.num;
            return Self::normalize(num, self.den.clone()).expect("nonzero denominator");
        }
        if self.den.is_one() {
            return Self::scaled(&(&self.num * &other.den) + &other.num, other.den.clone());
        }
        if other.den.is_one() {
            return Self::scaled(&self.num + &(&other.num * &self.den), self.den.clone());
        }
        let g = gcd(&self.den, &other.den);
        if g.is_one() {
            let num = &(&self.num * &other.den) + &(&other.num * &self.den);
            let den = &self.den * &other.den;
            return Self::scaled(num, den);
        }
        let b1 = self.den.div_exact(&g).unwrap();
        let d1 = other.den.div_exact(&g).unwrap();
        let num = &(&self.num * &d1) + &(&other.num * &b1);
        if num.is_zero() {
            return Self::zero();
        }
        // Only factors of g can cancel.
        let g2 = gcd(&num, &g);
        let den = &(&b1 * &other.den);
        if g2.is_one() {
            Self::scaled(num, den.clone())
        } else {
            Self::scaled(num.div_exact(&g2).unwrap(), den.div_exact(&g2).unwrap())
        }
    }

    pub fn sub_rf(&self, other: &Self) -> Self {
        self.add_rf(&other.neg())
    }

    pub fn mul_rf(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        if self.den.is_one() && other.den.is_one() {
            return Self::from_poly(&self.num * &other.num);
        }
        let g1 = gcd(&self.num, &other.den);
        let g2 = gcd(&other.num, &self.den);
        let (n1, d2) = if g1.is_one() {
            (self.num.clone(), other.den.clone())
        } else {
            (self.num.div_exact(&g1).unwrap(), other.den.div_exact(&g1).unwrap())
        };
        let (n2, d1) = if g2.is_one() {
            (other.num.clone(), self.den.clone())
        } else {
            (other.num.div_exact(&g2).unwrap(), self.den.div_exact(&g2).unwrap())
        };
        Self::scaled(&n1 * &n2, &d1 * &d2)
    }

    pub fn inv(&self) -> Result<Self, AlgError> {
        if self.is_zero() {
            return Err(AlgError::DivisionByZero);
        }
        Ok(Self::scaled(self.den.clone(), self.num.clone()))
    }

    pub fn div_rf(&self, other: &Self) -> Result<Self, AlgError> {
        Ok(self.mul_rf(&other.inv()?))
    }

    pub fn scale(&self, c: &Q) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        RationalFunction {
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }

    pub fn mul_poly(&self, p: &MultiPoly) -> Self {
        self.mul_rf(&Self::from_poly(p.clone()))
    }

    pub fn pow(&self, e: i64) -> Result<Self, AlgError> {
        if e < 0 {
            return self.inv()?.pow(-e);
        }
        let e = e as u32;
        Ok(RationalFunction {
            num: self.num.pow(e),
            den: self.den.pow(e),
        })
    }

    /// Partial derivative with respect to `v` (all other variables constant).
    pub fn derive(&self, v: Var) -> Self {
        let dn = self.num.derivative(v);
        let dd = self.den.derivative(v);
        if dd.is_zero() {
            return RationalFunction {
                num: dn,
                den: self.den.clone(),
            }
            .renormalized();
        }
        // (n' d - n d') / d^2, cancelling through the squarefree structure of d.
        let g = gcd(&self.den, &dd);
        let d_over_g = self.den.div_exact(&g).unwrap();
        let dd_over_g = dd.div_exact(&g).unwrap();
        let num = &(&dn * &d_over_g) - &(&self.num * &dd_over_g);
        let den = &self.den * &d_over_g;
        Self::normalize(num, den).expect("nonzero denominator")
    }

    fn renormalized(self) -> Self {
        if self.num.is_zero() {
            Self::zero()
        } else {
            Self::normalize(self.num, self.den).expect("nonzero denominator")
        }
    }

    /// Substitutes a rational function for `v`.
    pub fn substitute(&self, v: Var, value: &RationalFunction) -> Self {
        if !self.contains_var(v) {
            return self.clone();
        }
        let n = subst_poly(&self.num, v, value);
        let d = subst_poly(&self.den, v, value);
        n.div_rf(&d).expect("substitution hit a pole")
    }

    /// Evaluates `v` at a rational point; `None` if the point is a pole.
    pub fn eval_var(&self, v: Var, value: &Q) -> Option<Self> {
        let d = self.den.eval_var(v, value);
        if d.is_zero() {
            return None;
        }
        Some(Self::normalize(self.num.eval_var(v, value), d).unwrap())
    }

    /// Writes the value in expression syntax, factoring univariate
    /// denominators into linear pieces where possible.
    pub fn write_with(&self, names: &[String], out: &mut String) {
        if self.den.is_one() {
            self.num.write_with(names, out);
            return;
        }
        // Move rational content of the numerator into a visible integer factor.
        let c = self.num.rational_content();
        let c = if self.num.lc().is_negative() { -c } else { c };
        let prim = self.num.scale(&(Q::one() / &c));
        let num_int = c.numer().clone();
        let den_int = c.denom().clone();
        let neg = num_int.is_negative();
        let num_abs = num_int.abs();
        if neg {
            out.push('-');
        }
        let mut num_s = String::new();
        if prim.is_one() {
            num_s.push_str(&num_abs.to_string());
        } else {
            let mut p = String::new();
            prim.write_with(names, &mut p);
            let one = num_traits::One::is_one(&num_abs);
            if !one {
                num_s.push_str(&num_abs.to_string());
                num_s.push('*');
            }
            if prim.len() > 1 {
                num_s.push('(');
                num_s.push_str(&p);
                num_s.push(')');
            } else {
                num_s.push_str(&p);
            }
        }
        out.push_str(&num_s);
        out.push('/');
        let mut factors: Vec<String> = Vec::new();
        if !num_traits::One::is_one(&den_int) {
            factors.push(den_int.to_string());
        }
        for (f, m) in display_factors(&self.den) {
            let mut s = String::new();
            f.write_with(names, &mut s);
            let wrapped = if f.len() > 1 || (!f.is_monomial() && m > 1) {
                format!("({s})")
            } else if f.is_monomial() && f.total_degree() > 1 && m > 1 {
                format!("({s})")
            } else {
                s
            };
            if m > 1 {
                factors.push(format!("{wrapped}^{m}"));
            } else {
                factors.push(wrapped);
            }
        }
        if factors.len() == 1 && (factors[0].starts_with('(') || !factors[0].contains('*')) {
            out.push_str(&factors[0]);
        } else {
            out.push('(');
            out.push_str(&factors.join("*"));
            out.push(')');
        }
    }

    pub fn to_string_with(&self, names: &[String]) -> String {
        let mut s = String::new();
        self.write_with(names, &mut s);
        s
    }

    pub fn display<'a>(&'a self, names: &'a [String]) -> impl fmt::Display + 'a {
        DisplayRf { f: self, names }
    }
}

/// Factors a denominator for printing: squarefree parts, split into linear
/// factors when univariate. Product of `f^m` equals `den`.
fn display_factors(den: &MultiPoly) -> Vec<(MultiPoly, u32)> {
    let vars = den.vars();
    if vars.len() != 1 {
        return vec![(den.clone(), 1)];
    }
    let v = *vars.iter().next().unwrap();
    let (unit, sqf) = squarefree_in(den, v);
    let mut out = Vec::new();
    let mut scale = unit.constant_value().unwrap_or_else(Q::one);
    for (f, m) in sqf {
        let (lin, rest) = linear_factors(&f, v);
        for l in lin {
            let lc = l.lc();
            scale *= lc.clone().pow_u(m);
            out.push((l.make_monic(), m));
        }
        if rest.degree_in(v) > 0 {
            let lc = rest.lc();
            scale *= lc.clone().pow_u(m);
            out.push((rest.make_monic(), m));
        } else if let Some(c) = rest.constant_value() {
            scale *= c.pow_u(m);
        }
    }
    if !scale.is_one() {
        // Denominators are monic; any leftover scale means factoring failed.
        return vec![(den.clone(), 1)];
    }
    out.sort_by(|a, b| a.0.total_degree().cmp(&b.0.total_degree()).then(a.0.cmp(&b.0)));
    out
}

trait PowU {
    fn pow_u(self, e: u32) -> Self;
}

impl PowU for Q {
    fn pow_u(self, e: u32) -> Q {
        num_traits::Pow::pow(self, e)
    }
}

fn subst_poly(p: &MultiPoly, v: Var, value: &RationalFunction) -> RationalFunction {
    let coeffs = p.coeffs_in(v);
    let mut acc = RationalFunction::zero();
    for c in coeffs.iter().rev() {
        acc = acc.mul_rf(value).add_rf(&RationalFunction::from_poly(c.clone()));
    }
    acc
}

struct DisplayRf<'a> {
    f: &'a RationalFunction,
    names: &'a [String],
}

impl fmt::Display for DisplayRf<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.f.to_string_with(self.names))
    }
}

impl Ord for RationalFunction {
    fn cmp(&self, other: &Self) -> Ordering {
        self.den.cmp(&other.den).then_with(|| self.num.cmp(&other.num))
    }
}

impl PartialOrd for RationalFunction {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl From<MultiPoly> for RationalFunction {
    fn from(p: MultiPoly) -> Self {
        Self::from_poly(p)
    }
}

macro_rules! rf_binop {
    ($tr:ident, $method:ident, $body:expr) => {
        impl $tr<&RationalFunction> for &RationalFunction {
            type Output = RationalFunction;
            fn $method(self, rhs: &RationalFunction) -> RationalFunction {
                $body(self, rhs)
            }
        }
        impl $tr<RationalFunction> for RationalFunction {
            type Output = RationalFunction;
            fn $method(self, rhs: RationalFunction) -> RationalFunction {
                $body(&self, &rhs)
            }
        }
        impl $tr<&RationalFunction> for RationalFunction {
            type Output = RationalFunction;
            fn $method(self, rhs: &RationalFunction) -> RationalFunction {
                $body(&self, rhs)
            }
        }
        impl $tr<RationalFunction> for &RationalFunction {
            type Output = RationalFunction;
            fn $method(self, rhs: RationalFunction) -> RationalFunction {
                $body(self, &rhs)
            }
        }
    };
}

rf_binop!(Add, add, |a: &RationalFunction, b: &RationalFunction| a.add_rf(b));
rf_binop!(Sub, sub, |a: &RationalFunction, b: &RationalFunction| a.sub_rf(b));
rf_binop!(Mul, mul, |a: &RationalFunction, b: &RationalFunction| a.mul_rf(b));
// Panics on division by zero, like integer division.
rf_binop!(Div, div, |a: &RationalFunction, b: &RationalFunction| a
    .div_rf(b)
    .expect("division by zero rational function"));

impl Neg for &RationalFunction {
    type Output = RationalFunction;
    fn neg(self) -> RationalFunction {
        RationalFunction::neg(self)
    }
}

impl Neg for RationalFunction {
    type Output = RationalFunction;
    fn neg(self) -> RationalFunction {
        RationalFunction::neg(&self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::poly::q_frac;

    fn x() -> RationalFunction {
        RationalFunction::var(Var(0))
    }
    fn t() -> RationalFunction {
        RationalFunction::var(Var(1))
    }
    fn names() -> Vec<String> {
        vec!["x".into(), "t".into()]
    }

    #[test]
    fn normalize_examples() {
        let (xp, tp) = (MultiPoly::var(Var(0)), MultiPoly::var(Var(1)));
        let num = &(&xp * &xp) - &(&tp * &tp);
        let r = RationalFunction::normalize(num, &xp - &tp).unwrap();
        assert_eq!(r, &x() + &t());
        let z = RationalFunction::normalize(MultiPoly::zero(), MultiPoly::from_int(5)).unwrap();
        assert!(z.is_zero());
        let h = RationalFunction::normalize(xp.scale(&q_frac(2, 1)), MultiPoly::from_int(4)).unwrap();
        assert!(h.den().is_one());
        assert_eq!(h.num(), &xp.scale(&q_frac(1, 2)));
        assert!(matches!(
            RationalFunction::normalize(xp.clone(), MultiPoly::zero()),
            Err(AlgError::ZeroDenominator)
        ));
    }

    #[test]
    fn quotient_rule_examples() {
        let f = RationalFunction::one() / (&x() - &t());
        let sq = (&x() - &t()).pow(2).unwrap();
        assert_eq!(f.derive(Var(0)), -(RationalFunction::one() / &sq));
        assert_eq!(f.derive(Var(1)), RationalFunction::one() / &sq);
        assert_eq!((&t() / &x()).derive(Var(1)), RationalFunction::one() / &x());
    }

    #[test]
    fn printing_factors_denominators() {
        let tt = t();
        let one = RationalFunction::one();
        let den = &tt * &(&tt - &one);
        let c = (&(&tt * &RationalFunction::from_int(2)) - &one) / &den;
        assert_eq!(c.to_string_with(&names()), "(2*t-1)/(t*(t-1))");
        let d = &one / &(&den * &RationalFunction::from_int(4));
        assert_eq!(d.to_string_with(&names()), "1/(4*t*(t-1))");
        let e = -(&one / &(&x() - &tt).pow(2).unwrap());
        assert_eq!(e.to_string_with(&names()), "-1/(x^2-2*x*t+t^2)");
        let f = &one / &tt.pow(2).unwrap();
        assert_eq!(f.to_string_with(&names()), "1/t^2");
    }
}
