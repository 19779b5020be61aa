//! Sparse multivariate polynomials over ℚ.
//!
//! Terms are kept sorted in strictly descending graded lexicographic order
//! with no zero coefficients, so structural equality is polynomial equality.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap};
use std::fmt::{self, Write as _};
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use smallvec::SmallVec;

use super::registry::Var;

pub type Q = BigRational;

pub fn q_int(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn q_frac(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Exponent vector indexed by `Var`, trailing zeros trimmed.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Monomial(SmallVec<[u32; 8]>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(SmallVec::new())
    }

    pub fn var(v: Var, e: u32) -> Self {
        let mut m = Monomial::one();
        if e > 0 {
            m.0.resize(v.index() + 1, 0);
            m.0[v.index()] = e;
        }
        m
    }

    fn trim(&mut self) {
        while let Some(&0) = self.0.last() {
            self.0.pop();
        }
    }

    pub fn exp(&self, v: Var) -> u32 {
        self.0.get(v.index()).copied().unwrap_or(0)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn vars(&self) -> impl Iterator<Item = (Var, u32)> + '_ {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(i, &e)| (Var(i as u32), e))
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let n = self.0.len().max(other.0.len());
        let mut out: SmallVec<[u32; 8]> = SmallVec::with_capacity(n);
        for i in 0..n {
            out.push(self.0.get(i).copied().unwrap_or(0) + other.0.get(i).copied().unwrap_or(0));
        }
        Monomial(out)
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.len() <= other.0.len() && self.0.iter().zip(other.0.iter()).all(|(a, b)| a <= b)
    }

    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        if !other.divides(self) {
            return None;
        }
        let mut out = self.0.clone();
        for (i, e) in other.0.iter().enumerate() {
            out[i] -= e;
        }
        let mut m = Monomial(out);
        m.trim();
        Some(m)
    }

    pub fn gcd(&self, other: &Monomial) -> Monomial {
        let n = self.0.len().min(other.0.len());
        let mut m = Monomial((0..n).map(|i| self.0[i].min(other.0[i])).collect());
        m.trim();
        m
    }

    /// Removes variable `v`, returning its exponent.
    pub fn split_off(&self, v: Var) -> (u32, Monomial) {
        let e = self.exp(v);
        if e == 0 {
            return (0, self.clone());
        }
        let mut m = self.clone();
        m.0[v.index()] = 0;
        m.trim();
        (e, m)
    }

    pub fn with_exp(&self, v: Var, e: u32) -> Monomial {
        let mut m = self.clone();
        if m.0.len() <= v.index() {
            m.0.resize(v.index() + 1, 0);
        }
        m.0[v.index()] = e;
        m.trim();
        m
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.degree().cmp(&other.degree()) {
            Ordering::Equal => {}
            o => return o,
        }
        let n = self.0.len().max(other.0.len());
        for i in 0..n {
            let a = self.0.get(i).copied().unwrap_or(0);
            let b = other.0.get(i).copied().unwrap_or(0);
            match a.cmp(&b) {
                Ordering::Equal => {}
                o => return o,
            }
        }
        Ordering::Equal
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct MultiPoly {
    terms: Vec<(Monomial, Q)>,
}

impl MultiPoly {
    pub fn zero() -> Self {
        MultiPoly { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Q::one())
    }

    pub fn constant(c: Q) -> Self {
        if c.is_zero() {
            Self::zero()
        } else {
            MultiPoly {
                terms: vec![(Monomial::one(), c)],
            }
        }
    }

    pub fn from_int(n: i64) -> Self {
        Self::constant(q_int(n))
    }

    pub fn var(v: Var) -> Self {
        MultiPoly {
            terms: vec![(Monomial::var(v, 1), Q::one())],
        }
    }

    pub fn term(m: Monomial, c: Q) -> Self {
        if c.is_zero() {
            Self::zero()
        } else {
            MultiPoly { terms: vec![(m, c)] }
        }
    }

    /// Builds a polynomial from arbitrary terms (combined and sorted).
    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, Q)>) -> Self {
        let mut acc: HashMap<Monomial, Q> = HashMap::new();
        for (m, c) in terms {
            if c.is_zero() {
                continue;
            }
            match acc.get_mut(&m) {
                Some(v) => *v += c,
                None => {
                    acc.insert(m, c);
                }
            }
        }
        let mut terms: Vec<_> = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        terms.sort_by(|a, b| b.0.cmp(&a.0));
        MultiPoly { terms }
    }

    pub fn terms(&self) -> &[(Monomial, Q)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0.is_one() && self.terms[0].1.is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms[0].0.is_one())
    }

    pub fn constant_value(&self) -> Option<Q> {
        if self.terms.is_empty() {
            Some(Q::zero())
        } else if self.is_constant() {
            Some(self.terms[0].1.clone())
        } else {
            None
        }
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    /// Leading coefficient under the graded lex order (zero for the zero polynomial).
    pub fn lc(&self) -> Q {
        self.terms.first().map(|t| t.1.clone()).unwrap_or_else(Q::zero)
    }

    pub fn lm(&self) -> Option<&Monomial> {
        self.terms.first().map(|t| &t.0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.iter().map(|t| t.0.degree()).max().unwrap_or(0)
    }

    pub fn degree_in(&self, v: Var) -> u32 {
        self.terms.iter().map(|t| t.0.exp(v)).max().unwrap_or(0)
    }

    pub fn contains_var(&self, v: Var) -> bool {
        self.terms.iter().any(|t| t.0.exp(v) > 0)
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        let mut s = BTreeSet::new();
        for (m, _) in &self.terms {
            for (v, _) in m.vars() {
                s.insert(v);
            }
        }
        s
    }

    pub fn neg(&self) -> MultiPoly {
        MultiPoly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn scale(&self, c: &Q) -> MultiPoly {
        if c.is_zero() {
            return Self::zero();
        }
        MultiPoly {
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect(),
        }
    }

    pub fn mul_term(&self, m: &Monomial, c: &Q) -> MultiPoly {
        if c.is_zero() {
            return Self::zero();
        }
        // Multiplying by a monomial preserves the order.
        MultiPoly {
            terms: self.terms.iter().map(|(mm, a)| (mm.mul(m), a * c)).collect(),
        }
    }

    fn merge(&self, other: &MultiPoly, negate_other: bool) -> MultiPoly {
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() && j < other.terms.len() {
            let (ma, ca) = &self.terms[i];
            let (mb, cb) = &other.terms[j];
            match ma.cmp(mb) {
                Ordering::Greater => {
                    out.push((ma.clone(), ca.clone()));
                    i += 1;
                }
                Ordering::Less => {
                    out.push((mb.clone(), if negate_other { -cb } else { cb.clone() }));
                    j += 1;
                }
                Ordering::Equal => {
                    let c = if negate_other { ca - cb } else { ca + cb };
                    if !c.is_zero() {
                        out.push((ma.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend(self.terms[i..].iter().cloned());
        for (m, c) in &other.terms[j..] {
            out.push((m.clone(), if negate_other { -c } else { c.clone() }));
        }
        MultiPoly { terms: out }
    }

    pub fn add_poly(&self, other: &MultiPoly) -> MultiPoly {
        self.merge(other, false)
    }

    pub fn sub_poly(&self, other: &MultiPoly) -> MultiPoly {
        self.merge(other, true)
    }

    pub fn mul_poly(&self, other: &MultiPoly) -> MultiPoly {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        if other.terms.len() == 1 {
            return self.mul_term(&other.terms[0].0, &other.terms[0].1);
        }
        if self.terms.len() == 1 {
            return other.mul_term(&self.terms[0].0, &self.terms[0].1);
        }
        // clear denominators so only one reduction happens per output term
        let cleared = |t: &[(Monomial, Q)]| {
            let l = t.iter().fold(BigInt::one(), |l, (_, c)| l.lcm(c.denom()));
            let ints: Vec<BigInt> = t.iter().map(|(_, c)| c.numer() * (&l / c.denom())).collect();
            (l, ints)
        };
        let (la, ia) = cleared(&self.terms);
        let (lb, ib) = cleared(&other.terms);
        let mut acc: HashMap<Monomial, BigInt> = HashMap::with_capacity(self.terms.len() * other.terms.len());
        for ((ma, _), ca) in self.terms.iter().zip(&ia) {
            for ((mb, _), cb) in other.terms.iter().zip(&ib) {
                *acc.entry(ma.mul(mb)).or_insert_with(BigInt::zero) += ca * cb;
            }
        }
        let l = la * lb;
        let mut terms: Vec<_> = acc
            .into_iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(m, c)| (m, Q::new(c, l.clone())))
            .collect();
        terms.sort_by(|a, b| b.0.cmp(&a.0));
        MultiPoly { terms }
    }

    pub fn pow(&self, n: u32) -> MultiPoly {
        let mut result = MultiPoly::one();
        let mut base = self.clone();
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul_poly(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_poly(&base);
            }
        }
        result
    }

    pub fn derivative(&self, v: Var) -> MultiPoly {
        let terms = self.terms.iter().filter_map(|(m, c)| {
            let e = m.exp(v);
            if e == 0 {
                None
            } else {
                Some((m.with_exp(v, e - 1), c * Q::from_integer(BigInt::from(e))))
            }
        });
        // Differentiation in one variable can reorder terms under grlex.
        MultiPoly::from_terms(terms)
    }

    /// Coefficients with respect to `v`: `self = Σ out[i]·v^i`.
    pub fn coeffs_in(&self, v: Var) -> Vec<MultiPoly> {
        let deg = self.degree_in(v) as usize;
        let mut buckets: Vec<Vec<(Monomial, Q)>> = vec![Vec::new(); deg + 1];
        for (m, c) in &self.terms {
            let (e, rest) = m.split_off(v);
            buckets[e as usize].push((rest, c.clone()));
        }
        buckets
            .into_iter()
            .map(|mut ts| {
                ts.sort_by(|a, b| b.0.cmp(&a.0));
                MultiPoly { terms: ts }
            })
            .collect()
    }

    pub fn from_coeffs_in(v: Var, coeffs: &[MultiPoly]) -> MultiPoly {
        let mut terms = Vec::new();
        for (i, c) in coeffs.iter().enumerate() {
            for (m, a) in &c.terms {
                terms.push((m.with_exp(v, m.exp(v) + i as u32), a.clone()));
            }
        }
        MultiPoly::from_terms(terms)
    }

    /// Leading coefficient with respect to `v` (a polynomial in the other variables).
    pub fn lc_in(&self, v: Var) -> MultiPoly {
        let d = self.degree_in(v);
        let terms: Vec<_> = self
            .terms
            .iter()
            .filter(|(m, _)| m.exp(v) == d)
            .map(|(m, c)| (m.split_off(v).1, c.clone()))
            .collect();
        MultiPoly::from_terms(terms)
    }

    /// Exact division; `None` when `d` does not divide `self`.
    pub fn div_exact(&self, d: &MultiPoly) -> Option<MultiPoly> {
        if d.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(Self::zero());
        }
        if let Some(c) = d.constant_value() {
            return Some(self.scale(&(Q::one() / c)));
        }
        if d.terms.len() == 1 {
            let (dm, dc) = &d.terms[0];
            let inv = Q::one() / dc;
            let mut terms = Vec::with_capacity(self.terms.len());
            for (m, c) in &self.terms {
                terms.push((m.div(dm)?, c * &inv));
            }
            return Some(MultiPoly { terms });
        }
        let (dm, dc) = &d.terms[0];
        let inv = Q::one() / dc;
        let mut rem = self.clone();
        let mut quot = Vec::new();
        while let Some((rm, rc)) = rem.terms.first().cloned() {
            let qm = rm.div(dm)?;
            let qc = rc * &inv;
            rem = rem.sub_poly(&d.mul_term(&qm, &qc));
            quot.push((qm, qc));
        }
        quot.sort_by(|a, b| b.0.cmp(&a.0));
        Some(MultiPoly { terms: quot })
    }

    /// Substitutes the polynomial `value` for `v`.
    pub fn substitute(&self, v: Var, value: &MultiPoly) -> MultiPoly {
        if !self.contains_var(v) {
            return self.clone();
        }
        let coeffs = self.coeffs_in(v);
        let mut acc = MultiPoly::zero();
        for c in coeffs.iter().rev() {
            acc = acc.mul_poly(value).add_poly(c);
        }
        acc
    }

    pub fn eval_var(&self, v: Var, value: &Q) -> MultiPoly {
        self.substitute(v, &MultiPoly::constant(value.clone()))
    }

    /// Sum of the terms of total degree exactly `d`.
    pub fn homogeneous_part(&self, d: u32) -> MultiPoly {
        MultiPoly {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() == d)
                .cloned()
                .collect(),
        }
    }

    pub fn truncate(&self, max_degree: u32) -> MultiPoly {
        MultiPoly {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() <= max_degree)
                .cloned()
                .collect(),
        }
    }

    /// Common monomial factor of all terms.
    pub fn monomial_content(&self) -> Monomial {
        let mut it = self.terms.iter();
        let Some((first, _)) = it.next() else {
            return Monomial::one();
        };
        let mut g = first.clone();
        for (m, _) in it {
            if g.is_one() {
                break;
            }
            g = g.gcd(m);
        }
        g
    }

    /// Positive rational `c` such that `self / c` has coprime integer coefficients.
    pub fn rational_content(&self) -> Q {
        let mut num = BigInt::zero();
        let mut den = BigInt::one();
        for (_, c) in &self.terms {
            num = num.gcd(c.numer());
            den = den.lcm(c.denom());
        }
        if num.is_zero() {
            return Q::one();
        }
        Q::new(num, den)
    }

    /// Integer-coefficient primitive associate with positive leading coefficient.
    pub fn primitive_integer(&self) -> MultiPoly {
        if self.is_zero() {
            return Self::zero();
        }
        let mut c = self.rational_content();
        if self.lc().is_negative() {
            c = -c;
        }
        self.scale(&(Q::one() / c))
    }

    pub fn make_monic(&self) -> MultiPoly {
        if self.is_zero() {
            return Self::zero();
        }
        self.scale(&(Q::one() / self.lc()))
    }

    pub fn map_coeffs(&self, f: impl Fn(&Q) -> Q) -> MultiPoly {
        MultiPoly::from_terms(self.terms.iter().map(|(m, c)| (m.clone(), f(c))))
    }

    pub fn write_with(&self, names: &[String], out: &mut String) {
        if self.terms.is_empty() {
            out.push('0');
            return;
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            if i > 0 {
                out.push(if neg { '-' } else { '+' });
            } else if neg {
                out.push('-');
            }
            let a = c.abs();
            if m.is_one() {
                write_q(&a, out);
                continue;
            }
            if !a.is_one() {
                write_q(&a, out);
                out.push('*');
            }
            let mut first = true;
            for (v, e) in m.vars() {
                if !first {
                    out.push('*');
                }
                first = false;
                out.push_str(&names[v.index()]);
                if e > 1 {
                    let _ = write!(out, "^{e}");
                }
            }
        }
    }

    pub fn display<'a>(&'a self, names: &'a [String]) -> impl fmt::Display + 'a {
        DisplayPoly { p: self, names }
    }
}

fn write_q(a: &Q, out: &mut String) {
    if a.is_integer() {
        let _ = write!(out, "{}", a.numer());
    } else {
        let _ = write!(out, "{}/{}", a.numer(), a.denom());
    }
}

struct DisplayPoly<'a> {
    p: &'a MultiPoly,
    names: &'a [String],
}

impl fmt::Display for DisplayPoly<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        self.p.write_with(self.names, &mut s);
        f.write_str(&s)
    }
}

impl Ord for MultiPoly {
    fn cmp(&self, other: &Self) -> Ordering {
        for (a, b) in self.terms.iter().zip(other.terms.iter()) {
            match a.0.cmp(&b.0) {
                Ordering::Equal => {}
                o => return o,
            }
            match a.1.cmp(&b.1) {
                Ordering::Equal => {}
                o => return o,
            }
        }
        self.terms.len().cmp(&other.terms.len())
    }
}

impl PartialOrd for MultiPoly {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

macro_rules! poly_binop {
    ($tr:ident, $method:ident, $impl_fn:ident) => {
        impl $tr<&MultiPoly> for &MultiPoly {
            type Output = MultiPoly;
            fn $method(self, rhs: &MultiPoly) -> MultiPoly {
                self.$impl_fn(rhs)
            }
        }
        impl $tr<MultiPoly> for MultiPoly {
            type Output = MultiPoly;
            fn $method(self, rhs: MultiPoly) -> MultiPoly {
                (&self).$impl_fn(&rhs)
            }
        }
        impl $tr<&MultiPoly> for MultiPoly {
            type Output = MultiPoly;
            fn $method(self, rhs: &MultiPoly) -> MultiPoly {
                (&self).$impl_fn(rhs)
            }
        }
    };
}

poly_binop!(Add, add, add_poly);
poly_binop!(Sub, sub, sub_poly);
poly_binop!(Mul, mul, mul_poly);

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        MultiPoly::neg(self)
    }
}

impl Neg for MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        MultiPoly::neg(&self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> MultiPoly {
        MultiPoly::var(Var(0))
    }
    fn t() -> MultiPoly {
        MultiPoly::var(Var(1))
    }

    #[test]
    fn grlex_order() {
        let x2 = Monomial::var(Var(0), 2);
        let xt = Monomial::var(Var(0), 1).mul(&Monomial::var(Var(1), 1));
        let t2 = Monomial::var(Var(1), 2);
        let x = Monomial::var(Var(0), 1);
        assert!(x2 > xt && xt > t2 && t2 > x);
    }

    #[test]
    fn exact_division_and_failure() {
        let p = (&x() - &t()) * (&x() + &t());
        let q = p.div_exact(&(&x() - &t())).unwrap();
        assert_eq!(q, &x() + &t());
        assert!(p.div_exact(&(&x() - &MultiPoly::one())).is_none());
    }

    #[test]
    fn substitution_and_coefficients() {
        let p = &(&x() * &x()) * &t() + MultiPoly::from_int(3);
        let cs = p.coeffs_in(Var(0));
        assert_eq!(cs.len(), 3);
        assert_eq!(cs[2], t());
        assert_eq!(MultiPoly::from_coeffs_in(Var(0), &cs), p);
        let s = p.substitute(Var(0), &(&t() + &MultiPoly::one()));
        let expect = &(&(&t() + &MultiPoly::one()).pow(2) * &t()) + &MultiPoly::from_int(3);
        assert_eq!(s, expect);
    }

    #[test]
    fn leibniz_on_products() {
        let a = &(&x() * &t()) + &MultiPoly::from_int(2);
        let b = &x().pow(3) - &t();
        let lhs = (&a * &b).derivative(Var(0));
        let rhs = &(&a.derivative(Var(0)) * &b) + &(&a * &b.derivative(Var(0)));
        assert_eq!(lhs, rhs);
    }
}
