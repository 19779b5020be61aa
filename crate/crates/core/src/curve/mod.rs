//! De Rham reduction on curves `z² = f(x)` with `f` over ℚ(params), and
//! Picard–Fuchs operators of the forms `x^i dx/z`.
//!
//! Elements are stored as `p₀ + p₁·z` with `z²` eliminated, so equality of
//! canonical forms is equality of functions on the curve.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::derham::{self, ApplyTarget, DerhamError, H1Class, LinearDiffOperator};
use crate::exactalg::{gcd, linear_solve, q_frac, AlgError, Matrix, MultiPoly, RationalFunction, SolutionSet, UniPoly, Var};

type Rf = RationalFunction;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CurveError {
    #[error("curve polynomial must have degree 3 or 4 in x, got {0}")]
    Degree(u32),
    #[error("curve polynomial is not squarefree in x")]
    NotSquarefree,
    #[error("form has poles outside the zeros of f")]
    UnsupportedPoles,
    #[error("basis index {index} out of range for {len} forms")]
    BasisIndex { index: usize, len: usize },
    #[error("no Picard-Fuchs operator of order at most {max_order}")]
    NotFound { max_order: usize },
    #[error("certificate failed verification")]
    VerificationFailed,
    #[error(transparent)]
    Derham(#[from] DerhamError),
    #[error(transparent)]
    Alg(#[from] AlgError),
}

/// `z² = f` with `f` squarefree of degree 3 or 4 in `x`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurveSpec {
    f: MultiPoly,
    x: Var,
    fu: UniPoly,
    dfu: UniPoly,
}

impl CurveSpec {
    pub fn new(f: MultiPoly, x: Var) -> Result<Self, CurveError> {
        let d = f.degree_in(x);
        if d != 3 && d != 4 {
            return Err(CurveError::Degree(d));
        }
        let fu = UniPoly::from_poly(&f, x);
        let dfu = fu.derivative();
        if fu.gcd(&dfu).degree() > 0 {
            return Err(CurveError::NotSquarefree);
        }
        Ok(CurveSpec { f, x, fu, dfu })
    }

    pub fn f(&self) -> &MultiPoly {
        &self.f
    }

    pub fn x(&self) -> Var {
        self.x
    }

    pub fn degree(&self) -> usize {
        self.fu.degree() as usize
    }

    /// Number of basis forms `x^i dx/z`, `0 ≤ i ≤ d − 2`.
    pub fn basis_len(&self) -> usize {
        self.degree() - 1
    }

    fn f_rf(&self) -> Rf {
        Rf::from_poly(self.f.clone())
    }

    /// `x^i dx/z` as the element `x^i·z/f`.
    pub fn basis_form(&self, i: usize) -> CurveElement {
        let xi = Rf::var(self.x).pow(i as i64).unwrap();
        CurveElement::new(Rf::zero(), &xi / &self.f_rf())
    }

    pub fn z(&self) -> CurveElement {
        CurveElement::new(Rf::zero(), Rf::one())
    }

    /// `∂_v` with `∂_v z = ∂_v f / (2z)`.
    pub fn derive(&self, e: &CurveElement, v: Var) -> CurveElement {
        let df = Rf::from_poly(self.f.derivative(v));
        let half = Rf::constant(q_frac(1, 2));
        let odd = &e.odd.derive(v) + &(&(&e.odd * &df) * &(&half / &self.f_rf()));
        CurveElement::new(e.even.derive(v), odd)
    }

    /// `ω dx = d(certificate) + Σ coords_i x^i dx/z + (rational part)`.
    pub fn reduce(&self, w: &CurveElement) -> Result<CurveReduction, CurveError> {
        let x = self.x;
        let even = derham::reduce(&w.even, x)?;
        // odd part p₁·z = g/z with g = p₁·f
        let g = &w.odd * &self.f_rf();
        let mut coords = vec![Rf::zero(); self.basis_len()];
        let mut cert_odd = Rf::zero();
        if !g.is_zero() {
            let den = g.den();
            let mut rest = den.clone();
            let mut s = 0u32;
            loop {
                let c = gcd(&rest, &self.f);
                if c.degree_in(x) == 0 {
                    break;
                }
                rest = rest.div_exact(&c).expect("gcd divides");
                s += 1;
            }
            if rest.degree_in(x) > 0 {
                return Err(CurveError::UnsupportedPoles);
            }
            // g = n / f^s with n polynomial in x
            let fs = Rf::from_poly(self.f.pow(s));
            let n = &g * &fs;
            let mut num = UniPoly::from_poly(n.num(), x).map_coeffs(|c| c / &Rf::from_poly(n.den().clone()));
            let xr = Rf::var(x);
            while s > 0 {
                let (u, v) = UniPoly::solve_bezout(&self.fu, &self.dfu, &num)?;
                let k = Rf::from_int(2 * s as i64 - 1);
                // v f'/z^{2s+1} = (2/(2s−1))·(v'/z^{2s−1} − d(v/z^{2s−1}))
                let two_over_k = &Rf::from_int(2) / &k;
                let fs1 = Rf::from_poly(self.f.pow(s));
                cert_odd = &cert_odd - &(&(&two_over_k * &v.to_rf(x)) / &fs1);
                num = u.add(&v.derivative().scale(&two_over_k));
                s -= 1;
            }
            // now g = num, reduce degree with d(x^m z)
            let d = self.degree() as i64;
            let lcf = self.fu.lc();
            while num.degree() >= d - 1 {
                let k = num.degree();
                let m = k - d + 1;
                let c = &num.lc() / &(&Rf::constant(q_frac(2 * m + d, 2)) * &lcf);
                let xm = UniPoly::from_coeffs(
                    (0..=m).map(|i| if i == m { Rf::one() } else { Rf::zero() }).collect(),
                );
                // d(x^m z)/dx · z = m x^{m−1} f + x^m f'/2
                let dm = xm
                    .derivative()
                    .mul(&self.fu)
                    .add(&xm.mul(&self.dfu).scale(&Rf::constant(q_frac(1, 2))));
                num = num.sub(&dm.scale(&c));
                cert_odd = &cert_odd + &(&c * &xr.pow(m).unwrap());
            }
            for (i, slot) in coords.iter_mut().enumerate() {
                *slot = num.coeff(i);
            }
        }
        let out = CurveReduction {
            class: CurveClass {
                coords,
                rational: even.class,
            },
            certificate: CurveElement::new(even.certificate, cert_odd),
        };
        if !self.verify_reduction(w, &out) {
            return Err(CurveError::VerificationFailed);
        }
        Ok(out)
    }

    fn representative(&self, c: &CurveClass) -> CurveElement {
        let mut acc = CurveElement::new(c.rational.representative(self.x), Rf::zero());
        for (i, a) in c.coords.iter().enumerate() {
            acc = acc.plus(&self.basis_form(i).times(a));
        }
        acc
    }

    pub fn verify_reduction(&self, w: &CurveElement, r: &CurveReduction) -> bool {
        let rhs = self.derive(&r.certificate, self.x).plus(&self.representative(&r.class));
        *w == rhs
    }

    /// Least-order monic operator `D` in `∂_t` with `D(ω) = ∂_x(certificate)`
    /// for `ω = x^index dx/z`.
    pub fn picard_fuchs(&self, index: usize, t: Var, max_order: usize) -> Result<CurvePicardFuchs, CurveError> {
        if index >= self.basis_len() {
            return Err(CurveError::BasisIndex {
                index,
                len: self.basis_len(),
            });
        }
        let w = self.basis_form(index);
        let mut reds: Vec<CurveReduction> = Vec::new();
        let mut cur = w.clone();
        for n in 0..=max_order {
            if n > 0 {
                cur = self.derive(&cur, t);
            }
            reds.push(self.reduce(&cur)?);
            let e = if n == 0 {
                reds[0].class.is_zero().then(Vec::new)
            } else {
                match curve_dependence(&reds, n) {
                    SolutionSet::Inconsistent => None,
                    SolutionSet::Solutions { particular, .. } => Some(particular),
                }
            };
            if let Some(e) = e {
                let mut cert = reds[n].certificate.clone();
                for (j, ej) in e.iter().enumerate() {
                    cert = cert.plus(&reds[j].certificate.times(ej));
                }
                let out = CurvePicardFuchs {
                    operator: LinearDiffOperator::new(t, e.iter().map(|c| c.neg()).collect()),
                    certificate: cert,
                };
                if !self.verify_picard_fuchs(&w, &out) {
                    return Err(CurveError::VerificationFailed);
                }
                return Ok(out);
            }
        }
        Err(CurveError::NotFound { max_order })
    }

    /// `D(ω) − ∂_x(certificate) = 0` on the curve.
    pub fn verify_picard_fuchs(&self, w: &CurveElement, r: &CurvePicardFuchs) -> bool {
        let t = r.operator.var();
        let lhs = r.operator.apply(w, |e| self.derive(e, t));
        lhs == self.derive(&r.certificate, self.x)
    }

    /// Applies `Σ p_i ∂_t^i` (not necessarily monic).
    pub fn apply_dense(&self, p: &[Rf], w: &CurveElement, t: Var) -> CurveElement {
        let mut acc = w.zero_like();
        let mut cur = w.clone();
        for (i, c) in p.iter().enumerate() {
            if i > 0 {
                cur = self.derive(&cur, t);
            }
            acc = acc.plus(&cur.times(c));
        }
        acc
    }
}

/// Coordinates of the classes over the basis forms and the rational poles.
fn class_vectors(reds: &[CurveReduction]) -> Vec<Vec<Rf>> {
    let poles: BTreeSet<Rf> = reds.iter().flat_map(|r| r.class.rational.poles().cloned()).collect();
    reds.iter()
        .map(|r| {
            let mut v = r.class.coords.clone();
            v.extend(poles.iter().map(|p| r.class.rational.residue(p)));
            v
        })
        .collect()
}

/// `Σ_{j<m} e_j class_j = −class_m`.
fn curve_dependence(reds: &[CurveReduction], m: usize) -> SolutionSet<Rf> {
    let vs = class_vectors(&reds[..=m]);
    let dim = vs[0].len();
    let lhs = Matrix::from_fn(dim, m, |i, j| vs[j][i].clone());
    let rhs: Vec<Rf> = vs[m].iter().map(|c| c.neg()).collect();
    linear_solve(&lhs, &rhs)
}

/// `even + odd·z`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurveElement {
    pub even: Rf,
    pub odd: Rf,
}

impl CurveElement {
    pub fn new(even: Rf, odd: Rf) -> Self {
        CurveElement { even, odd }
    }

    pub fn is_zero(&self) -> bool {
        self.even.is_zero() && self.odd.is_zero()
    }

    pub fn neg(&self) -> Self {
        CurveElement::new(self.even.neg(), self.odd.neg())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.plus(&other.neg())
    }

    /// Product, eliminating `z²` with `f`.
    pub fn mul(&self, other: &Self, c: &CurveSpec) -> Self {
        let f = c.f_rf();
        CurveElement::new(
            &(&self.even * &other.even) + &(&(&self.odd * &other.odd) * &f),
            &(&self.even * &other.odd) + &(&self.odd * &other.even),
        )
    }

    /// `(e + o z)⁻¹ = (e − o z)/(e² − o² f)`; `None` for zero.
    pub fn inv(&self, c: &CurveSpec) -> Option<Self> {
        let norm = &(&self.even * &self.even) - &(&(&self.odd * &self.odd) * &c.f_rf());
        let ni = norm.inv().ok()?;
        Some(CurveElement::new(&self.even * &ni, -(&self.odd * &ni)))
    }
}

impl ApplyTarget for CurveElement {
    fn zero_like(&self) -> Self {
        CurveElement::new(Rf::zero(), Rf::zero())
    }
    fn plus(&self, other: &Self) -> Self {
        CurveElement::new(&self.even + &other.even, &self.odd + &other.odd)
    }
    fn times(&self, c: &Rf) -> Self {
        CurveElement::new(&self.even * c, &self.odd * c)
    }
}

/// Coordinates in the basis `x^i dx/z` plus the class of the `z`-free part.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct CurveClass {
    pub coords: Vec<Rf>,
    pub rational: H1Class,
}

impl CurveClass {
    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero()) && self.rational.is_zero()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CurveReduction {
    pub class: CurveClass,
    pub certificate: CurveElement,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CurvePicardFuchs {
    pub operator: LinearDiffOperator,
    pub certificate: CurveElement,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::q_int;

    const X: Var = Var(0);
    const T: Var = Var(1);

    fn x() -> Rf {
        Rf::var(X)
    }
    fn t() -> Rf {
        Rf::var(T)
    }
    fn one() -> Rf {
        Rf::one()
    }

    fn legendre() -> CurveSpec {
        let xp = MultiPoly::var(X);
        let tp = MultiPoly::var(T);
        let f = &(&xp * &(&xp - &MultiPoly::one())) * &(&xp - &tp);
        CurveSpec::new(f, X).unwrap()
    }

    #[test]
    fn derive_z() {
        let c = legendre();
        let f = c.f_rf();
        let fx = Rf::from_poly(c.f().derivative(X));
        let half = Rf::constant(q_frac(1, 2));
        assert_eq!(c.derive(&c.z(), X), CurveElement::new(Rf::zero(), &(&fx * &half) / &f));
        let expect = -(&(&(&x() * &(&x() - &one())) * &half) / &f);
        assert_eq!(c.derive(&c.z(), T), CurveElement::new(Rf::zero(), expect));
    }

    #[test]
    fn reduce_examples() {
        let c = legendre();
        let f = c.f_rf();
        let fx = Rf::from_poly(c.f().derivative(X));
        // f'/(2z) = f' z/(2f) is exact with certificate z
        let w = CurveElement::new(Rf::zero(), &fx / &(&f * &Rf::from_int(2)));
        let r = c.reduce(&w).unwrap();
        assert!(r.class.is_zero());
        assert_eq!(r.certificate, c.z());
        // x²/z: from d(z) = (3x² − 2(1+t)x + t)/(2z) dx
        let r = c.reduce(&c.basis_form(0).times(&(&x() * &x()))).unwrap();
        let third = Rf::constant(q_frac(1, 3));
        assert_eq!(r.class.coords, vec![-(&t() * &third), &(&Rf::from_int(2) * &(&one() + &t())) * &third]);
        // 1/z³
        let w = CurveElement::new(Rf::zero(), &one() / &(&f * &f));
        let r = c.reduce(&w).unwrap();
        assert!(c.verify_reduction(&w, &r));
        assert!(!r.class.is_zero());
    }

    #[test]
    fn legendre_picard_fuchs() {
        let c = legendre();
        let r = c.picard_fuchs(0, T, 4).unwrap();
        assert_eq!(r.operator.order(), 2);
        let tt1 = &t() * &(&t() - &one());
        let dense = r.operator.dense();
        assert_eq!(dense[1], &(&(&Rf::from_int(2) * &t()) - &one()) / &tt1);
        assert_eq!(dense[0], &one() / &(&Rf::from_int(4) * &tt1));
        let xt2 = (&x() - &t()).pow(2).unwrap();
        let expect = &(&Rf::constant(q_frac(-1, 2)) / &tt1) / &xt2;
        assert_eq!(r.certificate, CurveElement::new(Rf::zero(), expect));
        // non-monic operator with certificate z/(x−t)²
        let p = vec![
            Rf::constant(q_frac(-1, 2)),
            &(&Rf::from_int(4) * &t()) * &Rf::from_int(-1) + &Rf::from_int(2),
            &tt1 * &Rf::from_int(-2),
        ];
        let lhs = c.apply_dense(&p, &c.basis_form(0), T);
        let a = CurveElement::new(Rf::zero(), &one() / &xt2);
        assert_eq!(lhs, c.derive(&a, X));
    }

    #[test]
    fn inverse() {
        let c = legendre();
        let w = CurveElement::new(x(), &t() + &one());
        let one_e = CurveElement::new(one(), Rf::zero());
        assert_eq!(w.mul(&w.inv(&c).unwrap(), &c), one_e);
        assert_eq!(c.z().inv(&c).unwrap(), CurveElement::new(Rf::zero(), &one() / &c.f_rf()));
        assert!(CurveElement::new(Rf::zero(), Rf::zero()).inv(&c).is_none());
    }

    #[test]
    fn constant_family() {
        let xp = MultiPoly::var(X);
        let f = &(&xp * &(&xp - &MultiPoly::one())) * &(&xp - &MultiPoly::from_int(2));
        let c = CurveSpec::new(f, X).unwrap();
        let r = c.picard_fuchs(0, T, 4).unwrap();
        assert_eq!(r.operator.order(), 1);
        assert!(r.operator.coeffs()[0].is_zero());
        assert!(r.certificate.is_zero());
    }

    #[test]
    fn rejects_bad_curves() {
        let xp = MultiPoly::var(X);
        assert!(matches!(CurveSpec::new(&xp * &xp, X), Err(CurveError::Degree(2))));
        let sq = &(&xp * &xp) * &(&xp - &MultiPoly::one());
        assert!(matches!(CurveSpec::new(sq, X), Err(CurveError::NotSquarefree)));
        let c = legendre();
        let w = CurveElement::new(Rf::zero(), &one() / &(&x() + &Rf::constant(q_int(5))));
        assert!(matches!(c.reduce(&w), Err(CurveError::UnsupportedPoles)));
    }
}
