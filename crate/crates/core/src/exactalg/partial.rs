//! Squarefree factorization and partial fractions with respect to one variable.

use super::gcd::squarefree_in;
use super::poly::MultiPoly;
use super::ratfunc::RationalFunction;
use super::registry::Var;
use super::roots::linear_factors;
use super::unipoly::{series_div, UniPoly};
use super::AlgError;

/// `p = unit · Π f_i^{m_i}` with pairwise coprime squarefree factors in `v`.
/// Factors free of `v` are folded into the unit and not listed.
pub fn squarefree_factor(p: &MultiPoly, v: Var) -> Result<Vec<(MultiPoly, u32)>, AlgError> {
    if p.is_zero() {
        return Err(AlgError::ZeroPolynomial);
    }
    Ok(squarefree_in(p, v).1)
}

/// One term `coeff / (v - pole)^order`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialFraction {
    pub pole: RationalFunction,
    pub order: u32,
    pub coeff: RationalFunction,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialFractions {
    pub var: Var,
    pub polynomial: UniPoly,
    pub terms: Vec<PartialFraction>,
}

impl PartialFractions {
    pub fn recombine(&self) -> RationalFunction {
        let x = RationalFunction::var(self.var);
        let mut acc = self.polynomial.to_rf(self.var);
        for t in &self.terms {
            let den = (&x - &t.pole).pow(t.order as i64).unwrap();
            acc = &acc + &(&t.coeff / &den);
        }
        acc
    }
}

/// Poles of the denominator of `f` in `v` with their multiplicities.
/// Fails with `NonLinearFactor` if some factor does not split.
pub fn poles(f: &RationalFunction, v: Var) -> Result<Vec<(RationalFunction, u32)>, AlgError> {
    let mut out = Vec::new();
    for (fac, m) in squarefree_in(f.den(), v).1 {
        let (lin, rest) = linear_factors(&fac, v);
        if rest.degree_in(v) > 0 {
            return Err(AlgError::NonLinearFactor);
        }
        for l in lin {
            let c = l.coeffs_in(v);
            let pole = RationalFunction::normalize(-&c[0], c[1].clone())?;
            out.push((pole, m));
        }
    }
    out.sort();
    Ok(out)
}

pub fn partial_fractions(f: &RationalFunction, v: Var) -> Result<PartialFractions, AlgError> {
    let num = UniPoly::from_poly(f.num(), v);
    let den = UniPoly::from_poly(f.den(), v);
    let (polynomial, rem) = num.divrem(&den)?;
    let mut terms = Vec::new();
    if !rem.is_zero() {
        for (pole, m) in poles(f, v)? {
            let lin = UniPoly::linear(&pole).pow(m);
            let cof = den.div_exact(&lin).expect("pole factor divides");
            let series = series_div(&rem.shift(&pole), &cof.shift(&pole), m as usize)?;
            for (k, s) in series.into_iter().enumerate() {
                if !s.is_zero() {
                    terms.push(PartialFraction {
                        pole: pole.clone(),
                        order: m - k as u32,
                        coeff: s,
                    });
                }
            }
        }
    }
    terms.sort_by(|a, b| a.pole.cmp(&b.pole).then(a.order.cmp(&b.order)));
    Ok(PartialFractions {
        var: v,
        polynomial,
        terms,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    type Rf = RationalFunction;

    fn x() -> Rf {
        Rf::var(Var(0))
    }
    fn t() -> Rf {
        Rf::var(Var(1))
    }

    #[test]
    fn simple_poles_with_parameter() {
        let one = Rf::one();
        let f = &one / &(&(&x() - &t()) * &(&x() - &one));
        let pf = partial_fractions(&f, Var(0)).unwrap();
        assert!(pf.polynomial.is_zero());
        assert_eq!(pf.terms.len(), 2);
        let at_t = pf.terms.iter().find(|p| p.pole == t()).unwrap();
        assert_eq!(at_t.coeff, &one / &(&t() - &one));
        let at_1 = pf.terms.iter().find(|p| p.pole == one).unwrap();
        assert_eq!(at_1.coeff, -(&one / &(&t() - &one)));
        assert_eq!(pf.recombine(), f);
    }

    #[test]
    fn double_pole() {
        let one = Rf::one();
        let f = &x() / &(&x() - &one).pow(2).unwrap();
        let pf = partial_fractions(&f, Var(0)).unwrap();
        let got: Vec<_> = pf.terms.iter().map(|p| (p.pole.clone(), p.order, p.coeff.clone())).collect();
        assert_eq!(got, vec![(one.clone(), 1, one.clone()), (one.clone(), 2, one.clone())]);
        assert_eq!(pf.recombine(), f);
    }

    #[test]
    fn irreducible_quadratic_rejected() {
        let one = Rf::one();
        let f = &one / &(&(&x() * &x()) + &one);
        assert!(matches!(partial_fractions(&f, Var(0)), Err(AlgError::NonLinearFactor)));
    }

    #[test]
    fn squarefree_examples() {
        let xp = MultiPoly::var(Var(0));
        let tp = MultiPoly::var(Var(1));
        let one = MultiPoly::one();
        let p = &(&xp - &tp).pow(3) * &MultiPoly::one();
        assert_eq!(squarefree_factor(&p, Var(0)).unwrap(), vec![(&xp - &tp, 3)]);
        let q = &(&xp - &tp).pow(2) * &(&xp - &one);
        let fs = squarefree_factor(&q, Var(0)).unwrap();
        assert!(fs.contains(&(&xp - &tp, 2)) && fs.contains(&(&xp - &one, 1)));
        assert!(matches!(
            squarefree_factor(&MultiPoly::zero(), Var(0)),
            Err(AlgError::ZeroPolynomial)
        ));
    }
}
