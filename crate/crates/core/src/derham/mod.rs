//! Reduction modulo exact derivatives in K = k(x).
//!
//! Every `f ∈ K` whose denominator splits into x-linear factors over `k` is
//! written uniquely as `∂_x(g) + Σ b_i/(x − c_i)`. The residue map is the
//! class; `g` is the certificate. Parameter derivations act on classes by
//! differentiating residues. On top of this sit the telescoper (least-order
//! operator in a parameter whose image is exact) and the decision whether a
//! rational function of two variables is `∂_{t2} f1 − ∂_{t1} f2`.

mod operator;

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

pub use operator::{ApplyTarget, LinearDiffOperator};

use crate::exactalg::{
    linear_solve, partial_fractions, AlgError, Matrix, RationalFunction, SolutionSet, UniPoly, Var,
};

type Rf = RationalFunction;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DerhamError {
    #[error("denominator has a factor that does not split into linear factors")]
    NonLinearFactor,
    #[error("no telescoper of order at most {max_order}")]
    NotFound { max_order: usize },
    #[error("unsupported input: {0}")]
    Unsupported(String),
    #[error("certificate check failed")]
    VerificationFailed,
    #[error(transparent)]
    Alg(AlgError),
}

impl From<AlgError> for DerhamError {
    fn from(e: AlgError) -> Self {
        match e {
            AlgError::NonLinearFactor => DerhamError::NonLinearFactor,
            e => DerhamError::Alg(e),
        }
    }
}

/// Canonical representative `Σ residue/(x − pole)`: pole ↦ nonzero residue.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct H1Class {
    residues: BTreeMap<Rf, Rf>,
}

impl H1Class {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (Rf, Rf)>) -> Self {
        let mut c = Self::new();
        for (p, r) in pairs {
            c.add_term(p, r);
        }
        c
    }

    pub fn is_zero(&self) -> bool {
        self.residues.is_empty()
    }

    pub fn len(&self) -> usize {
        self.residues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.residues.is_empty()
    }

    pub fn residue(&self, pole: &Rf) -> Rf {
        self.residues.get(pole).cloned().unwrap_or_else(Rf::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Rf, &Rf)> {
        self.residues.iter()
    }

    pub fn poles(&self) -> impl Iterator<Item = &Rf> {
        self.residues.keys()
    }

    fn add_term(&mut self, pole: Rf, residue: Rf) {
        let cur = self.residue(&pole);
        let new = &cur + &residue;
        if new.is_zero() {
            self.residues.remove(&pole);
        } else {
            self.residues.insert(pole, new);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (p, r) in &other.residues {
            out.add_term(p.clone(), r.clone());
        }
        out
    }

    pub fn scale(&self, c: &Rf) -> Self {
        if c.is_zero() {
            return Self::new();
        }
        H1Class {
            residues: self.residues.iter().map(|(p, r)| (p.clone(), r * c)).collect(),
        }
    }

    /// `Σ residue/(x − pole)` as an element of K.
    pub fn representative(&self, x: Var) -> Rf {
        let xv = Rf::var(x);
        let mut acc = Rf::zero();
        for (p, r) in &self.residues {
            acc = &acc + &(r / &(&xv - p));
        }
        acc
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReductionResult {
    pub class: H1Class,
    /// `input = ∂_x(certificate) + class representative`.
    pub certificate: Rf,
}

/// Hermite reduction followed by residues at the remaining simple poles.
pub fn reduce(f: &Rf, x: Var) -> Result<ReductionResult, DerhamError> {
    let num = UniPoly::from_poly(f.num(), x);
    let den = UniPoly::from_poly(f.den(), x);
    let (poly, a) = num.divrem(&den)?;
    let mut cert = integrate_poly(&poly).to_rf(x);
    if let Ok(pf) = partial_fractions(f, x) {
        // split denominator: c/(x−p)^k = ∂_x(−c/((k−1)(x−p)^{k−1})) for k ≥ 2
        let xr = Rf::var(x);
        let mut class = H1Class::new();
        for t in pf.terms {
            if t.order == 1 {
                class.add_term(t.pole, t.coeff);
            } else {
                let k = t.order as i64 - 1;
                let den = (&xr - &t.pole).pow(k)?;
                cert = &cert - &(&t.coeff / &(&den * &Rf::from_int(k)));
            }
        }
        return Ok(ReductionResult {
            class,
            certificate: cert,
        });
    }
    let (g, h_num, h_den) = hermite(&a, &den)?;
    cert = &cert + &g.to_rf_with(x);
    let mut class = H1Class::new();
    if !h_num.is_zero() {
        let h = &h_num.to_rf(x) / &h_den.to_rf(x);
        let pf = partial_fractions(&h, x)?;
        debug_assert!(pf.polynomial.is_zero());
        for t in pf.terms {
            debug_assert_eq!(t.order, 1);
            class.add_term(t.pole, t.coeff);
        }
    }
    Ok(ReductionResult {
        class,
        certificate: cert,
    })
}

fn integrate_poly(p: &UniPoly) -> UniPoly {
    let mut cs = vec![Rf::zero()];
    for (i, c) in p.coeffs().iter().enumerate() {
        cs.push(c / &Rf::from_int(i as i64 + 1));
    }
    UniPoly::from_coeffs(cs)
}

/// Sum of fractions `num/den` over x.
struct Fractions(Vec<(UniPoly, UniPoly)>);

impl Fractions {
    fn to_rf_with(&self, x: Var) -> Rf {
        let mut acc = Rf::zero();
        for (n, d) in &self.0 {
            acc = &acc + &(&n.to_rf(x) / &d.to_rf(x));
        }
        acc
    }
}

/// Hermite reduction of `a/d` with `deg a < deg d`: returns `(g, h_num, h_den)`
/// with `a/d = g' + h_num/h_den` and `h_den` squarefree.
fn hermite(a: &UniPoly, d: &UniPoly) -> Result<(Fractions, UniPoly, UniPoly), DerhamError> {
    let mut g = Vec::new();
    let mut a = a.clone();
    let mut dm = d.gcd(&d.derivative());
    let ds = d.div_exact(&dm).expect("gcd divides");
    while dm.degree() > 0 {
        let dm2 = dm.gcd(&dm.derivative());
        let dms = dm.div_exact(&dm2).expect("gcd divides");
        let lhs = ds
            .mul(&dm.derivative())
            .div_exact(&dm)
            .expect("Ds·Dm'/Dm is a polynomial")
            .neg();
        let (b, c) = UniPoly::solve_bezout(&lhs, &dms, &a)?;
        a = c.sub(&b.derivative().mul(&ds).div_exact(&dms).expect("Dms divides Ds"));
        g.push((b, dm.clone()));
        dm = dm2;
    }
    Ok((Fractions(g), a, ds))
}

/// Parameter derivative of a class: residues differentiated, zeros dropped.
pub fn gm_derivative(c: &H1Class, d: Var) -> H1Class {
    H1Class {
        residues: c
            .residues
            .iter()
            .map(|(p, r)| (p.clone(), r.derive(d)))
            .filter(|(_, r)| !r.is_zero())
            .collect(),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TelescoperResult {
    pub operator: LinearDiffOperator,
    /// `D(b) = ∂_x(certificate)`.
    pub certificate: Rf,
}

/// Coordinates of classes over the union of their poles: one row per pole,
/// one column per class.
pub fn class_matrix(classes: &[&H1Class]) -> (Vec<Rf>, Matrix<Rf>) {
    let poles: BTreeSet<Rf> = classes.iter().flat_map(|c| c.poles().cloned()).collect();
    let poles: Vec<Rf> = poles.into_iter().collect();
    let m = Matrix::from_fn(poles.len(), classes.len(), |i, j| classes[j].residue(&poles[i]));
    (poles, m)
}

/// The system `Σ_{j<m} e_j r_j = −r_m` whose consistency means an operator
/// of order `m` exists.
pub fn dependence_system(classes: &[H1Class], m: usize) -> SolutionSet<Rf> {
    let refs: Vec<&H1Class> = classes[..=m].iter().collect();
    let (_, full) = class_matrix(&refs);
    let lhs = Matrix::from_fn(full.rows(), m, |i, j| full.get(i, j).clone());
    let rhs: Vec<Rf> = (0..full.rows()).map(|i| full.get(i, m).neg()).collect();
    linear_solve(&lhs, &rhs)
}

/// Least-order monic `D` in `∂_t` with `D(b) = ∂_x(a)`.
pub fn telescoper(b: &Rf, x: Var, t: Var, max_order: usize) -> Result<TelescoperResult, DerhamError> {
    let mut reductions: Vec<ReductionResult> = Vec::new();
    let mut classes: Vec<H1Class> = Vec::new();
    let mut current = b.clone();
    for n in 0..=max_order {
        if n > 0 {
            current = current.derive(t);
        }
        let r = reduce(&current, x)?;
        classes.push(r.class.clone());
        reductions.push(r);
        let e = if n == 0 {
            if classes[0].is_zero() {
                Some(Vec::new())
            } else {
                None
            }
        } else {
            match dependence_system(&classes, n) {
                SolutionSet::Inconsistent => None,
                SolutionSet::Solutions { particular, nullspace } => {
                    debug_assert!(nullspace.is_empty());
                    Some(particular)
                }
            }
        };
        if let Some(e) = e {
            let mut cert = reductions[n].certificate.clone();
            for (j, ej) in e.iter().enumerate() {
                cert = &cert + &(ej * &reductions[j].certificate);
            }
            let operator = LinearDiffOperator::new(t, e.iter().map(|c| c.neg()).collect());
            let out = TelescoperResult {
                operator,
                certificate: cert,
            };
            if !verify_telescoper(b, x, &out) {
                return Err(DerhamError::VerificationFailed);
            }
            return Ok(out);
        }
    }
    Err(DerhamError::NotFound { max_order })
}

/// Checks `D(b) = ∂_x(a)` exactly.
pub fn verify_telescoper(b: &Rf, x: Var, r: &TelescoperResult) -> bool {
    let t = r.operator.var();
    let lhs = r.operator.apply(b, |f| f.derive(t));
    lhs == r.certificate.derive(x)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ResidueWitness {
    /// Pole in the first variable.
    pub pole: Rf,
    /// Residue there, a function of the second variable.
    pub residue: Rf,
    /// Nonzero class of the residue with respect to the second variable.
    pub residue_class: H1Class,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Exact2Form {
    /// `∂_{t2} f1 − ∂_{t1} f2 = g`.
    Solvable { f1: Rf, f2: Rf },
    Unsolvable(ResidueWitness),
}

/// Decides whether `g = ∂_{t2} f1 − ∂_{t1} f2` for rational `f1, f2`.
pub fn exact2form_solvable(g: &Rf, t1: Var, t2: Var) -> Result<Exact2Form, DerhamError> {
    let unsupported = |e: DerhamError| match e {
        DerhamError::NonLinearFactor => {
            DerhamError::Unsupported("poles do not split into linear factors".into())
        }
        e => e,
    };
    let r = reduce(g, t1).map_err(unsupported)?;
    let x = Rf::var(t1);
    let mut f1 = Rf::zero();
    let mut f2 = r.certificate.neg();
    for (c, b) in r.class.iter() {
        let rb = reduce(b, t2).map_err(unsupported)?;
        if !rb.class.is_zero() {
            return Ok(Exact2Form::Unsolvable(ResidueWitness {
                pole: c.clone(),
                residue: b.clone(),
                residue_class: rb.class,
            }));
        }
        let beta = rb.certificate;
        let lin = &x - c;
        f1 = &f1 + &(&beta / &lin);
        f2 = &f2 - &(&(&beta * &c.derive(t2)) / &lin);
    }
    if &f1.derive(t2) - &f2.derive(t1) != *g {
        return Err(DerhamError::VerificationFailed);
    }
    Ok(Exact2Form::Solvable { f1, f2 })
}

#[cfg(test)]
mod tests {
    use super::*;

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

    fn check(f: &Rf, r: &ReductionResult) {
        assert_eq!(&r.certificate.derive(X) + &r.class.representative(X), *f);
    }

    #[test]
    fn reduce_examples() {
        let f = &one() / &(&x() - &t()).pow(2).unwrap();
        let r = reduce(&f, X).unwrap();
        assert!(r.class.is_zero());
        assert_eq!(r.certificate, -(&one() / &(&x() - &t())));
        let f = &one() / &(&x() - &t());
        let r = reduce(&f, X).unwrap();
        assert_eq!(r.class, H1Class::from_pairs([(t(), one())]));
        assert!(r.certificate.is_zero());
        let f = &x() / &(&x() - &one()).pow(2).unwrap();
        let r = reduce(&f, X).unwrap();
        assert_eq!(r.class, H1Class::from_pairs([(one(), one())]));
        check(&f, &r);
    }

    #[test]
    fn reduce_high_order_and_polynomial_part() {
        let f = &(&(&x().pow(5).unwrap() + &t()) / &(&(&x() - &t()).pow(3).unwrap() * &x().pow(2).unwrap()))
            + &x();
        let r = reduce(&f, X).unwrap();
        check(&f, &r);
        let f = &one() / &(&(&x() * &x()) + &one());
        assert!(matches!(reduce(&f, X), Err(DerhamError::NonLinearFactor)));
    }

    #[test]
    fn gm_examples() {
        let c = H1Class::from_pairs([(t(), one())]);
        assert!(gm_derivative(&c, T).is_zero());
        let a = &one() / &(&t() - &one());
        let c = H1Class::from_pairs([(t(), a.clone()), (one(), a.neg())]);
        let sq = (&t() - &one()).pow(2).unwrap();
        let expect = H1Class::from_pairs([(t(), -(&one() / &sq)), (one(), &one() / &sq)]);
        assert_eq!(gm_derivative(&c, T), expect);
        assert!(gm_derivative(&H1Class::new(), T).is_zero());
    }

    #[test]
    fn telescoper_examples() {
        let b = &one() / &(&x() - &t());
        let r = telescoper(&b, X, T, 8).unwrap();
        assert_eq!(r.operator.order(), 1);
        assert!(r.operator.coeffs()[0].is_zero());
        assert_eq!(r.certificate, -(&one() / &(&x() - &t())));

        let b = &one() / &(&(&x() - &t()) * &(&x() - &one()));
        let r = telescoper(&b, X, T, 8).unwrap();
        assert_eq!(r.operator.order(), 1);
        // D = ∂_t + 1/(t-1) means c_0 = -1/(t-1)
        assert_eq!(r.operator.coeffs()[0], -(&one() / &(&t() - &one())));

        let b = &t() / &x();
        let r = telescoper(&b, X, T, 8).unwrap();
        assert_eq!(r.operator.coeffs()[0], &one() / &t());
        assert!(r.certificate.derive(X).is_zero());
    }

    #[test]
    fn exact_integrand_has_order_zero() {
        let b = &one() / &(&x() - &t()).pow(2).unwrap();
        let r = telescoper(&b, X, T, 8).unwrap();
        assert_eq!(r.operator.order(), 0);
    }

    #[test]
    fn exact_two_forms() {
        let (t1, t2) = (Var(0), Var(1));
        let (a, b) = (Rf::var(t1), Rf::var(t2));
        let g = &one() / &(&a * &b);
        match exact2form_solvable(&g, t1, t2).unwrap() {
            Exact2Form::Unsolvable(w) => {
                assert!(w.pole.is_zero());
                assert_eq!(w.residue, &one() / &b);
                assert_eq!(w.residue_class, H1Class::from_pairs([(Rf::zero(), one())]));
            }
            other => panic!("{other:?}"),
        }
        let g = &one() / &(&(&a * &a) * &(&b * &b));
        assert!(matches!(
            exact2form_solvable(&g, t1, t2).unwrap(),
            Exact2Form::Solvable { .. }
        ));
        match exact2form_solvable(&Rf::zero(), t1, t2).unwrap() {
            Exact2Form::Solvable { f1, f2 } => assert!(f1.is_zero() && f2.is_zero()),
            other => panic!("{other:?}"),
        }
        // Moving pole with exact residue.
        let g = &(&one() / &(&b * &b)) / &(&a - &b);
        assert!(matches!(
            exact2form_solvable(&g, t1, t2).unwrap(),
            Exact2Form::Solvable { .. }
        ));
    }
}
