//! Dense polynomials in one variable over the rational functions of the
//! other variables.

use super::poly::MultiPoly;
use super::ratfunc::RationalFunction;
use super::registry::Var;
use super::AlgError;

type Rf = RationalFunction;

/// `Σ coeffs[i]·v^i`; no trailing zero coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniPoly {
    coeffs: Vec<Rf>,
}

impl UniPoly {
    pub fn zero() -> Self {
        UniPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Rf::one())
    }

    pub fn constant(c: Rf) -> Self {
        Self::from_coeffs(vec![c])
    }

    /// `v - c`.
    pub fn linear(c: &Rf) -> Self {
        Self::from_coeffs(vec![c.neg(), Rf::one()])
    }

    pub fn from_coeffs(mut coeffs: Vec<Rf>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn from_poly(p: &MultiPoly, v: Var) -> Self {
        Self::from_coeffs(p.coeffs_in(v).into_iter().map(Rf::from_poly).collect())
    }

    pub fn coeffs(&self) -> &[Rf] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Rf {
        self.coeffs.get(i).cloned().unwrap_or_else(Rf::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with `deg 0 = -1`.
    pub fn degree(&self) -> i64 {
        self.coeffs.len() as i64 - 1
    }

    pub fn lc(&self) -> Rf {
        self.coeffs.last().cloned().unwrap_or_else(Rf::zero)
    }

    pub fn to_rf(&self, v: Var) -> Rf {
        let x = Rf::var(v);
        let mut acc = Rf::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * &x) + c;
        }
        acc
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::from_coeffs((0..n).map(|i| &self.coeff(i) + &other.coeff(i)).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::from_coeffs((0..n).map(|i| &self.coeff(i) - &other.coeff(i)).collect())
    }

    pub fn neg(&self) -> Self {
        UniPoly {
            coeffs: self.coeffs.iter().map(|c| c.neg()).collect(),
        }
    }

    pub fn scale(&self, c: &Rf) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        UniPoly {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![Rf::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = &out[i + j] + &(a * b);
            }
        }
        Self::from_coeffs(out)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Derivative in the polynomial variable.
    pub fn derivative(&self) -> Self {
        Self::from_coeffs(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * &Rf::from_int(i as i64))
                .collect(),
        )
    }

    pub fn divrem(&self, d: &Self) -> Result<(Self, Self), AlgError> {
        if d.is_zero() {
            return Err(AlgError::DivisionByZero);
        }
        let dd = d.coeffs.len() - 1;
        let inv = d.lc().inv()?;
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return Ok((Self::zero(), self.clone()));
        }
        let mut q = vec![Rf::zero(); r.len() - dd];
        for k in (0..q.len()).rev() {
            let c = &r[k + dd] * &inv;
            if c.is_zero() {
                continue;
            }
            for (i, di) in d.coeffs.iter().enumerate() {
                r[k + i] = &r[k + i] - &(&c * di);
            }
            q[k] = c;
        }
        r.truncate(dd);
        Ok((Self::from_coeffs(q), Self::from_coeffs(r)))
    }

    pub fn rem(&self, d: &Self) -> Result<Self, AlgError> {
        Ok(self.divrem(d)?.1)
    }

    /// Exact quotient; `None` if the remainder is nonzero.
    pub fn div_exact(&self, d: &Self) -> Option<Self> {
        let (q, r) = self.divrem(d).ok()?;
        r.is_zero().then_some(q)
    }

    pub fn make_monic(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        self.scale(&self.lc().inv().unwrap())
    }

    /// Monic gcd.
    pub fn gcd(&self, other: &Self) -> Self {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b).unwrap();
            a = b;
            b = r;
        }
        a.make_monic()
    }

    /// Returns `(s, t)` with `s·a + t·b = c` and `deg s < deg b`, assuming
    /// `gcd(a, b)` divides `c`.
    pub fn solve_bezout(a: &Self, b: &Self, c: &Self) -> Result<(Self, Self), AlgError> {
        let (g, s, _) = a.ext_gcd(b);
        let (qc, rc) = c.divrem(&g)?;
        if !rc.is_zero() {
            return Err(AlgError::NotInIdeal);
        }
        let s = s.mul(&qc).rem(b)?;
        let (t, r) = c.sub(&s.mul(a)).divrem(b)?;
        if !r.is_zero() {
            return Err(AlgError::NotInIdeal);
        }
        Ok((s, t))
    }

    /// Extended Euclid: `(g, s, t)` with `s·self + t·other = g`, g monic.
    pub fn ext_gcd(&self, other: &Self) -> (Self, Self, Self) {
        let (mut r0, mut r1) = (self.clone(), other.clone());
        let (mut s0, mut s1) = (Self::one(), Self::zero());
        let (mut t0, mut t1) = (Self::zero(), Self::one());
        while !r1.is_zero() {
            let (q, r) = r0.divrem(&r1).unwrap();
            let s = s0.sub(&q.mul(&s1));
            let t = t0.sub(&q.mul(&t1));
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s);
            t0 = std::mem::replace(&mut t1, t);
        }
        if r0.is_zero() {
            return (r0, s0, t0);
        }
        let inv = r0.lc().inv().unwrap();
        (r0.scale(&inv), s0.scale(&inv), t0.scale(&inv))
    }

    pub fn eval(&self, x: &Rf) -> Rf {
        let mut acc = Rf::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * x) + c;
        }
        acc
    }

    /// `p(c + y)` as a polynomial in `y`.
    pub fn shift(&self, c: &Rf) -> Self {
        let lin = Self::from_coeffs(vec![c.clone(), Rf::one()]);
        let mut acc = Self::zero();
        for a in self.coeffs.iter().rev() {
            acc = acc.mul(&lin).add(&Self::constant(a.clone()));
        }
        acc
    }

    /// Applies `f` to every coefficient.
    pub fn map_coeffs(&self, f: impl Fn(&Rf) -> Rf) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(f).collect())
    }
}

/// First `n` coefficients of the power series `a/b`, requiring `b(0) ≠ 0`.
pub fn series_div(a: &UniPoly, b: &UniPoly, n: usize) -> Result<Vec<Rf>, AlgError> {
    let b0 = b.coeff(0).inv()?;
    let mut out: Vec<Rf> = Vec::with_capacity(n);
    for k in 0..n {
        let mut s = a.coeff(k);
        for (j, o) in out.iter().enumerate() {
            let bj = b.coeff(k - j);
            if !bj.is_zero() {
                s = &s - &(o * &bj);
            }
        }
        out.push(&s * &b0);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::poly::MultiPoly;

    fn t() -> Rf {
        Rf::var(Var(1))
    }

    #[test]
    fn divrem_and_gcd() {
        let x = MultiPoly::var(Var(0));
        let tt = MultiPoly::var(Var(1));
        let one = MultiPoly::one();
        let p = &(&x - &tt) * &(&x - &one);
        let q = &(&x - &tt) * &(&x + &one);
        let up = UniPoly::from_poly(&p, Var(0));
        let uq = UniPoly::from_poly(&q, Var(0));
        assert_eq!(up.gcd(&uq), UniPoly::linear(&t()));
        let (qq, r) = up.divrem(&uq).unwrap();
        assert_eq!(qq.mul(&uq).add(&r), up);
        let (g, s, tt2) = up.ext_gcd(&uq);
        assert_eq!(s.mul(&up).add(&tt2.mul(&uq)), g);
    }

    #[test]
    fn shift_and_series() {
        // (y + t)^2 shifted by -t is y^2
        let p = UniPoly::linear(&t().neg()).pow(2);
        assert_eq!(p.shift(&t().neg()), UniPoly::from_coeffs(vec![Rf::zero(), Rf::zero(), Rf::one()]));
        // 1/(1 - y) = 1 + y + y^2 + ...
        let s = series_div(
            &UniPoly::one(),
            &UniPoly::from_coeffs(vec![Rf::one(), Rf::from_int(-1)]),
            4,
        )
        .unwrap();
        assert!(s.iter().all(|c| c.is_one()));
    }
}
