//! Monic linear differential operators in one parameter.

use crate::exactalg::{RationalFunction, Var};

type Rf = RationalFunction;

/// `D = ∂^n − Σ_{i<n} c_i ∂^i` with coefficients in ℚ(vars).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearDiffOperator {
    var: Var,
    coeffs: Vec<Rf>,
}

impl LinearDiffOperator {
    /// From `c_0, …, c_{n−1}`.
    pub fn new(var: Var, coeffs: Vec<Rf>) -> Self {
        LinearDiffOperator { var, coeffs }
    }

    /// Builds the monic operator from `Σ_{i≤n} p_i ∂^i` with `p_n ≠ 0`.
    pub fn from_dense(var: Var, p: &[Rf]) -> Self {
        let n = p.len() - 1;
        let lead = &p[n];
        let coeffs = p[..n].iter().map(|c| -(c / lead)).collect();
        LinearDiffOperator { var, coeffs }
    }

    pub fn var(&self) -> Var {
        self.var
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[Rf] {
        &self.coeffs
    }

    /// Coefficients `p_0, …, p_n` of `Σ p_i ∂^i` (so `p_n = 1`, `p_i = −c_i`).
    pub fn dense(&self) -> Vec<Rf> {
        let mut out: Vec<Rf> = self.coeffs.iter().map(|c| c.neg()).collect();
        out.push(Rf::one());
        out
    }

    /// `D(f)`, with `derive` the action of `∂` on the element type.
    pub fn apply<T, F>(&self, f: &T, derive: F) -> T
    where
        T: Clone + ApplyTarget,
        F: Fn(&T) -> T,
    {
        let mut acc = T::zero_like(f);
        let mut cur = f.clone();
        let dense = self.dense();
        for (i, p) in dense.iter().enumerate() {
            if i > 0 {
                cur = derive(&cur);
            }
            if !p.is_zero() {
                acc = acc.plus(&cur.times(p));
            }
        }
        acc
    }

    /// Text form such as `Dt^2 + (1/t)*Dt - 1`.
    pub fn display(&self, names: &[String]) -> String {
        let d = format!("D{}", names[self.var.index()]);
        let dense = self.dense();
        let n = self.order();
        let mut out = String::new();
        for i in (0..=n).rev() {
            let c = &dense[i];
            if c.is_zero() {
                continue;
            }
            let mut s = c.to_string_with(names);
            let neg = s.starts_with('-');
            if neg {
                s.remove(0);
            }
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let dpow = match i {
                0 => String::new(),
                1 => d.clone(),
                _ => format!("{d}^{i}"),
            };
            if i == 0 {
                out.push_str(&s);
            } else if s == "1" {
                out.push_str(&dpow);
            } else if s.contains(['+', '-', '/']) {
                out.push_str(&format!("({s})*{dpow}"));
            } else {
                out.push_str(&format!("{s}*{dpow}"));
            }
        }
        if out.is_empty() {
            out.push('0');
        }
        out
    }
}

/// Minimal arithmetic needed to apply an operator.
pub trait ApplyTarget: Sized {
    fn zero_like(&self) -> Self;
    fn plus(&self, other: &Self) -> Self;
    fn times(&self, c: &Rf) -> Self;
}

impl ApplyTarget for Rf {
    fn zero_like(&self) -> Self {
        Rf::zero()
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn times(&self, c: &Rf) -> Self {
        self * c
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn printing() {
        let names = vec!["x".to_string(), "t".to_string()];
        let t = Rf::var(Var(1));
        let one = Rf::one();
        let tt1 = &t * &(&t - &one);
        let p1 = &(&(&t * &Rf::from_int(2)) - &one) / &tt1;
        let p0 = &one / &(&tt1 * &Rf::from_int(4));
        let d = LinearDiffOperator::from_dense(Var(1), &[p0, p1, one.clone()]);
        assert_eq!(d.display(&names), "Dt^2 + ((2*t-1)/(t*(t-1)))*Dt + 1/(4*t*(t-1))");
        let d = LinearDiffOperator::new(Var(1), vec![&one / &t]);
        assert_eq!(d.display(&names), "Dt - 1/t");
        let d = LinearDiffOperator::new(Var(1), vec![]);
        assert_eq!(d.display(&names), "1");
        assert_eq!(d.apply(&t, |f| f.derive(Var(1))), t);
    }
}
