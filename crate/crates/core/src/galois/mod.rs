//! Galois descriptors of integrals `∫ b dx` over `k = ℚ(t)`.
//!
//! The group of the integral is `{u : D u = 0}` for the minimal telescoper
//! `D`, which is constant over `k` exactly when `D` has a full space of
//! rational solutions. Also here: companion systems of a telescoper,
//! changes of derivation basis and horizontal sections by ansatz.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::connection::{ConnectionError, ConnectionSystem, Mat};
use crate::curve::{CurveError, CurveSpec};
use crate::derham::{telescoper, DerhamError};
use crate::difftower::{Derivation, Tower, TowerElement, TowerError};
use crate::exactalg::{lcm, nullspace, poles, q_int, AlgError, Matrix, Monomial, MultiPoly, RationalFunction, UniPoly, Var, Q};

pub use crate::derham::LinearDiffOperator;

type Rf = RationalFunction;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GaloisError {
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("rebase matrix is singular")]
    SingularRebase,
    #[error("rebase matrix must be {expected}x{expected}")]
    RebaseShape { expected: usize },
    #[error("supplied identity D(b) = d/dx(a) does not hold")]
    IdentityFails,
    #[error(transparent)]
    Derham(#[from] DerhamError),
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error(transparent)]
    Connection(#[from] ConnectionError),
    #[error(transparent)]
    Tower(#[from] TowerError),
    #[error(transparent)]
    Alg(#[from] AlgError),
}

/// Integer roots of `Σ_i c_i ρ(ρ−1)…(ρ−i+1)`.
fn integer_roots(terms: &[(usize, Q)]) -> Vec<i64> {
    // dense coefficients in ρ
    let n = terms.iter().map(|(i, _)| *i).max().unwrap_or(0);
    let mut coeffs = vec![q_int(0); n + 1];
    for (i, c) in terms {
        // ρ(ρ−1)…(ρ−i+1)
        let mut p = vec![q_int(1)];
        for k in 0..*i {
            let mut next = vec![q_int(0); p.len() + 1];
            for (j, a) in p.iter().enumerate() {
                next[j + 1] += a;
                next[j] -= a * q_int(k as i64);
            }
            p = next;
        }
        for (j, a) in p.iter().enumerate() {
            coeffs[j] += a * c;
        }
    }
    let rho = Var(0);
    let poly = MultiPoly::from_terms(
        coeffs
            .into_iter()
            .enumerate()
            .map(|(j, c)| (Monomial::var(rho, j as u32), c)),
    );
    if poly.is_zero() || poly.is_constant() {
        return Vec::new();
    }
    crate::exactalg::rational_roots(&poly, rho)
        .into_iter()
        .filter_map(|r| r.constant_value())
        .filter(|q| q.is_integer())
        .map(|q| q.to_integer().try_into().expect("small root"))
        .collect()
}

/// Basis over ℚ of the solutions of `D u = 0` in ℚ(t).
///
/// Poles of a solution lie at roots of the leading coefficient, with orders
/// bounded by the local indicial equations; the degree at infinity is
/// bounded the same way. The remaining polynomial ansatz is solved exactly.
pub fn rational_solutions(op: &LinearDiffOperator) -> Result<Vec<Rf>, GaloisError> {
    let t = op.var();
    let dense = op.dense();
    for c in &dense {
        if c.vars().iter().any(|v| *v != t) {
            return Err(GaloisError::Unsupported("coefficients must lie in Q(t)".into()));
        }
    }
    let mut den = MultiPoly::one();
    for c in &dense {
        den = lcm(&den, c.den());
    }
    let p: Vec<UniPoly> = dense
        .iter()
        .map(|c| UniPoly::from_poly(c.mul_poly(&den).num(), t))
        .collect();
    let n = p.len() - 1;
    let lead = p[n].to_rf(t);
    let sing = poles(&(&Rf::one() / &lead), t)
        .map_err(|_| GaloisError::Unsupported("leading coefficient does not split over Q".into()))?;
    let tr = Rf::var(t);
    let mut q = Rf::one();
    for (alpha, _) in &sing {
        let shifted: Vec<UniPoly> = p.iter().map(|pi| pi.shift(alpha)).collect();
        let val = |u: &UniPoly| (0..).find(|&k| !u.coeff(k).is_zero()).unwrap();
        let low = shifted
            .iter()
            .enumerate()
            .filter(|(_, u)| !u.is_zero())
            .map(|(i, u)| val(u) as i64 - i as i64)
            .min()
            .unwrap();
        let terms: Vec<(usize, Q)> = shifted
            .iter()
            .enumerate()
            .filter(|(i, u)| !u.is_zero() && val(u) as i64 - *i as i64 == low)
            .map(|(i, u)| (i, u.coeff(val(u)).constant_value().expect("rational point")))
            .collect();
        let m = integer_roots(&terms).into_iter().map(|r| -r).max().unwrap_or(0).max(0);
        q = &q * &(&tr - alpha).pow(m).unwrap();
    }
    let top = p
        .iter()
        .enumerate()
        .filter(|(_, u)| !u.is_zero())
        .map(|(i, u)| u.degree() - i as i64)
        .max()
        .unwrap();
    let terms: Vec<(usize, Q)> = p
        .iter()
        .enumerate()
        .filter(|(i, u)| !u.is_zero() && u.degree() - *i as i64 == top)
        .map(|(i, u)| (i, u.lc().constant_value().unwrap()))
        .collect();
    let Some(nu) = integer_roots(&terms).into_iter().max() else {
        return Ok(Vec::new());
    };
    let qdeg = q.num().degree_in(t) as i64;
    let bound = nu + qdeg;
    if bound < 0 {
        return Ok(Vec::new());
    }
    let candidates: Vec<Rf> = (0..=bound).map(|k| &tr.pow(k).unwrap() / &q).collect();
    let images: Vec<Rf> = candidates.iter().map(|u| op.apply(u, |f| f.derive(t))).collect();
    let kernel = linear_kernel(&images);
    let out: Vec<Rf> = kernel
        .into_iter()
        .map(|v| {
            v.iter()
                .zip(&candidates)
                .fold(Rf::zero(), |acc, (c, u)| &acc + &u.scale(c))
        })
        .collect();
    for u in &out {
        if !op.apply(u, |f| f.derive(t)).is_zero() {
            return Err(GaloisError::Unsupported("solution failed verification".into()));
        }
    }
    Ok(out)
}

/// ℚ-linear relations `Σ c_k f_k = 0` among the rational functions `f_k`.
fn linear_kernel(fs: &[Rf]) -> Vec<Vec<Q>> {
    let mut den = MultiPoly::one();
    for f in fs {
        den = lcm(&den, f.den());
    }
    let mut table: BTreeMap<Monomial, Vec<Q>> = BTreeMap::new();
    for (k, f) in fs.iter().enumerate() {
        for (m, c) in f.mul_poly(&den).num().terms() {
            table.entry(m.clone()).or_insert_with(|| vec![q_int(0); fs.len()])[k] += c;
        }
    }
    if table.is_empty() {
        return (0..fs.len())
            .map(|k| (0..fs.len()).map(|j| q_int((j == k) as i64)).collect())
            .collect();
    }
    nullspace(&Matrix::from_rows(table.into_values().collect()))
}

/// The system of `D` for `∫ b dx`: `A_x` has first column
/// `(0, b, ∂_t b, …, ∂_t^{n−1} b)`, `A_t` is the companion block with bottom
/// row `(a, c_0, …, c_{n−1})`. It is flat iff `D(b) = ∂_x(a)`.
pub fn companion_system(
    tower: &Tower,
    x: &str,
    t: &str,
    op: &LinearDiffOperator,
    b: &TowerElement,
    a: &TowerElement,
) -> Result<ConnectionSystem, GaloisError> {
    let n = op.order();
    let dt = tower.derivation(t)?;
    let mut ax = Mat::zeros(n + 1, n + 1);
    let mut cur = b.clone();
    for i in 1..=n {
        if i > 1 {
            cur = tower.derive(&cur, &dt);
        }
        ax.set(i, 0, cur.clone());
    }
    let mut at = Mat::zeros(n + 1, n + 1);
    for i in 1..n {
        at.set(i, i + 1, Rf::one());
    }
    at.set(n, 0, a.clone());
    for (j, c) in op.coeffs().iter().enumerate() {
        at.set(n, j + 1, c.clone());
    }
    Ok(ConnectionSystem::new(
        tower,
        n + 1,
        Some(x),
        vec![(x.to_string(), ax), (t.to_string(), at)],
    )?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GaloisVerdict {
    /// Full rational solution space: the group is conjugate to constants.
    Constant,
    /// Not constant over `k` itself; no claim after extending `k`.
    NonconstantOverK,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GaloisDescriptor {
    pub operator: LinearDiffOperator,
    pub verdict: GaloisVerdict,
    pub solutions: Vec<Rf>,
}

/// Where the telescoper of the integrand comes from.
pub enum IntegralSource<'a> {
    Rational { b: &'a Rf, x: Var, t: Var },
    Curve { curve: &'a CurveSpec, index: usize, t: Var },
    /// A user-supplied identity `D(b) = ∂_x(a)` in a tower, checked first.
    Tower {
        tower: &'a Tower,
        x: &'a str,
        b: &'a TowerElement,
        a: &'a TowerElement,
        operator: LinearDiffOperator,
        t: &'a str,
    },
}

pub fn galois_descriptor(source: IntegralSource<'_>, max_order: usize) -> Result<GaloisDescriptor, GaloisError> {
    let operator = match source {
        IntegralSource::Rational { b, x, t } => telescoper(b, x, t, max_order)?.operator,
        IntegralSource::Curve { curve, index, t } => curve.picard_fuchs(index, t, max_order)?.operator,
        IntegralSource::Tower {
            tower,
            x,
            b,
            a,
            operator,
            t,
        } => {
            let dt = tower.derivation(t)?;
            let lhs = operator.apply(b, |e| tower.derive(e, &dt));
            if lhs != tower.derive_by(a, x)? {
                return Err(GaloisError::IdentityFails);
            }
            operator
        }
    };
    let solutions = rational_solutions(&operator)?;
    let verdict = if solutions.len() == operator.order() {
        GaloisVerdict::Constant
    } else {
        GaloisVerdict::NonconstantOverK
    };
    Ok(GaloisDescriptor {
        operator,
        verdict,
        solutions,
    })
}

/// New derivations `new_k = Σ_j matrix[k][j]·old_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct DerivationRebase {
    pub old: Vec<String>,
    pub new: Vec<String>,
    pub matrix: Matrix<Rf>,
}

impl DerivationRebase {
    pub fn new(old: &[&str], new: &[&str], matrix: Matrix<Rf>) -> Result<Self, GaloisError> {
        let k = old.len();
        if new.len() != k || matrix.rows() != k || matrix.cols() != k {
            return Err(GaloisError::RebaseShape { expected: k });
        }
        if matrix.inverse().is_none() {
            return Err(GaloisError::SingularRebase);
        }
        Ok(DerivationRebase {
            old: old.iter().map(|s| s.to_string()).collect(),
            new: new.iter().map(|s| s.to_string()).collect(),
            matrix,
        })
    }

    pub fn inverse(&self) -> Self {
        DerivationRebase {
            old: self.new.clone(),
            new: self.old.clone(),
            matrix: self.matrix.inverse().expect("checked invertible"),
        }
    }
}

/// Registers the new derivations and rewrites the system on them.
pub fn rebase_derivations(s: &ConnectionSystem, r: &DerivationRebase) -> Result<ConnectionSystem, GaloisError> {
    let tower = s.tower();
    let bases = tower.base_names();
    let olds: Vec<(Derivation, Mat)> = r
        .old
        .iter()
        .map(|o| Ok((tower.derivation(o)?, s.matrix(o)?.clone())))
        .collect::<Result<_, GaloisError>>()?;
    let mut out: Vec<(String, Mat)> = s
        .matrices()
        .filter(|(n, _)| !r.old.iter().any(|o| o == n))
        .map(|(n, m)| (n.to_string(), m.clone()))
        .collect();
    for (k, name) in r.new.iter().enumerate() {
        let mut terms: Vec<(String, Rf)> = Vec::new();
        let mut m = Mat::zeros(s.size(), s.size());
        for (j, (d, a)) in olds.iter().enumerate() {
            let lam = r.matrix.get(k, j);
            if lam.is_zero() {
                continue;
            }
            for (i, c) in d.terms() {
                terms.push((bases[*i].clone(), lam * c));
            }
            m = m.add(&a.scale(lam));
        }
        tower.add_composite(name, &terms)?;
        out.push((name.clone(), m));
    }
    let principal = s.principal().filter(|p| !r.old.iter().any(|o| o == p));
    Ok(ConnectionSystem::new(tower, s.size(), principal, out)?)
}

/// Vectors `Y` with `∂Y = A_∂ Y` for each chosen derivation, searched as
/// polynomials of total degree at most `degree` over the lcm of the
/// denominators in the system. Empty means none within the bound.
pub fn horizontal_sections(s: &ConnectionSystem, symbols: &[&str], degree: u32) -> Result<Vec<Vec<Rf>>, GaloisError> {
    let tower = s.tower();
    let n = s.size();
    let mut den = MultiPoly::one();
    let mut vars: BTreeSet<Var> = BTreeSet::new();
    let mut ders = Vec::new();
    for name in symbols {
        let d = tower.derivation(name)?;
        let a = s.matrix(name)?.clone();
        for e in a.entries().chain(d.terms().iter().map(|(_, c)| c)) {
            den = lcm(&den, e.den());
            vars.extend(e.vars());
        }
        vars.extend(d.terms().iter().map(|(i, _)| tower.base_var(*i)));
        ders.push((d, a));
    }
    let vars: Vec<Var> = vars.into_iter().collect();
    let l = Rf::from_poly(den);
    let mut mons = vec![Monomial::one()];
    for &v in &vars {
        let mut next = Vec::new();
        for m in &mons {
            for e in 0..=(degree - m.degree()) {
                next.push(m.mul(&Monomial::var(v, e)));
            }
        }
        mons = next;
    }
    mons.sort();
    let mut unknowns: Vec<Vec<Rf>> = Vec::new();
    for slot in 0..n {
        for m in &mons {
            let mut y = vec![Rf::zero(); n];
            y[slot] = &Rf::from_poly(MultiPoly::term(m.clone(), q_int(1))) / &l;
            unknowns.push(y);
        }
    }
    let residual = |y: &[Rf], d: &Derivation, a: &Mat| -> Vec<Rf> {
        let ay = a.mul_vec(y);
        y.iter().zip(ay).map(|(yi, ai)| &tower.derive(yi, d) - &ai).collect()
    };
    // one ℚ-linear system per (derivation, component)
    let mut rows: Vec<Vec<Q>> = Vec::new();
    for (d, a) in &ders {
        let images: Vec<Vec<Rf>> = unknowns.iter().map(|y| residual(y, d, a)).collect();
        for comp in 0..n {
            let fs: Vec<Rf> = images.iter().map(|v| v[comp].clone()).collect();
            let mut cd = MultiPoly::one();
            for f in &fs {
                cd = lcm(&cd, f.den());
            }
            let mut table: BTreeMap<Monomial, Vec<Q>> = BTreeMap::new();
            for (k, f) in fs.iter().enumerate() {
                for (m, c) in f.mul_poly(&cd).num().terms() {
                    table.entry(m.clone()).or_insert_with(|| vec![q_int(0); fs.len()])[k] += c;
                }
            }
            rows.extend(table.into_values());
        }
    }
    let kernel: Vec<Vec<Q>> = if rows.is_empty() {
        (0..unknowns.len())
            .map(|k| (0..unknowns.len()).map(|j| q_int((j == k) as i64)).collect())
            .collect()
    } else {
        nullspace(&Matrix::from_rows(rows))
    };
    let mut out = Vec::new();
    for v in kernel {
        let mut y = vec![Rf::zero(); n];
        for (c, u) in v.iter().zip(&unknowns) {
            if *c != q_int(0) {
                for (yi, ui) in y.iter_mut().zip(u) {
                    *yi = &*yi + &ui.scale(c);
                }
            }
        }
        for (d, a) in &ders {
            if residual(&y, d, a).iter().any(|e| !e.is_zero()) {
                return Err(GaloisError::Unsupported("section failed verification".into()));
            }
        }
        out.push(y);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    const T: Var = Var(0);

    fn t() -> Rf {
        Rf::var(T)
    }

    #[test]
    fn rational_solution_examples() {
        let d = LinearDiffOperator::new(T, vec![Rf::zero()]);
        assert_eq!(rational_solutions(&d).unwrap(), vec![Rf::one()]);
        let d = LinearDiffOperator::new(T, vec![Rf::one()]);
        assert!(rational_solutions(&d).unwrap().is_empty());
        // ∂ + 1/(t−1) means c_0 = −1/(t−1)
        let inv = &Rf::one() / &(&t() - &Rf::one());
        let d = LinearDiffOperator::new(T, vec![inv.neg()]);
        assert_eq!(rational_solutions(&d).unwrap(), vec![inv]);
        // ∂² has {1, t}
        let d = LinearDiffOperator::new(T, vec![Rf::zero(), Rf::zero()]);
        assert_eq!(rational_solutions(&d).unwrap().len(), 2);
        // t² + 1 does not split
        let d = LinearDiffOperator::new(T, vec![&Rf::one() / &(&(&t() * &t()) + &Rf::one())]);
        assert!(matches!(rational_solutions(&d), Err(GaloisError::Unsupported(_))));
    }

    #[test]
    fn rebase_rank_one() {
        let tw = Tower::rational(None, &["t1", "t2"]).unwrap();
        let t1 = tw.element("t1").unwrap();
        let one = Mat::identity(1);
        let s = ConnectionSystem::new(&tw, 1, None, vec![("t1".into(), Mat::zeros(1, 1)), ("t2".into(), one.clone())])
            .unwrap();
        let r = DerivationRebase::new(
            &["t1", "t2"],
            &["d1", "d2"],
            Matrix::from_rows(vec![vec![t1.clone(), Rf::zero()], vec![t1.clone(), Rf::one()]]),
        )
        .unwrap();
        let s2 = rebase_derivations(&s, &r).unwrap();
        assert!(s2.matrix("d1").unwrap().is_zero());
        assert_eq!(s2.matrix("d2").unwrap(), &one);
        assert_eq!(rebase_derivations(&s2, &r.inverse()).unwrap(), s);

        let h1 = horizontal_sections(&s2, &["d1"], 6).unwrap();
        assert!(h1.contains(&vec![Rf::one()]));
        let h2 = horizontal_sections(&s2, &["d2"], 6).unwrap();
        assert_eq!(h2, vec![vec![t1.clone()]]);
        assert!(horizontal_sections(&s2, &["d1", "d2"], 6).unwrap().is_empty());
    }
}
