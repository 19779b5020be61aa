//! Roots in ℚ(params) of polynomials in one distinguished variable.
//!
//! A squarefree primitive `f = Σ f_i v^i` of degree `n` is turned into the
//! monic `q(y) = Σ f_i·lc^(n-1-i)·y^i` over ℤ[params]; its roots in the
//! fraction field are integral polynomials `Y`, and `v = Y/lc`. Each `Y` is
//! found by specializing the parameters to integers, taking integer roots of
//! the image, Newton-lifting in the shifted parameters up to the degree
//! bound, and checking the candidate exactly.

use std::collections::BTreeSet;

use num_traits::{One, Zero};

use super::dense::{self, DenseQ};
use super::gcd::squarefree_in;
use super::poly::{q_int, MultiPoly, Q};
use super::ratfunc::RationalFunction;
use super::registry::Var;

/// Distinct roots of `p` (as a polynomial in `v`) in the field of rational
/// functions of the remaining variables.
pub fn rational_roots(p: &MultiPoly, v: Var) -> Vec<RationalFunction> {
    if p.is_zero() || p.degree_in(v) == 0 {
        return Vec::new();
    }
    let (_, factors) = squarefree_in(p, v);
    let mut out = BTreeSet::new();
    for (f, _) in factors {
        for r in roots_squarefree(&f, v) {
            out.insert(r);
        }
    }
    out.into_iter().collect()
}

/// Splits off the linear factors of a squarefree `f`: returns primitive
/// factors `D·v - N` for every root `N/D`, and the cofactor.
pub fn linear_factors(f: &MultiPoly, v: Var) -> (Vec<MultiPoly>, MultiPoly) {
    let mut rest = f.clone();
    let mut lin = Vec::new();
    for r in roots_squarefree(f, v) {
        let (n, d) = r.into_parts();
        let fac = (&(&d * &MultiPoly::var(v)) - &n).primitive_integer();
        rest = rest.div_exact(&fac).expect("root gives a factor");
        lin.push(fac);
    }
    (lin, rest)
}

fn roots_squarefree(f: &MultiPoly, v: Var) -> Vec<RationalFunction> {
    let f = f.primitive_integer();
    let n = f.degree_in(v) as usize;
    if n == 0 {
        return Vec::new();
    }
    let cs = f.coeffs_in(v);
    if n == 1 {
        let r = RationalFunction::normalize(-&cs[0], cs[1].clone()).unwrap();
        return vec![r];
    }
    let lc = cs[n].clone();
    // Monic transform: q_i = f_i · lc^(n-1-i), q_n = 1.
    let mut q: Vec<MultiPoly> = Vec::with_capacity(n + 1);
    for (i, c) in cs.iter().enumerate().take(n) {
        q.push(c * &lc.pow((n - 1 - i) as u32));
    }
    q.push(MultiPoly::one());
    let params: Vec<Var> = {
        let mut s = BTreeSet::new();
        for c in &q {
            s.extend(c.vars());
        }
        s.into_iter().collect()
    };
    let bound = (0..n)
        .map(|i| q[i].total_degree() as usize / (n - i))
        .max()
        .unwrap_or(0);
    let point = match choose_point(&q, &params) {
        Some(p) => p,
        None => return Vec::new(),
    };
    // Shift the parameters: q̃(y; s) = q(y; s + a).
    let shifted: Vec<MultiPoly> = q
        .iter()
        .map(|c| {
            let mut c = c.clone();
            for (w, a) in params.iter().zip(point.iter()) {
                c = c.substitute(*w, &(&MultiPoly::var(*w) + &MultiPoly::constant(a.clone())));
            }
            c
        })
        .collect();
    let image: DenseQ = shifted
        .iter()
        .map(|c| c.homogeneous_part(0).constant_value().unwrap_or_else(Q::zero))
        .collect();
    let dimage = dense::derivative(&image);
    let mut roots = Vec::new();
    for r in dense::integer_roots_monic(&image) {
        let slope = dense::eval(&dimage, &r);
        let mut y = MultiPoly::constant(r);
        for d in 1..=bound as u32 {
            let val = horner(&shifted, &y).homogeneous_part(d);
            if val.is_zero() {
                continue;
            }
            y = &y - &val.scale(&(Q::one() / &slope));
        }
        // Undo the shift.
        for (w, a) in params.iter().zip(point.iter()) {
            y = y.substitute(*w, &(&MultiPoly::var(*w) - &MultiPoly::constant(a.clone())));
        }
        if horner(&q, &y).is_zero() {
            roots.push(RationalFunction::normalize(y, lc.clone()).unwrap());
        }
    }
    roots
}

fn horner(coeffs: &[MultiPoly], y: &MultiPoly) -> MultiPoly {
    let mut acc = MultiPoly::zero();
    for c in coeffs.iter().rev() {
        acc = &(&acc * y) + c;
    }
    acc
}

/// Integer parameter values keeping the specialized polynomial squarefree.
fn choose_point(q: &[MultiPoly], params: &[Var]) -> Option<Vec<Q>> {
    const BASE: [i64; 8] = [2, 3, 5, 7, 11, 13, 17, 19];
    for attempt in 0..40i64 {
        let point: Vec<Q> = (0..params.len())
            .map(|j| q_int(BASE[(j + attempt as usize) % BASE.len()] + 3 * attempt + j as i64))
            .collect();
        let image: DenseQ = q
            .iter()
            .map(|c| {
                let mut c = c.clone();
                for (w, a) in params.iter().zip(point.iter()) {
                    c = c.eval_var(*w, a);
                }
                c.constant_value().unwrap_or_else(Q::zero)
            })
            .collect();
        let g = dense::gcd(&image, &dense::derivative(&image));
        if g.len() == 1 {
            return Some(point);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn var(i: u32) -> MultiPoly {
        MultiPoly::var(Var(i))
    }

    #[test]
    fn roots_with_parameters() {
        let (x, t, s) = (var(0), var(1), var(2));
        let one = MultiPoly::one();
        // (x - t)(2x - 1)(t x - s - 1)(x^2 + 1)
        let p = &(&(&(&x - &t) * &(&x.scale(&q_int(2)) - &one)) * &(&(&t * &x) - &(&s + &one)))
            * &(&(&x * &x) + &one);
        let roots = rational_roots(&p, Var(0));
        let expect: BTreeSet<RationalFunction> = [
            RationalFunction::from_poly(t.clone()),
            RationalFunction::constant(Q::new(1.into(), 2.into())),
            RationalFunction::normalize(&s + &one, t.clone()).unwrap(),
        ]
        .into_iter()
        .collect();
        assert_eq!(roots.into_iter().collect::<BTreeSet<_>>(), expect);
    }

    #[test]
    fn irreducible_quadratic_has_no_roots() {
        let (x, t) = (var(0), var(1));
        let p = &(&x * &x) - &t;
        assert!(rational_roots(&p, Var(0)).is_empty());
        let (lin, rest) = linear_factors(&p, Var(0));
        assert!(lin.is_empty());
        assert_eq!(rest, p);
    }

    #[test]
    fn higher_degree_root_polynomials() {
        let (x, t) = (var(0), var(1));
        // (x - t^2 - 3t)(x + t^3)
        let r1 = &(&t * &t) + &t.scale(&q_int(3));
        let r2 = (&(&t * &t) * &t).neg();
        let p = &(&x - &r1) * &(&x - &r2);
        let roots: BTreeSet<_> = rational_roots(&p, Var(0)).into_iter().collect();
        assert!(roots.contains(&RationalFunction::from_poly(r1)));
        assert!(roots.contains(&RationalFunction::from_poly(r2)));
        assert_eq!(roots.len(), 2);
    }
}
