//! Dense univariate polynomials over ℚ, as coefficient vectors (index = power).
//! Used for specialization tests and real-root isolation.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::poly::Q;

pub type DenseQ = Vec<Q>;

pub fn trim(p: &mut DenseQ) {
    while let Some(c) = p.last() {
        if c.is_zero() {
            p.pop();
        } else {
            break;
        }
    }
}

pub fn eval(p: &DenseQ, x: &Q) -> Q {
    let mut acc = Q::zero();
    for c in p.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

pub fn derivative(p: &DenseQ) -> DenseQ {
    let mut out: DenseQ = p
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * Q::from_integer(i.into()))
        .collect();
    trim(&mut out);
    out
}

pub fn rem(a: &DenseQ, b: &DenseQ) -> DenseQ {
    let mut r = a.clone();
    trim(&mut r);
    let db = b.len() - 1;
    let lb = b[db].clone();
    while r.len() > db {
        let dr = r.len() - 1;
        let f = &r[dr] / &lb;
        for i in 0..=db {
            let t = &f * &b[i];
            r[dr - db + i] -= t;
        }
        trim(&mut r);
    }
    r
}

/// Integer polynomial with content 1 and the same roots as `p`.
fn primitive(p: &DenseQ) -> Vec<BigInt> {
    let l = p.iter().fold(BigInt::one(), |l, c| l.lcm(c.denom()));
    let ints: Vec<BigInt> = p.iter().map(|c| c.numer() * (&l / c.denom())).collect();
    primitive_int(ints)
}

fn primitive_int(mut p: Vec<BigInt>) -> Vec<BigInt> {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
    let g = p.iter().fold(BigInt::zero(), |g, c| g.gcd(c));
    if !g.is_zero() && !g.is_one() {
        for c in p.iter_mut() {
            *c = &*c / &g;
        }
    }
    p
}

/// Pseudo-remainder `lc(b)^k a mod b` over ℤ.
fn prem(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let lb = &b[db];
    while r.len() > db {
        let dr = r.len() - 1;
        let f = r[dr].clone();
        for c in r.iter_mut() {
            *c *= lb;
        }
        for i in 0..=db {
            r[dr - db + i] -= &f * &b[i];
        }
        while r.last().is_some_and(|c| c.is_zero()) {
            r.pop();
        }
    }
    r
}

/// Monic gcd over ℚ, by a primitive remainder sequence over ℤ.
pub fn gcd(a: &DenseQ, b: &DenseQ) -> DenseQ {
    let mut x = primitive(a);
    let mut y = primitive(b);
    if x.len() < y.len() {
        std::mem::swap(&mut x, &mut y);
    }
    if y.is_empty() {
        if x.is_empty() {
            return Vec::new();
        }
    } else {
        loop {
            let r = primitive_int(prem(&x, &y));
            x = y;
            if r.is_empty() {
                break;
            }
            y = r;
        }
    }
    let lc = x.last().unwrap().clone();
    x.into_iter().map(|c| Q::new(c, lc.clone())).collect()
}

fn sign(q: &Q) -> i32 {
    if q.is_positive() {
        1
    } else if q.is_negative() {
        -1
    } else {
        0
    }
}

/// Sturm chain of a squarefree polynomial.
pub fn sturm_chain(p: &DenseQ) -> Vec<DenseQ> {
    let mut chain = vec![p.clone(), derivative(p)];
    loop {
        let n = chain.len();
        if chain[n - 1].is_empty() {
            chain.pop();
            break;
        }
        if chain[n - 1].len() == 1 {
            break;
        }
        let r: DenseQ = rem(&chain[n - 2], &chain[n - 1]).into_iter().map(|c| -c).collect();
        if r.is_empty() {
            break;
        }
        chain.push(r);
    }
    chain
}

fn variations(chain: &[DenseQ], x: &Q) -> usize {
    let mut last = 0;
    let mut count = 0;
    for p in chain {
        let s = sign(&eval(p, x));
        if s != 0 {
            if last != 0 && s != last {
                count += 1;
            }
            last = s;
        }
    }
    count
}

/// Integer roots of a squarefree polynomial with integer coefficients and
/// monic leading term, found by Sturm bisection on half-integer boundaries.
pub fn integer_roots_monic(p: &DenseQ) -> Vec<Q> {
    let mut p = p.clone();
    trim(&mut p);
    let mut roots = Vec::new();
    if p.len() <= 1 {
        return roots;
    }
    if p[0].is_zero() {
        roots.push(Q::zero());
        p.remove(0);
        trim(&mut p);
        if p.len() <= 1 {
            return roots;
        }
    }
    // Cauchy bound.
    let lc = p.last().unwrap().abs();
    let mut bound = Q::zero();
    for c in &p[..p.len() - 1] {
        let r = c.abs() / &lc;
        if r > bound {
            bound = r;
        }
    }
    let bound = (bound + Q::one()).ceil();
    let chain = sturm_chain(&p);
    let half = Q::new(1.into(), 2.into());
    // Roots in (lo + 1/2, hi + 1/2] for integers lo < hi.
    let mut stack = vec![(-&bound - Q::one(), bound.clone())];
    while let Some((lo, hi)) = stack.pop() {
        let n = variations(&chain, &(&lo + &half)) as i64 - variations(&chain, &(&hi + &half)) as i64;
        if n <= 0 {
            continue;
        }
        if &hi - &lo == Q::one() {
            if eval(&p, &hi).is_zero() {
                roots.push(hi.clone());
            }
            continue;
        }
        let mid = ((&lo + &hi) / Q::from_integer(2.into())).floor();
        stack.push((lo, mid.clone()));
        stack.push((mid, hi));
    }
    roots.sort();
    roots
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::poly::q_int;

    fn poly(cs: &[i64]) -> DenseQ {
        cs.iter().map(|&c| q_int(c)).collect()
    }

    #[test]
    fn finds_integer_roots() {
        // (y - 3)(y + 5)(y^2 + 1) = y^4 + 2y^3 - 14y^2 + 2y - 15
        let p = poly(&[-15, 2, -14, 2, 1]);
        assert_eq!(integer_roots_monic(&p), vec![q_int(-5), q_int(3)]);
        // y(y - 1)(y - 2)
        let p = poly(&[0, 2, -3, 1]);
        assert_eq!(integer_roots_monic(&p), vec![q_int(0), q_int(1), q_int(2)]);
        // y^2 - 2 has none
        assert!(integer_roots_monic(&poly(&[-2, 0, 1])).is_empty());
    }

    #[test]
    fn gcd_is_monic() {
        let a = poly(&[-1, 0, 1]); // y^2 - 1
        let b = poly(&[2, 2]); // 2y + 2
        assert_eq!(gcd(&a, &b), poly(&[1, 1]));
        assert_eq!(gcd(&a, &poly(&[1, 0, 1])), poly(&[1]));
    }

    #[test]
    fn gcd_with_fractions_and_zero() {
        use crate::exactalg::poly::q_frac;
        // (y/2 - 1/3)(y + 1) and (3y - 2)(y^2 + 7)
        let a = vec![q_frac(-1, 3), q_frac(1, 6), q_frac(1, 2)];
        let b = poly(&[-14, 21, -2, 3]);
        assert_eq!(gcd(&a, &b), vec![q_frac(-2, 3), q_int(1)]);
        assert_eq!(gcd(&a, &Vec::new()), vec![q_frac(-2, 3), q_frac(1, 3), q_int(1)]);
        assert!(gcd(&Vec::new(), &Vec::new()).is_empty());
    }
}
