//! Multivariate gcd over ℚ by recursive content extraction and dense
//! evaluation/interpolation in the non-main variables.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Pow, ToPrimitive, Zero};

use super::dense::{self, DenseQ};
use super::poly::{q_int, Monomial, MultiPoly, Q};
use super::registry::Var;

/// Monic (leading coefficient 1 under grlex) greatest common divisor.
/// `gcd(0, 0) = 0`.
pub fn gcd(a: &MultiPoly, b: &MultiPoly) -> MultiPoly {
    gcd_raw(a, b).make_monic()
}

pub fn lcm(a: &MultiPoly, b: &MultiPoly) -> MultiPoly {
    if a.is_zero() || b.is_zero() {
        return MultiPoly::zero();
    }
    let g = gcd_raw(a, b);
    (a * &b.div_exact(&g).expect("gcd divides")).make_monic()
}

pub fn gcd_many<'a>(polys: impl IntoIterator<Item = &'a MultiPoly>) -> MultiPoly {
    let mut acc = MultiPoly::zero();
    for p in polys {
        acc = gcd_raw(&acc, p);
        if acc.is_constant() && !acc.is_zero() {
            return MultiPoly::one();
        }
    }
    acc.make_monic()
}

fn div_monomial(p: &MultiPoly, m: &Monomial) -> MultiPoly {
    MultiPoly::from_terms(
        p.terms()
            .iter()
            .map(|(mm, c)| (mm.div(m).expect("monomial content divides"), c.clone())),
    )
}

fn gcd_raw(a: &MultiPoly, b: &MultiPoly) -> MultiPoly {
    if a.is_zero() {
        return b.clone();
    }
    if b.is_zero() {
        return a.clone();
    }
    if a.is_constant() || b.is_constant() {
        return MultiPoly::one();
    }
    if a == b {
        return a.clone();
    }
    let ma = a.monomial_content();
    let mb = b.monomial_content();
    if !ma.is_one() || !mb.is_one() {
        let gm = ma.gcd(&mb);
        let g = gcd_raw(&div_monomial(a, &ma), &div_monomial(b, &mb));
        return g.mul_term(&gm, &Q::one());
    }
    let va = a.vars();
    let vb = b.vars();
    // degree 0 in every shared variable means a constant gcd
    if va.intersection(&vb).all(|&w| specialized_coprime(a, b, w)) {
        return MultiPoly::one();
    }
    if let Some(&v) = va.difference(&vb).next() {
        return gcd_with_coeffs(a, v, b);
    }
    if let Some(&v) = vb.difference(&va).next() {
        return gcd_with_coeffs(b, v, a);
    }
    // Both use the same variables; pick the main variable of least degree.
    let v = *va
        .iter()
        .min_by_key(|&&v| (a.degree_in(v).max(b.degree_in(v)), v))
        .unwrap();
    if a.len() <= b.len() {
        if let Some(_) = b.div_exact(a) {
            return a.clone();
        }
    } else if let Some(_) = a.div_exact(b) {
        return b.clone();
    }
    let ca = a.coeffs_in(v);
    let cb = b.coeffs_in(v);
    let cont_a = gcd_list(&ca);
    let cont_b = gcd_list(&cb);
    let pa = a.div_exact(&cont_a).expect("content divides");
    let pb = b.div_exact(&cont_b).expect("content divides");
    let gc = gcd_raw(&cont_a, &cont_b);
    if specialized_coprime(&pa, &pb, v) {
        return gc;
    }
    let h = interpolation_gcd(&pa, &pb, v);
    &gc * &h
}

fn gcd_list(cs: &[MultiPoly]) -> MultiPoly {
    let mut acc = MultiPoly::zero();
    for c in cs {
        if c.is_zero() {
            continue;
        }
        acc = gcd_raw(&acc, c);
        if acc.is_constant() {
            return MultiPoly::one();
        }
    }
    acc
}

/// `gcd(a, b)` when `v` occurs in `a` but not in `b`: the gcd divides every
/// coefficient of `a` with respect to `v`.
fn gcd_with_coeffs(a: &MultiPoly, v: Var, b: &MultiPoly) -> MultiPoly {
    let mut cs: Vec<MultiPoly> = a.coeffs_in(v).into_iter().filter(|c| !c.is_zero()).collect();
    cs.sort_by_key(|c| c.len());
    let mut acc = b.clone();
    for c in &cs {
        acc = gcd_raw(&acc, c);
        if acc.is_constant() {
            return MultiPoly::one();
        }
    }
    acc
}

const EVAL_POINTS: [i64; 12] = [3, 7, 11, 17, 23, 31, 41, 53, 61, 73, 89, 97];

fn specialize(p: &MultiPoly, v: Var, attempt: usize) -> DenseQ {
    let mut out: DenseQ = vec![Q::zero(); p.degree_in(v) as usize + 1];
    for (m, c) in p.terms() {
        let mut val = c.clone();
        let mut ev = 0;
        for (w, e) in m.vars() {
            if w == v {
                ev = e;
            } else {
                let pt = EVAL_POINTS[(w.index() + 5 * attempt) % EVAL_POINTS.len()]
                    + (w.index() / EVAL_POINTS.len()) as i64;
                val *= Pow::pow(q_int(pt), e);
            }
        }
        out[ev as usize] += val;
    }
    out
}

/// Sufficient test for `gcd(a, b)` being free of `v`: a specialization of
/// the other variables that keeps the leading coefficients nonzero yields
/// coprime univariate images.
fn specialized_coprime(a: &MultiPoly, b: &MultiPoly, v: Var) -> bool {
    let da = a.degree_in(v) as usize;
    let db = b.degree_in(v) as usize;
    if let Some(coprime) = modular_coprime(a, b, v, da, db) {
        return coprime;
    }
    for attempt in 0..2 {
        let sa = specialize(a, v, attempt);
        let sb = specialize(b, v, attempt);
        if sa[da].is_zero() || sb[db].is_zero() {
            continue;
        }
        return dense::gcd(&sa, &sb).len() == 1;
    }
    false
}

const MODULUS: u64 = (1 << 61) - 1;

fn mul_mod(x: u64, y: u64) -> u64 {
    ((x as u128 * y as u128) % MODULUS as u128) as u64
}

fn pow_mod(mut x: u64, mut e: u64) -> u64 {
    let mut acc = 1;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, x);
        }
        x = mul_mod(x, x);
        e >>= 1;
    }
    acc
}

fn inv_mod(x: u64) -> u64 {
    pow_mod(x, MODULUS - 2)
}

fn int_mod(n: &BigInt) -> u64 {
    let m = BigInt::from(MODULUS);
    let r = n.mod_floor(&m);
    r.to_u64().expect("reduced")
}

fn q_mod(q: &Q) -> Option<u64> {
    let d = int_mod(q.denom());
    (d != 0).then(|| mul_mod(int_mod(q.numer()), inv_mod(d)))
}

/// Image of `p` in `(ℤ/M)[v]` after the same specialization as [`specialize`].
fn specialize_mod(p: &MultiPoly, v: Var) -> Option<Vec<u64>> {
    let mut out = vec![0u64; p.degree_in(v) as usize + 1];
    for (m, c) in p.terms() {
        let mut val = q_mod(c)?;
        let mut ev = 0;
        for (w, e) in m.vars() {
            if w == v {
                ev = e;
            } else {
                let pt = EVAL_POINTS[w.index() % EVAL_POINTS.len()] + (w.index() / EVAL_POINTS.len()) as i64;
                val = mul_mod(val, pow_mod(pt as u64, e as u64));
            }
        }
        let slot = &mut out[ev as usize];
        *slot = (*slot + val) % MODULUS;
    }
    Some(out)
}

fn rem_mod(a: &mut Vec<u64>, b: &[u64]) {
    let db = b.len() - 1;
    let inv = inv_mod(b[db]);
    while a.len() > db {
        let da = a.len() - 1;
        let f = mul_mod(a[da], inv);
        for i in 0..=db {
            let t = mul_mod(f, b[i]);
            a[da - db + i] = (a[da - db + i] + MODULUS - t) % MODULUS;
        }
        while a.last() == Some(&0) {
            a.pop();
        }
    }
}

/// Coprimality of images modulo a prime that keeps both leading
/// coefficients; a degree-0 modular gcd bounds the rational one. `None` when
/// the prime is unsuitable.
fn modular_coprime(a: &MultiPoly, b: &MultiPoly, v: Var, da: usize, db: usize) -> Option<bool> {
    let mut x = specialize_mod(a, v)?;
    let mut y = specialize_mod(b, v)?;
    if x[da] == 0 || y[db] == 0 {
        return None;
    }
    while !y.is_empty() {
        rem_mod(&mut x, &y);
        std::mem::swap(&mut x, &mut y);
    }
    Some(x.len() == 1)
}

fn primitive_in(p: &MultiPoly, v: Var) -> MultiPoly {
    let c = gcd_list(&p.coeffs_in(v));
    if c.is_constant() {
        p.clone()
    } else {
        p.div_exact(&c).expect("content divides")
    }
}

/// Gcd of two polynomials primitive in `v`, by evaluating one of the other
/// variables, recursing, and interpolating (Brown's dense scheme over ℚ).
/// Images are normalized so the leading coefficient in `v` is the image of
/// `gcd(lc_v a, lc_v b)`; every candidate is checked by exact division.
fn interpolation_gcd(a: &MultiPoly, b: &MultiPoly, v: Var) -> MultiPoly {
    let mut others: Vec<Var> = a.vars().union(&b.vars()).copied().filter(|&w| w != v).collect();
    if others.is_empty() {
        let da = a.coeffs_in(v).iter().map(|c| c.constant_value().unwrap()).collect();
        let db = b.coeffs_in(v).iter().map(|c| c.constant_value().unwrap()).collect();
        let g = dense::gcd(&da, &db);
        return MultiPoly::from_coeffs_in(v, &g.into_iter().map(MultiPoly::constant).collect::<Vec<_>>());
    }
    others.sort_by_key(|&w| (a.degree_in(w).max(b.degree_in(w)), w));
    let w = others[0];
    let la = a.lc_in(v);
    let lb = b.lc_in(v);
    let gamma = gcd_raw(&la, &lb);
    let bound = a.degree_in(w).min(b.degree_in(w)) + gamma.degree_in(w);
    let mut points: Vec<(Q, MultiPoly)> = Vec::new();
    let mut best = u32::MAX;
    let mut interp = MultiPoly::zero();
    let mut alpha = 0i64;
    loop {
        alpha = if alpha > 0 { -alpha } else { 1 - alpha };
        let pt = q_int(alpha);
        if la.eval_var(w, &pt).is_zero() || lb.eval_var(w, &pt).is_zero() {
            continue;
        }
        let ia = primitive_in(&a.eval_var(w, &pt), v);
        let ib = primitive_in(&b.eval_var(w, &pt), v);
        let g = gcd_raw(&ia, &ib);
        let d = g.degree_in(v);
        if d == 0 {
            return MultiPoly::one();
        }
        if d > best {
            continue;
        }
        let Some(scale) = gamma.eval_var(w, &pt).div_exact(&g.lc_in(v)) else {
            continue;
        };
        let g = &g * &scale;
        if d < best {
            best = d;
            points.clear();
            interp = MultiPoly::zero();
        }
        // Newton step: interp += (g − interp(α)) · Π(w − α_j)/Π(α − α_j)
        let mut basis = MultiPoly::one();
        let mut denom = q_int(1);
        for (aj, _) in &points {
            basis = &basis * &(&MultiPoly::var(w) - &MultiPoly::constant(aj.clone()));
            denom *= &pt - aj;
        }
        let diff = &g - &interp.eval_var(w, &pt);
        interp = &interp + &(&diff * &basis).scale(&(q_int(1) / denom));
        points.push((pt, g));
        if points.len() as u32 > bound {
            let cand = primitive_in(&interp, v);
            if a.div_exact(&cand).is_some() && b.div_exact(&cand).is_some() {
                return cand;
            }
            if points.len() as u32 > 2 * bound + 8 {
                // an unlucky image slipped in; start over
                best = u32::MAX;
                points.clear();
                interp = MultiPoly::zero();
            }
        }
    }
}

/// Squarefree decomposition (Yun) of `p` regarded as a polynomial in `v`
/// with coefficients in the other variables. Returns `(content, factors)`
/// where `p = content · Π f_i^{m_i}` and the factors are primitive in `v`.
pub fn squarefree_in(p: &MultiPoly, v: Var) -> (MultiPoly, Vec<(MultiPoly, u32)>) {
    let cs = p.coeffs_in(v);
    let cont = gcd_list(&cs);
    let cont = if cont.is_zero() { MultiPoly::one() } else { cont };
    let prim = p.div_exact(&cont).expect("content divides");
    let mut out = Vec::new();
    if prim.degree_in(v) == 0 {
        return (p.clone(), out);
    }
    let dp = prim.derivative(v);
    let a0 = gcd_raw(&prim, &dp);
    let mut b = prim.div_exact(&a0).unwrap();
    let mut c = dp.div_exact(&a0).unwrap();
    let mut d = &c - &b.derivative(v);
    let mut i = 1;
    loop {
        let a = gcd_raw(&b, &d);
        if a.degree_in(v) > 0 {
            out.push((a.primitive_integer(), i));
        }
        b = b.div_exact(&a).unwrap();
        if b.degree_in(v) == 0 {
            break;
        }
        c = d.div_exact(&a).unwrap();
        d = &c - &b.derivative(v);
        i += 1;
    }
    // Put the unit left over into the content.
    let mut prod = MultiPoly::one();
    for (f, m) in &out {
        prod = &prod * &f.pow(*m);
    }
    let unit = p.div_exact(&prod).expect("factors divide");
    (unit, out)
}
