#![allow(dead_code)]

use isomon_core::connection::Mat;
use isomon_core::exactalg::{q_int, Matrix, Monomial, MultiPoly, RationalFunction, Var};
use proptest::prelude::*;

pub type Rf = RationalFunction;

/// Polynomials with at most `terms` terms, exponents ≤ 2, small coefficients.
pub fn poly(vars: Vec<Var>, terms: usize) -> impl Strategy<Value = MultiPoly> {
    let n = vars.len();
    prop::collection::vec((prop::collection::vec(0u32..=2, n), -3i64..=3), 0..=terms).prop_map(move |ts| {
        MultiPoly::from_terms(ts.into_iter().map(|(exps, c)| {
            let m = vars
                .iter()
                .zip(exps)
                .fold(Monomial::one(), |m, (v, e)| m.mul(&Monomial::var(*v, e)));
            (m, q_int(c))
        }))
    })
}

pub fn nonzero_poly(vars: Vec<Var>, terms: usize) -> impl Strategy<Value = MultiPoly> {
    poly(vars, terms).prop_filter("nonzero", |p| !p.is_zero())
}

pub fn rf(vars: Vec<Var>, terms: usize) -> impl Strategy<Value = Rf> {
    (poly(vars.clone(), terms), nonzero_poly(vars, terms))
        .prop_map(|(n, d)| RationalFunction::normalize(n, d).unwrap())
}

pub fn matrix(vars: Vec<Var>, n: usize, terms: usize) -> impl Strategy<Value = Mat> {
    prop::collection::vec(rf(vars, terms), n * n).prop_map(move |es| Matrix::from_fn(n, n, |i, j| es[i * n + j].clone()))
}

/// Random matrices whose entries are small polynomials (cheap to differentiate).
pub fn poly_matrix(vars: Vec<Var>, n: usize, terms: usize) -> impl Strategy<Value = Mat> {
    prop::collection::vec(poly(vars, terms), n * n)
        .prop_map(move |es| Matrix::from_fn(n, n, |i, j| Rf::from_poly(es[i * n + j].clone())))
}

/// `c / (x − pole)^k` terms with poles linear in the parameters.
pub fn pole_sum(x: Var, params: Vec<Var>) -> impl Strategy<Value = Rf> {
    let np = params.len();
    prop::collection::vec(
        (-2i64..=2, prop::collection::vec(-1i64..=1, np), 1i64..=3, -3i64..=3),
        1..=3,
    )
    .prop_map(move |ts| {
        let xr = Rf::var(x);
        ts.into_iter().fold(Rf::zero(), |acc, (c0, cs, k, num)| {
            let mut pole = Rf::from_int(c0);
            for (v, c) in params.iter().zip(cs) {
                pole = &pole + &(&Rf::var(*v) * &Rf::from_int(c));
            }
            let den = (&xr - &pole).pow(k).unwrap();
            &acc + &(&Rf::from_int(num) / &den)
        })
    })
}
