mod common;

use common::{pole_sum, poly, rf, Rf};
use isomon_core::curve::{CurveElement, CurveSpec};
use isomon_core::derham::ApplyTarget;
use isomon_core::exactalg::{nullspace, Matrix, MultiPoly, Var};
use proptest::prelude::*;

const X: Var = Var(0);
const T: Var = Var(1);

fn xp() -> MultiPoly {
    MultiPoly::var(X)
}

fn tp() -> MultiPoly {
    MultiPoly::var(T)
}

/// Legendre, an irreducible cubic, and a quartic.
fn curve(which: usize) -> CurveSpec {
    let one = MultiPoly::one();
    let f = match which {
        0 => &(&xp() * &(&xp() - &one)) * &(&xp() - &tp()),
        1 => &(&xp().pow(3) + &(&tp() * &xp())) + &one,
        _ => &(&xp().pow(4) + &xp()) + &tp(),
    };
    CurveSpec::new(f, X).unwrap()
}

fn element() -> impl Strategy<Value = CurveElement> {
    (rf(vec![X, T], 2), rf(vec![X, T], 2)).prop_map(|(e, o)| CurveElement::new(e, o))
}

/// Odd parts with poles only on `f = 0`, even parts with split poles.
fn reducible(c: &CurveSpec) -> impl Strategy<Value = CurveElement> {
    let f = Rf::from_poly(c.f().clone());
    (pole_sum(X, vec![T]), poly(vec![X, T], 3), 0i64..=2).prop_map(move |(even, p, k)| {
        CurveElement::new(even, &Rf::from_poly(p) / &f.pow(k).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn leibniz_and_commutation(which in 0usize..3, a in element(), b in element()) {
        let c = curve(which);
        for v in [X, T] {
            let lhs = c.derive(&a.mul(&b, &c), v);
            let rhs = c.derive(&a, v).mul(&b, &c).plus(&a.mul(&c.derive(&b, v), &c));
            prop_assert_eq!(lhs, rhs);
        }
        prop_assert_eq!(c.derive(&c.derive(&a, X), T), c.derive(&c.derive(&a, T), X));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn reduction_identity((which, w) in (0usize..3).prop_flat_map(|i| (Just(i), reducible(&curve(i))))) {
        let c = curve(which);
        let r = c.reduce(&w).unwrap();
        prop_assert!(c.verify_reduction(&w, &r));
        prop_assert_eq!(r.class.coords.len(), c.basis_len());
    }

    #[test]
    fn exact_forms_have_zero_class((which, e) in (0usize..3).prop_flat_map(|i| (Just(i), reducible(&curve(i))))) {
        let c = curve(which);
        let r = c.reduce(&c.derive(&e, X)).unwrap();
        prop_assert!(r.class.is_zero());
        prop_assert!(c.derive(&r.certificate.sub(&e), X).is_zero());
    }
}

/// Coordinates of `∂_t^j ω` for `j < n` are independent over k(t).
fn independent(c: &CurveSpec, index: usize, n: usize) -> bool {
    let mut cur = c.basis_form(index);
    let mut cols = Vec::new();
    for j in 0..n {
        if j > 0 {
            cur = c.derive(&cur, T);
        }
        let r = c.reduce(&cur).unwrap();
        assert!(r.class.rational.is_zero());
        cols.push(r.class.coords);
    }
    let m = Matrix::from_fn(c.basis_len(), n, |i, j| cols[j][i].clone());
    nullspace(&m).is_empty()
}

#[test]
fn picard_fuchs_verified_and_minimal() {
    for which in 0..3 {
        let c = curve(which);
        for index in 0..c.basis_len() {
            let r = c.picard_fuchs(index, T, 4).unwrap();
            assert!(c.verify_picard_fuchs(&c.basis_form(index), &r));
            let n = r.operator.order();
            assert!(independent(&c, index, n), "curve {which} form {index}");
        }
    }
}

#[test]
fn legendre_has_no_first_order_operator() {
    let c = curve(0);
    assert!(independent(&c, 0, 2));
    assert_eq!(c.picard_fuchs(0, T, 4).unwrap().operator.order(), 2);
}
