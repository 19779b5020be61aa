mod common;

use common::{pole_sum, rf, Rf};
use isomon_core::derham::{dependence_system, gm_derivative, reduce, telescoper, verify_telescoper, ReductionResult};
use isomon_core::exactalg::{q_int, Var};
use proptest::prelude::*;

const X: Var = Var(0);
const T: Var = Var(1);

fn classes_up_to(b: &Rf, n: usize) -> Vec<isomon_core::derham::H1Class> {
    let mut cur = b.clone();
    let mut out = Vec::new();
    for j in 0..=n {
        if j > 0 {
            cur = cur.derive(T);
        }
        out.push(reduce(&cur, X).unwrap().class);
    }
    out
}

fn identity_holds(f: &Rf, r: &ReductionResult) -> bool {
    &r.certificate.derive(X) + &r.class.representative(X) == *f
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn derivatives_reduce_to_zero(g in pole_sum(X, vec![T]), p in rf(vec![X, T], 2)) {
        let p = if p.den().degree_in(X) == 0 { p } else { Rf::zero() };
        let g = &g + &p;
        let r = reduce(&g.derive(X), X).unwrap();
        prop_assert!(r.class.is_zero());
        prop_assert!((&r.certificate - &g).derive(X).is_zero());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn reduction_identity_and_linearity(f in pole_sum(X, vec![T]), h in pole_sum(X, vec![T]), a in -3i64..=3, b in rf(vec![T], 1)) {
        let rf_ = reduce(&f, X).unwrap();
        let rh = reduce(&h, X).unwrap();
        prop_assert!(identity_holds(&f, &rf_));
        let comb = &f.scale(&q_int(a)) + &(&b * &h);
        let rc = reduce(&comb, X).unwrap();
        prop_assert!(identity_holds(&comb, &rc));
        prop_assert_eq!(rc.class, rf_.class.scale(&Rf::from_int(a)).add(&rh.class.scale(&b)));
    }

    #[test]
    fn gauss_manin_matches_reduction(f in pole_sum(X, vec![T])) {
        let c = reduce(&f, X).unwrap().class;
        prop_assert_eq!(gm_derivative(&c, T), reduce(&f.derive(T), X).unwrap().class);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(30))]

    #[test]
    fn telescoper_verified_minimal_and_invariant(b in pole_sum(X, vec![T]), g in pole_sum(X, vec![T])) {
        let r = telescoper(&b, X, T, 8).unwrap();
        prop_assert!(verify_telescoper(&b, X, &r));
        let n = r.operator.order();
        let classes = classes_up_to(&b, n);
        if n > 0 {
            prop_assert!(!classes[0].is_zero());
        }
        for m in 1..n {
            prop_assert!(dependence_system(&classes, m).is_inconsistent());
        }
        let shifted = &b + &g.derive(X);
        let r2 = telescoper(&shifted, X, T, 8).unwrap();
        prop_assert_eq!(&r2.operator, &r.operator);
        // certificate moves by D(g)
        let dg = r.operator.apply(&g, |e| e.derive(T));
        prop_assert!((&(&r2.certificate - &r.certificate) - &dg).derive(X).is_zero());
    }
}
