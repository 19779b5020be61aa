mod common;

use common::{pole_sum, rf, Rf};
use isomon_core::exactalg::{linear_solve, partial_fractions, Matrix, SolutionSet, Var};
use proptest::prelude::*;

const X: Var = Var(0);
const S: Var = Var(1);
const T: Var = Var(2);

fn vars() -> Vec<Var> {
    vec![X, S, T]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn field_axioms(a in rf(vars(), 2), b in rf(vars(), 2), c in rf(vars(), 2)) {
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a - &a, Rf::zero());
        if !a.is_zero() {
            prop_assert_eq!(&a / &a, Rf::one());
        }
    }

    #[test]
    fn canonical_form_is_unique(a in rf(vars(), 2), b in rf(vars(), 2)) {
        // (a·b)/b built two ways has one representation
        if !b.is_zero() {
            let lhs = &(&a * &b) / &b;
            prop_assert_eq!(lhs.num(), a.num());
            prop_assert_eq!(lhs.den(), a.den());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn leibniz_and_mixed_partials(a in rf(vars(), 2), b in rf(vars(), 2)) {
        for v in vars() {
            prop_assert_eq!((&a * &b).derive(v), &(&a.derive(v) * &b) + &(&a * &b.derive(v)));
        }
        prop_assert_eq!(a.derive(X).derive(T), a.derive(T).derive(X));
        prop_assert_eq!(a.derive(S).derive(T), a.derive(T).derive(S));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn partial_fractions_recombine(f in pole_sum(X, vec![T]), p in rf(vec![T], 2)) {
        let g = &f + &(&p * &Rf::var(X));
        let pf = partial_fractions(&g, X).unwrap();
        prop_assert_eq!(pf.recombine(), g);
        for term in &pf.terms {
            prop_assert!(!term.pole.contains_var(X));
        }
    }

    #[test]
    fn linear_solve_certifies(entries in prop::collection::vec(rf(vec![T], 2), 12), rhs in prop::collection::vec(rf(vec![T], 1), 3)) {
        let m = Matrix::from_fn(3, 4, |i, j| entries[i * 4 + j].clone());
        match linear_solve(&m, &rhs) {
            SolutionSet::Solutions { particular, nullspace } => {
                prop_assert_eq!(m.mul_vec(&particular), rhs.clone());
                for n in &nullspace {
                    prop_assert!(m.mul_vec(n).iter().all(|e| e.is_zero()));
                }
            }
            SolutionSet::Inconsistent => {
                // rank deficient: some combination of rows vanishes but not on rhs
                let mt = m.transpose();
                let aug = Matrix::from_fn(5, 3, |i, j| if i < 4 { mt.get(i, j).clone() } else { rhs[j].clone() });
                let left = isomon_core::exactalg::nullspace(&mt);
                prop_assert!(!left.is_empty());
                prop_assert!(left.iter().any(|y| !aug.mul_vec(y)[4].is_zero()));
            }
        }
    }
}
