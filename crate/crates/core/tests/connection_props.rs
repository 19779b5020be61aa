mod common;

use common::poly_matrix;
use isomon_core::connection::{
    flatten, CheckMode, ConnectionSystem, EquivalenceMove, FlattenBounds, FlattenOutcome, Mat,
};
use isomon_core::difftower::{ConsistencyPolicy, DerivKind, GeneratorKind, Tower, TowerBuilder, TowerElement};
use isomon_core::exactalg::Var;
use proptest::prelude::*;

const NAMES: [&str; 3] = ["x", "t1", "t2"];

fn base(b: &mut TowerBuilder) {
    b.base("x", DerivKind::Principal).unwrap();
    b.base("t1", DerivKind::Parametric).unwrap();
    b.base("t2", DerivKind::Parametric).unwrap();
}

/// Three coefficient fields over the derivations x, t1, t2.
fn field(which: usize) -> Tower {
    let mut b = TowerBuilder::new();
    base(&mut b);
    match which {
        0 => {}
        1 => {
            b.generator("u", GeneratorKind::Free).unwrap();
            b.jet("u", &[("t1", 1)]).unwrap();
        }
        _ => {
            // e = exp(x + t1·t2)
            let e = b.generator("e", GeneratorKind::Defined).unwrap();
            let ee = TowerElement::var(e);
            let t1 = TowerElement::var(b.var("t1").unwrap());
            let t2 = TowerElement::var(b.var("t2").unwrap());
            b.rule(e, "x", ee.clone()).unwrap();
            b.rule(e, "t1", &t2 * &ee).unwrap();
            b.rule(e, "t2", &t1 * &ee).unwrap();
        }
    }
    b.build(ConsistencyPolicy::Refuse).unwrap()
}

fn field_vars(which: usize) -> Vec<Var> {
    let tw = field(which);
    let mut names: Vec<&str> = NAMES.to_vec();
    match which {
        0 => {}
        1 => names.extend(["u", "u_t1"]),
        _ => names.push("e"),
    }
    names.iter().map(|n| tw.var(n).unwrap()).collect()
}

fn t_field() -> Tower {
    Tower::rational(None, &["t1", "t2"]).unwrap()
}

fn tvars() -> Vec<Var> {
    let tw = t_field();
    vec![tw.var("t1").unwrap(), tw.var("t2").unwrap()]
}

fn system(tw: &Tower, ms: Vec<Mat>) -> ConnectionSystem {
    let n = ms[0].rows();
    ConnectionSystem::new(
        tw,
        n,
        Some("x"),
        NAMES.iter().map(|s| s.to_string()).zip(ms).collect(),
    )
    .unwrap()
}

fn three(vars: Vec<Var>, n: usize) -> impl Strategy<Value = Vec<Mat>> {
    prop::collection::vec(poly_matrix(vars, n, 2), 3)
}

fn case() -> impl Strategy<Value = (usize, Vec<Mat>)> {
    (0usize..3, 1usize..=3).prop_flat_map(|(f, n)| (Just(f), three(field_vars(f), n)))
}

fn gauge_case() -> impl Strategy<Value = (usize, Vec<Mat>, Mat, Mat)> {
    (0usize..3, 1usize..=2).prop_flat_map(|(f, n)| {
        (
            Just(f),
            three(field_vars(f), n),
            poly_matrix(field_vars(f), n, 1),
            poly_matrix(field_vars(f), n, 1),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn defect_is_antisymmetric((f, ms) in case()) {
        let s = system(&field(f), ms);
        for (u, v) in [("x", "t1"), ("t1", "t2"), ("x", "t2")] {
            let sum = s.defect(u, v).unwrap().add(&s.defect(v, u).unwrap());
            prop_assert!(sum.is_zero());
        }
    }

    #[test]
    fn bianchi_identity((f, ms) in case()) {
        let s = system(&field(f), ms);
        prop_assert!(s.bianchi_sum("x", "t1", "t2").unwrap().is_zero());
    }

    #[test]
    fn moved_defect_formula((f, ms) in case(), a in prop::collection::vec(poly_matrix(field_vars(0), 1, 2), 2)) {
        let s = system(&field(f), ms);
        let n = s.size();
        // scalar entries from a, spread on the diagonal so shapes match
        let lift = |m: &Mat| Mat::identity(n).scale(m.get(0, 0));
        let mv = EquivalenceMove::new().with("t1", lift(&a[0])).with("t2", lift(&a[1]).add(&Mat::unit(n, 0, n - 1)));
        let moved = s.equivalence_move(&mv).unwrap();
        for (u, v) in [("t2", "t1"), ("t1", "x"), ("t2", "x")] {
            prop_assert_eq!(moved.defect(u, v).unwrap(), s.moved_defect(&mv, u, v).unwrap());
        }
        prop_assert_eq!(s.equivalence_move(&EquivalenceMove::new()).unwrap(), s);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn gauge_covariance((f, ms, g, h) in gauge_case()) {
        prop_assume!(g.inverse().is_some());
        let s = system(&field(f), ms);
        let gi = g.inverse().unwrap();
        let sg = s.gauge(&g).unwrap();
        for (u, v) in [("t2", "t1"), ("t1", "x")] {
            let lhs = sg.defect(u, v).unwrap();
            let rhs = g.mul(&s.defect(u, v).unwrap()).mul(&gi);
            prop_assert_eq!(lhs, rhs);
        }
        let full = |x: &ConnectionSystem| -> Vec<bool> {
            x.check_integrability(CheckMode::Full).unwrap().pairs.iter().map(|p| p.flat).collect()
        };
        prop_assert_eq!(full(&s), full(&sg));
        if h.inverse().is_some() {
            prop_assert_eq!(sg.gauge(&h).unwrap(), s.gauge(&h.mul(&g)).unwrap());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(30))]

    #[test]
    fn flatten_output_is_flat(b1 in poly_matrix(tvars(), 1, 2), b2 in poly_matrix(tvars(), 1, 2)) {
        let tw = t_field();
        let s = ConnectionSystem::new(&tw, 1, None, vec![("t1".into(), b1), ("t2".into(), b2)]).unwrap();
        match flatten(&s, &["t1", "t2"], None, FlattenBounds::default()).unwrap() {
            FlattenOutcome::Found { moves, system } => {
                prop_assert!(system.check_integrability(CheckMode::Full).unwrap().holds());
                prop_assert_eq!(s.equivalence_move(&moves).unwrap(), system);
                prop_assert!(moves.get("t1").is_none_or(|m| m.is_zero()));
            }
            other => prop_assert!(false, "unexpected {:?}", other),
        }
    }
}

#[test]
fn zero_system_is_flat() {
    let tw = field(0);
    let s = ConnectionSystem::zero(&tw, 3, Some("x"), &NAMES).unwrap();
    assert!(s.check_integrability(CheckMode::Full).unwrap().holds());
    assert!(s.bianchi_sum("x", "t1", "t2").unwrap().is_zero());
    assert!(s.defect("t1", "x").unwrap().is_zero());
    let id = Mat::identity(3);
    assert_eq!(s.gauge(&id).unwrap(), s);
}

#[test]
fn singular_gauge_rejected() {
    let tw = field(0);
    let s = ConnectionSystem::zero(&tw, 2, Some("x"), &NAMES).unwrap();
    let g = Mat::unit(2, 0, 0);
    assert!(s.gauge(&g).is_err());
}
