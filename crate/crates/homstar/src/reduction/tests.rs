use super::*;
use crate::algebroid::AForm;
use crate::classes::{characteristic_class, decide_equivalence, Equivalence};
use crate::scalar::Scalar;
use crate::star::{build_star, monomials_up_to, StarSeries};

fn h3_centre() -> ConstraintPresentation {
    let h = AlgebroidPresentation::heisenberg();
    let data = ConstraintData { fibre_k: vec![2], fibre_n: vec![0, 1], ..Default::default() };
    ConstraintPresentation::new(&h, data).unwrap()
}

/// Brute force over monomial generators: returns the first pair breaking a condition.
fn brute_force_violation(star: &StarSeries, cp: &ConstraintPresentation, deg: u32) -> Option<(usize, Poly, Poly)> {
    let mons = monomials_up_to(star.spec(), deg);
    let sub = cp.submanifold();
    let ideal: Vec<&Poly> = mons.iter().filter(|p| !p.is_constant() && cp.in_ideal(p)).collect();
    let normal: Vec<&Poly> = mons.iter().filter(|p| cp.in_normalizer(p)).collect();
    for r in 1..=star.order() {
        let c = star.c(r);
        let ev = |f: &Poly, g: &Poly| sub.restrict(&c.apply(&[f.clone(), g.clone()]).unwrap());
        for f in &normal {
            for g in &normal {
                if !cp.in_normalizer(&ev(f, g)) {
                    return Some((r, (*f).clone(), (*g).clone()));
                }
            }
        }
        for f in &mons {
            for h in &ideal {
                if !ev(f, h).is_zero() {
                    return Some((r, f.clone(), (*h).clone()));
                }
            }
        }
        for h in &ideal {
            for g in &normal {
                if !ev(h, g).is_zero() {
                    return Some((r, (*h).clone(), (*g).clone()));
                }
            }
        }
    }
    None
}

#[test]
fn constraint_validation_examples() {
    let h = AlgebroidPresentation::heisenberg();
    let cp = h3_centre();
    assert_eq!(cp.a_red(), &AlgebroidPresentation::abelian(2));
    let sub = ConstraintData { fibre_k: vec![2], fibre_n: vec![0], fibre_c: vec![1], ..Default::default() };
    let cp2 = ConstraintPresentation::new(&h, sub).unwrap();
    assert_eq!(cp2.a_red().rank(), 1);
    let bad = ConstraintData { fibre_k: vec![0], fibre_n: vec![1, 2], ..Default::default() };
    let rep = validate_constraint(&h, &bad);
    assert!(!rep.is_valid());
    assert!(rep.failures[0].contains("ideal"), "{:?}", rep.failures);
}

#[test]
fn coisotropy_examples() {
    let h = AlgebroidPresentation::heisenberg();
    let s = h.spec();
    assert!(coisotropic_check(&Submanifold::new(&h, &[], &[2]).unwrap()).is_coisotropic());
    assert!(coisotropic_check(&Submanifold::new(&h, &[], &[0]).unwrap()).is_coisotropic());
    let w = coisotropic_check(&Submanifold::new(&h, &[], &[0, 1]).unwrap()).witness.unwrap();
    assert_eq!(w, (Poly::xi(s, 0), Poly::xi(s, 1), -&Poly::xi(s, 2)));
    let t = AlgebroidPresentation::tangent(1);
    assert!(coisotropic_check(&Submanifold::new(&t, &[0], &[]).unwrap()).is_coisotropic());
    assert!(!coisotropic_check(&Submanifold::new(&t, &[0], &[0]).unwrap()).is_coisotropic());
}

#[test]
fn operator_criteria_agree_with_brute_force() {
    let so3 = AlgebroidPresentation::so3();
    let cases = vec![
        (h3_centre(), build_star(&AlgebroidPresentation::heisenberg(), None, 2).unwrap()),
        (
            ConstraintPresentation::new(
                &so3,
                ConstraintData { fibre_k: vec![2], fibre_c: vec![0, 1], ..Default::default() },
            )
            .unwrap(),
            build_star(&so3, None, 2).unwrap(),
        ),
    ];
    for (cp, star) in cases {
        let fast = projectability_check(&star, &cp).unwrap();
        let slow = brute_force_violation(&star, &cp, 3);
        assert_eq!(fast.is_some(), slow.is_some(), "{fast:?} vs {slow:?}");
        if let (Some(v), Some((r, _, _))) = (fast, slow) {
            assert_eq!(v.order, r);
        }
    }
}

#[test]
fn made_projectable_is_sound() {
    let cp = h3_centre();
    let s = cp.total().spec();
    let b = AForm::basis(s, &[0, 1], Scalar::one());
    let made = make_projectable(&cp, Some(&b), 3).unwrap();
    assert!(projectability_check(&made.star, &cp).unwrap().is_none());
    assert!(brute_force_violation(&made.star, &cp, 3).is_none());
    verify_reduction(&made.star, &made.reduced, &cp, 2).unwrap();
    let phi = characteristic_class(&made.reduced, None).unwrap();
    assert_eq!(phi.coordinates, vec![Scalar::one()]);
}

#[test]
fn exact_twist_separates_reductions() {
    let cp = h3_centre();
    let s = cp.total().spec();
    let b = AForm::basis(s, &[0, 1], Scalar::one());
    let zero = make_projectable(&cp, None, 3).unwrap();
    let twisted = make_projectable(&cp, Some(&b), 3).unwrap();
    assert!(matches!(decide_equivalence(&zero.star, &twisted.star, None).unwrap(), Equivalence::Equivalent(_)));
    match decide_proj_equivalence(&twisted.star, &zero.star, &cp, None).unwrap() {
        ProjEquivalence::Distinct(c) => assert!(!c.is_zero()),
        ProjEquivalence::Equivalent(_) => panic!("expected distinct projectable classes"),
    }
    let qr = qr_diagram_check(&cp, &b, 3, None).unwrap();
    assert!(qr.commutes(), "{qr:?}");
}

#[test]
fn representation_on_the_centre() {
    let h = AlgebroidPresentation::heisenberg();
    let star = build_star(&h, None, 3).unwrap();
    let sub = Submanifold::new(&h, &[], &[2]).unwrap();
    match solve_representation(&star, &sub, None).unwrap() {
        RepresentOutcome::Represented(rep) => verify_representation(&star, &rep, 2).unwrap(),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn twisted_plane_is_obstructed() {
    let a = AlgebroidPresentation::abelian(2);
    let s = a.spec();
    let b = AForm::basis(s, &[0, 1], Scalar::one());
    let star = build_star(&a, Some(&b), 3).unwrap();
    let sub = Submanifold::new(&a, &[], &[0, 1]).unwrap();
    match solve_representation(&star, &sub, None).unwrap() {
        RepresentOutcome::Obstructed { order, class, .. } => {
            assert_eq!(order, 2);
            assert_eq!(class.len(), 1);
            assert!(!class[0].is_zero());
        }
        other => panic!("unexpected {other:?}"),
    }
    let pb = pullback_class(&star, &sub, None).unwrap();
    assert_eq!(pb.coordinates, vec![Scalar::one()]);
}

fn case(a: AlgebroidPresentation, x_out: &[usize], k: &[usize], n: &[usize], c: &[usize]) -> ConstraintPresentation {
    let data = ConstraintData {
        x_out: x_out.to_vec(),
        x_quot: vec![],
        fibre_k: k.to_vec(),
        fibre_n: n.to_vec(),
        fibre_c: c.to_vec(),
    };
    ConstraintPresentation::new(&a, data).unwrap()
}

#[test]
fn repairs_are_needed_and_work() {
    let so3 = AlgebroidPresentation::so3();
    let cp = case(so3.clone(), &[], &[2], &[], &[0, 1]);
    let star = build_star(&so3, None, 3).unwrap();
    let v = projectability_check(&star, &cp).unwrap().expect("so3 star is not projectable as built");
    assert_eq!(v.order, 1);
    let made = make_projectable(&cp, None, 3).unwrap();
    assert!(brute_force_violation(&made.star, &cp, 3).is_none());
    verify_reduction(&made.star, &made.reduced, &cp, 2).unwrap();

    let t2 = AlgebroidPresentation::tangent(2);
    let cp = case(t2.clone(), &[1], &[], &[0], &[1]);
    assert_eq!(cp.a_red(), &AlgebroidPresentation::tangent(1));
    let made = make_projectable(&cp, None, 3).unwrap();
    assert!(brute_force_violation(&made.star, &cp, 3).is_none());
    verify_reduction(&made.star, &made.reduced, &cp, 2).unwrap();

    let a3 = AlgebroidPresentation::abelian(3);
    let cp = case(a3.clone(), &[], &[], &[0, 1], &[2]);
    let s = a3.spec();
    let b = AForm::basis(s, &[0, 1], Scalar::one()).add(&AForm::basis(s, &[0, 2], Scalar::from_int(2))).unwrap();
    let made = make_projectable(&cp, Some(&b), 3).unwrap();
    verify_reduction(&made.star, &made.reduced, &cp, 2).unwrap();
    assert!(qr_diagram_check(&cp, &b, 3, None).unwrap().commutes());
}
