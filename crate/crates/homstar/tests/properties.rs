//! Property tests for the cochain calculus, the retraction, the star product and the
//! file formats.

use homstar::algebroid::{AForm, AlgebroidPresentation};
use homstar::cochain::Cochain;
use homstar::formats::{parse_form, parse_star, render_form, render_star};
use homstar::hkr::{hkr_inv_closed, solve_potential, Multivector};
use homstar::star::{apply_equivalence, build_star, EquivalenceSeries};
use homstar::text::parse_poly;
use homstar::{EulerDegree, Monomial, Poly, Scalar, VarSpec};
use proptest::prelude::*;

const SPEC: VarSpec = VarSpec { base: 1, fibre: 2 };

fn scalar() -> impl Strategy<Value = Scalar> {
    (-3i64..=3, -3i64..=3, 1i64..=3).prop_map(|(a, b, d)| &Scalar::ratio(a, d) + &(&Scalar::i() * &Scalar::from_int(b)))
}

fn exps(max: u32) -> impl Strategy<Value = Vec<u32>> {
    proptest::collection::vec(0..=max, SPEC.nvars())
}

fn poly() -> impl Strategy<Value = Poly> {
    poly_of(2, 4)
}

fn poly_of(max: u32, terms: usize) -> impl Strategy<Value = Poly> {
    proptest::collection::vec((exps(max), scalar()), 0..terms).prop_map(|ts| {
        let mut p = Poly::zero(SPEC);
        for (e, c) in ts {
            p.add_term(Monomial::from_exps(e), &c);
        }
        p
    })
}

/// Cochain of the given arity, vanishing on constants, derivative order ≤ 2 per slot.
fn cochain(arity: usize) -> impl Strategy<Value = Cochain> {
    cochain_of(arity, 2, 4)
}

/// Smaller operands for the nested brackets.
fn small_cochain(arity: usize) -> impl Strategy<Value = Cochain> {
    cochain_of(arity, 1, 3)
}

fn cochain_of(arity: usize, max: u32, terms: usize) -> impl Strategy<Value = Cochain> {
    let derivs = proptest::collection::vec(exps(max).prop_filter("nonconstant", |e| e.iter().any(|&x| x > 0)), arity);
    proptest::collection::vec((derivs, poly_of(max, terms)), 1..terms).prop_map(move |ts| {
        let mut c = Cochain::zero(SPEC, arity);
        for (d, p) in ts {
            c.add_term(d.into_iter().map(Monomial::from_exps).collect(), &p);
        }
        c
    })
}

fn bracket(d: &Cochain, e: &Cochain) -> Cochain {
    let odd = (d.degree() * e.degree()).rem_euclid(2) == 1;
    d.gerstenhaber(e).unwrap().scale(&Scalar::from_int(if odd { -1 } else { 1 }))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn differential_squares_to_zero(c in (1usize..=3).prop_flat_map(cochain)) {
        let d = c.hochschild_d();
        prop_assert!(d.hochschild_d().is_zero());
        prop_assert!(d.alt().is_zero());
        prop_assert_eq!(Cochain::mu0(SPEC).gerstenhaber(&c).unwrap(), d);
    }

    #[test]
    fn bracket_is_graded_antisymmetric(x in cochain(2), y in (1usize..=2).prop_flat_map(cochain)) {
        let odd = (x.degree() * y.degree()).rem_euclid(2) == 1;
        let swapped = bracket(&y, &x).scale(&Scalar::from_int(if odd { 1 } else { -1 }));
        prop_assert_eq!(bracket(&x, &y), swapped);
    }

    #[test]
    fn graded_jacobi(x in small_cochain(2), y in (1usize..=2).prop_flat_map(small_cochain), z in small_cochain(1)) {
        let lhs = bracket(&x, &bracket(&y, &z));
        let odd = (x.degree() * y.degree()).rem_euclid(2) == 1;
        let rhs = bracket(&bracket(&x, &y), &z)
            .add(&bracket(&y, &bracket(&x, &z)).scale(&Scalar::from_int(if odd { -1 } else { 1 })))
            .unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn hkr_inverse_on_multivectors(
        comps in proptest::collection::vec((proptest::sample::subsequence(vec![0usize, 1, 2], 2), poly()), 1..4)
    ) {
        let mut x = Multivector::zero(SPEC, 2);
        for (idx, p) in comps {
            x.add_component(&idx, &p);
        }
        prop_assert_eq!(hkr_inv_closed(&x.hkr()).unwrap(), x);
    }

    #[test]
    fn potentials_invert_the_differential(t in cochain(1)) {
        // Keep only the weight −1 part so the potential problem is homogeneous.
        let t = t.filter_coeffs(|d, m| m.fibre_degree(SPEC) as i64 - d[0].fibre_degree(SPEC) as i64 == -1);
        let r = t.hochschild_d();
        prop_assume!(!r.is_zero());
        let c = solve_potential(&r, None).unwrap();
        prop_assert_eq!(c.hochschild_d(), r.clone());
        prop_assert_eq!(c.homogeneity_degree().unwrap(), EulerDegree::Homogeneous(-1));
    }

    #[test]
    fn polynomials_print_and_parse(p in poly()) {
        prop_assert_eq!(parse_poly(SPEC, &p.to_string()).unwrap(), p);
    }

    #[test]
    fn forms_round_trip(c in scalar(), d in scalar()) {
        let a = AlgebroidPresentation::heisenberg();
        let f = AForm::basis(a.spec(), &[0, 2], c).add(&AForm::basis(a.spec(), &[1, 2], d)).unwrap();
        prop_assert_eq!(parse_form(a.spec(), &render_form(&f)).unwrap(), f);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    /// Equivalences applied to a star product give star products again, and stars
    /// round-trip through their file format.
    #[test]
    fn equivalences_preserve_associativity(coeffs in proptest::collection::vec(scalar(), 4)) {
        let a = AlgebroidPresentation::aff1();
        let spec = a.spec();
        let star = build_star(&a, None, 3).unwrap();
        // A homogeneous order-2 correction: constant-coefficient second-order operators
        // on ξ have weight −2.
        let mut t = Cochain::zero(spec, 1);
        let d = |i: usize, j: usize| Monomial::unit(spec.nvars(), i).add(&Monomial::unit(spec.nvars(), j));
        let pairs = [(0, 0), (0, 1), (1, 1)];
        for (k, (i, j)) in pairs.iter().enumerate() {
            t.add_term(vec![d(*i, *j)], &Poly::constant(spec, coeffs[k].clone()));
        }
        let mut v = Cochain::zero(spec, 1);
        v.add_term(vec![Monomial::unit(spec.nvars(), 0)], &Poly::constant(spec, coeffs[3].clone()));
        let s = EquivalenceSeries::single(spec, 3, 2, t);
        let moved = apply_equivalence(&s, &star).unwrap();
        prop_assert!(moved.first_defect().unwrap().is_none());
        prop_assert!(moved.first_inhomogeneous().is_none());
        prop_assert_eq!(parse_star(&render_star(&moved)).unwrap(), moved);
        // Order-1 shifts preserve associativity too.
        let shifted = apply_equivalence(&EquivalenceSeries::single(spec, 3, 1, v), &star).unwrap();
        prop_assert!(shifted.first_defect().unwrap().is_none());
    }
}
