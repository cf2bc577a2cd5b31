//! Acceptance suite: one PASS/FAIL line per criterion, exact arithmetic throughout.
//!
//! Runs without the libtest harness so that every criterion reports even when an earlier
//! one fails; the process exits nonzero if any criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use homstar::algebroid::{AForm, AlgebroidPresentation};
use homstar::classes::{characteristic_class, decide_equivalence, Equivalence};
use homstar::gutt::{gutt_as_series, gutt_associativity_failure, gutt_product, TwistedUea};
use homstar::reduction::{
    coisotropic_check, decide_proj_equivalence, make_projectable, projectability_check, pullback_class,
    qr_diagram_check, reduce_star, solve_representation, verify_reduction, verify_representation, ConstraintData,
    ConstraintPresentation, ProjEquivalence, RepresentOutcome, Submanifold,
};
use homstar::star::{build_star, moyal_star, verify_equivalence, MoyalVariant, StarSeries};
use homstar::{HbarPoly, Poly, Scalar};
use homstar_cli::sample::Sampler;
use homstar_cli::selftest::{dgla_suite, retraction_suite};

type Outcome = Result<String, String>;
/// 1-based `(i, j, coeff)` terms of a 2-form.
type Twist = Vec<(usize, usize, i64)>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn preset(name: &str) -> AlgebroidPresentation {
    AlgebroidPresentation::preset(name).expect("preset")
}

/// `Σ coeff · e^i ∧ e^j` from 1-based `(i, j, coeff)` triples.
fn two_form(a: &AlgebroidPresentation, terms: &[(usize, usize, i64)]) -> AForm {
    let mut f = AForm::zero(a.spec(), 2);
    for &(i, j, c) in terms {
        f = f.add(&AForm::basis(a.spec(), &[i - 1, j - 1], Scalar::from_int(c))).unwrap();
    }
    f
}

fn constraint(x_out: &[usize], x_quot: &[usize], k: &[usize], n: &[usize], c: &[usize]) -> ConstraintData {
    let z = |v: &[usize]| v.iter().map(|i| i - 1).collect();
    ConstraintData { x_out: z(x_out), x_quot: z(x_quot), fibre_k: z(k), fibre_n: z(n), fibre_c: z(c) }
}

/// Coordinates of `[f]` in `H²(a)`, with the cap raised to cover `f`.
fn coords(a: &AlgebroidPresentation, f: &AForm) -> Vec<Scalar> {
    let cap = (a.base() > 0).then(|| f.max_base_degree());
    a.cohomology(2, cap).unwrap().coordinates(f).unwrap()
}

fn dgla() -> Outcome {
    let checks = dgla_suite(1, 100).map_err(|e| e.to_string())?;
    for c in &checks {
        ensure(c.passed() && c.cases >= 100, || format!("{} failed: {:?}", c.name, c.failures))?;
    }
    Ok(format!("{} identities × 100 random cochains", checks.len()))
}

fn retraction() -> Outcome {
    let checks = retraction_suite(2, 50).map_err(|e| e.to_string())?;
    for c in &checks {
        ensure(c.passed() && c.cases >= 50, || format!("{} failed: {:?}", c.name, c.failures))?;
    }
    Ok("hkr inverse, potential round trip and homogeneity × 50".into())
}

fn existence() -> Outcome {
    let names = ["h3", "so3", "aff1", "abelian2", "tangent1", "action-line"];
    for name in names {
        let a = preset(name);
        let star = build_star(&a, None, 4).map_err(|e| format!("{name}: {e}"))?;
        for r in 1..=4 {
            ensure(star.mc_defect(r).unwrap().is_zero(), || format!("{name}: defect at order {r}"))?;
            let c = star.c(r);
            ensure(c.euler_bracket() == c.scale(&Scalar::from_int(-(r as i64))), || {
                format!("{name}: [L_E, C_{r}] ≠ −{r} C_{r}")
            })?;
        }
    }
    Ok(format!("{} presentations to K = 4", names.len()))
}

fn classification() -> Outcome {
    let cases: Vec<(&str, Twist)> = vec![
        ("abelian2", vec![]),
        ("abelian2", vec![(1, 2, 1)]),
        ("abelian2", vec![(1, 2, -3)]),
        ("abelian3", vec![(1, 2, 1), (1, 3, 2)]),
        ("abelian3", vec![(2, 3, 5)]),
        ("h3", vec![]),
        ("h3", vec![(1, 3, 1)]),
        ("h3", vec![(1, 2, 1)]),
        ("h3", vec![(1, 3, 2), (2, 3, -1)]),
        ("so3", vec![]),
        ("aff1", vec![(1, 2, 1)]),
    ];
    for (name, terms) in &cases {
        let a = preset(name);
        let b = two_form(&a, terms);
        let star = build_star(&a, Some(&b), 3).unwrap();
        let c = characteristic_class(&star, None).map_err(|e| format!("{name}: {e}"))?;
        ensure(c.coordinates == coords(&a, &b), || format!("{name} {terms:?}: Φ ≠ [B]"))?;
    }
    let matrix: Vec<(&str, Twist, Twist, bool)> = vec![
        ("abelian2", vec![], vec![], true),
        ("abelian2", vec![(1, 2, 2)], vec![(1, 2, 2)], true),
        ("abelian2", vec![], vec![(1, 2, 1)], false),
        ("h3", vec![], vec![(1, 2, 1)], true),
        ("h3", vec![(1, 3, 1)], vec![(1, 3, 1), (1, 2, -2)], true),
        ("h3", vec![], vec![(1, 3, 1)], false),
        ("h3", vec![(1, 3, 1)], vec![(2, 3, 1)], false),
    ];
    for (name, t1, t2, same) in &matrix {
        let a = preset(name);
        let (b1, b2) = (two_form(&a, t1), two_form(&a, t2));
        let s1 = build_star(&a, Some(&b1), 3).unwrap();
        let s2 = build_star(&a, Some(&b2), 3).unwrap();
        match decide_equivalence(&s1, &s2, None).map_err(|e| e.to_string())? {
            Equivalence::Equivalent(w) => {
                ensure(*same, || format!("{name} {t1:?}/{t2:?}: unexpected witness"))?;
                verify_equivalence(&w, &s1, &s2, 2).map_err(|e| e.to_string())?;
            }
            Equivalence::Distinct(c) => {
                ensure(!same, || format!("{name} {t1:?}/{t2:?}: unexpected class"))?;
                ensure(c.coordinates == coords(&a, &b1.sub(&b2).unwrap()), || {
                    format!("{name}: relative class {:?}", c.coordinates)
                })?;
            }
        }
    }
    Ok(format!("{} class readouts, {}-case equivalence matrix", cases.len(), matrix.len()))
}

fn gutt() -> Outcome {
    for name in ["abelian2", "aff1", "h3", "so3"] {
        let a = preset(name);
        let mut uea = TwistedUea::new(&a, None).unwrap();
        let bad = gutt_associativity_failure(&mut uea, a.spec(), 4).unwrap();
        ensure(bad.is_none(), || format!("{name}: associator nonzero on {bad:?}"))?;
    }
    // [ξ_i, ξ_j] = h Σ c_ij^k ξ_k + h² B_ij.
    for (name, terms) in [("abelian2", vec![(1, 2, 1)]), ("h3", vec![(1, 3, 1)])] {
        let a = preset(name);
        let spec = a.spec();
        let b = two_form(&a, &terms);
        let mut uea = TwistedUea::new(&a, Some(&b)).unwrap();
        for i in 0..a.rank() {
            for j in 0..a.rank() {
                let (xi, xj) = (Poly::xi(spec, i), Poly::xi(spec, j));
                let lhs = gutt_product(&mut uea, spec, &xi, &xj, 1)
                    .unwrap()
                    .sub(&gutt_product(&mut uea, spec, &xj, &xi, 1).unwrap())
                    .unwrap();
                let mut rhs = HbarPoly::zero(spec, 2);
                let mut lin = Poly::zero(spec);
                for k in 0..a.rank() {
                    lin.add_assign(&Poly::xi(spec, k).scale(&a.c(i, j, k).constant_term()));
                }
                rhs.add_at(1, &lin);
                rhs.add_at(2, &Poly::constant(spec, b.component(&[i, j]).constant_term()));
                ensure(lhs == rhs, || format!("{name}: [ξ{}, ξ{}] = {lhs}", i + 1, j + 1))?;
            }
        }
    }
    let ab = preset("abelian2");
    let b = two_form(&ab, &[(1, 2, 1)]);
    let g = gutt_as_series(&ab, Some(&b), 3, None).unwrap();
    let c = characteristic_class(&g, None).unwrap();
    ensure(c.coordinates == vec![Scalar::one()], || format!("abelian2 Gutt class {:?}", c.coordinates))?;
    let h = preset("h3");
    let gh = gutt_as_series(&h, None, 3, None).unwrap();
    let ch = characteristic_class(&gh, None).unwrap();
    ensure(ch.is_zero(), || format!("h3 Gutt class {:?}", ch.coordinates))?;
    for (gs, a, b) in [(&gh, &h, None), (&g, &ab, Some(&b))] {
        let built = build_star(a, b, 3).unwrap();
        match decide_equivalence(gs, &built, None).map_err(|e| e.to_string())? {
            Equivalence::Equivalent(w) => verify_equivalence(&w, gs, &built, 2).map_err(|e| e.to_string())?,
            Equivalence::Distinct(c) => return Err(format!("Gutt and built star differ: {:?}", c.coordinates)),
        }
    }
    Ok("associativity to cap 4 on 4 algebras, twisted brackets, classes, witnesses".into())
}

fn moyal() -> Outcome {
    let mut sampler = Sampler::new(6);
    for (variant, coeff) in [
        (MoyalVariant::HalfOrdered, Scalar::i() * Scalar::ratio(1, 2)),
        (MoyalVariant::Standard, Scalar::i()),
        (MoyalVariant::Weyl, Scalar::i()),
    ] {
        for d in 1..=2 {
            let star = moyal_star(d, variant, 4).unwrap();
            let spec = star.spec();
            ensure(star.first_defect().unwrap().is_none(), || format!("{} d={d}: not associative", variant.name()))?;
            ensure(star.first_inhomogeneous().is_none(), || format!("{} d={d}: inhomogeneous", variant.name()))?;
            for q in 0..d {
                for p in 0..d {
                    let c = star.commutator(&Poly::x(spec, q), &Poly::xi(spec, p)).unwrap();
                    let mut want = HbarPoly::zero(spec, 4);
                    if p == q {
                        want.add_at(1, &Poly::constant(spec, coeff.clone()));
                    }
                    ensure(c == want, || format!("{}: [q{}, p{}] = {c}", variant.name(), q + 1, p + 1))?;
                }
            }
            for _ in 0..10 {
                let base_only = |p: Poly| {
                    let mask: Vec<bool> = (0..spec.nvars()).map(|v| spec.is_fibre(v)).collect();
                    p.restrict_zero(&mask)
                };
                let f = base_only(sampler.poly(spec, 3, 3));
                let g = base_only(sampler.poly(spec, 3, 3));
                let prod = star.product(&f, &g).unwrap();
                ensure(prod == HbarPoly::from_poly(&f * &g, 4), || format!("pr*f ⋆ pr*g ≠ pr*(fg) for {f}, {g}"))?;
            }
        }
    }
    Ok("3 variants, d ≤ 2, K = 4".into())
}

struct RepCase {
    name: &'static str,
    twist: Twist,
    x_out: Vec<usize>,
    k: Vec<usize>,
}

fn representability() -> Outcome {
    let case = |name, twist: &[(usize, usize, i64)], x_out: &[usize], k: &[usize]| RepCase {
        name,
        twist: twist.to_vec(),
        x_out: x_out.to_vec(),
        k: k.to_vec(),
    };
    let cases = [
        case("h3", &[], &[], &[3]),
        case("h3", &[(1, 2, 1)], &[], &[3]),
        case("h3", &[], &[], &[1]),
        case("h3", &[], &[], &[1, 2]),
        case("so3", &[], &[], &[3]),
        case("so3", &[], &[], &[1, 2]),
        case("aff1", &[], &[], &[2]),
        case("abelian2", &[], &[], &[1, 2]),
        case("abelian2", &[(1, 2, 1)], &[], &[1, 2]),
        case("abelian3", &[(1, 2, 1), (2, 3, 1)], &[], &[1, 2]),
        case("abelian3", &[(1, 3, 1)], &[], &[1, 2]),
        case("tangent1", &[], &[1], &[]),
        case("tangent1", &[], &[1], &[1]),
    ];
    let mut tally = [0usize; 3];
    for c in &cases {
        let a = preset(c.name);
        let b = two_form(&a, &c.twist);
        let star = build_star(&a, Some(&b), 3).unwrap();
        let z = |v: &[usize]| v.iter().map(|i| i - 1).collect::<Vec<_>>();
        let sub = Submanifold::new(&a, &z(&c.x_out), &z(&c.k)).map_err(|e| e.to_string())?;
        let label = format!("{} k={:?} x_out={:?} B={:?}", c.name, c.k, c.x_out, c.twist);
        let coiso = coisotropic_check(&sub).is_coisotropic();
        let outcome = solve_representation(&star, &sub, None).map_err(|e| format!("{label}: {e}"))?;
        let first_order = !matches!(outcome, RepresentOutcome::NotCoisotropic { .. });
        ensure(first_order == coiso, || format!("{label}: order-1 solvability ≠ coisotropy"))?;
        if !coiso {
            tally[0] += 1;
            continue;
        }
        let pull = pullback_class(&star, &sub, None).map_err(|e| format!("{label}: {e}"))?;
        match outcome {
            RepresentOutcome::Represented(rep) => {
                ensure(pull.is_zero(), || format!("{label}: represented but I*Φ ≠ 0"))?;
                verify_representation(&star, &rep, 2).map_err(|e| format!("{label}: {e}"))?;
                tally[1] += 1;
            }
            RepresentOutcome::Obstructed { class, .. } => {
                ensure(!pull.is_zero(), || format!("{label}: obstructed but I*Φ = 0"))?;
                ensure(class.iter().any(|s| !s.is_zero()), || format!("{label}: zero obstruction class"))?;
                tally[2] += 1;
            }
            RepresentOutcome::NotCoisotropic { .. } => unreachable!(),
        }
    }
    Ok(format!(
        "{} cases: {} not coisotropic, {} represented, {} obstructed",
        cases.len(),
        tally[0],
        tally[1],
        tally[2]
    ))
}

/// Reduction instances shared by the soundness and diagram criteria.
fn qr_cases() -> Vec<(&'static str, ConstraintData, Twist)> {
    vec![
        ("abelian3", constraint(&[], &[], &[], &[1, 2], &[3]), vec![(1, 2, 1), (1, 3, 2)]),
        ("h3", constraint(&[], &[], &[3], &[1, 2], &[]), vec![(1, 2, 1)]),
        ("h3", constraint(&[], &[], &[3], &[1, 2], &[]), vec![(1, 2, -2)]),
        ("so3", constraint(&[], &[], &[3], &[], &[1, 2]), vec![]),
        ("abelian2", constraint(&[], &[], &[], &[1], &[2]), vec![(1, 2, 1)]),
        ("aff1", constraint(&[], &[], &[2], &[1], &[]), vec![]),
        ("tangent2", constraint(&[2], &[], &[], &[1], &[2]), vec![]),
    ]
}

fn reduction_soundness() -> Outcome {
    let mut count = 0;
    for (name, data, twist) in qr_cases() {
        let a = preset(name);
        let cp = ConstraintPresentation::new(&a, data).map_err(|e| format!("{name}: {e}"))?;
        let b = two_form(&a, &twist);
        for bb in [None, Some(&b)] {
            let made = make_projectable(&cp, bb, 3).map_err(|e| format!("{name}: {e}"))?;
            let star = &made.star;
            ensure(projectability_check(star, &cp).unwrap().is_none(), || format!("{name}: not projectable"))?;
            let red = reduce_star(star, &cp).unwrap();
            verify_reduction(star, &red, &cp, 2).map_err(|e| format!("{name}: {e}"))?;
            check_class_compatibility(&cp, star, &red).map_err(|e| format!("{name}: {e}"))?;
            count += 1;
        }
    }
    // The unrepaired h3 star is already projectable for the centre.
    let h = preset("h3");
    let cp = ConstraintPresentation::new(&h, constraint(&[], &[], &[3], &[1, 2], &[])).unwrap();
    let plain = build_star(&h, None, 3).unwrap();
    if projectability_check(&plain, &cp).unwrap().is_none() {
        let red = reduce_star(&plain, &cp).unwrap();
        verify_reduction(&plain, &red, &cp, 2).map_err(|e| e.to_string())?;
        check_class_compatibility(&cp, &plain, &red)?;
        count += 1;
    }
    Ok(format!("{count} projectable stars, identity on monomials of degree ≤ 2, K = 3"))
}

/// `I*Φ(⋆) = P*Φ(⋆_red)` in `H²(A_N)`.
fn check_class_compatibility(cp: &ConstraintPresentation, star: &StarSeries, red: &StarSeries) -> Result<(), String> {
    let e = |e: homstar::Error| e.to_string();
    let phi = characteristic_class(star, None).map_err(e)?.representative;
    let phi_red = characteristic_class(red, None).map_err(e)?.representative;
    let up = cp.pull_back_to_n(&phi).map_err(e)?;
    let down = cp.push_up_to_n(&phi_red).map_err(e)?;
    let diff = up.sub(&down).map_err(e)?;
    let c = coords(cp.a_n(), &diff);
    ensure(c.iter().all(Scalar::is_zero), || format!("I*Φ − P*Φ_red has class {c:?}"))
}

fn quantization_commutes() -> Outcome {
    let cases = qr_cases();
    for (name, data, twist) in &cases {
        let a = preset(name);
        let cp = ConstraintPresentation::new(&a, data.clone()).unwrap();
        let q = qr_diagram_check(&cp, &two_form(&a, twist), 3, None).map_err(|e| format!("{name}: {e}"))?;
        ensure(q.commutes(), || format!("{name} {twist:?}: {q:?}"))?;
    }
    Ok(format!("{} constraint cases, K = 3", cases.len()))
}

fn non_equivalent_reductions() -> Outcome {
    let h = preset("h3");
    let cp = ConstraintPresentation::new(&h, constraint(&[], &[], &[3], &[1, 2], &[])).unwrap();
    let b = two_form(&h, &[(1, 2, 1)]);
    let zero = make_projectable(&cp, None, 3).map_err(|e| e.to_string())?;
    let twisted = make_projectable(&cp, Some(&b), 3).map_err(|e| e.to_string())?;
    match decide_equivalence(&zero.star, &twisted.star, None).map_err(|e| e.to_string())? {
        Equivalence::Equivalent(w) => {
            verify_equivalence(&w, &zero.star, &twisted.star, 2).map_err(|e| e.to_string())?
        }
        Equivalence::Distinct(c) => return Err(format!("stars not equivalent: {:?}", c.coordinates)),
    }
    let class = match decide_proj_equivalence(&zero.star, &twisted.star, &cp, None).map_err(|e| e.to_string())? {
        ProjEquivalence::Distinct(c) => c,
        ProjEquivalence::Equivalent(_) => return Err("projectably equivalent".into()),
    };
    ensure(!class.is_zero(), || "zero projectable class".into())?;
    let r0 = characteristic_class(&reduce_star(&zero.star, &cp).unwrap(), None).unwrap();
    let r1 = characteristic_class(&reduce_star(&twisted.star, &cp).unwrap(), None).unwrap();
    ensure(r0.coordinates != r1.coordinates, || "reduced classes coincide".into())?;
    Ok(format!(
        "projectable class {:?}, reduced classes {:?} vs {:?}",
        class.coordinates.iter().map(ToString::to_string).collect::<Vec<_>>(),
        r0.coordinates.iter().map(ToString::to_string).collect::<Vec<_>>(),
        r1.coordinates.iter().map(ToString::to_string).collect::<Vec<_>>()
    ))
}

/// Runs a fixed CLI workload in `dir` and returns every produced file, sorted by name.
fn cli_workload(dir: &Path) -> Result<Vec<(String, Vec<u8>)>, String> {
    let bin = env!("CARGO_BIN_EXE_homstar");
    std::fs::write(dir.join("b.form"), "degree = 2\nform[1][2] = 1\n").unwrap();
    std::fs::write(dir.join("centre.txt"), "fibre_k = 3\nfibre_n = 1 2\n").unwrap();
    std::fs::write(dir.join("r3.txt"), "fibre_n = 1 2\nfibre_c = 3\n").unwrap();
    std::fs::write(dir.join("b3.form"), "degree = 2\nform[1][2] = 1\nform[1][3] = 2\n").unwrap();
    let runs: Vec<Vec<&str>> = vec![
        vec!["build-star", "preset:h3", "-K", "3", "-o", "a.star", "--report", "r1.json"],
        vec!["build-star", "preset:h3", "--B", "b.form", "-K", "3", "-o", "b.star", "--report", "r2.json"],
        vec!["equiv", "a.star", "b.star", "-o", "w.txt", "--report", "r3.json"],
        vec!["char-class", "b.star", "--report", "r4.json"],
        vec!["reduce", "b.star", "--constraint", "centre.txt", "-o", "red.star", "--report", "r5.json"],
        vec![
            "make-projectable",
            "preset:h3",
            "--constraint",
            "centre.txt",
            "--B",
            "b.form",
            "-K",
            "3",
            "-o",
            "p.star",
            "--witness",
            "pw.txt",
            "--report",
            "r6.json",
        ],
        vec![
            "qr-check",
            "preset:abelian3",
            "--constraint",
            "r3.txt",
            "--B",
            "b3.form",
            "-K",
            "3",
            "--report",
            "r7.json",
        ],
        vec!["represent", "b.star", "--submanifold", "centre.txt", "--report", "r8.json"],
        vec!["selftest", "--seed", "11", "--cases", "10", "--report", "r9.json"],
    ];
    for args in &runs {
        let out = Command::new(bin).args(args).current_dir(dir).env_remove("HOMSTAR_K").output().unwrap();
        ensure(out.status.code() == Some(0), || {
            format!("{args:?} exited {:?}: {}", out.status.code(), String::from_utf8_lossy(&out.stderr))
        })?;
    }
    let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap())
        .map(|e| (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap()))
        .collect();
    files.sort();
    Ok(files)
}

fn determinism() -> Outcome {
    let (d1, d2) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let first = cli_workload(d1.path())?;
    let second = cli_workload(d2.path())?;
    ensure(first.len() == second.len(), || "different file sets".into())?;
    for ((n1, b1), (n2, b2)) in first.iter().zip(&second) {
        ensure(n1 == n2 && b1 == b2, || format!("{n1} differs between runs"))?;
    }
    Ok(format!("{} files byte-identical across two runs", first.len()))
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("AC1  DGLA identities", dgla),
        ("AC2  HKR retraction and potentials", retraction),
        ("AC3  existence to K = 4", existence),
        ("AC4  classification", classification),
        ("AC5  PBW products", gutt),
        ("AC6  Moyal products", moyal),
        ("AC7  coisotropy and representability", representability),
        ("AC8  reduction soundness", reduction_soundness),
        ("AC9  quantization commutes with reduction", quantization_commutes),
        ("AC10 non-equivalent reductions", non_equivalent_reductions),
        ("AC11 determinism", determinism),
    ];
    let only: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (name, run) in criteria {
        if !only.is_empty() && !only.iter().any(|o| name.contains(o.as_str())) {
            continue;
        }
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into()))
        });
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("PASS {name} ({secs:.1}s): {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL {name} ({secs:.1}s): {why}");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
