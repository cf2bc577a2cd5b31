//! Projectable star products: construction, projectable equivalence and the
//! quantization/reduction diagram.

use std::collections::{BTreeMap, BTreeSet};

use crate::algebroid::{AForm, AlgebroidPresentation};
use crate::classes::{characteristic_class, relative_form, vertical_derivation, ClassReport};
use crate::cochain::{Cochain, Derivs};
use crate::error::{Error, Result};
use crate::linalg::solve_sparse;
use crate::poly::{Monomial, Poly};
use crate::scalar::Scalar;
use crate::star::{apply_equivalence, build_star, constrained_potential, EquivalenceSeries, StarSeries};

use super::{projectability_check, reduce_star, ConstraintPresentation};

/// Output of [`make_projectable`]: `apply_equivalence(witness, ⋆_(∇,B)) = star`, and
/// `reduced` is both `reduce_star(star)` and `⋆_(∇_red, B_red)`.
#[derive(Clone, Debug)]
pub struct MadeProjectable {
    pub star: StarSeries,
    pub witness: EquivalenceSeries,
    pub reduced: StarSeries,
    pub reduced_twist: AForm,
}

type Key = (Derivs, Monomial);

/// Entries of `c` on the keys that projectability or the prescribed reduction constrain.
fn constrained(cp: &ConstraintPresentation, c: &Cochain) -> BTreeMap<Key, Scalar> {
    c.entries().into_iter().filter(|((d, m), _)| is_constrained(cp, d, m)).collect()
}

fn is_constrained(cp: &ConstraintPresentation, d: &Derivs, m: &Monomial) -> bool {
    cp.violated_condition(d, m).is_some() || (cp.only_reduced(&d[0]) && cp.only_reduced(&d[1]) && cp.only_reduced(m))
}

/// `x^μ ∂_{ξ_i}` over all fibre directions and base monomials of degree at most `cap`.
fn vertical_fields(cp: &ConstraintPresentation, cap: u32) -> Vec<Cochain> {
    let spec = cp.total().spec();
    let mut out = Vec::new();
    for m in crate::algebroid::base_monomials(spec, cap) {
        for i in 0..spec.fibre {
            let mut c = Cochain::zero(spec, 1);
            c.add_term(vec![Monomial::unit(spec.nvars(), spec.xi(i))], &Poly::term(spec, m.clone(), Scalar::one()));
            out.push(c);
        }
    }
    out
}

/// `L_X C = X ∘ C − C(X·, ·) − C(·, X·)`.
fn lie_derivative(x: &Cochain, c: &Cochain) -> Result<Cochain> {
    c.postcompose(x)?.sub(&c.compose_at(0, x)?)?.sub(&c.compose_at(1, x)?)
}

/// Builds `⋆_(∇,B)` and repairs it order by order into a projectable star product whose
/// reduction is exactly `⋆_(∇_red, B_red)`.
///
/// At order `r` the repair is `id + ħ^r T` with `∂T` matching the constrained entries;
/// at order 2 a vertical shift `id + ħX` is allowed as well, which is what moves the
/// antisymmetric part.
pub fn make_projectable(cp: &ConstraintPresentation, b: Option<&AForm>, k: usize) -> Result<MadeProjectable> {
    let total = cp.total();
    let spec = total.spec();
    let b = b.cloned().unwrap_or_else(|| AForm::zero(spec, 2));
    let b_red = cp.reduce_form(&b)?;
    let start = build_star(total, Some(&b), k)?;
    let target = build_star(cp.a_red(), Some(&b_red), k)?;
    let mut current = start.clone();
    let mut witness = EquivalenceSeries::identity(spec, k);
    for r in 1..=k {
        let lifted = cp.lift_cochain(&target.c(r))?;
        let rhs = constrained(cp, &current.c(r).sub(&lifted)?);
        if rhs.is_empty() {
            continue;
        }
        let fields = if r == 2 {
            let cap = if spec.base == 0 { 0 } else { current.c(2).max_coeff_degree().max(1) };
            vertical_fields(cp, cap)
        } else {
            vec![]
        };
        let c1 = current.c(1);
        let mut effects = Vec::with_capacity(fields.len());
        for x in &fields {
            effects.push(constrained(cp, &lie_derivative(x, &c1)?.scale(&Scalar::from_int(-1))));
        }
        let mut blocks: BTreeSet<Key> = BTreeSet::new();
        let n = spec.nvars();
        let total_of = |d: &Derivs| d.iter().fold(Monomial::one(n), |acc, a| acc.add(a));
        for (d, m) in rhs.keys().chain(effects.iter().flat_map(|e| e.keys())) {
            blocks.insert((vec![total_of(d)], m.clone()));
        }
        let cands: Vec<Cochain> = blocks
            .iter()
            .map(|(g, m)| {
                let mut c = Cochain::zero(spec, 1);
                c.add_term(g.clone(), &Poly::term(spec, m.clone(), Scalar::one()));
                c
            })
            .collect();
        let mut cols: Vec<BTreeMap<Key, Scalar>> = cands.iter().map(|c| constrained(cp, &c.hochschild_d())).collect();
        cols.extend(effects);
        let x = solve_sparse(&cols, &rhs).map_err(|bad| Error::Infeasible {
            what: format!("projectable repair at order {r}"),
            residual: bad.iter().map(|(d, m)| format!("{d:?}·{m:?}")).collect::<Vec<_>>().join(", "),
        })?;
        let mut t = Cochain::zero(spec, 1);
        for (c, v) in cands.iter().zip(&x) {
            if !v.is_zero() {
                t.add_assign_scaled(c, v)?;
            }
        }
        let mut shift = Cochain::zero(spec, 1);
        for (f, v) in fields.iter().zip(&x[cands.len()..]) {
            if !v.is_zero() {
                shift.add_assign_scaled(f, v)?;
            }
        }
        if !shift.is_zero() {
            let s1 = EquivalenceSeries::single(spec, k, 1, shift.clone());
            current = apply_equivalence(&s1, &current)?;
            witness = s1.compose(&witness)?;
            t = t.add(&shift.compose_at(0, &shift)?.scale(&Scalar::ratio(1, 2)))?;
        }
        let s = EquivalenceSeries::single(spec, k, r, t);
        current = apply_equivalence(&s, &current)?;
        witness = s.compose(&witness)?;
        let left = constrained(cp, &current.c(r).sub(&lifted)?);
        if !left.is_empty() {
            return Err(Error::TheoremViolation(format!("order {r} still violates after repair")));
        }
    }
    if let Some(v) = projectability_check(&current, cp)? {
        return Err(Error::TheoremViolation(format!("repaired star fails {} at order {}", v.condition, v.order)));
    }
    let reduced = reduce_star(&current, cp)?;
    if reduced != target {
        return Err(Error::TheoremViolation("reduction differs from the prescribed reduced star".into()));
    }
    if apply_equivalence(&witness, &start)? != current {
        return Err(Error::TheoremViolation("projectable witness does not reproduce the star".into()));
    }
    Ok(MadeProjectable { star: current, witness, reduced, reduced_twist: b_red })
}

/// Outcome of [`decide_proj_equivalence`].
#[derive(Clone, Debug)]
pub enum ProjEquivalence {
    /// Every order of the witness preserves `𝒩` and `𝒥`.
    Equivalent(EquivalenceSeries),
    /// The projectable relative class is nonzero.
    Distinct(ClassReport),
}

fn effective_cap(a: &AlgebroidPresentation, forms: &[&AForm], cap: Option<u32>) -> Option<u32> {
    (a.base() > 0).then(|| forms.iter().map(|f| f.max_base_degree()).fold(cap.unwrap_or(0), u32::max))
}

fn require_projectable(star: &StarSeries, cp: &ConstraintPresentation) -> Result<()> {
    match projectability_check(star, cp)? {
        None => Ok(()),
        Some(v) => Err(Error::Precondition(format!(
            "star product is not projectable: {} fails at order {}",
            v.condition, v.order
        ))),
    }
}

/// Matches first orders through a projectable `id + ħT`.
fn align_first_order(
    star: &StarSeries,
    other: &StarSeries,
    cp: &ConstraintPresentation,
) -> Result<(StarSeries, EquivalenceSeries)> {
    let spec = star.spec();
    let k = star.order();
    let d = star.c(1).sub(&other.c(1))?;
    if d.is_zero() {
        return Ok((star.clone(), EquivalenceSeries::identity(spec, k)));
    }
    let t = constrained_potential(&d, &|g: &Derivs, m: &Monomial| cp.preserving_term(&g[0], m))?;
    let s = EquivalenceSeries::single(spec, k, 1, t);
    let out = apply_equivalence(&s, star)?;
    if out.c(1) != other.c(1) {
        return Err(Error::TheoremViolation("first orders still differ after alignment".into()));
    }
    Ok((out, s))
}

/// `Φ_proj(⋆, ⋆̃)` in `H²_proj`.
pub fn proj_relative_class(
    star: &StarSeries,
    other: &StarSeries,
    cp: &ConstraintPresentation,
    cap: Option<u32>,
) -> Result<ClassReport> {
    require_projectable(star, cp)?;
    require_projectable(other, cp)?;
    let (aligned, _) = align_first_order(star, other, cp)?;
    proj_class_of(cp, relative_form(&aligned, other)?, cap, star.order().min(other.order()))
}

fn proj_class_of(cp: &ConstraintPresentation, phi: AForm, cap: Option<u32>, order: usize) -> Result<ClassReport> {
    if !cp.is_projectable_form(&phi) {
        return Err(Error::TheoremViolation(format!("relative form {phi} is not projectable")));
    }
    let h = cp.projectable_cohomology(2, effective_cap(cp.total(), &[&phi], cap))?;
    let coordinates = h.coordinates(&phi)?;
    Ok(ClassReport { representative: phi, coordinates, basis: h.basis.clone(), cap: h.cap, order })
}

/// Projectable equivalence: a witness that preserves `𝒩` and `𝒥` at every order, or the
/// nonzero projectable relative class.
pub fn decide_proj_equivalence(
    star: &StarSeries,
    other: &StarSeries,
    cp: &ConstraintPresentation,
    cap: Option<u32>,
) -> Result<ProjEquivalence> {
    if star.order() != other.order() {
        return Err(Error::Invalid("star products have different truncation orders".into()));
    }
    require_projectable(star, cp)?;
    require_projectable(other, cp)?;
    let k = star.order();
    let spec = star.spec();
    let (mut current, mut witness) = align_first_order(star, other, cp)?;
    if k >= 2 {
        let phi = relative_form(&current, other)?;
        let report = proj_class_of(cp, phi.clone(), cap, k)?;
        if !report.is_zero() {
            return Ok(ProjEquivalence::Distinct(report));
        }
        if !phi.is_zero() {
            let alpha = cp.projectable_primitive(&phi, effective_cap(cp.total(), &[&phi], cap)).ok_or_else(|| {
                Error::TheoremViolation("exact projectable form without a projectable primitive".into())
            })?;
            let x = vertical_derivation(cp.total(), &alpha).scale(&Scalar::i());
            let s = EquivalenceSeries::single(spec, k, 1, x);
            current = apply_equivalence(&s, &current)?;
            witness = s.compose(&witness)?;
        }
    }
    for r in 2..=k {
        let diff = current.c(r).sub(&other.c(r))?;
        if diff.is_zero() {
            continue;
        }
        let t = constrained_potential(&diff, &|g: &Derivs, m: &Monomial| cp.preserving_term(&g[0], m))?;
        let s = EquivalenceSeries::single(spec, k, r, t);
        current = apply_equivalence(&s, &current)?;
        witness = s.compose(&witness)?;
    }
    if apply_equivalence(&witness, star)? != *other {
        return Err(Error::TheoremViolation("projectable witness does not map one star to the other".into()));
    }
    if let Some(op) = witness.ops().iter().find(|op| !cp.preserves(op)) {
        return Err(Error::TheoremViolation(format!("witness term does not preserve N and J: {op}")));
    }
    if let Some(r) = witness.first_inhomogeneous() {
        return Err(Error::TheoremViolation(format!("witness is inhomogeneous at order {r}")));
    }
    Ok(ProjEquivalence::Equivalent(witness))
}

/// Both routes around the quantization/reduction square, plus the two squares through
/// `H²_proj` with reference `⋆₀ = make_projectable(0)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QrReport {
    pub order: usize,
    /// `Φ(⋆_(∇_red, B_red))` in `H²(A_red)`.
    pub direct: Vec<Scalar>,
    /// `Φ(reduce(make_projectable(B)))` in `H²(A_red)`.
    pub via_projectable: Vec<Scalar>,
    /// `Φ_proj^{⋆₀}(⋆)` in `H²_proj`.
    pub projectable: Vec<Scalar>,
    /// Image of the projectable class in `H²(A_T)` and `Φ(⋆) − Φ(⋆₀)`.
    pub upper: (Vec<Scalar>, Vec<Scalar>),
    /// `red` of the projectable class and `Φ(⋆_red) − Φ(⋆₀,red)` in `H²(A_red)`.
    pub lower: (Vec<Scalar>, Vec<Scalar>),
}

impl QrReport {
    pub fn commutes(&self) -> bool {
        self.direct == self.via_projectable && self.upper.0 == self.upper.1 && self.lower.0 == self.lower.1
    }
}

fn diff(a: &[Scalar], b: &[Scalar]) -> Vec<Scalar> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn qr_diagram_check(cp: &ConstraintPresentation, b: &AForm, k: usize, cap: Option<u32>) -> Result<QrReport> {
    let total = cp.total();
    let red = cp.a_red();
    let b_red = cp.reduce_form(b)?;
    let direct_star = build_star(red, Some(&b_red), k)?;
    let made = make_projectable(cp, Some(b), k)?;
    let zero = make_projectable(cp, None, k)?;
    let reduced = reduce_star(&made.star, cp)?;
    let reduced0 = reduce_star(&zero.star, cp)?;
    let proj = proj_relative_class(&made.star, &zero.star, cp, cap)?;

    let phi_t = characteristic_class(&made.star, cap)?.representative;
    let phi_t0 = characteristic_class(&zero.star, cap)?.representative;
    let phi_r = characteristic_class(&reduced, cap)?.representative;
    let phi_r0 = characteristic_class(&reduced0, cap)?.representative;
    let phi_d = characteristic_class(&direct_star, cap)?.representative;
    let proj_red = cp.reduce_form(&proj.representative)?;

    let cap_t = effective_cap(total, &[&phi_t, &phi_t0, &proj.representative], cap);
    let ht = total.cohomology(2, cap_t)?;
    let cap_r = effective_cap(red, &[&phi_r, &phi_r0, &phi_d, &proj_red], cap);
    let hr = red.cohomology(2, cap_r)?;

    Ok(QrReport {
        order: k,
        direct: hr.coordinates(&phi_d)?,
        via_projectable: hr.coordinates(&phi_r)?,
        projectable: proj.coordinates.clone(),
        upper: (ht.coordinates(&proj.representative)?, diff(&ht.coordinates(&phi_t)?, &ht.coordinates(&phi_t0)?)),
        lower: (hr.coordinates(&proj_red)?, diff(&hr.coordinates(&phi_r)?, &hr.coordinates(&phi_r0)?)),
    })
}
