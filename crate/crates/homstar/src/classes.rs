//! Relative and characteristic classes of homogeneous star products and the
//! classification decision procedure.

use crate::algebroid::{AForm, AlgebroidPresentation};
use crate::error::{Error, Result};
use crate::hkr::solve_potential;
use crate::poly::Poly;
use crate::scalar::Scalar;
use crate::star::{
    apply_equivalence, j_map, normalize_first_order, normalize_perturbed, EquivalenceSeries, StarSeries,
};

/// A cohomology class in `H²(A)` together with the data that fixes its coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassReport {
    pub representative: AForm,
    pub coordinates: Vec<Scalar>,
    pub basis: Vec<AForm>,
    /// x-degree cap used for positive base dimension.
    pub cap: Option<u32>,
    /// Truncation order of the star products involved.
    pub order: usize,
}

impl ClassReport {
    pub fn is_zero(&self) -> bool {
        self.coordinates.iter().all(Scalar::is_zero)
    }
}

/// Outcome of [`decide_equivalence`].
#[derive(Clone, Debug)]
pub enum Equivalence {
    /// `apply_equivalence(witness, first) == second` up to the common order.
    Equivalent(EquivalenceSeries),
    /// The relative class `Φ(first, second)` is nonzero.
    Distinct(ClassReport),
}

/// `ι*` of `D(J(e_i), J(e_j))`, one component per pair `i < j`.
fn read_two_form(a: &AlgebroidPresentation, d: &crate::cochain::Cochain) -> Result<AForm> {
    let spec = a.spec();
    let mut out = AForm::zero(spec, 2);
    for i in 0..a.rank() {
        for j in i + 1..a.rank() {
            let ji = j_map(spec, &a.basis_section(i));
            let jj = j_map(spec, &a.basis_section(j));
            let v = d.apply(&[ji, jj])?;
            out.add_component(&[i, j], &zero_section(&v)?);
        }
    }
    Ok(out)
}

/// `ι*`: asserts fibre degree zero, which homogeneity guarantees here.
fn zero_section(p: &Poly) -> Result<Poly> {
    if p.max_fibre_degree() > 0 {
        return Err(Error::TheoremViolation(format!("expected a base function on linear pairs, got {p}")));
    }
    Ok(p.clone())
}

/// `Φ̃(⋆, ⋆′)(s, t) = ι*(C₂ − C₂′)⁻(J(s), J(t))`; asserted closed.
pub fn relative_form(star: &StarSeries, other: &StarSeries) -> Result<AForm> {
    if star.presentation() != other.presentation() {
        return Err(Error::Structure("star products live on different presentations".into()));
    }
    if star.order() < 2 || other.order() < 2 {
        return Err(Error::Truncation { order: 2, k: star.order().min(other.order()) });
    }
    if star.c(1) != other.c(1) {
        return Err(Error::Precondition("first orders differ".into()));
    }
    let a = star.presentation();
    let (_, minus) = star.c(2).sub(&other.c(2))?.sym_parts()?;
    let phi = read_two_form(a, &minus)?;
    let d = a.d_a(&phi);
    if !d.is_zero() {
        return Err(Error::TheoremViolation(format!("relative form is not closed: {d}")));
    }
    Ok(phi)
}

fn class_of(a: &AlgebroidPresentation, phi: AForm, cap: Option<u32>, order: usize) -> Result<ClassReport> {
    let cap = effective_cap(a, &phi, cap);
    let h = a.cohomology(2, cap)?;
    let coordinates = h.coordinates(&phi)?;
    Ok(ClassReport { representative: phi, coordinates, basis: h.basis.clone(), cap: h.cap, order })
}

/// The cap actually used: the requested one, raised to cover the representative.
fn effective_cap(a: &AlgebroidPresentation, phi: &AForm, cap: Option<u32>) -> Option<u32> {
    if a.base() == 0 {
        return None;
    }
    Some(cap.unwrap_or(0).max(phi.max_base_degree()))
}

/// `Φ(⋆)`: the class of `ι*C₂⁻(J(s), J(t))` after first-order normalization.
///
/// The readout is repeated through a second, perturbed normalization and both coordinate
/// vectors must agree.
pub fn characteristic_class(star: &StarSeries, cap: Option<u32>) -> Result<ClassReport> {
    if star.order() < 2 {
        return Err(Error::Truncation { order: 2, k: star.order() });
    }
    let a = star.presentation();
    let n = normalize_first_order(star)?;
    let (_, minus) = n.star.c(2).sym_parts()?;
    let phi = read_two_form(a, &minus)?;
    if !a.d_a(&phi).is_zero() {
        return Err(Error::TheoremViolation("characteristic form is not closed".into()));
    }
    let report = class_of(a, phi, cap, star.order())?;

    let p = normalize_perturbed(star)?;
    let (_, minus2) = p.star.c(2).sym_parts()?;
    let phi2 = read_two_form(a, &minus2)?;
    let check = class_of(a, phi2, report.cap, star.order())?;
    if check.coordinates != report.coordinates {
        return Err(Error::TheoremViolation("characteristic class depends on the normalization".into()));
    }
    Ok(report)
}

/// Relative class of two stars after normalizing both.
pub fn relative_class(star: &StarSeries, other: &StarSeries, cap: Option<u32>) -> Result<ClassReport> {
    let na = normalize_first_order(star)?;
    let nb = normalize_first_order(other)?;
    let phi = relative_form(&na.star, &nb.star)?;
    class_of(star.presentation(), phi, cap, star.order().min(other.order()))
}

/// `L_{α^ver}` for a 1-form `α`.
pub fn vertical_derivation(a: &AlgebroidPresentation, alpha: &AForm) -> crate::cochain::Cochain {
    let comps: Vec<Poly> = (0..a.rank()).map(|i| alpha.component(&[i])).collect();
    a.vertical(&comps).hkr()
}

/// Decides homogeneous equivalence, returning a verified witness or a nonzero class.
///
/// Steps: normalize both sides, kill the relative form with `id + iħ L_{α^ver}` where
/// `d_A α = Φ̃`, then match orders `k ≥ 2` one at a time with `id + ħ^k T`, `∂T = C_k − C̃_k`.
pub fn decide_equivalence(star: &StarSeries, other: &StarSeries, cap: Option<u32>) -> Result<Equivalence> {
    if star.presentation() != other.presentation() {
        return Err(Error::Structure("star products live on different presentations".into()));
    }
    if star.order() != other.order() {
        return Err(Error::Invalid("star products have different truncation orders".into()));
    }
    let k = star.order();
    let a = star.presentation();
    let spec = a.spec();
    let na = normalize_first_order(star)?;
    let nb = normalize_first_order(other)?;
    let mut witness = na.witness.clone();
    let mut current = na.star.clone();

    if k >= 2 {
        let phi = relative_form(&current, &nb.star)?;
        let report = class_of(a, phi.clone(), cap, k)?;
        if !report.is_zero() {
            return Ok(Equivalence::Distinct(report));
        }
        if !phi.is_zero() {
            let prim_cap = effective_cap(a, &phi, cap);
            let alpha = a
                .primitive(&phi, prim_cap)
                .ok_or_else(|| Error::TheoremViolation("exact relative form without a primitive".into()))?;
            let x = vertical_derivation(a, &alpha).scale(&Scalar::i());
            let s = EquivalenceSeries::single(spec, k, 1, x);
            current = apply_equivalence(&s, &current)?;
            witness = s.compose(&witness)?;
        }
    }
    for r in 2..=k {
        let diff = current.c(r).sub(&nb.star.c(r))?;
        if diff.is_zero() {
            continue;
        }
        let t = solve_potential(&diff, None).map_err(|e| match e {
            Error::Precondition(m) => Error::TheoremViolation(m),
            other => other,
        })?;
        let s = EquivalenceSeries::single(spec, k, r, t);
        current = apply_equivalence(&s, &current)?;
        witness = s.compose(&witness)?;
        if current.c(r) != nb.star.c(r) {
            return Err(Error::TheoremViolation(format!("order {r} did not match after correction")));
        }
    }
    let witness = nb.witness.inverse()?.compose(&witness)?;
    if apply_equivalence(&witness, star)? != *other {
        return Err(Error::TheoremViolation("composed witness does not map one star to the other".into()));
    }
    if let Some(r) = witness.first_inhomogeneous() {
        return Err(Error::TheoremViolation(format!("witness is inhomogeneous at order {r}")));
    }
    Ok(Equivalence::Equivalent(witness))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::star::{build_star, verify_equivalence};

    #[test]
    fn class_of_constructed_star_is_the_twist() {
        let a = AlgebroidPresentation::abelian(2);
        let s = a.spec();
        let b = AForm::basis(s, &[0, 1], Scalar::from_int(3));
        let star = build_star(&a, Some(&b), 3).unwrap();
        let c = characteristic_class(&star, None).unwrap();
        assert_eq!(c.representative, b);
        assert_eq!(c.coordinates, vec![Scalar::from_int(3)]);
    }

    #[test]
    fn exact_shift_gives_a_witness() {
        let h = AlgebroidPresentation::heisenberg();
        let s = h.spec();
        let b = AForm::basis(s, &[0, 1], Scalar::one());
        let star = build_star(&h, None, 3).unwrap();
        let shifted = build_star(&h, Some(&b), 3).unwrap();
        // e¹∧e² = −d_A e³ on h₃, so both classes vanish.
        match decide_equivalence(&star, &shifted, None).unwrap() {
            Equivalence::Equivalent(w) => verify_equivalence(&w, &star, &shifted, 2).unwrap(),
            Equivalence::Distinct(c) => panic!("unexpected class {:?}", c.coordinates),
        }
    }

    #[test]
    fn distinct_twists_are_distinguished() {
        let a = AlgebroidPresentation::abelian(2);
        let s = a.spec();
        let b = AForm::basis(s, &[0, 1], Scalar::one());
        let plain = build_star(&a, None, 3).unwrap();
        let twisted = build_star(&a, Some(&b), 3).unwrap();
        match decide_equivalence(&twisted, &plain, None).unwrap() {
            Equivalence::Distinct(c) => assert_eq!(c.coordinates, vec![Scalar::one()]),
            Equivalence::Equivalent(_) => panic!("expected distinct classes"),
        }
    }

    #[test]
    fn vertical_shift_moves_the_relative_form_by_i_d_alpha() {
        let h = AlgebroidPresentation::heisenberg();
        let s = h.spec();
        let star = build_star(&h, None, 3).unwrap();
        let alpha = AForm::basis(s, &[2], Scalar::one());
        let sh = EquivalenceSeries::single(s, 3, 1, vertical_derivation(&h, &alpha));
        let moved = apply_equivalence(&sh, &star).unwrap();
        let phi = relative_form(&moved, &star).unwrap();
        assert_eq!(phi, h.d_a(&alpha).scale(&Scalar::i()));
    }
}
