//! Coisotropic submanifolds of `A*`, representations on them, and reduction of
//! projectable star products.
//!
//! Everything works in split coordinates. A submanifold is `E_N = {x_a = 0 (a ∈ x_out),
//! ξ_k = 0 (k ∈ fibre_k)}` with vanishing ideal `𝒥 = (x_out, ξ_k)`. A reduction datum
//! additionally splits the remaining coordinates into the ones that survive to `A_red*`
//! (`x_red`, `ξ_n`) and the ones that are quotiented away (`x_quot`, `ξ_c`).

mod project;
mod represent;

pub use project::{
    decide_proj_equivalence, make_projectable, proj_relative_class, qr_diagram_check, MadeProjectable, ProjEquivalence,
    QrReport,
};
pub use represent::{
    pullback_class, solve_representation, verify_representation, PullbackReport, RepresentOutcome, Representation,
};

use std::fmt;

use crate::algebroid::{AForm, AlgebroidPresentation, Cohomology, ValidationReport};
use crate::cochain::{Cochain, Derivs};
use crate::error::{Error, Result};
use crate::poly::{Monomial, Poly, VarSpec};
use crate::star::StarSeries;

/// What a coordinate of `A_T*` does under the constraint.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Role {
    /// Generates `𝒥`.
    Ideal,
    /// Survives to the reduced space.
    Reduced,
    /// Free along `E_N` but quotiented away.
    Quotient,
}

/// `E_N = {x_out = 0, ξ_k = 0}` inside `A*`, with the subalgebroid `span(e_k)` over
/// `C = {x_out = 0}` it annihilates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Submanifold {
    total: AlgebroidPresentation,
    x_out: Vec<usize>,
    fibre_k: Vec<usize>,
    ideal_mask: Vec<bool>,
}

fn check_indices(what: &str, idx: &[usize], bound: usize) -> Result<()> {
    for (n, &i) in idx.iter().enumerate() {
        if i >= bound {
            return Err(Error::Invalid(format!("{what}: index {} out of range", i + 1)));
        }
        if idx[..n].contains(&i) {
            return Err(Error::Invalid(format!("{what}: index {} repeated", i + 1)));
        }
    }
    Ok(())
}

fn sorted(v: &[usize]) -> Vec<usize> {
    let mut v = v.to_vec();
    v.sort_unstable();
    v
}

impl Submanifold {
    /// Indices are 0-based.
    pub fn new(total: &AlgebroidPresentation, x_out: &[usize], fibre_k: &[usize]) -> Result<Self> {
        check_indices("x_out", x_out, total.base())?;
        check_indices("fibre_k", fibre_k, total.rank())?;
        let spec = total.spec();
        let mut ideal_mask = vec![false; spec.nvars()];
        for &a in x_out {
            ideal_mask[spec.x(a)] = true;
        }
        for &k in fibre_k {
            ideal_mask[spec.xi(k)] = true;
        }
        Ok(Submanifold { total: total.clone(), x_out: sorted(x_out), fibre_k: sorted(fibre_k), ideal_mask })
    }

    pub fn total(&self) -> &AlgebroidPresentation {
        &self.total
    }

    pub fn spec(&self) -> VarSpec {
        self.total.spec()
    }

    pub fn x_out(&self) -> &[usize] {
        &self.x_out
    }

    pub fn fibre_k(&self) -> &[usize] {
        &self.fibre_k
    }

    /// The coordinate functions generating `𝒥`.
    pub fn generators(&self) -> Vec<Poly> {
        let s = self.spec();
        self.x_out.iter().map(|&a| Poly::x(s, a)).chain(self.fibre_k.iter().map(|&k| Poly::xi(s, k))).collect()
    }

    pub fn monomial_in_ideal(&self, m: &Monomial) -> bool {
        m.exps().iter().zip(&self.ideal_mask).any(|(&e, &y)| e > 0 && y)
    }

    pub fn in_ideal(&self, p: &Poly) -> bool {
        p.terms().all(|(m, _)| self.monomial_in_ideal(m))
    }

    /// `I*`: restriction to `E_N`, kept as a polynomial free of the ideal generators.
    pub fn restrict(&self, p: &Poly) -> Poly {
        p.restrict_zero(&self.ideal_mask)
    }

    fn base_keep(&self) -> Vec<usize> {
        (0..self.total.base()).filter(|a| !self.x_out.contains(a)).collect()
    }

    /// `span(e_k)` over `C`; a Lie subalgebroid exactly when `E_N` is coisotropic.
    pub fn sub_presentation(&self) -> Result<AlgebroidPresentation> {
        subquotient(&self.total, &self.x_out, &self.base_keep(), &self.fibre_k)
    }

    /// Total variable → variable of [`Self::sub_presentation`].
    pub fn sub_map(&self) -> Vec<Option<usize>> {
        var_map(self.spec(), &self.base_keep(), &self.fibre_k)
    }

    /// `I*` of a form on `A_T` as a form on `span(e_k)` over `C`.
    pub fn pull_back_form(&self, alpha: &AForm) -> Result<AForm> {
        let target = VarSpec::new(self.base_keep().len(), self.fibre_k.len());
        let keep = self.base_keep();
        let base_map: Vec<Option<usize>> = (0..self.total.base()).map(|a| keep.iter().position(|&b| b == a)).collect();
        alpha.pullback(target, &self.fibre_k, &base_map)
    }
}

/// Maps total variables to a smaller ambient that keeps `base_keep` and `fibre_keep`
/// (in the given order).
fn var_map(spec: VarSpec, base_keep: &[usize], fibre_keep: &[usize]) -> Vec<Option<usize>> {
    let target = VarSpec::new(base_keep.len(), fibre_keep.len());
    let mut map = vec![None; spec.nvars()];
    for (n, &a) in base_keep.iter().enumerate() {
        map[spec.x(a)] = Some(target.x(n));
    }
    for (n, &k) in fibre_keep.iter().enumerate() {
        map[spec.xi(k)] = Some(target.xi(n));
    }
    map
}

/// Restricts anchor and structure functions to `{x_zero = 0}` and keeps the listed base
/// coordinates and fibre directions. Fails if a dropped base coordinate survives.
fn subquotient(
    total: &AlgebroidPresentation,
    x_zero: &[usize],
    base_keep: &[usize],
    fibre_keep: &[usize],
) -> Result<AlgebroidPresentation> {
    let spec = total.spec();
    let target = VarSpec::new(base_keep.len(), fibre_keep.len());
    let map = var_map(spec, base_keep, fibre_keep);
    let mut zero = vec![false; spec.nvars()];
    for &a in x_zero {
        zero[spec.x(a)] = true;
    }
    let carry = |p: &Poly| p.restrict_zero(&zero).reindex(target, &map);
    let mut anchor = Vec::with_capacity(fibre_keep.len());
    for &i in fibre_keep {
        let row: Result<Vec<Poly>> = base_keep.iter().map(|&a| carry(total.anchor(i, a))).collect();
        anchor.push(row?);
    }
    let r = fibre_keep.len();
    let mut c = vec![vec![vec![Poly::zero(target); r]; r]; r];
    for (ni, &i) in fibre_keep.iter().enumerate() {
        for (nj, &j) in fibre_keep.iter().enumerate() {
            for (nl, &l) in fibre_keep.iter().enumerate() {
                c[ni][nj][nl] = carry(total.c(i, j, l))?;
            }
        }
    }
    let names = fibre_keep.iter().map(|&i| total.names()[i].clone()).collect();
    AlgebroidPresentation::new(base_keep.len(), r, anchor, c, Some(names))
}

/// Raw split data of a reduction constraint, 0-based.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ConstraintData {
    /// Base coordinates cutting out `C`.
    pub x_out: Vec<usize>,
    /// Base coordinates of `C` along the fibres of `p: C → M_red`.
    pub x_quot: Vec<usize>,
    /// `ker P`.
    pub fibre_k: Vec<usize>,
    /// Directions of `A_N` surviving to `A_red`.
    pub fibre_n: Vec<usize>,
    /// Directions outside `A_N`.
    pub fibre_c: Vec<usize>,
}

/// Checks that the split data describes a subalgebroid `A_N = span(e_k, e_n)` over `C`
/// with an ideal `ker P = span(e_k)` and a reduced algebroid `A_red = span(e_n)` over
/// `M_red`. Failures are listed in a fixed order.
pub fn validate_constraint(total: &AlgebroidPresentation, data: &ConstraintData) -> ValidationReport {
    let mut failures = Vec::new();
    let (d, m) = (total.base(), total.rank());
    for (what, idx, bound) in [
        ("x_out", &data.x_out, d),
        ("x_quot", &data.x_quot, d),
        ("fibre_k", &data.fibre_k, m),
        ("fibre_n", &data.fibre_n, m),
        ("fibre_c", &data.fibre_c, m),
    ] {
        if let Err(e) = check_indices(what, idx, bound) {
            failures.push(e.to_string());
        }
    }
    if !failures.is_empty() {
        return ValidationReport { failures };
    }
    if data.x_out.iter().any(|a| data.x_quot.contains(a)) {
        failures.push("x_out and x_quot overlap".into());
    }
    let mut fib: Vec<usize> = data.fibre_k.iter().chain(&data.fibre_n).chain(&data.fibre_c).copied().collect();
    fib.sort_unstable();
    if fib != (0..m).collect::<Vec<_>>() {
        failures.push("fibre_k, fibre_n and fibre_c must partition the fibre directions".into());
    }
    if !failures.is_empty() {
        return ValidationReport { failures };
    }
    let spec = total.spec();
    let mut on_c = vec![false; spec.nvars()];
    for &a in &data.x_out {
        on_c[spec.x(a)] = true;
    }
    let mut quot = vec![false; spec.nvars()];
    for &a in &data.x_quot {
        quot[spec.x(a)] = true;
    }
    let names = total.names();
    let restrict = |p: &Poly| p.restrict_zero(&on_c);
    let kn: Vec<usize> = sorted(&[data.fibre_k.clone(), data.fibre_n.clone()].concat());
    let x_red: Vec<usize> = (0..d).filter(|a| !data.x_out.contains(a) && !data.x_quot.contains(a)).collect();
    for &i in &kn {
        for &a in &data.x_out {
            if !restrict(total.anchor(i, a)).is_zero() {
                failures.push(format!("A_N is not tangent to C: rho({})x{} != 0", names[i], a + 1));
            }
        }
    }
    for &i in &kn {
        for &j in &kn {
            if j <= i {
                continue;
            }
            for &l in &data.fibre_c {
                if !restrict(total.c(i, j, l)).is_zero() {
                    failures
                        .push(format!("A_N is not closed: [{}, {}] has a {} component", names[i], names[j], names[l]));
                }
            }
        }
    }
    for &k in &data.fibre_k {
        for &i in &kn {
            for &l in &data.fibre_n {
                if !restrict(total.c(k, i, l)).is_zero() {
                    failures.push(format!(
                        "ker P is not an ideal: [{}, {}] has a {} component",
                        names[k], names[i], names[l]
                    ));
                }
            }
        }
        for &a in &x_red {
            if !restrict(total.anchor(k, a)).is_zero() {
                failures.push(format!("ker P is not vertical: rho({})x{} != 0", names[k], a + 1));
            }
        }
    }
    for &n in &data.fibre_n {
        for &a in &x_red {
            if !restrict(total.anchor(n, a)).avoids(&quot) {
                failures.push(format!("rho({})x{} depends on a quotient coordinate", names[n], a + 1));
            }
        }
        for &n2 in &data.fibre_n {
            for &n3 in &data.fibre_n {
                if n < n2 && !restrict(total.c(n, n2, n3)).avoids(&quot) {
                    failures.push(format!(
                        "structure function c[{}][{}][{}] depends on a quotient coordinate",
                        n + 1,
                        n2 + 1,
                        n3 + 1
                    ));
                }
            }
        }
    }
    ValidationReport { failures }
}

/// A validated reduction datum with its derived presentations `A_N` and `A_red`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstraintPresentation {
    sub: Submanifold,
    data: ConstraintData,
    roles: Vec<Role>,
    x_red: Vec<usize>,
    kn: Vec<usize>,
    fibre_n: Vec<usize>,
    a_n: AlgebroidPresentation,
    a_red: AlgebroidPresentation,
}

impl ConstraintPresentation {
    pub fn new(total: &AlgebroidPresentation, data: ConstraintData) -> Result<Self> {
        let report = validate_constraint(total, &data);
        if let Some(first) = report.failures.first() {
            return Err(Error::Invalid(first.clone()));
        }
        let sub = Submanifold::new(total, &data.x_out, &data.fibre_k)?;
        let spec = total.spec();
        let mut roles = vec![Role::Reduced; spec.nvars()];
        for &a in &data.x_out {
            roles[spec.x(a)] = Role::Ideal;
        }
        for &k in &data.fibre_k {
            roles[spec.xi(k)] = Role::Ideal;
        }
        for &a in &data.x_quot {
            roles[spec.x(a)] = Role::Quotient;
        }
        for &c in &data.fibre_c {
            roles[spec.xi(c)] = Role::Quotient;
        }
        let x_red: Vec<usize> =
            (0..total.base()).filter(|a| !data.x_out.contains(a) && !data.x_quot.contains(a)).collect();
        let kn = sorted(&[data.fibre_k.clone(), data.fibre_n.clone()].concat());
        let fibre_n = sorted(&data.fibre_n);
        let base_c: Vec<usize> = (0..total.base()).filter(|a| !data.x_out.contains(a)).collect();
        let a_n = subquotient(total, &data.x_out, &base_c, &kn)?;
        let a_red = subquotient(total, &data.x_out, &x_red, &fibre_n)?;
        Ok(ConstraintPresentation { sub, data, roles, x_red, kn, fibre_n, a_n, a_red })
    }

    pub fn total(&self) -> &AlgebroidPresentation {
        self.sub.total()
    }

    pub fn data(&self) -> &ConstraintData {
        &self.data
    }

    pub fn submanifold(&self) -> &Submanifold {
        &self.sub
    }

    pub fn a_n(&self) -> &AlgebroidPresentation {
        &self.a_n
    }

    pub fn a_red(&self) -> &AlgebroidPresentation {
        &self.a_red
    }

    pub fn role(&self, v: usize) -> Role {
        self.roles[v]
    }

    fn base_c(&self) -> Vec<usize> {
        (0..self.total().base()).filter(|a| !self.data.x_out.contains(a)).collect()
    }

    /// Reduced variable → total variable.
    fn lift_map(&self) -> Vec<Option<usize>> {
        let spec = self.total().spec();
        let rs = self.a_red.spec();
        let mut map = vec![None; rs.nvars()];
        for (n, &a) in self.x_red.iter().enumerate() {
            map[rs.x(n)] = Some(spec.x(a));
        }
        for (n, &j) in self.fibre_n.iter().enumerate() {
            map[rs.xi(n)] = Some(spec.xi(j));
        }
        map
    }

    /// Total variable → reduced variable, for the `Reduced` coordinates.
    fn red_map(&self) -> Vec<Option<usize>> {
        var_map(self.total().spec(), &self.x_red, &self.fibre_n)
    }

    fn only_reduced(&self, m: &Monomial) -> bool {
        m.exps().iter().zip(&self.roles).all(|(&e, &r)| e == 0 || r == Role::Reduced)
    }

    fn touches(&self, m: &Monomial, role: Role) -> bool {
        m.exps().iter().zip(&self.roles).any(|(&e, &r)| e > 0 && r == role)
    }

    pub fn in_ideal(&self, p: &Poly) -> bool {
        self.sub.in_ideal(p)
    }

    /// `F ∈ 𝒩`: `I*F` only involves coordinates that survive to `A_red*`.
    pub fn in_normalizer(&self, p: &Poly) -> bool {
        p.terms().all(|(m, _)| self.sub.monomial_in_ideal(m) || self.only_reduced(m))
    }

    /// Pulls a reduced function back along `P^∨` (as a function on `A_T*` that is
    /// constant in the ideal and quotient directions).
    pub fn lift(&self, p: &Poly) -> Result<Poly> {
        p.reindex(self.total().spec(), &self.lift_map())
    }

    pub fn lift_cochain(&self, c: &Cochain) -> Result<Cochain> {
        c.reindex(self.total().spec(), &self.lift_map())
    }

    /// `F̃` with `I*F = P*F̃`, for `F ∈ 𝒩`.
    pub fn descend(&self, p: &Poly) -> Result<Poly> {
        if !self.in_normalizer(p) {
            return Err(Error::Precondition(format!("{p} is not in the normalizer")));
        }
        self.sub.restrict(p).reindex(self.a_red.spec(), &self.red_map())
    }

    /// Which projectability condition a coefficient monomial of an order-`r` term breaks.
    ///
    /// With `C = Σ c_{αβ} ∂^α ⊗ ∂^β`, the three conditions are equivalent to:
    /// 𝒩 is a subalgebra iff `c_{αβ}|_{E_N}` has no quotient coordinates whenever `α, β` only
    /// differentiate reduced coordinates; 𝒥 is a left ideal iff `c_{αβ} ∈ 𝒥` whenever `β`
    /// hits an ideal generator; 𝒥 is two-sided in 𝒩 iff `c_{αβ} ∈ 𝒥` whenever `α` hits an
    /// ideal generator and `β` only reduced coordinates.
    pub fn violated_condition(&self, d: &Derivs, m: &Monomial) -> Option<Condition> {
        if d.len() != 2 || self.sub.monomial_in_ideal(m) {
            return None;
        }
        let (a, b) = (&d[0], &d[1]);
        if self.only_reduced(a) && self.only_reduced(b) {
            return self.touches(m, Role::Quotient).then_some(Condition::Subalgebra);
        }
        if self.touches(b, Role::Ideal) {
            return Some(Condition::LeftIdeal);
        }
        if self.touches(a, Role::Ideal) && self.only_reduced(b) {
            return Some(Condition::TwoSidedInNormalizer);
        }
        None
    }

    /// Whether an operator term `c ∂^γ` (coefficient monomial `m`) is allowed in an
    /// equivalence that preserves `𝒩` and `𝒥`.
    pub fn preserving_term(&self, gamma: &Monomial, m: &Monomial) -> bool {
        if self.sub.monomial_in_ideal(m) {
            return true;
        }
        if self.touches(gamma, Role::Ideal) {
            return false;
        }
        !(self.only_reduced(gamma) && self.touches(m, Role::Quotient))
    }

    /// Checks an operator (arity 1) against [`Self::preserving_term`].
    pub fn preserves(&self, t: &Cochain) -> bool {
        t.terms().all(|(d, c)| c.terms().all(|(m, _)| self.preserving_term(&d[0], m)))
    }

    /// Basis forms `x^μ e^I` that are projectable: killed by `I*`, or with `I ⊆ fibre_n`
    /// and `μ` in the reduced base coordinates only.
    pub fn projectable_key(&self, idx: &[usize], mu: &Monomial) -> bool {
        let spec = self.total().spec();
        if idx.iter().any(|i| self.data.fibre_c.contains(i)) {
            return true;
        }
        if self.data.x_out.iter().any(|&a| mu.get(spec.x(a)) > 0) {
            return true;
        }
        idx.iter().all(|i| self.fibre_n.contains(i)) && self.data.x_quot.iter().all(|&a| mu.get(spec.x(a)) == 0)
    }

    pub fn is_projectable_form(&self, alpha: &AForm) -> bool {
        alpha.components().all(|(idx, p)| p.terms().all(|(m, _)| self.projectable_key(idx, m)))
    }

    /// `H^p_proj`: cohomology of the projectable subcomplex.
    pub fn projectable_cohomology(&self, p: usize, cap: Option<u32>) -> Result<Cohomology> {
        self.total().cohomology_in(p, cap, &|idx, mu| self.projectable_key(idx, mu))
    }

    /// A projectable primitive of a projectable exact form.
    pub fn projectable_primitive(&self, alpha: &AForm, cap: Option<u32>) -> Option<AForm> {
        self.total().primitive_in(alpha, cap, &|idx, mu| self.projectable_key(idx, mu))
    }

    /// `α_red` with `I*α = P*α_red`.
    pub fn reduce_form(&self, alpha: &AForm) -> Result<AForm> {
        if !self.is_projectable_form(alpha) {
            return Err(Error::Precondition(format!("form {alpha} is not projectable")));
        }
        let spec = self.total().spec();
        let mut on_c = vec![false; spec.nvars()];
        for &a in &self.data.x_out {
            on_c[spec.x(a)] = true;
        }
        let target = self.a_red.spec();
        let map = self.red_map();
        let mut out = AForm::zero(target, alpha.degree());
        for (idx, p) in alpha.components() {
            if !idx.iter().all(|i| self.fibre_n.contains(i)) {
                continue;
            }
            let nidx: Vec<usize> =
                idx.iter().map(|i| self.fibre_n.iter().position(|n| n == i).expect("in n")).collect();
            out.add_component(&nidx, &p.restrict_zero(&on_c).reindex(target, &map)?);
        }
        Ok(out)
    }

    /// `I*α` as a form on `A_N`.
    pub fn pull_back_to_n(&self, alpha: &AForm) -> Result<AForm> {
        let base_c = self.base_c();
        let base_map: Vec<Option<usize>> =
            (0..self.total().base()).map(|a| base_c.iter().position(|&b| b == a)).collect();
        alpha.pullback(self.a_n.spec(), &self.kn, &base_map)
    }

    /// `P*β` for a form `β` on `A_red`, as a form on `A_N`.
    pub fn push_up_to_n(&self, beta: &AForm) -> Result<AForm> {
        let rs = self.a_red.spec();
        let ns = self.a_n.spec();
        let base_c = self.base_c();
        let mut map = vec![None; rs.nvars()];
        for (n, a) in self.x_red.iter().enumerate() {
            map[rs.x(n)] = Some(ns.x(base_c.iter().position(|b| b == a).expect("x_red ⊂ C")));
        }
        let mut out = AForm::zero(ns, beta.degree());
        for (idx, p) in beta.components() {
            let nidx: Vec<usize> =
                idx.iter().map(|&i| self.kn.iter().position(|&j| j == self.fibre_n[i]).expect("n ⊂ kn")).collect();
            out.add_component(&nidx, &p.reindex(ns, &map)?);
        }
        Ok(out)
    }
}

/// The three projectability conditions, in their conventional numbering.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Condition {
    /// (i) `𝒩[[ħ]]` is a subalgebra.
    Subalgebra,
    /// (ii) `𝒥[[ħ]]` is a left ideal.
    LeftIdeal,
    /// (iii) `𝒥[[ħ]]` is a two-sided ideal in `𝒩[[ħ]]`.
    TwoSidedInNormalizer,
}

impl Condition {
    /// Stable machine-readable name.
    pub fn label(self) -> &'static str {
        match self {
            Condition::Subalgebra => "normalizer-subalgebra",
            Condition::LeftIdeal => "ideal-left",
            Condition::TwoSidedInNormalizer => "ideal-two-sided-in-normalizer",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Condition::Subalgebra => "the normalizer is a subalgebra",
            Condition::LeftIdeal => "the vanishing ideal is a left ideal",
            Condition::TwoSidedInNormalizer => "the vanishing ideal is two-sided in the normalizer",
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.description())
    }
}

/// First failure of projectability, with a generator pair that exhibits it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub condition: Condition,
    pub order: usize,
    pub first: Poly,
    pub second: Poly,
    /// `I*C_order(first, second)`.
    pub value: Poly,
}

/// Coisotropy of `E_N`: `{𝒥, 𝒥} ⊆ 𝒥`, with the first failing generator bracket.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coisotropy {
    pub witness: Option<(Poly, Poly, Poly)>,
}

impl Coisotropy {
    pub fn is_coisotropic(&self) -> bool {
        self.witness.is_none()
    }
}

pub fn coisotropic_check(sub: &Submanifold) -> Coisotropy {
    let gens = sub.generators();
    let a = sub.total();
    for (n, f) in gens.iter().enumerate() {
        for g in &gens[n + 1..] {
            let b = a.kks_bracket(f, g);
            if !sub.restrict(&b).is_zero() {
                return Coisotropy { witness: Some((f.clone(), g.clone(), b)) };
            }
        }
    }
    Coisotropy { witness: None }
}

fn monomial_poly(spec: VarSpec, m: &Monomial) -> Poly {
    Poly::term(spec, m.clone(), crate::scalar::Scalar::one())
}

/// Lowest order, then lowest condition, then a violating term of minimal total order.
/// The returned pair is re-evaluated and must really break the condition.
pub fn projectability_check(star: &StarSeries, cp: &ConstraintPresentation) -> Result<Option<Violation>> {
    if star.presentation() != cp.total() {
        return Err(Error::Structure("star product and constraint use different presentations".into()));
    }
    let spec = star.spec();
    for r in 1..=star.order() {
        let c = star.c(r);
        let mut best: Option<(Condition, u32, Derivs)> = None;
        for (d, p) in c.terms() {
            for (m, _) in p.terms() {
                if let Some(cond) = cp.violated_condition(d, m) {
                    let key = (cond, d[0].degree() + d[1].degree(), d.clone());
                    if best.as_ref().is_none_or(|b| key < *b) {
                        best = Some(key);
                    }
                }
            }
        }
        let Some((condition, _, d)) = best else { continue };
        let first = monomial_poly(spec, &d[0]);
        let second = monomial_poly(spec, &d[1]);
        let value = cp.sub.restrict(&c.apply(&[first.clone(), second.clone()])?);
        let broken = match condition {
            Condition::Subalgebra => !cp.in_normalizer(&value),
            _ => !value.is_zero(),
        };
        if !broken {
            return Err(Error::TheoremViolation(format!(
                "projectability witness ({first}, {second}) at order {r} does not violate {condition}"
            )));
        }
        return Ok(Some(Violation { condition, order: r, first, second, value }));
    }
    Ok(None)
}

/// `⋆_red` with `I*(F ⋆ G) = P*(F̃ ⋆_red G̃)`.
pub fn reduce_star(star: &StarSeries, cp: &ConstraintPresentation) -> Result<StarSeries> {
    if let Some(v) = projectability_check(star, cp)? {
        return Err(Error::Precondition(format!(
            "star product is not projectable: {} fails at order {} on ({}, {})",
            v.condition, v.order, v.first, v.second
        )));
    }
    let target = cp.a_red.spec();
    let map = cp.red_map();
    let mut out = Vec::with_capacity(star.order());
    for r in 1..=star.order() {
        let mut kept = Cochain::zero(star.spec(), 2);
        for (d, p) in star.c(r).terms() {
            if cp.only_reduced(&d[0]) && cp.only_reduced(&d[1]) {
                kept.add_term(d.clone(), &cp.sub.restrict(p));
            }
        }
        let red = kept.reindex(target, &map)?;
        out.push(red);
    }
    StarSeries::new(cp.a_red.clone(), out)
}

/// Checks `I*(F ⋆ G) = P*(F̃ ⋆_red G̃)` on reduced monomials of degree at most `deg`, and
/// `I*(F ⋆ G) = I*(G ⋆ F) = 0` for `F` an ideal generator times such a monomial.
pub fn verify_reduction(star: &StarSeries, reduced: &StarSeries, cp: &ConstraintPresentation, deg: u32) -> Result<()> {
    let mons = crate::star::monomials_up_to(reduced.spec(), deg);
    let restrict = |h: &crate::HbarPoly| -> Result<crate::HbarPoly> {
        let mut out = crate::HbarPoly::zero(star.spec(), h.order());
        for (k, p) in h.powers() {
            out.add_at(*k, &cp.sub.restrict(p));
        }
        Ok(out)
    };
    let lift_series = |h: &crate::HbarPoly| -> Result<crate::HbarPoly> {
        let mut out = crate::HbarPoly::zero(star.spec(), h.order());
        for (k, p) in h.powers() {
            out.add_at(*k, &cp.lift(p)?);
        }
        Ok(out)
    };
    for f in &mons {
        for g in &mons {
            let (lf, lg) = (cp.lift(f)?, cp.lift(g)?);
            let lhs = restrict(&star.product(&lf, &lg)?)?;
            let rhs = lift_series(&reduced.product(f, g)?)?;
            if lhs != rhs {
                return Err(Error::TheoremViolation(format!("reduction identity fails on ({f}, {g}): {lhs} vs {rhs}")));
            }
            for y in cp.sub.generators() {
                let h = &y * &lf;
                for (a, b) in [(&h, &lg), (&lg, &h)] {
                    let v = restrict(&star.product(a, b)?)?;
                    if !v.is_zero() {
                        return Err(Error::TheoremViolation(format!("I*({a} * {b}) = {v} for an ideal element")));
                    }
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests;
