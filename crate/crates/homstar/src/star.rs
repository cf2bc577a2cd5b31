//! Truncated star products `μ₀ + Σ h^r C_r`, equivalences `id + Σ h^r S_r`, and their
//! construction, normalization and closed-form examples.

use crate::algebroid::{AForm, AlgebroidPresentation, Section};
use crate::cochain::Cochain;
use crate::error::{Error, Result};
use crate::hbar::HbarPoly;
use crate::hkr::{solve_potential, solve_potential_with, PotentialRequest};
use crate::poly::{EulerDegree, Monomial, Poly, VarSpec};
use crate::scalar::Scalar;

/// A star product truncated at order `K`, attached to the presentation it lives on.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct StarSeries {
    presentation: AlgebroidPresentation,
    cochains: Vec<Cochain>,
}

/// An equivalence `S = id + Σ_{r=1}^K h^r S_r`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct EquivalenceSeries {
    spec: VarSpec,
    ops: Vec<Cochain>,
}

/// Moyal-type products on `Tℝ^d`, written with `q = x` and `p = ξ`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum MoyalVariant {
    /// `exp((ih/2) Σ ∂_q ⊗ ∂_p)`.
    HalfOrdered,
    /// `exp(ih Σ ∂_q ⊗ ∂_p)`.
    Standard,
    /// `exp((ih/2) Σ (∂_q ⊗ ∂_p − ∂_p ⊗ ∂_q))`.
    Weyl,
}

impl MoyalVariant {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "paper" => Some(MoyalVariant::HalfOrdered),
            "standard" => Some(MoyalVariant::Standard),
            "weyl" => Some(MoyalVariant::Weyl),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            MoyalVariant::HalfOrdered => "paper",
            MoyalVariant::Standard => "standard",
            MoyalVariant::Weyl => "weyl",
        }
    }
}

impl StarSeries {
    pub fn new(presentation: AlgebroidPresentation, cochains: Vec<Cochain>) -> Result<Self> {
        let spec = presentation.spec();
        for c in &cochains {
            if c.spec() != spec {
                return Err(Error::Structure("cochain on the wrong ambient".into()));
            }
            if c.arity() != 2 {
                return Err(Error::Arity { expected: 2, got: c.arity() });
            }
        }
        Ok(StarSeries { presentation, cochains })
    }

    pub fn presentation(&self) -> &AlgebroidPresentation {
        &self.presentation
    }

    pub fn spec(&self) -> VarSpec {
        self.presentation.spec()
    }

    /// Truncation order `K`.
    pub fn order(&self) -> usize {
        self.cochains.len()
    }

    /// `C_r`, with `C_0 = μ₀`.
    pub fn c(&self, r: usize) -> Cochain {
        if r == 0 {
            Cochain::mu0(self.spec())
        } else {
            self.cochains[r - 1].clone()
        }
    }

    pub fn cochains(&self) -> &[Cochain] {
        &self.cochains
    }

    pub fn truncate(&self, k: usize) -> StarSeries {
        StarSeries { presentation: self.presentation.clone(), cochains: self.cochains[..k.min(self.order())].to_vec() }
    }

    /// Replaces `C_r`.
    pub fn with_order(&self, r: usize, c: Cochain) -> Result<StarSeries> {
        if r == 0 || r > self.order() {
            return Err(Error::Truncation { order: r, k: self.order() });
        }
        let mut out = self.clone();
        out.cochains[r - 1] = c;
        Ok(out)
    }

    /// `∂C_r + ½ Σ_{l=1}^{r-1} [C_l, C_{r-l}]`.
    pub fn mc_defect(&self, r: usize) -> Result<Cochain> {
        if r == 0 || r > self.order() {
            return Err(Error::Truncation { order: r, k: self.order() });
        }
        let mut out = self.cochains[r - 1].hochschild_d();
        out.add_assign_scaled(&bracket_sum(&self.cochains, r)?, &Scalar::ratio(1, 2))?;
        Ok(out)
    }

    /// First order with a nonzero defect, if any.
    pub fn first_defect(&self) -> Result<Option<usize>> {
        for r in 1..=self.order() {
            if !self.mc_defect(r)?.is_zero() {
                return Ok(Some(r));
            }
        }
        Ok(None)
    }

    /// First order `r` at which `[L_E, C_r] ≠ −r C_r`, if any.
    pub fn first_inhomogeneous(&self) -> Option<usize> {
        (1..=self.order()).find(|&r| {
            let c = &self.cochains[r - 1];
            c.euler_bracket() != c.scale(&Scalar::from_int(-(r as i64)))
        })
    }

    /// `f ⋆ g` truncated at `K`.
    pub fn product(&self, f: &Poly, g: &Poly) -> Result<HbarPoly> {
        let mut out = HbarPoly::zero(self.spec(), self.order());
        out.add_at(0, &(f * g));
        for r in 1..=self.order() {
            out.add_at(r, &self.cochains[r - 1].apply(&[f.clone(), g.clone()])?);
        }
        Ok(out)
    }

    /// `F ⋆ G` for `h`-dependent arguments, truncated at `K`.
    pub fn product_series(&self, f: &HbarPoly, g: &HbarPoly) -> Result<HbarPoly> {
        let k = self.order();
        let mut out = HbarPoly::zero(self.spec(), k);
        for (a, fa) in f.powers() {
            for (b, gb) in g.powers() {
                if a + b > k {
                    continue;
                }
                for r in 0..=k - a - b {
                    let v = self.c(r).apply(&[fa.clone(), gb.clone()])?;
                    out.add_at(a + b + r, &v);
                }
            }
        }
        Ok(out)
    }

    pub fn commutator(&self, f: &Poly, g: &Poly) -> Result<HbarPoly> {
        self.product(f, g)?.sub(&self.product(g, f)?)
    }

    /// `f ⋆ g` with `h` replaced by a Gaussian-rational number.
    pub fn eval_hbar(&self, f: &Poly, g: &Poly, value: &Scalar) -> Result<Poly> {
        Ok(self.product(f, g)?.eval_hbar(value))
    }
}

/// `Σ_{l=1}^{r-1} [C_l, C_{r-l}]`, using symmetry of the bracket on odd elements.
fn bracket_sum(cs: &[Cochain], r: usize) -> Result<Cochain> {
    let spec = cs[0].spec();
    let mut out = Cochain::zero(spec, 3);
    for l in 1..r {
        let m = r - l;
        if l > m {
            break;
        }
        let b = cs[l - 1].gerstenhaber(&cs[m - 1])?;
        let w = if l == m { Scalar::one() } else { Scalar::from_int(2) };
        out.add_assign_scaled(&b, &w)?;
    }
    Ok(out)
}

/// Builds the homogeneous star product with `C₁ = (i/2){·,·}`, second order
/// `−¼(T + τT) + hkr(B^ver)` where `∂T = [C₁, C₁]`, and higher orders from potentials of
/// `−½ Σ [C_l, C_{r-l}]`.
pub fn build_star(a: &AlgebroidPresentation, b: Option<&AForm>, k: usize) -> Result<StarSeries> {
    let report = a.validate();
    if !report.is_valid() {
        return Err(Error::Invalid(format!("invalid presentation: {}", report.failures.join("; "))));
    }
    let spec = a.spec();
    let zero = AForm::zero(spec, 2);
    let b = b.unwrap_or(&zero);
    if b.degree() != 2 || b.spec() != spec {
        return Err(Error::Invalid("twist must be a 2-form on the presentation".into()));
    }
    if !a.d_a(b).is_zero() {
        return Err(Error::Precondition(format!("twist is not closed: d_A B = {}", a.d_a(b))));
    }
    if k == 0 {
        return StarSeries::new(a.clone(), vec![]);
    }
    let c1 = a.first_order();
    let mut cs = vec![c1.clone()];
    if k >= 2 {
        let bb = c1.gerstenhaber(&c1)?;
        let t = solve_potential(&bb, None).map_err(theorem)?;
        let sym = t.add(&t.tau()?)?.scale(&Scalar::ratio(-1, 4));
        let c2 = sym.add(&a.vertical_two_form(b).hkr())?;
        cs.push(c2);
    }
    let star = StarSeries::new(a.clone(), cs)?;
    let out = extend_inner(star, k, true)?;
    if let Some(r) = out.first_defect()? {
        return Err(Error::TheoremViolation(format!("constructed star fails associativity at order {r}")));
    }
    Ok(out)
}

fn theorem(e: Error) -> Error {
    match e {
        Error::Precondition(m) => Error::TheoremViolation(m),
        other => other,
    }
}

/// Extends a homogeneous star product given to order at least 3 up to order `k`.
pub fn extend_star(star: &StarSeries, k: usize) -> Result<StarSeries> {
    if star.order() < 3 {
        return Err(Error::Precondition("input must be given up to order 3".into()));
    }
    if let Some(r) = star.first_defect()? {
        return Err(Error::Precondition(format!(
            "input is not associative at order {r}; defect: {}",
            star.mc_defect(r)?
        )));
    }
    if let Some(r) = star.first_inhomogeneous() {
        return Err(Error::Precondition(format!("input is not homogeneous at order {r}")));
    }
    extend_inner(star.clone(), k, false)
}

fn extend_inner(mut star: StarSeries, k: usize, trusted: bool) -> Result<StarSeries> {
    for r in star.order() + 1..=k {
        let rhs = bracket_sum(&star.cochains, r)?.scale(&Scalar::ratio(-1, 2));
        let c = match solve_potential(&rhs, None) {
            Ok(c) => c,
            Err(e) if trusted => return Err(theorem(e)),
            Err(e) => return Err(e),
        };
        star.cochains.push(c);
    }
    Ok(star)
}

impl EquivalenceSeries {
    pub fn identity(spec: VarSpec, k: usize) -> Self {
        EquivalenceSeries { spec, ops: vec![Cochain::zero(spec, 1); k] }
    }

    /// `id + h^r t`, truncated at `k`.
    pub fn single(spec: VarSpec, k: usize, r: usize, t: Cochain) -> Self {
        let mut s = EquivalenceSeries::identity(spec, k);
        if r >= 1 && r <= k {
            s.ops[r - 1] = t;
        }
        s
    }

    pub fn from_ops(spec: VarSpec, ops: Vec<Cochain>) -> Result<Self> {
        for o in &ops {
            if o.arity() != 1 || o.spec() != spec {
                return Err(Error::Structure("equivalence orders must be 0-cochains".into()));
            }
        }
        Ok(EquivalenceSeries { spec, ops })
    }

    pub fn spec(&self) -> VarSpec {
        self.spec
    }

    pub fn order(&self) -> usize {
        self.ops.len()
    }

    /// `S_r`, with `S_0 = id`.
    pub fn s(&self, r: usize) -> Cochain {
        if r == 0 {
            Cochain::identity(self.spec)
        } else {
            self.ops[r - 1].clone()
        }
    }

    pub fn ops(&self) -> &[Cochain] {
        &self.ops
    }

    pub fn is_identity(&self) -> bool {
        self.ops.iter().all(|o| o.is_zero())
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &EquivalenceSeries) -> Result<EquivalenceSeries> {
        let k = self.order().min(other.order());
        let mut ops = Vec::with_capacity(k);
        for r in 1..=k {
            let mut acc = self.s(r).add(&other.s(r))?;
            for a in 1..r {
                let b = r - a;
                if self.ops[a - 1].is_zero() || other.ops[b - 1].is_zero() {
                    continue;
                }
                acc = acc.add(&self.ops[a - 1].circle(&other.ops[b - 1])?)?;
            }
            ops.push(acc);
        }
        Ok(EquivalenceSeries { spec: self.spec, ops })
    }

    pub fn inverse(&self) -> Result<EquivalenceSeries> {
        let k = self.order();
        let mut inv: Vec<Cochain> = Vec::with_capacity(k);
        for r in 1..=k {
            let mut acc = self.s(r).scale(&Scalar::from_int(-1));
            for a in 1..r {
                let b = r - a;
                if self.ops[a - 1].is_zero() || inv[b - 1].is_zero() {
                    continue;
                }
                acc = acc.sub(&self.ops[a - 1].circle(&inv[b - 1])?)?;
            }
            inv.push(acc);
        }
        Ok(EquivalenceSeries { spec: self.spec, ops: inv })
    }

    pub fn apply(&self, f: &Poly) -> Result<HbarPoly> {
        let mut out = HbarPoly::from_poly(f.clone(), self.order());
        for r in 1..=self.order() {
            out.add_at(r, &self.ops[r - 1].apply(std::slice::from_ref(f))?);
        }
        Ok(out)
    }

    pub fn apply_series(&self, f: &HbarPoly) -> Result<HbarPoly> {
        let k = self.order();
        let mut out = HbarPoly::zero(self.spec, k);
        for (a, fa) in f.powers() {
            for r in 0..=k.saturating_sub(*a) {
                out.add_at(a + r, &self.s(r).apply(std::slice::from_ref(fa))?);
            }
        }
        Ok(out)
    }

    /// First order `r` at which `S_r` is not homogeneous of degree `−r`.
    pub fn first_inhomogeneous(&self) -> Option<usize> {
        (1..=self.order()).find(|&r| {
            let c = &self.ops[r - 1];
            c.euler_bracket() != c.scale(&Scalar::from_int(-(r as i64)))
        })
    }

    pub fn truncate(&self, k: usize) -> EquivalenceSeries {
        EquivalenceSeries { spec: self.spec, ops: self.ops[..k.min(self.order())].to_vec() }
    }
}

/// `⋆' = S ∘ ⋆ ∘ (S⁻¹ ⊗ S⁻¹)`, truncated at the order of `star`.
pub fn apply_equivalence(s: &EquivalenceSeries, star: &StarSeries) -> Result<StarSeries> {
    let k = star.order();
    if s.order() < k {
        return Err(Error::Truncation { order: k, k: s.order() });
    }
    if s.is_identity() {
        return Ok(star.clone());
    }
    let inv = s.inverse()?;
    let spec = star.spec();
    let mut out = vec![Cochain::zero(spec, 2); k];
    for b in 0..=k {
        let cb = star.c(b);
        if b > 0 && cb.is_zero() {
            continue;
        }
        for c in 0..=k - b {
            if c > 0 && inv.ops[c - 1].is_zero() {
                continue;
            }
            for e in 0..=k - b - c {
                if e > 0 && inv.ops[e - 1].is_zero() {
                    continue;
                }
                let mut inner = cb.clone();
                if c > 0 {
                    inner = inner.compose_at(0, &inv.ops[c - 1])?;
                }
                if e > 0 {
                    inner = inner.compose_at(1, &inv.ops[e - 1])?;
                }
                for a in 0..=k - b - c - e {
                    let r = a + b + c + e;
                    if r == 0 {
                        continue;
                    }
                    let term = if a == 0 {
                        inner.clone()
                    } else if s.ops[a - 1].is_zero() {
                        continue;
                    } else {
                        inner.postcompose(&s.ops[a - 1])?
                    };
                    out[r - 1] = out[r - 1].add(&term)?;
                }
            }
        }
    }
    StarSeries::new(star.presentation.clone(), out)
}

/// Checks `S(f ⋆ g) = S(f) ⋆' S(g)` on all monomial pairs of degree at most `deg`.
pub fn verify_equivalence(s: &EquivalenceSeries, star: &StarSeries, target: &StarSeries, deg: u32) -> Result<()> {
    let mons = monomials_up_to(star.spec(), deg);
    let k = star.order();
    let s = s.truncate(k);
    for f in &mons {
        for g in &mons {
            let lhs = s.apply_series(&star.product(f, g)?)?;
            let rhs = target.product_series(&s.apply(f)?, &s.apply(g)?)?;
            if lhs != rhs {
                return Err(Error::TheoremViolation(format!(
                    "equivalence relation fails on ({f}, {g}): {lhs} vs {rhs}"
                )));
            }
        }
    }
    Ok(())
}

/// All monomials (as polynomials) of total degree at most `deg`, in deglex order.
pub fn monomials_up_to(spec: VarSpec, deg: u32) -> Vec<Poly> {
    let n = spec.nvars();
    let mut out = vec![vec![0u32; n]];
    for v in 0..n {
        let mut next = Vec::new();
        for e in &out {
            let used: u32 = e.iter().sum();
            for k in 0..=deg - used {
                let mut f = e.clone();
                f[v] = k;
                next.push(f);
            }
        }
        out = next;
    }
    let mut ms: Vec<Monomial> = out.into_iter().map(Monomial::from_exps).collect();
    ms.sort();
    ms.into_iter().map(|m| Poly::term(spec, m, Scalar::one())).collect()
}

/// Result of [`normalize_first_order`].
#[derive(Clone, Debug)]
pub struct Normalized {
    pub star: StarSeries,
    pub witness: EquivalenceSeries,
}

/// Makes the first order equal to `(i/2){·,·}` via `S = id + (h/2) T` with `∂T = C₁⁺`.
pub fn normalize_first_order(star: &StarSeries) -> Result<Normalized> {
    let spec = star.spec();
    let k = star.order();
    if k == 0 {
        return Ok(Normalized { star: star.clone(), witness: EquivalenceSeries::identity(spec, 0) });
    }
    let c1 = star.c(1);
    let target = star.presentation.first_order();
    let (plus, minus) = c1.sym_parts()?;
    if minus != target.scale(&Scalar::from_int(2)) {
        return Err(Error::Precondition(format!("first order antisymmetric part is not i{{,}}: {minus}")));
    }
    if plus.is_zero() {
        return Ok(Normalized { star: star.clone(), witness: EquivalenceSeries::identity(spec, k) });
    }
    let t = solve_potential(&plus, None)?;
    let witness = EquivalenceSeries::single(spec, k, 1, t.scale(&Scalar::ratio(1, 2)));
    let out = apply_equivalence(&witness, star)?;
    if out.c(1) != target {
        return Err(Error::TheoremViolation("normalization did not reach (i/2){,}".into()));
    }
    Ok(Normalized { star: out, witness })
}

/// Same as [`normalize_first_order`] but first perturbs by a fixed homogeneous order-1
/// equivalence; used to cross-check independence of the normalization.
pub fn normalize_perturbed(star: &StarSeries) -> Result<Normalized> {
    let spec = star.spec();
    let k = star.order();
    if k == 0 || spec.fibre == 0 {
        return normalize_first_order(star);
    }
    let mut bump = Cochain::zero(spec, 1);
    bump.add_term(vec![Monomial::unit(spec.nvars(), spec.xi(0))], &Poly::one(spec));
    let first = EquivalenceSeries::single(spec, k, 1, bump);
    let moved = apply_equivalence(&first, star)?;
    let n = normalize_first_order(&moved)?;
    let witness = n.witness.compose(&first)?;
    Ok(Normalized { star: n.star, witness })
}

/// Closed-form Moyal-type products on `Tℝ^d`.
pub fn moyal_star(d: usize, variant: MoyalVariant, k: usize) -> Result<StarSeries> {
    let a = AlgebroidPresentation::tangent(d);
    let spec = a.spec();
    let n = spec.nvars();
    let half = Scalar::ratio(1, 2);
    let base = match variant {
        MoyalVariant::Standard => Scalar::i(),
        _ => &Scalar::i() * &half,
    };
    let mut cs = Vec::with_capacity(k);
    for r in 1..=k {
        let mut c = Cochain::zero(spec, 2);
        let pref = base.pow(r as u32);
        match variant {
            MoyalVariant::HalfOrdered | MoyalVariant::Standard => {
                for beta in compositions_of(d, r as u32) {
                    let bx = lift(spec, &beta, false);
                    let bp = lift(spec, &beta, true);
                    let w = &pref / &Scalar::from_bigint(bx.factorial());
                    c.add_term(vec![bx, bp], &Poly::constant(spec, w));
                }
            }
            MoyalVariant::Weyl => {
                for total in 0..=r as u32 {
                    for beta in compositions_of(d, total) {
                        for gamma in compositions_of(d, r as u32 - total) {
                            let bx = lift(spec, &beta, false);
                            let bp = lift(spec, &beta, true);
                            let gx = lift(spec, &gamma, false);
                            let gp = lift(spec, &gamma, true);
                            let mut w = &pref / &Scalar::from_bigint(bx.factorial() * gx.factorial());
                            if (r as u32 - total) % 2 == 1 {
                                w = -w;
                            }
                            c.add_term(vec![bx.add(&gp), bp.add(&gx)], &Poly::constant(spec, w));
                        }
                    }
                }
            }
        }
        debug_assert_eq!(c.spec().nvars(), n);
        cs.push(c);
    }
    let star = StarSeries::new(a, cs)?;
    if let Some(r) = star.first_defect()? {
        return Err(Error::TheoremViolation(format!("Moyal product fails associativity at {r}")));
    }
    if let Some(r) = star.first_inhomogeneous() {
        return Err(Error::TheoremViolation(format!("Moyal product inhomogeneous at {r}")));
    }
    Ok(star)
}

/// Exponent vectors of length `d` summing to `total`.
fn compositions_of(d: usize, total: u32) -> Vec<Vec<u32>> {
    if d == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in (0..=total).rev() {
        for mut rest in compositions_of(d - 1, total - first) {
            let mut v = vec![first];
            v.append(&mut rest);
            out.push(v);
        }
    }
    out
}

fn lift(spec: VarSpec, e: &[u32], fibre: bool) -> Monomial {
    let mut v = vec![0u32; spec.nvars()];
    for (a, &k) in e.iter().enumerate() {
        let idx = if fibre { spec.xi(a) } else { spec.x(a) };
        v[idx] = k;
    }
    Monomial::from_exps(v)
}

/// `J(s) = Σ s^i ξ_i`.
pub fn j_map(spec: VarSpec, s: &Section) -> Poly {
    let mut out = Poly::zero(spec);
    for (i, si) in s.iter().enumerate() {
        out.add_assign(&(si * &Poly::xi(spec, i)));
    }
    out
}

/// `[J(s), f]_⋆`, asserted to equal `−ih ρ(s) f` (first order only; higher orders vanish
/// by homogeneity).
pub fn probe_section_function(star: &StarSeries, s: &Section, f: &Poly) -> Result<HbarPoly> {
    let spec = star.spec();
    let fibre_mask: Vec<bool> = (0..spec.nvars()).map(|v| spec.is_fibre(v)).collect();
    if !f.avoids(&fibre_mask) {
        return Err(Error::Invalid("probe function must be a base function".into()));
    }
    let got = star.commutator(&j_map(spec, s), f)?;
    let mut expect = HbarPoly::zero(spec, star.order());
    expect.add_at(1, &star.presentation.rho(s, f).scale(&-Scalar::i()));
    if got != expect {
        return Err(Error::TheoremViolation(format!("[J(s), f] = {got}, expected {expect}")));
    }
    Ok(got)
}

/// `[J(s), J(t)]_⋆`, asserted to equal `−ih J([s,t]) + h² C₂⁻(J(s), J(t))`.
pub fn probe_sections(star: &StarSeries, s: &Section, t: &Section) -> Result<HbarPoly> {
    let spec = star.spec();
    let (js, jt) = (j_map(spec, s), j_map(spec, t));
    let got = star.commutator(&js, &jt)?;
    let mut expect = HbarPoly::zero(spec, star.order());
    let br = j_map(spec, &star.presentation.bracket(s, t));
    expect.add_at(1, &br.scale(&-Scalar::i()));
    if star.order() >= 2 {
        let (_, minus) = star.c(2).sym_parts()?;
        expect.add_at(2, &minus.apply(&[js, jt])?);
    }
    if got != expect {
        return Err(Error::TheoremViolation(format!("[J(s), J(t)] = {got}, expected {expect}")));
    }
    Ok(got)
}

/// Cross-check that a cochain has the expected homogeneity degree (zero is accepted).
pub fn has_degree(c: &Cochain, k: i64) -> bool {
    c.is_zero() || c.homogeneity_degree().ok() == Some(EulerDegree::Homogeneous(k))
}

/// Potential of a closed symmetric cochain restricted by a filter; thin wrapper kept
/// here so reduction code can reuse the same escalation policy.
pub fn constrained_potential(
    r: &Cochain,
    filter: &dyn Fn(&crate::cochain::Derivs, &Monomial) -> bool,
) -> Result<Cochain> {
    solve_potential_with(r, &PotentialRequest { order_bound: None, filter: Some(filter), check_preconditions: true })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn heisenberg_star_is_associative_and_homogeneous() {
        let h = AlgebroidPresentation::heisenberg();
        let star = build_star(&h, None, 3).unwrap();
        assert_eq!(star.first_defect().unwrap(), None);
        assert_eq!(star.first_inhomogeneous(), None);
        let s = h.spec();
        let v = probe_sections(&star, &h.basis_section(0), &h.basis_section(1)).unwrap();
        let mut expect = HbarPoly::zero(s, 3);
        expect.add_at(1, &Poly::xi(s, 2).scale(&-Scalar::i()));
        assert_eq!(v, expect);
    }

    #[test]
    fn twisted_abelian_bracket() {
        let a = AlgebroidPresentation::abelian(2);
        let s = a.spec();
        let b = AForm::basis(s, &[0, 1], Scalar::one());
        let star = build_star(&a, Some(&b), 3).unwrap();
        let v = star.commutator(&Poly::xi(s, 0), &Poly::xi(s, 1)).unwrap();
        let mut expect = HbarPoly::zero(s, 3);
        expect.add_at(2, &Poly::one(s));
        assert_eq!(v, expect);
    }

    #[test]
    fn moyal_commutators() {
        for (variant, c) in [
            (MoyalVariant::HalfOrdered, Scalar::ratio(1, 2)),
            (MoyalVariant::Standard, Scalar::one()),
            (MoyalVariant::Weyl, Scalar::one()),
        ] {
            let star = moyal_star(1, variant, 3).unwrap();
            let s = star.spec();
            let v = star.commutator(&Poly::x(s, 0), &Poly::xi(s, 0)).unwrap();
            let mut expect = HbarPoly::zero(s, 3);
            expect.add_at(1, &Poly::constant(s, &Scalar::i() * &c));
            assert_eq!(v, expect, "{variant:?}");
        }
    }

    #[test]
    fn equivalence_inverse_and_normalization() {
        let star = moyal_star(1, MoyalVariant::Standard, 3).unwrap();
        let n = normalize_first_order(&star).unwrap();
        assert_eq!(n.star.c(1), star.presentation().first_order());
        verify_equivalence(&n.witness, &star, &n.star, 2).unwrap();
        let inv = n.witness.inverse().unwrap();
        assert!(inv.compose(&n.witness).unwrap().is_identity());
        assert!(normalize_first_order(&moyal_star(1, MoyalVariant::HalfOrdered, 2).unwrap()).is_err());
    }
}
