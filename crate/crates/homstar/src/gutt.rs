//! The PBW (Gutt) product on `Sym(g)`, optionally twisted by a closed 2-form, and its
//! extraction as a bidifferential star product.
//!
//! The twisted enveloping algebra has relations `e_i e_j − e_j e_i = Σ c_ij^k e_k + B_ij`.
//! Elements are kept in PBW normal form: nondecreasing index words.

use std::collections::{BTreeMap, HashMap};

use crate::algebroid::{AForm, AlgebroidPresentation};
use crate::cochain::Cochain;
use crate::error::{Error, Result};
use crate::hbar::HbarPoly;
use crate::poly::{Monomial, Poly, VarSpec};
use crate::scalar::Scalar;
use crate::star::{monomials_up_to, StarSeries};

type Word = Vec<usize>;

/// Element of the twisted enveloping algebra in PBW normal form.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct UeaElement {
    terms: BTreeMap<Word, Scalar>,
}

impl UeaElement {
    pub fn zero() -> Self {
        UeaElement::default()
    }

    pub fn scalar(c: Scalar) -> Self {
        let mut u = UeaElement::zero();
        u.add_word(vec![], &c);
        u
    }

    pub fn generator(i: usize) -> Self {
        let mut u = UeaElement::zero();
        u.add_word(vec![i], &Scalar::one());
        u
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &Scalar)> {
        self.terms.iter()
    }

    /// Highest word length present.
    pub fn degree(&self) -> Option<usize> {
        self.terms.keys().map(Vec::len).max()
    }

    fn add_word(&mut self, w: Word, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(w.clone()).or_insert_with(Scalar::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&w);
        }
    }

    pub fn add_scaled(&mut self, o: &UeaElement, s: &Scalar) {
        for (w, c) in &o.terms {
            self.add_word(w.clone(), &(c * s));
        }
    }

    pub fn scale(&self, s: &Scalar) -> UeaElement {
        let mut out = UeaElement::zero();
        out.add_scaled(self, s);
        out
    }
}

impl std::fmt::Display for UeaElement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(w, c)| {
                let mono: Vec<String> = w.iter().map(|i| format!("e{}", i + 1)).collect();
                crate::poly::render_scaled(c, &mono.join("*"))
            })
            .collect();
        write!(f, "{}", crate::poly::join_signed(&parts))
    }
}

/// Twisted enveloping algebra of a Lie algebra with memoized normal ordering.
pub struct TwistedUea {
    rank: usize,
    /// `[e_i, e_j] = Σ_k bracket[i][j][k] e_k + twist[i][j]`.
    bracket: Vec<Vec<Vec<Scalar>>>,
    twist: Vec<Vec<Scalar>>,
    left: HashMap<(usize, Word), UeaElement>,
    pbw: HashMap<Vec<u32>, UeaElement>,
}

impl TwistedUea {
    /// Requires a Lie algebra (zero base dimension) and a Chevalley–Eilenberg closed `B`.
    pub fn new(a: &AlgebroidPresentation, b: Option<&AForm>) -> Result<Self> {
        if a.base() != 0 {
            return Err(Error::Invalid("the PBW product needs a Lie algebra (base dimension 0)".into()));
        }
        let m = a.rank();
        if let Some(b) = b {
            if !a.d_a(b).is_zero() {
                return Err(Error::Precondition("twist is not closed".into()));
            }
        }
        let bracket =
            (0..m).map(|i| (0..m).map(|j| (0..m).map(|k| a.c(i, j, k).constant_term()).collect()).collect()).collect();
        let twist = (0..m)
            .map(|i| {
                (0..m).map(|j| b.map(|b| b.component(&[i, j]).constant_term()).unwrap_or_else(Scalar::zero)).collect()
            })
            .collect();
        Ok(TwistedUea { rank: m, bracket, twist, left: HashMap::new(), pbw: HashMap::new() })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// `e_i · w` for a normal-ordered word `w`.
    fn left_word(&mut self, i: usize, w: &[usize]) -> UeaElement {
        if w.first().is_none_or(|&j| i <= j) {
            let mut v = Vec::with_capacity(w.len() + 1);
            v.push(i);
            v.extend_from_slice(w);
            let mut u = UeaElement::zero();
            u.add_word(v, &Scalar::one());
            return u;
        }
        let key = (i, w.to_vec());
        if let Some(u) = self.left.get(&key) {
            return u.clone();
        }
        let j = w[0];
        let rest = &w[1..];
        // e_i e_j rest = e_j (e_i rest) + [e_i, e_j] rest
        let inner = self.left_word(i, rest);
        let mut out = self.left_mul(j, &inner);
        for k in 0..self.rank {
            let c = self.bracket[i][j][k].clone();
            if !c.is_zero() {
                let t = self.left_word(k, rest);
                out.add_scaled(&t, &c);
            }
        }
        let t = self.twist[i][j].clone();
        if !t.is_zero() {
            out.add_word(rest.to_vec(), &t);
        }
        self.left.insert(key, out.clone());
        out
    }

    fn left_mul(&mut self, i: usize, u: &UeaElement) -> UeaElement {
        let mut out = UeaElement::zero();
        for (w, c) in &u.terms {
            let t = self.left_word(i, w);
            out.add_scaled(&t, c);
        }
        out
    }

    /// Product in the enveloping algebra.
    pub fn mul(&mut self, u: &UeaElement, v: &UeaElement) -> UeaElement {
        let mut out = UeaElement::zero();
        for (w, c) in &u.terms {
            let mut acc = v.clone();
            for &i in w.iter().rev() {
                acc = self.left_mul(i, &acc);
            }
            out.add_scaled(&acc, c);
        }
        out
    }

    /// Symmetrization of the monomial with exponent vector `exps`, via the recursion
    /// `pbw(s₁∨…∨s_n) = (1/n) Σ_i s_i · pbw(…ŝ_i…)` with the flat connection.
    pub fn pbw_monomial(&mut self, exps: &[u32]) -> UeaElement {
        if let Some(u) = self.pbw.get(exps) {
            return u.clone();
        }
        let n: u32 = exps.iter().sum();
        let out = if n == 0 {
            UeaElement::scalar(Scalar::one())
        } else {
            let mut acc = UeaElement::zero();
            for (i, &e) in exps.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let mut rest = exps.to_vec();
                rest[i] -= 1;
                let inner = self.pbw_monomial(&rest);
                let t = self.left_mul(i, &inner);
                acc.add_scaled(&t, &Scalar::from_int(e as i64));
            }
            acc.scale(&Scalar::ratio(1, n as i64))
        };
        self.pbw.insert(exps.to_vec(), out.clone());
        out
    }

    /// `pbw` of a ξ-polynomial.
    pub fn pbw(&mut self, p: &Poly) -> UeaElement {
        let mut out = UeaElement::zero();
        for (m, c) in p.terms() {
            let t = self.pbw_monomial(m.exps());
            out.add_scaled(&t, c);
        }
        out
    }

    /// `pbw⁻¹`, peeling the top word length: the top part of `pbw(ξ^μ)` is the sorted word
    /// of `μ` with coefficient one.
    pub fn pbw_inverse(&mut self, spec: VarSpec, u: &UeaElement) -> Poly {
        let mut rem = u.clone();
        let mut out = Poly::zero(spec);
        while let Some(d) = rem.degree() {
            let top: Vec<(Word, Scalar)> =
                rem.terms.iter().filter(|(w, _)| w.len() == d).map(|(w, c)| (w.clone(), c.clone())).collect();
            for (w, c) in top {
                let mut e = vec![0u32; self.rank];
                for &i in &w {
                    e[i] += 1;
                }
                let img = self.pbw_monomial(&e);
                rem.add_scaled(&img, &-c.clone());
                out.add_term(Monomial::from_exps(e), &c);
            }
        }
        out
    }
}

/// `S ⋆̃ T = Σ_i h^i pr_{Sym^{k+l−i}} pbw⁻¹(pbw(S) pbw(T))` for ξ-polynomials of degree at
/// most `degree_cap`. The result is exact (order `deg S + deg T`).
pub fn gutt_product(uea: &mut TwistedUea, spec: VarSpec, s: &Poly, t: &Poly, degree_cap: u32) -> Result<HbarPoly> {
    if s.max_degree() > degree_cap || t.max_degree() > degree_cap {
        return Err(Error::Invalid(format!("inputs exceed the degree cap {degree_cap}")));
    }
    let order = (s.max_degree() + t.max_degree()) as usize;
    let mut out = HbarPoly::zero(spec, order);
    for (ms, cs) in s.terms() {
        for (mt, ct) in t.terms() {
            let u = uea.pbw_monomial(ms.exps());
            let v = uea.pbw_monomial(mt.exps());
            let prod = uea.mul(&u, &v);
            let sym = uea.pbw_inverse(spec, &prod);
            let total = ms.degree() + mt.degree();
            for (m, c) in sym.terms() {
                let i = (total - m.degree()) as usize;
                out.add_at(i, &Poly::term(spec, m.clone(), &(c * cs) * ct));
            }
        }
    }
    Ok(out)
}

/// `(S ⋆̃ T) ⋆̃ U − S ⋆̃ (T ⋆̃ U)`, exact in `h`.
///
/// The product is homogeneous, so the power of `h` on each output monomial is the input
/// degree minus the output degree; both sides are computed at `h = 1` in the enveloping
/// algebra and regraded.
pub fn gutt_associator(uea: &mut TwistedUea, spec: VarSpec, s: &Poly, t: &Poly, u: &Poly) -> Result<HbarPoly> {
    for p in [s, t, u] {
        if p.terms().any(|(m, _)| m.degree() != p.max_degree()) {
            return Err(Error::Invalid(format!("associator inputs must be homogeneous, got {p}")));
        }
    }
    let mut at_one = |p: &Poly, q: &Poly| {
        let (a, b) = (uea.pbw(p), uea.pbw(q));
        let prod = uea.mul(&a, &b);
        uea.pbw_inverse(spec, &prod)
    };
    let st = at_one(s, t);
    let left = at_one(&st, u);
    let tu = at_one(t, u);
    let right = at_one(s, &tu);
    let mut out = HbarPoly::zero(spec, (s.max_degree() + t.max_degree() + u.max_degree()) as usize);
    let top = out.order() as u32;
    for (m, c) in (&left - &right).terms() {
        out.add_at((top - m.degree()) as usize, &Poly::term(spec, m.clone(), c.clone()));
    }
    Ok(out)
}

/// First triple of monomials of degree at most `cap` whose associator is nonzero.
///
/// Same test as [`gutt_associator`] on every triple, with the pair products
/// `pbw(pbw⁻¹(pbw S · pbw T))` computed once.
pub fn gutt_associativity_failure(uea: &mut TwistedUea, spec: VarSpec, cap: u32) -> Result<Option<[Poly; 3]>> {
    let mons = monomials_up_to(spec, cap);
    let single: Vec<UeaElement> = mons.iter().map(|p| uea.pbw(p)).collect();
    let n = mons.len();
    let mut pair = Vec::with_capacity(n * n);
    for a in &single {
        for b in &single {
            let prod = uea.mul(a, b);
            let sym = uea.pbw_inverse(spec, &prod);
            pair.push(uea.pbw(&sym));
        }
    }
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let left = uea.mul(&pair[i * n + j], &single[k]);
                let right = uea.mul(&single[i], &pair[j * n + k]);
                if uea.pbw_inverse(spec, &left) != uea.pbw_inverse(spec, &right) {
                    return Ok(Some([mons[i].clone(), mons[j].clone(), mons[k].clone()]));
                }
            }
        }
    }
    Ok(None)
}

/// Reconstructs the Gutt product (twisted by `B`) as a star product in the internal
/// convention, to order `k`.
///
/// The Gutt convention has `[s,t] = h[s,t] + h²B(s,t)`; substituting `h ↦ −ih` and
/// twisting by `−B` gives `C₁ = (i/2){·,·}` and `C₂⁻(J s, J t) = B(s,t)`.
/// Cochains are read off values on monomial pairs of degree at most `order_cap`
/// (default `k + 1`) and checked against an independent set of pairs one degree higher.
pub fn gutt_as_series(
    a: &AlgebroidPresentation,
    b: Option<&AForm>,
    k: usize,
    order_cap: Option<u32>,
) -> Result<StarSeries> {
    let spec = a.spec();
    let neg = b.map(|b| b.scale(&Scalar::from_int(-1)));
    let mut uea = TwistedUea::new(a, neg.as_ref())?;
    let cap = order_cap.unwrap_or(k as u32 + 1);
    let mons: Vec<Monomial> = monomials_up_to(spec, cap)
        .into_iter()
        .map(|p| p.terms().next().expect("monomial").0.clone())
        .filter(|m| !m.is_one())
        .collect();

    let mut raw = vec![Cochain::zero(spec, 2); k];
    for ma in &mons {
        for mb in &mons {
            let fa = Poly::term(spec, ma.clone(), Scalar::one());
            let fb = Poly::term(spec, mb.clone(), Scalar::one());
            let v = gutt_product(&mut uea, spec, &fa, &fb, cap)?;
            let denom = Scalar::from_bigint(ma.factorial() * mb.factorial());
            for r in 1..=k {
                // Subtract what the already-recovered lower-order derivative terms give.
                let known = raw[r - 1].apply(&[fa.clone(), fb.clone()])?;
                let c = (&v.at(r) - &known).scale(&denom.inv().expect("nonzero"));
                if !c.is_zero() {
                    raw[r - 1].add_term(vec![ma.clone(), mb.clone()], &c);
                }
            }
        }
    }

    let check: Vec<Poly> = monomials_up_to(spec, cap + 1);
    for fa in &check {
        for fb in &check {
            if fa.max_degree() + fb.max_degree() > cap + 2 {
                continue;
            }
            let v = gutt_product(&mut uea, spec, fa, fb, cap + 1)?;
            for r in 1..=k {
                if raw[r - 1].apply(&[fa.clone(), fb.clone()])? != v.at(r) {
                    return Err(Error::TheoremViolation(format!(
                        "PBW product is not reproduced by a bidifferential operator of order \
                         {cap} at order {r} on ({fa}, {fb})"
                    )));
                }
            }
        }
    }

    let minus_i = -Scalar::i();
    let cs: Vec<Cochain> = raw.into_iter().enumerate().map(|(idx, c)| c.scale(&minus_i.pow(idx as u32 + 1))).collect();
    let star = StarSeries::new(a.clone(), cs)?;
    if let Some(r) = star.first_defect()? {
        return Err(Error::TheoremViolation(format!("extracted PBW series not associative at {r}")));
    }
    if let Some(r) = star.first_inhomogeneous() {
        return Err(Error::TheoremViolation(format!("extracted PBW series inhomogeneous at {r}")));
    }
    Ok(star)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetrization_and_commutators() {
        let h = AlgebroidPresentation::heisenberg();
        let s = h.spec();
        let mut u = TwistedUea::new(&h, None).unwrap();
        let (e1, e2) = (UeaElement::generator(0), UeaElement::generator(1));
        let mut sym = u.mul(&e1, &e2);
        sym.add_scaled(&u.mul(&e2, &e1), &Scalar::one());
        assert_eq!(u.pbw(&(&Poly::xi(s, 0) * &Poly::xi(s, 1))), sym.scale(&Scalar::ratio(1, 2)));
        let ab = gutt_product(&mut u, s, &Poly::xi(s, 0), &Poly::xi(s, 1), 1).unwrap();
        let ba = gutt_product(&mut u, s, &Poly::xi(s, 1), &Poly::xi(s, 0), 1).unwrap();
        let mut expect = HbarPoly::zero(s, 2);
        expect.add_at(1, &Poly::xi(s, 2));
        assert_eq!(ab.sub(&ba).unwrap(), expect);
    }

    #[test]
    fn twisted_commutator_and_unit() {
        let a = AlgebroidPresentation::abelian(2);
        let s = a.spec();
        let b = AForm::basis(s, &[0, 1], Scalar::one());
        let mut u = TwistedUea::new(&a, Some(&b)).unwrap();
        let ab = gutt_product(&mut u, s, &Poly::xi(s, 0), &Poly::xi(s, 1), 1).unwrap();
        let ba = gutt_product(&mut u, s, &Poly::xi(s, 1), &Poly::xi(s, 0), 1).unwrap();
        let mut expect = HbarPoly::zero(s, 2);
        expect.add_at(2, &Poly::one(s));
        assert_eq!(ab.sub(&ba).unwrap(), expect);
        let f = Poly::constant(s, Scalar::from_int(5));
        let fx = gutt_product(&mut u, s, &f, &Poly::xi(s, 0), 1).unwrap();
        assert_eq!(fx, HbarPoly::from_poly(Poly::xi(s, 0).scale(&Scalar::from_int(5)), 1));
    }

    #[test]
    fn extracted_series_has_the_kks_first_order() {
        let h = AlgebroidPresentation::heisenberg();
        let star = gutt_as_series(&h, None, 3, None).unwrap();
        assert_eq!(star.c(1), h.first_order());
    }

    #[test]
    fn extracted_classes() {
        use crate::classes::{characteristic_class, decide_equivalence, Equivalence};
        let a = AlgebroidPresentation::abelian(2);
        let b = AForm::basis(a.spec(), &[0, 1], Scalar::one());
        let g = gutt_as_series(&a, Some(&b), 4, None).unwrap();
        assert_eq!(characteristic_class(&g, None).unwrap().coordinates, vec![Scalar::one()]);
        let h = AlgebroidPresentation::heisenberg();
        let g = gutt_as_series(&h, None, 4, None).unwrap();
        assert!(characteristic_class(&g, None).unwrap().is_zero());
        let built = crate::star::build_star(&h, None, 4).unwrap();
        assert!(matches!(decide_equivalence(&g, &built, None).unwrap(), Equivalence::Equivalent(_)));
    }

    #[test]
    fn associator_vanishes_on_so3() {
        let a = AlgebroidPresentation::so3();
        let spec = a.spec();
        let mut uea = TwistedUea::new(&a, None).unwrap();
        assert_eq!(gutt_associativity_failure(&mut uea, spec, 2).unwrap(), None);
        let x = |i| Poly::xi(spec, i);
        let e = gutt_associator(&mut uea, spec, &x(0), &(&x(1) * &x(2)), &x(0)).unwrap();
        assert!(e.is_zero());
        // Non-homogeneous inputs would let graded pieces cancel at h = 1.
        assert!(gutt_associator(&mut uea, spec, &(&x(0) + &Poly::one(spec)), &x(1), &x(2)).is_err());
    }
}
