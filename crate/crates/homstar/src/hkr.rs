//! Multivector fields, the HKR map, its inverse on closed cochains, and an exact potential
//! solver for the Hochschild differential.
//!
//! The potential solver exploits that `∂` never touches coefficients and preserves the
//! total derivative multi-index `A = Σ_j α_j` of a term. The complex therefore splits
//! into finite blocks indexed by `(coefficient monomial, A)`; each block is solved by
//! exact row reduction with free variables set to zero.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use crate::cochain::{permutations, Cochain, Derivs};
use crate::error::{Error, Result};
use crate::linalg::{solve_many, Matrix, Solution};
use crate::poly::{factorial, EulerDegree, Monomial, Poly, VarSpec};
use crate::scalar::Scalar;

/// Totally antisymmetric multivector field, stored on strictly increasing index tuples.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Multivector {
    spec: VarSpec,
    degree: usize,
    comps: BTreeMap<Vec<usize>, Poly>,
}

/// Sorts `idx` in place and returns the parity of the sorting permutation, or `None`
/// if an index repeats.
pub(crate) fn sort_with_sign(idx: &mut [usize]) -> Option<bool> {
    let mut odd = false;
    for a in 0..idx.len() {
        for b in 0..idx.len() - 1 - a {
            if idx[b] > idx[b + 1] {
                idx.swap(b, b + 1);
                odd = !odd;
            }
        }
    }
    if idx.windows(2).any(|w| w[0] == w[1]) {
        None
    } else {
        Some(odd)
    }
}

impl Multivector {
    pub fn zero(spec: VarSpec, degree: usize) -> Self {
        Multivector { spec, degree, comps: BTreeMap::new() }
    }

    pub fn spec(&self) -> VarSpec {
        self.spec
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    pub fn components(&self) -> impl Iterator<Item = (&Vec<usize>, &Poly)> {
        self.comps.iter()
    }

    /// Adds `p · ∂_{idx[0]} ∧ … ∧ ∂_{idx[k]}`; indices may come in any order.
    pub fn add_component(&mut self, idx: &[usize], p: &Poly) {
        assert_eq!(idx.len(), self.degree);
        let mut sorted = idx.to_vec();
        let Some(odd) = sort_with_sign(&mut sorted) else {
            return;
        };
        let p = if odd { -p } else { p.clone() };
        let e = self.comps.entry(sorted.clone()).or_insert_with(|| Poly::zero(self.spec));
        e.add_assign(&p);
        if e.is_zero() {
            self.comps.remove(&sorted);
        }
    }

    /// Component for an arbitrary index tuple, with the antisymmetry sign applied.
    pub fn component(&self, idx: &[usize]) -> Poly {
        let mut sorted = idx.to_vec();
        match sort_with_sign(&mut sorted) {
            None => Poly::zero(self.spec),
            Some(odd) => {
                let p = self.comps.get(&sorted).cloned().unwrap_or_else(|| Poly::zero(self.spec));
                if odd {
                    -&p
                } else {
                    p
                }
            }
        }
    }

    pub fn add(&self, o: &Multivector) -> Result<Multivector> {
        if self.spec != o.spec || self.degree != o.degree {
            return Err(Error::Structure("multivector shape mismatch".into()));
        }
        let mut out = self.clone();
        for (i, p) in &o.comps {
            out.add_component(i, p);
        }
        Ok(out)
    }

    pub fn scale(&self, s: &Scalar) -> Multivector {
        let mut out = Multivector::zero(self.spec, self.degree);
        for (i, p) in &self.comps {
            out.add_component(i, &p.scale(s));
        }
        out
    }

    /// ξ-degree of each component minus its number of fibre indices.
    pub fn homogeneity_degree(&self) -> Result<EulerDegree> {
        let mut seen = None;
        for (idx, p) in &self.comps {
            let nf = idx.iter().filter(|&&v| self.spec.is_fibre(v)).count() as i64;
            for (m, _) in p.terms() {
                let k = m.fibre_degree(self.spec) as i64 - nf;
                match seen {
                    None => seen = Some(k),
                    Some(s) if s != k => return Ok(EulerDegree::Inhomogeneous),
                    _ => {}
                }
            }
        }
        seen.map(EulerDegree::Homogeneous).ok_or(Error::ZeroDegree)
    }

    /// HKR map: `1/k! Σ_σ sign(σ) X^{a} ∂_{a_σ(0)} f_0 ⋯ ∂_{a_σ(k-1)} f_{k-1}`.
    pub fn hkr(&self) -> Cochain {
        let n = self.spec.nvars();
        let k = self.degree;
        let norm = Scalar::one() / Scalar::from_bigint(factorial(k as u32));
        let perms = permutations(k);
        let mut out = Cochain::zero(self.spec, k);
        for (idx, p) in &self.comps {
            for (perm, odd) in &perms {
                let derivs: Derivs = perm.iter().map(|&j| Monomial::unit(n, idx[j])).collect();
                let s = if *odd { -&norm } else { norm.clone() };
                out.add_term(derivs, &p.scale(&s));
            }
        }
        out
    }

    /// Contraction with the differentials of `args`: `Σ X^{a} ∂_{a_0} f_0 ⋯` summed over all
    /// index tuples.
    pub fn evaluate(&self, args: &[Poly]) -> Result<Poly> {
        let c = self.hkr().scale(&Scalar::from_bigint(factorial(self.degree as u32)));
        c.apply(args)
    }
}

impl fmt::Display for Multivector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.comps.is_empty() {
            return write!(f, "0");
        }
        let lines: Vec<String> = self
            .comps
            .iter()
            .map(|(idx, p)| {
                let names: Vec<String> = idx.iter().map(|&v| format!("d{}", self.spec.var_name(v))).collect();
                format!("[{}] -> {}", names.join("^"), p)
            })
            .collect();
        write!(f, "{}", lines.join("\n"))
    }
}

/// Increasing `k`-subsets of `0..n` in lexicographic order.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for v in start..n {
            cur.push(v);
            rec(v + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// The multivector `X` with `hkr(X) = Alt(D)` for a closed cochain `D`.
pub fn hkr_inv_closed(d: &Cochain) -> Result<Multivector> {
    if !d.hochschild_d().is_zero() {
        return Err(Error::Precondition("cochain is not Hochschild closed".into()));
    }
    Ok(hkr_inv_unchecked(d))
}

/// Reads `p! · Alt(D)` on coordinate functions, without checking closedness.
pub(crate) fn hkr_inv_unchecked(d: &Cochain) -> Multivector {
    let spec = d.spec();
    let p = d.arity();
    let alt = d.alt();
    let scale = Scalar::from_bigint(factorial(p as u32));
    let mut out = Multivector::zero(spec, p);
    for idx in subsets(spec.nvars(), p) {
        let args: Vec<Poly> = idx.iter().map(|&v| Poly::var(spec, v)).collect();
        let val = alt.apply(&args).expect("arity matches");
        out.add_component(&idx, &val.scale(&scale));
    }
    out
}

/// Restricts which candidate terms a constrained solve may use: `(derivs, coefficient
/// monomial) -> allowed`.
pub type CandidateFilter<'a> = &'a dyn Fn(&Derivs, &Monomial) -> bool;

/// Knobs for [`solve_potential_with`].
pub struct PotentialRequest<'a> {
    /// Maximal derivative order per argument; `None` picks `arity·maxorder + 1`.
    pub order_bound: Option<u32>,
    /// Candidate restriction for constrained solves.
    pub filter: Option<CandidateFilter<'a>>,
    /// Whether to assert `∂R = 0` and `Alt(R) = 0` first.
    pub check_preconditions: bool,
}

impl Default for PotentialRequest<'_> {
    fn default() -> Self {
        PotentialRequest { order_bound: None, filter: None, check_preconditions: true }
    }
}

/// Returns `C` vanishing on constants with `∂C = R`, preserving homogeneity.
pub fn solve_potential(r: &Cochain, order_bound: Option<u32>) -> Result<Cochain> {
    solve_potential_with(r, &PotentialRequest { order_bound, ..Default::default() })
}

pub fn solve_potential_with(r: &Cochain, req: &PotentialRequest<'_>) -> Result<Cochain> {
    if r.arity() < 2 {
        return Err(Error::Arity { expected: 2, got: r.arity() });
    }
    let out_arity = r.arity() - 1;
    if r.is_zero() {
        return Ok(Cochain::zero(r.spec(), out_arity));
    }
    if req.check_preconditions {
        let dr = r.hochschild_d();
        if !dr.is_zero() {
            return Err(Error::Precondition(format!("right-hand side is not closed: {dr}")));
        }
        let alt = r.alt();
        if !alt.is_zero() {
            return Err(Error::Precondition(format!("right-hand side has a nonzero antisymmetric part: {alt}")));
        }
    }
    let base = req.order_bound.unwrap_or(r.arity() as u32 * r.max_order() + 1);
    let mut last_residual = None;
    for bound in base..=base + 2 {
        match solve_blocks(r, out_arity, bound, req.filter) {
            Ok(c) => return Ok(c),
            Err(residual) => last_residual = Some(residual),
        }
    }
    Err(Error::Infeasible {
        what: format!("Hochschild potential (order bound escalated to {})", base + 2),
        residual: last_residual.map(|c| c.to_string()).unwrap_or_default(),
    })
}

/// Ordered decompositions of `a` into `k` nonzero parts of degree at most `bound`.
fn candidates(a: &Monomial, k: usize, bound: u32) -> Vec<Derivs> {
    let set: BTreeSet<Derivs> = a
        .compositions(k)
        .into_iter()
        .map(|(parts, _)| parts)
        .filter(|parts| parts.iter().all(|p| !p.is_one() && p.degree() <= bound))
        .collect();
    set.into_iter().collect()
}

/// Solves every `(μ, A)` block; on failure returns the unsolved part of `r`.
fn solve_blocks(
    r: &Cochain,
    out_arity: usize,
    bound: u32,
    filter: Option<CandidateFilter<'_>>,
) -> std::result::Result<Cochain, Cochain> {
    let spec = r.spec();
    let mut by_total: BTreeMap<Monomial, Vec<(&Derivs, &Poly)>> = BTreeMap::new();
    for (d, c) in r.terms() {
        let total = d.iter().fold(Monomial::one(spec.nvars()), |acc, a| acc.add(a));
        by_total.entry(total).or_default().push((d, c));
    }
    let mut out = Cochain::zero(spec, out_arity);
    let mut residual = Cochain::zero(spec, r.arity());
    for (total, rterms) in by_total {
        let cands = candidates(&total, out_arity, bound);
        let images: Vec<Cochain> = cands
            .iter()
            .map(|d| {
                let mut c = Cochain::zero(spec, out_arity);
                c.add_term(d.clone(), &Poly::one(spec));
                c.hochschild_d()
            })
            .collect();
        let mut rows: HashMap<Derivs, usize> = HashMap::new();
        let mut row_keys: Vec<Derivs> = Vec::new();
        let mut intern = |d: &Derivs, rows: &mut HashMap<Derivs, usize>| -> usize {
            if let Some(&k) = rows.get(d) {
                return k;
            }
            rows.insert(d.clone(), row_keys.len());
            row_keys.push(d.clone());
            row_keys.len() - 1
        };
        for img in &images {
            for (d, _) in img.terms() {
                intern(d, &mut rows);
            }
        }
        for (d, _) in &rterms {
            intern(d, &mut rows);
        }
        let nrows = rows.len();

        let mut mus: BTreeSet<Monomial> = BTreeSet::new();
        for (_, c) in &rterms {
            for (m, _) in c.terms() {
                mus.insert(m.clone());
            }
        }
        // Group coefficient monomials by which candidates they may use.
        let mut groups: BTreeMap<Vec<bool>, Vec<Monomial>> = BTreeMap::new();
        for mu in mus {
            let sig: Vec<bool> = cands.iter().map(|d| filter.is_none_or(|f| f(d, &mu))).collect();
            groups.entry(sig).or_default().push(mu);
        }
        for (sig, group) in groups {
            let cols: Vec<usize> = (0..cands.len()).filter(|&k| sig[k]).collect();
            let mut mat = Matrix::zeros(nrows, cols.len());
            for (j, &k) in cols.iter().enumerate() {
                for (d, c) in images[k].terms() {
                    mat.set(rows[d], j, c.constant_term());
                }
            }
            let rhs: Vec<Vec<Scalar>> = group
                .iter()
                .map(|mu| {
                    let mut b = vec![Scalar::zero(); nrows];
                    for (d, c) in &rterms {
                        b[rows[*d]] = c.coeff(mu);
                    }
                    b
                })
                .collect();
            for (mu, sol) in group.iter().zip(solve_many(&mat, &rhs)) {
                match sol {
                    Solution::Solved(x) => {
                        for (j, v) in x.iter().enumerate() {
                            if !v.is_zero() {
                                out.add_term(cands[cols[j]].clone(), &Poly::term(spec, mu.clone(), v.clone()));
                            }
                        }
                    }
                    Solution::Inconsistent(_) => {
                        for (d, c) in &rterms {
                            let v = c.coeff(mu);
                            residual.add_term((*d).clone(), &Poly::term(spec, mu.clone(), v));
                        }
                    }
                }
            }
        }
    }
    if residual.is_zero() {
        Ok(out)
    } else {
        Err(residual)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hkr_of_constant_bivector() {
        let s = VarSpec::new(0, 2);
        let mut x = Multivector::zero(s, 2);
        x.add_component(&[1, 0], &Poly::constant(s, Scalar::from_int(-1)));
        let h = x.hkr();
        let v = h.apply(&[Poly::xi(s, 0), Poly::xi(s, 1)]).unwrap();
        assert_eq!(v, Poly::constant(s, Scalar::ratio(1, 2)));
        assert!(h.hochschild_d().is_zero());
        assert_eq!(hkr_inv_closed(&h).unwrap(), x);
    }

    #[test]
    fn potential_of_exact_cochain() {
        let s = VarSpec::new(1, 2);
        let mut t = Cochain::zero(s, 1);
        t.add_term(vec![Monomial::unit(3, 1).bump(2)], &Poly::x(s, 0));
        let r = t.hochschild_d();
        let c = solve_potential(&r, None).unwrap();
        assert_eq!(c.hochschild_d(), r);
        assert!(solve_potential(&Cochain::zero(s, 2), None).unwrap().is_zero());
    }

    #[test]
    fn rejects_antisymmetric_input() {
        let s = VarSpec::new(0, 2);
        let mut x = Multivector::zero(s, 2);
        x.add_component(&[0, 1], &Poly::one(s));
        assert!(matches!(solve_potential(&x.hkr(), None), Err(Error::Precondition(_))));
    }
}
