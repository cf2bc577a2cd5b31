//! Polydifferential Hochschild cochains with the Gerstenhaber bracket and Hochschild
//! differential.
//!
//! A cochain of degree `n` has `n + 1` arguments and is stored as a sum of terms
//! `coeff · ∂^{α_0} f_0 ⋯ ∂^{α_n} f_n`, keyed by the list of multi-indices.
//!
//! Sign conventions, all taken from the displayed formulas:
//!
//! | operation | formula |
//! |-----------|---------|
//! | `D ∘ E` | `Σ_{i=0}^{|D|} (-1)^{i|E|} D(…, E(f_i, …), …)` |
//! | `[D, E]` | `(-1)^{|D||E|} D∘E − E∘D` |
//! | `∂D` | `f_0 D(f_1,…) + (-1)^n D(f_0,…,f_n) f_{n+1} + Σ_i (-1)^{i+1} D(…, f_i f_{i+1}, …)` |
//! | MC | `∂C_r + ½ Σ [C_l, C_{r-l}] = 0` |
//!
//! With these, `∂ = [μ₀, ·]` and `[C, C] = −2 C∘C` for odd `C`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::One;

use crate::error::{Error, Result};
use crate::poly::{EulerDegree, Monomial, MultiIndex, Poly, VarSpec};
use crate::scalar::Scalar;

/// Derivative multi-indices, one per argument.
pub type Derivs = Vec<MultiIndex>;

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Cochain {
    spec: VarSpec,
    arity: usize,
    terms: BTreeMap<Derivs, Poly>,
}

fn sign(odd: bool) -> Scalar {
    if odd {
        Scalar::from_int(-1)
    } else {
        Scalar::one()
    }
}

impl Cochain {
    pub fn zero(spec: VarSpec, arity: usize) -> Self {
        Cochain { spec, arity, terms: BTreeMap::new() }
    }

    /// The pointwise product `μ₀`.
    pub fn mu0(spec: VarSpec) -> Self {
        let mut c = Cochain::zero(spec, 2);
        let z = Monomial::one(spec.nvars());
        c.add_term(vec![z.clone(), z], &Poly::one(spec));
        c
    }

    /// The identity operator as a 0-cochain.
    pub fn identity(spec: VarSpec) -> Self {
        let mut c = Cochain::zero(spec, 1);
        c.add_term(vec![Monomial::one(spec.nvars())], &Poly::one(spec));
        c
    }

    /// A function viewed as a cochain of degree -1.
    pub fn from_poly(p: Poly) -> Self {
        let mut c = Cochain::zero(p.spec(), 0);
        c.add_term(vec![], &p);
        c
    }

    /// Lie derivative along the vector field `Σ_v comps[v] ∂_v`.
    pub fn vector_field(spec: VarSpec, comps: &[Poly]) -> Self {
        let mut c = Cochain::zero(spec, 1);
        for (v, p) in comps.iter().enumerate() {
            c.add_term(vec![Monomial::unit(spec.nvars(), v)], p);
        }
        c
    }

    /// Lie derivative along the Euler field `Σ_j ξ_j ∂_{ξ_j}`.
    pub fn euler(spec: VarSpec) -> Self {
        let comps: Vec<Poly> =
            (0..spec.nvars()).map(|v| if spec.is_fibre(v) { Poly::var(spec, v) } else { Poly::zero(spec) }).collect();
        Cochain::vector_field(spec, &comps)
    }

    pub fn spec(&self) -> VarSpec {
        self.spec
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Hochschild degree `arity − 1`.
    pub fn degree(&self) -> i64 {
        self.arity as i64 - 1
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Derivs, &Poly)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, derivs: &[MultiIndex]) -> Poly {
        self.terms.get(derivs).cloned().unwrap_or_else(|| Poly::zero(self.spec))
    }

    pub fn add_term(&mut self, derivs: Derivs, coeff: &Poly) {
        debug_assert_eq!(derivs.len(), self.arity);
        if coeff.is_zero() {
            return;
        }
        match self.terms.get_mut(&derivs) {
            Some(e) => {
                e.add_assign(coeff);
                if e.is_zero() {
                    self.terms.remove(&derivs);
                }
            }
            None => {
                self.terms.insert(derivs, coeff.clone());
            }
        }
    }

    fn add_term_scaled(&mut self, derivs: Derivs, coeff: &Poly, s: &Scalar) {
        if s.is_zero() {
            return;
        }
        if s.is_one() {
            self.add_term(derivs, coeff);
        } else {
            self.add_term(derivs, &coeff.scale(s));
        }
    }

    fn check(&self, o: &Cochain) -> Result<()> {
        if self.spec != o.spec {
            return Err(Error::Structure(format!("ambient mismatch: {:?} vs {:?}", self.spec, o.spec)));
        }
        Ok(())
    }

    fn check_same_arity(&self, o: &Cochain) -> Result<()> {
        self.check(o)?;
        if self.arity != o.arity {
            return Err(Error::Arity { expected: self.arity, got: o.arity });
        }
        Ok(())
    }

    pub fn add(&self, o: &Cochain) -> Result<Cochain> {
        self.check_same_arity(o)?;
        let mut out = self.clone();
        for (d, c) in &o.terms {
            out.add_term(d.clone(), c);
        }
        Ok(out)
    }

    pub fn sub(&self, o: &Cochain) -> Result<Cochain> {
        self.add(&o.scale(&Scalar::from_int(-1)))
    }

    pub fn add_assign_scaled(&mut self, o: &Cochain, s: &Scalar) -> Result<()> {
        self.check_same_arity(o)?;
        for (d, c) in &o.terms {
            self.add_term_scaled(d.clone(), c, s);
        }
        Ok(())
    }

    pub fn scale(&self, s: &Scalar) -> Cochain {
        let mut out = Cochain::zero(self.spec, self.arity);
        for (d, c) in &self.terms {
            out.add_term_scaled(d.clone(), c, s);
        }
        out
    }

    /// Multiplies every coefficient by `p`.
    pub fn mul_poly(&self, p: &Poly) -> Cochain {
        let mut out = Cochain::zero(self.spec, self.arity);
        for (d, c) in &self.terms {
            out.add_term(d.clone(), &(c * p));
        }
        out
    }

    /// Membership in the subcomplex of operators vanishing on constants.
    pub fn vanishes_on_constants(&self) -> bool {
        self.terms.keys().all(|d| d.iter().all(|a| !a.is_one()))
    }

    /// Largest total derivative order in a single argument.
    pub fn max_order(&self) -> u32 {
        self.terms.keys().flat_map(|d| d.iter().map(|a| a.degree())).max().unwrap_or(0)
    }

    pub fn max_coeff_degree(&self) -> u32 {
        self.terms.values().map(|c| c.max_degree()).max().unwrap_or(0)
    }

    pub fn apply(&self, args: &[Poly]) -> Result<Poly> {
        if args.len() != self.arity {
            return Err(Error::Arity { expected: self.arity, got: args.len() });
        }
        for a in args {
            if a.spec() != self.spec {
                return Err(Error::Structure("argument on a different ambient".into()));
            }
        }
        let mut out = Poly::zero(self.spec);
        for (d, c) in &self.terms {
            let mut prod = c.clone();
            for (a, f) in d.iter().zip(args) {
                if prod.is_zero() {
                    break;
                }
                let df = f.partial_multi(a);
                prod = &prod * &df;
            }
            out.add_assign(&prod);
        }
        Ok(out)
    }

    /// Partial composition `D ∘_i E`: inserts `E` into argument `i` of `D`, without sign.
    pub fn compose_at(&self, i: usize, e: &Cochain) -> Result<Cochain> {
        self.check(e)?;
        if i >= self.arity {
            return Err(Error::Arity { expected: self.arity, got: i + 1 });
        }
        let m = e.arity;
        let mut out = Cochain::zero(self.spec, self.arity - 1 + m);
        for (dd, dc) in &self.terms {
            let alpha = &dd[i];
            for gamma in alpha.divisors() {
                let rest = alpha.checked_sub(&gamma).expect("divisor");
                let weight = alpha.binomial(&gamma);
                let splits = gamma.compositions(m);
                if splits.is_empty() {
                    continue;
                }
                for (ed, ec) in &e.terms {
                    let de = ec.partial_multi(&rest);
                    if de.is_zero() {
                        continue;
                    }
                    let coeff = dc * &de;
                    for (parts, w) in &splits {
                        let mut derivs = Vec::with_capacity(out.arity);
                        derivs.extend_from_slice(&dd[..i]);
                        for (g, b) in parts.iter().zip(ed) {
                            derivs.push(g.add(b));
                        }
                        derivs.extend_from_slice(&dd[i + 1..]);
                        let s = Scalar::from_bigint(&weight * w);
                        out.add_term_scaled(derivs, &coeff, &s);
                    }
                }
            }
        }
        Ok(out)
    }

    /// `D(E_0(f_0), …, E_n(f_n))` for 0-cochains `E_j`.
    pub fn precompose(&self, ops: &[Cochain]) -> Result<Cochain> {
        if ops.len() != self.arity {
            return Err(Error::Arity { expected: self.arity, got: ops.len() });
        }
        let mut acc = self.clone();
        for (i, op) in ops.iter().enumerate() {
            if op.arity != 1 {
                return Err(Error::Arity { expected: 1, got: op.arity });
            }
            acc = acc.compose_at(i, op)?;
        }
        Ok(acc)
    }

    /// `S ∘ D` for a 0-cochain `S`.
    pub fn postcompose(&self, s: &Cochain) -> Result<Cochain> {
        if s.arity != 1 {
            return Err(Error::Arity { expected: 1, got: s.arity });
        }
        s.compose_at(0, self)
    }

    /// The signed concatenation `D ∘ E`.
    pub fn circle(&self, e: &Cochain) -> Result<Cochain> {
        self.check(e)?;
        let mut out = Cochain::zero(self.spec, (self.arity + e.arity).saturating_sub(1));
        if self.arity == 0 {
            return Ok(out);
        }
        let e_odd = e.degree().rem_euclid(2) == 1;
        for i in 0..self.arity {
            let part = self.compose_at(i, e)?;
            out.add_assign_scaled(&part, &sign(e_odd && i % 2 == 1))?;
        }
        Ok(out)
    }

    /// Gerstenhaber bracket `[D, E]`.
    pub fn gerstenhaber(&self, e: &Cochain) -> Result<Cochain> {
        let de = self.circle(e)?;
        let ed = e.circle(self)?;
        let odd = (self.degree() * e.degree()).rem_euclid(2) == 1;
        let mut out = de.scale(&sign(odd));
        if out.arity != ed.arity {
            // Only happens when one side has arity 0 and the circle degenerates.
            if de.is_zero() {
                out = Cochain::zero(self.spec, ed.arity);
            } else if !ed.is_zero() {
                return Err(Error::Structure("bracket arity mismatch".into()));
            }
        }
        if !ed.is_zero() {
            out.add_assign_scaled(&ed, &Scalar::from_int(-1))?;
        }
        Ok(out)
    }

    /// Hochschild differential by the explicit three-part formula.
    pub fn hochschild_d(&self) -> Cochain {
        let n = self.arity;
        let z = Monomial::one(self.spec.nvars());
        let mut out = Cochain::zero(self.spec, n + 1);
        let last_sign = sign((n as i64 - 1).rem_euclid(2) == 1);
        for (d, c) in &self.terms {
            let mut first = Vec::with_capacity(n + 1);
            first.push(z.clone());
            first.extend_from_slice(d);
            out.add_term(first, c);

            let mut last = d.clone();
            last.push(z.clone());
            out.add_term_scaled(last, c, &last_sign);

            for i in 0..n {
                let s = sign(i % 2 == 0);
                let alpha = &d[i];
                for beta in alpha.divisors() {
                    let rest = alpha.checked_sub(&beta).expect("divisor");
                    let w = Scalar::from_bigint(alpha.binomial(&beta));
                    let mut derivs = Vec::with_capacity(n + 1);
                    derivs.extend_from_slice(&d[..i]);
                    derivs.push(beta);
                    derivs.push(rest);
                    derivs.extend_from_slice(&d[i + 1..]);
                    out.add_term_scaled(derivs, c, &(&s * &w));
                }
            }
        }
        out
    }

    /// Total antisymmetrization with the `1/(k+1)!` normalization.
    pub fn alt(&self) -> Cochain {
        let n = self.arity;
        let perms = permutations(n);
        let norm = Scalar::from_bigint(BigInt::one()) / Scalar::from_bigint(crate::poly::factorial(n as u32));
        let mut out = Cochain::zero(self.spec, n);
        for (d, c) in &self.terms {
            for (p, odd) in &perms {
                let mut derivs = vec![Monomial::one(0); n];
                for (j, a) in d.iter().enumerate() {
                    derivs[p[j]] = a.clone();
                }
                let s = &sign(*odd) * &norm;
                out.add_term_scaled(derivs, c, &s);
            }
        }
        out
    }

    /// `τD(f, g) = D(g, f)` for bidifferential `D`.
    pub fn tau(&self) -> Result<Cochain> {
        if self.arity != 2 {
            return Err(Error::Arity { expected: 2, got: self.arity });
        }
        let mut out = Cochain::zero(self.spec, 2);
        for (d, c) in &self.terms {
            out.add_term(vec![d[1].clone(), d[0].clone()], c);
        }
        Ok(out)
    }

    /// `(D + τD, D − τD)`, without a factor one half.
    pub fn sym_parts(&self) -> Result<(Cochain, Cochain)> {
        let t = self.tau()?;
        Ok((self.add(&t)?, self.sub(&t)?))
    }

    /// Homogeneity degree: ξ-degree of each coefficient monomial minus the number of
    /// ξ-derivatives of the term.
    pub fn homogeneity_degree(&self) -> Result<EulerDegree> {
        let spec = self.spec;
        let mut seen: Option<i64> = None;
        for (d, c) in &self.terms {
            let dx: i64 = d.iter().map(|a| a.fibre_degree(spec) as i64).sum();
            for (m, _) in c.terms() {
                let k = m.fibre_degree(spec) as i64 - dx;
                match seen {
                    None => seen = Some(k),
                    Some(s) if s != k => return Ok(EulerDegree::Inhomogeneous),
                    _ => {}
                }
            }
        }
        seen.map(EulerDegree::Homogeneous).ok_or(Error::ZeroDegree)
    }

    /// `[L_E, D]`, computed through the bracket.
    pub fn euler_bracket(&self) -> Cochain {
        Cochain::euler(self.spec).gerstenhaber(self).expect("same ambient")
    }

    /// Keeps only the coefficient monomials selected by `keep`.
    pub fn filter_coeffs(&self, keep: impl Fn(&Derivs, &Monomial) -> bool) -> Cochain {
        let mut out = Cochain::zero(self.spec, self.arity);
        for (d, c) in &self.terms {
            let mut p = Poly::zero(self.spec);
            for (m, s) in c.terms() {
                if keep(d, m) {
                    p.add_term(m.clone(), s);
                }
            }
            out.add_term(d.clone(), &p);
        }
        out
    }

    /// Flat `(derivs, coefficient monomial) -> scalar` view, the coordinates used by the
    /// sparse solvers.
    pub fn entries(&self) -> BTreeMap<(Derivs, Monomial), Scalar> {
        let mut out = BTreeMap::new();
        for (d, c) in &self.terms {
            for (m, s) in c.terms() {
                out.insert((d.clone(), m.clone()), s.clone());
            }
        }
        out
    }

    /// Inverse of [`Cochain::entries`].
    pub fn from_entries(spec: VarSpec, arity: usize, entries: &BTreeMap<(Derivs, Monomial), Scalar>) -> Cochain {
        let mut out = Cochain::zero(spec, arity);
        for ((d, m), s) in entries {
            out.add_term(d.clone(), &Poly::term(spec, m.clone(), s.clone()));
        }
        out
    }

    pub fn map_coeffs(&self, f: impl Fn(&Poly) -> Poly) -> Cochain {
        let mut out = Cochain::zero(self.spec, self.arity);
        for (d, c) in &self.terms {
            out.add_term(d.clone(), &f(c));
        }
        out
    }

    /// Moves the cochain to another ambient through a variable map, as in [`Poly::reindex`].
    pub fn reindex(&self, target: VarSpec, map: &[Option<usize>]) -> Result<Cochain> {
        let mut out = Cochain::zero(target, self.arity);
        for (d, c) in &self.terms {
            let mut nd = Vec::with_capacity(d.len());
            for a in d {
                let mut e = vec![0u32; target.nvars()];
                for (v, &k) in a.exps().iter().enumerate() {
                    if k == 0 {
                        continue;
                    }
                    let w = map[v].ok_or_else(|| {
                        Error::Structure(format!("derivative in {} cannot be carried over", self.spec.var_name(v)))
                    })?;
                    e[w] += k;
                }
                nd.push(Monomial::from_exps(e));
            }
            out.add_term(nd, &c.reindex(target, map)?);
        }
        Ok(out)
    }

    /// Text form: one `[d_0, …, d_n] -> coeff` line per term, in canonical order.
    pub fn render_lines(&self) -> Vec<String> {
        let spec = self.spec;
        let names = |v: usize| spec.var_name(v);
        self.terms
            .iter()
            .map(|(d, c)| {
                let ds: Vec<String> = d
                    .iter()
                    .map(|a| {
                        let s = crate::poly::render_monomial(a, &names);
                        if s.is_empty() {
                            "1".to_string()
                        } else {
                            s
                        }
                    })
                    .collect();
                format!("[{}] -> {}", ds.join(", "), c)
            })
            .collect()
    }
}

impl fmt::Display for Cochain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        write!(f, "{}", self.render_lines().join("\n"))
    }
}

/// All permutations of `0..n` with their parity, in lexicographic order.
pub fn permutations(n: usize) -> Vec<(Vec<usize>, bool)> {
    fn rec(prefix: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<(Vec<usize>, bool)>) {
        let n = used.len();
        if prefix.len() == n {
            let mut inv = 0;
            for a in 0..n {
                for b in a + 1..n {
                    if prefix[a] > prefix[b] {
                        inv += 1;
                    }
                }
            }
            out.push((prefix.clone(), inv % 2 == 1));
            return;
        }
        for k in 0..n {
            if !used[k] {
                used[k] = true;
                prefix.push(k);
                rec(prefix, used, out);
                prefix.pop();
                used[k] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// Parses a derivative multi-index such as `xi1^2*x1` or `1`.
pub fn parse_multi_index(spec: VarSpec, src: &str) -> Result<MultiIndex> {
    let p = crate::text::parse_poly(spec, src)?;
    let mut it = p.terms();
    match (it.next(), it.next()) {
        (Some((m, c)), None) if c.is_one() => Ok(m.clone()),
        _ => Err(Error::Parse { line: 0, msg: format!("`{src}` is not a multi-index") }),
    }
}

/// Parses one `[d_0, …] -> coeff` line.
pub fn parse_term_line(spec: VarSpec, line: &str) -> Result<(Derivs, Poly)> {
    let bad = || Error::Parse { line: 0, msg: format!("malformed cochain term `{line}`") };
    let (lhs, rhs) = line.split_once("->").ok_or_else(bad)?;
    let lhs = lhs.trim();
    let inner = lhs.strip_prefix('[').and_then(|s| s.strip_suffix(']')).ok_or_else(bad)?;
    let derivs = if inner.trim().is_empty() {
        vec![]
    } else {
        inner.split(',').map(|s| parse_multi_index(spec, s.trim())).collect::<Result<Vec<_>>>()?
    };
    Ok((derivs, crate::text::parse_poly(spec, rhs.trim())?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec() -> VarSpec {
        VarSpec::new(1, 2)
    }

    fn d_xi(spec: VarSpec, j: usize) -> MultiIndex {
        Monomial::unit(spec.nvars(), spec.xi(j))
    }

    #[test]
    fn mu0_is_associative_and_d_matches_bracket() {
        let s = spec();
        let mu = Cochain::mu0(s);
        assert!(mu.circle(&mu).unwrap().is_zero());
        let f = Poly::x(s, 0);
        let g = Poly::xi(s, 0);
        assert_eq!(mu.apply(&[f.clone(), g.clone()]).unwrap(), &f * &g);
        let mut d = Cochain::zero(s, 2);
        d.add_term(vec![d_xi(s, 0), d_xi(s, 1)], &Poly::xi(s, 0));
        assert_eq!(d.hochschild_d(), mu.gerstenhaber(&d).unwrap());
        assert!(d.hochschild_d().hochschild_d().is_zero());
    }

    #[test]
    fn spot_values() {
        let s = VarSpec::new(0, 2);
        let mut s1 = Cochain::zero(s, 1);
        let mut a = Monomial::unit(2, 0);
        a = a.bump(1);
        s1.add_term(vec![a], &Poly::one(s));
        let v = s1.hochschild_d().apply(&[Poly::xi(s, 0), Poly::xi(s, 1)]).unwrap();
        assert_eq!(v, Poly::constant(s, Scalar::from_int(-1)));

        let mut c = Cochain::zero(s, 2);
        c.add_term(vec![d_xi(s, 0), d_xi(s, 0)], &Poly::one(s));
        assert_eq!(c.euler_bracket(), c.scale(&Scalar::from_int(-2)));
        assert_eq!(c.homogeneity_degree().unwrap(), EulerDegree::Homogeneous(-2));
        let mut e = Cochain::zero(s, 2);
        e.add_term(vec![d_xi(s, 0), d_xi(s, 1)], &Poly::xi(s, 0));
        assert_eq!(e.homogeneity_degree().unwrap(), EulerDegree::Homogeneous(-1));
        assert_eq!(Cochain::mu0(s).homogeneity_degree().unwrap(), EulerDegree::Homogeneous(0));
    }

    #[test]
    fn vector_fields_compose_to_second_order() {
        let s = spec();
        let n = s.nvars();
        let x = Cochain::vector_field(s, &[Poly::one(s), Poly::zero(s), Poly::zero(s)]);
        let y = Cochain::vector_field(s, &[Poly::zero(s), Poly::one(s), Poly::zero(s)]);
        let xy = x.circle(&y).unwrap();
        let mut expect = Cochain::zero(s, 1);
        expect.add_term(vec![Monomial::unit(n, 0).bump(1)], &Poly::one(s));
        assert_eq!(xy, expect);
        assert!(x.hochschild_d().is_zero());
    }

    #[test]
    fn term_lines_round_trip() {
        let s = spec();
        let mut d = Cochain::zero(s, 2);
        d.add_term(vec![d_xi(s, 0).bump(0), Monomial::one(3)], &Poly::xi(s, 1));
        for line in d.render_lines() {
            let (derivs, c) = parse_term_line(s, &line).unwrap();
            assert_eq!(d.coeff(&derivs), c);
        }
        assert_eq!(d.render_lines(), vec!["[x1*xi1, 1] -> xi2".to_string()]);
    }
}
