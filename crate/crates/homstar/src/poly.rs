//! Sparse polynomials in base coordinates `x1..xd` and fibre coordinates `xi1..xim`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Ambient variables: `base` coordinates on the base followed by `fibre` linear fibre coordinates.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct VarSpec {
    pub base: usize,
    pub fibre: usize,
}

impl VarSpec {
    pub fn new(base: usize, fibre: usize) -> Self {
        VarSpec { base, fibre }
    }

    pub fn nvars(&self) -> usize {
        self.base + self.fibre
    }

    pub fn is_fibre(&self, v: usize) -> bool {
        v >= self.base
    }

    /// Ambient index of base coordinate `a` (0-based).
    pub fn x(&self, a: usize) -> usize {
        assert!(a < self.base);
        a
    }

    /// Ambient index of fibre coordinate `j` (0-based).
    pub fn xi(&self, j: usize) -> usize {
        assert!(j < self.fibre);
        self.base + j
    }

    pub fn var_name(&self, v: usize) -> String {
        if v < self.base {
            format!("x{}", v + 1)
        } else {
            format!("xi{}", v - self.base + 1)
        }
    }
}

/// Exponent vector over the ambient variables. Also used as a derivative multi-index.
///
/// Ordered degree-lexicographically: lower total degree first, then larger exponents of
/// earlier variables first.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Monomial(Vec<u32>);

/// A derivative multi-index `∂^α`.
pub type MultiIndex = Monomial;

impl Monomial {
    pub fn one(n: usize) -> Self {
        Monomial(vec![0; n])
    }

    pub fn unit(n: usize, v: usize) -> Self {
        let mut e = vec![0; n];
        e[v] = 1;
        Monomial(e)
    }

    pub fn from_exps(e: Vec<u32>) -> Self {
        Monomial(e)
    }

    pub fn exps(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn fibre_degree(&self, spec: VarSpec) -> u32 {
        self.0[spec.base..].iter().sum()
    }

    pub fn base_degree(&self, spec: VarSpec) -> u32 {
        self.0[..spec.base].iter().sum()
    }

    pub fn get(&self, v: usize) -> u32 {
        self.0[v]
    }

    pub fn add(&self, o: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }

    /// `self - o` when `o` divides `self`.
    pub fn checked_sub(&self, o: &Monomial) -> Option<Monomial> {
        let mut out = Vec::with_capacity(self.0.len());
        for (a, b) in self.0.iter().zip(&o.0) {
            if b > a {
                return None;
            }
            out.push(a - b);
        }
        Some(Monomial(out))
    }

    pub fn divides(&self, o: &Monomial) -> bool {
        self.0.iter().zip(&o.0).all(|(a, b)| a <= b)
    }

    pub fn with(&self, v: usize, e: u32) -> Monomial {
        let mut m = self.clone();
        m.0[v] = e;
        m
    }

    pub fn bump(&self, v: usize) -> Monomial {
        let mut m = self.clone();
        m.0[v] += 1;
        m
    }

    /// Product of componentwise binomials `Π C(self_v, sub_v)`.
    pub fn binomial(&self, sub: &Monomial) -> BigInt {
        let mut acc = BigInt::one();
        for (&n, &k) in self.0.iter().zip(&sub.0) {
            acc *= binomial(n, k);
        }
        acc
    }

    /// `Π self_v!`.
    pub fn factorial(&self) -> BigInt {
        let mut acc = BigInt::one();
        for &e in &self.0 {
            acc *= factorial(e);
        }
        acc
    }

    /// Coefficient `μ!/(μ-α)!` of `∂^α x^μ`, or `None` when the derivative vanishes.
    pub fn falling(&self, alpha: &Monomial) -> Option<(BigInt, Monomial)> {
        let rest = self.checked_sub(alpha)?;
        let mut acc = BigInt::one();
        for (&n, &k) in self.0.iter().zip(&alpha.0) {
            for t in 0..k {
                acc *= BigInt::from(n - t);
            }
        }
        Some((acc, rest))
    }

    /// All `β ≤ self` componentwise, in a fixed order.
    pub fn divisors(&self) -> Vec<Monomial> {
        let mut out = vec![Vec::with_capacity(self.0.len())];
        for &e in &self.0 {
            let mut next = Vec::with_capacity(out.len() * (e as usize + 1));
            for prefix in &out {
                for k in 0..=e {
                    let mut p = prefix.clone();
                    p.push(k);
                    next.push(p);
                }
            }
            out = next;
        }
        out.into_iter().map(Monomial).collect()
    }

    /// All ordered decompositions `self = γ_0 + … + γ_{k-1}` with their multinomial weight.
    pub fn compositions(&self, k: usize) -> Vec<(Vec<Monomial>, BigInt)> {
        let n = self.0.len();
        if k == 0 {
            return if self.is_one() { vec![(vec![], BigInt::one())] } else { vec![] };
        }
        let mut out: Vec<(Vec<Vec<u32>>, BigInt)> = vec![(vec![vec![0; n]; k], BigInt::one())];
        for v in 0..n {
            let e = self.0[v];
            if e == 0 {
                continue;
            }
            let splits = weak_compositions(e, k);
            let mut next = Vec::with_capacity(out.len() * splits.len());
            for (parts, w) in &out {
                for s in &splits {
                    let mut p = parts.clone();
                    let mut weight = w * factorial(e);
                    for (j, &c) in s.iter().enumerate() {
                        p[j][v] = c;
                        weight /= factorial(c);
                    }
                    next.push((p, weight));
                }
            }
            out = next;
        }
        out.into_iter().map(|(parts, w)| (parts.into_iter().map(Monomial).collect(), w)).collect()
    }
}

fn weak_compositions(e: u32, k: usize) -> Vec<Vec<u32>> {
    if k == 1 {
        return vec![vec![e]];
    }
    let mut out = Vec::new();
    for first in 0..=e {
        for mut rest in weak_compositions(e - first, k - 1) {
            let mut v = Vec::with_capacity(k);
            v.push(first);
            v.append(&mut rest);
            out.push(v);
        }
    }
    out
}

pub fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

pub fn binomial(n: u32, k: u32) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    factorial(n) / (factorial(k) * factorial(n - k))
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse polynomial with Gaussian-rational coefficients in canonical form.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Poly {
    spec: VarSpec,
    terms: BTreeMap<Monomial, Scalar>,
}

/// Fibre-degree classification of a nonzero polynomial.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum EulerDegree {
    Homogeneous(i64),
    Inhomogeneous,
}

impl Poly {
    pub fn zero(spec: VarSpec) -> Self {
        Poly { spec, terms: BTreeMap::new() }
    }

    pub fn constant(spec: VarSpec, c: Scalar) -> Self {
        Poly::term(spec, Monomial::one(spec.nvars()), c)
    }

    pub fn one(spec: VarSpec) -> Self {
        Poly::constant(spec, Scalar::one())
    }

    pub fn var(spec: VarSpec, v: usize) -> Self {
        Poly::term(spec, Monomial::unit(spec.nvars(), v), Scalar::one())
    }

    pub fn x(spec: VarSpec, a: usize) -> Self {
        Poly::var(spec, spec.x(a))
    }

    pub fn xi(spec: VarSpec, j: usize) -> Self {
        Poly::var(spec, spec.xi(j))
    }

    pub fn term(spec: VarSpec, m: Monomial, c: Scalar) -> Self {
        assert_eq!(m.len(), spec.nvars(), "monomial length does not match ambient");
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Poly { spec, terms }
    }

    pub fn spec(&self) -> VarSpec {
        self.spec
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Scalar)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> Scalar {
        self.terms.get(m).cloned().unwrap_or_else(Scalar::zero)
    }

    /// The constant term.
    pub fn constant_term(&self) -> Scalar {
        self.coeff(&Monomial::one(self.spec.nvars()))
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.is_one())
    }

    pub fn add_term(&mut self, m: Monomial, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(e) => {
                *e += c;
                if e.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c.clone());
            }
        }
    }

    pub fn add_assign(&mut self, o: &Poly) {
        self.check(o).expect("ambient mismatch");
        for (m, c) in &o.terms {
            self.add_term(m.clone(), c);
        }
    }

    pub fn add_scaled(&mut self, o: &Poly, s: &Scalar) {
        if s.is_zero() {
            return;
        }
        for (m, c) in &o.terms {
            self.add_term(m.clone(), &(c * s));
        }
    }

    fn check(&self, o: &Poly) -> Result<()> {
        if self.spec != o.spec {
            return Err(Error::Structure(format!("ambient mismatch: {:?} vs {:?}", self.spec, o.spec)));
        }
        Ok(())
    }

    /// Exact product; errors on ambient mismatch.
    pub fn try_mul(&self, o: &Poly) -> Result<Poly> {
        self.check(o)?;
        let mut out = Poly::zero(self.spec);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                out.add_term(m1.add(m2), &(c1 * c2));
            }
        }
        Ok(out)
    }

    pub fn scale(&self, s: &Scalar) -> Poly {
        if s.is_zero() {
            return Poly::zero(self.spec);
        }
        Poly { spec: self.spec, terms: self.terms.iter().map(|(m, c)| (m.clone(), c * s)).collect() }
    }

    pub fn mul_monomial(&self, m: &Monomial, s: &Scalar) -> Poly {
        let mut out = Poly::zero(self.spec);
        for (m1, c1) in &self.terms {
            out.add_term(m1.add(m), &(c1 * s));
        }
        out
    }

    pub fn pow(&self, k: u32) -> Poly {
        let mut acc = Poly::one(self.spec);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// `∂/∂v`.
    pub fn partial(&self, v: usize) -> Poly {
        self.partial_multi(&Monomial::unit(self.spec.nvars(), v))
    }

    /// Iterated partial derivative `∂^α`.
    pub fn partial_multi(&self, alpha: &MultiIndex) -> Poly {
        if alpha.is_one() {
            return self.clone();
        }
        let mut out = Poly::zero(self.spec);
        for (m, c) in &self.terms {
            if let Some((f, rest)) = m.falling(alpha) {
                out.add_term(rest, &(c * &Scalar::from_bigint(f)));
            }
        }
        out
    }

    /// Fibre degree if every term has the same one. Zero input is an error.
    pub fn euler_degree(&self) -> Result<EulerDegree> {
        let mut it = self.terms.keys().map(|m| m.fibre_degree(self.spec));
        let first = it.next().ok_or(Error::ZeroDegree)?;
        if it.all(|d| d == first) {
            Ok(EulerDegree::Homogeneous(first as i64))
        } else {
            Ok(EulerDegree::Inhomogeneous)
        }
    }

    /// `L_E P = Σ ξ_j ∂_{ξ_j} P`.
    pub fn euler(&self) -> Poly {
        let mut out = Poly::zero(self.spec);
        for (m, c) in &self.terms {
            let k = m.fibre_degree(self.spec);
            out.add_term(m.clone(), &(c * &Scalar::from_int(k as i64)));
        }
        out
    }

    pub fn max_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.degree()).max().unwrap_or(0)
    }

    pub fn max_base_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.base_degree(self.spec)).max().unwrap_or(0)
    }

    pub fn max_fibre_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.fibre_degree(self.spec)).max().unwrap_or(0)
    }

    /// Sets every variable flagged in `mask` to zero.
    pub fn restrict_zero(&self, mask: &[bool]) -> Poly {
        let mut out = Poly::zero(self.spec);
        for (m, c) in &self.terms {
            if m.exps().iter().zip(mask).all(|(&e, &z)| e == 0 || !z) {
                out.add_term(m.clone(), c);
            }
        }
        out
    }

    /// True if no term involves a variable flagged in `mask`.
    pub fn avoids(&self, mask: &[bool]) -> bool {
        self.terms.keys().all(|m| m.exps().iter().zip(mask).all(|(&e, &z)| e == 0 || !z))
    }

    /// Re-expresses the polynomial in another ambient; `map[v]` is the new index of old
    /// variable `v`, or `None` if the variable must not occur.
    pub fn reindex(&self, target: VarSpec, map: &[Option<usize>]) -> Result<Poly> {
        let mut out = Poly::zero(target);
        for (m, c) in &self.terms {
            let mut e = vec![0; target.nvars()];
            for (v, &k) in m.exps().iter().enumerate() {
                if k == 0 {
                    continue;
                }
                match map[v] {
                    Some(w) => e[w] += k,
                    None => {
                        return Err(Error::Structure(format!(
                            "variable {} cannot be carried over",
                            self.spec.var_name(v)
                        )))
                    }
                }
            }
            out.add_term(Monomial(e), c);
        }
        Ok(out)
    }

    /// Substitutes `value` for the variable `v`.
    pub fn substitute(&self, v: usize, value: &Poly) -> Poly {
        let mut out = Poly::zero(self.spec);
        for (m, c) in &self.terms {
            let k = m.get(v);
            let rest = Poly::term(self.spec, m.with(v, 0), c.clone());
            out.add_assign(&(&rest * &value.pow(k)));
        }
        out
    }

    /// Renders with custom variable names.
    pub fn render_with(&self, names: &dyn Fn(usize) -> String) -> String {
        let pieces: Vec<String> = self.terms.iter().map(|(m, c)| render_term(m, c, names)).collect();
        join_signed(&pieces)
    }
}

pub(crate) fn render_monomial(m: &Monomial, names: &dyn Fn(usize) -> String) -> String {
    let mut parts = Vec::new();
    for (v, &e) in m.exps().iter().enumerate() {
        match e {
            0 => {}
            1 => parts.push(names(v)),
            _ => parts.push(format!("{}^{}", names(v), e)),
        }
    }
    parts.join("*")
}

pub(crate) fn render_term(m: &Monomial, c: &Scalar, names: &dyn Fn(usize) -> String) -> String {
    render_scaled(c, &render_monomial(m, names))
}

/// Renders `c * mono`; an empty `mono` stands for the constant monomial.
pub(crate) fn render_scaled(c: &Scalar, mono: &str) -> String {
    if mono.is_empty() {
        return c.to_string();
    }
    if c.is_one() {
        return mono.to_string();
    }
    if (-c).is_one() {
        return format!("-{mono}");
    }
    let compound = !c.re().is_zero() && !c.im().is_zero();
    if compound {
        if c.renders_negative() {
            format!("-({})*{}", -c, mono)
        } else {
            format!("({c})*{mono}")
        }
    } else {
        format!("{c}*{mono}")
    }
}

pub(crate) fn join_signed(pieces: &[String]) -> String {
    if pieces.is_empty() {
        return "0".to_string();
    }
    let mut s = String::new();
    for (idx, t) in pieces.iter().enumerate() {
        if idx == 0 {
            s.push_str(t);
        } else if let Some(rest) = t.strip_prefix('-') {
            s.push_str(" - ");
            s.push_str(rest);
        } else {
            s.push_str(" + ");
            s.push_str(t);
        }
    }
    s
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let spec = self.spec;
        write!(f, "{}", self.render_with(&|v| spec.var_name(v)))
    }
}

impl<'a> Add<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn add(self, o: &Poly) -> Poly {
        let mut out = self.clone();
        out.add_assign(o);
        out
    }
}

impl<'a> Sub<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn sub(self, o: &Poly) -> Poly {
        let mut out = self.clone();
        out.add_scaled(o, &Scalar::from_int(-1));
        out
    }
}

impl<'a> Mul<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn mul(self, o: &Poly) -> Poly {
        self.try_mul(o).expect("ambient mismatch")
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(&Scalar::from_int(-1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sp() -> VarSpec {
        VarSpec::new(2, 2)
    }

    #[test]
    fn monomial_product() {
        let p = &Poly::x(sp(), 0) * &Poly::xi(sp(), 0);
        assert_eq!(p.to_string(), "x1*xi1");
    }

    #[test]
    fn binomial_square_in_deglex_order() {
        let s = &Poly::x(sp(), 0) + &Poly::xi(sp(), 0);
        assert_eq!((&s * &s).to_string(), "x1^2 + 2*x1*xi1 + xi1^2");
    }

    #[test]
    fn partial_derivatives() {
        let sq = Poly::xi(sp(), 0).pow(2);
        assert_eq!(sq.partial(sp().xi(0)).to_string(), "2*xi1");
        let p = &Poly::x(sp(), 0) * &Poly::xi(sp(), 0);
        let a = Monomial::unit(4, 0).add(&Monomial::unit(4, 2));
        assert_eq!(p.partial_multi(&a).to_string(), "1");
        assert!(p.partial(sp().xi(1)).is_zero());
    }

    #[test]
    fn euler_degrees() {
        let s = sp();
        assert_eq!((&Poly::xi(s, 0) * &Poly::xi(s, 1)).euler_degree().unwrap(), EulerDegree::Homogeneous(2));
        assert_eq!((&Poly::x(s, 0) * &Poly::x(s, 1)).euler_degree().unwrap(), EulerDegree::Homogeneous(0));
        assert_eq!((&Poly::x(s, 0) + &Poly::xi(s, 0)).euler_degree().unwrap(), EulerDegree::Inhomogeneous);
        assert!(Poly::zero(s).euler_degree().is_err());
    }

    #[test]
    fn ambient_mismatch_is_an_error() {
        let a = Poly::one(VarSpec::new(1, 0));
        let b = Poly::one(VarSpec::new(0, 1));
        assert!(a.try_mul(&b).is_err());
    }

    #[test]
    fn compositions_carry_multinomials() {
        let a = Monomial::from_exps(vec![2]);
        let comps = a.compositions(2);
        let weights: Vec<String> = comps.iter().map(|(_, w)| w.to_string()).collect();
        assert_eq!(weights, vec!["1", "2", "1"]);
        assert!(Monomial::from_exps(vec![1]).compositions(0).is_empty());
    }
}
