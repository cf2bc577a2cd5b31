//! Polynomials with a formal parameter `h`, truncated at a fixed order.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::poly::{join_signed, render_monomial, render_scaled, Poly, VarSpec};
use crate::scalar::Scalar;

/// `Σ_{k ≤ order} h^k P_k`. Products drop every power above `order`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct HbarPoly {
    spec: VarSpec,
    order: usize,
    coeffs: BTreeMap<usize, Poly>,
}

impl HbarPoly {
    pub fn zero(spec: VarSpec, order: usize) -> Self {
        HbarPoly { spec, order, coeffs: BTreeMap::new() }
    }

    pub fn from_poly(p: Poly, order: usize) -> Self {
        let mut out = HbarPoly::zero(p.spec(), order);
        out.add_at(0, &p);
        out
    }

    pub fn spec(&self) -> VarSpec {
        self.spec
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient of `h^k`.
    pub fn at(&self, k: usize) -> Poly {
        self.coeffs.get(&k).cloned().unwrap_or_else(|| Poly::zero(self.spec))
    }

    pub fn powers(&self) -> impl Iterator<Item = (&usize, &Poly)> {
        self.coeffs.iter()
    }

    /// Highest power present, if any.
    pub fn top_power(&self) -> Option<usize> {
        self.coeffs.keys().next_back().copied()
    }

    /// Adds `h^k p`, silently dropping it beyond the truncation order.
    pub fn add_at(&mut self, k: usize, p: &Poly) {
        if k > self.order || p.is_zero() {
            return;
        }
        let e = self.coeffs.entry(k).or_insert_with(|| Poly::zero(p.spec()));
        e.add_assign(p);
        if e.is_zero() {
            self.coeffs.remove(&k);
        }
    }

    pub fn add(&self, o: &HbarPoly) -> Result<HbarPoly> {
        self.check(o)?;
        let mut out = HbarPoly::zero(self.spec, self.order.min(o.order));
        for (k, p) in self.coeffs.iter().chain(o.coeffs.iter()) {
            out.add_at(*k, p);
        }
        Ok(out)
    }

    pub fn sub(&self, o: &HbarPoly) -> Result<HbarPoly> {
        self.add(&o.scale(&Scalar::from_int(-1)))
    }

    pub fn scale(&self, s: &Scalar) -> HbarPoly {
        let mut out = HbarPoly::zero(self.spec, self.order);
        for (k, p) in &self.coeffs {
            out.add_at(*k, &p.scale(s));
        }
        out
    }

    fn check(&self, o: &HbarPoly) -> Result<()> {
        if self.spec != o.spec {
            return Err(Error::Structure(format!("ambient mismatch: {:?} vs {:?}", self.spec, o.spec)));
        }
        Ok(())
    }

    /// Exact product truncated at the smaller of the two orders.
    pub fn mul(&self, o: &HbarPoly) -> Result<HbarPoly> {
        self.check(o)?;
        let order = self.order.min(o.order);
        let mut out = HbarPoly::zero(self.spec, order);
        for (a, p) in &self.coeffs {
            for (b, q) in &o.coeffs {
                if a + b <= order {
                    out.add_at(a + b, &(p * q));
                }
            }
        }
        Ok(out)
    }

    pub fn truncate(&self, order: usize) -> HbarPoly {
        let mut out = HbarPoly::zero(self.spec, order);
        for (k, p) in &self.coeffs {
            out.add_at(*k, p);
        }
        out
    }

    /// Substitutes a Gaussian-rational value for `h`.
    pub fn eval_hbar(&self, value: &Scalar) -> Poly {
        let mut out = Poly::zero(self.spec);
        for (k, p) in &self.coeffs {
            out.add_scaled(p, &value.pow(*k as u32));
        }
        out
    }

    pub fn render_with(&self, names: &dyn Fn(usize) -> String) -> String {
        let mut pieces = Vec::new();
        for (k, p) in &self.coeffs {
            let h = match k {
                0 => String::new(),
                1 => "h".to_string(),
                _ => format!("h^{k}"),
            };
            for (m, c) in p.terms() {
                let mono = render_monomial(m, names);
                let full = match (mono.is_empty(), h.is_empty()) {
                    (_, true) => mono,
                    (true, false) => h.clone(),
                    (false, false) => format!("{mono}*{h}"),
                };
                pieces.push(render_scaled(c, &full));
            }
        }
        join_signed(&pieces)
    }
}

impl fmt::Display for HbarPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let spec = self.spec;
        write!(f, "{}", self.render_with(&|v| spec.var_name(v)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn truncation_drops_high_powers() {
        let spec = VarSpec::new(0, 0);
        let one = Poly::one(spec);
        let mut a = HbarPoly::from_poly(one.clone(), 1);
        a.add_at(1, &one);
        let mut b = HbarPoly::from_poly(one.clone(), 1);
        b.add_at(1, &(-&one));
        let p = a.mul(&b).unwrap();
        assert_eq!(p, HbarPoly::from_poly(one, 1));
        assert_eq!(p.to_string(), "1");
    }

    #[test]
    fn renders_powers_of_h() {
        let spec = VarSpec::new(0, 1);
        let mut a = HbarPoly::zero(spec, 3);
        a.add_at(0, &Poly::xi(spec, 0));
        a.add_at(1, &Poly::constant(spec, &Scalar::i() * &Scalar::ratio(1, 2)));
        a.add_at(2, &Poly::xi(spec, 0).scale(&Scalar::from_int(-2)));
        assert_eq!(a.to_string(), "xi1 + 1/2*i*h - 2*xi1*h^2");
    }
}
