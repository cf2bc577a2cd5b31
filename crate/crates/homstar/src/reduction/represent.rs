//! Deformation of `C∞(A*)[[ħ]]` acting on `C∞(E_N)[[ħ]]`.
//!
//! A bimodule `n`-cochain `D(F_1..F_n)(H)` is stored as a total cochain of arity `n + 1`
//! whose coefficients and last argument avoid the ideal generators; evaluation restricts
//! to `E_N` at the end. Composition and the bimodule differential then reduce to the
//! ordinary cochain operations followed by [`restrict`].

use std::collections::{BTreeMap, BTreeSet};

use crate::algebroid::{AForm, AlgebroidPresentation};
use crate::classes::characteristic_class;
use crate::cochain::{Cochain, Derivs};
use crate::error::{Error, Result};
use crate::hbar::HbarPoly;
use crate::linalg::solve_sparse;
use crate::poly::{Monomial, Poly};
use crate::scalar::Scalar;
use crate::star::{monomials_up_to, StarSeries};

use super::{coisotropic_check, Submanifold};

/// `ρ = Σ ħ^r ρ_r` with `ρ_0(F)(H) = I*F · H`; `ops[r-1] = ρ_r`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Representation {
    pub sub: Submanifold,
    pub ops: Vec<Cochain>,
}

/// Result of [`solve_representation`].
#[derive(Clone, Debug)]
pub enum RepresentOutcome {
    Represented(Representation),
    /// Order 1 has no solution; `{first, second}` leaves `𝒥`.
    NotCoisotropic {
        first: Poly,
        second: Poly,
        bracket: Poly,
    },
    /// Order 2 has no solution for any first-order choice. `form` lives on `span(e_k)`
    /// over `C` and `class` are its coordinates in `H²`.
    Obstructed {
        order: usize,
        form: AForm,
        class: Vec<Scalar>,
    },
}

fn rho0(sub: &Submanifold) -> Cochain {
    Cochain::mu0(sub.spec())
}

/// Drops terms that differentiate the last argument in an ideal direction and restricts
/// the coefficients to `E_N`.
fn restrict(sub: &Submanifold, c: &Cochain) -> Cochain {
    let mut out = Cochain::zero(c.spec(), c.arity());
    for (d, p) in c.terms() {
        if sub.monomial_in_ideal(d.last().expect("arity ≥ 1")) {
            continue;
        }
        out.add_term(d.clone(), &sub.restrict(p));
    }
    out
}

/// `(∂D)(F_0..F_n)(H) = I*F_0·D(F_1..)(H) + Σ (−1)^{i+1} D(..F_iF_{i+1}..)(H)
/// + (−1)^{n+1} D(F_0..F_{n−1})(I*F_n·H)`.
fn bimodule_d(sub: &Submanifold, c: &Cochain) -> Result<Cochain> {
    let spec = c.spec();
    let n = c.arity() - 1;
    let mu = Cochain::mu0(spec);
    let mut out = Cochain::zero(spec, c.arity() + 1);
    let zero = Monomial::one(spec.nvars());
    for (d, p) in c.terms() {
        let mut nd = vec![zero.clone()];
        nd.extend(d.iter().cloned());
        out.add_term(nd, p);
    }
    for i in 0..=n {
        let t = c.compose_at(i, &mu)?;
        let s = if i % 2 == 0 { Scalar::from_int(-1) } else { Scalar::one() };
        out.add_assign_scaled(&t, &s)?;
    }
    Ok(restrict(sub, &out))
}

/// `D_{n+1} = Σ_{i≤n} ρ_i ∘ C_{n+1−i} − Σ_{1≤i≤n} ρ_i(F) ∘ ρ_{n+1−i}(G)`.
fn defect(sub: &Submanifold, star: &StarSeries, ops: &[Cochain], r: usize) -> Result<Cochain> {
    let spec = star.spec();
    let rho = |i: usize| if i == 0 { rho0(sub) } else { ops[i - 1].clone() };
    let mut out = Cochain::zero(spec, 3);
    for i in 0..r {
        out = out.add(&rho(i).compose_at(0, &star.c(r - i))?)?;
    }
    for i in 1..r {
        out = out.sub(&rho(i).compose_at(1, &rho(r - i))?)?;
    }
    Ok(restrict(sub, &out))
}

/// `D(y, y')(1) − D(y', y)(1)` restricted to `E_N`.
fn antisymmetric_value(sub: &Submanifold, d: &Cochain, y: &Poly, z: &Poly) -> Result<Poly> {
    let one = Poly::one(sub.spec());
    let a = d.apply(&[y.clone(), z.clone(), one.clone()])?;
    let b = d.apply(&[z.clone(), y.clone(), one])?;
    Ok(sub.restrict(&(&a - &b)))
}

type Key = (Derivs, Monomial);

fn derivs_total(d: &Derivs, n: usize) -> Monomial {
    d.iter().fold(Monomial::one(n), |acc, a| acc.add(a))
}

/// Candidate columns `μ ∂^α ⊗ ∂^β` for every block `(α + β, μ)` met by `keys`.
fn candidates(sub: &Submanifold, keys: &BTreeSet<(Monomial, Monomial)>) -> Vec<Cochain> {
    let spec = sub.spec();
    let mut out = Vec::new();
    for (total, mu) in keys {
        for alpha in total.divisors() {
            if alpha.is_one() {
                continue;
            }
            let beta = total.checked_sub(&alpha).expect("divisor");
            if sub.monomial_in_ideal(&beta) {
                continue;
            }
            let mut c = Cochain::zero(spec, 2);
            c.add_term(vec![alpha, beta], &Poly::term(spec, mu.clone(), Scalar::one()));
            out.push(c);
        }
    }
    out
}

fn blocks_of(entries: &BTreeMap<Key, Scalar>, n: usize) -> BTreeSet<(Monomial, Monomial)> {
    entries.keys().map(|(d, m)| (derivs_total(d, n), m.clone())).collect()
}

/// Solves `∂ρ = rhs − Σ a_j extra_j` jointly for `ρ` and the `a_j`.
fn solve_with_extras(sub: &Submanifold, rhs: &Cochain, extras: &[Cochain]) -> Result<Option<(Cochain, Vec<Scalar>)>> {
    let n = sub.spec().nvars();
    let target = rhs.entries();
    let extra_entries: Vec<BTreeMap<Key, Scalar>> =
        extras.iter().map(|e| e.scale(&Scalar::from_int(-1)).entries()).collect();
    let mut blocks = blocks_of(&target, n);
    for e in &extra_entries {
        blocks.extend(blocks_of(e, n));
    }
    let cands = candidates(sub, &blocks);
    let mut cols = Vec::with_capacity(cands.len() + extras.len());
    for c in &cands {
        cols.push(bimodule_d(sub, c)?.entries());
    }
    cols.extend(extra_entries);
    match solve_sparse(&cols, &target) {
        Ok(x) => {
            let mut rho = Cochain::zero(sub.spec(), 2);
            for (c, v) in cands.iter().zip(&x) {
                if !v.is_zero() {
                    rho.add_assign_scaled(c, v)?;
                }
            }
            Ok(Some((rho, x[cands.len()..].to_vec())))
        }
        Err(_) => Ok(None),
    }
}

/// Vertical shifts `I*(x^μ ∂_{ξ_i} F) · H` used to re-choose `ρ_1` at order 2.
fn first_order_shifts(sub: &Submanifold, cap: u32) -> Vec<Cochain> {
    let spec = sub.spec();
    let base_keep: Vec<usize> = (0..spec.base).filter(|a| !sub.x_out().contains(a)).collect();
    let mut monos = vec![Monomial::one(spec.nvars())];
    for _ in 0..cap {
        let mut next = monos.clone();
        for m in &monos {
            for &a in &base_keep {
                next.push(m.bump(spec.x(a)));
            }
        }
        next.sort();
        next.dedup();
        monos = next;
    }
    let mut out = Vec::new();
    for i in 0..spec.fibre {
        for m in &monos {
            let mut c = Cochain::zero(spec, 2);
            c.add_term(
                vec![Monomial::unit(spec.nvars(), spec.xi(i)), Monomial::one(spec.nvars())],
                &Poly::term(spec, m.clone(), Scalar::one()),
            );
            out.push(c);
        }
    }
    out
}

fn obstruction_form(sub: &Submanifold, a_sub: &AlgebroidPresentation, d: &Cochain) -> Result<AForm> {
    let spec = sub.spec();
    let map = sub.sub_map();
    let mut form = AForm::zero(a_sub.spec(), 2);
    let ks = sub.fibre_k();
    for (p, &k) in ks.iter().enumerate() {
        for (q, &l) in ks.iter().enumerate().skip(p + 1) {
            let v = antisymmetric_value(sub, d, &Poly::xi(spec, k), &Poly::xi(spec, l))?;
            if v.max_fibre_degree() > 0 {
                return Err(Error::TheoremViolation(format!("order-2 obstruction {v} is not basic")));
            }
            form.add_component(&[p, q], &v.reindex(a_sub.spec(), &map)?);
        }
    }
    Ok(form)
}

fn effective_cap(a: &AlgebroidPresentation, f: &AForm, cap: Option<u32>) -> Option<u32> {
    (a.base() > 0).then(|| cap.unwrap_or(0).max(f.max_base_degree()))
}

/// Builds `ρ` order by order. Order 1 decides coisotropy, order 2 may re-choose `ρ_1` by
/// a vertical shift, and the remaining orders are unobstructed.
pub fn solve_representation(star: &StarSeries, sub: &Submanifold, cap: Option<u32>) -> Result<RepresentOutcome> {
    if star.presentation() != sub.total() {
        return Err(Error::Structure("star product and submanifold use different presentations".into()));
    }
    let k = star.order();
    let mut ops: Vec<Cochain> = Vec::with_capacity(k);
    for r in 1..=k {
        let d = defect(sub, star, &ops, r)?;
        if let Some((rho, _)) = solve_with_extras(sub, &d, &[])? {
            ops.push(rho);
            continue;
        }
        match r {
            1 => {
                let gens = sub.generators();
                for (n, y) in gens.iter().enumerate() {
                    for z in &gens[n + 1..] {
                        let v = antisymmetric_value(sub, &d, y, z)?;
                        if !v.is_zero() {
                            let bracket = sub.total().kks_bracket(y, z);
                            return Ok(RepresentOutcome::NotCoisotropic {
                                first: y.clone(),
                                second: z.clone(),
                                bracket,
                            });
                        }
                    }
                }
                return Err(Error::Infeasible {
                    what: "order-1 representation with vanishing obstruction".into(),
                    residual: d.to_string(),
                });
            }
            2 => {
                let shift_cap = cap.unwrap_or(0).max(d.max_coeff_degree()) + 1;
                let shifts =
                    if sub.spec().base == 0 { first_order_shifts(sub, 0) } else { first_order_shifts(sub, shift_cap) };
                let rho1 = ops[0].clone();
                let mut effects = Vec::with_capacity(shifts.len());
                for v in &shifts {
                    let e = v.compose_at(0, &star.c(1))?.sub(&rho1.compose_at(1, v)?)?.sub(&v.compose_at(1, &rho1)?)?;
                    effects.push(restrict(sub, &e));
                }
                if let Some((_, a)) = solve_with_extras(sub, &d, &effects)? {
                    let mut v = Cochain::zero(sub.spec(), 2);
                    for (s, c) in shifts.iter().zip(&a) {
                        if !c.is_zero() {
                            v.add_assign_scaled(s, c)?;
                        }
                    }
                    ops[0] = rho1.add(&v)?;
                    let d2 = defect(sub, star, &ops, 2)?;
                    let (rho2, _) = solve_with_extras(sub, &d2, &[])?
                        .ok_or_else(|| Error::TheoremViolation("order 2 unsolvable after the vertical shift".into()))?;
                    ops.push(rho2);
                    continue;
                }
                let a_sub = sub.sub_presentation()?;
                let form = obstruction_form(sub, &a_sub, &d)?;
                let h = a_sub.cohomology(2, effective_cap(&a_sub, &form, cap))?;
                let class = h.coordinates(&form)?;
                if class.iter().all(Scalar::is_zero) {
                    return Err(Error::Infeasible {
                        what: "order-2 representation with exact obstruction".into(),
                        residual: form.to_string(),
                    });
                }
                return Ok(RepresentOutcome::Obstructed { order: 2, form, class });
            }
            _ => {
                return Err(Error::TheoremViolation(format!(
                    "representation obstructed at order {r} beyond the second"
                )))
            }
        }
    }
    Ok(RepresentOutcome::Represented(Representation { sub: sub.clone(), ops }))
}

impl Representation {
    pub fn order(&self) -> usize {
        self.ops.len()
    }

    /// `ρ(F)(H)` for series `F` on `A*` and `H` on `E_N`, truncated at the order.
    pub fn act(&self, f: &HbarPoly, h: &HbarPoly) -> Result<HbarPoly> {
        let k = self.order();
        let spec = self.sub.spec();
        let mut out = HbarPoly::zero(spec, k);
        for (&j, fj) in f.powers() {
            for (&l, hl) in h.powers() {
                for i in 0..=k {
                    if i + j + l > k {
                        break;
                    }
                    let op = if i == 0 { rho0(&self.sub) } else { self.ops[i - 1].clone() };
                    let v = op.apply(&[fj.clone(), hl.clone()])?;
                    out.add_at(i + j + l, &self.sub.restrict(&v));
                }
            }
        }
        Ok(out)
    }
}

/// Checks `ρ(F ⋆ G) = ρ(F) ∘ ρ(G)` on monomials `F, G` and test functions `H` of degree at
/// most `deg`.
pub fn verify_representation(star: &StarSeries, rep: &Representation, deg: u32) -> Result<()> {
    let spec = star.spec();
    let k = star.order().min(rep.order());
    let mons = monomials_up_to(spec, deg);
    let tests: Vec<&Poly> = mons.iter().filter(|p| rep.sub.restrict(p) == **p).collect();
    for f in &mons {
        for g in &mons {
            let fg = star.product(f, g)?.truncate(k);
            for h in &tests {
                let hs = HbarPoly::from_poly((*h).clone(), k);
                let lhs = rep.act(&fg, &hs)?;
                let inner = rep.act(&HbarPoly::from_poly(g.clone(), k), &hs)?;
                let rhs = rep.act(&HbarPoly::from_poly(f.clone(), k), &inner)?;
                if lhs != rhs {
                    return Err(Error::TheoremViolation(format!(
                        "representation fails on ({f}, {g}; {h}): {lhs} vs {rhs}"
                    )));
                }
            }
        }
    }
    Ok(())
}

/// `I*Φ(⋆)` on `span(e_k)` over `C`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PullbackReport {
    pub coisotropic: bool,
    pub form: AForm,
    pub coordinates: Vec<Scalar>,
}

impl PullbackReport {
    pub fn is_zero(&self) -> bool {
        self.coordinates.iter().all(Scalar::is_zero)
    }
}

/// Pulls the characteristic class back to the subalgebroid annihilated by `E_N`.
pub fn pullback_class(star: &StarSeries, sub: &Submanifold, cap: Option<u32>) -> Result<PullbackReport> {
    let coisotropic = coisotropic_check(sub).is_coisotropic();
    if !coisotropic {
        return Err(Error::Precondition("submanifold is not coisotropic".into()));
    }
    let phi = characteristic_class(star, cap)?;
    let form = sub.pull_back_form(&phi.representative)?;
    let a_sub = sub.sub_presentation()?;
    let h = a_sub.cohomology(2, effective_cap(&a_sub, &form, cap))?;
    let coordinates = h.coordinates(&form)?;
    Ok(PullbackReport { coisotropic, form, coordinates })
}
