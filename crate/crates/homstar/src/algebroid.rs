//! Polynomial Lie algebroid presentations on trivial bundles over affine space.
//!
//! Sections are coordinate vectors of polynomials in `x`; the dual bundle carries fibre
//! coordinates `ξ_i = J(e_i)`. The linear Poisson structure is fixed by
//! `{x_a, ξ_i} = ρ_i^a` and `{ξ_i, ξ_j} = −c_ij^k ξ_k`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use crate::cochain::Cochain;
use crate::error::{Error, Result};
use crate::hkr::{sort_with_sign, subsets, Multivector};
use crate::linalg::{solve, Matrix, Solution};
use crate::poly::{Monomial, Poly, VarSpec};
use crate::scalar::Scalar;

/// Anchor `ρ_i^a`, structure functions `c_ij^k` and optional Christoffel symbols, all
/// polynomial in the base coordinates.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AlgebroidPresentation {
    spec: VarSpec,
    anchor: Vec<Vec<Poly>>,
    structure: Vec<Vec<Vec<Poly>>>,
    connection: Option<ConnectionData>,
    names: Vec<String>,
}

/// Christoffel symbols `∇_{e_i} e_j = Γ_ij^k e_k`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ConnectionData {
    pub gamma: Vec<Vec<Vec<Poly>>>,
}

impl ConnectionData {
    pub fn zero(spec: VarSpec) -> Self {
        let m = spec.fibre;
        ConnectionData { gamma: vec![vec![vec![Poly::zero(spec); m]; m]; m] }
    }
}

/// Outcome of [`AlgebroidPresentation::validate`]; an empty failure list means valid.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ValidationReport {
    pub failures: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.failures.is_empty()
    }
}

/// A section: coordinate polynomials with respect to the basis `e_1..e_m`.
pub type Section = Vec<Poly>;

impl AlgebroidPresentation {
    /// Builds a presentation; `structure[i][j][k] = c_ij^k` must be antisymmetric in
    /// `(i, j)` and everything must be polynomial in `x` alone.
    pub fn new(
        base: usize,
        rank: usize,
        anchor: Vec<Vec<Poly>>,
        structure: Vec<Vec<Vec<Poly>>>,
        names: Option<Vec<String>>,
    ) -> Result<Self> {
        let spec = VarSpec::new(base, rank);
        let names = names.unwrap_or_else(|| (1..=rank).map(|i| format!("e{i}")).collect());
        if anchor.len() != rank || anchor.iter().any(|r| r.len() != base) {
            return Err(Error::Invalid("anchor must be a rank × base array".into()));
        }
        if structure.len() != rank || structure.iter().any(|r| r.len() != rank || r.iter().any(|c| c.len() != rank)) {
            return Err(Error::Invalid("structure functions must be rank³".into()));
        }
        if names.len() != rank {
            return Err(Error::Invalid("one basis name per fibre direction".into()));
        }
        let fibre_mask: Vec<bool> = (0..spec.nvars()).map(|v| spec.is_fibre(v)).collect();
        let all = anchor.iter().flatten().chain(structure.iter().flatten().flatten());
        for p in all {
            if p.spec() != spec {
                return Err(Error::Structure("coefficient on the wrong ambient".into()));
            }
            if !p.avoids(&fibre_mask) {
                return Err(Error::Invalid(format!("coefficient `{p}` depends on fibre variables")));
            }
        }
        for i in 0..rank {
            for j in 0..rank {
                for k in 0..rank {
                    if structure[i][j][k] != -&structure[j][i][k] {
                        return Err(Error::Invalid(format!("c[{}][{}][{}] is not antisymmetric", i + 1, j + 1, k + 1)));
                    }
                }
            }
        }
        Ok(AlgebroidPresentation { spec, anchor, structure, connection: None, names })
    }

    /// A Lie algebra from the nonzero brackets `[e_i, e_j] = Σ coeff e_k`, given as
    /// `(i, j, k, coeff)` with 0-based indices.
    pub fn lie_algebra(rank: usize, brackets: &[(usize, usize, usize, i64)]) -> Self {
        let spec = VarSpec::new(0, rank);
        let mut c = vec![vec![vec![Poly::zero(spec); rank]; rank]; rank];
        for &(i, j, k, v) in brackets {
            let p = Poly::constant(spec, Scalar::from_int(v));
            c[i][j][k].add_assign(&p);
            c[j][i][k].add_assign(&(-&p));
        }
        AlgebroidPresentation::new(0, rank, vec![vec![]; rank], c, None).expect("well formed")
    }

    pub fn abelian(rank: usize) -> Self {
        AlgebroidPresentation::lie_algebra(rank, &[])
    }

    /// Heisenberg algebra: `[e1, e2] = e3`.
    pub fn heisenberg() -> Self {
        AlgebroidPresentation::lie_algebra(3, &[(0, 1, 2, 1)])
    }

    /// `so(3)`: `[e1,e2] = e3`, `[e2,e3] = e1`, `[e3,e1] = e2`.
    pub fn so3() -> Self {
        AlgebroidPresentation::lie_algebra(3, &[(0, 1, 2, 1), (1, 2, 0, 1), (2, 0, 1, 1)])
    }

    /// Affine algebra of the line: `[e1, e2] = e2`.
    pub fn aff1() -> Self {
        AlgebroidPresentation::lie_algebra(2, &[(0, 1, 1, 1)])
    }

    /// Tangent algebroid of `ℝ^d` with `ρ = id`.
    pub fn tangent(d: usize) -> Self {
        let spec = VarSpec::new(d, d);
        let anchor =
            (0..d).map(|i| (0..d).map(|a| if a == i { Poly::one(spec) } else { Poly::zero(spec) }).collect()).collect();
        let c = vec![vec![vec![Poly::zero(spec); d]; d]; d];
        AlgebroidPresentation::new(d, d, anchor, c, None).expect("well formed")
    }

    /// Action algebroid of `ℝ` acting on `ℝ` through the vector field `x ∂_x`.
    pub fn action_line() -> Self {
        let spec = VarSpec::new(1, 1);
        let anchor = vec![vec![Poly::x(spec, 0)]];
        let c = vec![vec![vec![Poly::zero(spec)]]];
        AlgebroidPresentation::new(1, 1, anchor, c, None).expect("well formed")
    }

    /// Built-in presentations by name.
    pub fn preset(name: &str) -> Option<Self> {
        Some(match name {
            "h3" | "heisenberg" => Self::heisenberg(),
            "so3" => Self::so3(),
            "aff1" => Self::aff1(),
            "abelian1" => Self::abelian(1),
            "abelian2" => Self::abelian(2),
            "abelian3" => Self::abelian(3),
            "tangent1" => Self::tangent(1),
            "tangent2" => Self::tangent(2),
            "action-line" => Self::action_line(),
            _ => return None,
        })
    }

    pub fn with_connection(mut self, conn: ConnectionData) -> Result<Self> {
        let m = self.rank();
        if conn.gamma.len() != m || conn.gamma.iter().any(|r| r.len() != m || r.iter().any(|c| c.len() != m)) {
            return Err(Error::Invalid("connection must be rank³".into()));
        }
        self.connection = Some(conn);
        Ok(self)
    }

    pub fn connection(&self) -> Option<&ConnectionData> {
        self.connection.as_ref()
    }

    pub fn spec(&self) -> VarSpec {
        self.spec
    }

    pub fn base(&self) -> usize {
        self.spec.base
    }

    pub fn rank(&self) -> usize {
        self.spec.fibre
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn anchor(&self, i: usize, a: usize) -> &Poly {
        &self.anchor[i][a]
    }

    pub fn c(&self, i: usize, j: usize, k: usize) -> &Poly {
        &self.structure[i][j][k]
    }

    /// `ρ(e_i) f = Σ_a ρ_i^a ∂_a f`.
    pub fn rho_basis(&self, i: usize, f: &Poly) -> Poly {
        let mut out = Poly::zero(self.spec);
        for a in 0..self.base() {
            let r = &self.anchor[i][a];
            if !r.is_zero() {
                out.add_assign(&(r * &f.partial(self.spec.x(a))));
            }
        }
        out
    }

    /// `ρ(s) f`.
    pub fn rho(&self, s: &Section, f: &Poly) -> Poly {
        let mut out = Poly::zero(self.spec);
        for (i, si) in s.iter().enumerate() {
            if !si.is_zero() {
                out.add_assign(&(si * &self.rho_basis(i, f)));
            }
        }
        out
    }

    pub fn basis_section(&self, i: usize) -> Section {
        (0..self.rank()).map(|k| if k == i { Poly::one(self.spec) } else { Poly::zero(self.spec) }).collect()
    }

    /// `[s, t]_A` from the structure functions and the Leibniz rule.
    pub fn bracket(&self, s: &Section, t: &Section) -> Section {
        let m = self.rank();
        let mut out = vec![Poly::zero(self.spec); m];
        for i in 0..m {
            for j in 0..m {
                if s[i].is_zero() || t[j].is_zero() {
                    continue;
                }
                let st = &s[i] * &t[j];
                for (k, o) in out.iter_mut().enumerate() {
                    let c = &self.structure[i][j][k];
                    if !c.is_zero() {
                        o.add_assign(&(&st * c));
                    }
                }
            }
        }
        for k in 0..m {
            out[k].add_assign(&self.rho(s, &t[k]));
            out[k].add_assign(&(-&self.rho(t, &s[k])));
        }
        out
    }

    /// Checks anchor compatibility and the Jacobi identity on basis sections.
    pub fn validate(&self) -> ValidationReport {
        let m = self.rank();
        let mut failures = Vec::new();
        let coords: Vec<Poly> = (0..self.base()).map(|a| Poly::x(self.spec, a)).collect();
        for i in 0..m {
            for j in i + 1..m {
                let (ei, ej) = (self.basis_section(i), self.basis_section(j));
                let br = self.bracket(&ei, &ej);
                for (a, xa) in coords.iter().enumerate() {
                    let lhs = self.rho(&br, xa);
                    let rhs = &self.rho(&ei, &self.rho(&ej, xa)) - &self.rho(&ej, &self.rho(&ei, xa));
                    if lhs != rhs {
                        failures.push(format!(
                            "anchor: rho([e{},e{}]) differs from [rho(e{}),rho(e{})] on x{}",
                            i + 1,
                            j + 1,
                            i + 1,
                            j + 1,
                            a + 1
                        ));
                    }
                }
            }
        }
        for i in 0..m {
            for j in i + 1..m {
                for k in j + 1..m {
                    let (ei, ej, ek) = (self.basis_section(i), self.basis_section(j), self.basis_section(k));
                    let a = self.bracket(&self.bracket(&ei, &ej), &ek);
                    let b = self.bracket(&self.bracket(&ej, &ek), &ei);
                    let c = self.bracket(&self.bracket(&ek, &ei), &ej);
                    if (0..m).any(|q| !(&(&a[q] + &b[q]) + &c[q]).is_zero()) {
                        failures.push(format!("jacobi: (e{}, e{}, e{})", i + 1, j + 1, k + 1));
                    }
                }
            }
        }
        ValidationReport { failures }
    }

    /// The linear Poisson bivector on the dual bundle.
    pub fn kks_bivector(&self) -> Multivector {
        let spec = self.spec;
        let mut pi = Multivector::zero(spec, 2);
        for i in 0..self.rank() {
            for a in 0..self.base() {
                pi.add_component(&[spec.x(a), spec.xi(i)], &self.anchor[i][a]);
            }
            for j in i + 1..self.rank() {
                let mut p = Poly::zero(spec);
                for k in 0..self.rank() {
                    p.add_assign(&(&self.structure[i][j][k] * &Poly::xi(spec, k)));
                }
                pi.add_component(&[spec.xi(i), spec.xi(j)], &(-&p));
            }
        }
        pi
    }

    pub fn kks_bracket(&self, f: &Poly, g: &Poly) -> Poly {
        self.kks_bivector().evaluate(&[f.clone(), g.clone()]).expect("arity 2")
    }

    /// `C₁ = (i/2){·,·}` as a bidifferential operator.
    pub fn first_order(&self) -> Cochain {
        self.kks_bivector().hkr().scale(&Scalar::i())
    }

    /// Vertical lift `Σ_i s^i ∂_{ξ_i}` of a section, or of a 1-form read as coordinates.
    pub fn vertical(&self, s: &[Poly]) -> Multivector {
        let mut v = Multivector::zero(self.spec, 1);
        for (i, p) in s.iter().enumerate() {
            v.add_component(&[self.spec.xi(i)], p);
        }
        v
    }

    /// Horizontal lift `s^i (ρ_i^a ∂_{x_a} + Γ_ij^k ξ_k ∂_{ξ_j})`.
    pub fn horizontal(&self, s: &Section, conn: &ConnectionData) -> Multivector {
        let spec = self.spec;
        let mut v = Multivector::zero(spec, 1);
        for (i, si) in s.iter().enumerate() {
            if si.is_zero() {
                continue;
            }
            for a in 0..self.base() {
                v.add_component(&[spec.x(a)], &(si * &self.anchor[i][a]));
            }
            for j in 0..self.rank() {
                for k in 0..self.rank() {
                    let g = &conn.gamma[i][j][k];
                    if !g.is_zero() {
                        v.add_component(&[spec.xi(j)], &(&(si * g) * &Poly::xi(spec, k)));
                    }
                }
            }
        }
        v
    }

    /// `B^ver = Σ_{i<j} B_ij ∂_{ξ_i} ∧ ∂_{ξ_j}`.
    pub fn vertical_two_form(&self, b: &AForm) -> Multivector {
        let mut v = Multivector::zero(self.spec, 2);
        for (idx, p) in b.components() {
            let lifted: Vec<usize> = idx.iter().map(|&i| self.spec.xi(i)).collect();
            v.add_component(&lifted, p);
        }
        v
    }

    /// `∇_{e_i} t`.
    pub fn covariant(&self, conn: &ConnectionData, i: usize, t: &Section) -> Section {
        let m = self.rank();
        let mut out: Section = t.iter().map(|f| self.rho_basis(i, f)).collect();
        for (l, tl) in t.iter().enumerate() {
            if tl.is_zero() {
                continue;
            }
            for (q, o) in out.iter_mut().enumerate().take(m) {
                let g = &conn.gamma[i][l][q];
                if !g.is_zero() {
                    o.add_assign(&(tl * g));
                }
            }
        }
        out
    }

    fn covariant_section(&self, conn: &ConnectionData, s: &Section, t: &Section) -> Section {
        let mut out = vec![Poly::zero(self.spec); self.rank()];
        for (i, si) in s.iter().enumerate() {
            if si.is_zero() {
                continue;
            }
            for (o, v) in out.iter_mut().zip(self.covariant(conn, i, t)) {
                o.add_assign(&(si * &v));
            }
        }
        out
    }

    /// Torsion `Γ_ij^k − Γ_ji^k − c_ij^k`, zero iff the connection is torsion-free.
    pub fn torsion_free(&self, conn: &ConnectionData) -> bool {
        let m = self.rank();
        (0..m).all(|i| {
            (0..m).all(|j| {
                (0..m).all(|k| (&(&conn.gamma[i][j][k] - &conn.gamma[j][i][k]) - &self.structure[i][j][k]).is_zero())
            })
        })
    }

    /// `tr R^∇` as a 2-form.
    pub fn curvature_trace(&self, conn: &ConnectionData) -> AForm {
        let m = self.rank();
        let mut out = AForm::zero(self.spec, 2);
        for i in 0..m {
            for j in i + 1..m {
                let br = self.bracket(&self.basis_section(i), &self.basis_section(j));
                let mut tr = Poly::zero(self.spec);
                for k in 0..m {
                    let ek = self.basis_section(k);
                    let a = self.covariant(conn, i, &self.covariant(conn, j, &ek));
                    let b = self.covariant(conn, j, &self.covariant(conn, i, &ek));
                    let c = self.covariant_section(conn, &br, &ek);
                    tr.add_assign(&(&(&a[k] - &b[k]) - &c[k]));
                }
                out.add_component(&[i, j], &tr);
            }
        }
        out
    }

    /// Lie algebroid differential with the standard signs `(-1)^k` and `(-1)^{k+l}`.
    pub fn d_a(&self, alpha: &AForm) -> AForm {
        let p = alpha.degree();
        let m = self.rank();
        let mut out = AForm::zero(self.spec, p + 1);
        for idx in subsets(m, p + 1) {
            let mut val = Poly::zero(self.spec);
            for k in 0..=p {
                let rest: Vec<usize> = idx.iter().enumerate().filter(|&(q, _)| q != k).map(|(_, &v)| v).collect();
                let a = alpha.component(&rest);
                let term = self.rho_basis(idx[k], &a);
                if k % 2 == 0 {
                    val.add_assign(&term);
                } else {
                    val.add_assign(&(-&term));
                }
            }
            for k in 0..=p {
                for l in k + 1..=p {
                    let rest: Vec<usize> =
                        idx.iter().enumerate().filter(|&(q, _)| q != k && q != l).map(|(_, &v)| v).collect();
                    let mut term = Poly::zero(self.spec);
                    for q in 0..m {
                        let c = &self.structure[idx[k]][idx[l]][q];
                        if c.is_zero() {
                            continue;
                        }
                        let mut full = vec![q];
                        full.extend_from_slice(&rest);
                        term.add_assign(&(c * &alpha.component(&full)));
                    }
                    if (k + l) % 2 == 0 {
                        val.add_assign(&term);
                    } else {
                        val.add_assign(&(-&term));
                    }
                }
            }
            out.add_component(&idx, &val);
        }
        out
    }

    /// `H^p(A)`, exact for Lie algebras and truncated at x-degree `cap` otherwise.
    pub fn cohomology(&self, p: usize, cap: Option<u32>) -> Result<Cohomology> {
        self.cohomology_in(p, cap, &|_, _| true)
    }

    /// Cohomology of the subcomplex spanned by the basis forms `x^μ e^I` accepted by
    /// `keep(I, μ)`; the subspace must be closed under `d_A`.
    pub fn cohomology_in(&self, p: usize, cap: Option<u32>, keep: FormFilter<'_>) -> Result<Cohomology> {
        if self.base() > 0 && cap.is_none() {
            return Err(Error::Precondition("an x-degree cap is required when the base is nonzero".into()));
        }
        let cap = if self.base() == 0 { 0 } else { cap.unwrap_or(0) };
        let here = FormSpace::filtered(self.spec, p, cap, keep);
        // Cocycles.
        let cycles = if p > self.rank() {
            vec![]
        } else {
            let images: Vec<AForm> = here.basis().map(|f| self.d_a(&f)).collect();
            let mut rows = RowIndex::default();
            for img in &images {
                rows.intern_form(img);
            }
            let mut mat = Matrix::zeros(rows.len(), here.len());
            for (j, img) in images.iter().enumerate() {
                for (key, c) in form_entries(img) {
                    mat.set(rows.index[&key], j, c);
                }
            }
            mat.kernel()
        };
        // Coboundaries landing inside the truncated space.
        let pre_cap = if self.base() == 0 { 0 } else { cap + 1 };
        let boundaries = if p == 0 {
            vec![]
        } else {
            let below = FormSpace::filtered(self.spec, p - 1, pre_cap, keep);
            let images: Vec<AForm> = below.basis().map(|f| self.d_a(&f)).collect();
            let mut high = RowIndex::default();
            for img in &images {
                for (key, _) in form_entries(img) {
                    if !here.contains(&key) {
                        high.intern(key);
                    }
                }
            }
            let mut hm = Matrix::zeros(high.len(), images.len());
            for (j, img) in images.iter().enumerate() {
                for (key, c) in form_entries(img) {
                    if let Some(&r) = high.index.get(&key) {
                        hm.set(r, j, c);
                    }
                }
            }
            let combos = if high.len() == 0 {
                (0..images.len())
                    .map(|j| {
                        let mut v = vec![Scalar::zero(); images.len()];
                        v[j] = Scalar::one();
                        v
                    })
                    .collect()
            } else {
                hm.kernel()
            };
            combos
                .iter()
                .map(|w| {
                    let mut v = vec![Scalar::zero(); here.len()];
                    for (j, img) in images.iter().enumerate() {
                        if w[j].is_zero() {
                            continue;
                        }
                        for (key, c) in form_entries(img) {
                            if let Some(r) = here.position(&key) {
                                v[r] += &(&c * &w[j]);
                            }
                        }
                    }
                    v
                })
                .collect::<Vec<_>>()
        };
        // Representatives: cocycles independent modulo coboundaries, greedily in order.
        let mut cols: Vec<Vec<Scalar>> = boundaries.clone();
        let nb = cols.len();
        cols.extend(cycles.iter().cloned());
        let pivots = pivot_columns(here.len(), &cols);
        let reps: Vec<Vec<Scalar>> = pivots.iter().filter(|&&c| c >= nb).map(|&c| cols[c].clone()).collect();
        let basis = reps.iter().map(|v| here.to_form(v)).collect();
        let bpiv: Vec<Vec<Scalar>> = pivots.iter().filter(|&&c| c < nb).map(|&c| cols[c].clone()).collect();
        Ok(Cohomology { degree: p, cap: (self.base() > 0).then_some(cap), basis, reps, boundaries: bpiv, space: here })
    }

    /// A `(p-1)`-form `β` with `d_A β = alpha`, searched up to x-degree `cap + 1`.
    pub fn primitive(&self, alpha: &AForm, cap: Option<u32>) -> Option<AForm> {
        self.primitive_in(alpha, cap, &|_, _| true)
    }

    /// [`Self::primitive`] restricted to basis forms accepted by `keep`.
    pub fn primitive_in(&self, alpha: &AForm, cap: Option<u32>, keep: FormFilter<'_>) -> Option<AForm> {
        let p = alpha.degree();
        if alpha.is_zero() {
            return Some(AForm::zero(self.spec, p.saturating_sub(1)));
        }
        if p == 0 {
            return None;
        }
        let pre_cap = if self.base() == 0 { 0 } else { cap.unwrap_or(0) + 1 };
        let below = FormSpace::filtered(self.spec, p - 1, pre_cap, keep);
        let images: Vec<AForm> = below.basis().map(|f| self.d_a(&f)).collect();
        let mut rows = RowIndex::default();
        for img in &images {
            rows.intern_form(img);
        }
        rows.intern_form(alpha);
        let mut mat = Matrix::zeros(rows.len(), images.len());
        for (j, img) in images.iter().enumerate() {
            for (key, c) in form_entries(img) {
                mat.set(rows.index[&key], j, c);
            }
        }
        let mut b = vec![Scalar::zero(); rows.len()];
        for (key, c) in form_entries(alpha) {
            b[rows.index[&key]] = c;
        }
        match solve(&mat, &b) {
            Solution::Solved(x) => Some(below.to_form(&x)),
            Solution::Inconsistent(_) => None,
        }
    }
}

/// Column indices of a maximal independent prefix-greedy subset of `cols`.
fn pivot_columns(nrows: usize, cols: &[Vec<Scalar>]) -> Vec<usize> {
    if cols.is_empty() {
        return vec![];
    }
    let mut mat = Matrix::zeros(nrows, cols.len());
    for (j, c) in cols.iter().enumerate() {
        for (i, v) in c.iter().enumerate() {
            if !v.is_zero() {
                mat.set(i, j, v.clone());
            }
        }
    }
    mat.pivot_columns()
}

/// `(fibre index tuple, x-monomial)` coordinates of a form.
type FormKey = (Vec<usize>, Monomial);

fn form_entries(f: &AForm) -> Vec<(FormKey, Scalar)> {
    let mut out = Vec::new();
    for (idx, p) in f.components() {
        for (m, c) in p.terms() {
            out.push(((idx.clone(), m.clone()), c.clone()));
        }
    }
    out
}

#[derive(Default)]
struct RowIndex {
    index: HashMap<FormKey, usize>,
    keys: Vec<FormKey>,
}

impl RowIndex {
    fn intern(&mut self, key: FormKey) -> usize {
        if let Some(&k) = self.index.get(&key) {
            return k;
        }
        self.index.insert(key.clone(), self.keys.len());
        self.keys.push(key);
        self.keys.len() - 1
    }

    fn intern_form(&mut self, f: &AForm) {
        for (key, _) in form_entries(f) {
            self.intern(key);
        }
    }

    fn len(&self) -> usize {
        self.keys.len()
    }
}

/// Selects basis forms `x^μ e^I` by `(I, μ)`.
pub type FormFilter<'a> = &'a dyn Fn(&[usize], &Monomial) -> bool;

/// Basis `{x^μ e^I}` of p-forms with x-degree at most `cap`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormSpace {
    spec: VarSpec,
    degree: usize,
    keys: Vec<FormKey>,
    index: BTreeMap<FormKey, usize>,
}

/// Base monomials of total degree at most `cap`, in the ambient of `spec`.
pub fn base_monomials(spec: VarSpec, cap: u32) -> Vec<Monomial> {
    let mut out = vec![vec![0u32; spec.nvars()]];
    for a in 0..spec.base {
        let mut next = Vec::new();
        for e in &out {
            let used: u32 = e.iter().sum();
            for k in 0..=cap - used {
                let mut f = e.clone();
                f[a] = k;
                next.push(f);
            }
        }
        out = next;
    }
    let mut ms: Vec<Monomial> = out.into_iter().map(Monomial::from_exps).collect();
    ms.sort();
    ms
}

impl FormSpace {
    pub fn new(spec: VarSpec, degree: usize, cap: u32) -> Self {
        FormSpace::filtered(spec, degree, cap, &|_, _| true)
    }

    pub fn filtered(spec: VarSpec, degree: usize, cap: u32, keep: FormFilter<'_>) -> Self {
        let mut keys = Vec::new();
        for idx in subsets(spec.fibre, degree) {
            for m in base_monomials(spec, cap) {
                if keep(&idx, &m) {
                    keys.push((idx.clone(), m));
                }
            }
        }
        let index = keys.iter().cloned().enumerate().map(|(k, key)| (key, k)).collect();
        FormSpace { spec, degree, keys, index }
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    fn contains(&self, key: &FormKey) -> bool {
        self.index.contains_key(key)
    }

    fn position(&self, key: &FormKey) -> Option<usize> {
        self.index.get(key).copied()
    }

    pub fn basis(&self) -> impl Iterator<Item = AForm> + '_ {
        self.keys.iter().map(move |(idx, m)| {
            let mut f = AForm::zero(self.spec, self.degree);
            f.add_component(idx, &Poly::term(self.spec, m.clone(), Scalar::one()));
            f
        })
    }

    pub fn to_form(&self, v: &[Scalar]) -> AForm {
        let mut f = AForm::zero(self.spec, self.degree);
        for ((idx, m), c) in self.keys.iter().zip(v) {
            if !c.is_zero() {
                f.add_component(idx, &Poly::term(self.spec, m.clone(), c.clone()));
            }
        }
        f
    }

    /// Coordinates of `f`, or `None` if it leaves the space.
    pub fn to_vector(&self, f: &AForm) -> Option<Vec<Scalar>> {
        let mut v = vec![Scalar::zero(); self.len()];
        for (key, c) in form_entries(f) {
            v[self.position(&key)?] = c;
        }
        Some(v)
    }
}

/// A basis of `H^p` together with what is needed to read coordinates of closed forms.
#[derive(Clone, Debug)]
pub struct Cohomology {
    pub degree: usize,
    /// x-degree cap for positive base dimension; `None` means exact.
    pub cap: Option<u32>,
    pub basis: Vec<AForm>,
    reps: Vec<Vec<Scalar>>,
    boundaries: Vec<Vec<Scalar>>,
    space: FormSpace,
}

impl Cohomology {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Coordinates of the class of a closed form in the computed basis.
    pub fn coordinates(&self, alpha: &AForm) -> Result<Vec<Scalar>> {
        let v = self
            .space
            .to_vector(alpha)
            .ok_or_else(|| Error::Precondition(format!("form exceeds the x-degree cap {:?}", self.cap)))?;
        let mut cols: Vec<Vec<Scalar>> = self.reps.clone();
        cols.extend(self.boundaries.iter().cloned());
        if cols.is_empty() {
            return if v.iter().all(|c| c.is_zero()) {
                Ok(vec![])
            } else {
                Err(Error::Precondition("form is not closed".into()))
            };
        }
        let mut mat = Matrix::zeros(self.space.len(), cols.len());
        for (j, c) in cols.iter().enumerate() {
            for (i, x) in c.iter().enumerate() {
                if !x.is_zero() {
                    mat.set(i, j, x.clone());
                }
            }
        }
        match solve(&mat, &v) {
            Solution::Solved(x) => Ok(x[..self.reps.len()].to_vec()),
            Solution::Inconsistent(_) => Err(Error::Precondition("form is not closed".into())),
        }
    }
}

/// A differential form on the algebroid: antisymmetric components over fibre indices.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AForm {
    spec: VarSpec,
    degree: usize,
    comps: BTreeMap<Vec<usize>, Poly>,
}

impl AForm {
    pub fn zero(spec: VarSpec, degree: usize) -> Self {
        AForm { spec, degree, comps: BTreeMap::new() }
    }

    /// `coeff · e^{idx[0]} ∧ …` with 0-based indices.
    pub fn basis(spec: VarSpec, idx: &[usize], coeff: Scalar) -> Self {
        let mut f = AForm::zero(spec, idx.len());
        f.add_component(idx, &Poly::constant(spec, coeff));
        f
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

    /// `α(e_{idx[0]}, …)`.
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

    pub fn add(&self, o: &AForm) -> Result<AForm> {
        if self.spec != o.spec || self.degree != o.degree {
            return Err(Error::Structure("form shape mismatch".into()));
        }
        let mut out = self.clone();
        for (i, p) in &o.comps {
            out.add_component(i, p);
        }
        Ok(out)
    }

    pub fn sub(&self, o: &AForm) -> Result<AForm> {
        self.add(&o.scale(&Scalar::from_int(-1)))
    }

    pub fn scale(&self, s: &Scalar) -> AForm {
        let mut out = AForm::zero(self.spec, self.degree);
        for (i, p) in &self.comps {
            out.add_component(i, &p.scale(s));
        }
        out
    }

    pub fn max_base_degree(&self) -> u32 {
        self.comps.values().map(|p| p.max_degree()).max().unwrap_or(0)
    }

    /// Components on the listed fibre indices only, renumbered, with every base variable
    /// flagged in `base_zero` set to zero and the rest mapped through `base_map`.
    pub fn pullback(&self, target: VarSpec, fibre_keep: &[usize], base_map: &[Option<usize>]) -> Result<AForm> {
        let mut var_map = vec![None; self.spec.nvars()];
        for (a, m) in base_map.iter().enumerate() {
            var_map[self.spec.x(a)] = *m;
        }
        let zero_mask: Vec<bool> =
            (0..self.spec.nvars()).map(|v| v < self.spec.base && base_map[v].is_none()).collect();
        let mut out = AForm::zero(target, self.degree);
        for idx in subsets(fibre_keep.len(), self.degree) {
            let orig: Vec<usize> = idx.iter().map(|&k| fibre_keep[k]).collect();
            let p = self.component(&orig).restrict_zero(&zero_mask);
            out.add_component(&idx, &p.reindex(target, &var_map)?);
        }
        Ok(out)
    }

    pub fn render_with(&self, names: &[String]) -> Vec<String> {
        self.comps
            .iter()
            .map(|(idx, p)| {
                let n: Vec<&str> = idx.iter().map(|&i| names[i].as_str()).collect();
                format!("[{}] -> {}", n.join(", "), p)
            })
            .collect()
    }
}

impl fmt::Display for AForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.comps.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .comps
            .iter()
            .map(|(idx, p)| {
                let n: Vec<String> = idx.iter().map(|&i| format!("e{}", i + 1)).collect();
                format!("({})*{}", p, n.join("^"))
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::EulerDegree;

    #[test]
    fn presets_validate() {
        for name in ["h3", "so3", "aff1", "abelian2", "tangent1", "tangent2", "action-line"] {
            let a = AlgebroidPresentation::preset(name).unwrap();
            assert!(a.validate().is_valid(), "{name}");
        }
        let bad = AlgebroidPresentation::lie_algebra(3, &[(0, 1, 0, 1), (1, 2, 1, 1)]);
        let rep = bad.validate();
        assert_eq!(rep.failures, vec!["jacobi: (e1, e2, e3)".to_string()]);
    }

    #[test]
    fn kks_table() {
        let h = AlgebroidPresentation::heisenberg();
        let s = h.spec();
        assert_eq!(h.kks_bracket(&Poly::xi(s, 0), &Poly::xi(s, 1)), -&Poly::xi(s, 2));
        let t = AlgebroidPresentation::tangent(1);
        let s = t.spec();
        assert_eq!(t.kks_bracket(&Poly::x(s, 0), &Poly::xi(s, 0)), Poly::one(s));
        assert_eq!(h.kks_bivector().hkr().homogeneity_degree().unwrap(), EulerDegree::Homogeneous(-1));
    }

    #[test]
    fn differential_and_cohomology() {
        let h = AlgebroidPresentation::heisenberg();
        let s = h.spec();
        let e3 = AForm::basis(s, &[2], Scalar::one());
        assert_eq!(h.d_a(&e3), AForm::basis(s, &[0, 1], Scalar::from_int(-1)));
        assert_eq!(h.cohomology(2, None).unwrap().dim(), 2);
        assert_eq!(AlgebroidPresentation::so3().cohomology(2, None).unwrap().dim(), 0);
        let ab = AlgebroidPresentation::abelian(2);
        let c = ab.cohomology(2, None).unwrap();
        assert_eq!(c.dim(), 1);
        let b = AForm::basis(ab.spec(), &[0, 1], Scalar::from_int(3));
        assert_eq!(c.coordinates(&b).unwrap(), vec![Scalar::from_int(3)]);
        assert!(ab.cohomology(2, None).is_ok());
        assert!(AlgebroidPresentation::tangent(1).cohomology(1, None).is_err());
        let t = AlgebroidPresentation::tangent(1);
        assert_eq!(t.cohomology(1, Some(3)).unwrap().dim(), 0);
        assert_eq!(t.cohomology(0, Some(3)).unwrap().dim(), 1);
    }

    #[test]
    fn lifts() {
        let ab = AlgebroidPresentation::abelian(2);
        let s = ab.spec();
        let b = AForm::basis(s, &[0, 1], Scalar::one());
        let v = ab.vertical_two_form(&b).hkr();
        assert_eq!(v.apply(&[Poly::xi(s, 0), Poly::xi(s, 1)]).unwrap(), Poly::constant(s, Scalar::ratio(1, 2)));
        let h = AlgebroidPresentation::heisenberg();
        let zero = ConnectionData::zero(h.spec());
        assert!(h.curvature_trace(&zero).is_zero());
        let e1 = h.basis_section(0);
        let ver = h.vertical(&e1).hkr();
        let euler = Cochain::euler(h.spec());
        assert_eq!(euler.gerstenhaber(&ver).unwrap(), ver.scale(&Scalar::from_int(-1)));
    }
}
