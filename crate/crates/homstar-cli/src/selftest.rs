//! Randomized identity suites over the Hochschild calculus and the retraction.
//!
//! The seed only drives the sampler; every check itself is exact.

use homstar::cochain::Cochain;
use homstar::hkr::{hkr_inv_closed, solve_potential};
use homstar::{EulerDegree, Result, Scalar};

use crate::sample::Sampler;

/// Outcome of one identity over many samples.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: &'static str,
    pub cases: usize,
    pub failures: Vec<String>,
}

impl Check {
    fn new(name: &'static str) -> Self {
        Check { name, cases: 0, failures: Vec::new() }
    }

    fn record(&mut self, ok: bool, detail: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok && self.failures.len() < 5 {
            self.failures.push(detail());
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

fn sign(odd: bool) -> Scalar {
    Scalar::from_int(if odd { -1 } else { 1 })
}

/// `[D, E]` in the convention `D ∘ E − (−1)^{|D||E|} E ∘ D`.
fn bracket(d: &Cochain, e: &Cochain) -> Result<Cochain> {
    let odd = (d.degree() * e.degree()).rem_euclid(2) == 1;
    Ok(d.gerstenhaber(e)?.scale(&sign(odd)))
}

/// `∂² = 0`, graded Jacobi, `Alt ∘ ∂ = 0` and `∂ = [μ₀, ·]`, each on `cases` samples of
/// degree at most 2, derivative order at most 3 and rank at most 4.
pub fn dgla_suite(seed: u64, cases: usize) -> Result<Vec<Check>> {
    let mut s = Sampler::new(seed);
    let mut dd = Check::new("d_squared_zero");
    let mut jac = Check::new("graded_jacobi");
    let mut alt = Check::new("alt_kills_d");
    let mut mu = Check::new("d_is_bracket_with_mu0");
    for _ in 0..cases {
        let spec = s.spec(1, 4, 4);
        let arity = s.between(1, 3);
        let d = s.cochain(spec, arity, 3, 3);
        let dd_c = d.hochschild_d();
        dd.record(dd_c.hochschild_d().is_zero(), || format!("{d}"));
        alt.record(dd_c.alt().is_zero(), || format!("{d}"));
        let via_mu = Cochain::mu0(spec).gerstenhaber(&d)?;
        mu.record(via_mu == dd_c, || format!("{d}"));

        // Keep the total arity of the nested brackets small.
        let spec = s.spec(1, 3, 3);
        let ar: Vec<usize> = loop {
            let v = vec![s.between(1, 3), s.between(1, 3), s.between(1, 3)];
            if v.iter().sum::<usize>() <= 6 {
                break v;
            }
        };
        let x = s.cochain(spec, ar[0], 2, 2);
        let y = s.cochain(spec, ar[1], 2, 2);
        let z = s.cochain(spec, ar[2], 2, 2);
        let lhs = bracket(&x, &bracket(&y, &z)?)?;
        let odd = (x.degree() * y.degree()).rem_euclid(2) == 1;
        let rhs = bracket(&bracket(&x, &y)?, &z)?.add(&bracket(&y, &bracket(&x, &z)?)?.scale(&sign(odd)))?;
        jac.record(lhs == rhs, || format!("{x}\n--\n{y}\n--\n{z}"));
    }
    Ok(vec![dd, jac, alt, mu])
}

/// `hkrInv ∘ hkr = id` on random multivectors and `∂ solve_potential(R) = R` on random
/// exact, homogeneous `R`, with the homogeneity degree preserved.
pub fn retraction_suite(seed: u64, cases: usize) -> Result<Vec<Check>> {
    let mut s = Sampler::new(seed);
    let mut inv = Check::new("hkr_inverse");
    let mut pot = Check::new("potential_round_trip");
    let mut hom = Check::new("potential_homogeneity");
    while inv.cases < cases {
        let spec = s.spec(1, 3, 4);
        let degree = s.between(1, 3.min(spec.nvars()));
        let x = s.multivector(spec, degree, 3);
        let back = hkr_inv_closed(&x.hkr())?;
        inv.record(back == x, || format!("{x}"));
    }
    while pot.cases < cases {
        let spec = s.spec(1, 3, 3);
        let arity = s.between(1, 2);
        let weight = -(s.between(0, 2) as i64);
        let t = s.homogeneous_cochain(spec, arity, weight, 2, 3);
        let r = t.hochschild_d();
        if r.is_zero() {
            continue;
        }
        let c = solve_potential(&r, None)?;
        pot.record(c.hochschild_d() == r, || format!("{r}"));
        let want = r.homogeneity_degree()?;
        hom.record(want == EulerDegree::Homogeneous(weight) && c.homogeneity_degree()? == want, || format!("{r}"));
    }
    Ok(vec![inv, pot, hom])
}
