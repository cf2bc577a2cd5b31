//! Seeded random cochains, multivectors and scalars for the property suites.

use homstar::cochain::Cochain;
use homstar::hkr::Multivector;
use homstar::{Monomial, Poly, Scalar, VarSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn below(&mut self, n: usize) -> usize {
        self.rng.gen_range(0..n)
    }

    pub fn between(&mut self, lo: usize, hi: usize) -> usize {
        self.rng.gen_range(lo..=hi)
    }

    /// Ambient with at most `max_vars` variables, fibre rank in `1..=max_rank`.
    pub fn spec(&mut self, max_base: usize, max_rank: usize, max_vars: usize) -> VarSpec {
        loop {
            let base = self.between(0, max_base);
            let rank = self.between(1, max_rank);
            if base + rank <= max_vars {
                return VarSpec::new(base, rank);
            }
        }
    }

    /// Nonzero `a + bi` with `|a|, |b| ≤ 3`.
    pub fn scalar(&mut self) -> Scalar {
        loop {
            let a = self.rng.gen_range(-3i64..=3);
            let b = self.rng.gen_range(-3i64..=3);
            if a != 0 || b != 0 {
                return &Scalar::from_int(a) + &(&Scalar::i() * &Scalar::from_int(b));
            }
        }
    }

    /// Random exponent vector on the variables selected by `allowed`, of total degree
    /// exactly `deg`.
    fn spread(&mut self, n: usize, allowed: &[usize], deg: u32) -> Monomial {
        let mut e = vec![0u32; n];
        for _ in 0..deg {
            e[allowed[self.below(allowed.len())]] += 1;
        }
        Monomial::from_exps(e)
    }

    pub fn monomial(&mut self, spec: VarSpec, max_deg: u32) -> Monomial {
        let all: Vec<usize> = (0..spec.nvars()).collect();
        let d = self.rng.gen_range(0..=max_deg);
        self.spread(spec.nvars(), &all, d)
    }

    /// Derivative multi-index of total order in `1..=max_order`.
    fn derivative(&mut self, spec: VarSpec, max_order: u32) -> Monomial {
        let all: Vec<usize> = (0..spec.nvars()).collect();
        let d = self.rng.gen_range(1..=max_order);
        self.spread(spec.nvars(), &all, d)
    }

    pub fn poly(&mut self, spec: VarSpec, max_deg: u32, terms: usize) -> Poly {
        let mut p = Poly::zero(spec);
        for _ in 0..terms {
            let m = self.monomial(spec, max_deg);
            let c = self.scalar();
            p.add_term(m, &c);
        }
        p
    }

    /// Cochain vanishing on constants with derivative orders `≤ max_order` per slot.
    pub fn cochain(&mut self, spec: VarSpec, arity: usize, max_order: u32, terms: usize) -> Cochain {
        let mut c = Cochain::zero(spec, arity);
        for _ in 0..terms {
            let derivs = (0..arity).map(|_| self.derivative(spec, max_order)).collect();
            let coeff = self.poly(spec, 2, 1);
            c.add_term(derivs, &coeff);
        }
        c
    }

    /// Like [`Sampler::cochain`] but every term has Euler weight `weight`: coefficient
    /// fibre degree minus total fibre derivative order.
    pub fn homogeneous_cochain(
        &mut self,
        spec: VarSpec,
        arity: usize,
        weight: i64,
        max_order: u32,
        terms: usize,
    ) -> Cochain {
        let base: Vec<usize> = (0..spec.base).collect();
        let fibre: Vec<usize> = (0..spec.fibre).map(|j| spec.xi(j)).collect();
        let mut c = Cochain::zero(spec, arity);
        let mut placed = 0;
        let mut attempts = 0;
        while placed < terms && attempts < 200 {
            attempts += 1;
            let derivs: Vec<Monomial> = (0..arity).map(|_| self.derivative(spec, max_order)).collect();
            let fo: u32 = derivs.iter().map(|d| d.fibre_degree(spec)).sum();
            let fd = weight + fo as i64;
            if !(0..=3).contains(&fd) {
                continue;
            }
            let mut m = self.spread(spec.nvars(), &fibre, fd as u32);
            if !base.is_empty() {
                let bd = self.rng.gen_range(0..=1);
                m = m.add(&self.spread(spec.nvars(), &base, bd));
            }
            let coeff = Poly::term(spec, m, self.scalar());
            c.add_term(derivs, &coeff);
            placed += 1;
        }
        c
    }

    pub fn multivector(&mut self, spec: VarSpec, degree: usize, terms: usize) -> Multivector {
        let mut x = Multivector::zero(spec, degree);
        let n = spec.nvars();
        if degree > n {
            return x;
        }
        for _ in 0..terms {
            let mut idx: Vec<usize> = (0..n).collect();
            for k in 0..degree {
                let j = self.between(k, n - 1);
                idx.swap(k, j);
            }
            idx.truncate(degree);
            let p = self.poly(spec, 2, 2);
            x.add_component(&idx, &p);
        }
        x
    }
}
