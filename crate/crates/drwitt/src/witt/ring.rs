//! Coefficient rings for Witt vectors.

use std::collections::BTreeMap;
use std::fmt::Debug;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;

use crate::error::{Error, Result};
use crate::exactcore::{Fq, FqElem, Weight};
use crate::polyparse::parse_terms;

pub trait CoeffRing {
    type Elem: Clone + PartialEq + Debug;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn from_int(&self, n: &BigInt) -> Self::Elem;
    /// `Some(p)` when the ring has characteristic `p`, `None` when it is
    /// p-torsion-free.
    fn characteristic(&self) -> Option<u64>;

    fn neg(&self, a: &Self::Elem) -> Self::Elem {
        self.mul(&self.from_int(&-BigInt::one()), a)
    }

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.add(a, &self.neg(b))
    }

    fn pow(&self, a: &Self::Elem, mut e: u64) -> Self::Elem {
        let mut acc = self.one();
        let mut b = a.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &b);
            }
            e >>= 1;
            if e > 0 {
                b = self.mul(&b, &b);
            }
        }
        acc
    }

    fn render(&self, a: &Self::Elem) -> String {
        format!("{a:?}")
    }
}

/// `Z`, the torsion-free test ring for ghost components.
#[derive(Clone, Copy, Debug, Default)]
pub struct Integers;

impl CoeffRing for Integers {
    type Elem = BigInt;

    fn zero(&self) -> BigInt {
        BigInt::zero()
    }
    fn one(&self) -> BigInt {
        BigInt::one()
    }
    fn add(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a + b
    }
    fn mul(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a * b
    }
    fn from_int(&self, n: &BigInt) -> BigInt {
        n.clone()
    }
    fn characteristic(&self) -> Option<u64> {
        None
    }
    fn neg(&self, a: &BigInt) -> BigInt {
        -a
    }
    fn render(&self, a: &BigInt) -> String {
        a.to_string()
    }
}

/// Monomials with exponents in `p^{-depth} Z` over `F_q`, in `nvars`
/// variables: `F_q`, `F_q[x]`, `F_q[x^{±1}]` and perfections thereof,
/// optionally truncated above a weight cap.
#[derive(Clone, Debug)]
pub struct MonomialAlgebra {
    pub field: Fq,
    pub var_names: Vec<String>,
    pub weights: Vec<i64>,
    /// Exponents are stored as numerators over `p^depth`.
    pub depth: u32,
    pub laurent: bool,
    pub cap: Option<Weight>,
}

pub type MonoElem = BTreeMap<Vec<i64>, FqElem>;

impl MonomialAlgebra {
    pub fn finite_field(p: u64, f: usize) -> Self {
        MonomialAlgebra {
            field: Fq::new(p, f),
            var_names: vec![],
            weights: vec![],
            depth: 0,
            laurent: false,
            cap: None,
        }
    }

    pub fn polynomial(p: u64, f: usize, vars: &[(&str, i64)], cap: Option<Weight>) -> Self {
        MonomialAlgebra {
            field: Fq::new(p, f),
            var_names: vars.iter().map(|v| v.0.to_string()).collect(),
            weights: vars.iter().map(|v| v.1).collect(),
            depth: 0,
            laurent: false,
            cap,
        }
    }

    pub fn p(&self) -> u64 {
        self.field.p
    }

    fn denom(&self) -> i64 {
        (self.p() as i64).pow(self.depth)
    }

    pub fn weight_of(&self, exps: &[i64]) -> Weight {
        let num: i64 = exps.iter().zip(&self.weights).map(|(e, w)| e * w).sum();
        Weight::new(num, self.denom())
    }

    fn keep(&self, exps: &[i64]) -> bool {
        match &self.cap {
            Some(cap) => self.weight_of(exps) <= *cap,
            None => true,
        }
    }

    /// `c * x^e` with `e` given as true (rational) exponents.
    pub fn monomial(&self, c: FqElem, exps: &[Ratio<i64>]) -> Result<MonoElem> {
        let d = self.denom();
        let mut out = MonoElem::new();
        let mut num = vec![];
        for e in exps {
            let scaled = *e * Ratio::from_integer(d);
            if !scaled.is_integer() {
                return Err(Error::InvalidInput(format!("exponent {e} needs a deeper p-power root")));
            }
            if *e.numer() < 0 && !self.laurent {
                return Err(Error::InvalidInput("negative exponent in a non-Laurent ring".into()));
            }
            num.push(scaled.to_integer());
        }
        if !self.field.is_zero(&c) && self.keep(&num) {
            out.insert(num, c);
        }
        Ok(out)
    }

    pub fn var(&self, i: usize) -> MonoElem {
        let mut e = vec![Ratio::zero(); self.var_names.len()];
        e[i] = Ratio::one();
        self.monomial(self.field.one(), &e).unwrap()
    }

    pub fn scalar(&self, c: FqElem) -> MonoElem {
        self.monomial(c, &vec![Ratio::zero(); self.var_names.len()]).unwrap()
    }

    /// Parse an element written in the monomial syntax.
    pub fn parse(&self, s: &str) -> Result<MonoElem> {
        let terms = parse_terms(s, &self.var_names, 1, 0)?;
        let mut acc = self.zero();
        for t in terms {
            let c = self.field.mul(
                &self.field.from_int(t.coeff.mod_floor(&BigInt::from(self.p())).to_i64().unwrap()),
                &self.field.pow(&self.field.generator_or_one(t.t_power), 1),
            );
            acc = self.add(&acc, &self.monomial(c, &t.exps)?);
        }
        Ok(acc)
    }

    /// Random element with exponents in `0..=max_exp` (integral) and
    /// coefficients uniform in `F_q`.
    pub fn random<R: Rng>(&self, rng: &mut R, terms: usize, max_exp: i64) -> MonoElem {
        let mut acc = self.zero();
        for _ in 0..terms {
            let c = self.field.element(rng.gen_range(0..self.field.order()));
            let e: Vec<Ratio<i64>> = (0..self.var_names.len())
                .map(|_| {
                    let lo = if self.laurent { -max_exp } else { 0 };
                    Ratio::from_integer(rng.gen_range(lo..=max_exp))
                })
                .collect();
            acc = self.add(&acc, &self.monomial(c, &e).unwrap());
        }
        acc
    }
}

impl Fq {
    /// `t^k`, or `1` in the prime field.
    pub fn generator_or_one(&self, k: u32) -> FqElem {
        if k == 0 {
            return self.one();
        }
        self.pow(&self.generator(), k as u128)
    }
}

impl CoeffRing for MonomialAlgebra {
    type Elem = MonoElem;

    fn zero(&self) -> MonoElem {
        MonoElem::new()
    }

    fn one(&self) -> MonoElem {
        self.scalar(self.field.one())
    }

    fn add(&self, a: &MonoElem, b: &MonoElem) -> MonoElem {
        let mut out = a.clone();
        for (e, c) in b {
            let s = match out.get(e) {
                Some(x) => self.field.add(x, c),
                None => c.clone(),
            };
            if self.field.is_zero(&s) {
                out.remove(e);
            } else {
                out.insert(e.clone(), s);
            }
        }
        out
    }

    fn mul(&self, a: &MonoElem, b: &MonoElem) -> MonoElem {
        let mut out = MonoElem::new();
        for (e1, c1) in a {
            for (e2, c2) in b {
                let e: Vec<i64> = e1.iter().zip(e2).map(|(x, y)| x + y).collect();
                if !self.keep(&e) {
                    continue;
                }
                let c = self.field.mul(c1, c2);
                let s = match out.get(&e) {
                    Some(x) => self.field.add(x, &c),
                    None => c,
                };
                if self.field.is_zero(&s) {
                    out.remove(&e);
                } else {
                    out.insert(e, s);
                }
            }
        }
        out
    }

    fn from_int(&self, n: &BigInt) -> MonoElem {
        let r = n.mod_floor(&BigInt::from(self.p())).to_i64().unwrap();
        self.scalar(self.field.from_int(r))
    }

    fn characteristic(&self) -> Option<u64> {
        Some(self.p())
    }

    /// In characteristic p, `a^(p^k)` is computed termwise.
    fn pow(&self, a: &MonoElem, e: u64) -> MonoElem {
        let p = self.p();
        if e > 1 && e % p == 0 {
            let mut out = MonoElem::new();
            for (ex, c) in a {
                let ne: Vec<i64> = ex.iter().map(|x| x * p as i64).collect();
                if self.keep(&ne) {
                    out.insert(ne, self.field.frobenius(c));
                }
            }
            return self.pow(&out, e / p);
        }
        let mut acc = self.one();
        let mut b = a.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &b);
            }
            e >>= 1;
            if e > 0 {
                b = self.mul(&b, &b);
            }
        }
        acc
    }

    fn render(&self, a: &MonoElem) -> String {
        if a.is_empty() {
            return "0".into();
        }
        let d = self.denom();
        let parts: Vec<String> = a
            .iter()
            .map(|(e, c)| {
                let mut factors = vec![];
                let cs = self.field.fmt_elem(c);
                let trivial = e.iter().all(|&x| x == 0);
                if cs != "1" || trivial {
                    factors.push(if cs.contains('+') { format!("({cs})") } else { cs });
                }
                for (name, &x) in self.var_names.iter().zip(e) {
                    if x == 0 {
                        continue;
                    }
                    let r = Ratio::new(x, d);
                    factors.push(if r == Ratio::one() {
                        name.clone()
                    } else if r.is_integer() {
                        format!("{name}^{r}")
                    } else {
                        format!("{name}^({r})")
                    });
                }
                factors.join("*")
            })
            .collect();
        parts.join(" + ")
    }
}
