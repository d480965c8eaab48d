//! Finite fields `F_{p^f}` as `F_p[t]/(g)` with `g` the lexicographically
//! first monic irreducible of degree `f`.

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FqElem(pub Vec<u64>);

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Fq {
    pub p: u64,
    pub f: usize,
    /// Monic modulus, low degree first, length `f + 1`.
    pub modulus: Vec<u64>,
}

fn poly_trim(mut a: Vec<u64>) -> Vec<u64> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

/// Remainder of `a` modulo the monic `m` over `F_p`.
fn poly_rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let mut a = poly_trim(a.to_vec());
    let dm = m.len() - 1;
    while a.len() > dm {
        let lead = *a.last().unwrap();
        let shift = a.len() - 1 - dm;
        for (i, &c) in m.iter().enumerate() {
            a[shift + i] = (a[shift + i] + p - lead * c % p) % p;
        }
        a = poly_trim(a);
    }
    a
}

fn is_irreducible(g: &[u64], p: u64) -> bool {
    let f = g.len() - 1;
    for d in 1..=f / 2 {
        let count = p.pow(d as u32);
        for idx in 0..count {
            let mut h = vec![0; d + 1];
            let mut x = idx;
            for c in h.iter_mut().take(d) {
                *c = x % p;
                x /= p;
            }
            h[d] = 1;
            if poly_rem(g, &h, p).is_empty() {
                return false;
            }
        }
    }
    true
}

impl Fq {
    pub fn new(p: u64, f: usize) -> Self {
        assert!(f >= 1);
        if f == 1 {
            return Fq { p, f, modulus: vec![0, 1] };
        }
        let count = p.pow(f as u32);
        for idx in 0..count {
            let mut g = vec![0; f + 1];
            let mut x = idx;
            for c in g.iter_mut().take(f) {
                *c = x % p;
                x /= p;
            }
            g[f] = 1;
            if g[0] != 0 && is_irreducible(&g, p) {
                return Fq { p, f, modulus: g };
            }
        }
        unreachable!("irreducible polynomials exist in every degree")
    }

    pub fn order(&self) -> u64 {
        self.p.pow(self.f as u32)
    }

    fn pad(&self, mut v: Vec<u64>) -> FqElem {
        v.resize(self.f, 0);
        FqElem(v)
    }

    pub fn zero(&self) -> FqElem {
        FqElem(vec![0; self.f])
    }

    pub fn one(&self) -> FqElem {
        self.from_int(1)
    }

    pub fn from_int(&self, n: i64) -> FqElem {
        let mut v = vec![0; self.f];
        v[0] = n.rem_euclid(self.p as i64) as u64;
        FqElem(v)
    }

    /// The class of `t`.
    pub fn generator(&self) -> FqElem {
        if self.f == 1 {
            return self.from_int(0);
        }
        let mut v = vec![0; self.f];
        v[1] = 1;
        FqElem(v)
    }

    pub fn is_zero(&self, a: &FqElem) -> bool {
        a.0.iter().all(|&c| c == 0)
    }

    pub fn add(&self, a: &FqElem, b: &FqElem) -> FqElem {
        FqElem(a.0.iter().zip(&b.0).map(|(x, y)| (x + y) % self.p).collect())
    }

    pub fn neg(&self, a: &FqElem) -> FqElem {
        FqElem(a.0.iter().map(|x| (self.p - x) % self.p).collect())
    }

    pub fn sub(&self, a: &FqElem, b: &FqElem) -> FqElem {
        self.add(a, &self.neg(b))
    }

    pub fn scalar(&self, c: u64, a: &FqElem) -> FqElem {
        FqElem(a.0.iter().map(|x| x * (c % self.p) % self.p).collect())
    }

    pub fn mul(&self, a: &FqElem, b: &FqElem) -> FqElem {
        let mut prod = vec![0u64; 2 * self.f];
        for (i, x) in a.0.iter().enumerate() {
            if *x == 0 {
                continue;
            }
            for (j, y) in b.0.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x * y) % self.p;
            }
        }
        self.pad(poly_rem(&prod, &self.modulus, self.p))
    }

    pub fn pow(&self, a: &FqElem, mut e: u128) -> FqElem {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: &FqElem) -> Option<FqElem> {
        if self.is_zero(a) {
            None
        } else {
            Some(self.pow(a, self.order() as u128 - 2))
        }
    }

    pub fn frobenius(&self, a: &FqElem) -> FqElem {
        self.pow(a, self.p as u128)
    }

    /// All elements, in a fixed order (index in base-p digits).
    pub fn elements(&self) -> Vec<FqElem> {
        (0..self.order()).map(|i| self.element(i)).collect()
    }

    pub fn element(&self, mut idx: u64) -> FqElem {
        let mut v = vec![0; self.f];
        for c in v.iter_mut() {
            *c = idx % self.p;
            idx /= self.p;
        }
        FqElem(v)
    }

    pub fn index(&self, a: &FqElem) -> u64 {
        a.0.iter().rev().fold(0, |acc, &c| acc * self.p + c)
    }

    /// A generator of the multiplicative group.
    pub fn primitive_element(&self) -> FqElem {
        let n = self.order() - 1;
        let mut primes = vec![];
        let mut m = n;
        let mut d = 2;
        while d * d <= m {
            if m % d == 0 {
                primes.push(d);
                while m % d == 0 {
                    m /= d;
                }
            }
            d += 1;
        }
        if m > 1 {
            primes.push(m);
        }
        for i in 1..self.order() {
            let g = self.element(i);
            if primes.iter().all(|&q| self.pow(&g, (n / q) as u128) != self.one()) {
                return g;
            }
        }
        unreachable!()
    }

    pub fn parse_int_or_gen(&self, s: &str) -> Option<FqElem> {
        s.trim().parse::<i64>().ok().map(|n| self.from_int(n))
    }

    pub fn fmt_elem(&self, a: &FqElem) -> String {
        if self.f == 1 {
            return a.0[0].to_string();
        }
        let terms: Vec<String> = a
            .0
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, &c)| c != 0)
            .map(|(i, &c)| match (i, c) {
                (0, c) => c.to_string(),
                (1, 1) => "t".into(),
                (1, c) => format!("{c}*t"),
                (i, 1) => format!("t^{i}"),
                (i, c) => format!("{c}*t^{i}"),
            })
            .collect();
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join("+")
        }
    }
}
