//! Finitely presented modules `R^gens / rowspan(rels)` and linear solving.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;

use super::matrix::{cokernel_invariants, howell_form, kernel, mat_mul, Mat};
use super::{InvariantFactors, Ring};

/// `R^gens / rowspan(rels)`, relations kept in Howell (or Hermite) form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FinModPresentation {
    pub ring: Ring,
    pub gens: usize,
    pub rels: Mat,
}

/// Coefficients `c` with `c A = v`, if any.
pub fn solve_left(ring: Ring, a: &Mat, v: &[BigInt], ncols: usize) -> Option<Vec<BigInt>> {
    let m = a.len();
    let aug: Mat = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..m).map(|j| BigInt::from((i == j) as i32)));
            r
        })
        .collect();
    let h = howell_form(ring, &aug, ncols + m);
    let mut w: Vec<BigInt> = v.iter().map(|x| ring.reduce(x)).collect();
    let mut coeffs = vec![BigInt::zero(); m];
    for row in &h {
        let Some(c) = row[..ncols].iter().position(|x| !x.is_zero()) else {
            continue;
        };
        if w[c].is_zero() {
            continue;
        }
        let (q, r) = w[c].div_mod_floor(&row[c]);
        if !r.is_zero() {
            return None;
        }
        for j in c..ncols {
            w[j] = ring.reduce(&(&w[j] - &q * &row[j]));
        }
        for j in 0..m {
            coeffs[j] = ring.reduce(&(&coeffs[j] + &q * &row[ncols + j]));
        }
    }
    w.iter().all(|x| x.is_zero()).then_some(coeffs)
}

/// Invariants of `span(sub) / span(den)` inside `R^dim`, assuming
/// `span(den) ⊆ span(sub)`.
pub fn subquotient_invariants(ring: Ring, sub: &Mat, den: &Mat, dim: usize) -> InvariantFactors {
    let s = sub.len();
    if s == 0 {
        return InvariantFactors::zero(ring.p());
    }
    let mut stacked = sub.clone();
    stacked.extend(den.iter().cloned());
    let rel: Mat = kernel(ring, &stacked, stacked.len(), dim)
        .into_iter()
        .map(|r| r[..s].to_vec())
        .collect();
    cokernel_invariants(ring, &rel, s)
}

impl FinModPresentation {
    pub fn new(ring: Ring, gens: usize, rels: Mat) -> Self {
        let rels = howell_form(ring, &rels, gens);
        FinModPresentation { ring, gens, rels }
    }

    pub fn free(ring: Ring, gens: usize) -> Self {
        FinModPresentation { ring, gens, rels: vec![] }
    }

    pub fn zero(ring: Ring) -> Self {
        Self::free(ring, 0)
    }

    pub fn normalize(&self) -> Self {
        Self::new(self.ring, self.gens, self.rels.clone())
    }

    pub fn invariants(&self) -> InvariantFactors {
        cokernel_invariants(self.ring, &self.rels, self.gens)
    }

    pub fn is_zero(&self) -> bool {
        self.invariants().is_zero()
    }

    /// Canonical representative of the class of `v`.
    pub fn reduce(&self, v: &[BigInt]) -> Vec<BigInt> {
        let ring = self.ring;
        let mut w: Vec<BigInt> = v.iter().map(|x| ring.reduce(x)).collect();
        for row in &self.rels {
            let Some(c) = row.iter().position(|x| !x.is_zero()) else {
                continue;
            };
            let q = w[c].div_floor(&row[c]);
            if q.is_zero() {
                continue;
            }
            for j in c..self.gens {
                w[j] = ring.reduce(&(&w[j] - &q * &row[j]));
            }
        }
        w
    }

    pub fn is_zero_elem(&self, v: &[BigInt]) -> bool {
        self.reduce(v).iter().all(|x| x.is_zero())
    }

    /// Whether `x |-> x m` is well defined into `target`.
    pub fn map_is_defined(&self, m: &Mat, target: &FinModPresentation) -> bool {
        mat_mul(self.ring, &self.rels, m, self.gens, target.gens)
            .iter()
            .all(|r| target.is_zero_elem(r))
    }

    /// Whether `x |-> x m` is the zero map into `target`.
    pub fn map_is_zero(&self, m: &Mat, target: &FinModPresentation) -> bool {
        m.iter().all(|r| target.is_zero_elem(r))
    }

    pub fn direct_sum(&self, other: &Self) -> Self {
        let n = self.gens + other.gens;
        let mut rels: Mat = self
            .rels
            .iter()
            .map(|r| {
                let mut x = r.clone();
                x.resize(n, BigInt::zero());
                x
            })
            .collect();
        rels.extend(other.rels.iter().map(|r| {
            let mut x = vec![BigInt::zero(); self.gens];
            x.extend(r.iter().cloned());
            x
        }));
        FinModPresentation::new(self.ring, n, rels)
    }

    /// The quotient by the images of `rows`.
    pub fn quotient(&self, rows: &Mat) -> Self {
        let mut rels = self.rels.clone();
        rels.extend(rows.iter().cloned());
        FinModPresentation::new(self.ring, self.gens, rels)
    }

    /// Number of elements, if finite and at most `limit`.
    pub fn order(&self, limit: u128) -> Option<u128> {
        let inv = self.invariants();
        if inv.free_rank > 0 {
            return None;
        }
        let mut n: u128 = 1;
        for &a in &inv.torsion {
            n = n.checked_mul((self.ring.p() as u128).checked_pow(a)?)?;
            if n > limit {
                return None;
            }
        }
        Some(n)
    }

    /// Every element as its canonical representative; only over `Z/p^R`.
    pub fn elements(&self) -> Option<Vec<Vec<BigInt>>> {
        let modulus = self.ring.modulus()?;
        let mut out = vec![];
        let mut seen = std::collections::BTreeSet::new();
        // canonical reps have entries below the pivots; walk all vectors
        // of the ambient free module, which stays small in practice
        let q: u64 = modulus.try_into().ok()?;
        let total = (q as u128).checked_pow(self.gens as u32)?;
        if total > 1 << 24 {
            return None;
        }
        for mut idx in 0..total {
            let mut v = Vec::with_capacity(self.gens);
            for _ in 0..self.gens {
                v.push(BigInt::from((idx % q as u128) as u64));
                idx /= q as u128;
            }
            let r = self.reduce(&v);
            if seen.insert(r.clone()) {
                out.push(r);
            }
        }
        Some(out)
    }
}

