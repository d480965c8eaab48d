//! Exact arithmetic substrate: matrices over `Z` and `Z/p^R`, Howell and
//! Hermite forms, homology of finite complexes, `Z_(p)`-lattices and finite
//! fields.

mod fq;
mod fqlin;
mod homology;
mod lattice;
mod matrix;
mod presented;

pub use fq::{Fq, FqElem};
pub use fqlin::{left_kernel, vec_mat, Echelon, FMat};
pub use homology::{homology, Complex, SubquotientComplex};
pub use lattice::{
    q_identity, q_int, q_inverse, q_is_integral, q_local_valuations, q_mul, q_ppow, q_scale,
    q_transpose, q_valuation, q_vec_mul, q_zero, Lattice, QMat, QVec,
};
pub use presented::{solve_left, subquotient_invariants, FinModPresentation};
pub use matrix::{
    cokernel_invariants, howell_form, kernel, local_valuations, mat_mul, row_span_contains, Mat,
};

use num_bigint::BigInt;
use num_rational::Ratio;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;

use crate::error::{Error, Result};

/// Rational weights with p-power denominators.
pub type Weight = Ratio<i64>;

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// p-adic valuation of a nonzero integer; `None` for zero.
pub fn valuation(x: &BigInt, p: u64) -> Option<u32> {
    if x.is_zero() {
        return None;
    }
    let p = BigInt::from(p);
    let mut v = 0;
    let mut y = x.clone();
    while (&y % &p).is_zero() {
        y /= &p;
        v += 1;
    }
    Some(v)
}

pub fn pow_big(p: u64, e: u32) -> BigInt {
    num_traits::pow(BigInt::from(p), e as usize)
}

/// Working precision: prime, p-adic exponent budget `R`, weight cap.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Precision {
    pub p: u64,
    pub r: u32,
    pub weight_cap: Weight,
}

impl Precision {
    pub fn new(p: u64, r: u32, weight_cap: Weight) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::InvalidInput(format!("{p} is not prime")));
        }
        if r == 0 {
            return Err(Error::InvalidInput("precision exponent must be positive".into()));
        }
        if weight_cap < Weight::zero() {
            return Err(Error::InvalidInput("weight cap must be nonnegative".into()));
        }
        let mut den = *weight_cap.denom();
        let mut steps = 0;
        while den % p as i64 == 0 {
            den /= p as i64;
            steps += 1;
        }
        if den != 1 || steps > r {
            return Err(Error::InvalidInput(format!(
                "weight cap {weight_cap} needs a denominator dividing {p}^{r}"
            )));
        }
        Ok(Precision { p, r, weight_cap })
    }

    /// The same data one p-adic digit finer.
    pub fn refined(&self) -> Self {
        Precision {
            r: self.r + 1,
            ..self.clone()
        }
    }
}

/// Base rings for finitely presented modules.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Ring {
    /// `Z`; invariants are reported after localizing at `p`.
    Integers { p: u64 },
    /// `Z/p^r`.
    ModPrimePower { p: u64, r: u32 },
}

impl Ring {
    pub fn p(&self) -> u64 {
        match *self {
            Ring::Integers { p } | Ring::ModPrimePower { p, .. } => p,
        }
    }

    pub fn modulus(&self) -> Option<BigInt> {
        match *self {
            Ring::Integers { .. } => None,
            Ring::ModPrimePower { p, r } => Some(pow_big(p, r)),
        }
    }

    pub fn reduce(&self, x: &BigInt) -> BigInt {
        match self.modulus() {
            None => x.clone(),
            Some(n) => num_integer::Integer::mod_floor(x, &n),
        }
    }
}

/// Invariant factors of a finitely generated p-local module.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct InvariantFactors {
    pub p: u64,
    /// Exponents `a` of the cyclic summands `Z/p^a`, ascending.
    pub torsion: Vec<u32>,
    pub free_rank: usize,
}

impl InvariantFactors {
    pub fn new(p: u64, mut torsion: Vec<u32>, free_rank: usize) -> Self {
        torsion.retain(|&a| a > 0);
        torsion.sort_unstable();
        InvariantFactors {
            p,
            torsion,
            free_rank,
        }
    }

    /// Invariants of a finite abelian p-group from `counts[j] = |G[p^j]|`
    /// for `j = 0..=J`, where `G[p^J] = G`.
    pub fn from_torsion_counts(p: u64, counts: &[u64]) -> Self {
        let log = |mut n: u64| {
            let mut k = 0;
            while n > 1 {
                n /= p;
                k += 1;
            }
            k
        };
        let at_least: Vec<u32> = (1..counts.len()).map(|j| log(counts[j] / counts[j - 1])).collect();
        let mut torsion = vec![];
        for j in 0..at_least.len() {
            let next = at_least.get(j + 1).copied().unwrap_or(0);
            torsion.extend(std::iter::repeat(j as u32 + 1).take((at_least[j] - next) as usize));
        }
        Self::new(p, torsion, 0)
    }

    pub fn zero(p: u64) -> Self {
        Self::new(p, vec![], 0)
    }

    /// `Z/p^a` repeated `count` times.
    pub fn cyclic(p: u64, a: u32, count: usize) -> Self {
        Self::new(p, vec![a; count], 0)
    }

    pub fn is_zero(&self) -> bool {
        self.torsion.is_empty() && self.free_rank == 0
    }

    /// Order of the torsion part.
    pub fn torsion_order(&self) -> BigInt {
        self.torsion
            .iter()
            .fold(BigInt::one(), |acc, &a| acc * pow_big(self.p, a))
    }

    /// log_p of the torsion order.
    pub fn length(&self) -> u32 {
        self.torsion.iter().sum()
    }

    pub fn direct_sum(&self, other: &Self) -> Self {
        let mut t = self.torsion.clone();
        t.extend_from_slice(&other.torsion);
        Self::new(self.p, t, self.free_rank + other.free_rank)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "torsion": self.torsion.iter().map(|a| format!("{}^{}", self.p, a)).collect::<Vec<_>>(),
            "free_rank": self.free_rank,
        })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let bad = || Error::InvalidInput(format!("not an invariant-factor object: {v}"));
        let free_rank = v.get("free_rank").and_then(|x| x.as_u64()).ok_or_else(bad)? as usize;
        let mut p = 0;
        let mut torsion = vec![];
        for t in v.get("torsion").and_then(|x| x.as_array()).ok_or_else(bad)? {
            let s = t.as_str().ok_or_else(bad)?;
            let (base, exp) = s.split_once('^').ok_or_else(bad)?;
            p = base.parse().map_err(|_| bad())?;
            torsion.push(exp.parse().map_err(|_| bad())?);
        }
        Ok(Self::new(p, torsion, free_rank))
    }
}

impl fmt::Display for InvariantFactors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self
            .torsion
            .iter()
            .map(|&a| {
                if a == 1 {
                    format!("Z/{}", self.p)
                } else {
                    format!("Z/{}^{}", self.p, a)
                }
            })
            .collect();
        if self.free_rank > 0 {
            parts.push(if self.free_rank == 1 {
                "Z".to_string()
            } else {
                format!("Z^{}", self.free_rank)
            });
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

pub fn invariants_isomorphic(a: &InvariantFactors, b: &InvariantFactors) -> bool {
    a == b
}
