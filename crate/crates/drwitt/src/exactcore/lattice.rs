//! Full-rank `Z_(p)`-lattices inside `Q^n`, held in a canonical upper
//! triangular basis with pivots `p^e` (`e` may be negative). Arithmetic is
//! exact; the precision budget only bounds the exponents callers accept.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{pow_big, valuation, InvariantFactors};
use crate::error::{Error, Result};

pub type QVec = Vec<BigRational>;
pub type QMat = Vec<QVec>;

pub fn q_int(x: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

/// `p^e` as a rational, any sign of `e`.
pub fn q_ppow(p: u64, e: i64) -> BigRational {
    if e >= 0 {
        BigRational::from_integer(pow_big(p, e as u32))
    } else {
        BigRational::new(BigInt::one(), pow_big(p, (-e) as u32))
    }
}

pub fn q_valuation(x: &BigRational, p: u64) -> Option<i64> {
    let n = valuation(x.numer(), p)?;
    let d = valuation(x.denom(), p).unwrap_or(0);
    Some(n as i64 - d as i64)
}

pub fn q_identity(n: usize) -> QMat {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { q_int(1) } else { q_int(0) }).collect())
        .collect()
}

pub fn q_zero(rows: usize, cols: usize) -> QMat {
    vec![vec![q_int(0); cols]; rows]
}

/// Product of a `rows x inner` matrix with an `inner x cols` one.
pub fn q_mul(a: &QMat, b: &QMat, inner: usize, cols: usize) -> QMat {
    a.iter()
        .map(|row| {
            let mut out = vec![BigRational::zero(); cols];
            for k in 0..inner {
                if row[k].is_zero() {
                    continue;
                }
                for (j, o) in out.iter_mut().enumerate() {
                    if !b[k][j].is_zero() {
                        *o += &row[k] * &b[k][j];
                    }
                }
            }
            out
        })
        .collect()
}

pub fn q_vec_mul(v: &QVec, b: &QMat, cols: usize) -> QVec {
    q_mul(&vec![v.clone()], b, v.len(), cols).pop().unwrap()
}

pub fn q_transpose(a: &QMat, rows: usize, cols: usize) -> QMat {
    (0..cols).map(|j| (0..rows).map(|i| a[i][j].clone()).collect()).collect()
}

pub fn q_scale(a: &QMat, s: &BigRational) -> QMat {
    a.iter().map(|r| r.iter().map(|x| x * s).collect()).collect()
}

/// Canonical representative of `x` modulo `p^e Z_(p)`.
fn canon_mod(x: &BigRational, p: u64, e: i64) -> BigRational {
    if x.is_zero() {
        return x.clone();
    }
    let k = valuation(x.denom(), p).unwrap_or(0) as i64;
    let m = e + k;
    if m <= 0 {
        return BigRational::zero();
    }
    let pk = pow_big(p, k as u32);
    let b = x.denom() / &pk;
    let modulus = pow_big(p, m as u32);
    let inv = b.extended_gcd(&modulus).x;
    let num = (x.numer() * inv).mod_floor(&modulus);
    BigRational::new(num, pk)
}

/// Inverse of an invertible square matrix by Gauss-Jordan.
pub fn q_inverse(a: &QMat, n: usize) -> Option<QMat> {
    let mut m: QMat = a
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| if i == j { q_int(1) } else { q_int(0) }));
            row
        })
        .collect();
    for c in 0..n {
        let k = (c..n).find(|&i| !m[i][c].is_zero())?;
        m.swap(c, k);
        let inv = m[c][c].recip();
        for x in m[c].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..n {
            if i != c && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..2 * n {
                    let t = &f * &m[c][j];
                    m[i][j] -= t;
                }
            }
        }
    }
    Some(m.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// p-local elementary divisors of a rational matrix whose entries lie in
/// `Z_(p)`; one valuation per nonzero pivot.
pub fn q_local_valuations(a: &QMat, rows: usize, cols: usize, p: u64) -> Vec<i64> {
    let mut m = a.clone();
    let mut out = vec![];
    for k in 0..rows.min(cols) {
        let mut best: Option<(i64, usize, usize)> = None;
        for (i, row) in m.iter().enumerate().skip(k) {
            for (j, x) in row.iter().enumerate().skip(k) {
                if let Some(v) = q_valuation(x, p) {
                    if best.map_or(true, |b| v < b.0) {
                        best = Some((v, i, j));
                    }
                }
            }
        }
        let Some((v, bi, bj)) = best else { break };
        m.swap(k, bi);
        for row in m.iter_mut() {
            row.swap(k, bj);
        }
        let pivot = m[k][k].clone();
        for i in k + 1..rows {
            if m[i][k].is_zero() {
                continue;
            }
            let f = &m[i][k] / &pivot;
            for j in k..cols {
                let t = &f * &m[k][j];
                m[i][j] -= t;
            }
        }
        out.push(v);
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Lattice {
    p: u64,
    dim: usize,
    rows: QMat,
}

impl Lattice {
    /// `Z_(p)^dim`.
    pub fn standard(p: u64, dim: usize) -> Self {
        Lattice {
            p,
            dim,
            rows: q_identity(dim),
        }
    }

    /// `p^e Z_(p)^dim`.
    pub fn scaled_standard(p: u64, dim: usize, e: i64) -> Self {
        Lattice {
            p,
            dim,
            rows: q_scale(&q_identity(dim), &q_ppow(p, e)),
        }
    }

    /// Lattice spanned by `gens`; fails unless they span `Q^dim`.
    pub fn from_generators(p: u64, dim: usize, gens: &[QVec]) -> Result<Self> {
        let mut rows: QMat = gens.iter().filter(|g| g.iter().any(|x| !x.is_zero())).cloned().collect();
        for c in 0..dim {
            let mut best: Option<(i64, usize)> = None;
            for (i, row) in rows.iter().enumerate().skip(c) {
                if let Some(v) = q_valuation(&row[c], p) {
                    if best.map_or(true, |b| v < b.0) {
                        best = Some((v, i));
                    }
                }
            }
            let Some((v, k)) = best else {
                return Err(Error::InvalidInput(format!(
                    "generators do not span a full-rank lattice (column {c})"
                )));
            };
            rows.swap(c, k);
            let scale = q_ppow(p, v) / &rows[c][c];
            for x in rows[c].iter_mut() {
                *x = &*x * &scale;
            }
            for i in c + 1..rows.len() {
                if rows[i][c].is_zero() {
                    continue;
                }
                let f = rows[i][c].clone() / &rows[c][c];
                for j in c..dim {
                    let t = &f * &rows[c][j];
                    rows[i][j] -= t;
                }
            }
        }
        rows.truncate(dim);
        for j in 1..dim {
            let e = q_valuation(&rows[j][j], p).unwrap();
            let pe = rows[j][j].clone();
            for i in 0..j {
                let rep = canon_mod(&rows[i][j], p, e);
                if rep != rows[i][j] {
                    let q = (&rows[i][j] - &rep) / &pe;
                    for k in j..dim {
                        let t = &q * &rows[j][k];
                        rows[i][k] -= t;
                    }
                    rows[i][j] = rep;
                }
            }
        }
        Ok(Lattice { p, dim, rows })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn basis(&self) -> &QMat {
        &self.rows
    }

    /// Pivot exponents of the canonical basis.
    pub fn exponents(&self) -> Vec<i64> {
        (0..self.dim)
            .map(|i| q_valuation(&self.rows[i][i], self.p).unwrap())
            .collect()
    }

    /// Largest `e` with the lattice inside `p^e Z^dim`, smallest `f` with
    /// `p^f Z^dim` inside the lattice.
    pub fn exponent_bounds(&self) -> (i64, i64) {
        if self.dim == 0 {
            return (0, 0);
        }
        let lo = self
            .rows
            .iter()
            .flatten()
            .filter_map(|x| q_valuation(x, self.p))
            .min()
            .unwrap();
        let inv = q_inverse(&self.rows, self.dim).unwrap();
        let hi = -inv
            .iter()
            .flatten()
            .filter_map(|x| q_valuation(x, self.p))
            .min()
            .unwrap();
        (lo, hi)
    }

    /// Fails with `PrecisionExhausted` if the lattice needs more than
    /// `budget` p-adic digits to be described.
    pub fn check_budget(&self, budget: u32, context: &str) -> Result<()> {
        let (lo, hi) = self.exponent_bounds();
        if hi - lo > budget as i64 {
            return Err(Error::PrecisionExhausted(format!(
                "{context}: lattice spans {} digits, budget {budget}",
                hi - lo
            )));
        }
        Ok(())
    }

    pub fn scale(&self, e: i64) -> Self {
        let s = q_ppow(self.p, e);
        Lattice::from_generators(self.p, self.dim, &q_scale(&self.rows, &s)).unwrap()
    }

    pub fn sum(&self, other: &Self) -> Self {
        let mut g = self.rows.clone();
        g.extend(other.rows.iter().cloned());
        Lattice::from_generators(self.p, self.dim, &g).unwrap()
    }

    /// Sum with the span of extra (not necessarily full-rank) vectors.
    pub fn sum_with(&self, extra: &[QVec]) -> Self {
        let mut g = self.rows.clone();
        g.extend(extra.iter().cloned());
        Lattice::from_generators(self.p, self.dim, &g).unwrap()
    }

    pub fn dual(&self) -> Self {
        if self.dim == 0 {
            return self.clone();
        }
        let inv = q_inverse(&self.rows, self.dim).unwrap();
        let t = q_transpose(&inv, self.dim, self.dim);
        Lattice::from_generators(self.p, self.dim, &t).unwrap()
    }

    pub fn intersect(&self, other: &Self) -> Self {
        self.dual().sum(&other.dual()).dual()
    }

    /// Coordinates of `v` in the canonical basis.
    pub fn coordinates(&self, v: &QVec) -> QVec {
        let mut w = v.clone();
        let mut c = vec![BigRational::zero(); self.dim];
        for i in 0..self.dim {
            if w[i].is_zero() {
                continue;
            }
            c[i] = &w[i] / &self.rows[i][i];
            for j in i..self.dim {
                let t = &c[i] * &self.rows[i][j];
                w[j] -= t;
            }
        }
        c
    }

    pub fn contains_vec(&self, v: &QVec) -> bool {
        self.coordinates(v)
            .iter()
            .all(|x| q_valuation(x, self.p).map_or(true, |e| e >= 0))
    }

    pub fn contains(&self, other: &Self) -> bool {
        other.rows.iter().all(|r| self.contains_vec(r))
    }

    /// Generators of the image under `x |-> x m`.
    pub fn image(&self, m: &QMat, cols: usize) -> QMat {
        q_mul(&self.rows, m, self.dim, cols)
    }

    /// Image under an invertible square matrix.
    pub fn transform(&self, m: &QMat) -> Result<Self> {
        Lattice::from_generators(self.p, self.dim, &self.image(m, self.dim))
    }

    /// `{x in self : x d in target}` for `d` of shape `dim x target.dim`.
    pub fn preimage_within(&self, d: &QMat, target: &Lattice) -> Self {
        let a = self.dim;
        let b = target.dim;
        if a == 0 || b == 0 {
            return self.clone();
        }
        let tinv = q_inverse(&target.rows, b).unwrap();
        let g = q_mul(&q_mul(&self.rows, d, a, b), &tinv, b, b);
        let mut gens = q_identity(a);
        gens.extend(q_transpose(&g, a, b));
        let c = Lattice::from_generators(self.p, a, &gens).unwrap().dual();
        Lattice::from_generators(self.p, a, &q_mul(&c.rows, &self.rows, a, a)).unwrap()
    }

    /// Invariants of `self / sub`; `sub` must be a sublattice.
    pub fn quotient_invariants(&self, sub: &Lattice) -> Result<InvariantFactors> {
        if self.dim == 0 {
            return Ok(InvariantFactors::zero(self.p));
        }
        let inv = q_inverse(&self.rows, self.dim).unwrap();
        let m = q_mul(&sub.rows, &inv, self.dim, self.dim);
        if m.iter().flatten().any(|x| q_valuation(x, self.p).map_or(false, |e| e < 0)) {
            return Err(Error::InvalidInput("quotient by a non-sublattice".into()));
        }
        let vals = q_local_valuations(&m, self.dim, self.dim, self.p);
        Ok(InvariantFactors::new(
            self.p,
            vals.into_iter().map(|v| v as u32).collect(),
            0,
        ))
    }
}

/// Whether every entry of a rational vector is `p`-integral.
pub fn q_is_integral(v: &[BigRational], p: u64) -> bool {
    v.iter().all(|x| q_valuation(x, p).map_or(true, |e| e >= 0))
}
