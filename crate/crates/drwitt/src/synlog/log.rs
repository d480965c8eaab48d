//! The subgroup of `WΩ^i / p^r` generated by `dlog[u_1] ∧ ... ∧ dlog[u_i]`.
//!
//! Units of the curated rings are `λ x^a` with `λ ∈ F_q^×` and `a` supported
//! on the inverted variables. `dlog[λ] = 0`, so a symbol only depends on the
//! exponent vectors, and its coordinates on `dlog x_J` are the `i × i`
//! minors of the exponent matrix.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::derham::RingSpec;
use crate::dieudonne::{basis_masks, top_degree};
use crate::error::{Error, Result};
use crate::exactcore::{InvariantFactors, Lattice, QVec};

use super::{span_invariants, zero_key};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnitSymbol {
    /// Exponent vectors of the units, one per factor.
    pub units: Vec<Vec<i64>>,
}

#[derive(Clone, Debug)]
pub struct LogLattice {
    pub degree: usize,
    pub level: u32,
    pub p: u64,
    pub masks: Vec<u32>,
    /// Symbols that enlarged the span, in enumeration order.
    pub symbols: Vec<UnitSymbol>,
    /// Their coordinates in the basis of `WΩ^i_0`.
    pub generators: Vec<QVec>,
    /// Over `Z_p`; the `W(F_q)`-span has the same invariants repeated `f` times.
    pub invariants: InvariantFactors,
    pub enumerated: usize,
}

fn det(m: &mut [Vec<BigInt>]) -> BigInt {
    // Bareiss
    let n = m.len();
    if n == 0 {
        return BigInt::from(1);
    }
    let mut sign = 1;
    let mut prev = BigInt::from(1);
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                Some(r) => {
                    m.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i][j] = (&m[i][j] * &m[k][k] - &m[i][k] * &m[k][j]) / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    &m[n - 1][n - 1] * sign
}

/// Coordinates of `dlog x^{a_1} ∧ ... ∧ dlog x^{a_i}` on the `dlog x_J`.
pub fn dlog_vector(masks: &[u32], units: &[Vec<i64>]) -> QVec {
    masks
        .iter()
        .map(|&mask| {
            let cols: Vec<usize> = (0..32).filter(|j| mask >> j & 1 == 1).collect();
            if cols.len() != units.len() {
                return BigRational::zero();
            }
            let mut m: Vec<Vec<BigInt>> = units
                .iter()
                .map(|u| cols.iter().map(|&c| BigInt::from(u.get(c).copied().unwrap_or(0))).collect())
                .collect();
            BigRational::from_integer(det(&mut m))
        })
        .collect()
}

/// Exponent vectors with entries in `[-bound, bound]` on the inverted
/// variables; the zero vector stands for the constants.
fn unit_exponents(spec: &RingSpec, bound: i64) -> Vec<Vec<i64>> {
    let mut out = vec![vec![0; spec.nvars()]];
    if spec.is_perfection() {
        return out;
    }
    for j in 0..spec.nvars() {
        if !spec.inverted[j] {
            continue;
        }
        let mut next = vec![];
        for v in &out {
            for a in -bound..=bound {
                let mut w = v.clone();
                w[j] = a;
                next.push(w);
            }
        }
        out = next;
    }
    out
}

pub fn log_lattice(spec: &RingSpec, i: usize, r: u32) -> Result<LogLattice> {
    log_lattice_with_budget(spec, i, r, 1, super::DEFAULT_SYMBOL_BUDGET)
}

/// Enumerates every `i`-fold symbol of units with exponents up to `bound`.
pub fn log_lattice_with_budget(spec: &RingSpec, i: usize, r: u32, bound: i64, budget: usize) -> Result<LogLattice> {
    let p = spec.p;
    let top = top_degree(spec);
    let masks = if i <= top {
        basis_masks(&spec.inverted, &zero_key(spec.nvars()), top)[i].clone()
    } else {
        vec![]
    };
    let dim = masks.len();
    let units = unit_exponents(spec, bound);
    let count = (units.len() as u128).checked_pow(i as u32).unwrap_or(u128::MAX);
    if count > budget as u128 {
        return Err(Error::UnitEnumerationCap { budget });
    }
    let ambient = Lattice::standard(p, dim);
    let floor = Lattice::scaled_standard(p, dim, r as i64);
    let mut span = floor.clone();
    let mut symbols = vec![];
    let mut generators = vec![];
    let mut idx = vec![0usize; i];
    let mut enumerated = 0;
    if dim > 0 {
        loop {
            enumerated += 1;
            let chosen: Vec<Vec<i64>> = idx.iter().map(|&t| units[t].clone()).collect();
            let v = ambient.coordinates(&dlog_vector(&masks, &chosen));
            if !span.contains_vec(&v) {
                span = span.sum_with(std::slice::from_ref(&v));
                symbols.push(UnitSymbol { units: chosen });
                generators.push(v);
            }
            // odometer
            let mut pos = 0;
            while pos < i {
                idx[pos] += 1;
                if idx[pos] < units.len() {
                    break;
                }
                idx[pos] = 0;
                pos += 1;
            }
            if pos == i {
                break;
            }
        }
    }
    Ok(LogLattice {
        degree: i,
        level: r,
        p,
        masks,
        symbols,
        invariants: span_invariants(p, r, &generators, dim)?,
        generators,
        enumerated,
    })
}

/// The level-`(r+1)` symbols reduce onto the level-`r` ones.
pub fn log_mod_compat(spec: &RingSpec, i: usize, r: u32) -> Result<bool> {
    let hi = log_lattice(spec, i, r + 1)?;
    let lo = log_lattice(spec, i, r)?;
    let dim = lo.masks.len();
    if dim == 0 {
        return Ok(hi.masks.is_empty());
    }
    let floor = Lattice::scaled_standard(spec.p, dim, r as i64);
    let a = floor.sum_with(&hi.generators);
    let b = floor.sum_with(&lo.generators);
    Ok(a.contains(&b) && b.contains(&a))
}
