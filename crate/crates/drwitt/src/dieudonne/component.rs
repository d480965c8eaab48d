//! One multidegree of the lifted de Rham complex and of its saturation.
//!
//! Forms are written in the basis `x^k dlog x_J`; the integral structure of
//! the lift is the standard lattice in these coordinates. Colimit
//! coordinates identify stage `s` of `M -> η_p M -> η_p² M -> ...` at
//! multidegree `p^s k` with multidegree `k` via `F^{-s}` and division by
//! `p^{ns}` in degree `n`, so `F` becomes the identity on coordinates and
//! `d` at rational `k` has entries `±k_j`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::derham::forms::wedge_sign;
use crate::error::{Error, Result};
use crate::exactcore::{q_zero, Lattice, QMat, Weight};

pub type Key = Vec<Weight>;

pub fn q_weight(w: Weight) -> BigRational {
    BigRational::new(BigInt::from(*w.numer()), BigInt::from(*w.denom()))
}

/// Exponent `u` with denominator `p^u`; the key must have p-power denominators.
pub fn denominator_exponent(p: u64, k: &[Weight]) -> u32 {
    k.iter()
        .map(|w| {
            let mut d = *w.denom();
            let mut u = 0;
            while d % p as i64 == 0 {
                d /= p as i64;
                u += 1;
            }
            u
        })
        .max()
        .unwrap_or(0)
}

pub fn scale_key(k: &[Weight], c: i64) -> Key {
    k.iter().map(|w| *w * Weight::from_integer(c)).collect()
}

/// Variables that may appear in `dlog x_J` at multidegree `k`.
fn allowed(inverted: &[bool], k: &[Weight]) -> u32 {
    let mut m = 0;
    for (j, w) in k.iter().enumerate() {
        if inverted[j] || *w > Weight::zero() {
            m |= 1 << j;
        }
    }
    m
}

/// Masks of each degree `0..=top`, sorted.
pub fn basis_masks(inverted: &[bool], k: &[Weight], top: usize) -> Vec<Vec<u32>> {
    let a = allowed(inverted, k);
    let mut out = vec![vec![]; top + 1];
    let mut s = a;
    loop {
        let n = s.count_ones() as usize;
        if n <= top {
            out[n].push(s);
        }
        if s == 0 {
            break;
        }
        s = (s - 1) & a;
    }
    for v in out.iter_mut() {
        v.sort();
    }
    out
}

/// `d(x^k dlog x_J) = Σ_j k_j dlog x_j ∧ dlog x_J`.
pub fn d_matrix(k: &[Weight], src: &[u32], tgt: &[u32]) -> QMat {
    let mut m = q_zero(src.len(), tgt.len());
    for (a, &jm) in src.iter().enumerate() {
        for (j, w) in k.iter().enumerate() {
            if w.is_zero() {
                continue;
            }
            let Some(neg) = wedge_sign(1 << j, jm) else { continue };
            let Some(b) = tgt.iter().position(|&t| t == jm | (1 << j)) else { continue };
            let v = q_weight(*w);
            m[a][b] = if neg { -v } else { v };
        }
    }
    m
}

pub fn diffs_at(k: &[Weight], masks: &[Vec<u32>]) -> Vec<QMat> {
    (0..masks.len().saturating_sub(1))
        .map(|n| d_matrix(k, &masks[n], &masks[n + 1]))
        .collect()
}

/// `(η_p M)^n = {x ∈ p^n M^n : dx ∈ p^{n+1} M^{n+1}}`.
pub fn eta_p(lattices: &[Lattice], diffs: &[QMat]) -> Vec<Lattice> {
    (0..lattices.len())
        .map(|n| {
            let src = lattices[n].scale(n as i64);
            match diffs.get(n) {
                Some(d) => src.preimage_within(d, &lattices[n + 1].scale(n as i64 + 1)),
                None => src,
            }
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Component {
    pub key: Key,
    pub masks: Vec<Vec<u32>>,
    pub lattices: Vec<Lattice>,
    /// `diffs[n]` maps degree `n` to degree `n + 1`.
    pub diffs: Vec<QMat>,
    /// Number of `α_F` stages after which the chain was seen to settle.
    pub stages: u32,
}

impl Component {
    pub fn dim(&self, n: usize) -> usize {
        self.masks.get(n).map_or(0, |m| m.len())
    }

    pub fn top(&self) -> usize {
        self.masks.len() - 1
    }
}

/// Standard lattices at an integral multidegree.
pub fn lift_component(p: u64, inverted: &[bool], top: usize, k: &[Weight]) -> Component {
    let masks = basis_masks(inverted, k, top);
    let lattices = masks.iter().map(|m| Lattice::standard(p, m.len())).collect();
    Component {
        key: k.to_vec(),
        diffs: diffs_at(k, &masks),
        masks,
        lattices,
        stages: 0,
    }
}

/// How many consecutive equal stages certify that the chain settled.
pub const SETTLE_CONFIRMATIONS: u32 = 2;

type CacheKey = (u64, Vec<bool>, usize, Key);

fn cache() -> &'static Mutex<HashMap<CacheKey, Arc<Component>>> {
    static CACHE: OnceLock<Mutex<HashMap<CacheKey, Arc<Component>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn stage(p: u64, inverted: &[bool], top: usize, k: &[Weight], s: u32) -> Vec<Lattice> {
    let m = scale_key(k, (p as i64).pow(s));
    let lift = lift_component(p, inverted, top, &m);
    let mut lat = lift.lattices;
    for _ in 0..s {
        lat = eta_p(&lat, &lift.diffs);
    }
    lat.iter()
        .enumerate()
        .map(|(n, l)| l.scale(-(n as i64) * s as i64))
        .collect()
}

/// Saturated component at a multidegree with p-power denominators.
///
/// Stages start at the first integral one and run until
/// [`SETTLE_CONFIRMATIONS`] consecutive stages agree; the chain is checked
/// to be increasing on the way. More than `budget` extra stages, or a
/// lattice wider than `budget` digits, is reported as `PrecisionExhausted`.
pub fn saturated_component(p: u64, inverted: &[bool], top: usize, k: &[Weight], budget: u32) -> Result<Arc<Component>> {
    let ck = (p, inverted.to_vec(), top, k.to_vec());
    let u = denominator_exponent(p, k);
    let cached = cache().lock().unwrap().get(&ck).cloned();
    if let Some(c) = cached {
        if c.stages - u > budget {
            return Err(Error::PrecisionExhausted(format!(
                "saturation at multidegree {k:?} needs {} stages, budget {budget}",
                c.stages - u
            )));
        }
        check_lattices(&c.lattices, k, budget)?;
        return Ok(c);
    }
    let mut prev = stage(p, inverted, top, k, u);
    let mut same = 0;
    let mut s = u;
    while same < SETTLE_CONFIRMATIONS {
        if s >= u + budget + SETTLE_CONFIRMATIONS {
            // the settled stage would lie beyond the budget
            return Err(Error::PrecisionExhausted(format!(
                "saturation at multidegree {k:?} did not settle within {budget} stages"
            )));
        }
        s += 1;
        let next = stage(p, inverted, top, k, s);
        for (a, b) in prev.iter().zip(&next) {
            if !b.contains(a) {
                return Err(Error::InvalidInput(format!("saturation chain at {k:?} is not increasing")));
            }
        }
        if next == prev {
            same += 1;
        } else {
            same = 0;
        }
        prev = next;
    }
    check_lattices(&prev, k, budget)?;
    let masks = basis_masks(inverted, k, top);
    let comp = Arc::new(Component {
        key: k.to_vec(),
        diffs: diffs_at(k, &masks),
        masks,
        lattices: prev,
        stages: s - SETTLE_CONFIRMATIONS,
    });
    cache().lock().unwrap().insert(ck, comp.clone());
    Ok(comp)
}

fn check_lattices(lattices: &[Lattice], k: &[Weight], budget: u32) -> Result<()> {
    for (n, l) in lattices.iter().enumerate() {
        l.check_budget(budget, &format!("saturated degree {n} at {k:?}"))?;
    }
    Ok(())
}

/// `p^e` times the identity.
pub fn scalar_matrix(p: u64, dim: usize, e: i64) -> QMat {
    let mut m = q_zero(dim, dim);
    let s = crate::exactcore::q_ppow(p, e);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = s.clone();
    }
    m
}

pub fn q_is_zero_mat(m: &QMat) -> bool {
    m.iter().flatten().all(|x| x.is_zero())
}
